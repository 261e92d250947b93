import math

import numpy as np
import pytest

from dicke_qpt import DegenerateCoupling, ModelParams, ZeroCooperation, derived_scalars
from dicke_qpt.model import delta


def test_derived_scalars_hand_values():
    # hand evaluation: varsigma = 0.25/2 + 1/2, sigma = 0.25/4 + 1/4,
    # delta = 18*2 / (8*9*0.625)
    p = ModelParams(18, 18, 2.0, (2.0, 2.0), (0.5, 1.0))
    scal = derived_scalars(p)
    assert scal.varsigma == pytest.approx(0.625, abs=1e-15)
    assert scal.sigma == pytest.approx(0.3125, abs=1e-15)
    assert scal.delta == pytest.approx(0.8, abs=1e-15)
    assert scal.epsilon == pytest.approx(math.exp(-9.0), rel=1e-14)


def test_zero_coupling_leaves_delta_unavailable():
    p = ModelParams(18, 18, 2.0, (2.0, 2.0), (0.0, 0.0))
    scal = derived_scalars(p)
    assert scal.varsigma == 0.0
    assert scal.sigma == 0.0
    assert scal.delta is None and scal.epsilon is None
    with pytest.raises(DegenerateCoupling):
        scal.require_delta()


def test_zero_cooperation_raises():
    p = ModelParams(18, 0, 2.0, (2.0, 2.0), (0.5, 1.0))
    with pytest.raises(ZeroCooperation):
        delta(p)


def test_delta_equals_one_solution():
    # gamma2 = sqrt(0.75) makes varsigma = 0.5 and delta exactly 1
    p = ModelParams(18, 18, 2.0, (2.0, 2.0), (0.5, math.sqrt(0.75)))
    assert delta(p) == pytest.approx(1.0, abs=1e-15)


def test_validation_rejects_bad_labels():
    with pytest.raises(ValueError):
        ModelParams(18, 19, 2.0, (2.0,), (0.5,))  # N - 2j odd
    with pytest.raises(ValueError):
        ModelParams(18, 20, 2.0, (2.0,), (0.5,))  # 2j > N
    with pytest.raises(ValueError):
        ModelParams(18, 18, 2.0, (0.0,), (0.5,))  # Omega must be positive
    with pytest.raises(ValueError):
        ModelParams(18, 18, 2.0, (2.0,), (-0.1,))  # negative coupling
    with pytest.raises(ValueError):
        ModelParams.from_j(18, 9.3, 2.0, (2.0,), (0.5,))  # 2j not integral


def test_half_integer_j_allowed_for_odd_n():
    p = ModelParams.from_j(5, 2.5, 1.0, (1.0,), (0.3,))
    assert p.two_j == 5
    assert p.j == 2.5


def test_delta_invariant_under_energy_rescaling():
    # delta and epsilon are dimensionless: scaling every energy
    # (omega_a, Omega_i, gamma_i) by c > 0 leaves them unchanged
    rng = np.random.default_rng(42)
    p = ModelParams(18, 14, 1.7, (2.0, 1.1), (0.4, 0.9))
    base = derived_scalars(p)
    for c in rng.uniform(0.1, 10.0, size=8):
        scaled = ModelParams(
            18, 14, c * 1.7,
            tuple(c * w for w in p.omegas),
            tuple(c * g for g in p.gammas),
        )
        scal = derived_scalars(scaled)
        assert scal.delta == pytest.approx(base.delta, rel=1e-12)
        assert scal.epsilon == pytest.approx(base.epsilon, rel=1e-12)
        assert scal.varsigma == pytest.approx(c * base.varsigma, rel=1e-12)


def test_scalars_additive_over_modes():
    p = ModelParams(18, 12, 2.0, (2.0, 1.3, 0.7), (0.5, 0.8, 0.2))
    scal = derived_scalars(p)
    single = [
        derived_scalars(ModelParams(18, 12, 2.0, (w,), (g,)))
        for w, g in zip(p.omegas, p.gammas)
    ]
    assert scal.varsigma == pytest.approx(sum(s.varsigma for s in single), rel=1e-14)
    assert scal.sigma == pytest.approx(sum(s.sigma for s in single), rel=1e-14)
