import math

import numpy as np
import pytest

from cube_pisier.cube import CubeFunction, decode_point, subset_mask, translate
from cube_pisier.errors import DegenerateTime, QuadratureUnderresolved
from cube_pisier.operators import d_j, heat
from cube_pisier.semigroup import (
    BiasedBitLaw,
    QuadratureScheme,
    delta_weight,
    integral_representation,
    integral_residual,
    smoothed_derivative,
    verify_distributional_invariance,
    verify_main_identity,
    xi_expectation,
    xi_weight,
)


def test_xi_weight_limits():
    n = 3
    far = BiasedBitLaw(60.0, n)
    for x in range(8):
        assert xi_weight(decode_point(x, n), far) == pytest.approx(2.0**-n, abs=1e-15)
    origin = BiasedBitLaw(0.0, n)
    assert xi_weight(np.ones(n), origin) == 1.0
    assert all(xi_weight(decode_point(x, n), origin) == 0 for x in range(1, 8))


@pytest.mark.parametrize("t", [0.0, 0.05, 0.7, 3.0])
def test_xi_weight_normalized(t):
    law = BiasedBitLaw(t, 3)
    total = sum(xi_weight(decode_point(x, 3), law) for x in range(8))
    assert abs(total - 1) <= 1e-14
    np.testing.assert_allclose(law.weights(), [xi_weight(decode_point(x, 3), law) for x in range(8)],
                               atol=1e-16)


@pytest.mark.parametrize("t", [0.05, 0.7, 2.0])
def test_delta_weight_moments(t):
    law = BiasedBitLaw(t, 1)
    probs = {1: (1 + law.r) / 2, -1: (1 - law.r) / 2}
    mean = sum(p * delta_weight(s, law) for s, p in probs.items())
    second = sum(p * delta_weight(s, law) ** 2 for s, p in probs.items())
    assert abs(mean) <= 1e-15
    assert second == pytest.approx(1.0, abs=1e-14)


def test_delta_times_xi_expectation():
    law = BiasedBitLaw(0.7, 1)
    value = sum(p * s * delta_weight(s, law) for s, p in {1: (1 + law.r) / 2, -1: (1 - law.r) / 2}.items())
    assert value == pytest.approx(math.sqrt(1 - math.exp(-1.4)), abs=1e-15)
    with pytest.raises(DegenerateTime):
        delta_weight(1, BiasedBitLaw(0.0, 1))


@pytest.mark.parametrize("n", [1, 4, 8])
@pytest.mark.parametrize("t", [0.05, 0.3, 1.0, 3.0])
def test_smoothed_derivative_matches_heat_of_derivative(rng, n, t):
    f = CubeFunction.random(n, 2, rng)
    for j in range(n):
        gap = smoothed_derivative(f, j, t).values - heat(d_j(f, j), t).values
        assert np.max(np.abs(gap)) <= 1e-10


def test_smoothed_derivative_special_cases():
    c = CubeFunction.constant(3, [1.0, -2.0])
    for t in (0.1, 2.0):
        assert np.max(np.abs(smoothed_derivative(c, 1, t).values)) <= 1e-15
    for j in range(3):
        w = CubeFunction.character(3, 1 << j)
        t = 0.8
        np.testing.assert_allclose(smoothed_derivative(w, j, t).values, math.exp(-t) * w.values,
                                   atol=1e-14)
    with pytest.raises(DegenerateTime):
        smoothed_derivative(c, 0, 0.0)


def test_verify_main_identity(rng):
    f = CubeFunction.random(6, 2, rng)
    assert verify_main_identity(f, [0.05, 0.5, 2.0]) <= 1e-10
    assert verify_main_identity(CubeFunction.constant(3, [0.0]), [0.3]) == 0.0
    for S in range(16):
        assert verify_main_identity(CubeFunction.character(4, S), [0.05, 0.5, 2.0]) <= 1e-12


def test_xi_expectation_is_heat(rng):
    f = CubeFunction.random(7, 3, rng)
    for t in (0.05, 0.3, 1.0, 3.0):
        assert np.max(np.abs(xi_expectation(f, t).values - heat(f, t).values)) <= 1e-11


def test_distributional_invariance(rng):
    f = CubeFunction.random(5, 2, rng)
    for _ in range(5):
        xi = rng.choice([-1, 1], size=5)
        assert verify_distributional_invariance(f, xi)
        assert np.array_equal(np.sort(translate(f, xi).values[:, 0]), np.sort(f.values[:, 0]))


def test_quadrature_scheme():
    q = QuadratureScheme.gauss_legendre(64)
    assert abs(q.weights.sum() - math.pi / 2) <= 1e-12
    assert np.all((q.nodes > 0) & (q.nodes < math.pi / 2))
    assert abs(q.integrate(lambda t: 1.0) - math.pi / 2) <= 1e-12
    # int_0^inf e^{-t} (e^{-t}/sqrt(1-e^{-2t})) dt = int_0^{pi/2} sin = 1
    assert abs(q.integrate(lambda t: math.exp(-t)) - 1.0) <= 1e-12


def test_integral_single_mode():
    n = 2
    f_list = [CubeFunction.character(n, subset_mask([0])), CubeFunction.constant(n, [0.0])]
    value, sign = integral_representation(f_list, QuadratureScheme.gauss_legendre(64))
    target = CubeFunction.character(n, subset_mask([0])).values
    assert np.max(np.abs(value.values - sign * target)) <= 1e-8
    assert sign == 1


def test_integral_of_constants_vanishes():
    f_list = [CubeFunction.constant(3, [1.0, 2.0]) for _ in range(3)]
    value, _ = integral_representation(f_list)
    assert np.max(np.abs(value.values)) <= 1e-14


def test_integral_random(rng):
    f_list = [CubeFunction.random(5, 2, rng) for _ in range(5)]
    residual, sign = integral_residual(f_list)
    assert residual <= 1e-6
    assert sign == 1


def test_integral_underresolved(rng):
    f_list = [CubeFunction.random(4, 1, rng) for _ in range(4)]
    with pytest.raises(QuadratureUnderresolved):
        integral_representation(f_list, QuadratureScheme.gauss_legendre(2))
