"""Probabilistic representation of the smoothed derivative e^{-t Lap} D_j.

With independent bits xi_i(t) of mean r = e^{-t} and their standardizations
``(xi_j - r) / sqrt(1 - r^2)``, one has

    e^{-t Lap} D_j f(eps) = r / sqrt(1 - r^2) * E_xi[ delta_j(t) f(eps xi) ].

Everything below evaluates E_xi by exact enumeration of the 2**n outcomes,
so it is an independent check of the multiplier code in ``operators``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cube import CubeFunction, encode_point, popcounts, sign_table
from .errors import DegenerateTime, DimensionMismatch, NegativeTime, QuadratureUnderresolved
from .operators import d_j, heat, laplacian


@dataclass(frozen=True)
class BiasedBitLaw:
    """Product law on {-1, 1}^n with P(xi_i = +1) = (1 + e^{-t}) / 2."""

    t: float
    n: int
    r: float = field(init=False)

    def __post_init__(self):
        if self.t < 0:
            raise NegativeTime(f"t={self.t} < 0")
        object.__setattr__(self, "r", float(np.exp(-self.t)))

    def weights(self) -> np.ndarray:
        """Probability of every outcome, indexed like cube points."""
        k = popcounts(self.n)
        return ((1 + self.r) / 2) ** (self.n - k) * ((1 - self.r) / 2) ** k


@dataclass(frozen=True)
class QuadratureScheme:
    """Gauss-Legendre rule on [0, pi/2] in the variable theta, e^{-t} = sin(theta).

    Under this substitution the weight e^{-t} dt / sqrt(1 - e^{-2t}) becomes
    d(theta), so the integrand on [0, pi/2] is smooth.
    """

    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def gauss_legendre(cls, N: int = 64) -> "QuadratureScheme":
        x, w = np.polynomial.legendre.leggauss(N)
        return cls(nodes=np.pi / 4 * (x + 1), weights=np.pi / 4 * w)

    @property
    def times(self) -> np.ndarray:
        return -np.log(np.sin(self.nodes))

    def integrate(self, g) -> float:
        """Approximate int_0^inf g(t) e^{-t} / sqrt(1 - e^{-2t}) dt."""
        return sum(w * g(t) for w, t in zip(self.weights, self.times))


def xi_weight(xi, law: BiasedBitLaw) -> float:
    xi = np.asarray(xi)
    if xi.shape != (law.n,):
        raise DimensionMismatch(f"point of length {xi.size} for a law on n={law.n}")
    return float(np.prod((1 + xi * law.r) / 2))


def delta_weight(xi_j, law: BiasedBitLaw):
    """(xi_j - r) / sqrt(1 - r^2); vectorized over xi_j."""
    if law.r >= 1.0:
        raise DegenerateTime("standardized weight undefined at t = 0")
    return (np.asarray(xi_j, dtype=float) - law.r) / np.sqrt(1 - law.r**2)


def _xor_average(coeffs: np.ndarray, values: np.ndarray) -> np.ndarray:
    """out[x] = sum_y coeffs[..., y] * values[..., x ^ y, :].

    ``coeffs`` has shape (k, 2**n) and ``values`` (k, 2**n, d); the k terms are
    summed.  Plain enumeration, chunked over x to bound memory.
    """
    size = values.shape[1]
    y = np.arange(size)
    out = np.empty(values.shape[1:])
    chunk = max(1, (1 << 16) // size)
    for start in range(0, size, chunk):
        x = np.arange(start, min(size, start + chunk))
        gathered = values[:, x[:, None] ^ y[None, :]]  # (k, chunk, y, d)
        out[x] = np.einsum("ky,kxyd->xd", coeffs, gathered)
    return out


def xi_expectation(f: CubeFunction, t: float) -> CubeFunction:
    """eps -> E_xi f(eps xi(t)) by enumeration; equals heat(f, t)."""
    law = BiasedBitLaw(t, f.n)
    return CubeFunction(values=_xor_average(law.weights()[None], f.values[None]))


def _smoothed_coeffs(law: BiasedBitLaw) -> np.ndarray:
    """Rows j: r/sqrt(1-r^2) * P(xi) * delta_j(xi), shape (n, 2**n)."""
    if law.r >= 1.0:
        raise DegenerateTime("the representation needs t > 0")
    pref = law.r / np.sqrt(1 - law.r**2)
    return pref * law.weights()[None, :] * delta_weight(sign_table(law.n).T, law)


def smoothed_derivative(f: CubeFunction, j: int, t: float) -> CubeFunction:
    if not 0 <= j < f.n:
        raise IndexError(f"coordinate {j} out of range for n={f.n}")
    if t <= 0:
        raise DegenerateTime(f"t={t}: the representation needs t > 0")
    c = _smoothed_coeffs(BiasedBitLaw(t, f.n))[j]
    return CubeFunction(values=_xor_average(c[None], f.values[None]))


def verify_main_identity(f: CubeFunction, t_grid) -> float:
    """Largest sup-norm gap between the enumeration and multiplier sides."""
    worst = 0.0
    for t in t_grid:
        if t <= 0:
            raise DegenerateTime(f"t={t}: the representation needs t > 0")
        coeffs = _smoothed_coeffs(BiasedBitLaw(t, f.n))
        for j in range(f.n):
            lhs = _xor_average(coeffs[j][None], f.values[None])
            rhs = heat(d_j(f, j), t).values
            worst = max(worst, float(np.max(np.abs(lhs - rhs), initial=0.0)))
    return worst


def verify_distributional_invariance(f: CubeFunction, xi) -> bool:
    """{f(eps xi)} and {f(eps)} agree as multisets of rows (exactly)."""
    y = encode_point(xi) if np.ndim(xi) else int(xi)
    moved = f.values[np.arange(1 << f.n) ^ y]

    def rows(a):
        return a[np.lexsort(a.T[::-1])]

    return bool(np.array_equal(rows(moved), rows(f.values)))


def integral_representation(f_list, quad: QuadratureScheme | None = None, rtol: float = 1e-6):
    """Quadrature of int_0^inf E_xi[sum_j delta_j(t) (Lap f_j)(eps xi)] w(t) dt.

    Returns ``(value, sign)`` where ``sign`` is the choice of +-1 for which
    ``value`` is closest to ``sum_j D_j f_j``.  Raises QuadratureUnderresolved
    if neither sign reproduces it to relative accuracy ``rtol``.
    """
    quad = quad or QuadratureScheme.gauss_legendre()
    f_list = list(f_list)
    n = f_list[0].n
    if any((f.n, f.d) != (n, f_list[0].d) for f in f_list) or len(f_list) != n:
        raise DimensionMismatch("need n functions sharing (n, d)")
    lap = np.stack([laplacian(f).values for f in f_list])
    total = np.zeros_like(lap[0])
    for w, t in zip(quad.weights, quad.times):
        law = BiasedBitLaw(float(t), n)
        c = law.weights()[None, :] * delta_weight(sign_table(n).T, law)
        total += w * _xor_average(c, lap)
    target = sum(d_j(f, j).values for j, f in enumerate(f_list))
    value = CubeFunction(values=total)
    scale = max(np.linalg.norm(target), 1e-300)
    residuals = {s: np.linalg.norm(total - s * target) for s in (1, -1)}
    sign = min(residuals, key=lambda s: (residuals[s], -s))
    if np.linalg.norm(target) == 0:
        if np.linalg.norm(total) > 1e-12:
            raise QuadratureUnderresolved("nonzero quadrature value for a zero target")
        return value, 1
    if residuals[sign] / scale > rtol:
        raise QuadratureUnderresolved(
            f"relative residual {residuals[sign] / scale:.3g} exceeds {rtol:g} for both signs"
        )
    return value, sign


def integral_residual(f_list, quad: QuadratureScheme | None = None):
    """(relative residual, sign) of the quadrature against sum_j D_j f_j."""
    value, sign = integral_representation(f_list, quad, rtol=np.inf)
    target = sum(d_j(f, j).values for j, f in enumerate(f_list))
    scale = np.linalg.norm(target)
    if scale == 0:
        return float(np.linalg.norm(value.values)), sign
    return float(np.linalg.norm(value.values - sign * target) / scale), sign
