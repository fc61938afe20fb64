"""Cube derivatives, the Laplacian and its semigroup, Riesz transforms.

Every operator here is a Walsh multiplier S -> m(S).  Multipliers that only
depend on |S| and on whether a fixed coordinate j lies in S are kept in that
compact form and expanded to a 2**n table on application.
"""
from __future__ import annotations

import numpy as np

from .cube import CubeFunction, TwoCubeFunction, popcounts, sign_table
from .errors import DimensionMismatch, NegativeTime, NotMeanZero

MEAN_ZERO_RTOL = 1e-9
MEAN_ZERO_ATOL = 1e-12


class Multiplier:
    """A Walsh multiplier on {-1, 1}^n.

    Either an explicit ``table`` of length 2**n, or a structured form:
    ``inside[k]`` for masks of size k containing coordinate ``j`` and
    ``outside[k]`` for the rest (``j=None`` means no membership split).
    """

    def __init__(self, n, table=None, inside=None, outside=None, j=None):
        self.n = n
        self.j = j
        if table is not None:
            table = np.asarray(table, dtype=float)
            if table.shape != (1 << n,):
                raise DimensionMismatch(f"multiplier table must have length {1 << n}")
            self._table = table
            self.inside = self.outside = None
        else:
            outside = np.asarray(outside, dtype=float)
            inside = outside if inside is None else np.asarray(inside, dtype=float)
            if outside.shape != (n + 1,) or inside.shape != (n + 1,):
                raise DimensionMismatch(f"degree profiles must have length {n + 1}")
            self.inside, self.outside = inside, outside
            self._table = None
        vals = self._table if self._table is not None else np.concatenate([self.inside, self.outside])
        if not np.all(np.isfinite(vals)):
            raise ValueError("multiplier entries must be finite")

    @classmethod
    def radial(cls, n, profile):
        """m(S) = profile(|S|)."""
        k = np.arange(n + 1)
        return cls(n, outside=profile(k))

    @property
    def structured(self) -> bool:
        return self._table is None

    def table(self) -> np.ndarray:
        if self._table is not None:
            return self._table
        deg = popcounts(self.n)
        out = self.outside[deg]
        if self.j is not None:
            member = (np.arange(1 << self.n) >> self.j) & 1 == 1
            out = np.where(member, self.inside[deg], out)
        return out

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        if self.n != other.n:
            raise DimensionMismatch("multipliers on different cubes")
        if self.structured and other.structured and (
            self.j is None or other.j is None or self.j == other.j
        ):
            j = self.j if self.j is not None else other.j
            return Multiplier(
                self.n, inside=self.inside * other.inside, outside=self.outside * other.outside, j=j
            )
        return Multiplier(self.n, table=self.table() * other.table())

    def __repr__(self):
        form = "structured" if self.structured else "table"
        return f"Multiplier(n={self.n}, {form}, j={self.j})"


def _check_index(n, j):
    if not 0 <= j < n:
        raise IndexError(f"coordinate {j} out of range for n={n}")


def identity_multiplier(n):
    return Multiplier(n, outside=np.ones(n + 1))


def laplacian_multiplier(n):
    return Multiplier(n, outside=np.arange(n + 1, dtype=float))


def heat_multiplier(n, t):
    if t < 0:
        raise NegativeTime(f"t={t} < 0")
    return Multiplier(n, outside=np.exp(-t * np.arange(n + 1)))


def inv_laplacian_multiplier(n):
    k = np.arange(n + 1, dtype=float)
    return Multiplier(n, outside=np.divide(1.0, k, out=np.zeros_like(k), where=k > 0))


def d_multiplier(n, j):
    _check_index(n, j)
    return Multiplier(n, inside=np.ones(n + 1), outside=np.zeros(n + 1), j=j)


def riesz_multiplier(n, j):
    _check_index(n, j)
    k = np.arange(n + 1, dtype=float)
    inside = np.divide(1.0, k, out=np.zeros_like(k), where=k > 0)
    return Multiplier(n, inside=inside, outside=np.zeros(n + 1), j=j)


def apply_multiplier(f: CubeFunction, m: Multiplier) -> CubeFunction:
    if f.n != m.n:
        raise DimensionMismatch(f"function on n={f.n}, multiplier on n={m.n}")
    return CubeFunction(spectrum=m.table()[:, None] * f.spectrum)


def partial_j(f: CubeFunction, j: int) -> CubeFunction:
    """(f(eps with eps_j=+1) - f(eps with eps_j=-1)) / 2, pointwise."""
    _check_index(f.n, j)
    x = np.arange(1 << f.n)
    plus = f.values[x & ~(1 << j)]
    minus = f.values[x | (1 << j)]
    return CubeFunction(values=(plus - minus) / 2)


def d_j(f: CubeFunction, j: int) -> CubeFunction:
    return apply_multiplier(f, d_multiplier(f.n, j))


def laplacian(f: CubeFunction) -> CubeFunction:
    return apply_multiplier(f, laplacian_multiplier(f.n))


def heat(f: CubeFunction, t: float) -> CubeFunction:
    """e^{-t Laplacian} f."""
    return apply_multiplier(f, heat_multiplier(f.n, t))


def inv_laplacian(f: CubeFunction, strip_mean: bool = False) -> CubeFunction:
    """Inverse Laplacian on mean-zero functions.

    Raises NotMeanZero unless the mean is negligible relative to the L2
    size of f, or ``strip_mean`` is set.
    """
    if not strip_mean:
        mean = np.linalg.norm(f.spectrum[0])
        scale = np.sqrt(np.sum(f.spectrum**2))
        if mean > max(MEAN_ZERO_RTOL * scale, MEAN_ZERO_ATOL):
            raise NotMeanZero(f"mean of norm {mean:.3g} on a function of L2 size {scale:.3g}")
    return apply_multiplier(f, inv_laplacian_multiplier(f.n))


def riesz(f: CubeFunction, j: int) -> CubeFunction:
    """Second-order Riesz transform: multiplier 1[j in S] / |S|."""
    return apply_multiplier(f, riesz_multiplier(f.n, j))


def extract_fj(F: TwoCubeFunction, j: int) -> CubeFunction:
    """eps -> E_delta[delta_j F(eps, delta)]."""
    _check_index(F.n, j)
    s = sign_table(F.n)[:, j]
    return CubeFunction(values=np.einsum("y,xyd->xd", s, F.values) / (1 << F.n))


def rademacher_projection(F: TwoCubeFunction) -> TwoCubeFunction:
    """(eps, delta) -> sum_j delta_j F_j(eps): the degree-one part in delta."""
    s = sign_table(F.n)
    coeffs = np.einsum("yj,xyd->jxd", s, F.values) / (1 << F.n)
    return TwoCubeFunction(np.einsum("yj,jxd->xyd", s, coeffs))
