"""Functions on the Hamming cube and the Walsh-Hadamard transform.

Points of {-1, 1}^n are stored as n-bit integers: bit ``i`` of the index is
set exactly when coordinate ``i`` equals -1.  A subset S of {0, ..., n-1}
is stored the same way (bit ``j`` set iff ``j`` is in S), so the Walsh
character is ``w_S(x) = (-1) ** popcount(S & x)``.

All coordinate indices are 0-based.
"""
from __future__ import annotations

import json
import threading
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, DimensionMismatch

MAX_N = 14
MAX_N_TWO_CUBE = 7


def encode_point(eps) -> int:
    """Sign vector -> integer index."""
    eps = np.asarray(eps)
    if not np.all(np.abs(eps) == 1):
        raise ValueError("cube points must have entries +1 or -1")
    return int(sum(1 << i for i, e in enumerate(eps) if e < 0))


def decode_point(index: int, n: int) -> np.ndarray:
    """Integer index -> sign vector of length n."""
    if not 0 <= index < (1 << n):
        raise ValueError(f"index {index} out of range for n={n}")
    return 1 - 2 * ((index >> np.arange(n)) & 1)


def subset_mask(members) -> int:
    return int(sum(1 << j for j in set(members)))


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """|S| for every mask S < 2**n."""
    out = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def sign_table(n: int) -> np.ndarray:
    """``sign_table(n)[x, i]`` is coordinate i of point x."""
    x = np.arange(1 << n)[:, None]
    out = (1 - 2 * ((x >> np.arange(n)) & 1)).astype(float)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def flip_table(n: int) -> np.ndarray:
    """``flip_table(n)[i, x] = x ^ (1 << i)``."""
    out = np.arange(1 << n)[None, :] ^ (1 << np.arange(n))[:, None]
    out.flags.writeable = False
    return out


def walsh_character(mask: int, n: int) -> np.ndarray:
    return (1 - 2 * (popcounts(n)[np.arange(1 << n) & mask] & 1)).astype(float)


def fwht(a: np.ndarray, axis: int = 0) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along ``axis``.

    Computes ``H @ a`` with ``H[x, y] = (-1)**popcount(x & y)``; H is its own
    inverse up to the factor ``2**n``.
    """
    a = np.moveaxis(np.array(a, dtype=float), axis, 0)
    size = a.shape[0]
    if size & (size - 1):
        raise DimensionMismatch(f"transform length {size} is not a power of two")
    rest = a.shape[1:]
    h = 1
    while h < size:
        a = a.reshape((size // (2 * h), 2, h) + rest)
        lo, hi = a[:, 0], a[:, 1]
        a = np.stack((lo + hi, lo - hi), axis=1)
        h *= 2
    return np.moveaxis(a.reshape((size,) + rest), 0, axis)


def _dimension_of(length: int) -> int:
    n = length.bit_length() - 1
    if length != 1 << n:
        raise DimensionMismatch(f"{length} is not a power of two")
    return n


def _as_table(arr, n_expected=None) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch("expected an array of shape (2**n, d)")
    if n_expected is not None and arr.shape[0] != 1 << n_expected:
        raise DimensionMismatch(f"expected {1 << n_expected} rows, got {arr.shape[0]}")
    return arr


class CubeFunction:
    """An R^d-valued function on {-1, 1}^n.

    Holds point values, Walsh coefficients, or both; the missing one is
    computed on first access and cached.  Instances are immutable.
    """

    def __init__(self, values=None, spectrum=None, n=None):
        if values is None and spectrum is None:
            raise ValueError("need values or spectrum")
        arr = _as_table(values if values is not None else spectrum, n)
        n = _dimension_of(arr.shape[0])
        if n > MAX_N:
            raise CapExceeded(f"n={n} exceeds the cap {MAX_N}")
        arr.flags.writeable = False
        self.n = n
        self.d = arr.shape[1]
        self._values = arr if values is not None else None
        self._spectrum = arr if values is None else None
        if values is not None and spectrum is not None:
            spec = _as_table(spectrum, n)
            spec.flags.writeable = False
            self._spectrum = spec
        self._lock = threading.Lock()

    @classmethod
    def from_values(cls, values):
        return cls(values=values)

    @classmethod
    def from_spectrum(cls, spectrum):
        return cls(spectrum=spectrum)

    @classmethod
    def constant(cls, n: int, vector) -> "CubeFunction":
        v = np.atleast_1d(np.asarray(vector, dtype=float))
        return cls(values=np.tile(v, (1 << n, 1)))

    @classmethod
    def character(cls, n: int, mask: int, vector=1.0) -> "CubeFunction":
        v = np.atleast_1d(np.asarray(vector, dtype=float))
        return cls(values=walsh_character(mask, n)[:, None] * v)

    @classmethod
    def random(cls, n: int, d: int, rng) -> "CubeFunction":
        return cls(values=rng.standard_normal((1 << n, d)))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            with self._lock:
                if self._values is None:
                    vals = fwht(self._spectrum)
                    vals.flags.writeable = False
                    self._values = vals
        return self._values

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            with self._lock:
                if self._spectrum is None:
                    spec = fwht(self._values) / (1 << self.n)
                    spec.flags.writeable = False
                    self._spectrum = spec
        return self._spectrum

    @property
    def has_values(self) -> bool:
        return self._values is not None

    @property
    def has_spectrum(self) -> bool:
        return self._spectrum is not None

    def __add__(self, other: "CubeFunction") -> "CubeFunction":
        _check_same(self, other)
        return CubeFunction(values=self.values + other.values)

    def __sub__(self, other: "CubeFunction") -> "CubeFunction":
        _check_same(self, other)
        return CubeFunction(values=self.values - other.values)

    def __mul__(self, c: float) -> "CubeFunction":
        return CubeFunction(values=c * self.values)

    __rmul__ = __mul__

    def __repr__(self):
        return f"CubeFunction(n={self.n}, d={self.d})"

    def to_json(self, representation: str = "values") -> str:
        key = "values" if representation == "values" else "spectrum"
        table = self.values if key == "values" else self.spectrum
        return json.dumps({"n": self.n, "d": self.d, key: table.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "CubeFunction":
        obj = json.loads(text) if isinstance(text, str) else text
        n, d = obj["n"], obj["d"]
        key = "values" if "values" in obj else "spectrum"
        table = np.asarray(obj[key], dtype=float).reshape(1 << n, d)
        return cls(**{key: table})


def _check_same(f: CubeFunction, g: CubeFunction):
    if (f.n, f.d) != (g.n, g.d):
        raise DimensionMismatch(f"(n, d) = {(f.n, f.d)} vs {(g.n, g.d)}")


class TwoCubeFunction:
    """An R^d-valued function F(eps, delta) on {-1, 1}^n x {-1, 1}^n.

    ``values[x, y]`` is F at eps-index x and delta-index y.
    """

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch("expected an array of shape (2**n, 2**n, d)")
        n = _dimension_of(arr.shape[0])
        if n > MAX_N_TWO_CUBE:
            raise CapExceeded(f"n={n} exceeds the two-cube cap {MAX_N_TWO_CUBE}")
        arr.flags.writeable = False
        self.n = n
        self.d = arr.shape[2]
        self.values = arr

    @classmethod
    def random(cls, n: int, d: int, rng) -> "TwoCubeFunction":
        return cls(rng.standard_normal((1 << n, 1 << n, d)))

    @classmethod
    def from_linear(cls, f_list) -> "TwoCubeFunction":
        """F(eps, delta) = sum_j f_j(eps) delta_j."""
        n = len(f_list)
        stack = np.stack([f.values for f in f_list])  # (j, x, d)
        return cls(np.einsum("yj,jxd->xyd", sign_table(n), stack))

    def eps_slice(self, y: int) -> CubeFunction:
        return CubeFunction(values=self.values[:, y])

    def delta_slice(self, x: int) -> CubeFunction:
        return CubeFunction(values=self.values[x])

    def __repr__(self):
        return f"TwoCubeFunction(n={self.n}, d={self.d})"

    def to_json(self) -> str:
        flat = self.values.reshape(-1, self.d)
        return json.dumps({"n": self.n, "d": self.d, "values": flat.tolist()})

    @classmethod
    def from_json(cls, text) -> "TwoCubeFunction":
        obj = json.loads(text) if isinstance(text, str) else text
        n, d = obj["n"], obj["d"]
        return cls(np.asarray(obj["values"], dtype=float).reshape(1 << n, 1 << n, d))


def walsh_forward(f: CubeFunction) -> CubeFunction:
    """Return f with both representations populated (coefficients computed)."""
    return CubeFunction(values=f.values, spectrum=f.spectrum)


def walsh_inverse(f: CubeFunction) -> CubeFunction:
    return CubeFunction(values=f.values, spectrum=f.spectrum)


def expectation(f: CubeFunction) -> np.ndarray:
    if f.has_spectrum:
        return np.array(f.spectrum[0])
    return f.values.mean(axis=0)


def translate(f: CubeFunction, xi) -> CubeFunction:
    """eps -> f(eps * xi), with xi given as a sign vector or an index."""
    y = int(xi) if np.ndim(xi) == 0 else encode_point(xi)
    if np.ndim(xi) != 0 and len(xi) != f.n:
        raise DimensionMismatch(f"point of length {len(xi)} on a cube of dimension {f.n}")
    if not 0 <= y < (1 << f.n):
        raise DimensionMismatch(f"index {y} out of range for n={f.n}")
    if f.has_values:
        return CubeFunction(values=f.values[np.arange(1 << f.n) ^ y])
    chars = walsh_character(y, f.n)  # w_S(xi) as a function of S
    return CubeFunction(spectrum=chars[:, None] * f.spectrum)
