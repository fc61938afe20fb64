"""Finite-dimensional norms, vector-valued moments and empirical moduli.

A norm acts on the last axis of an array, so ``X.eval(values)`` works on a
single vector, a table of cube values, or a stack of them.
"""
from __future__ import annotations

import re

import numpy as np

from .cube import CubeFunction, TwoCubeFunction, fwht, sign_table
from .errors import DegenerateRatio, DimensionMismatch, InvalidExponent, TooManyVectors
from .optimize import OptimizerConfig, multi_restart

MAX_RADEMACHER_VECTORS = 20
MAX_MODULUS_VECTORS = 12
MAX_KCONVEX_N = 7


class NormSpace:
    """Base class: a norm on R^d with a subgradient and its dual norm."""

    d: int

    def eval(self, v):
        raise NotImplementedError

    def subgradient(self, v):
        raise NotImplementedError

    def dual(self, g):
        raise NotImplementedError

    @property
    def descriptor(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor!r})"

    def __eq__(self, other):
        return isinstance(other, NormSpace) and self.descriptor == other.descriptor

    def __hash__(self):
        return hash(self.descriptor)


class Scalar(NormSpace):
    d = 1

    def eval(self, v):
        return np.abs(np.asarray(v, dtype=float)[..., 0])

    def subgradient(self, v):
        return np.sign(np.asarray(v, dtype=float))

    def dual(self, g):
        return self.eval(g)

    @property
    def descriptor(self):
        return "scalar"


class EllQ(NormSpace):
    """l_q^d, 1 <= q <= inf."""

    def __init__(self, d: int, q: float):
        if not q >= 1:
            raise InvalidExponent(f"q={q} must be >= 1")
        self.d = int(d)
        self.q = float(q)

    def eval(self, v):
        v = np.abs(np.asarray(v, dtype=float))
        if self.q == np.inf:
            return v.max(axis=-1)
        if self.q == 1:
            return v.sum(axis=-1)
        if self.q == 2:
            return np.sqrt(np.sum(v * v, axis=-1))
        # rescale to keep |v|^q representable
        m = v.max(axis=-1, keepdims=True)
        safe = np.where(m > 0, m, 1.0)
        return safe[..., 0] * np.sum((v / safe) ** self.q, axis=-1) ** (1 / self.q)

    def subgradient(self, v):
        v = np.asarray(v, dtype=float)
        if self.q == 1:
            return np.sign(v)
        if self.q == np.inf:
            a = np.abs(v)
            k = np.argmax(a, axis=-1)  # lowest index among ties
            g = np.zeros_like(v)
            np.put_along_axis(g, k[..., None], np.take_along_axis(np.sign(v), k[..., None], -1), -1)
            return g
        nrm = self.eval(v)[..., None]
        safe = np.where(nrm > 0, nrm, 1.0)
        return np.where(nrm > 0, np.sign(v) * (np.abs(v) / safe) ** (self.q - 1), 0.0)

    def dual(self, g):
        q_star = np.inf if self.q == 1 else (1.0 if self.q == np.inf else self.q / (self.q - 1))
        return EllQ(self.d, q_star).eval(g)

    @property
    def descriptor(self):
        q = "inf" if self.q == np.inf else f"{self.q:g}"
        return f"ellq:d={self.d},q={q}"


class L1Cube(NormSpace):
    """L^1 of {-1, 1}^k under the uniform probability measure; d = 2**k."""

    def __init__(self, k: int):
        self.k = int(k)
        self.d = 1 << self.k

    def eval(self, v):
        return np.abs(np.asarray(v, dtype=float)).mean(axis=-1)

    def subgradient(self, v):
        return np.sign(np.asarray(v, dtype=float)) / self.d

    def dual(self, g):
        return self.d * np.abs(np.asarray(g, dtype=float)).max(axis=-1)

    @property
    def descriptor(self):
        return f"l1cube:k={self.k}"


class LInfCube(NormSpace):
    """L^infinity of {-1, 1}^k; d = 2**k."""

    def __init__(self, k: int):
        self.k = int(k)
        self.d = 1 << self.k
        self._inner = EllQ(self.d, np.inf)

    def eval(self, v):
        return self._inner.eval(v)

    def subgradient(self, v):
        return self._inner.subgradient(v)

    def dual(self, g):
        return np.abs(np.asarray(g, dtype=float)).sum(axis=-1)

    @property
    def descriptor(self):
        return f"linfcube:k={self.k}"


_DESCRIPTOR = re.compile(r"^(\w+)(?::(.*))?$")


def parse_norm(text: str, n: int | None = None) -> NormSpace:
    """Parse "scalar", "ellq:d=8,q=1", "l1cube:k=3", "linfcube:k=3".

    A parameter given as the letter ``n`` is replaced by the ``n`` argument,
    so "l1cube:k=n" describes a family indexed by the cube dimension.
    """
    m = _DESCRIPTOR.match(text.strip().lower())
    if not m:
        raise ValueError(f"cannot parse norm descriptor {text!r}")
    kind, arg = m.group(1), m.group(2)
    params = {}
    if arg:
        for item in arg.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ValueError(f"bad parameter {item!r} in {text!r}")
            if val.strip() == "n":
                if n is None:
                    raise ValueError(f"{text!r} needs a value for n")
                val = str(n)
            params[key.strip()] = val.strip()
    try:
        if kind == "scalar" and not params:
            return Scalar()
        if kind == "ellq":
            q = np.inf if params["q"] in ("inf", "infinity") else float(params["q"])
            return EllQ(int(params["d"]), q)
        if kind == "l1cube":
            return L1Cube(int(params["k"]))
        if kind == "linfcube":
            return LInfCube(int(params["k"]))
    except KeyError as exc:
        raise ValueError(f"missing parameter {exc} in {text!r}") from None
    raise ValueError(f"unknown norm {text!r}")


def embed_values(values: np.ndarray, source: NormSpace, target: NormSpace) -> np.ndarray:
    """Isometric embedding of X-valued data into a larger space of the same family.

    For the cube norms L^1 and L^infinity on {-1,1}^k, a vector is extended to
    {-1,1}^m (m >= k) as a function that ignores the new coordinates.
    """
    if source.d == target.d:
        return values
    cube = (L1Cube, LInfCube)
    if type(source) is type(target) and isinstance(source, cube) and target.d % source.d == 0:
        return np.tile(values, target.d // source.d)
    raise DimensionMismatch(f"no isometric embedding from {source.descriptor} into {target.descriptor}")


def _check_exponent(p):
    if not (1 <= p < np.inf):
        raise InvalidExponent(f"p={p} must lie in [1, inf)")


def log_moment(h: np.ndarray, p: float, X: NormSpace, grad: bool = False):
    """(1/p) log E||h||^p over all leading axes of h, uniform weights.

    With ``grad=True`` also returns the gradient with respect to the entries
    of h (a norm subgradient where the norm is not differentiable).
    """
    nrm = X.eval(h)
    powered = nrm**p
    mean = powered.mean()
    if not mean > 0:
        raise DegenerateRatio("moment of the zero function")
    value = np.log(mean) / p
    if not grad:
        return value
    w = (nrm ** (p - 1) / (nrm.size * mean))[..., None]
    return value, w * X.subgradient(h)


def lp_moment(f: CubeFunction, p: float, X: NormSpace) -> float:
    _check_exponent(p)
    if f.d != X.d:
        raise DimensionMismatch(f"function has d={f.d}, norm has d={X.d}")
    return float(np.mean(X.eval(f.values) ** p) ** (1 / p))


def two_cube_moment(F: TwoCubeFunction, p: float, X: NormSpace) -> float:
    _check_exponent(p)
    if F.d != X.d:
        raise DimensionMismatch(f"function has d={F.d}, norm has d={X.d}")
    return float(np.mean(X.eval(F.values) ** p) ** (1 / p))


def rademacher_sums(x: np.ndarray) -> np.ndarray:
    """All 2**m signed sums sum_i delta_i x_i of the rows of x."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] > MAX_RADEMACHER_VECTORS:
        raise TooManyVectors(f"{x.shape[0]} vectors exceed the enumeration cap {MAX_RADEMACHER_VECTORS}")
    return sign_table(x.shape[0]) @ x


def rademacher_moment(x, p: float, X: NormSpace) -> float:
    """(E_delta ||sum_i delta_i x_i||^p)^{1/p}, exact over all sign patterns."""
    _check_exponent(p)
    sums = rademacher_sums(x)
    if sums.shape[-1] != X.d:
        raise DimensionMismatch(f"vectors have d={sums.shape[-1]}, norm has d={X.d}")
    return float(np.mean(X.eval(sums) ** p) ** (1 / p))


def cotype_ratio(x, q: float, X: NormSpace) -> float:
    """(sum ||x_i||^q)^{1/q} / (E||sum delta_i x_i||^2)^{1/2}."""
    nrm = X.eval(np.asarray(x, dtype=float))
    return float(np.sum(nrm**q) ** (1 / q) / rademacher_moment(x, 2, X))


def type_ratio(x, s: float, X: NormSpace) -> float:
    """(E||sum delta_i x_i||^2)^{1/2} / (sum ||x_i||^s)^{1/s}."""
    nrm = X.eval(np.asarray(x, dtype=float))
    return float(rademacher_moment(x, 2, X) / np.sum(nrm**s) ** (1 / s))


def _log_power_sum(x, q, X):
    nrm = X.eval(x)
    total = np.sum(nrm**q)
    if not total > 0:
        raise DegenerateRatio("all vectors vanish")
    g = (nrm ** (q - 1) / total)[:, None] * X.subgradient(x)
    return np.log(total) / q, g


def _rademacher_log_l2(x, X):
    signs = sign_table(x.shape[0])
    value, w = log_moment(signs @ x, 2, X, grad=True)
    return value, signs.T @ w


def _modulus(X, m, exponent, orientation, config):
    if m > MAX_MODULUS_VECTORS:
        raise TooManyVectors(f"m={m} exceeds {MAX_MODULUS_VECTORS}")
    config = config or OptimizerConfig()

    def objective(x):
        a, ga = _log_power_sum(x, exponent, X)
        b, gb = _rademacher_log_l2(x, X)
        if orientation == "cotype":
            return a - b, ga - gb, np.exp(b)
        return b - a, gb - ga, np.exp(a)

    best = multi_restart(objective, lambda rng: rng.standard_normal((m, X.d)), config)
    return float(np.exp(best.log_ratio)), best.x


def cotype_estimate(X: NormSpace, q: float, m: int, config: OptimizerConfig | None = None):
    """Lower bound on the cotype-q constant of X from m-tuples.

    Cotype is normalized by the second Rademacher moment.  Returns
    ``(value, witness)`` with the witness an (m, d) array.
    """
    if q < 2:
        raise InvalidExponent(f"cotype exponent q={q} must be >= 2")
    return _modulus(X, m, q, "cotype", config)


def type_estimate(X: NormSpace, s: float, m: int, config: OptimizerConfig | None = None):
    """Lower bound on the type-s constant of X from m-tuples; ``(value, witness)``."""
    if not 1 < s <= 2:
        raise InvalidExponent(f"type exponent s={s} must lie in (1, 2]")
    return _modulus(X, m, s, "type", config)


def degree_one_part(values: np.ndarray) -> np.ndarray:
    """Rademacher projection on the cube: eps -> sum_j eps_j ghat({j})."""
    n = values.shape[0].bit_length() - 1
    s = sign_table(n)
    return s @ (s.T @ values) / (1 << n)


def k_convexity_ratio(g: CubeFunction, s: float, X: NormSpace) -> float:
    rad = CubeFunction(values=degree_one_part(g.values))
    return lp_moment(rad, s, X) / lp_moment(g, s, X)


def k_convexity_estimate(X: NormSpace, n: int, s: float, config: OptimizerConfig | None = None):
    """Lower bound on the L^s(X) norm of the Rademacher projection on {-1,1}^n.

    Returns ``(value, witness)`` with the witness a CubeFunction.
    """
    if not 1 < s < np.inf:
        raise InvalidExponent(f"s={s} must lie in (1, inf)")
    if not 1 <= n <= MAX_KCONVEX_N:
        raise ValueError(f"n={n} outside [1, {MAX_KCONVEX_N}]")
    config = config or OptimizerConfig()

    def objective(x):
        a, ga = log_moment(degree_one_part(x), s, X, grad=True)
        b, gb = log_moment(x, s, X, grad=True)
        # the projection is symmetric in the Euclidean pairing of value tables
        return a - b, degree_one_part(ga) - gb, np.exp(b)

    def sampler(rng):
        return fwht(rng.standard_normal((1 << n, X.d)))

    best = multi_restart(objective, sampler, config)
    return float(np.exp(best.log_ratio)), CubeFunction(values=best.x)
