"""Multi-restart gradient ascent for scale-invariant log-ratio objectives.

An objective maps a parameter array ``x`` to ``(log_ratio, grad, scale)``
where ``scale`` is the current denominator; the ratio is invariant under
``x -> c x`` so every iterate is renormalized to unit denominator.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import AllRestartsDegenerate, DegenerateRatio

ARMIJO = 1e-4


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iter: int = 500
    step_init: float = 1.0
    step_shrink: float = 0.5
    step_min: float = 1e-10
    tol: float = 1e-8
    seed: int = 0
    jitter: float = 1e-12
    threads: int | None = None

    def __post_init__(self):
        positive = (self.restarts, self.max_iter, self.step_init, self.step_min, self.tol)
        if min(positive) <= 0 or not 0 < self.step_shrink < 1 or self.jitter < 0:
            raise ValueError(f"invalid optimizer settings: {self}")


@dataclass
class AscentResult:
    x: np.ndarray
    log_ratio: float
    iterations: int
    converged: bool
    restart: int


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("CUBE_PISIER_THREADS", "1"))
    return max(1, threads)


def ascend(objective, x0, config: OptimizerConfig, rng, restart: int = 0) -> AscentResult:
    value, grad, scale = objective(x0)
    if not np.isfinite(value) or scale <= 0:
        raise DegenerateRatio("degenerate starting point")
    x = x0 / scale
    step = config.step_init
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        if config.jitter:
            xj = x + config.jitter * np.linalg.norm(x) * rng.standard_normal(x.shape)
            _, grad, _ = objective(xj)
        gnorm = np.linalg.norm(grad)
        xnorm = np.linalg.norm(x)
        if gnorm == 0 or not np.isfinite(gnorm):
            converged = True
            break
        direction = grad * (xnorm / gnorm)
        slope = gnorm * xnorm
        accepted = False
        while step >= config.step_min:
            trial = x + step * direction
            try:
                tv, tg, ts = objective(trial)
            except DegenerateRatio:
                tv = -np.inf
            if np.isfinite(tv) and tv >= value + ARMIJO * step * slope:
                accepted = True
                break
            step *= config.step_shrink
        if not accepted:
            converged = True
            break
        gain = tv - value
        x, value, grad = trial / ts, tv, tg * ts
        step = min(config.step_init, 2 * step)
        if gain < config.tol:
            converged = True
            break
    return AscentResult(x=x, log_ratio=float(value), iterations=it, converged=converged, restart=restart)


def multi_restart(objective, sampler, config: OptimizerConfig, seeds=()) -> AscentResult:
    """Best ascent over warm starts ``seeds`` followed by ``config.restarts`` random starts.

    Each start gets its own generator spawned from ``config.seed``, so a
    larger restart budget only adds starts.  Ties go to the lowest index.
    """
    seeds = list(seeds)
    children = np.random.SeedSequence(config.seed).spawn(len(seeds) + config.restarts)

    def run(i):
        rng = np.random.default_rng(children[i])
        x0 = seeds[i] if i < len(seeds) else sampler(rng)
        try:
            return ascend(objective, np.array(x0, dtype=float), config, rng, restart=i)
        except DegenerateRatio:
            return None

    indices = range(len(seeds) + config.restarts)
    threads = resolve_threads(config.threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, indices))
    else:
        results = [run(i) for i in indices]
    best = None
    for res in results:
        if res is not None and (best is None or res.log_ratio > best.log_ratio):
            best = res
    if best is None:
        raise AllRestartsDegenerate("every restart hit a degenerate ratio")
    return best
