import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def naive_points(n):
    """All cube points as sign vectors, in index order (bit i set <=> eps_i = -1)."""
    pts = [np.array([-1.0 if (x >> i) & 1 else 1.0 for i in range(n)]) for x in range(1 << n)]
    return np.array(pts).reshape(1 << n, n)


def naive_walsh_matrix(n):
    """W[x, S] = prod_{i in S} eps_i(x) computed by explicit products."""
    pts = naive_points(n)
    W = np.ones((1 << n, 1 << n))
    for S in range(1 << n):
        for i in range(n):
            if (S >> i) & 1:
                W[:, S] *= pts[:, i]
    return W


def all_signs(m):
    return np.array(list(itertools.product([1.0, -1.0], repeat=m))).reshape(-1, m)


def away_from_kinks(u, margin=1e-5):
    """Rows whose l1/linf-type norms are differentiable with room to spare."""
    a = np.sort(np.abs(u), axis=-1)
    top_gap = a[..., -1] - a[..., -2] if u.shape[-1] > 1 else np.inf
    return (a[..., 0] > margin) & (top_gap > margin)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
