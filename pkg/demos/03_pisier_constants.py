# %% [markdown]
# Estimating inequality constants
#
# Each inequality becomes a ratio maximized by multi-restart gradient ascent.
# The result is a lower bound on the sharp constant with a stored witness.

# %%
from cube_pisier import EllQ, L1Cube, OptimizerConfig, Scalar, exact_p2_scalar, maximize, scan

config = OptimizerConfig(restarts=8, max_iter=300)
est = maximize("pisier", Scalar(), 4, 2, config)
print("pisier, scalar, p=2:", est.value, "exact:", exact_p2_scalar("pisier", 4)[0])
print("recomputed from witness:", est.recompute())

# %% [markdown]
# Hilbert space: the Riesz inequality constant does not grow with n.

# %%
for row in scan("df", EllQ(4, 2), range(1, 6), 2, config):
    print(row.n, row.estimate)

# %% [markdown]
# L^1 of a cube as the target space: the F1 constant grows with n.

# %%
for row in scan("f1", "l1cube:k=n", range(2, 5), 2, config):
    print(row.n, row.norm, round(row.estimate, 4))
