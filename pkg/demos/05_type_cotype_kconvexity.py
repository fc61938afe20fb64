# %% [markdown]
# Empirical type, cotype and K-convexity moduli
#
# All three are lower bounds found by ascent over vector tuples (type, cotype)
# or over cube functions (the norm of the Rademacher projection).

# %%
import numpy as np

from cube_pisier import EllQ, OptimizerConfig
from cube_pisier.norms import cotype_estimate, k_convexity_estimate, type_estimate

config = OptimizerConfig(restarts=6, max_iter=300)
print("cotype-2 of l_inf^4:", cotype_estimate(EllQ(4, np.inf), 2, 4, config)[0])
for m in (1, 2, 4):
    print(f"type-2 of l_1^4, m={m}:", type_estimate(EllQ(4, 1), 2, m, config)[0])
print("Rademacher projection on L^2(l_2^3):", k_convexity_estimate(EllQ(3, 2), 4, 2, config)[0])
print("Rademacher projection on L^1.5(l_1^4):", k_convexity_estimate(EllQ(4, 1), 3, 1.5, config)[0])
