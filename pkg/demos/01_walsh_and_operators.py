# %% [markdown]
# Walsh analysis on the cube
#
# A function on {-1,1}^n is stored by its values at the 2**n points or by its
# Walsh coefficients; either one is computed from the other on demand.

# %%
import numpy as np

from cube_pisier import CubeFunction, d_j, heat, laplacian, riesz, subset_mask

rng = np.random.default_rng(0)
n = 4
f = CubeFunction.random(n, 2, rng)
print("mean of f:", f.spectrum[0])

# %% [markdown]
# The character w_{0,2} is an eigenfunction of the Laplacian with eigenvalue 2,
# and of the heat semigroup with eigenvalue e^{-2t}.

# %%
w = CubeFunction.character(n, subset_mask([0, 2]))
print("Lap w / w:", (laplacian(w).values / w.values)[:4, 0])
print("heat(w, 0.5) / w:", (heat(w, 0.5).values / w.values)[0, 0], "vs", np.exp(-1.0))

# %% [markdown]
# D_j is idempotent and the Riesz transforms R_j = Lap^{-1} D_j sum to the
# identity minus the mean.

# %%
print("max |D_0 D_0 f - D_0 f| =", np.abs(d_j(d_j(f, 0), 0).values - d_j(f, 0).values).max())
total = sum(riesz(f, j).values for j in range(n))
print("max |sum_j R_j f - (f - Ef)| =", np.abs(total - (f.values - f.values.mean(0))).max())
