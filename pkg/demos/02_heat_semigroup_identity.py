# %% [markdown]
# Biased bits and the smoothed derivative
#
# With independent bits xi_i of mean r = e^{-t}, the smoothed derivative
# e^{-t Lap} D_j f has an expectation formula over xi.  Here both sides are
# computed: one by enumerating the 2**n outcomes of xi, one as a multiplier.

# %%
import numpy as np

from cube_pisier import CubeFunction, d_j, heat, smoothed_derivative
from cube_pisier.semigroup import integral_residual, verify_main_identity

rng = np.random.default_rng(1)
f = CubeFunction.random(6, 2, rng)
for t in (0.05, 0.3, 1.0, 3.0):
    gap = np.abs(smoothed_derivative(f, 2, t).values - heat(d_j(f, 2), t).values).max()
    print(f"t={t:<4}  sup gap = {gap:.2e}")
print("over all j and t:", verify_main_identity(f, [0.05, 0.3, 1.0, 3.0]))

# %% [markdown]
# Integrating over t (Gauss-Legendre after e^{-t} = sin(theta)) recovers
# sum_j D_j f_j.  The sign that comes out is +1.

# %%
f_list = [CubeFunction.random(5, 1, rng) for _ in range(5)]
residual, sign = integral_residual(f_list)
print(f"relative residual {residual:.2e}, sign {sign:+d}")
