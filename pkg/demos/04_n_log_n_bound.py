# %% [markdown]
# The n log n bound
#
# n * (min_{0<r<1} r^{-pn} log((1+r)/(1-r)))^{1/p}, computed by a grid scan
# and golden-section search, compared with n log n.

# %%
import numpy as np

from cube_pisier import f1log_bound

ns = 2 ** np.arange(2, 13)
for p in (1, 2, 4):
    bound, r = f1log_bound(ns, p, return_r=True)
    print(f"p={p}")
    for n, b, rr in zip(ns, bound, r):
        print(f"  n={n:5d}  r*={rr:.6f}  bound={b:12.2f}  bound/(n log n)={b / (n * np.log(n)):.4f}")
