"""
Max-stable processes
====================

A nonnegative representation also describes an alpha-Frechet process
through maxima instead of sums.  Its joint CDF is explicit, and its max
decompositions mirror the sum decompositions of the associated process.
"""

import numpy as np

from stabledecomp import (
    MaxStableRep,
    WeightFamily,
    alpha_power_transform,
    frechet_fdd_cdf,
    make_max_components,
    recover_max_weights,
    verify_max_decomposition,
)

rep = MaxStableRep.from_arrays(
    2.5,
    [[1.0, 0.5, 0.0], [0.0, 1.0, 2.0], [0.3, 0.0, 1.0]],
    weights=[1.0, 2.0, 0.5],
    times=["t1", "t2", "t3"],
)

# %%
# Joint CDF at a few thresholds, and the max-stability identity.
y = np.array([1.5, 2.0])
p = frechet_fdd_cdf(rep, ["t1", "t3"], y)
n = 7
print(p, frechet_fdd_cdf(rep, ["t1", "t3"], n ** (1 / rep.alpha) * y) ** n)

# %%
# ``Y**alpha`` is 1-Frechet with spectral functions ``f**alpha``.
unit = alpha_power_transform(rep)
print(unit.alpha, frechet_fdd_cdf(unit, ["t1", "t3"], y**rep.alpha))

# %%
# Max decompositions use weights in [0, 1] with sum r_k^alpha = 1.
r = np.array([1.0, 0.5, 0.0])
w = WeightFamily(np.stack([r, (1 - r**rep.alpha) ** (1 / rep.alpha)]))
comps = make_max_components(rep, w)
print("max decomposition holds:", verify_max_decomposition(rep, comps))
print("recovered:", recover_max_weights(rep, comps[0]))
