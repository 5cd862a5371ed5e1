"""
Spectral representations and their canonical form
==================================================

A finite representation is a matrix of spectral functions plus point masses.
Different matrices can describe the same process; the canonical spectral
measure tells them apart.
"""

import numpy as np

from stabledecomp import SpectralRep, canonicalize, same_process, scale_functional

# %%
# Two times, three points.  Columns ``a`` and ``b`` point the same way.
rep = SpectralRep.from_arrays(
    1.5,
    [[1.0, 2.0, 1.0], [2.0, 4.0, -1.0]],
    weights=[1.0, 2.0, 0.5],
    points=["a", "b", "c"],
    times=["t1", "t2"],
)
print(rep)

# %%
# The characteristic function of sum_j a_j X_{t_j} is exp(-scale_functional).
for a in ([1.0, 0.0], [0.0, 1.0], [1.0, -1.0]):
    print(a, scale_functional(rep, a))

# %%
# Proportional columns merge into one atom; antipodal ones too.
measure = canonicalize(rep)
for direction, mass in measure.atoms():
    print(f"direction {direction}  mass {mass:.6f}")

# %%
# Rebuilding from the atoms gives a different matrix with the same law.
merged = measure.to_rep()
print(merged.values, merged.weights)
print("same process:", same_process(rep, merged))

# %%
# Flipping the sign of a column and compensating a rescaling by the weight
# leaves the law unchanged as well.
values = rep.values.copy()
values[:, 2] *= -3.0
weights = rep.weights.copy()
weights[2] *= 3.0**-1.5
print("rescaled same process:", same_process(rep, rep.replace(values=values, weights=weights)))

grid = np.random.default_rng(0).normal(size=(5, 2))
print(np.c_[scale_functional(rep, grid), scale_functional(merged, grid)])
