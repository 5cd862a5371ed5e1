"""
Building, checking and recovering decompositions
================================================

Weights ``r_k`` with ``sum_k |r_k|^alpha = 1`` split a process into
independent components.  Nonnegative weights that are constant on groups of
proportional columns are unique, and can be read back from a component.
"""

import numpy as np

from stabledecomp import (
    SpectralRep,
    WeightFamily,
    common_component,
    complement_weights,
    has_independent_increments,
    independent_increments_rep,
    is_minimal,
    make_components,
    minimalize,
    ratio_partition,
    recover_weights,
    verify_decomposition,
)
from stabledecomp.errors import NotAComponent

alpha = 1.2
rep = SpectralRep.from_arrays(
    alpha,
    [[1.0, 2.0, 0.0, 1.0], [2.0, 4.0, 1.0, -1.0]],
    weights=[1.0, 0.5, 2.0, 1.0],
    points=["a", "b", "c", "d"],
)

# %%
# ``a`` and ``b`` are proportional, so the representation is not minimal.
print(ratio_partition(rep).blocks, is_minimal(rep))
minimal, partition = minimalize(rep)
print(minimal.points, minimal.values)

# %%
# A two-component split with block-constant weights.
r = np.array([0.5, 0.5, 1.0, 0.0])
w = WeightFamily(np.stack([r, complement_weights(r, alpha)]))
first, second = make_components(rep, w)
print("decomposition holds:", verify_decomposition(rep, [first, second]))
print("recovered r:", recover_weights(rep, first))

# %%
# A candidate charging a direction the process does not have is rejected.
foreign = SpectralRep.from_arrays(alpha, [[1.0], [0.0]])
try:
    recover_weights(rep, foreign)
except NotAComponent as exc:
    print("not a component:", exc)

# %%
# Two processes share exactly the directions both of them charge.
other = SpectralRep.from_arrays(alpha, [[0.0, 3.0], [1.0, 0.0]], weights=[5.0, 1.0])
shared = common_component(rep, other)
print("common part:", None if shared is None else shared.values)

# %%
# Processes with independent increments stay that way under any split.
inc = independent_increments_rep([1.0, 2.0, 3.5], [1.0, 1.5, 4.0], alpha)
print(inc.points, has_independent_increments(inc))
raw = np.random.default_rng(1).uniform(-1, 1, size=(3, inc.n_points))
family = WeightFamily(raw / (np.abs(raw) ** alpha).sum(axis=0) ** (1 / alpha))
print([has_independent_increments(c) for c in make_components(inc, family)])
