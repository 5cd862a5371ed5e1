"""
Stationary processes from flows
===============================

A torus acting on the points, a sign cocycle and one spectral function
``f_0`` generate a stationary process.  Its stationary components are the
ones whose weights are constant on orbits.
"""

import numpy as np

from stabledecomp import (
    FinitePointSpace,
    FlowAction,
    StationaryProcessSpec,
    WeightFamily,
    build_flow_rep,
    ergodic_decomposition,
    invariant_partition,
    is_indecomposable,
    is_stationary,
    mma_build,
    recover_stationary_weights,
    stationary_components,
)

# %%
# Z_6 acting on two 3-cycles, with a sign flip on one point.
space = FinitePointSpace(("p0", "p1", "p2", "q0", "q1", "q2"), np.array([1, 1, 1, 2, 2, 2.0]))
shift = np.array([1, 2, 0, 4, 5, 3])
cocycle = np.array([1, 1, -1, 1, 1, 1.0])
flow = FlowAction((6,), (shift,), (cocycle,), space)
spec = StationaryProcessSpec(0.8, flow, np.array([1.0, 0.5, 0.0, 2.0, 0.0, 0.0]))
rep = build_flow_rep(spec)
print(rep.values)
print("stationary:", is_stationary(rep))

# %%
# Orbits are the invariant sets; weights constant on them give stationary components.
orbits = invariant_partition(flow)
print(orbits.blocks)
ind = np.array([1.0, 1, 1, 0, 0, 0])
comps = stationary_components(spec, WeightFamily(np.stack([ind, 1 - ind])))
print([is_stationary(c) for c in comps])
print(recover_stationary_weights(spec, comps[0]))

# %%
# Two orbits means decomposable; each orbit on its own is indecomposable.
print(is_indecomposable(spec))
for part in ergodic_decomposition(spec):
    print(part.flow.points, is_indecomposable(part).indecomposable)

# %%
# A moving average on Z_12 is indecomposable, a mixture of two is not.
kernel = np.zeros((12, 1))
kernel[:3, 0] = [1.0, 0.5, 0.25]
print(is_indecomposable(mma_build(kernel, [1.0], 1.2)).indecomposable)
kernel = np.zeros((12, 2))
kernel[:2, 0] = 1.0
kernel[[0, 2], 1] = [1.0, 2.0]
print(is_indecomposable(mma_build(kernel, [1.0, 3.0], 1.2)).indecomposable)
