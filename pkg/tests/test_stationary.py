import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import orbit_count, random_torus_flow
from stabledecomp import (
    FinitePointSpace,
    FlowAction,
    SpectralRep,
    StationaryProcessSpec,
    WeightFamily,
    build_flow_rep,
    common_component,
    ergodic_decomposition,
    invariant_partition,
    is_indecomposable,
    is_stationary,
    mma_build,
    recover_stationary_weights,
    same_process,
    stationary_components,
    verify_decomposition,
)
from stabledecomp.errors import (
    FullSupportViolation,
    InvalidFlow,
    NotATorusIndex,
    NotInvariant,
    NotMeasurePreserving,
    NotStationary,
    ZeroKernelSheet,
)
from stabledecomp.stationary import parse_torus, shift_rep, torus_labels

SHAPES = [(2,), (3,), (4,), (6,), (12,), (2, 2), (2, 3), (3, 4), (4, 2), (6, 2)]


def space(n, weights=None):
    return FinitePointSpace(tuple(str(i) for i in range(n)), np.ones(n) if weights is None else np.asarray(weights, float))


def cyclic(n, m=None, cocycle=None, weights=None):
    return FlowAction((m or n,), (np.roll(np.arange(n), -1),), None if cocycle is None else (cocycle,), space(n, weights))


def random_spec(rng, shape, alpha=1.2, **kw):
    while True:
        flow = random_torus_flow(rng, shape, **kw)
        f0 = rng.normal(size=len(flow.points)) * (rng.random(len(flow.points)) < 0.7)
        if not np.any(f0):
            continue
        spec = StationaryProcessSpec(alpha, flow, f0)
        try:
            spec.flow_values()
        except FullSupportViolation:
            continue
        return spec


# --- torus labels ---------------------------------------------------------------


def test_torus_labels_round_trip():
    assert torus_labels((3,)) == ("0", "1", "2")
    assert torus_labels((2, 2)) == ("0,0", "0,1", "1,0", "1,1")
    assert parse_torus(torus_labels((3, 4))) == (3, 4)
    with pytest.raises(NotATorusIndex):
        parse_torus(["0", "2"])


# --- flows ----------------------------------------------------------------------


def test_cyclic_indicator():
    spec = StationaryProcessSpec(1.0, cyclic(3), np.array([1.0, 0.0, 0.0]))
    np.testing.assert_array_equal(spec.flow_values(), [[1, 0, 0], [0, 0, 1], [0, 1, 0]])


def test_sign_cocycle_needs_even_period():
    with pytest.raises(InvalidFlow):
        cyclic(3, cocycle=-np.ones(3))
    spec = StationaryProcessSpec(1.0, cyclic(3, m=6, cocycle=-np.ones(3)), np.array([1.0, 0.0, 0.0]))
    f = spec.flow_values()
    np.testing.assert_array_equal(f[1], [0, 0, -1])
    np.testing.assert_array_equal(f[3], [-1, 0, 0])
    assert is_stationary(build_flow_rep(spec))


def test_radon_nikodym_factors():
    mu = np.array([1.0, 2.0, 1.0])
    alpha = 1.5
    f0 = np.array([1.0, -2.0, 0.5])
    spec = StationaryProcessSpec(alpha, cyclic(3, weights=mu), f0)
    f = spec.flow_values()
    for t in range(3):
        for s in range(3):
            img = (s + t) % 3
            assert f[t, s] == pytest.approx((mu[img] / mu[s]) ** (1 / alpha) * f0[img], rel=1e-15)


def test_invalid_flows():
    with pytest.raises(InvalidFlow):
        FlowAction((2,), (np.array([1, 2, 0]),), None, space(3))  # order 3 on Z_2
    with pytest.raises(InvalidFlow):
        FlowAction((3,), (np.array([0, 0, 1]),), None, space(3))
    with pytest.raises(InvalidFlow):
        FlowAction((2, 2), (np.array([1, 2, 0, 3]), np.array([0, 1, 3, 2])), None, space(4))
    with pytest.raises(InvalidFlow):
        FlowAction((2, 2), (np.array([1, 0, 2, 3]), np.array([0, 2, 1, 3])), None, space(4))  # no commute
    with pytest.raises(FullSupportViolation):
        StationaryProcessSpec(1.0, FlowAction((2,), (np.array([1, 0, 2]),), None, space(3)),
                              np.array([1.0, 0.0, 0.0])).flow_values()


def test_cocycle_identity_exhaustive():
    rng = np.random.default_rng(11)
    for shape in [(m,) for m in range(1, 9)] + [(a, b) for a in (2, 4, 8) for b in (2, 4, 8)]:
        for _ in range(3):
            flow = random_torus_flow(rng, shape)
            elems = list(itertools.product(*[range(m) for m in shape]))
            for t in elems:
                for tau in elems:
                    st_ = tuple((a + b) % m for a, b, m in zip(t, tau, shape))
                    np.testing.assert_array_equal(flow.phi(st_), flow.phi(tau)[flow.phi(t)])
                    np.testing.assert_array_equal(
                        flow.cocycle(st_), flow.cocycle(t) * flow.cocycle(tau)[flow.phi(t)]
                    )


# --- stationarity ------------------------------------------------------------------


def test_non_equivariant_is_not_stationary():
    rep = SpectralRep.from_arrays(1.0, [[1.0], [2.0]], times=["0", "1"])
    assert not is_stationary(rep)
    with pytest.raises(NotATorusIndex):
        is_stationary(SpectralRep.from_arrays(1.0, [[1.0], [2.0]], times=["a", "b"]))


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.sampled_from(SHAPES))
def test_flow_reps_are_stationary(seed, shape):
    rng = np.random.default_rng(seed)
    rep = build_flow_rep(random_spec(rng, shape))
    assert is_stationary(rep)
    step = [int(rng.integers(m)) for m in shape]
    assert same_process(rep, shift_rep(rep, step))


# --- invariant partition and components ---------------------------------------------


def test_invariant_partition_examples():
    assert len(invariant_partition(cyclic(3))) == 1
    two = FlowAction((2,), (np.array([1, 0, 3, 2]),), None, space(4))
    assert sorted(map(sorted, invariant_partition(two).blocks)) == [["0", "1"], ["2", "3"]]
    ident = FlowAction((2,), (np.arange(3),), None, space(3))
    assert invariant_partition(ident).is_discrete()


def two_orbit_spec(alpha=1.0):
    flow = FlowAction((2,), (np.array([1, 0, 3, 2]),), None, space(4, [1, 2, 1, 3]))
    return StationaryProcessSpec(alpha, flow, np.array([1.0, 2.0, 2.0, -1.0]))


def test_orbit_indicator_components():
    spec = two_orbit_spec()
    ind = np.array([1.0, 1.0, 0.0, 0.0])
    a, b = stationary_components(spec, WeightFamily(np.stack([ind, 1 - ind])))
    assert set(a.points).isdisjoint(b.points)
    assert is_stationary(a) and is_stationary(b)
    np.testing.assert_allclose(recover_stationary_weights(spec, a), ind)


def test_trivial_stationary_split():
    spec = two_orbit_spec(1.5)
    comps = stationary_components(spec, WeightFamily.uniform(2, 4, 1.5))
    for c in comps:
        np.testing.assert_allclose(recover_stationary_weights(spec, c), 2 ** (-1 / 1.5))


def test_not_invariant():
    spec = StationaryProcessSpec(1.0, cyclic(3), np.array([1.0, 2.0, 3.0]))
    r = np.array([1.0, 0.5, 1.0])
    with pytest.raises(NotInvariant):
        stationary_components(spec, WeightFamily(np.stack([r, (1 - r)])))


def test_recover_full_and_nonstationary():
    spec = two_orbit_spec()
    rep = build_flow_rep(spec)
    np.testing.assert_allclose(recover_stationary_weights(spec, rep), 1.0)
    r = np.array([1.0, 0.0, 0.0, 0.0])
    with pytest.raises(NotStationary):
        recover_stationary_weights(spec, rep.scale_columns(r))


def test_three_orbit_indicator():
    rng = np.random.default_rng(4)
    gens = np.array([1, 2, 0, 4, 5, 3, 7, 8, 6])
    flow = FlowAction((3,), (gens,), None, space(9, rng.uniform(0.5, 2, 9)))
    spec = StationaryProcessSpec(1.3, flow, rng.normal(size=9))
    rep = build_flow_rep(spec)
    for k in range(3):
        ind = (np.arange(9) // 3 == k).astype(float)
        r = recover_stationary_weights(spec, rep.scale_columns(ind))
        np.testing.assert_allclose(r, ind, atol=1e-12)


# --- indecomposability ----------------------------------------------------------------


def test_moving_average_indecomposable():
    kernel = np.zeros((12, 1))
    kernel[:3, 0] = [1.0, 0.5, 0.25]
    assert is_indecomposable(mma_build(kernel, [1.0], 1.2))


def test_mixed_moving_average_decomposable():
    kernel = np.zeros((6, 2))
    kernel[:2, 0] = 1.0
    kernel[[0, 2], 1] = [1.0, 2.0]
    v = is_indecomposable(mma_build(kernel, [1.0, 2.0], 1.2))
    assert not v
    assert v.witness in v.classes and len(v.classes) == 2


def test_mma_three_sheets_and_zero_sheet():
    rng = np.random.default_rng(8)
    kernel = rng.normal(size=(5, 3))
    spec = mma_build(kernel, [1.0, 2.0, 0.5], 0.9)
    v = is_indecomposable(spec)
    assert not v and len(v.classes) == 3
    kernel[:, 1] = 0
    with pytest.raises(ZeroKernelSheet) as exc:
        mma_build(kernel, [1.0, 2.0, 0.5], 0.9)
    assert "v1" in str(exc.value)


def test_proportional_sheets_merge():
    kernel = np.zeros((4, 2))
    kernel[:2, 0] = [1.0, 2.0]
    kernel[:, 1] = 3 * kernel[:, 0]
    assert is_indecomposable(mma_build(kernel, [1.0, 1.0], 1.0))


def test_doubly_stationary_transitive():
    # flow = shift on Z_6 composed with nothing else: transitive measure preserving
    rng = np.random.default_rng(2)
    spec = StationaryProcessSpec(0.8, cyclic(6), rng.normal(size=6))
    assert is_indecomposable(spec)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.sampled_from(SHAPES))
def test_indecomposable_iff_single_class(seed, shape):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, shape)
    v = is_indecomposable(spec)
    n_orbits = orbit_count(len(spec.flow.points), spec.flow.generators)
    if n_orbits == 1:
        assert v.indecomposable
    assert v.indecomposable == (len(v.classes) == 1)


# --- ergodic decomposition --------------------------------------------------------------


def test_ergodic_single_orbit():
    spec = StationaryProcessSpec(1.0, cyclic(4), np.array([1.0, 2.0, 0.0, 0.0]))
    assert ergodic_decomposition(spec) == [spec]


def test_ergodic_two_orbits():
    flow = FlowAction((2,), (np.array([1, 0, 3, 2]),), None, space(4, [1, 1, 2, 2]))
    spec = StationaryProcessSpec(1.0, flow, np.array([1.0, 0.5, 2.0, -1.0]))
    parts = ergodic_decomposition(spec)
    assert len(parts) == 2
    assert all(is_indecomposable(p) for p in parts)
    assert verify_decomposition(build_flow_rep(spec), [build_flow_rep(p) for p in parts])


def test_ergodic_requires_measure_preserving():
    with pytest.raises(NotMeasurePreserving):
        ergodic_decomposition(two_orbit_spec())


def test_ergodic_five_orbits():
    rng = np.random.default_rng(9)
    sizes = [1, 2, 3, 2, 4]
    gens, weights, start = [], [], 0
    for k in sizes:
        gens.append(np.roll(np.arange(k), -1) + start)
        weights += [rng.uniform(0.5, 2)] * k
        start += k
    flow = FlowAction((12,), (np.concatenate(gens),), None, space(start, weights))
    spec = StationaryProcessSpec(1.1, flow, rng.normal(size=start))
    parts = ergodic_decomposition(spec)
    reps = [build_flow_rep(p) for p in parts]
    assert len(parts) == 5
    assert verify_decomposition(build_flow_rep(spec), reps)
    for a, b in itertools.combinations(reps, 2):
        assert common_component(a, b) is None
