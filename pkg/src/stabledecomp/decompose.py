"""Independent decompositions of SaS processes on finite spaces.

Every component of ``X`` is ``int r f_t dM_alpha`` for weights ``r`` with
``sum_k |r_k|^alpha = 1``; choosing ``r_k`` nonnegative and constant on the
projective classes of the columns of ``F`` makes it unique.  The functions
below build components from weights, check candidate decompositions and
recover those unique weights from a component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    DEFAULT_TOL,
    _check_compatible,
    _cluster,
    _merge,
    _readonly,
    _unit_columns,
    disjoint_union,
    joint_atoms,
    canonicalize,
    same_process,
)
from .errors import (
    DimensionMismatch,
    NonMonotone,
    NotAComponent,
    ValidationError,
    WeightNormViolation,
)

# Slack allowed when checking sum_k |r_k|^alpha = 1.
WEIGHT_NORM_TOL = 1e-9


@dataclass(frozen=True)
class Partition:
    """A partition of point labels into disjoint nonempty blocks."""

    blocks: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(str(p) for p in b) for b in self.blocks)
        seen = set()
        for b in blocks:
            if not b:
                raise ValidationError("partition blocks must be nonempty")
            if seen.intersection(b):
                raise ValidationError("partition blocks overlap")
            seen.update(b)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_labels(cls, points: Sequence[str], labels) -> "Partition":
        """Blocks ordered by first appearance in ``points``."""
        groups: dict = {}
        for p, lab in zip(points, np.asarray(labels).tolist()):
            groups.setdefault(lab, []).append(p)
        return cls(tuple(tuple(g) for g in groups.values()))

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    @property
    def points(self) -> frozenset:
        return frozenset(p for b in self.blocks for p in b)

    def block_index(self, points: Sequence[str]) -> np.ndarray:
        """Block number of each label in ``points``."""
        where = {p: i for i, b in enumerate(self.blocks) for p in b}
        try:
            return np.array([where[p] for p in points], dtype=int)
        except KeyError as exc:
            raise ValidationError(f"point {exc.args[0]!r} is not covered by the partition")

    def is_discrete(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)


@dataclass(frozen=True, eq=False)
class WeightFamily:
    """Per-point component weights: ``r[k, s]`` is ``r_k(s)``."""

    r: np.ndarray

    def __post_init__(self):
        r = _readonly(self.r)
        if r.ndim == 1:
            r = _readonly(r[None, :])
        if r.ndim != 2 or r.shape[0] == 0:
            raise DimensionMismatch(f"weights must be a (k, |S|) array, got shape {r.shape}")
        if np.any(np.abs(r) > 1 + 1e-12) or not np.all(np.isfinite(r)):
            raise ValidationError("weights must lie in [-1, 1]")
        object.__setattr__(self, "r", r)

    @property
    def k(self) -> int:
        return self.r.shape[0]

    def check(self, alpha: float, points: Sequence[str], tol: float = WEIGHT_NORM_TOL):
        """Raise :class:`WeightNormViolation` unless ``sum_k |r_k|^alpha = 1`` pointwise."""
        if self.r.shape[1] != len(points):
            raise DimensionMismatch(f"{self.r.shape[1]} weights for {len(points)} points")
        total = (np.abs(self.r) ** alpha).sum(axis=0)
        bad = np.flatnonzero(np.abs(total - 1.0) > tol)
        if bad.size:
            raise WeightNormViolation(points[bad[0]], float(total[bad[0]]))

    @classmethod
    def uniform(cls, n: int, n_points: int, alpha: float) -> "WeightFamily":
        """``n`` equal weights ``n**(-1/alpha)``: the trivial split."""
        return cls(np.full((n, n_points), n ** (-1.0 / alpha)))

    @classmethod
    def from_blocks(cls, partition: Partition, points: Sequence[str], block_values) -> "WeightFamily":
        """Block-constant family; ``block_values[k, b]`` is ``r_k`` on block ``b``."""
        block_values = np.atleast_2d(np.asarray(block_values, dtype=float))
        return cls(block_values[:, partition.block_index(points)])


def complement_weights(r, alpha: float) -> np.ndarray:
    """Weights ``(1 - r**alpha)**(1/alpha)`` completing ``r`` to a family."""
    r = np.abs(np.asarray(r, dtype=float))
    rest = 1.0 - r**alpha
    if np.any(rest < -1e-12):
        raise ValidationError("weights above 1 have no complement")
    return np.clip(rest, 0.0, None) ** (1.0 / alpha)


# --- ratio partition and minimality ----------------------------------------


def ratio_partition(rep) -> "Partition":
    """Projective classes of the columns: points whose columns are
    proportional (with either sign) share a block."""
    _, units = _unit_columns(rep.values)
    return Partition.from_labels(rep.points, _cluster(units))


def is_minimal(rep) -> bool:
    return ratio_partition(rep).is_discrete()


def minimalize(rep):
    """Collapse each projective class into one point.

    Returns ``(minimal_rep, partition)``.  Each block becomes a point named
    after its first member, with column ``direction * mass**(1/alpha)`` and
    weight 1, so the law is unchanged.
    """
    norms, units = _unit_columns(rep.values)
    masses = rep.weights * norms**rep.alpha
    directions, atom_masses, members = _merge(units, masses)
    order = np.argsort([m[0] for m in members], kind="stable")
    values = directions[order].T * atom_masses[order] ** (1.0 / rep.alpha)
    blocks = tuple(tuple(rep.points[i] for i in members[j]) for j in order)
    minimal = rep.replace(
        values=values,
        weights=np.ones(len(blocks)),
        points=[b[0] for b in blocks],
    )
    return minimal, Partition(blocks)


# --- components -------------------------------------------------------------


def make_components(rep, w: WeightFamily) -> list:
    """Components ``int r_k f_t dM`` for every row of ``w``."""
    w.check(rep.alpha, rep.points)
    return [rep.scale_columns(r) for r in w.r]


def verify_decomposition(rep, comps: Sequence, tol: float = DEFAULT_TOL) -> bool:
    """Whether independent ``comps`` sum to ``rep`` in distribution."""
    comps = list(comps)
    if not comps:
        raise ValidationError("no components given")
    _check_compatible([rep, *comps])
    return same_process(rep, disjoint_union(comps), tol)


def recover_weights(rep, component, tol: float = DEFAULT_TOL) -> np.ndarray:
    """The unique nonnegative block-constant ``r`` with ``component = r f``.

    For every projective class ``B`` of ``rep`` the weight is
    ``(m_Z(B) / m_X(B))**(1/alpha)``, the ratio of the masses the component
    and the process put on the class direction.  Returned per point, aligned
    with ``rep.points``.

    Raises
    ------
    NotAComponent
        If the component charges a direction the process does not, or more
        than ``(1 + tol)`` times the process's mass on some direction.
    """
    _check_compatible([rep, component])
    nx, ux = _unit_columns(rep.values)
    mx = rep.weights * nx**rep.alpha
    if component.n_points == 0:
        return np.zeros(rep.n_points)
    nz, uz = _unit_columns(component.values)
    mz = component.weights * nz**component.alpha
    labels = _cluster(np.vstack([ux, uz]))
    lx, lz = labels[: rep.n_points], labels[rep.n_points :]
    r = np.zeros(rep.n_points)
    for c in np.unique(labels):
        in_x, in_z = lx == c, lz == c
        mass_x, mass_z = mx[in_x].sum(), mz[in_z].sum()
        if not in_x.any():
            raise NotAComponent(uz[np.flatnonzero(in_z)[0]])
        if mass_z > mass_x * (1 + tol):
            raise NotAComponent(
                ux[np.flatnonzero(in_x)[0]], reason="component mass exceeds the process mass"
            )
        r[in_x] = min(mass_z / mass_x, 1.0) ** (1.0 / rep.alpha)
    return r


def common_component(rep_a, rep_b, tol: float = DEFAULT_TOL):
    """Largest common component of two processes, or ``None``.

    On every direction charged by both canonical measures the common part
    carries the smaller of the two masses.  Directions charged by only one
    side cannot be shared.
    """
    _check_compatible([rep_a, rep_b])
    ma, mb = canonicalize(rep_a), canonicalize(rep_b)
    directions, table = joint_atoms([ma, mb])
    shared = table.min(axis=1)
    keep = shared > tol * max(ma.total_mass, mb.total_mass)
    if not keep.any():
        return None
    values = directions[keep].T * shared[keep] ** (1.0 / rep_a.alpha)
    return type(rep_a).from_arrays(
        rep_a.alpha,
        values,
        points=[f"c{i}" for i in range(int(keep.sum()))],
        times=rep_a.times,
    )


def is_trivial_component(rep, component, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``component`` is a positive multiple of ``rep`` in law."""
    _check_compatible([rep, component])
    if component.n_points == 0:
        return False
    _, table = joint_atoms([canonicalize(rep), canonicalize(component)])
    if np.any(table == 0):
        return False
    ratio = table[:, 1] / table[:, 0]
    return bool(np.ptp(ratio) <= tol * ratio.max())


# --- independent increments -------------------------------------------------


def _fmt(x: float) -> str:
    return np.format_float_positional(float(x), trim="-")


def independent_increments_rep(times, m, alpha: float):
    """Representation ``f_t = 1_[0, t]`` of a process with independent increments.

    ``m[i]`` is ``||X_{times[i]}||_alpha^alpha``; it must be nondecreasing with
    ``m(0) = 0``.  Each point is an increment ``(t_{i-1}, t_i]`` carrying mass
    ``m(t_i) - m(t_{i-1})``; zero-mass increments are dropped.

    >>> rep = independent_increments_rep([1, 2], [1, 2], alpha=1.0)
    >>> rep.values.tolist(), rep.weights.tolist()
    ([[1.0, 0.0], [1.0, 1.0]], [1.0, 1.0])
    """
    from .core import SpectralRep

    times = np.asarray(times, dtype=float)
    m = np.asarray(m, dtype=float)
    if times.ndim != 1 or times.shape != m.shape or times.size == 0:
        raise DimensionMismatch("times and m must be nonempty 1-d arrays of equal length")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise NonMonotone("times must be nonnegative and strictly increasing")
    if m[0] < 0 or np.any(np.diff(m) < 0):
        raise NonMonotone("m must be nonnegative and nondecreasing")
    if times[0] == 0 and m[0] != 0:
        raise NonMonotone("m(0) must be 0")
    prev_t = np.concatenate([[0.0], times[:-1]])
    mass = np.diff(np.concatenate([[0.0], m]))
    keep = np.flatnonzero(mass > 0)
    if keep.size == 0:
        raise ValidationError("m vanishes identically; the process is zero")
    values = (np.arange(len(times))[:, None] >= keep[None, :]).astype(float)
    return SpectralRep.from_arrays(
        alpha,
        values,
        weights=mass[keep],
        points=[f"({_fmt(prev_t[i])},{_fmt(times[i])}]" for i in keep],
        times=[_fmt(t) for t in times],
    )


def has_independent_increments(rep, rtol: float = 1e-12) -> bool:
    """Whether the increments ``f_{t_i} - f_{t_{i-1}}`` (with ``f_{t_{-1}} = 0``)
    have pairwise disjoint supports, times taken in ``rep.times`` order."""
    inc = np.diff(np.vstack([np.zeros(rep.n_points), rep.values]), axis=0)
    support = np.abs(inc) > rtol * np.abs(rep.values).max()
    return bool(np.all(support.sum(axis=0) <= 1))
