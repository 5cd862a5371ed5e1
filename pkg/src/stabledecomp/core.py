"""Finite spectral representations of SaS processes.

A process indexed by a finite set of times is described by a finite weighted
point space ``S`` (labels and positive masses ``mu``) and a ``|T| x |S|`` matrix
``F`` with ``F[t, s] = f_t(s)``.  Its law is fixed by the scale functional

    a -> sum_s |sum_j a_j f_{t_j}(s)|^alpha mu_s,

which in turn is fixed by the symmetric measure that puts mass
``mu_s * ||f(s)||^alpha`` on the direction ``+-f(s)/||f(s)||``.  That measure,
with antipodal directions identified, is what :func:`canonicalize` returns and
what :func:`same_process` compares.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    AlphaMismatch,
    AlphaOutOfRange,
    DimensionMismatch,
    DuplicateLabel,
    NonPositiveWeight,
    TimesMismatch,
    ValidationError,
    ZeroColumn,
)

DEFAULT_TOL = 1e-9
# Decimal places of the direction key used for ordering and reporting.
KEY_DECIMALS = 12
# Two unit directions closer than this (sup norm, up to sign) are one atom.
DIRECTION_TOL = 1e-10

__all__ = [
    "DEFAULT_TOL",
    "FinitePointSpace",
    "SpectralRep",
    "CanonicalSpectralMeasure",
    "check_alpha",
    "validate_rep",
    "scale_functional",
    "canonicalize",
    "same_process",
    "disjoint_union",
]


def check_alpha(alpha) -> float:
    """Return ``alpha`` as a float, raising unless ``0 < alpha < 2``."""
    a = float(alpha)
    if not 0.0 < a < 2.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 2), got {alpha!r}")
    return a


def _readonly(arr) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _unique_labels(labels: Iterable, what: str) -> tuple[str, ...]:
    labels = tuple(str(x) for x in labels)
    if len(set(labels)) != len(labels):
        seen = set()
        dup = next(x for x in labels if x in seen or seen.add(x))
        raise DuplicateLabel(f"duplicate {what} label {dup!r}")
    return labels


@dataclass(frozen=True, eq=False)
class FinitePointSpace:
    """Labelled points with strictly positive masses."""

    points: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        points = _unique_labels(self.points, "point")
        weights = _readonly(self.weights)
        if weights.shape != (len(points),):
            raise DimensionMismatch(
                f"{len(points)} points but weights of shape {weights.shape}"
            )
        bad = np.flatnonzero(~(weights > 0) | ~np.isfinite(weights))
        if bad.size:
            i = bad[0]
            raise NonPositiveWeight(f"weight of point {points[i]!r} is {weights[i]!r}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.points)

    def index(self, label: str) -> int:
        return self.points.index(label)


@dataclass(frozen=True, eq=False)
class _FiniteRep:
    alpha: float
    space: FinitePointSpace
    times: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", self._check_alpha(self.alpha))
        object.__setattr__(self, "times", _unique_labels(self.times, "time"))
        values = _readonly(self.values)
        shape = (len(self.times), len(self.space))
        if values.shape != shape:
            raise DimensionMismatch(f"values have shape {values.shape}, expected {shape}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("spectral values must be finite")
        self._check_values(values)
        zero = np.flatnonzero(~np.any(values != 0, axis=0))
        if zero.size:
            raise ZeroColumn(self.space.points[zero[0]])
        object.__setattr__(self, "values", values)

    def _check_alpha(self, alpha):
        return check_alpha(alpha)

    def _check_values(self, values):
        pass

    @classmethod
    def from_arrays(cls, alpha, values, weights=None, points=None, times=None):
        """Build from a ``|T| x |S|`` array, with default labels ``s0, s1, ...``
        and ``t0, t1, ...`` and unit weights when omitted."""
        values = np.atleast_2d(np.asarray(values, dtype=float))
        n_t, n_s = values.shape
        if weights is None:
            weights = np.ones(n_s)
        if points is None:
            points = [f"s{i}" for i in range(n_s)]
        if times is None:
            times = [f"t{j}" for j in range(n_t)]
        return cls(alpha, FinitePointSpace(tuple(points), weights), tuple(times), values)

    @property
    def points(self) -> tuple[str, ...]:
        return self.space.points

    @property
    def weights(self) -> np.ndarray:
        return self.space.weights

    @property
    def n_points(self) -> int:
        return len(self.space)

    @property
    def n_times(self) -> int:
        return len(self.times)

    def replace(self, *, alpha=None, values=None, weights=None, points=None, times=None):
        """Return a copy of the same type with some fields swapped out."""
        return type(self)(
            self.alpha if alpha is None else alpha,
            FinitePointSpace(
                self.points if points is None else tuple(points),
                self.weights if weights is None else weights,
            ),
            self.times if times is None else tuple(times),
            self.values if values is None else values,
        )

    def scale_columns(self, r) -> "_FiniteRep":
        """Representation with spectral functions ``r(s) f_t(s)``.

        Points where ``r`` vanishes are dropped so the result keeps full
        support.  If ``r`` vanishes everywhere the result has no points (the
        zero process).
        """
        r = np.asarray(r, dtype=float)
        if r.shape != (self.n_points,):
            raise DimensionMismatch(f"expected {self.n_points} weights, got shape {r.shape}")
        keep = r != 0
        return self.replace(
            values=self.values[:, keep] * r[keep],
            weights=self.weights[keep],
            points=[p for p, k in zip(self.points, keep) if k],
        )

    def digest(self) -> str:
        """SHA-256 of the representation's data, for provenance records."""
        h = hashlib.sha256()
        h.update(type(self).__name__.encode())
        h.update(np.float64(self.alpha).tobytes())
        h.update("\x1f".join(self.points).encode())
        h.update(b"\x1e")
        h.update("\x1f".join(self.times).encode())
        h.update(np.ascontiguousarray(self.weights).tobytes())
        h.update(np.ascontiguousarray(self.values).tobytes())
        return h.hexdigest()

    def __repr__(self):
        return (
            f"{type(self).__name__}(alpha={self.alpha:g}, |S|={self.n_points}, "
            f"|T|={self.n_times})"
        )


class SpectralRep(_FiniteRep):
    """An SaS process ``X_t = int f_t dM_alpha`` on a finite point space.

    Attributes
    ----------
    alpha : float
        Stability index, strictly between 0 and 2.
    space : FinitePointSpace
        Points and their control-measure masses ``mu_s``.
    times : tuple of str
        Index labels, in the order of the rows of ``values``.
    values : ndarray, shape (|T|, |S|)
        ``values[j, s] = f_{t_j}(s)``.  No column may vanish.

    Instances are immutable; construction validates every invariant.
    """


def validate_rep(raw) -> SpectralRep:
    """Validate a candidate representation.

    ``raw`` is either a :class:`SpectralRep` (re-checked and returned) or a
    mapping with keys ``alpha``, ``values`` and optionally ``weights``,
    ``points`` and ``times``.
    """
    if isinstance(raw, SpectralRep):
        return SpectralRep(raw.alpha, raw.space, raw.times, raw.values)
    return SpectralRep.from_arrays(
        raw["alpha"],
        raw["values"],
        weights=raw.get("weights"),
        points=raw.get("points"),
        times=raw.get("times"),
    )


def scale_functional(rep: _FiniteRep, a) -> float | np.ndarray:
    """Exponent of the characteristic function at coefficient vector(s) ``a``.

    ``E exp(i sum_j a_j X_{t_j}) = exp(-scale_functional(rep, a))``.  A 2-D
    ``a`` of shape ``(n, |T|)`` is evaluated row by row.
    """
    a = np.asarray(a, dtype=float)
    if a.shape[-1:] != (rep.n_times,) or a.ndim > 2:
        raise DimensionMismatch(f"coefficients of shape {a.shape} for {rep.n_times} times")
    combo = np.abs(a @ rep.values) ** rep.alpha
    out = combo @ rep.weights
    return float(out) if a.ndim == 1 else out


# --- canonical form -------------------------------------------------------


def direction_key(u) -> tuple[float, ...]:
    """Quantized key of a unit direction (12 decimals, no negative zeros)."""
    return tuple((np.round(np.asarray(u, dtype=float), KEY_DECIMALS) + 0.0).tolist())


def _orient(units: np.ndarray) -> np.ndarray:
    # first coordinate that survives quantization is made positive
    q = np.round(units, KEY_DECIMALS)
    first = (q != 0).argmax(axis=1)
    sign = np.sign(units[np.arange(len(units)), first])
    sign[sign == 0] = 1.0
    return units * sign[:, None]


def _unit_columns(values: np.ndarray):
    norms = np.linalg.norm(values, axis=0)
    return norms, _orient((values / norms).T)


def _cluster(units: np.ndarray) -> np.ndarray:
    """Single-linkage clusters of oriented unit rows, sign-insensitive.

    The connected components of the "closer than DIRECTION_TOL up to sign"
    graph do not depend on input order.  Returns a cluster id per row.
    """
    n = len(units)
    if n == 0:
        return np.zeros(0, dtype=int)
    q = np.round(units, KEY_DECIMALS) + 0.0
    order = np.lexsort(q.T[::-1])
    fresh = np.ones(n, dtype=bool)
    fresh[1:] = np.any(q[order[1:]] != q[order[:-1]], axis=1)
    inverse = np.empty(n, dtype=int)
    inverse[order] = np.cumsum(fresh) - 1
    keys = q[order[fresh]]
    m = len(keys)
    rows, cols = [], []
    step = max(1, 2_000_000 // max(1, m * keys.shape[1]))
    for lo in range(0, m, step):
        blk = keys[lo : lo + step]
        d_pos = np.abs(blk[:, None, :] - keys[None, :, :]).max(axis=2)
        d_neg = np.abs(blk[:, None, :] + keys[None, :, :]).max(axis=2)
        i, j = np.nonzero(np.minimum(d_pos, d_neg) <= DIRECTION_TOL)
        rows.append(i + lo)
        cols.append(j)
    i = np.concatenate(rows)
    j = np.concatenate(cols)
    if len(i) == m:  # only self-loops: every key is its own cluster
        return inverse
    graph = coo_matrix((np.ones(len(i)), (i, j)), shape=(m, m))
    _, comp = connected_components(graph, directed=False)
    return comp[inverse]


def _merge(units: np.ndarray, masses: np.ndarray):
    """Group oriented unit rows into atoms.

    Returns ``(directions, atom_masses, members)`` sorted by direction key,
    where ``members[i]`` indexes the rows merged into atom ``i``.
    """
    labels = _cluster(units)
    directions, atom_masses, members = [], [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if len(idx) == 1:
            d = units[idx[0]]
        else:
            q = np.round(units[idx], KEY_DECIMALS)
            idx = idx[np.lexsort(q.T[::-1])]
            anchor = units[idx[0]]
            sign = np.where(units[idx] @ anchor < 0, -1.0, 1.0)
            d = (masses[idx] * sign) @ units[idx]
            d = _orient((d / np.linalg.norm(d))[None, :])[0]
        directions.append(d)
        atom_masses.append(masses[idx].sum())
        members.append(np.sort(idx))
    if not directions:
        width = units.shape[1] if units.ndim == 2 else 0
        return np.zeros((0, width)), np.zeros(0), []
    directions = np.array(directions)
    q = np.round(directions, KEY_DECIMALS) + 0.0
    order = np.lexsort(q.T[::-1])
    return directions[order], np.array(atom_masses)[order], [members[i] for i in order]


@dataclass(frozen=True, eq=False)
class CanonicalSpectralMeasure:
    """Atoms of the symmetric spectral measure, antipodes identified.

    ``directions[i]`` is a unit vector over the times whose first nonzero
    coordinate is positive; ``masses[i]`` its mass.  Atoms are sorted by the
    12-decimal direction key.
    """

    alpha: float
    times: tuple[str, ...]
    directions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "directions", _readonly(self.directions))
        object.__setattr__(self, "masses", _readonly(self.masses))

    def __len__(self):
        return len(self.masses)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def keys(self) -> list[tuple[float, ...]]:
        return [direction_key(d) for d in self.directions]

    def atoms(self) -> list[tuple[tuple[float, ...], float]]:
        return [(tuple(d.tolist()), float(m)) for d, m in zip(self.directions, self.masses)]

    def to_rep(self, rep_type=None) -> _FiniteRep:
        """One point per atom: column ``direction * mass**(1/alpha)``, weight 1."""
        rep_type = rep_type or SpectralRep
        values = self.directions.T * self.masses ** (1.0 / self.alpha)
        return rep_type.from_arrays(
            self.alpha, values, points=[f"atom{i}" for i in range(len(self))], times=self.times
        )


def canonicalize(rep: _FiniteRep) -> CanonicalSpectralMeasure:
    """Canonical spectral measure of ``rep``.

    Each column ``v`` contributes mass ``mu_s * ||v||**alpha`` at ``+-v/||v||``;
    masses on a common direction are summed.  Two representations define the
    same process exactly when their canonical measures agree.

    Examples
    --------
    >>> rep = SpectralRep.from_arrays(1.0, [[1.0, -1.0], [1.0, -1.0]])
    >>> m = canonicalize(rep)
    >>> len(m), round(m.total_mass, 6)
    (1, 2.828427)
    """
    norms, units = _unit_columns(rep.values)
    masses = rep.weights * norms**rep.alpha
    directions, atom_masses, _ = _merge(units, masses)
    return CanonicalSpectralMeasure(rep.alpha, rep.times, directions, atom_masses)


def joint_atoms(measures: Sequence[CanonicalSpectralMeasure]):
    """Align the atoms of several canonical measures.

    Returns ``(directions, masses)`` where ``masses[i, k]`` is the mass that
    measure ``k`` puts on the shared direction ``directions[i]`` (zero if
    absent).
    """
    units = np.vstack([m.directions for m in measures])
    masses = np.concatenate([m.masses for m in measures])
    owner = np.concatenate([np.full(len(m), k) for k, m in enumerate(measures)])
    directions, _, members = _merge(units, masses)
    table = np.zeros((len(members), len(measures)))
    for i, idx in enumerate(members):
        np.add.at(table[i], owner[idx], masses[idx])
    return directions, table


def _check_compatible(reps: Sequence[_FiniteRep], check_alpha_match=True):
    first = reps[0]
    for r in reps[1:]:
        if r.times != first.times:
            raise TimesMismatch(f"times {r.times} differ from {first.times}")
        if check_alpha_match and r.alpha != first.alpha:
            raise AlphaMismatch(f"alpha {r.alpha} differs from {first.alpha}")


def same_process(rep_a: _FiniteRep, rep_b: _FiniteRep, tol: float = DEFAULT_TOL) -> bool:
    """Whether two representations define the same finite-dimensional laws.

    Atoms are matched by direction; masses must agree within ``tol`` times
    the larger total mass.
    """
    _check_compatible([rep_a, rep_b], check_alpha_match=False)
    if rep_a.alpha != rep_b.alpha:
        return False
    ma, mb = canonicalize(rep_a), canonicalize(rep_b)
    _, table = joint_atoms([ma, mb])
    scale = max(ma.total_mass, mb.total_mass)
    return bool(np.all(np.abs(table[:, 0] - table[:, 1]) <= tol * scale))


def disjoint_union(reps: Sequence[_FiniteRep]) -> _FiniteRep:
    """Representation of the sum of independent processes.

    Columns are concatenated; point labels become ``"k:label"``.
    """
    reps = list(reps)
    if not reps:
        raise ValidationError("disjoint_union needs at least one representation")
    _check_compatible(reps)
    first = reps[0]
    return type(first)(
        first.alpha,
        FinitePointSpace(
            tuple(f"{k}:{p}" for k, r in enumerate(reps) for p in r.points),
            np.concatenate([r.weights for r in reps]),
        ),
        first.times,
        np.hstack([r.values for r in reps]),
    )
