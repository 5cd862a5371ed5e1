"""alpha-Frechet (max-stable) processes on finite spaces.

``Y_t = max_s f_t(s) * (mu_s / E_s)**(1/alpha)`` with nonnegative spectral
functions.  An SaS process and an alpha-Frechet process sharing a
nonnegative representation are associated, and representations of one are
representations of the other, so every question about max decompositions
is answered on the SaS side.  For ``alpha >= 2`` the bridge first passes to
``Y**alpha``, a 1-Frechet process with spectral functions ``f**alpha``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import DEFAULT_TOL, SpectralRep, _FiniteRep, _check_compatible, disjoint_union, same_process
from .decompose import WeightFamily, recover_weights
from .errors import (
    AlphaOutOfRange,
    DimensionMismatch,
    NegativeEntry,
    NonPositiveThreshold,
    ValidationError,
)
from .stationary import IndecomposabilityVerdict, StationaryProcessSpec, is_indecomposable


class MaxStableRep(_FiniteRep):
    """Extremal representation of an alpha-Frechet process.

    Same layout as :class:`~stabledecomp.core.SpectralRep`; entries must be
    nonnegative and any ``alpha > 0`` is allowed.
    """

    def _check_alpha(self, alpha):
        a = float(alpha)
        if not (a > 0 and np.isfinite(a)):
            raise AlphaOutOfRange(f"alpha must be positive, got {alpha!r}")
        return a

    def _check_values(self, values):
        if np.any(values < 0):
            j, s = np.argwhere(values < 0)[0]
            raise NegativeEntry(f"f_{self.times[j]}({self.space.points[s]}) = {values[j, s]!r} < 0")


def _time_rows(rep, subset: Sequence[str]) -> list[int]:
    try:
        return [rep.times.index(str(t)) for t in subset]
    except ValueError as exc:
        raise ValidationError(f"unknown time label in {list(subset)}") from exc


def frechet_fdd_cdf(rep: MaxStableRep, subset: Sequence[str], y) -> float:
    """``P(Y_{t_i} <= y_i for all i) = exp(-sum_s max_i (f_{t_i}(s)/y_i)**alpha mu_s)``.

    ``y`` may contain ``inf``.
    """
    y = np.asarray(y, dtype=float)
    rows = _time_rows(rep, subset)
    if y.shape != (len(rows),):
        raise DimensionMismatch(f"{len(rows)} times but thresholds of shape {y.shape}")
    if np.any(~(y > 0)):
        raise NonPositiveThreshold("thresholds must be positive")
    ratio = rep.values[rows] / y[:, None]
    return float(np.exp(-(ratio.max(axis=0) ** rep.alpha) @ rep.weights))


def marginal_scale(rep: _FiniteRep) -> np.ndarray:
    """``sigma_t**alpha = sum_s |f_t(s)|**alpha mu_s`` for every time."""
    return (np.abs(rep.values) ** rep.alpha) @ rep.weights


def associate(rep: SpectralRep) -> MaxStableRep:
    """The alpha-Frechet process sharing the nonnegative representation ``rep``."""
    return MaxStableRep(rep.alpha, rep.space, rep.times, rep.values)


def deassociate(rep: MaxStableRep) -> SpectralRep:
    """The SaS process sharing ``rep``; needs ``alpha < 2``."""
    return SpectralRep(rep.alpha, rep.space, rep.times, rep.values)


def alpha_power_transform(rep: MaxStableRep) -> MaxStableRep:
    """Representation of the 1-Frechet process ``Y**alpha``."""
    return MaxStableRep(1.0, rep.space, rep.times, rep.values**rep.alpha)


def _bridge(rep: MaxStableRep) -> SpectralRep:
    if rep.alpha >= 2:
        rep = alpha_power_transform(rep)
    return deassociate(rep)


def max_same_process(rep_a: MaxStableRep, rep_b: MaxStableRep, tol: float = DEFAULT_TOL) -> bool:
    _check_compatible([rep_a, rep_b], check_alpha_match=False)
    if rep_a.alpha != rep_b.alpha:
        return False
    return same_process(_bridge(rep_a), _bridge(rep_b), tol)


def make_max_components(rep: MaxStableRep, w: WeightFamily) -> list:
    """Components ``r_k f`` for weights in ``[0, 1]`` with ``sum_k r_k**alpha = 1``."""
    if np.any(w.r < 0):
        raise ValidationError("max-stable component weights must be nonnegative")
    w.check(rep.alpha, rep.points)
    return [rep.scale_columns(r) for r in w.r]


def verify_max_decomposition(rep: MaxStableRep, comps: Sequence[MaxStableRep], tol: float = DEFAULT_TOL) -> bool:
    """Whether the pointwise maximum of independent ``comps`` equals ``rep`` in law."""
    comps = list(comps)
    if not comps:
        raise ValidationError("no components given")
    _check_compatible([rep, *comps])
    return max_same_process(rep, disjoint_union(comps), tol)


def recover_max_weights(rep: MaxStableRep, component: MaxStableRep, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unique block-constant weights in ``[0, 1]`` with ``component = r f``."""
    _check_compatible([rep, component])
    r = recover_weights(_bridge(rep), _bridge(component), tol)
    if rep.alpha >= 2:
        r = r ** (1.0 / rep.alpha)
    return np.clip(r, 0.0, 1.0)


def build_max_flow_rep(spec: StationaryProcessSpec) -> MaxStableRep:
    """Stationary alpha-Frechet representation generated by ``spec``.

    Requires ``f0 >= 0`` and a trivial cocycle.
    """
    _check_max_spec(spec)
    return MaxStableRep(spec.alpha, spec.flow.space, spec.times, spec.flow_values())


def _check_max_spec(spec: StationaryProcessSpec):
    if np.any(spec.f0 < 0):
        raise NegativeEntry("f0 must be nonnegative for a max-stable flow")
    if any(np.any(c != 1) for c in spec.flow.cocycles):
        raise ValidationError("max-stable flows need a trivial cocycle")


def is_indecomposable_max(spec: StationaryProcessSpec, tol: float = DEFAULT_TOL) -> IndecomposabilityVerdict:
    """Indecomposability of the stationary alpha-Frechet process of ``spec``."""
    _check_max_spec(spec)
    if spec.alpha >= 2:
        spec = StationaryProcessSpec(1.0, spec.flow, spec.f0**spec.alpha)
    return is_indecomposable(spec, tol)
