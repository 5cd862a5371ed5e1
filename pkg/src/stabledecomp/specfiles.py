"""Reading input documents and writing reports.

Inputs are JSON objects with a ``kind`` field; the JSON Schema for every kind
ships in ``schemas/spec_files.json``.  Point and time labels are join keys:
``f``, ``mu``, ``r`` and friends are objects keyed by label, and missing
entries of ``f`` or ``r`` mean zero.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Any

import jsonschema
import numpy as np

from .core import FinitePointSpace, SpectralRep
from .decompose import WeightFamily, independent_increments_rep
from .errors import StableDecompError, ValidationError, WeightNormViolation
from .maxstable import MaxStableRep
from .stationary import FlowAction, StationaryProcessSpec, mma_build

KINDS = ("sas_rep", "max_rep", "weights", "flow_spec", "mma_spec", "increments")


class SchemaError(ValidationError):
    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class DanglingLabel(ValidationError):
    def __init__(self, label, where=None):
        msg = f"unknown label {label!r}" + (f" in {where}" if where else "")
        super().__init__(msg)
        self.label = label


class IoError(StableDecompError, OSError):
    pass


def _schemas() -> dict:
    text = resources.files("stabledecomp").joinpath("schemas/spec_files.json").read_text()
    return json.loads(text)


_SCHEMA_CACHE: dict = {}


def schema_for(kind: str) -> dict:
    if not _SCHEMA_CACHE:
        root = _schemas()
        for k, sub in root["kinds"].items():
            _SCHEMA_CACHE[k] = {"$defs": root["$defs"], **sub}
    return _SCHEMA_CACHE[kind]


@dataclass(frozen=True)
class Weights:
    """A parsed weights document: component names and a family over ``points``."""

    alpha: float
    points: tuple[str, ...]
    names: tuple[str, ...]
    family: WeightFamily

    def aligned(self, points) -> WeightFamily:
        """The family reordered to ``points``; labels must match exactly."""
        extra = set(self.points) - set(points)
        if extra:
            raise DanglingLabel(sorted(extra)[0], "weights points")
        missing = set(points) - set(self.points)
        if missing:
            raise SchemaError(f"no weights for point {sorted(missing)[0]!r}", "points")
        idx = [self.points.index(p) for p in points]
        return WeightFamily(self.family.r[:, idx])


@dataclass(frozen=True)
class SpecFile:
    kind: str
    document: dict
    value: Any
    sha256: str


def _reject_constant(name):
    raise SchemaError(f"non-finite number {name} is not allowed")


def _check_keys(mapping: dict, allowed, where: str):
    allowed = set(allowed)
    for key in mapping:
        if key not in allowed:
            raise DanglingLabel(key, where)


def _matrix(doc, times, points, where="f") -> np.ndarray:
    f = doc["f"]
    _check_keys(f, times, where)
    values = np.zeros((len(times), len(points)))
    col = {p: i for i, p in enumerate(points)}
    for j, t in enumerate(times):
        row = f.get(t, {})
        _check_keys(row, points, f"{where}[{t!r}]")
        for p, v in row.items():
            values[j, col[p]] = v
    return values


def _posvec(mapping, labels, where) -> np.ndarray:
    _check_keys(mapping, labels, where)
    missing = [p for p in labels if p not in mapping]
    if missing:
        raise SchemaError(f"missing entry for {missing[0]!r}", where)
    return np.array([mapping[p] for p in labels], dtype=float)


def _build_rep(doc, cls):
    points, times = doc["points"], doc["times"]
    return cls(
        doc["alpha"],
        FinitePointSpace(tuple(points), _posvec(doc["mu"], points, "mu")),
        tuple(times),
        _matrix(doc, times, points),
    )


def _build_weights(doc) -> Weights:
    points = tuple(doc["points"])
    names = tuple(doc["r"])
    r = np.zeros((len(names), len(points)))
    col = {p: i for i, p in enumerate(points)}
    for k, name in enumerate(names):
        row = doc["r"][name]
        _check_keys(row, points, f"r[{name!r}]")
        for p, v in row.items():
            r[k, col[p]] = v
    family = WeightFamily(r)
    try:
        family.check(doc["alpha"], points)
    except WeightNormViolation as exc:
        raise SchemaError(str(exc), f"r (point {exc.point!r})") from None
    return Weights(float(doc["alpha"]), points, names, family)


def _build_flow(doc) -> StationaryProcessSpec:
    points = list(doc["points"])
    idx = {p: i for i, p in enumerate(points)}
    torus = tuple(doc["torus"])
    if len(doc["phi"]) != len(torus):
        raise SchemaError(f"{len(doc['phi'])} generators for a {len(torus)}-d torus", "phi")
    gens = []
    for i, mapping in enumerate(doc["phi"]):
        _check_keys(mapping, points, f"phi[{i}]")
        _check_keys({v: None for v in mapping.values()}, points, f"phi[{i}] values")
        gens.append(np.array([idx[mapping.get(p, p)] for p in points]))
    cocycles = None
    if "cocycle" in doc:
        if len(doc["cocycle"]) != len(torus):
            raise SchemaError("one cocycle object per generator is required", "cocycle")
        cocycles = []
        for i, mapping in enumerate(doc["cocycle"]):
            _check_keys(mapping, points, f"cocycle[{i}]")
            cocycles.append(np.array([mapping.get(p, 1) for p in points], dtype=float))
    _check_keys(doc["f0"], points, "f0")
    f0 = np.array([doc["f0"].get(p, 0.0) for p in points])
    space = FinitePointSpace(tuple(points), _posvec(doc["mu"], points, "mu"))
    return StationaryProcessSpec(doc["alpha"], FlowAction(torus, tuple(gens), cocycles, space), f0)


def _build_mma(doc) -> StationaryProcessSpec:
    torus = tuple(doc["torus"])
    sheets = list(doc["nu"])
    _check_keys(doc["kernel"], sheets, "kernel")
    size = int(np.prod(torus))
    cols = []
    for v in sheets:
        if v not in doc["kernel"]:
            raise SchemaError(f"missing kernel for sheet {v!r}", "kernel")
        k = np.asarray(doc["kernel"][v], dtype=float)
        if k.size != size:
            raise SchemaError(f"kernel {v!r} has {k.size} values, torus has {size}", "kernel")
        cols.append(k.reshape(torus))
    kernel = np.stack(cols, axis=-1)
    return mma_build(kernel, _posvec(doc["nu"], sheets, "nu"), doc["alpha"], sheets)


_BUILDERS = {
    "sas_rep": lambda d: _build_rep(d, SpectralRep),
    "max_rep": lambda d: _build_rep(d, MaxStableRep),
    "weights": _build_weights,
    "flow_spec": _build_flow,
    "mma_spec": _build_mma,
    "increments": lambda d: independent_increments_rep(d["times"], d["m"], d["alpha"]),
}


def load_document(text: str, source: str = "<string>") -> SpecFile:
    """Parse and validate a document held in memory."""
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}: {exc.msg}", source) from None
    if not isinstance(doc, dict) or doc.get("kind") not in KINDS:
        raise SchemaError(f"'kind' must be one of {', '.join(KINDS)}", "kind")
    validator = jsonschema.Draft202012Validator(schema_for(doc["kind"]))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        field = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(err.message, field)
    value = _BUILDERS[doc["kind"]](doc)
    digest = hashlib.sha256(text.encode()).hexdigest()
    return SpecFile(doc["kind"], doc, value, digest)


def parse_spec_file(path) -> SpecFile:
    """Read, schema-check and build the object described by a document.

    Raises
    ------
    IoError
        The file cannot be read.
    SchemaError
        The document does not match the schema of its kind, or a weights
        document violates ``sum_k |r_k|^alpha = 1``.
    DanglingLabel
        A point or time label that the document does not declare.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror}") from None
    return load_document(text, str(path))


# --- reports -----------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.12g}") + 0.0
    return obj


def dump_report(report: dict) -> str:
    """Deterministic text of a report: sorted keys, 12 significant digits."""
    return json.dumps(_clean(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
