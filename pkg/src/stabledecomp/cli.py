"""Command-line front end.

Every command reads JSON documents (see ``schemas/spec_files.json``), prints
one JSON report on stdout and exits with

    0  true / success
    1  false / negative verdict (including "not a component")
    2  input error
    3  internal invariant breach

The default tolerance can be overridden with ``STABLEDECOMP_TOL``.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .core import DEFAULT_TOL, canonicalize, direction_key, same_process
from .decompose import (
    common_component,
    has_independent_increments,
    is_minimal,
    make_components,
    minimalize,
    recover_weights,
    verify_decomposition,
)
from .errors import InvarianceViolation, NotAComponent, NotStationary, StableDecompError, ValidationError
from .maxstable import (
    MaxStableRep,
    frechet_fdd_cdf,
    is_indecomposable_max,
    make_max_components,
    max_same_process,
    recover_max_weights,
    verify_max_decomposition,
)
from .simulate import (
    SimulationConfig,
    check_empirical_cdf,
    check_empirical_cf,
    random_cdf_probes,
    random_cf_probes,
    sample_frechet,
    sample_sas,
)
from .specfiles import SchemaError, dump_report, parse_spec_file
from .stationary import (
    build_flow_rep,
    ergodic_decomposition,
    is_indecomposable,
    is_stationary,
)

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
TOL_ENV = "STABLEDECOMP_TOL"


class UnknownCommand(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UnknownCommand(message)


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise SchemaError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise SchemaError(f"{TOL_ENV} must be positive")
    return tol


class _Run:
    """Collects inputs for the report while a command runs."""

    def __init__(self, args):
        self.args = args
        self.inputs = {}

    def load(self, role, path, kinds):
        spec = parse_spec_file(path)
        if spec.kind not in kinds:
            raise SchemaError(f"expected a {' or '.join(kinds)} document, got {spec.kind}", role)
        self.inputs[role] = {"kind": spec.kind, "sha256": spec.sha256}
        return spec

    def load_rep(self, role, path, kinds=("sas_rep", "max_rep")):
        return self.load(role, path, kinds).value


def _atoms_payload(measure):
    return {
        "alpha": measure.alpha,
        "times": list(measure.times),
        "total_mass": measure.total_mass,
        "atoms": [
            {"direction": list(direction_key(d)), "mass": m}
            for d, m in zip(measure.directions, measure.masses)
        ],
    }


def _rep_payload(rep):
    return {
        "kind": "max_rep" if isinstance(rep, MaxStableRep) else "sas_rep",
        "alpha": rep.alpha,
        "points": list(rep.points),
        "mu": dict(zip(rep.points, rep.weights)),
        "times": list(rep.times),
        "f": {t: {p: v for p, v in zip(rep.points, row) if v != 0} for t, row in zip(rep.times, rep.values)},
    }


def _same_kind(a, b):
    if type(a) is not type(b):
        raise SchemaError("both processes must be of the same kind (sas_rep or max_rep)")


def _components(run, rep):
    args = run.args
    if bool(args.components) == bool(args.weights):
        raise SchemaError("give exactly one of --components or --weights")
    if args.weights:
        w = run.load("weights", args.weights, ("weights",)).value
        family = w.aligned(rep.points)
        if isinstance(rep, MaxStableRep):
            return make_max_components(rep, family)
        return make_components(rep, family)
    comps = [run.load_rep(f"component[{i}]", p) for i, p in enumerate(args.components)]
    for c in comps:
        _same_kind(rep, c)
    return comps


# --- commands -----------------------------------------------------------------


def cmd_canon(run):
    rep = run.load_rep("process", run.args.process)
    return EXIT_TRUE, "ok", _atoms_payload(canonicalize(rep))


def cmd_same(run):
    a = run.load_rep("process", run.args.process)
    b = run.load_rep("other", run.args.other)
    _same_kind(a, b)
    fn = max_same_process if isinstance(a, MaxStableRep) else same_process
    verdict = fn(a, b, run.args.tol)
    return (EXIT_TRUE if verdict else EXIT_FALSE), verdict, {"tol": run.args.tol}


def cmd_verify_decomp(run):
    rep = run.load_rep("process", run.args.process, ("sas_rep",))
    comps = _components(run, rep)
    verdict = verify_decomposition(rep, comps, run.args.tol)
    return (EXIT_TRUE if verdict else EXIT_FALSE), verdict, {"n_components": len(comps), "tol": run.args.tol}


def cmd_verify_max_decomp(run):
    rep = run.load_rep("process", run.args.process, ("max_rep",))
    comps = _components(run, rep)
    verdict = verify_max_decomposition(rep, comps, run.args.tol)
    return (EXIT_TRUE if verdict else EXIT_FALSE), verdict, {"n_components": len(comps), "tol": run.args.tol}


def cmd_recover_weights(run):
    rep = run.load_rep("process", run.args.process)
    comp = run.load_rep("component", run.args.component)
    _same_kind(rep, comp)
    fn = recover_max_weights if isinstance(rep, MaxStableRep) else recover_weights
    try:
        r = fn(rep, comp, run.args.tol)
    except NotAComponent as exc:
        return EXIT_FALSE, "not_a_component", {
            "reason": exc.reason,
            "direction": list(direction_key(exc.direction)),
        }
    return EXIT_TRUE, "component", {"r": dict(zip(rep.points, r))}


def cmd_common(run):
    a = run.load_rep("process", run.args.process)
    b = run.load_rep("other", run.args.other)
    _same_kind(a, b)
    c = common_component(a, b, run.args.tol)
    if c is None:
        return EXIT_FALSE, "none", {"common": None}
    return EXIT_TRUE, "found", {"common": _atoms_payload(canonicalize(c))}


def cmd_minimal(run):
    rep = run.load_rep("process", run.args.process)
    minimal, partition = minimalize(rep)
    flag = is_minimal(rep)
    return (EXIT_TRUE if flag else EXIT_FALSE), flag, {
        "partition": [list(b) for b in partition.blocks],
        "minimal": _rep_payload(minimal),
    }


def _load_flow(run):
    spec = run.load("flow", run.args.flow, ("flow_spec", "mma_spec")).value
    return spec


def cmd_stationary(run):
    if bool(run.args.process) == bool(run.args.flow):
        raise SchemaError("give exactly one of --process or --flow")
    rep = run.load_rep("process", run.args.process, ("sas_rep",)) if run.args.process else build_flow_rep(_load_flow(run))
    verdict = is_stationary(rep, run.args.tol)
    return (EXIT_TRUE if verdict else EXIT_FALSE), verdict, {"times": list(rep.times)}


def cmd_indecomposable(run):
    spec = _load_flow(run)
    fn = is_indecomposable_max if run.args.max else is_indecomposable
    v = fn(spec, run.args.tol)
    return (EXIT_TRUE if v.indecomposable else EXIT_FALSE), (
        "indecomposable" if v.indecomposable else "decomposable"
    ), {
        "classes": [list(c) for c in v.classes],
        "witness": None if v.witness is None else list(v.witness),
    }


def cmd_ergodic_decomp(run):
    spec = _load_flow(run)
    parts = ergodic_decomposition(spec)
    rep = build_flow_rep(spec)
    comps = [build_flow_rep(p) for p in parts]
    verified = verify_decomposition(rep, comps, run.args.tol)
    components = []
    for p in parts:
        v = is_indecomposable(p, run.args.tol)
        components.append({"points": list(p.flow.points), "indecomposable": v.indecomposable})
    if not verified or not all(c["indecomposable"] for c in components):
        raise InvarianceViolation("orbit decomposition failed verification")
    return EXIT_TRUE, "ok", {"components": components, "verified": verified}


def cmd_max_cdf(run):
    rep = run.load_rep("process", run.args.process, ("max_rep",))
    if len(run.args.times) != len(run.args.y):
        raise SchemaError("--times and --y must have the same length")
    p = frechet_fdd_cdf(rep, run.args.times, run.args.y)
    return EXIT_TRUE, "ok", {"times": run.args.times, "y": run.args.y, "probability": p}


def cmd_simulate(run):
    args = run.args
    rep = run.load_rep("process", args.process)
    cfg = SimulationConfig(args.seed, args.samples, chunk_size=args.chunk_size)
    is_max = isinstance(rep, MaxStableRep)
    samples = (sample_frechet if is_max else sample_sas)(rep, cfg)
    qs = [0.1, 0.25, 0.5, 0.75, 0.9]
    payload = {
        "seed": args.seed,
        "samples": args.samples,
        "sampler": samples.kind,
        "quantiles": {
            t: dict(zip([str(q) for q in qs], np.quantile(samples.values[:, j], qs)))
            for j, t in enumerate(rep.times)
        },
    }
    ok = True
    rng = np.random.default_rng([args.seed, 0x5EED])
    if args.check_cf:
        if is_max:
            raise SchemaError("--check-cf needs an sas_rep process")
        rpt = check_empirical_cf(samples, rep, random_cf_probes(rep, args.probes, rng), args.level)
        payload["check_cf"] = {
            "envelope": rpt.envelope,
            "max_deviation": rpt.deviations.max(),
            "flagged": int(rpt.flagged.sum()),
            "passed": rpt.passed,
        }
        ok &= rpt.passed
    if args.check_cdf:
        if not is_max:
            raise SchemaError("--check-cdf needs a max_rep process")
        rpt = check_empirical_cdf(samples, rep, random_cdf_probes(rep, args.probes, rng), args.level)
        payload["check_cdf"] = {
            "flagged": int(rpt.flagged.sum()),
            "max_deviation": np.abs(rpt.empirical - rpt.expected).max(),
            "ks_pvalues": dict(zip(rep.times, rpt.ks_pvalues)),
            "passed": rpt.passed,
        }
        ok &= rpt.passed
    return (EXIT_TRUE if ok else EXIT_FALSE), ("pass" if ok else "fail"), payload


def cmd_increments(run):
    args = run.args
    if bool(args.spec) == bool(args.process):
        raise SchemaError("give exactly one of --spec or --process")
    if args.spec:
        rep = run.load("spec", args.spec, ("increments",)).value
    else:
        rep = run.load_rep("process", args.process, ("sas_rep",))
    flag = has_independent_increments(rep)
    payload = {"process": _rep_payload(rep), "independent_increments": flag}
    if args.weights:
        w = run.load("weights", args.weights, ("weights",)).value
        comps = make_components(rep, w.aligned(rep.points))
        payload["components"] = {
            name: has_independent_increments(c) if c.n_points else True for name, c in zip(w.names, comps)
        }
        flag = flag and all(payload["components"].values())
    return (EXIT_TRUE if flag else EXIT_FALSE), flag, payload


COMMANDS = {
    "canon": cmd_canon,
    "same": cmd_same,
    "verify-decomp": cmd_verify_decomp,
    "recover-weights": cmd_recover_weights,
    "common": cmd_common,
    "minimal": cmd_minimal,
    "stationary": cmd_stationary,
    "indecomposable": cmd_indecomposable,
    "ergodic-decomp": cmd_ergodic_decomp,
    "max-cdf": cmd_max_cdf,
    "verify-max-decomp": cmd_verify_max_decomp,
    "simulate": cmd_simulate,
    "increments": cmd_increments,
}


def build_parser(tol_default: float) -> argparse.ArgumentParser:
    parser = _Parser(prog="stabledecomp", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--tol", type=float, default=tol_default)
        return p

    add("canon", "print the canonical spectral measure").add_argument("--process", required=True)
    for name, help_ in [("same", "equality in distribution"), ("common", "largest common component")]:
        p = add(name, help_)
        p.add_argument("--process", required=True)
        p.add_argument("--other", required=True)
    for name in ("verify-decomp", "verify-max-decomp"):
        p = add(name, "check an independent " + ("max decomposition" if "max" in name else "sum decomposition"))
        p.add_argument("--process", required=True)
        p.add_argument("--components", nargs="+")
        p.add_argument("--weights")
    p = add("recover-weights", "unique weights of a component")
    p.add_argument("--process", required=True)
    p.add_argument("--component", required=True)
    add("minimal", "test minimality and minimalize").add_argument("--process", required=True)
    p = add("stationary", "shift invariance on a torus index")
    p.add_argument("--process")
    p.add_argument("--flow")
    p = add("indecomposable", "indecomposability of a flow-generated process")
    p.add_argument("--flow", required=True)
    p.add_argument("--max", action="store_true", help="treat the flow as a max-stable process")
    add("ergodic-decomp", "split a measure-preserving flow into orbits").add_argument("--flow", required=True)
    p = add("max-cdf", "joint CDF of a max-stable process")
    p.add_argument("--process", required=True)
    p.add_argument("--times", nargs="+", required=True)
    p.add_argument("--y", nargs="+", type=float, required=True)
    p = add("simulate", "sample a process, optionally checking the exact law")
    p.add_argument("--process", required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chunk-size", type=int, default=65536)
    p.add_argument("--check-cf", action="store_true")
    p.add_argument("--check-cdf", action="store_true")
    p.add_argument("--probes", type=int, default=50)
    p.add_argument("--level", type=float, default=0.01)
    p = add("increments", "independent-increments representation and checks")
    p.add_argument("--spec")
    p.add_argument("--process")
    p.add_argument("--weights")
    return parser


def run_command(argv) -> tuple[int, str]:
    """Run one command; returns ``(exit_code, report_text)``."""
    command = argv[0] if argv else None
    run = None
    try:
        parser = build_parser(_default_tol())
        args = parser.parse_args(argv)
        command = args.command
        run = _Run(args)
        code, verdict, payload = COMMANDS[command](run)
        report = {"verdict": verdict, "payload": payload}
    except InvarianceViolation as exc:
        code, report = EXIT_INTERNAL, _error(exc)
    except (ValidationError, NotStationary) as exc:
        code, report = EXIT_INPUT, _error(exc)
    except StableDecompError as exc:
        code, report = EXIT_INPUT, _error(exc)
    except Exception as exc:  # report, never crash
        code, report = EXIT_INTERNAL, _error(exc)
    report.update(
        command=command,
        inputs=run.inputs if run else {},
        tool={"name": "stabledecomp", "version": __version__},
    )
    return code, dump_report(report)


def _error(exc) -> dict:
    return {"verdict": "error", "error": {"type": type(exc).__name__, "detail": str(exc)}}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ("-h", "--help", "--version"):
        build_parser(DEFAULT_TOL).parse_args(argv)
    code, text = run_command(argv)
    sys.stdout.write(text)
    if code >= EXIT_INPUT:
        sys.stderr.write(f"stabledecomp: exit {code}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
