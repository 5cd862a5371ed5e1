"""
The command-line front end
==========================

Every command reads JSON documents and prints a deterministic JSON report.
This runs a few commands on the fixtures shipped with the test suite.
"""

from pathlib import Path

from stabledecomp.cli import run_command

fixtures = Path(__file__).resolve().parent.parent / "tests" / "golden" / "fixtures"

for argv in [
    ["canon", "--process", str(fixtures / "x.json")],
    ["verify-decomp", "--process", str(fixtures / "x.json"),
     "--components", str(fixtures / "comp_a.json"), str(fixtures / "comp_b.json")],
    ["recover-weights", "--process", str(fixtures / "x.json"), "--component", str(fixtures / "foreign.json")],
    ["indecomposable", "--flow", str(fixtures / "torus12.json")],
]:
    code, report = run_command(argv)
    print("$ stabledecomp", argv[0], "-> exit", code)
    print(report)
