"""Command line interface.

    ccaqst analyze   --scenario FILE [--out FILE]
    ccaqst fidelity  --scenario FILE --out CURVE.csv [--threads N]
    ccaqst reproduce --figure fig1|fig2|fig3 --out DIR [--threads N]
    ccaqst verify    [--out REPORT.json] [--json] [--tolerance X] [--informational]

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 failed
verification.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from ccaqst import pgst
from ccaqst.errors import CcaError
from ccaqst.scenario import FIGURES, Scenario, figure_presets, load_preset, parse_scenario, preset_index

log = logging.getLogger("ccaqst")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


# -- output helpers -----------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def curve_csv(times, fidelities) -> str:
    lines = ["t,fidelity"]
    lines += [f"{_fmt(t)},{_fmt(f)}" for t, f in zip(times, fidelities)]
    return "\n".join(lines) + "\n"


def atomic_write(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_all(files: dict[Path, str]) -> None:
    """Write several files; on any failure remove the ones already written."""
    done = []
    try:
        for path, text in files.items():
            atomic_write(path, text)
            done.append(path)
    except BaseException:
        for path in done:
            path.unlink(missing_ok=True)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# -- commands ---------------------------------------------------------------


def analyze(scenario: Scenario) -> dict:
    """Length class, residual phase, transfer time and phase-matching
    frequencies for the scenario's coupling profile (searched at omega = 0)."""
    bare = scenario.array.with_omega(0.0)
    rule = scenario.omega_rule or {}
    t_max = rule.get("t_max", 5.0 * scenario.n)
    window = pgst.find_transfer_time(bare, t_max, grid=max(4000, int(40 * t_max)))
    gamma = pgst.gamma_for(scenario.n, window)
    return {
        "n": scenario.n,
        "length_class": pgst.classify_length(scenario.n).as_dict(),
        "gamma": gamma.as_json(),
        "tau": window.tau,
        "magnitude_at_tau": window.magnitude,
        "phase_at_tau": window.phase,
        "search_window": t_max,
        "recommended_omegas": pgst.recommended_omegas(window.tau, window.phase, 4),
    }


def fidelity_summary(scenario: Scenario, times, fidelities, setup=None) -> dict:
    fidelities = np.asarray(fidelities)
    best = int(np.argmax(fidelities))
    out = {"t_best": float(times[best]), "F_best": float(fidelities[best]), "omega": scenario.omega,
           "cutoff": scenario.cutoff}
    if scenario.tau is not None:
        setup = setup or scenario.setup()
        out["tau"] = scenario.tau
        out["F_at_requested_tau"] = setup.fidelity(scenario.tau)
    return out


def run_fidelity(scenario: Scenario, threads: int = 1):
    setup = scenario.setup()
    times = scenario.times()
    fids = setup.curve(times, threads)
    if not np.all(np.isfinite(fids)):
        raise CcaError("fidelity curve contains non-finite values")
    return times, fids, fidelity_summary(scenario, times, fids, setup)


def cmd_fidelity(scenario: Scenario, out: Path, threads: int = 1) -> dict:
    times, fids, summary = run_fidelity(scenario, threads)
    out = Path(out)
    write_all({out: curve_csv(times, fids), out.with_suffix(".json"): _dumps(summary)})
    return summary


def _figure_claims(figure: str, tau: float, curves: list[dict]) -> list[dict]:
    by_name = {c["name"]: c for c in curves}
    claims = []
    if figure in ("fig1", "fig2"):
        for c in curves:
            f = c["summary"]["F_at_requested_tau"]
            claims.append({"claim": f"{c['name']}: F(tau) >= 0.999", "value": f, "passed": f >= 0.999})
    else:
        for c in curves:
            if c["style"] == "solid":
                f = c["summary"]["F_at_requested_tau"]
                claims.append({"claim": f"{c['name']}: F(tau) >= 0.99", "value": f, "passed": f >= 0.99})
            else:
                mine = c["summary"]["F_at_requested_tau"]
                theirs = by_name[c["pair"]]["summary"]["F_at_requested_tau"]
                claims.append({"claim": f"{c['name']}: F(tau) < {c['pair']}", "value": mine,
                               "passed": mine < theirs})
    return claims


def cmd_reproduce(figure: str, out_dir: Path, threads: int = 1) -> dict:
    out_dir = Path(out_dir)
    entries = figure_presets(figure)
    tau = preset_index()[figure]["tau"]
    files = {}
    curves = []
    for entry in entries:
        scenario = load_preset(entry["name"])
        times, fids, summary = run_fidelity(scenario, threads)
        csv_name = f"{entry['name']}.csv"
        files[out_dir / csv_name] = curve_csv(times, fids)
        curves.append({**entry, "csv": csv_name, "scenario": scenario.to_dict(), "summary": summary})
        log.info("%s: F(%g) = %.6f", entry["name"], tau, summary["F_at_requested_tau"])
    manifest = {"figure": figure, "tau": tau, "curves": curves, "claims": _figure_claims(figure, tau, curves)}
    files[out_dir / f"{figure}_manifest.json"] = _dumps(manifest)
    write_all(files)
    return manifest


def load_manifest(path) -> list[Scenario]:
    from ccaqst.scenario import parse_scenario_dict

    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return [parse_scenario_dict(c["scenario"]) for c in doc["curves"]]


def cmd_verify(tolerance=None, mutation=None, seed=0):
    from ccaqst.verify import run_checks

    results = run_checks(seed=seed, mutation=mutation, tolerance=tolerance)
    report = {"passed": all(r.passed for r in results), "checks": [r.as_dict() for r in results]}
    return results, report


def _verify_table(results) -> str:
    width = max(len(r.name) for r in results)
    rows = [f"{'check':<{width}}  {'deviation':>10}  {'tolerance':>10}  result"]
    for r in results:
        rows.append(f"{r.name:<{width}}  {r.deviation:10.3e}  {r.tolerance:10.3e}  {'PASS' if r.passed else 'FAIL'}")
    return "\n".join(rows)


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccaqst", description="Photon state transfer along cavity arrays")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="length condition, transfer time, phase and frequencies")
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("fidelity", help="fidelity curve of one scenario (CSV + JSON summary)")
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("reproduce", help="write the curves of one figure preset")
    p.add_argument("--figure", required=True, choices=FIGURES)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("verify", help="run the cross-check suite")
    p.add_argument("--out", type=Path, help="also write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    p.add_argument("--tolerance", type=float, help="hold every check to this tolerance instead")
    p.add_argument("--informational", action="store_true", help="always exit 0")
    p.add_argument("--mutate", choices=("reversed-couplings",), help=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        if args.command == "analyze":
            report = analyze(parse_scenario(args.scenario))
            text = _dumps(report)
            if args.out:
                atomic_write(args.out, text)
            sys.stdout.write(text)
        elif args.command == "fidelity":
            summary = cmd_fidelity(parse_scenario(args.scenario), args.out, args.threads)
            sys.stdout.write(_dumps(summary))
        elif args.command == "reproduce":
            manifest = cmd_reproduce(args.figure, args.out, args.threads)
            for claim in manifest["claims"]:
                mark = "ok " if claim["passed"] else "NO "
                print(f"{mark} {claim['claim']}  ({claim['value']:.6f})")
        else:
            results, report = cmd_verify(args.tolerance, args.mutate, args.seed)
            if args.out:
                atomic_write(args.out, _dumps(report))
            print(_dumps(report) if args.json else _verify_table(results))
            if not report["passed"] and not args.informational:
                failed = ", ".join(r.name for r in results if not r.passed)
                print(f"verification failed: {failed}", file=sys.stderr)
                return EXIT_VERIFY
    except CcaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
