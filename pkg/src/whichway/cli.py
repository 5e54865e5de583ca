"""Command-line front end: ``whichway run | histories | basis | show``.

Exit codes: 0 success, 2 parse or validation error, 3 conditioning on a
zero-probability outcome, 4 engines disagree beyond ``--tol``.
Set ``OXP_COLOR=0`` to suppress ANSI colour.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dsl
from .errors import BadCoefficients, BadParams, GraphError, NoBornRealization, ParseError, UnknownStation, ZeroProbabilityCondition
from .histories import enumerate_histories
from .measurement_basis import BELL_CONFIG, INPUTS, InterferometerConfig, detector_kets, wz_basis
from .probability import ZERO_TOL, condition, joint_distribution, marginalize
from .scenarios import PARAMETERS, SCENARIOS, build
from .statevector import born_distribution, gram_residual

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ZERO_CONDITION = 3
EXIT_ENGINE_MISMATCH = 4

_PARAM_FLAGS = sorted({p for ps in PARAMETERS.values() for p in ps})


class _Colour:
    def __init__(self, stream):
        env = os.environ.get("OXP_COLOR", "").lower()
        if env in ("0", "no", "never", "off", "false"):
            self.on = False
        elif env in ("1", "yes", "always", "on", "true"):
            self.on = True
        else:
            self.on = hasattr(stream, "isatty") and stream.isatty()

    def __call__(self, text: str, code: str) -> str:
        return f"\x1b[{code}m{text}\x1b[0m" if self.on else text


def _add_input(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", choices=sorted(SCENARIOS))
    src.add_argument("--file", help="path to an .oxp experiment description")
    for name in _PARAM_FLAGS:
        p.add_argument(f"--{name}", type=float, default=None)


def _graph(args):
    if args.file:
        given = [n for n in _PARAM_FLAGS if getattr(args, n) is not None]
        if given:
            raise BadParams(f"parameters {given} only apply to --scenario")
        return dsl.load(args.file)
    params = {n: getattr(args, n) for n in _PARAM_FLAGS if getattr(args, n) is not None}
    return build(args.scenario, **params)


def _parse_assignments(items) -> dict[str, str]:
    """Accept ``A=W``, ``W_A`` and comma-separated lists of either."""
    out: dict[str, str] = {}
    for item in items or ():
        for part in filter(None, (s.strip() for s in item.split(","))):
            if "=" in part:
                station, label = part.split("=", 1)
            elif "_" in part:
                label, station = part.rsplit("_", 1)
            else:
                raise BadParams(f"cannot read {part!r}; use STATION=LABEL or LABEL_STATION")
            if station in out and out[station] != label:
                raise BadParams(f"station {station} given two labels")
            out[station] = label
    return out


def _check_labels(graph, assignment) -> None:
    for st, lab in assignment.items():
        if st not in graph.stations:
            raise UnknownStation(st)
        if lab not in graph.station_labels(st):
            raise BadParams(f"station {st} has no outcome {lab!r}; choose from {graph.station_labels(st)}")


def _fmt(x: float) -> str:
    return f"{x:.12f}"


def _print_table(headers, rows, out) -> None:
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h)) for i, h in enumerate(headers)]
    print("  ".join(str(h).ljust(w) for h, w in zip(headers, widths)), file=out)
    for r in rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(r, widths)), file=out)


def cmd_run(args, out, err) -> int:
    graph = _graph(args)
    cond = _parse_assignments(args.condition)
    _check_labels(graph, cond)
    keep = [s for m in args.marginalize or () for s in m.split(",") if s]
    dists = {}
    if args.engine in ("paths", "both"):
        dists["paths"] = joint_distribution(graph)
    if args.engine in ("born", "both"):
        dists["born"] = born_distribution(graph)
    for k, d in list(dists.items()):
        if cond:
            d = condition(d, cond)
        if keep:
            d = marginalize(d, keep)
        dists[k] = d
    ref = next(iter(dists.values()))
    outcomes = ref.outcomes()
    max_diff = None
    if args.engine == "both":
        max_diff = max((abs(dists["paths"][oc] - dists["born"][oc]) for oc in outcomes), default=0.0)
    forbidden = ref.forbidden(ZERO_TOL)

    if args.format == "json":
        rows = []
        for oc in outcomes:
            row = {"outcome": ref.as_dict(oc)}
            for k, d in dists.items():
                row[f"p_{k}"] = d[oc]
            if max_diff is not None:
                row["diff"] = abs(dists["paths"][oc] - dists["born"][oc])
            rows.append(row)
        doc = {"stations": list(ref.stations), "engine": args.engine, "condition": cond, "rows": rows,
               "total": ref.total(), "forbidden": [ref.as_dict(oc) for oc in forbidden]}
        if max_diff is not None:
            doc["max_diff"] = max_diff
            doc["tol"] = args.tol
        print(json.dumps(doc, indent=2), file=out)
    else:
        colour = _Colour(out)
        headers = list(ref.stations) + [f"P[{k}]" for k in dists] + (["diff"] if max_diff is not None else [])
        rows = []
        for oc in outcomes:
            r = list(oc) + [_fmt(d[oc]) for d in dists.values()]
            if max_diff is not None:
                r.append(f"{abs(dists['paths'][oc] - dists['born'][oc]):.2e}")
            rows.append(r)
        _print_table(headers, rows, out)
        print(f"total: {_fmt(ref.total())}", file=out)
        if max_diff is not None:
            verdict = colour("ok", "32") if max_diff <= args.tol else colour("MISMATCH", "31")
            print(f"max diff: {max_diff:.3e} (tol {args.tol:g}) {verdict}", file=out)
        if forbidden:
            print(f"forbidden outcomes (p <= {ZERO_TOL:g}): {len(forbidden)}", file=out)
            for oc in forbidden:
                print("  " + " ".join(f"{s}={lab}" for s, lab in zip(ref.stations, oc)), file=out)
    if max_diff is not None and max_diff > args.tol:
        print(f"engines disagree: max diff {max_diff:.3e} exceeds {args.tol:g}", file=err)
        return EXIT_ENGINE_MISMATCH
    return EXIT_OK


def cmd_histories(args, out, err) -> int:
    graph = _graph(args)
    outcome = _parse_assignments(args.outcome)
    _check_labels(graph, outcome)
    hs = enumerate_histories(graph, filter=outcome)
    total = sum((h.amplitude for h in hs), 0j)
    complete = set(outcome) == set(graph.station_names)
    if args.format == "json":
        doc = {"outcome": outcome, "count": len(hs), "histories": [h.to_json() for h in hs]}
        if complete:
            doc["amplitude"] = {"re": total.real, "im": total.imag}
            doc["probability"] = abs(total) ** 2
        print(json.dumps(doc, indent=2), file=out)
        return EXIT_OK
    rows = []
    for h in hs:
        sources = " ".join(f"{s}:{m.word}" for s, m in h.source_choices)
        ends = " ".join(f"{a.station}={a.label}" for a in sorted(h.endpoints, key=lambda a: a.station))
        rows.append([sources, ends, f"{h.amplitude.real:+.12f}", f"{h.amplitude.imag:+.12f}"])
    _print_table(["sources", "outcome", "re", "im"], rows, out)
    print(f"histories: {len(hs)}", file=out)
    if complete:
        print(f"probability: {_fmt(abs(total) ** 2)}", file=out)
    return EXIT_OK


def _basis_kets(args):
    if args.preset == "bell":
        return detector_kets(BELL_CONFIG), INPUTS
    if args.preset == "wz":
        return wz_basis(args.u if args.u is not None else 2 ** -0.5), INPUTS
    if args.random:
        cfg = InterferometerConfig.random(np.random.default_rng(args.seed))
    else:
        cfg = InterferometerConfig(tuple(args.phi or (0.0,) * 4), tuple(args.R or (0.5,) * 4))
    return detector_kets(cfg), INPUTS


def cmd_basis(args, out, err) -> int:
    kets, inputs = _basis_kets(args)
    residual = gram_residual(kets)
    if args.format == "json":
        doc = {"inputs": list(inputs), "kets": [
            {"label": k.label, "coefficients": [{"re": c.real, "im": c.imag} for c in k.coefficients]} for k in kets
        ], "gram_residual": residual}
        print(json.dumps(doc, indent=2), file=out)
        return EXIT_OK

    def cell(c):
        # round first so tiny negatives do not print as -0.000000
        re, im = (round(x, 6) + 0.0 for x in (c.real, c.imag))
        return f"{re:+.6f}{im:+.6f}i"

    _print_table(["ket"] + [f"|{b}>" for b in inputs], [[k.label] + [cell(c) for c in k.coefficients] for k in kets], out)
    print(f"gram residual: {residual:.3e}", file=out)
    return EXIT_OK


def cmd_show(args, out, err) -> int:
    out.write(dsl.serialize(_graph(args)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="whichway", description="Sum-over-histories simulator for which-way experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="print the joint outcome distribution")
    _add_input(run)
    run.add_argument("--engine", choices=("paths", "born", "both"), default="paths")
    run.add_argument("--format", choices=("table", "json"), default="table")
    run.add_argument("--condition", action="append", metavar="STATION=LABEL",
                     help="condition on a partial outcome (also LABEL_STATION); repeatable")
    run.add_argument("--marginalize", action="append", metavar="STATIONS",
                     help="keep only these stations (comma-separated)")
    run.add_argument("--tol", type=float, default=1e-9, help="engine agreement tolerance")
    run.set_defaults(func=cmd_run)

    hist = sub.add_parser("histories", help="list the histories ending in an outcome")
    _add_input(hist)
    hist.add_argument("--outcome", action="append", metavar="STATION=LABEL")
    hist.add_argument("--format", choices=("table", "json"), default="table")
    hist.set_defaults(func=cmd_histories)

    basis = sub.add_parser("basis", help="detector kets of the four-splitter interferometer")
    basis.add_argument("--preset", choices=("bell", "wz"))
    basis.add_argument("--u", type=float, default=None, help="u for the wz preset")
    basis.add_argument("--R", type=float, nargs=4, metavar=("R1", "R2", "R3", "R4"))
    basis.add_argument("--phi", type=float, nargs=4, metavar=("P1", "P2", "P3", "P4"))
    basis.add_argument("--random", action="store_true")
    basis.add_argument("--seed", type=int, default=None)
    basis.add_argument("--format", choices=("table", "json"), default="table")
    basis.set_defaults(func=cmd_basis)

    show = sub.add_parser("show", help="print an experiment in the text format")
    _add_input(show)
    show.set_defaults(func=cmd_show)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, err)
    except ParseError as e:
        for d in e.diagnostics:
            print(f"{getattr(args, 'file', '')}:{d}", file=err)
        return EXIT_INVALID
    except GraphError as e:
        for issue in e.issues:
            print(f"{getattr(args, 'file', None) or 'graph'}: {issue}", file=err)
        return EXIT_INVALID
    except ZeroProbabilityCondition as e:
        print(f"error: {e}", file=err)
        return EXIT_ZERO_CONDITION
    except (BadParams, BadCoefficients, UnknownStation, NoBornRealization, OSError) as e:
        print(f"error: {e}", file=err)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
