"""Command-line front end.

Usage::

    ctmc-limit COMMAND FILE [options]

Exit status is 0 on success, 1 for rejected input (unreadable file, not an
intensity matrix, bad option) and 2 for numerical failure.  Errors are written
to stderr as a JSON object.
"""

import argparse
import json
import sys

import numpy as np

from . import chain, limit, oracles
from .errors import InputError, NumericalDegeneracyError, NumericalError
from .io import parse_matrix

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2
DEFAULT_Z = 1e-6
RESOLVENT_TOL = 1e-4
CHECK_TRAJECTORIES = 10_000


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _prob(x):
    """Round probabilities to 15 significant digits for output."""
    if isinstance(x, np.ndarray):
        x = x.tolist()
    if isinstance(x, list):
        return [_prob(v) for v in x]
    return float(f"{x:.15g}")


def _labels(b):
    return [b.label(i) for i in range(b.n)]


def _classes(b, s):
    return {
        "classes": [{"id": k, "indices": list(c), "states": [b.label(i) for i in c]}
                    for k, c in enumerate(s.classes)],
        "transient": {"indices": list(s.transient),
                      "states": [b.label(i) for i in s.transient]},
    }


def _validate(b, args):
    return {"rates": b.b.tolist()}


def _classify(b, args):
    return _classes(b, chain.classify_states(b))


def _stationary(b, args):
    s = chain.classify_states(b)
    if not 0 <= args.class_id < len(s.classes):
        raise UsageError(f"class id must be in 0..{len(s.classes) - 1}")
    sv = limit.stationary_distribution(b, s, args.class_id)
    return {"class": args.class_id, "states": [b.label(i) for i in s.classes[args.class_id]],
            "p": _prob(sv.p)}


def _limit_report(b, fl):
    s = fl.structure
    return {
        **_classes(b, s),
        "limit": _prob(fl.p),
        "stationary": [{"class": sv.class_id, "p": _prob(sv.p)} for sv in fl.stationary],
        "absorption": [{"state": i, "label": b.label(i), "f": _prob(row)}
                       for i, row in zip(s.transient, fl.absorption.f)],
    }


def _limit(b, args):
    fl = limit.final_limit(b)
    bad = fl.violations(b)
    if bad:
        raise NumericalDegeneracyError("final limit fails: " + ", ".join(bad))
    return _limit_report(b, fl)


def _expm(b, args):
    return {"time": args.time, "matrix": _prob(oracles.transition_matrix(b, args.time))}


def _resolvent(b, args):
    return {"z": args.z, "matrix": _prob(oracles.resolvent(b, args.z))}


def _simulate(b, args):
    r = oracles.simulate(b, args.horizon, args.trajectories, args.seed)
    return {"horizon": r.horizon, "trajectories": r.trajectories_per_start, "seed": r.seed,
            "empirical": _prob(r.empirical), "counts": r.counts.tolist()}


def binomial_excess(empirical, p, trajectories, sigmas=4.0):
    """Largest amount by which `empirical` leaves the ``sigmas``-sigma binomial band around `p`."""
    band = sigmas * np.sqrt(np.clip(p * (1.0 - p), 0.0, None) / trajectories)
    return float(np.max(np.abs(empirical - p) - band).clip(min=0.0))


def _check(b, args):
    fl = limit.final_limit(b)
    p = fl.p
    horizon = oracles.adaptive_horizon(b)
    expm = oracles.transition_matrix(b, horizon)
    res = oracles.resolvent(b, args.z)
    sim = oracles.simulate(b, horizon, args.trajectories, args.seed)
    disc = {
        "expm": float(np.max(np.abs(expm - p))),
        "resolvent": float(np.max(np.abs(res - p))),
        "simulation": float(np.max(np.abs(sim.empirical - p))),
        "expm_vs_resolvent": float(np.max(np.abs(expm - res))),
    }
    passed = {
        "expm": disc["expm"] <= args.check_tol,
        "resolvent": disc["resolvent"] <= args.resolvent_tol,
        "simulation": binomial_excess(sim.empirical, p, args.trajectories) == 0.0,
        "invariants": not fl.violations(b),
    }
    return {
        "limit": _prob(p),
        "horizon": horizon,
        "z": args.z,
        "trajectories": args.trajectories,
        "seed": args.seed,
        "discrepancies": disc,
        "tolerances": {"expm": args.check_tol, "resolvent": args.resolvent_tol,
                       "simulation": "4 sigma binomial"},
        "passed": passed,
        "ok": all(passed.values()),
    }


COMMANDS = {
    "validate": _validate,
    "classes": _classify,
    "stationary": _stationary,
    "limit": _limit,
    "expm": _expm,
    "resolvent": _resolvent,
    "simulate": _simulate,
    "check": _check,
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("file", help="matrix file (JSON or CSV)")
    common.add_argument("--input-format", choices=["json", "csv"],
                        help="input format (default: from file suffix)")
    common.add_argument("--format", choices=["json", "text"], default="json",
                        help="report format")
    common.add_argument("--tol", type=float, default=chain.VALIDATION_TOL,
                        help="validation tolerance")
    common.add_argument("--transpose", action="store_true",
                        help="input uses zero column sums")

    parser = _Parser(prog="ctmc-limit",
                     description="Final limit of exp(tB) for a right intensity matrix B.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("validate", parents=[common], help="echo the normalized matrix")
    sub.add_parser("classes", parents=[common], help="recurrence classes and transient states")
    p = sub.add_parser("stationary", parents=[common], help="stationary vector of one class")
    p.add_argument("--class", dest="class_id", type=int, required=True)
    sub.add_parser("limit", parents=[common], help="final limit with class vectors and absorption")
    p = sub.add_parser("expm", parents=[common], help="transition matrix exp(tB)")
    p.add_argument("--time", type=float, required=True)
    p = sub.add_parser("resolvent", parents=[common], help="z (zI - B)^-1")
    p.add_argument("--z", type=float, required=True)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo state frequencies")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--trajectories", type=int, default=CHECK_TRAJECTORIES)
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("check", parents=[common], help="compare the limit with all oracles")
    p.add_argument("--check-tol", type=float, default=1e-8)
    p.add_argument("--z", type=float, default=DEFAULT_Z)
    p.add_argument("--resolvent-tol", type=float, default=RESOLVENT_TOL)
    p.add_argument("--trajectories", type=int, default=CHECK_TRAJECTORIES)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _render_matrix(rows, labels):
    cells = [[f"{v:.15g}" if isinstance(v, float) else str(v) for v in row] for row in rows]
    width = max(len(c) for row in cells for c in row + list(labels))
    head = " " * width + "  " + "  ".join(s.rjust(width) for s in labels)
    body = [labels[i].rjust(width) + "  " + "  ".join(c.rjust(width) for c in row)
            for i, row in enumerate(cells)]
    return "\n".join([head] + body)


def render_text(report):
    labels = report["states"]
    out = []
    for key, value in report.items():
        if key == "states":
            continue
        if (isinstance(value, list) and value and isinstance(value[0], list)
                and len(value) == len(labels)):
            out.append(f"{key}:")
            out.append(_render_matrix(value, labels))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            out.append(f"{key}:")
            out += ["  " + ", ".join(f"{k}={v}" for k, v in item.items()) for item in value]
        elif isinstance(value, dict):
            out.append(f"{key}:")
            out += [f"  {k}: {v}" for k, v in value.items()]
        else:
            out.append(f"{key}: {value}")
    return "\n".join(out) + "\n"


def _error(kind, exc):
    obj = {"error": {"type": kind, "class": type(exc).__name__, "message": str(exc)}}
    for attr in ("line", "column", "row", "i", "j", "value", "name"):
        v = getattr(exc, attr, None)
        if v is not None:
            obj["error"][attr] = v
    print(json.dumps(obj), file=sys.stderr)


def run(argv=None, stdout=None):
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        doc = parse_matrix(args.file, args.input_format)
        raw = chain.transpose(doc.rates) if args.transpose else doc.rates
        b = chain.validate(raw, args.tol, labels=doc.states)
        report = {"command": args.command, "n": b.n, "states": _labels(b)}
        report.update(COMMANDS[args.command](b, args))
    except (InputError, ValueError) as exc:
        _error("input", exc)
        return EXIT_INPUT
    except NumericalError as exc:
        _error("numerical", exc)
        return EXIT_NUMERICAL
    if args.format == "text":
        stdout.write(render_text(report))
    else:
        stdout.write(json.dumps(report) + "\n")
    if report.get("ok") is False:
        failed = [k for k, v in report["passed"].items() if not v]
        _error("numerical", NumericalError("oracle check failed: " + ", ".join(failed)))
        return EXIT_NUMERICAL
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
