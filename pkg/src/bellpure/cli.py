"""Command-line interface: ``bellpure <command> ...``.

Exit codes: 0 success, 1 invalid input, 2 a scan found violations,
3 resource limit, 64 malformed command line.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import correctability, thresholds, verification
from .errors import BellPureError, DomainError, ResourceLimit
from .exponents import exponent_report
from .formatting import TABLE_DIGITS, ext_json, fmt_num
from .parallel import resolve_threads
from .states import BellDiagonalState, error_rates, make_state, parse_state
from .steps import StepSequence, apply_sequence

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_VIOLATIONS = 2
EXIT_RESOURCE = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- inputs ---------------------------------------------------------------------

def load_state(text: str) -> BellDiagonalState:
    """Inline ``a,b,c,d``, a family like ``werner:0.7``, or ``@path`` to a JSON file.

    The JSON may be a bare ``{"a":..,"b":..,"c":..,"d":..}`` object or any object
    with such a ``"state"`` entry (which is what every command emits).
    """
    if not text.startswith("@"):
        return parse_state(text)
    path = Path(text[1:])
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DomainError(f"cannot read state file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"state file {path} is not JSON: {exc}") from None
    if isinstance(data, dict) and "state" in data:
        data = data["state"]
    if isinstance(data, list) and len(data) == 4:
        return make_state(*map(float, data))
    if not isinstance(data, dict):
        raise DomainError(f"state file {path} holds no state")
    try:
        return BellDiagonalState.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"state file {path} holds no valid state: {exc}") from None


def int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def grid_int(text: str) -> int:
    value = positive_int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("grid sizes must be at least 2")
    return value


# -- output ---------------------------------------------------------------------

def _json_ready(value):
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return ext_json(value)


def _flatten(doc: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in doc.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat


def render_document(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_json_ready(doc), indent=2) + "\n"
    flat = _flatten(doc)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(flat)
        writer.writerow([fmt_num(v) for v in flat.values()])
        return buf.getvalue()
    width = max(len(k) for k in flat)
    return "".join(f"{k.ljust(width)}  {fmt_num(v, TABLE_DIGITS)}\n" for k, v in flat.items())


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def summary_path(out: str) -> Path:
    path = Path(out)
    return path.with_name(path.stem + ".summary.json")


def emit_scan(result: verification.ScanResult, args) -> int:
    if args.format == "json":
        doc = {"summary": result.summary(),
               "records": [{**rec.inputs, **rec.computed, "pass": rec.passed, "margin": rec.margin}
                           for rec in result.records]}
        emit(json.dumps(_json_ready(doc), indent=2) + "\n", args.out)
    elif args.format == "table":
        emit(render_document(result.summary(), "table"), args.out)
    else:
        emit(result.to_csv(), args.out)
        if args.out is None:
            sys.stderr.write(result.summary_json())
        else:
            summary_path(args.out).write_text(result.summary_json(), encoding="utf-8")
    return EXIT_VIOLATIONS if result.violations else EXIT_OK


# -- commands -------------------------------------------------------------------

def state_doc(s: BellDiagonalState) -> dict:
    return s.to_dict()


def cmd_evolve(args) -> int:
    s = load_state(args.state)
    seq = StepSequence.parse(args.seq)
    result = apply_sequence(s, seq)
    B, P = error_rates(result.state)
    doc = {"sequence": str(seq), "state": state_doc(result.state),
           "survival_probability": result.survival_probability, "B": B, "P": P}
    emit(render_document(doc, args.format), args.out)
    return EXIT_OK


def cmd_exponents(args) -> int:
    s = load_state(args.state)
    doc = {"state": state_doc(s), **exponent_report(s).to_dict()}
    emit(render_document(doc, args.format), args.out)
    return EXIT_OK


def cmd_decide(args) -> int:
    s = load_state(args.state)
    report = correctability.decide_correctability(s, args.kind, args.n_max)
    emit(render_document(report.to_dict(), args.format), args.out)
    return EXIT_OK


def cmd_threshold(args) -> int:
    protocols = [args.protocol] if args.protocol else [p.value for p in thresholds.Protocol]
    results = [thresholds.threshold(p, args.method) for p in protocols]
    if args.format == "table":
        text = "".join(f"protocol {r.protocol.value} ({r.method.value})\n"
                       f"F* = {r.critical_fidelity:.9f}\n"
                       f"B* = {r.critical_bit_error_rate:.9f}\n" for r in results)
    elif args.format == "json" and len(results) > 1:
        text = json.dumps([_json_ready(r.to_dict()) for r in results], indent=2) + "\n"
    elif args.format == "json":
        text = render_document(results[0].to_dict(), "json")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(results[0].to_dict())
        for r in results:
            writer.writerow([fmt_num(v) for v in r.to_dict().values()])
        text = buf.getvalue()
    emit(text, args.out)
    return EXIT_OK


SCANS = ("conjecture", "chain", "h", "delta", "lemma_diag", "reductions")


def run_scan(name: str, args) -> verification.ScanResult:
    threads = args.threads
    if name == "conjecture":
        return verification.scan_conjecture(args.t_grid, args.n, threads)
    if name == "chain":
        return verification.verify_theorem_chain(args.samples, args.seed, threads)
    if name == "h":
        return verification.verify_h_inequality(args.grid)
    if name == "delta":
        return verification.verify_delta_inequality(args.grid)
    if name == "lemma_diag":
        return verification.verify_lemma_diag(args.samples, args.seed, threads)
    return verification.verify_reductions(args.samples, args.n, args.seed, threads=threads)


def cmd_scan(args) -> int:
    chosen = [name for name in SCANS if getattr(args, name)]
    if len(chosen) != 1:
        raise UsageError("choose exactly one of --" + ", --".join(s.replace("_", "-") for s in SCANS))
    name = chosen[0]
    if args.n is None:
        args.n = [3, 5, 7, 11, 21] if name == "conjecture" else [3, 5]
    if args.samples is None:
        args.samples = 100_000 if name == "chain" else 10_000
    if args.grid is None:
        args.grid = 10_000 if name == "h" else 1001
    return emit_scan(run_scan(name, args), args)


FIGURES = ("region", "conjecture", "delta")


def cmd_figure(args) -> int:
    which = args.figure
    if which == "region":
        result = verification.region_figure_data(args.grid)
    elif which == "conjecture":
        result = verification.scan_conjecture(args.t_grid, args.n, args.threads)
    else:
        result = verification.verify_delta_inequality(args.grid)
    return emit_scan(result, args)


def cmd_verify(args) -> int:
    result = verification.verify_oracle_equivalence(args.samples, range(1, args.bn_max + 1),
                                                    args.pn, args.seed, args.threads)
    return emit_scan(result, args)


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellpure", description="Bell-diagonal purification analysis")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=("json", "csv", "table"), default="table"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", help="output file (default: stdout)")

    def threaded(p):
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads, 0 = one per CPU (default: $BELLPURE_THREADS or 1)")

    p = sub.add_parser("evolve", help="apply a step sequence such as 'B2 P3'")
    p.add_argument("--state", required=True)
    p.add_argument("--seq", required=True)
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("exponents", help="characteristic exponents and region flags")
    p.add_argument("--state", required=True)
    common(p)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("decide", help="asymptotic correctability verdict")
    p.add_argument("--state", required=True)
    p.add_argument("--kind", choices=[k.value for k in correctability.SequenceKind], default="Bn")
    p.add_argument("--n-max", type=positive_int, default=correctability.DEFAULT_N_MAX)
    common(p)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("threshold", help="maximum tolerable bit error rate")
    p.add_argument("--protocol", choices=[x.value for x in thresholds.Protocol],
                   help="default: both protocols")
    p.add_argument("--method", choices=[x.value for x in thresholds.Method], default="closed-form")
    common(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("scan", help="numerical certification scans (CSV)")
    for name in SCANS:
        p.add_argument("--" + name.replace("_", "-"), action="store_true", dest=name)
    p.add_argument("--t-grid", type=grid_int, default=201)
    p.add_argument("--n", type=int_list, default=None, help="comma-separated odd n values")
    p.add_argument("--samples", type=positive_int, default=None)
    p.add_argument("--grid", type=grid_int, default=None)
    p.add_argument("--seed", type=int, default=0)
    threaded(p)
    common(p, default="csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("figure", help="data behind the region, conjecture and threshold-fidelity plots")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--grid", type=grid_int, default=201)
    p.add_argument("--t-grid", type=grid_int, default=201)
    p.add_argument("--n", type=int_list, default=[3, 5, 7, 11, 21])
    threaded(p)
    common(p, default="csv")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="closed-form maps against exhaustive enumeration")
    p.add_argument("--samples", type=positive_int, default=50)
    p.add_argument("--bn-max", type=positive_int, default=7)
    p.add_argument("--pn", type=int_list, default=[1, 3, 5, 7])
    p.add_argument("--seed", type=int, default=0)
    threaded(p)
    common(p, default="csv")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "threads"):
        args.threads = resolve_threads(args.threads)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"bellpure: error: {exc}\n")
        return EXIT_USAGE
    except ResourceLimit as exc:
        sys.stderr.write(f"bellpure: resource limit: {exc}\n")
        return EXIT_RESOURCE
    except (BellPureError, ValueError) as exc:
        sys.stderr.write(f"bellpure: invalid input: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
