"""Command line front end.

    valdiff solve --backend witt -p 2 -N 4 --poly "s(x)-x" --start "(1,w,0,0)"
    valdiff witt -p 2 -N 3 add 1 1
    valdiff pc check sequence.json
    valdiff pc refine sequence.json --target "s(x)*x"

Results go to stdout as JSON (or text with ``--format text``). Failures print
{"error", "message", ...} on stderr and exit with the code listed by
``valdiff codes``.
"""

import argparse
import json
import sys

from . import errors
from .errors import ExpressionSyntaxError, UsageError, ValdiffError
from .expressions import parse_element, parse_polynomial, parse_residue
from .hahn_series import HahnRing
from .pseudo_convergence import (DEFAULT_BUDGET, PcSequence, check_pc, configuration_check,
                                 pseudolimit_check, refine, width_threshold)
from .residue_fields import FiniteFieldTower, RationalShiftField
from .sigma_hensel import solve
from .witt_vectors import WittRing, del_components

CONTEXT_KEYS = ("backend", "p", "residue", "N", "tower_bound", "degree_bound", "enum_budget")
DEFAULTS = {"backend": "witt", "p": 2, "residue": None, "N": 4,
            "tower_bound": 12, "degree_bound": 3, "enum_budget": DEFAULT_BUDGET}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Context

def build_context(options):
    """Merge defaults, an optional JSON config file and explicit flags."""
    ctx = dict(DEFAULTS)
    path = options.get("config")
    if path:
        try:
            with open(path) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        ctx.update({k: loaded[k] for k in CONTEXT_KEYS if k in loaded})
    ctx.update({k: options[k] for k in CONTEXT_KEYS if options.get(k) is not None})
    if ctx["residue"] is None:
        ctx["residue"] = "fq" if ctx["backend"] == "witt" else "ratshift"
    if ctx["backend"] == "witt" and ctx["residue"] != "fq":
        raise UsageError("the Witt backend needs residue fq")
    return ctx


def make_ring(ctx):
    if ctx["residue"] == "fq":
        field = FiniteFieldTower(ctx["p"], tower_bound=ctx["tower_bound"])
    elif ctx["residue"] == "ratshift":
        field = RationalShiftField(degree_bound=ctx["degree_bound"])
    else:
        raise UsageError(f"unknown residue field {ctx['residue']!r}")
    if ctx["backend"] == "witt":
        return WittRing(ctx["p"], ctx["N"], field)
    if ctx["backend"] == "hahn":
        return HahnRing(field, ctx["N"])
    raise UsageError(f"unknown backend {ctx['backend']!r}")


def _add_context_flags(parser, backend_flag=True):
    if backend_flag:
        parser.add_argument("--backend", choices=["witt", "hahn"])
        parser.add_argument("--residue", choices=["fq", "ratshift"])
    parser.add_argument("-p", type=int, dest="p", help="residue characteristic (fq)")
    parser.add_argument("-N", type=int, dest="N", help="precision")
    parser.add_argument("--tower-bound", type=int, dest="tower_bound")
    parser.add_argument("--degree-bound", type=int, dest="degree_bound")
    parser.add_argument("--enum-budget", type=int, dest="enum_budget")
    parser.add_argument("--config", help="JSON file with context defaults")


# ---------------------------------------------------------------------------
# Commands

def cmd_solve(ctx, poly_text, start_text, max_steps=None):
    ring = make_ring(ctx)
    G = parse_polynomial(poly_text, ring)
    a = parse_element(start_text, ring)
    root, trace = solve(G, a, ring, max_steps=max_steps)
    out = {"context": ring.descriptor(), "poly": poly_text, "start": str(a),
           "root": str(root), "valuations": trace.valuations(), "trace": trace.to_json()}
    return out


def _solve_text(out):
    lines = [f"kind   {out['trace']['kind']}"]
    if out["trace"].get("gamma") is not None:
        lines.append(f"gamma  {out['trace']['gamma']}")
    for i, v in enumerate(out["valuations"]):
        lines.append(f"step {i}  v(G) = {v}")
    lines.append(f"root   {out['root']}")
    return "\n".join(lines)


def cmd_witt(ctx, op, operands, stage=None):
    ring = WittRing(ctx["p"], ctx["N"], FiniteFieldTower(ctx["p"], tower_bound=ctx["tower_bound"]))
    if op == "teich":
        if len(operands) != 1:
            raise UsageError("teich takes one residue-field operand")
        x = ring.teichmuller(parse_residue(operands[0], ring.residue_field))
        return {"op": op, "result": str(x), "json": x.to_json()}
    arity = {"add": 2, "mul": 2, "frob": 1, "del": 1}[op]
    if len(operands) != arity:
        raise UsageError(f"{op} takes {arity} operand(s)")
    xs = [parse_element(text, ring) for text in operands]
    if op == "add":
        result = xs[0] + xs[1]
    elif op == "mul":
        result = xs[0] * xs[1]
    elif op == "frob":
        result = xs[0].sigma()
    else:
        stage = 1 if stage is None else stage
        dels = del_components(xs[0], stage)
        return {"op": op, "stages": [{"k": k, "precision": d.N, "value": str(d)}
                                     for k, d in enumerate(dels)]}
    return {"op": op, "result": str(result), "json": result.to_json()}


def _read_sequence_file(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read sequence file {path}: {exc}") from exc


def _element(value, ring):
    return parse_element(value, ring) if isinstance(value, str) else ring.from_json(value)


def load_sequence(data, ctx):
    ring = make_ring(ctx)
    if "elements" not in data:
        raise UsageError("sequence file needs an 'elements' list")
    seq = PcSequence([_element(e, ring) for e in data["elements"]], ring)
    limit = _element(data["limit"], ring) if data.get("limit") is not None else None
    return ring, seq, limit


def cmd_pc(ctx, op, data, targets=(), main=None):
    ring, seq, limit = load_sequence(data, ctx)
    if op == "check":
        out = check_pc(seq).to_json()
        out["threshold"] = width_threshold(seq)
        if limit is not None:
            out["limit"] = pseudolimit_check(seq, limit).to_json()
        return out
    if limit is None:
        raise UsageError("refine needs a 'limit' entry (a pseudolimit of the sequence)")
    texts = list(targets) or list(data.get("targets", []))
    main = main or data.get("main")
    polys = [parse_polynomial(text, ring) for text in texts]
    G = parse_polynomial(main, ring) if main else None
    report = refine(seq, limit, polys, main_polynomial=G, budget=ctx["enum_budget"])
    labels = {str(P): text for P, text in zip(polys, texts)}
    out = report.to_json()
    for key in ("m0", "l_m0", "ladders"):
        out[key] = {labels.get(k, k): v for k, v in out[key].items()}
    for entry in out["targets"]:
        entry["target"] = labels.get(entry["target"], entry["target"])
    if G is not None:
        out["mode"]["polynomial"] = main
        out["configuration"] = configuration_check(report, G).to_json()
    return out


def error_codes():
    """Every library error with its exit status."""
    out = {}
    for name in dir(errors):
        obj = getattr(errors, name)
        if isinstance(obj, type) and issubclass(obj, ValdiffError):
            out[name] = obj.exit_code
    return dict(sorted(out.items(), key=lambda kv: (kv[1], kv[0])))


# ---------------------------------------------------------------------------
# Entry point

def build_parser():
    parser = _Parser(prog="valdiff", description="Valued difference field toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="Newton-Hensel root of a sigma-polynomial")
    _add_context_flags(p_solve)
    p_solve.add_argument("--poly", required=True)
    p_solve.add_argument("--start", required=True)
    p_solve.add_argument("--max-steps", type=int, dest="max_steps")
    p_solve.add_argument("--format", choices=["json", "text"], default="json")

    p_witt = sub.add_parser(
        "witt", help="Witt vector arithmetic",
        description="Arithmetic runs through ghost components, so there is no ceiling on p or N; "
                    "the symbolic structure polynomials are practical up to p <= 7, N <= 8.")
    _add_context_flags(p_witt, backend_flag=False)
    p_witt.add_argument("op", choices=["add", "mul", "frob", "del", "teich"])
    p_witt.add_argument("operands", nargs="+")
    p_witt.add_argument("--stage", type=int)

    p_pc = sub.add_parser("pc", help="pc-sequences: check or refine")
    _add_context_flags(p_pc)
    p_pc.add_argument("op", choices=["check", "refine"])
    p_pc.add_argument("file")
    p_pc.add_argument("--target", action="append", default=[])
    p_pc.add_argument("--main", help="sigma-polynomial G to drive towards 0 during refinement")

    sub.add_parser("codes", help="list exit codes")
    return parser


def _emit(obj, stream):
    stream.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _error_payload(exc):
    payload = exc.to_json()
    report = getattr(exc, "report", None)
    if report is not None and hasattr(report, "to_json"):
        payload["report"] = report.to_json()
    equation = getattr(exc, "equation", None)
    if isinstance(equation, dict):
        payload["equation"] = equation
    elif isinstance(equation, (list, tuple)):
        payload["equation"] = [str(c) for c in equation]
    elif equation is not None:
        payload["equation"] = str(equation)
    return payload


def run(argv):
    args = vars(build_parser().parse_args(argv))
    command = args["command"]
    if command == "codes":
        return error_codes(), None
    if command == "witt":
        args.setdefault("backend", "witt")
    ctx = build_context(args)
    if command == "solve":
        out = cmd_solve(ctx, args["poly"], args["start"], args["max_steps"])
        return out, (_solve_text(out) if args["format"] == "text" else None)
    if command == "witt":
        return cmd_witt(ctx, args["op"], args["operands"], args["stage"]), None
    return cmd_pc(ctx, args["op"], _read_sequence_file(args["file"]),
                  args["target"], args["main"]), None


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        out, text = run(sys.argv[1:] if argv is None else argv)
    except ValdiffError as exc:
        _emit(_error_payload(exc), stderr)
        return exc.exit_code
    if text is not None:
        stdout.write(text + "\n")
    else:
        _emit(out, stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["build_context", "make_ring", "cmd_solve", "cmd_witt", "cmd_pc", "error_codes",
           "build_parser", "run", "main", "ExpressionSyntaxError"]
