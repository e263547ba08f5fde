"""Command-line front end.

Exit codes: 0 success, 1 internal verification failure, 2 input error,
3 Chebychev obstruction.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import analysis
from .diagram import WrappingMatrix, omega_from_json
from .exact import chebychev2, chebychev2_eval, format_rational, parse_rational, poly_to_json
from .jw import ChebyshevZero, jw
from .morphism import morphism_to_json

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_OBSTRUCTION = 3


class InputError(ValueError):
    pass


def parse_seq(text) -> tuple:
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [p for p in str(text).replace(" ", "").split(",") if p != ""]
    if not items:
        raise InputError("empty colour sequence")
    try:
        seq = tuple(int(c) for c in items)
    except (TypeError, ValueError):
        raise InputError(f"bad colour sequence: {text!r}") from None
    if any(c < 1 for c in seq):
        raise InputError("colours are 1-based positive integers")
    return seq


def load_omega(path: Optional[str]) -> Optional[WrappingMatrix]:
    if path is None:
        return None
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read omega file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"omega file is not JSON: {exc}") from None
    return omega_from_json(data)


def _need_omega(args) -> WrappingMatrix:
    if args.omega_matrix is None:
        raise InputError("this command needs --omega")
    return args.omega_matrix


def _check_colours(seq, omega: WrappingMatrix):
    if any(c > omega.ell for c in seq):
        raise InputError(f"colours must lie in 1..{omega.ell}")
    return seq


# --- output -----------------------------------------------------------------

def _plain(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_plain(v) for v in value)
    return str(value)


def _table(rows: Sequence[Sequence]) -> str:
    """Left-aligned text, right-aligned numbers and rationals."""
    cells = [[_plain(v) for v in row] for row in rows]
    if not cells:
        return ""
    width = max(len(r) for r in cells)
    widths = [max((len(r[c]) for r in cells if c < len(r)), default=0) for c in range(width)]
    out = []
    for raw, row in zip(rows, cells):
        parts = []
        for c, text in enumerate(row):
            numeric = isinstance(raw[c], (int, Fraction)) and not isinstance(raw[c], bool)
            parts.append(text.rjust(widths[c]) if numeric else text.ljust(widths[c]))
        out.append("  ".join(parts).rstrip())
    return "\n".join(out)


def _emit(args, payload: dict, table_rows, out):
    if args.format == "json":
        out.write(json.dumps(payload, sort_keys=False) + "\n")
    else:
        text = table_rows if isinstance(table_rows, str) else _table(table_rows)
        out.write(text + "\n")


def _morphism_rows(m) -> List[list]:
    rows = [["coeff", "pairing"]]
    for d, c in m.terms.items():
        rows.append([c, json.dumps([list(p) for p in d.matching.chords()])])
    return rows


# --- commands ---------------------------------------------------------------

def cmd_cheb(args, out):
    n = int(args.n)
    if n < 0:
        raise InputError("n must be non-negative")
    if (args.x is None) != (args.y is None):
        raise InputError("give both --x and --y or neither")
    if args.x is None:
        p = chebychev2(n)
        _emit(args, {"n": n, "polynomial": str(p), "terms": poly_to_json(p)}, str(p), out)
    else:
        x, y = parse_rational(args.x), parse_rational(args.y)
        v = chebychev2_eval(n, x, y)
        _emit(args, {"n": n, "x": format_rational(x), "y": format_rational(y),
                     "value": format_rational(v)}, format_rational(v), out)
    return EXIT_OK


def cmd_jw(args, out):
    omega = _need_omega(args)
    seq = _check_colours(parse_seq(args.seq), omega)
    p = jw(seq, omega)
    _emit(args, {"seq": list(seq), "morphism": morphism_to_json(p.morphism)},
          _morphism_rows(p.morphism), out)
    return EXIT_OK


def cmd_gram(args, out):
    omega = _need_omega(args)
    n = int(args.n)
    if n < 0:
        raise InputError("n must be non-negative")
    if args.adapted:
        rep = analysis.adapted_basis_gram(n, omega)
    else:
        rep = analysis.gram(n, omega, jobs=args.jobs)
    payload = {
        "n": n,
        "ell": omega.ell,
        "adapted": rep.adapted,
        "basis_size": rep.size,
        "determinant": format_rational(rep.determinant),
        "sign": rep.sign,
        "nondegenerate": rep.nondegenerate,
    }
    rows = [["basis_size", rep.size], ["determinant", rep.determinant], ["sign", rep.sign],
            ["verdict", "nondegenerate" if rep.nondegenerate else "degenerate"]]
    if rep.adapted:
        payload["sparse"] = rep.sparse
        rows.append(["sparse", rep.sparse])
    if args.matrix:
        mat = rep.matrix
        payload["matrix"] = [[format_rational(v) for v in row] for row in mat]
        text = _table(rows) + "\nmatrix:\n" + _table(mat)
        _emit(args, payload, text, out)
    else:
        _emit(args, payload, rows, out)
    return EXIT_OK


def cmd_semisimple(args, out):
    omega = _need_omega(args)
    max_n = args.max_n if args.max_n is not None else analysis.scan_bound(analysis.DEFAULT_SEMISIMPLE_MAX_N)
    max_n = int(max_n)
    if max_n < 1:
        raise InputError("max_n must be at least 1")
    rep = analysis.semisimple_check(omega, max_n)
    payload = {"max_n": rep.max_n, "verdict": rep.verdict,
               "zeros": [{"i": i, "j": j, "n": k} for i, j, k in rep.zeros]}
    rows = [["max_n", rep.max_n], ["verdict", rep.verdict]]
    rows += [["zero", f"U_{k}(omega_{i}{j}, omega_{j}{i})"] for i, j, k in rep.zeros]
    _emit(args, payload, rows, out)
    return EXIT_OK


def cmd_witness(args, out):
    omega = _need_omega(args)
    i, j = int(args.i), int(args.j)
    _check_colours((i, j), omega)
    if i < 1 or j < 1:
        raise InputError("colours are 1-based positive integers")
    bound = args.bound if args.bound is not None else analysis.scan_bound(analysis.DEFAULT_WITNESS_BOUND)
    found = analysis.nilpotent_witness(i, j, omega, bound=int(bound))
    if found is None:
        _emit(args, {"i": i, "j": j, "bound": int(bound), "witness": None}, "none", out)
        return EXIT_OK
    seq, e = found
    payload = {"i": i, "j": j, "bound": int(bound), "witness": {"seq": list(seq), "e": morphism_to_json(e)}}
    rows = [["seq", list(seq)], ["terms", len(e)], ["e_squared", "0"]]
    _emit(args, payload, rows, out)
    return EXIT_OK


def cmd_tensor(args, out):
    left, right = parse_seq(args.seq_i), parse_seq(args.seq_j)
    dec = analysis.tensor_decompose(left, right)
    payload = {"left": list(left), "right": list(right), "r": dec.r,
               "summands": [list(s) for s in dec.summands]}
    rows = [["r", dec.r]] + [["summand", list(s)] for s in dec.summands]
    omega = args.omega_matrix
    if omega is not None:
        _check_colours(left + right, omega)
        items = analysis.tensor_idempotents(left, right, omega)
        dim = analysis.tensor_end_dimension(left, right, omega)
        if dim != dec.r:
            raise analysis.VerificationError(f"dim End = {dim}, expected {dec.r}")
        payload["lambdas"] = [format_rational(lam) for _, lam in items]
        payload["end_dimension"] = dim
        payload["verified"] = True
        rows += [["lambda", lam] for _, lam in items] + [["end_dimension", dim]]
    _emit(args, payload, rows, out)
    return EXIT_OK


def load_meander(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read meander file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"meander file is not JSON: {exc}") from None
    if not isinstance(data, dict) or "upper" not in data or "lower" not in data:
        raise InputError('meander file needs "upper" and "lower" arc lists')
    upper, lower = analysis.meander_halves(data["upper"], data["lower"])
    colours = data.get("colours")
    return upper, lower, (parse_seq(colours) if colours is not None else None)


def cmd_meander(args, out):
    omega = _need_omega(args)
    if args.file is None:
        raise InputError("meander needs --file")
    upper, lower, colours = load_meander(args.file)
    value = analysis.meander_eval(upper, lower, colours, omega)
    _emit(args, {"value": format_rational(value)}, format_rational(value), out)
    return EXIT_OK


def cmd_qdim(args, out):
    omega = _need_omega(args)
    seq = _check_colours(parse_seq(args.seq), omega)
    value = analysis.quantum_dimension(seq, omega)
    _emit(args, {"seq": list(seq), "value": format_rational(value)}, format_rational(value), out)
    return EXIT_OK


COMMANDS = {
    "cheb": cmd_cheb,
    "jw": cmd_jw,
    "gram": cmd_gram,
    "semisimple": cmd_semisimple,
    "witness": cmd_witness,
    "tensor": cmd_tensor,
    "meander": cmd_meander,
    "qdim": cmd_qdim,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega", default=argparse.SUPPRESS, metavar="PATH",
                        help='wrapping matrix JSON: {"ell": l, "omega": [["p/q", ...], ...]}')
    common.add_argument("--format", choices=["json", "table"], default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, metavar="K",
                        help="worker processes for Gram blocks")
    common.add_argument("--config", default=argparse.SUPPRESS, metavar="PATH",
                        help="JSON object of command parameters; its values override flags")

    parser = argparse.ArgumentParser(
        prog="tlcolour",
        description="Exact computations in Temperley-Lieb categories with coloured regions.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cheb", parents=[common], help="two-variable Chebychev polynomial U_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x")
    p.add_argument("--y")

    p = sub.add_parser("jw", parents=[common], help="Jones-Wenzl projector of a colour sequence")
    p.add_argument("--seq", required=True, help="comma-separated colours, e.g. 1,2,1")

    p = sub.add_parser("gram", parents=[common], help="Gram determinant of End([n])")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--adapted", action="store_true", help="use the JW-adapted basis")
    p.add_argument("--matrix", action="store_true", help="print the full matrix")

    p = sub.add_parser("semisimple", parents=[common], help="scan for Chebychev zeros")
    p.add_argument("--max-n", type=int, dest="max_n",
                   help=f"scan bound (default {analysis.DEFAULT_SEMISIMPLE_MAX_N}, "
                        f"or ${analysis.ENV_MAX_N})")

    p = sub.add_parser("witness", parents=[common], help="nilpotent element from a Chebychev zero")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--bound", type=int,
                   help=f"search bound (default {analysis.DEFAULT_WITNESS_BOUND}, or ${analysis.ENV_MAX_N})")

    p = sub.add_parser("tensor", parents=[common], help="decompose T_i (x) T_j")
    p.add_argument("--seq-i", dest="seq_i", required=True)
    p.add_argument("--seq-j", dest="seq_j", required=True)

    p = sub.add_parser("meander", parents=[common], help="evaluate a meander")
    p.add_argument("--file", help='JSON: {"upper": [[a,b],...], "lower": [[a,b],...], "colours": [...]}')

    p = sub.add_parser("qdim", parents=[common], help="quantum dimension of a simple object")
    p.add_argument("--seq", required=True)
    return parser


def _apply_config(args):
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest == "omega" and not isinstance(value, str):
            args.omega_matrix = omega_from_json(value)
            continue
        if dest in ("seq", "seq_i", "seq_j") and isinstance(value, list):
            value = ",".join(str(v) for v in value)
        setattr(args, dest, value)


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    for name, default in (("omega", None), ("format", "table"), ("jobs", 1), ("config", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        args.omega_matrix = None
        _apply_config(args)
        if args.omega_matrix is None:
            args.omega_matrix = load_omega(args.omega)
        if args.format not in ("json", "table"):
            raise InputError("format must be json or table")
        return COMMANDS[args.command](args, out)
    except ChebyshevZero as exc:
        payload = {"obstruction": {"i": exc.i, "j": exc.j, "n": exc.k}}
        text = f"obstruction: U_{exc.k}(omega_{exc.i}{exc.j}, omega_{exc.j}{exc.i}) = 0 ({exc.i},{exc.j},{exc.k})"
        _emit(args, payload, text, out)
        return EXIT_OBSTRUCTION
    except analysis.VerificationError as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    except (ValueError, KeyError, TypeError, IndexError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
