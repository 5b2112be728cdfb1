"""Command-line front end: ``pathalg <command> [options]``.

Exit status is 0 on success, 1 when the input is well formed but violates a
mathematical precondition, and 2 for usage problems (bad flags, unreadable
files, malformed expression text).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .chen import PLPath, chen_series, picard_transport, source_eval, transport
from .checks import SUITES, run_suites
from .coeff import RatMatrix, fmt_rat
from .connection import Connection, JetData, curvature, jets, reconstruct
from .errors import ParseError, PathAlgError
from .freelie import expand_to_words, hall_basis, witt_dim
from .homology import freeness_dims, generators, left_nested
from .freelie import tree_str
from .ncdiff import AnchorFrame, NCOp, nc_normalize
from .palg import anchor, nc_to_p, p_bracket
from .parser import parse_expr


class UsageError(Exception):
    pass


def _emit(args, text: str, obj) -> None:
    if args.json:
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _load_json(path: str | None, what: str):
    if path is None:
        raise UsageError(f"--{what} FILE is required")
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _load(loader, path: str | None, what: str):
    obj = _load_json(path, what)
    try:
        return loader(obj)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PathAlgError):
            raise
        raise UsageError(f"{path} does not match the {what} schema: {exc}") from None


def fmt_matrix(m: RatMatrix) -> str:
    return "[" + "; ".join(", ".join(fmt_rat(x) for x in row) for row in m) + "]"


def _matrix_json(m: RatMatrix) -> list:
    return [[fmt_rat(x) for x in row] for row in m]


def _operator(args, text: str) -> NCOp:
    frame = AnchorFrame.coordinate(args.n, args.cap)
    return nc_normalize(parse_expr(text, args.n), frame, getattr(args, "strategy", "algebraic"))


# commands


def cmd_hall(args) -> None:
    top = args.max_deg if args.max_deg is not None else args.cap
    lines, rows = [], []
    for d in range(1, top + 1):
        for h in hall_basis(args.n, d):
            word = "".join(map(str, h.word)) if args.n < 10 else ",".join(map(str, h.word))
            lines.append(f"{d}  {word}  {h}")
            rows.append({"degree": d, "word": list(h.word), "bracket": str(h)})
    _emit(args, "\n".join(lines), rows)


def cmd_nf(args) -> None:
    op = _operator(args, args.expr)
    _emit(args, str(op), op.to_json())


def cmd_bracket(args) -> None:
    x = nc_to_p(_operator(args, args.left))
    y = nc_to_p(_operator(args, args.right))
    z = p_bracket(x, y)
    _emit(args, str(z) if z else "0", z.to_json())


def cmd_anchor(args) -> None:
    v = anchor(nc_to_p(_operator(args, args.expr)))
    _emit(args, str(v), v.to_json())


def cmd_curv(args) -> None:
    c = _load(Connection.from_json, args.conn, "conn")
    lines, rows = [], []
    for i in range(1, c.n + 1):
        for j in range(i + 1, c.n + 1):
            f = curvature(c, i, j)
            lines.append(f"F[{i},{j}] = {f}")
            rows.append({"i": i, "j": j, "F": f.to_json()})
    _emit(args, "\n".join(lines) if lines else "no curvature components (n < 2)", rows)


def _jets_text(j: JetData) -> str:
    lines = [f"n={j.n} N={j.N} Dmax={j.Dmax}"]
    for seq, m in j.values:
        lines.append(f"({','.join(map(str, seq))}) {fmt_matrix(m)}")
    return "\n".join(lines)


def cmd_jets(args) -> None:
    c = _load(Connection.from_json, args.conn, "conn")
    dmax = args.dmax if args.dmax is not None else min(4, c.cap + 2)
    j = jets(c, dmax)
    _emit(args, _jets_text(j), j.to_json())


def _conn_text(c: Connection) -> str:
    lines = [f"n={c.n} N={c.N} cap={c.cap}"]
    lines += [f"A{i} = {a}" for i, a in enumerate(c.A, start=1)]
    return "\n".join(lines)


def cmd_reconstruct(args) -> None:
    j = _load(JetData.from_json, args.jets, "jets")
    c = reconstruct(j, args.cap)
    _emit(args, _conn_text(c), c.to_json())


def cmd_chen(args) -> None:
    path = _load(PLPath.from_json, args.path, "path")
    e = chen_series(path, args.cap)
    _emit(args, str(e), e.to_json())


def cmd_transport(args) -> None:
    path = _load(PLPath.from_json, args.path, "path")
    c = _load(Connection.from_json, args.conn, "conn")
    if args.picard:
        m = picard_transport(path, c, args.cap)
    else:
        m = transport(chen_series(path, args.cap), c)
    _emit(args, "\n".join(" ".join(fmt_rat(x) for x in row) for row in m), _matrix_json(m))


def cmd_source(args) -> None:
    path = _load(PLPath.from_json, args.path, "path")
    frame = AnchorFrame.coordinate(path.n, args.cap)
    op = nc_normalize(parse_expr(args.expr, path.n), frame)
    if op.degree() > 0:
        raise UsageError("source expects a polynomial in x1..xn without generators")
    a = op.terms.get((), None)
    value = Fraction(0) if a is None else source_eval(chen_series(path, args.cap), a)
    _emit(args, fmt_rat(value), {"value": fmt_rat(value)})


def cmd_dims(args) -> None:
    top = args.max_deg if args.max_deg is not None else args.cap
    rows = [{"d": d, "dim": witt_dim(args.n, d)} for d in range(1, top + 1)]
    text = "d dim\n" + "\n".join(f"{r['d']} {r['dim']}" for r in rows)
    _emit(args, text, rows)


def cmd_gens(args) -> None:
    if args.table:
        top = args.max_deg if args.max_deg is not None else 7
        rows = freeness_dims(args.n, top)
        head = "d gen_count schur_dim fl_dim free_graded_dim"
        body = [f"{r['d']} {r['gen_count']} {r['schur_dim']} {r['fl_dim']} {r['free_graded_dim']}" for r in rows]
        _emit(args, "\n".join([head] + body), rows)
        return
    d = args.deg if args.deg is not None else 2
    seqs = generators(args.n, d)
    lines = [f"({','.join(map(str, s))})  {tree_str(left_nested(s))}" for s in seqs]
    rows = [{"seq": list(s), "bracket": tree_str(left_nested(s)), "words": len(expand_to_words(left_nested(s)))} for s in seqs]
    _emit(args, "\n".join(lines) if lines else "none", rows)


def cmd_check(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names, args.n, args.cap, args.seed, args.samples, args.jobs)
    ok = all(r.ok for r in results)
    passed = sum(r.ok for r in results)
    text = "\n".join(r.line() for r in results) + f"\n{'OK' if ok else 'FAILED'} {passed}/{len(results)} properties"
    _emit(args, text, {"ok": ok, "results": [r.to_json() for r in results]})
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="number of variables / generators (default 2)")
    common.add_argument("--cap", type=int, default=4, help="truncation degree (default 4)")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for randomized checks (default 0)")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for check suites")

    parser = argparse.ArgumentParser(prog="pathalg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, func):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("hall", "list the Hall basis up to a degree", cmd_hall)
    p.add_argument("--max-deg", type=int)
    p = add("nf", "left normal form of an operator expression", cmd_nf)
    p.add_argument("expr")
    p.add_argument("--strategy", choices=("algebraic", "leftmost", "rightmost"), default="algebraic")
    p = add("bracket", "bracket of two path-algebroid sections in Hall form", cmd_bracket)
    p.add_argument("left")
    p.add_argument("right")
    p = add("anchor", "anchor vector field of a section", cmd_anchor)
    p.add_argument("expr")
    p = add("curv", "curvature components of a connection", cmd_curv)
    p.add_argument("--conn")
    p = add("jets", "covariant curvature jets at the origin", cmd_jets)
    p.add_argument("--conn")
    p.add_argument("--dmax", type=int)
    p = add("reconstruct", "radial-gauge connection with given jets", cmd_reconstruct)
    p.add_argument("--jets")
    p = add("chen", "Chen series of a piecewise-linear path", cmd_chen)
    p.add_argument("--path")
    p = add("transport", "parallel transport along a path", cmd_transport)
    p.add_argument("--path")
    p.add_argument("--conn")
    p.add_argument("--picard", action="store_true", help="use Picard iteration instead of the Chen series")
    p = add("source", "pair a polynomial with the Chen series (value at the start point)", cmd_source)
    p.add_argument("expr")
    p.add_argument("--path")
    p = add("dims", "free Lie algebra dimensions by degree", cmd_dims)
    p.add_argument("--max-deg", type=int)
    p = add("gens", "generator sequences of a degree, or the freeness table", cmd_gens)
    p.add_argument("--deg", type=int)
    p.add_argument("--table", action="store_true")
    p.add_argument("--max-deg", type=int)
    p = add("check", "run randomized invariant suites", cmd_check)
    p.add_argument("suite", choices=["all"] + list(SUITES))
    p.add_argument("--samples", type=int, default=20)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.n < 1 or args.cap < 0 or args.jobs < 1:
        parser.error("--n and --jobs must be positive and --cap non-negative")
    try:
        status = args.func(args)
    except (UsageError, ParseError) as exc:
        print(f"pathalg {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except PathAlgError as exc:
        print(f"pathalg {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
