"""Command line front end.

Exit codes: 0 success, 1 a requested check failed, 2 usage error, 3 parse error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import gradmod as G
from . import spda
from .chart import FORMATS, render_chart
from .config import DEFAULT
from .errors import AlgebraError, IsoSearchInconclusive, ModuleFormatError, ParseError
from .ext import ext_chart
from .models import SECTIONS, paper_suite
from .steenrod import Sq, antipode, format_element, parse_element

OK, FAILED, USAGE, PARSE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_module(path: str) -> G.GradedModule:
    try:
        return G.from_json(_read(path))
    except ParseError as e:
        e.source = path
        raise


def _load_algebra(path: str, check: bool = False) -> spda.PresentedAlgebra:
    try:
        return spda.from_json(_read(path), check=check)
    except ParseError as e:
        e.source = path
        raise


def _check_degree(theta, bound: int) -> None:
    if theta.degree is not None and theta.degree > bound:
        raise UsageError(f"degree {theta.degree} exceeds --degree-bound {bound}")


# ------------------------------------------------------------------ commands


def cmd_adem(args, out) -> int:
    theta = parse_element(args.expr)
    _check_degree(theta, args.degree_bound)
    print(format_element(theta), file=out)
    return OK


def cmd_antipode(args, out) -> int:
    text = args.expr.strip()
    theta = Sq(int(text)) if text.isdigit() else parse_element(text)
    _check_degree(theta, args.degree_bound)
    print(format_element(antipode(theta)), file=out)
    return OK


def cmd_module_check(args, out) -> int:
    m = _load_module(args.file)
    dims = ", ".join(f"{d}:{n}" for d, n in sorted(m.dims().items()))
    print(f"module over {m.algebra}, dimension {m.dim} ({dims})", file=out)
    bad = G.check_axioms(m)
    for v in bad:
        print(f"violation: {v}", file=out)
    print("axioms: " + ("FAIL" if bad else "pass"), file=out)
    return FAILED if bad else OK


def cmd_module_tensor(args, out) -> int:
    a, b = _load_module(args.a), _load_module(args.b)
    t = G.tensor(a, b)
    if not args.split:
        out.write(G.to_json(t))
        return OK
    sp = G.split_free_summands(t)
    print("free summands: " + (" ".join(f"A(1)[{s}]" for s in sorted(sp.shifts)) or "none"), file=out)
    print("remainder:", file=out)
    out.write(G.to_json(sp.remainder))
    return OK


def cmd_module_dual(args, out) -> int:
    out.write(G.to_json(G.dualize(_load_module(args.file))))
    return OK


def cmd_spda_verify(args, out) -> int:
    P = _load_algebra(args.file)
    dims = " ".join(str(x) for x in P.dims())
    print(f"dims: {dims}", file=out)
    problems = P.problems()
    for p in problems:
        print(f"problem: {p}", file=out)
    ok = not problems
    if P.dimension is not None:
        for rep in (spda.verify_pd(P), spda.verify_sharp_pd(P)):
            print(rep, file=out)
            ok = ok and rep.ok
    else:
        print("no PD degree given: only the unstable-algebra axioms were checked", file=out)
    return OK if ok else FAILED


def cmd_spda_classes(args, out) -> int:
    P = _load_algebra(args.file)
    if P.dimension is None:
        raise UsageError("characteristic classes need a PD degree (\"dimension\")")
    pd = spda.verify_pd(P)
    if not pd.ok:
        print(pd, file=out)
        return FAILED
    try:
        table = spda.characteristic_classes(P)
    except AlgebraError as e:
        print(f"FAIL: {e}", file=out)
        return FAILED
    print(table.format(), file=out)
    rep = spda.verify_char_identities(table, P.dimension)
    print(rep, file=out)
    return OK if rep.ok else FAILED


def cmd_ext(args, out) -> int:
    m = _load_module(args.file)
    if m.algebra != "A(1)":
        m = G.restrict(m)
    out.write(render_chart(ext_chart(m, args.smax, args.tmax), args.format))
    return OK


def cmd_paper_suite(args, out) -> int:
    only = None if args.only is None else [s for part in args.only for s in part.split(",") if s]
    if only:
        unknown = sorted(set(only) - {name for name, _ in SECTIONS})
        if unknown:
            raise UsageError(f"unknown section(s): {', '.join(unknown)}")
    rep = paper_suite(only)
    out.write(rep.to_json() if args.json else rep.format())
    return OK if rep.passed else FAILED


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqalg", description="Computations with the mod 2 Steenrod algebra.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("adem", help="admissible form of a Steenrod algebra element")
    a.add_argument("expr")
    a.add_argument("--degree-bound", type=int, default=DEFAULT.degree_bound)
    a.set_defaults(func=cmd_adem)

    a = sub.add_parser("antipode", help="chi(Sq^k), or chi of an element")
    a.add_argument("expr", help="an integer k or an element such as 'Sq2 Sq1'")
    a.add_argument("--degree-bound", type=int, default=DEFAULT.degree_bound)
    a.set_defaults(func=cmd_antipode)

    mod = sub.add_parser("module", help="graded module files").add_subparsers(dest="action", required=True)
    c = mod.add_parser("check", help="verify the module axioms")
    c.add_argument("file")
    c.set_defaults(func=cmd_module_check)
    c = mod.add_parser("tensor", help="tensor product with the diagonal action")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--split", action="store_true", help="split off free A(1) summands")
    c.set_defaults(func=cmd_module_tensor)
    c = mod.add_parser("dual", help="dual module")
    c.add_argument("file")
    c.set_defaults(func=cmd_module_dual)

    alg = sub.add_parser("spda", help="presented algebra files").add_subparsers(dest="action", required=True)
    c = alg.add_parser("verify", help="algebra axioms and Poincare duality checks")
    c.add_argument("file")
    c.set_defaults(func=cmd_spda_verify)
    c = alg.add_parser("classes", help="Wu, Stiefel-Whitney and dual Stiefel-Whitney classes")
    c.add_argument("file")
    c.set_defaults(func=cmd_spda_classes)

    e = sub.add_parser("ext", help="Ext over A(1) of a module file")
    e.add_argument("file")
    e.add_argument("--smax", type=int, default=DEFAULT.s_max)
    e.add_argument("--tmax", type=int, default=DEFAULT.t_max)
    e.add_argument("--format", choices=FORMATS, default="ascii")
    e.set_defaults(func=cmd_ext)

    s = sub.add_parser("paper-suite", help="run the built-in verification suite")
    s.add_argument("--json", action="store_true")
    s.add_argument("--only", nargs="*", metavar="SECTION", help="restrict to these sections (none: empty run)")
    s.set_defaults(func=cmd_paper_suite)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return args.func(args, out)
    except ParseError as e:
        where = f"{e.source}:" if getattr(e, "source", None) else ""
        print(f"parse error: {where}{e.line}:{e.column}: {e.message}", file=err)
        return PARSE
    except ModuleFormatError as e:
        print(f"invalid module: {e}", file=err)
        return PARSE
    except UsageError as e:
        print(f"error: {e}", file=err)
        return USAGE
    except (AlgebraError, IsoSearchInconclusive) as e:
        print(f"FAIL: {e}", file=err)
        return FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
