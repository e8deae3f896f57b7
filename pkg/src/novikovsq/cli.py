"""Command-line front end.

Exit codes: 0 on success, 1 on a domain error, 2 on a parse error.
"""

import argparse
import random
import sys
from fractions import Fraction

from . import barcode, curved, metrics, modcat, persist1d
from .novikov import INF, NovikovScalar, exponent, field_from_spec, format_q, format_scalar, parse_scalar


class ParseError(Exception):
    pass


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(str(exc))


def _parsing(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, KeyError, IndexError, ZeroDivisionError) as exc:
        raise ParseError(str(exc))


def parse_matrix(text, field, cutoff=None):
    """``rows cols [cutoff]`` header, then one row per line of comma-separated scalars."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) not in (2, 3):
        raise ValueError("header must be 'rows cols [cutoff]'")
    rows, cols = int(head[0]), int(head[1])
    cut = exponent(head[2]) if len(head) == 3 else INF
    if cutoff is not None:
        cut = cutoff
    body = lines[1:]
    if len(body) != rows:
        raise ValueError("expected %d rows, found %d" % (rows, len(body)))
    entries = []
    for ln in body:
        row = [parse_scalar(x, cut, field).with_cutoff(cut) for x in ln.split(",")]
        if len(row) != cols:
            raise ValueError("row %r has %d entries, expected %d" % (ln, len(row), cols))
        entries.append(row)
    return modcat.PresentationModule(entries, cols, cut, field)


def _eq_barcode(path, cutoff):
    nf = _parsing(modcat.parse_normal_form, _read(path))
    return barcode.EqBarcode.from_normal_form(nf, INF if cutoff is None else cutoff)


def _dump_matrix(name, M):
    print("%s:" % name)
    for row in M:
        print("  " + ", ".join(format_scalar(x) for x in row))


# ---------------------------------------------------------------------------
# subcommands


def cmd_nf(args):
    M = _parsing(parse_matrix, _read(args.matrix), args.field_obj, args.cutoff_q)
    print(modcat.serialize_normal_form(modcat.normal_form(M)))


def cmd_hom(args):
    E = _eq_barcode(args.source, args.cutoff_q)
    F = _eq_barcode(args.target, args.cutoff_q)
    for k, nf in sorted(barcode.hom(E, F).items()):
        print("Hom^%d %s" % (k, modcat.serialize_normal_form(nf)))


def cmd_dist(args):
    E = _eq_barcode(args.E, args.cutoff_q)
    F = _eq_barcode(args.F, args.cutoff_q)
    rep = metrics.interleaving_distance(E, F, args.field_obj)
    print(rep)
    if args.witness and rep.witness is not None:
        print("epsilon %s" % format_q(rep.witness.epsilon))
        _dump_matrix("alpha", rep.witness.alpha.entries)
        _dump_matrix("beta", rep.witness.beta.entries)


def cmd_mc(args):
    A = _parsing(curved.parse_dga, _read(args.dga), args.field_obj, args.cutoff_q)
    leading = None
    if args.leading:
        terms = {}
        for item in args.leading:
            if "=" not in item:
                raise ParseError("--leading expects NAME=SCALAR")
            name, lit = item.split("=", 1)
            terms[name.strip()] = _parsing(parse_scalar, lit, A.cutoff, A.field)
        leading = _parsing(A.element, terms)
    res = curved.mc_solve(A, leading)
    if isinstance(res, curved.ObstructionReport):
        print(res)
        return
    print("mc b=%s" % A.format_element(res.b))
    if args.witness:
        print("levels %s" % (" ".join(format_q(v) for v in res.levels) or "none"))
        print("residual %s" % A.format_element(curved.mc_residual(A, res.b)))


def cmd_tc(args):
    T = _parsing(curved.parse_twisted, _read(args.complex), args.field_obj, args.cutoff_q)
    res = curved.tc_residual(T)
    ok = curved.tc_residual_is_zero(T)
    print("residual %s" % ("zero" if ok else "nonzero"))
    if args.witness:
        for (i, j), M in sorted(res.items()):
            _dump_matrix("r_%d%d" % (i, j), M)
    tot = curved.tc_totalize(T)
    print("totalization square_zero=%s" % ("true" if tot.square_is_zero() else "false"))
    if ok:
        for p, E in sorted(curved.tc_cohomology(tot).items()):
            print("H^%d %s" % (p, E))


def cmd_persist(args):
    fs = [_parsing(persist1d.parse_pl, _read(p)) for p in args.files]
    need = {"bars": 1, "hom": 2, "intersect": 2, "stability": 3}[args.mode]
    if len(fs) != need:
        raise ParseError("persist %s takes %d file(s)" % (args.mode, need))
    if args.mode == "bars":
        print(barcode.serialize_plain(persist1d.sublevel_persistence(fs[0])).rstrip("\n"))
        return
    F, G = persist1d.GFObject(fs[0], "F"), persist1d.GFObject(fs[1], "G")
    if args.mode == "hom":
        cut = INF if args.cutoff_q is None else args.cutoff_q
        for k, E in sorted(persist1d.hom_module(F, G, cut).items()):
            print("Hom^%d %s" % (k, E))
    elif args.mode == "intersect":
        lhs, rhs = persist1d.intersection_count_check(F, G)
        print("lhs=%d rhs=%d equal=%s" % (lhs, rhs, "true" if lhs == rhs else "false"))
    else:
        bound, osc = persist1d.stability_check(F, G, fs[2])
        print("d_I_upper=%s osc=%s" % (format_q(bound), format_q(osc)))


def cmd_cl(args):
    if args.cutoff_q is None:
        raise ParseError("cl needs --cutoff")
    b = _parsing(parse_scalar, args.b, args.cutoff_q, args.field_obj).with_cutoff(args.cutoff_q)
    L = persist1d.cl(b, args.cutoff_q)
    print("monodromy %s" % format_scalar(L.monodromy))
    print("cl_invert %s" % format_scalar(persist1d.cl_invert(L)))


# ---------------------------------------------------------------------------
# demos


def _rand_q(rng, lo, hi, den=6):
    return Fraction(rng.randint(lo * den, hi * den), den)


def demo_intersection(rng, n=10):
    print("lhs rhs")
    count = 0
    while count < n:
        k = rng.randint(2, 8)
        xs = sorted(rng.sample(range(24), k))
        f = persist1d.PLFunction("circle", [Fraction(x, 24) for x in xs], [_rand_q(rng, 0, 3) for _ in xs])
        g = persist1d.PLFunction.constant("circle", 0)
        if not persist1d.is_generic(f - g):
            continue
        lhs, rhs = persist1d.intersection_count_check(persist1d.GFObject(f), persist1d.GFObject(g))
        print("%d %d" % (lhs, rhs))
        count += 1


def demo_distance(rng, n=10):
    for _ in range(n):
        a, b = Fraction(rng.randint(1, 30), 6), Fraction(rng.randint(1, 30), 6)
        E, F = barcode.EqBarcode([a]), barcode.EqBarcode([b])
        print("%s vs %s: %s" % (E, F, metrics.interleaving_distance(E, F)))


def demo_mc(rng, n=1):
    c = Fraction(1)
    A = curved.CurvedDGA(["1", "x", "y"], [0, 1, 2], {("x", "x"): {"y": 1}},
                         {"x": {"y": NovikovScalar.monomial(c, 1, 4)}}, cutoff=4, unit="1")
    res = curved.mc_solve(A, A.element({"x": NovikovScalar.monomial(c, -1, 4)}))
    print("mc b=%s residual=%s" % (A.format_element(res.b), A.format_element(curved.mc_residual(A, res.b))))
    B = curved.CurvedDGA(["1", "y"], [0, 2], curvature={"y": NovikovScalar.monomial(c, 1, 4)},
                         cutoff=4, unit="1")
    print(curved.mc_solve(B))


def demo_stability(rng, n=10):
    print("d_I_upper osc")
    for _ in range(n):
        def rf():
            xs = sorted(rng.sample(range(24), rng.randint(2, 6)))
            return persist1d.PLFunction("circle", [Fraction(x, 24) for x in xs],
                                        [_rand_q(rng, 0, 3) for _ in xs])
        bound, osc = persist1d.stability_check(persist1d.GFObject(rf()), persist1d.GFObject(rf()), rf())
        print("%s %s" % (format_q(bound), format_q(osc)))


def demo_cl(rng, n=10):
    print("b round_trip")
    cut = Fraction(2)
    for _ in range(n):
        terms = [(_rand_q(rng, 0, 2) or Fraction(1, 6), rng.randint(-3, 3)) for _ in range(rng.randint(0, 3))]
        b = NovikovScalar([(e, c) for e, c in terms if 0 < e < cut], cut)
        back = persist1d.cl_invert(persist1d.cl(b))
        print("%s %s" % (format_scalar(b), "true" if back == b else "false"))


def demo_nakayama(rng, n=10):
    print("lambda_rank tor0 tor1")
    cut = Fraction(17)
    for _ in range(n):
        rows, cols = rng.randint(1, 4), rng.randint(1, 4)
        entries = [[NovikovScalar([(_rand_q(rng, 0, 4), rng.randint(-2, 2))], cut) for _ in range(cols)]
                   for _ in range(rows)]
        nf = modcat.normal_form(modcat.PresentationModule(entries, cols, cut))
        tor0, tor1 = modcat.base_change(nf, modcat.RESIDUE)
        print("%d %d %d" % (modcat.base_change(nf, modcat.FIELD), tor0, tor1))


DEMOS = {
    "cl": demo_cl,
    "nakayama": demo_nakayama,
    "intersection": demo_intersection,
    "distance": demo_distance,
    "mc": demo_mc,
    "stability": demo_stability,
}


def cmd_demo(args):
    rng = random.Random(args.seed)
    names = sorted(DEMOS) if args.name == "all" else [args.name]
    for name in names:
        print("== %s" % name)
        DEMOS[name](rng)


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cutoff", default=None, help="energy cutoff p/q or inf")
    common.add_argument("--field", default="q", help="coefficient field: q or fp:<p>")
    common.add_argument("--witness", action="store_true", help="dump witnesses")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized demos")

    parser = argparse.ArgumentParser(prog="novikovsq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nf", parents=[common], help="normal form of a presentation matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("hom", parents=[common], help="Hom^0 and Hom^1 between normal forms")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("dist", parents=[common], help="interleaving distance bracket")
    p.add_argument("E")
    p.add_argument("F")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("mc", parents=[common], help="solve the Maurer-Cartan equation")
    p.add_argument("dga")
    p.add_argument("--leading", action="append", help="prescribed first-order term NAME=SCALAR")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("tc", parents=[common], help="check and totalize a twisted complex")
    p.add_argument("complex")
    p.set_defaults(func=cmd_tc)

    p = sub.add_parser("persist", parents=[common], help="1-D generating-function computations")
    p.add_argument("mode", choices=["bars", "hom", "intersect", "stability"])
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_persist)

    p = sub.add_parser("cl", parents=[common], help="rank-one local system from b")
    p.add_argument("b")
    p.set_defaults(func=cmd_cl)

    p = sub.add_parser("demo", parents=[common], help="run a built-in demonstration")
    p.add_argument("name", choices=sorted(DEMOS) + ["all"])
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        args.field_obj = field_from_spec(args.field)
        args.cutoff_q = None if args.cutoff is None else exponent(args.cutoff)
    except (ValueError, ZeroDivisionError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    try:
        args.func(args)
    except ParseError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, AssertionError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
