"""Generating-function objects over a point, an interval or the circle.

An object is ``K_{t >= f(x)}`` for a piecewise-linear ``f``.  Morphisms
``K_{t >= f} -> K_{t >= g + c}`` are the cohomology of ``{f - g <= c}``,
so the Hom module is the sublevel persistence of ``h = f - g`` induced
to a Novikov module degree by degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from . import modcat
from .barcode import Bar, EqBarcode, PlainBarcode, induce
from .metrics import interleaving_distance
from .novikov import INF, NovikovScalar, exponent, format_q

BASES = ("pt", "interval", "circle")


class PLFunction:
    """Exact piecewise-linear function.

    On the circle (circumference 1) breakpoints lie in ``[0, 1)`` and the
    last piece wraps around to the first breakpoint.  On ``pt`` there is a
    single value.
    """

    def __init__(self, base: str, xs: Sequence = (), values: Sequence = (), x0=None, x1=None):
        if base not in BASES:
            raise ValueError("unknown base %r" % base)
        self.base = base
        xs = [Fraction(x) for x in xs]
        vs = [Fraction(v) for v in values]
        if len(xs) != len(vs):
            raise ValueError("breakpoints and values differ in length")
        if base == "pt":
            if len(vs) != 1:
                raise ValueError("a function on a point has exactly one value")
            xs = [Fraction(0)]
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if base == "circle":
            if not xs:
                raise ValueError("need at least one breakpoint")
            if xs[0] < 0 or xs[-1] >= 1:
                raise ValueError("circle breakpoints must lie in [0, 1)")
        if base == "interval":
            if len(xs) < 2:
                raise ValueError("an interval function needs both endpoints")
            if x0 is not None and Fraction(x0) != xs[0] or x1 is not None and Fraction(x1) != xs[-1]:
                raise ValueError("breakpoints must start and end at the interval endpoints")
        self.xs = tuple(xs)
        self.values = tuple(vs)

    @classmethod
    def constant(cls, base: str, value, x0=0, x1=1) -> "PLFunction":
        if base == "pt":
            return cls("pt", [0], [value])
        if base == "circle":
            return cls("circle", [0], [value])
        return cls("interval", [x0, x1], [value, value])

    def __len__(self):
        return len(self.xs)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        xs, vs = self.xs, self.values
        if self.base == "pt":
            return vs[0]
        if self.base == "circle":
            x = x - (x.numerator // x.denominator)
            if len(xs) == 1:
                return vs[0]
            if x < xs[0] or x >= xs[-1]:
                a, b = xs[-1], xs[0] + 1
                va, vb = vs[-1], vs[0]
                if x < xs[0]:
                    x += 1
                return va + (vb - va) * (x - a) / (b - a)
        elif not xs[0] <= x <= xs[-1]:
            raise ValueError("%s is outside the interval" % x)
        for k in range(len(xs) - 1):
            if xs[k] <= x <= xs[k + 1]:
                return vs[k] + (vs[k + 1] - vs[k]) * (x - xs[k]) / (xs[k + 1] - xs[k])
        return vs[-1]

    def _combine(self, other: "PLFunction", op) -> "PLFunction":
        if self.base != other.base:
            raise ValueError("base mismatch: %s vs %s" % (self.base, other.base))
        if self.base == "interval" and (self.xs[0], self.xs[-1]) != (other.xs[0], other.xs[-1]):
            raise ValueError("interval endpoints differ")
        xs = sorted(set(self.xs) | set(other.xs))
        return PLFunction(self.base, xs, [op(self(x), other(x)) for x in xs])

    def __add__(self, other):
        if not isinstance(other, PLFunction):
            return PLFunction(self.base, self.xs, [v + Fraction(other) for v in self.values])
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        if not isinstance(other, PLFunction):
            return self + (-Fraction(other))
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return PLFunction(self.base, self.xs, [-v for v in self.values])

    def __eq__(self, other):
        return isinstance(other, PLFunction) and (self.base, self.xs, self.values) == \
            (other.base, other.xs, other.values)

    def __repr__(self):
        return "PLFunction(%s, %s, %s)" % (self.base, list(map(str, self.xs)), list(map(str, self.values)))

    def oscillation(self) -> Fraction:
        return max(self.values) - min(self.values)

    def perturb(self, magnitude) -> "PLFunction":
        """Add ``magnitude * 2^-(k+1)`` at the ``k``-th breakpoint to split ties."""
        m = Fraction(magnitude)
        return PLFunction(self.base, self.xs, [v + m / 2 ** (k + 1) for k, v in enumerate(self.values)])

    # -- combinatorics on the breakpoint graph
    def neighbours(self, k: int) -> List[int]:
        n = len(self.xs)
        if self.base == "pt" or n == 1:
            return []
        if self.base == "circle":
            return [(k - 1) % n, (k + 1) % n]
        return [j for j in (k - 1, k + 1) if 0 <= j < n]

    def edges(self) -> List[Tuple[int, int]]:
        n = len(self.xs)
        if self.base == "pt" or n == 1:
            return []
        out = [(k, k + 1) for k in range(n - 1)]
        if self.base == "circle":
            out.append((n - 1, 0))
        return out


def critical_points(h: PLFunction) -> List[int]:
    """Breakpoints where the slope changes sign (interval endpoints count when minimal)."""
    vs, n = h.values, len(h.xs)
    if h.base == "pt":
        return [0]
    if h.base == "circle" and n == 1:
        return []
    out = []
    for k in range(n):
        if h.base == "interval" and k in (0, n - 1):
            j = 1 if k == 0 else n - 2
            if vs[k] < vs[j]:
                out.append(k)
            continue
        a, b = vs[(k - 1) % n], vs[(k + 1) % n]
        if (vs[k] - a) * (b - vs[k]) < 0:
            out.append(k)
    return out


def is_generic(h: PLFunction) -> bool:
    """No flat pieces and pairwise distinct critical values."""
    if h.base == "pt":
        return True
    if h.base == "circle" and len(h.xs) == 1:
        return False  # constant on the whole circle
    if any(h.values[a] == h.values[b] for a, b in h.edges()):
        return False
    vals = [h.values[k] for k in critical_points(h)]
    return len(set(vals)) == len(vals)


@dataclass
class GFObject:
    f: PLFunction
    label: str = ""


# ---------------------------------------------------------------------------
# sublevel persistence


def sublevel_persistence(h: PLFunction) -> PlainBarcode:
    """Union-find persistence of the lower-star filtration of ``h``.

    Vertices enter in order of value (ties by index); an edge enters with
    its higher endpoint.  Merges follow the elder rule.  On the circle the
    edge closing the loop creates the degree-1 class.
    """
    if h.base == "pt":
        return PlainBarcode([Bar(h.values[0], INF, 0)])
    n = len(h.xs)
    if h.base == "circle" and n == 1:
        return PlainBarcode([Bar(h.values[0], INF, 0), Bar(h.values[0], INF, 1)])
    vs = h.values
    order = sorted(range(n), key=lambda k: (vs[k], k))
    rank = {k: r for r, k in enumerate(order)}
    parent = list(range(n))
    birth = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    bars = []
    added = set()
    for k in order:
        added.add(k)
        birth[k] = vs[k]
        for j in h.neighbours(k):
            if j not in added:
                continue
            rk, rj = find(k), find(j)
            if rk == rj:
                bars.append(Bar(vs[k], INF, 1))
                continue
            # the younger root dies
            young, old = (rk, rj) if rank[rk] > rank[rj] else (rj, rk)
            if birth[young] < vs[k]:
                bars.append(Bar(birth[young], vs[k] - birth[young], 0))
            parent[young] = old
    bars.append(Bar(vs[order[0]], INF, 0))
    return PlainBarcode(bars)


def _sublevel_components(h: PLFunction, c) -> List[Tuple[Fraction, Fraction]]:
    """Connected components of ``{h <= c}`` as closed parameter intervals.

    On the circle a component may wrap (``end > 1``); the whole circle is
    returned as ``(0, 1)`` with a marker end of ``INF``.
    """
    c = Fraction(c)
    xs, vs = list(h.xs), list(h.values)
    if h.base == "circle":
        xs = xs + [xs[0] + 1]
        vs = vs + [vs[0]]
    segs = []
    for k in range(len(xs) - 1):
        a, b, va, vb = xs[k], xs[k + 1], vs[k], vs[k + 1]
        if va <= c and vb <= c:
            segs.append((a, b))
        elif va <= c:
            segs.append((a, a + (b - a) * (c - va) / (vb - va)))
        elif vb <= c:
            segs.append((b - (b - a) * (c - vb) / (va - vb), b))
    merged = []
    for s in segs:
        if merged and merged[-1][1] >= s[0]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], s[1]))
        else:
            merged.append(s)
    if h.base == "circle" and merged:
        start, end = xs[0], xs[-1]
        if len(merged) == 1 and merged[0] == (start, end):
            return [(start, INF)]
        if len(merged) > 1 and merged[0][0] == start and merged[-1][1] == end:
            first = merged.pop(0)
            merged[-1] = (merged[-1][0], first[1] + 1)
    return merged


def _contains(comp, x, circle: bool) -> bool:
    a, b = comp
    if b == INF:
        return True
    if circle:
        return a <= x <= b or a <= x + 1 <= b
    return a <= x <= b


def _rank(h: PLFunction, s, t, degree: int) -> int:
    """Rank of ``H^degree({h <= t}) -> H^degree({h <= s})`` restriction for ``s <= t``."""
    small, big = _sublevel_components(h, s), _sublevel_components(h, t)
    circle = h.base == "circle"
    if degree == 1:
        return int(circle and bool(small) and small[0][1] == INF)
    hit = set()
    for comp in small:
        for idx, other in enumerate(big):
            if _contains(other, comp[0], circle):
                hit.add(idx)
                break
    return len(hit)


def brute_force_persistence(h: PLFunction) -> PlainBarcode:
    """Barcode from ranks of sublevel-set inclusions on the critical-value grid."""
    if h.base == "pt":
        return PlainBarcode([Bar(h.values[0], INF, 0)])
    grid = sorted(set(h.values))
    pts = [grid[0] - 1] + grid
    m = len(grid)
    bars = []
    for deg in (0, 1):
        def r(i, j):
            if i == 0:
                return 0
            return _rank(h, pts[i], pts[j], deg)
        for i in range(1, m + 1):
            for j in range(i + 1, m + 1):
                mult = r(i, j - 1) - r(i - 1, j - 1) - r(i, j) + r(i - 1, j)
                bars.extend([Bar(pts[i], pts[j] - pts[i], deg)] * mult)
            mult = r(i, m) - r(i - 1, m)
            bars.extend([Bar(pts[i], INF, deg)] * mult)
    return PlainBarcode(bars)


# ---------------------------------------------------------------------------
# Hom modules


def hom_barcode(F: GFObject, G: GFObject) -> PlainBarcode:
    if F.f.base != G.f.base:
        raise ValueError("base mismatch: %s vs %s" % (F.f.base, G.f.base))
    return sublevel_persistence(F.f - G.f)


def hom_module(F: GFObject, G: GFObject, cutoff=INF) -> Dict[int, EqBarcode]:
    """``Hom^k`` as Novikov modules, one EqBarcode per cohomological degree."""
    bars = hom_barcode(F, G)
    cutoff = exponent(cutoff)
    if cutoff != INF:
        bars = PlainBarcode(Bar(b.birth, INF if b.length >= cutoff else b.length, b.degree)
                            for b in bars.bars)
    degrees = [0, 1] if F.f.base == "circle" else [0]
    return {k: induce(bars, k, cutoff) for k in degrees}


def hom_generators(F: GFObject, G: GFObject) -> List[Tuple[int, Fraction]]:
    """``(degree, valuation)`` of the free generators: ``T^max(0, birth)``."""
    return [(b.degree, max(Fraction(0), b.birth)) for b in hom_barcode(F, G).bars if b.length == INF]


def intersection_count_check(F: GFObject, G: GFObject) -> Tuple[int, int]:
    """``(sum_k dim H^k(Hom (x)^L kappa), #critical points of f - g)``."""
    h = F.f - G.f
    if h.base == "interval":
        raise ValueError("the intersection estimate is stated for a point or the circle")
    if not is_generic(h):
        raise ValueError("f - g is not generic; use PLFunction.perturb")
    lhs = 0
    for E in hom_module(F, G).values():
        tor0, tor1 = modcat.base_change(E.normal_form, modcat.RESIDUE)
        lhs += tor0 + tor1
    return lhs, len(critical_points(h))


def hamiltonian_shift(F: GFObject, h: PLFunction) -> GFObject:
    return GFObject(F.f + h, F.label + "+h" if F.label else "")


def stability_check(F: GFObject, G: GFObject, h: PLFunction) -> Tuple[object, Fraction]:
    """``(max_k d_I upper bound between shifted and unshifted Hom^k, osc(h))``."""
    if h.base != F.f.base:
        raise ValueError("base mismatch")
    before = hom_module(F, G)
    after = hom_module(hamiltonian_shift(F, h), G)
    bound = Fraction(0)
    for k in before:
        bound = max(bound, interleaving_distance(after[k], before[k]).upper)
    osc = h.oscillation()
    if bound > osc:
        raise AssertionError("stability violated: d_I %s > osc %s" % (format_q(bound), format_q(osc)))
    return bound, osc


# ---------------------------------------------------------------------------
# rank-one local systems on the circle


@dataclass(frozen=True)
class NovikovLocalSystem:
    cutoff: object
    monodromy: NovikovScalar

    def __post_init__(self):
        if not self.monodromy.is_unit():
            raise ValueError("monodromy must be a unit")
        if self.monodromy.cutoff != self.cutoff:
            raise ValueError("monodromy lives at the wrong cutoff")


def cl(b: NovikovScalar, cutoff=None) -> NovikovLocalSystem:
    """The rank-one system on ``Lambda_0/T^c`` glued by ``1 + b``."""
    c = b.cutoff if cutoff is None else exponent(cutoff)
    if c == INF:
        raise ValueError("classification works modulo a finite cutoff")
    b = b.with_cutoff(c)
    if not b.is_zero() and not b.valuation() > 0:
        raise ValueError("b must have positive valuation")
    return NovikovLocalSystem(c, NovikovScalar.one(c, b.field) + b)


def cl_invert(L: NovikovLocalSystem) -> NovikovScalar:
    return L.monodromy - NovikovScalar.one(L.cutoff, L.monodromy.field)


def isomorphic(L1: NovikovLocalSystem, L2: NovikovLocalSystem) -> bool:
    """Rank one: conjugation is trivial, so only the monodromies matter."""
    return L1.cutoff == L2.cutoff and L1.monodromy == L2.monodromy


# ---------------------------------------------------------------------------
# text format


def parse_pl(text: str) -> PLFunction:
    """``base circle|interval x0 x1|pt`` followed by ``x v`` lines."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("base"):
        raise ValueError("first line must be 'base ...'")
    head = lines[0].split()
    base = head[1] if len(head) > 1 else ""
    pts = []
    for ln in lines[1:]:
        toks = ln.split()
        if base == "pt" and len(toks) == 1:
            toks = ["0"] + toks
        if len(toks) != 2:
            raise ValueError("expected 'x v', got %r" % ln)
        pts.append((Fraction(toks[0]), Fraction(toks[1])))
    if base == "interval":
        if len(head) != 4:
            raise ValueError("base interval needs x0 x1")
        return PLFunction("interval", [p[0] for p in pts], [p[1] for p in pts], head[2], head[3])
    if base in ("circle", "pt"):
        return PLFunction(base, [p[0] for p in pts], [p[1] for p in pts])
    raise ValueError("unknown base %r" % base)


def serialize_pl(f: PLFunction) -> str:
    head = "base %s" % f.base
    if f.base == "interval":
        head += " %s %s" % (format_q(f.xs[0]), format_q(f.xs[-1]))
    return "\n".join([head] + ["%s %s" % (format_q(x), format_q(v)) for x, v in zip(f.xs, f.values)]) + "\n"

