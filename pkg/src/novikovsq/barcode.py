"""Barcode model of the equivariant Tamarkin category over a point.

Plain barcodes are direct sums of interval sheaves ``K_[b, b+l)`` on the
real line, graded by cohomological degree.  Inducing along the
translation action forgets births and leaves a Novikov module: a bar of
length ``l`` becomes ``Lambda_0/T^l`` and a ray becomes ``Lambda_0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

from . import modcat
from .modcat import NormalForm, identity, matmul, zeros
from .novikov import INF, QQ, CutoffMismatch, NovikovScalar, exponent, format_q


# ---------------------------------------------------------------------------
# plain (non-equivariant) barcodes


@dataclass(frozen=True, order=True)
class Bar:
    birth: Fraction
    length: object
    degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, "birth", exponent(self.birth))
        object.__setattr__(self, "length", exponent(self.length))
        if not self.length > 0:
            raise ValueError("bar length must be positive")

    @property
    def death(self):
        return self.birth + self.length

    def __str__(self):
        return "[%s, %s) deg %d" % (format_q(self.birth), format_q(self.death), self.degree)


class PlainBarcode:
    """Multiset of half-open bars ``[birth, birth+length)`` with degrees."""

    def __init__(self, bars: Iterable = ()):
        items = []
        for b in bars:
            if not isinstance(b, Bar):
                b = Bar(*b)
            items.append(b)
        self.bars = tuple(sorted(items, key=lambda b: (b.degree, b.birth, b.length)))

    def degrees(self):
        return sorted({b.degree for b in self.bars})

    def in_degree(self, k: int) -> "PlainBarcode":
        return PlainBarcode(b for b in self.bars if b.degree == k)

    def __add__(self, other: "PlainBarcode") -> "PlainBarcode":
        return PlainBarcode(self.bars + other.bars)

    def __eq__(self, other):
        return isinstance(other, PlainBarcode) and self.bars == other.bars

    def __hash__(self):
        return hash(self.bars)

    def __len__(self):
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def __repr__(self):
        return "PlainBarcode(%s)" % ", ".join(str(b) for b in self.bars)


def serialize_plain(b: PlainBarcode) -> str:
    lines = []
    for bar in b.bars:
        line = "%s %s" % (format_q(bar.birth), format_q(bar.length))
        if bar.degree:
            line += " %d" % bar.degree
        lines.append(line)
    return "\n".join(lines)


def parse_plain(text: str) -> PlainBarcode:
    bars = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError("bad bar line %r (expected 'birth length [degree]')" % line)
        deg = int(parts[2]) if len(parts) == 3 else 0
        bars.append(Bar(Fraction(parts[0]), exponent(parts[1]), deg))
    return PlainBarcode(bars)


# ---------------------------------------------------------------------------
# equivariant barcodes


@dataclass(frozen=True)
class EqBarcode:
    """``(+)_i Lambda_0/T^{torsion_i} (+) Lambda_0^free`` at an energy cutoff."""

    torsion: Tuple = ()
    free: int = 0
    cutoff: object = INF

    def __post_init__(self):
        nf = NormalForm(tuple(self.torsion), self.free)
        object.__setattr__(self, "torsion", nf.torsion)
        object.__setattr__(self, "cutoff", exponent(self.cutoff))
        if any(c > self.cutoff for c in nf.torsion):
            raise ValueError("torsion length beyond the cutoff")

    @classmethod
    def unit(cls, cutoff=INF) -> "EqBarcode":
        """The monoidal unit: one free summand."""
        return cls((), 1, cutoff)

    @classmethod
    def from_normal_form(cls, nf: NormalForm, cutoff=INF) -> "EqBarcode":
        return cls(nf.torsion, nf.free, cutoff)

    @property
    def normal_form(self) -> NormalForm:
        return NormalForm(self.torsion, self.free)

    def summands(self) -> List:
        """Summand lengths in matrix order: torsion descending, then free."""
        return list(self.torsion) + [INF] * self.free

    def rank(self) -> int:
        return len(self.torsion) + self.free

    def is_zero(self) -> bool:
        return not self.torsion and not self.free

    def direct_sum(self, other: "EqBarcode") -> "EqBarcode":
        _check_cutoffs(self, other)
        return EqBarcode(self.torsion + other.torsion, self.free + other.free, self.cutoff)

    def torsion_order(self):
        return modcat.torsion_order(self.normal_form)

    def __str__(self):
        return modcat.serialize_normal_form(self.normal_form)


def _check_cutoffs(a, b):
    if a.cutoff != b.cutoff:
        raise CutoffMismatch("cutoff mismatch: %s vs %s" % (format_q(a.cutoff), format_q(b.cutoff)))


# ---------------------------------------------------------------------------
# convolution


def _star_bars(x: Bar, y: Bar) -> List[Bar]:
    birth = x.birth + y.birth
    deg = x.degree + y.degree
    if x.length == INF and y.length == INF:
        return [Bar(birth, INF, deg)]
    if x.length == INF or y.length == INF:
        return [Bar(birth, min(x.length, y.length), deg)]
    lo, hi = min(x.length, y.length), max(x.length, y.length)
    # K_[0,l) * K_[0,m) = K_[0,min) in the same degree and K_[max,l+m) one
    # degree higher: the fibre of the addition map over t in (max, l+m) is
    # an open interval, whose compactly supported cohomology sits in degree 1
    return [Bar(birth, lo, deg), Bar(birth + hi, lo, deg + 1)]


def star(a, b):
    """Convolution.

    * two plain barcodes: convolution of interval sheaves (graded);
    * two equivariant barcodes: module tensor product (degree 0 part);
    * mixed: tensor of the equivariant side with ``Lambda_0/T^l`` for each
      degree-0 bar of the plain side.
    """
    if isinstance(a, PlainBarcode) and isinstance(b, PlainBarcode):
        out = []
        for x in a.bars:
            for y in b.bars:
                out.extend(_star_bars(x, y))
        return PlainBarcode(out)
    if isinstance(a, PlainBarcode):
        a, b = b, a
    if isinstance(b, PlainBarcode):
        b = induce(b)
        b = EqBarcode(b.torsion, b.free, a.cutoff)
    return derived_star(a, b)[0]


def derived_star(a: EqBarcode, b) -> Dict[int, EqBarcode]:
    """Derived tensor product: ``Tor_0`` in degree 0, ``Tor_1`` in degree -1."""
    if isinstance(b, PlainBarcode):
        graded = induce_graded(b)
        out: Dict[int, EqBarcode] = {}
        for deg, piece in graded.items():
            piece = EqBarcode(piece.torsion, piece.free, a.cutoff)
            for k, v in derived_star(a, piece).items():
                prev = out.get(deg + k, EqBarcode((), 0, a.cutoff))
                out[deg + k] = prev.direct_sum(v)
        return {k: v for k, v in out.items()}
    _check_cutoffs(a, b)
    tor0, tor1 = [], []
    free = a.free * b.free
    for x in a.torsion:
        tor0.extend([x] * b.free)
        for y in b.torsion:
            tor0.append(min(x, y))
            tor1.append(min(x, y))
    for y in b.torsion:
        tor0.extend([y] * a.free)
    return {0: EqBarcode(tor0, free, a.cutoff), -1: EqBarcode(tor1, 0, a.cutoff)}


def induce(b: PlainBarcode, degree: int = 0, cutoff=INF) -> EqBarcode:
    """Induction along the translation action, in one degree."""
    torsion = [x.length for x in b.bars if x.degree == degree and x.length != INF]
    free = sum(1 for x in b.bars if x.degree == degree and x.length == INF)
    return EqBarcode(torsion, free, cutoff)


def induce_graded(b: PlainBarcode, cutoff=INF) -> Dict[int, EqBarcode]:
    return {k: induce(b, k, cutoff) for k in b.degrees()}


# ---------------------------------------------------------------------------
# the projector  - * K_[0, inf)


@dataclass(frozen=True)
class RawInterval:
    """An interval of any endpoint type; ``right`` may be ``INF``."""

    left: Fraction
    right: object
    closed_left: bool = True
    closed_right: bool = False
    degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, "left", exponent(self.left))
        object.__setattr__(self, "right", exponent(self.right))
        if self.right == INF and self.closed_right:
            raise ValueError("an unbounded interval cannot be closed on the right")
        if self.right < self.left or (self.right == self.left and not (self.closed_left and self.closed_right)):
            raise ValueError("empty interval")

    @classmethod
    def parse(cls, text: str, degree: int = 0) -> "RawInterval":
        text = text.strip()
        inner = text[1:-1].split(",")
        return cls(exponent(inner[0]), exponent(inner[1]), text[0] == "[", text[-1] == "]", degree)


def compact_cohomology(left, right, closed_left, closed_right) -> Tuple[int, int]:
    """``(dim H^0_c, dim H^1_c)`` of an interval, from its cellular cochains.

    The interval is the union of its included endpoints (0-cells) and the
    open segment between them (a 1-cell).  Compactly supported cochains of
    a locally closed union of cells form the complex ``C^0 -> C^1`` with
    the incidence coboundary.
    """
    if right == INF:
        # an unbounded ray: add a point at infinity, which is never included
        closed_right = False
    verts = []
    if closed_left:
        verts.append("l")
    if closed_right and right != left:
        verts.append("r")
    if left == right:
        return (1, 0) if closed_left and closed_right else (0, 0)
    edges = 1
    # coboundary: each included endpoint maps onto the single edge
    rank = 1 if verts else 0
    h0 = len(verts) - rank
    h1 = edges - rank
    return h0, h1


def project(intervals: Sequence) -> PlainBarcode:
    """Apply the projector ``- * K_[0, inf)`` to raw interval sheaves.

    The stalk of ``K_I * K_[0, inf)`` at ``t`` is the compactly supported
    cohomology of ``I cap (-inf, t]``; the output records, for each
    degree, the set of ``t`` where that stalk is nonzero.
    """
    out = []
    for iv in intervals:
        if not isinstance(iv, RawInterval):
            iv = RawInterval(*iv)
        out.extend(_project_one(iv))
    return PlainBarcode(out)


def _stalk(iv: RawInterval, t) -> Tuple[int, int]:
    if t < iv.left or (t == iv.left and not iv.closed_left):
        return (0, 0)
    if t < iv.right:
        return compact_cohomology(iv.left, t, iv.closed_left, True)
    return compact_cohomology(iv.left, iv.right, iv.closed_left, iv.closed_right)


def _project_one(iv: RawInterval) -> List[Bar]:
    a, b = iv.left, iv.right
    samples = [a - 1, a]
    if b == INF:
        samples += [a + 1, a + 2]
    else:
        samples += [(a + b) / 2, b, b + 1] if b != a else [a + 1]
    bars = []
    for k in (0, 1):
        on = [t for t in samples if _stalk(iv, t)[k]]
        if not on:
            continue
        start = on[0]
        end = INF if on[-1] == samples[-1] else None
        if end is None:
            after = [t for t in samples if t > on[-1]]
            end = after[0]
        # stalk support is a half-open interval [start, end)
        bars.append(Bar(start, end - start if end != INF else INF, iv.degree + k))
    return bars


# ---------------------------------------------------------------------------
# graded Hom


def hom(E: EqBarcode, F: EqBarcode) -> Dict[int, NormalForm]:
    """``Ext^k(E, F)`` for ``k = 0, 1`` from two-term free resolutions.

    Each cyclic summand ``Lambda_0/T^a`` of ``E`` is resolved by
    ``Lambda_0 --T^a--> Lambda_0``; applying ``Hom(-, N)`` gives
    ``N --T^a--> N`` whose kernel and cokernel are ``Ext^0`` and ``Ext^1``.
    The valuation ring has global dimension one, so nothing lives in
    higher degrees.
    """
    _check_cutoffs(E, F)
    ext0 = NormalForm()
    ext1 = NormalForm()
    for a in E.summands():
        for b in F.summands():
            if a == INF:
                ext0 = ext0.direct_sum(NormalForm((b,), 0) if b != INF else NormalForm((), 1))
                continue
            mult = [[NovikovScalar.monomial(a, 1)]]
            ext0 = ext0.direct_sum(modcat.kernel(mult, [b], [b]))
            ext1 = ext1.direct_sum(modcat.cokernel(mult, [b], [b]))
    return {0: ext0, 1: ext1}


def hom_generator_valuation(a, b):
    """Valuation of the distinguished generator of ``Hom(Lambda_0/T^a, Lambda_0/T^b)``."""
    if b == INF:
        return 0 if a == INF else INF
    if a == INF:
        return Fraction(0)
    return max(Fraction(0), b - a)


# ---------------------------------------------------------------------------
# morphisms


class ModuleMap:
    """Matrix of Novikov scalars between decomposed modules.

    Rows index target summands and columns index source summands (both in
    :meth:`EqBarcode.summands` order).  Entries are stored modulo
    ``T^(target length)``.
    """

    def __init__(self, source: EqBarcode, target: EqBarcode, entries, degree: int = 0,
                 field=QQ, check: bool = True):
        _check_cutoffs(source, target)
        self.source = source
        self.target = target
        self.degree = degree
        self.field = field
        cut = source.cutoff
        src, tgt = source.summands(), target.summands()
        if len(entries) != len(tgt) or any(len(r) != len(src) for r in entries):
            raise ValueError("map shape %s does not match %dx%d"
                             % ((len(entries), len(entries[0]) if entries else 0), len(tgt), len(src)))
        rows = []
        for j, b in enumerate(tgt):
            row = []
            for i, a in enumerate(src):
                x = entries[j][i]
                if not isinstance(x, NovikovScalar):
                    x = NovikovScalar.constant(x, cut, field)
                x = x.with_cutoff(cut).truncate(b)
                if check and degree == 0:
                    need = hom_generator_valuation(a, b)
                    if x.valuation() < need:
                        raise ValueError(
                            "entry (%d,%d) has valuation %s < %s required for a map "
                            "Lambda_0/T^%s -> Lambda_0/T^%s"
                            % (j, i, format_q(x.valuation()), format_q(need), format_q(a), format_q(b)))
                row.append(x)
            rows.append(row)
        self.entries = rows

    @classmethod
    def zero(cls, source, target, field=QQ):
        return cls(source, target, zeros(target.rank(), source.rank(), source.cutoff, field), 0, field)

    @classmethod
    def scalar(cls, E: EqBarcode, a, coeff=1, field=QQ):
        """``coeff * T^a * id_E``."""
        m = zeros(E.rank(), E.rank(), E.cutoff, field)
        for i in range(E.rank()):
            m[i][i] = NovikovScalar.monomial(a, coeff, E.cutoff, field)
        return cls(E, E, m, 0, field)

    @classmethod
    def identity(cls, E: EqBarcode, field=QQ):
        return cls(E, E, identity(E.rank(), E.cutoff, field), 0, field)

    def shift(self, a) -> "ModuleMap":
        """``T^a * self``."""
        return ModuleMap(self.source, self.target,
                         [[x.shift(a) for x in r] for r in self.entries], self.degree, self.field)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        self._same_shape(other)
        return ModuleMap(self.source, self.target,
                         [[x + y for x, y in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                         self.degree, self.field)

    def __neg__(self):
        return ModuleMap(self.source, self.target, [[-x for x in r] for r in self.entries],
                         self.degree, self.field)

    def __sub__(self, other):
        return self + (-other)

    def _same_shape(self, other):
        if (self.source, self.target, self.degree) != (other.source, other.target, other.degree):
            raise ValueError("maps have different source/target/degree")

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.entries for x in r)

    def __eq__(self, other):
        if not isinstance(other, ModuleMap):
            return NotImplemented
        return (self.source, self.target, self.degree) == (other.source, other.target, other.degree) \
            and self.entries == other.entries

    def __repr__(self):
        return "ModuleMap(%s -> %s, deg %d)" % (self.source, self.target, self.degree)


def compose(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    """``g o f`` (apply ``f`` first)."""
    if f.target != g.source:
        raise ValueError("maps are not composable: %s vs %s" % (f.target, g.source))
    entries = matmul(g.entries, f.entries, f.source.cutoff, f.field) if f.entries and g.entries else \
        zeros(g.target.rank(), f.source.rank(), f.source.cutoff, f.field)
    return ModuleMap(f.source, g.target, entries, f.degree + g.degree, f.field, check=False)


def cone(f: ModuleMap) -> Dict[int, EqBarcode]:
    """Cohomology of the cone of a degree-0 map: ``ker`` in degree -1, ``coker`` in 0."""
    if f.degree != 0:
        raise ValueError("cone is implemented for degree-0 maps")
    src, tgt = f.source.summands(), f.target.summands()
    cut = f.source.cutoff
    ker = modcat.kernel(f.entries, src, tgt, cut, f.field)
    coker = modcat.cokernel(f.entries, src, tgt, cut, f.field)
    return {-1: EqBarcode.from_normal_form(ker, cut), 0: EqBarcode.from_normal_form(coker, cut)}


def cone_torsion_order(f: ModuleMap):
    """Torsion order of the cone; cohomology splits over a hereditary ring."""
    return max(h.torsion_order() for h in cone(f).values())
