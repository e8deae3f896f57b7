"""Curved dgas over the Novikov ring, Maurer-Cartan elements, twisted complexes.

Elements of a :class:`CurvedDGA` are dense coefficient lists over the
fixed basis.  The Maurer-Cartan equation ``m0 + d(b) + b*b = 0`` is solved
energy level by energy level; at each level the leading coefficient of
the residual must be hit by the residue-field differential ``d0`` or it
defines an obstruction class in ``H^2(A (x) kappa)``.

Twisted complexes use shifted objects: every slot already carries its
shift, so all connecting maps ``f_ij : V_i -> V_j`` (``i > j``) have
degree +1 and the Maurer-Cartan equation reads
``d_j f_ij + f_ij d_i + sum_k f_kj f_ik = 0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .barcode import EqBarcode
from .modcat import divisor_valuations, matmul, zeros
from .novikov import INF, QQ, NovikovScalar, exponent, format_q, parse_scalar

Element = List[NovikovScalar]


def _coerce(x, cutoff, field) -> NovikovScalar:
    if isinstance(x, NovikovScalar):
        return x.with_cutoff(cutoff)
    if isinstance(x, str):
        return parse_scalar(x, cutoff, field).with_cutoff(cutoff)
    return NovikovScalar.constant(x, cutoff, field)


# ---------------------------------------------------------------------------
# gapping monoids


def check_gapping(gapping: Sequence, cutoff=INF) -> Tuple:
    gaps = [exponent(g) for g in gapping]
    if gaps and gaps[0] == 0:
        gaps = gaps[1:]
    if any(g <= 0 or g == INF for g in gaps):
        raise ValueError("gapping values must be positive and finite")
    if any(a >= b for a, b in zip(gaps, gaps[1:])):
        raise ValueError("gapping must be strictly increasing")
    if cutoff != INF and any(g >= cutoff for g in gaps):
        raise ValueError("gapping values must lie below the cutoff")
    return tuple(gaps)


def in_monoid(e, gens: Sequence) -> bool:
    """Is ``e`` a sum of elements of ``gens`` (with repetition)?"""
    e = exponent(e)
    memo = {}

    def rec(x):
        if x == 0:
            return True
        if x in memo:
            return memo[x]
        memo[x] = any(g <= x and rec(x - g) for g in gens)
        return memo[x]

    return rec(e)


def monoid_levels(gens: Sequence, cutoff) -> List:
    """All monoid elements below a finite cutoff, ascending."""
    if cutoff == INF:
        raise ValueError("monoid levels need a finite cutoff")
    seen = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y < cutoff and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


# ---------------------------------------------------------------------------
# residue-field linear algebra


def _rref(rows: List[List], ncols: int, field):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    A = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = field.one / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A, pivots


def residue_rank(M: List[List], ncols: int, field) -> int:
    return len(_rref(M, ncols, field)[1]) if M else 0


def residue_solve(M: List[List], rhs: List, field) -> Optional[List]:
    """A solution of ``M x = rhs`` over the residue field, or ``None``.

    Free variables are set to zero, so the support sits on the pivot
    columns: the lexicographically earliest independent columns.
    """
    n = len(M[0]) if M else 0
    aug = [list(row) + [b] for row, b in zip(M, rhs)]
    R, piv = _rref(aug, n + 1, field)
    if n in piv:
        return None
    x = [field.zero] * n
    for row, c in zip(R, piv):
        x[c] = row[n]
    return x


# ---------------------------------------------------------------------------
# curved dgas


class CurvedDGA:
    """A finite free curved dga over ``Lambda_0 / T^cutoff``.

    ``mult`` maps ``(i, j)`` to ``{k: scalar}`` meaning
    ``g_i * g_j = sum scalar g_k``; ``diff`` maps ``i`` to ``{k: scalar}``;
    ``curvature`` is ``{k: scalar}``.  Generator references may be names
    or indices.  ``unit`` is a generator reference or an element.
    """

    def __init__(self, names: Sequence[str], degrees: Sequence[int], mult=None, diff=None,
                 curvature=None, cutoff=INF, gapping=None, field=QQ, unit=None, check: bool = True):
        if len(names) != len(degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        self.names = list(names)
        self.degrees = [int(d) for d in degrees]
        self.cutoff = exponent(cutoff)
        self.field = field
        self.index = {n: i for i, n in enumerate(self.names)}
        cut = self.cutoff
        self.mult: Dict[Tuple[int, int], Dict[int, NovikovScalar]] = {}
        for (i, j), out in (mult or {}).items():
            key = (self._idx(i), self._idx(j))
            row = self.mult.setdefault(key, {})
            for k, c in out.items():
                k = self._idx(k)
                row[k] = row.get(k, NovikovScalar.zero(cut, field)) + _coerce(c, cut, field)
        self.diff: Dict[int, Dict[int, NovikovScalar]] = {}
        for i, out in (diff or {}).items():
            row = self.diff.setdefault(self._idx(i), {})
            for k, c in out.items():
                k = self._idx(k)
                row[k] = row.get(k, NovikovScalar.zero(cut, field)) + _coerce(c, cut, field)
        self.curvature = self.zero()
        for k, c in (curvature or {}).items():
            k = self._idx(k)
            self.curvature[k] = self.curvature[k] + _coerce(c, cut, field)
        if unit is None:
            self.unit = None
        elif isinstance(unit, (str, int)):
            self.unit = self.basis(self._idx(unit))
            for g in range(self.n):
                self.mult.setdefault((self._idx(unit), g), {g: NovikovScalar.one(cut, field)})
                self.mult.setdefault((g, self._idx(unit)), {g: NovikovScalar.one(cut, field)})
        else:
            self.unit = [_coerce(c, cut, field) for c in unit]
        self._prune()
        if gapping is None:
            gapping = sorted({e for e in self._exponents() if e > 0})
        self.gapping = check_gapping(gapping, cut)
        if check:
            self.validate()

    # -- plumbing
    @property
    def n(self) -> int:
        return len(self.names)

    def _idx(self, ref) -> int:
        if isinstance(ref, int):
            if not 0 <= ref < len(self.names):
                raise ValueError("generator index %d out of range" % ref)
            return ref
        try:
            return self.index[ref]
        except KeyError:
            raise ValueError("unknown generator %r" % ref)

    def _prune(self):
        for table in (self.mult, self.diff):
            for key in list(table):
                table[key] = {k: c for k, c in table[key].items() if not c.is_zero()}
                if not table[key]:
                    del table[key]

    def _exponents(self):
        for out in list(self.mult.values()) + list(self.diff.values()):
            for c in out.values():
                yield from c.exponents()
        for c in self.curvature:
            yield from c.exponents()

    def zero(self) -> Element:
        return [NovikovScalar.zero(self.cutoff, self.field) for _ in range(self.n)]

    def basis(self, i) -> Element:
        v = self.zero()
        v[self._idx(i)] = NovikovScalar.one(self.cutoff, self.field)
        return v

    def element(self, coeffs: Dict) -> Element:
        v = self.zero()
        for k, c in coeffs.items():
            k = self._idx(k)
            v[k] = v[k] + _coerce(c, self.cutoff, self.field)
        return v

    # -- arithmetic
    @staticmethod
    def add(x: Element, y: Element) -> Element:
        return [a + b for a, b in zip(x, y)]

    @staticmethod
    def sub(x: Element, y: Element) -> Element:
        return [a - b for a, b in zip(x, y)]

    @staticmethod
    def is_zero(x: Element) -> bool:
        return all(a.is_zero() for a in x)

    def mul(self, x: Element, y: Element) -> Element:
        out = self.zero()
        xs = [(i, a) for i, a in enumerate(x) if not a.is_zero()]
        ys = [(j, b) for j, b in enumerate(y) if not b.is_zero()]
        for i, a in xs:
            for j, b in ys:
                table = self.mult.get((i, j))
                if not table:
                    continue
                ab = a * b
                if ab.is_zero():
                    continue
                for k, c in table.items():
                    out[k] = out[k] + ab * c
        return out

    def d(self, x: Element) -> Element:
        out = self.zero()
        for i, a in enumerate(x):
            if a.is_zero() or i not in self.diff:
                continue
            for k, c in self.diff[i].items():
                out[k] = out[k] + a * c
        return out

    def degree_of(self, x: Element) -> Optional[int]:
        """Common degree of the support of ``x`` (``None`` for zero)."""
        degs = {self.degrees[i] for i, a in enumerate(x) if not a.is_zero()}
        if len(degs) > 1:
            raise ValueError("element is not homogeneous (degrees %s)" % sorted(degs))
        return degs.pop() if degs else None

    def valuation(self, x: Element):
        return min((a.valuation() for a in x), default=INF)

    def residue_matrix(self, src_deg: int, tgt_deg: int):
        """``d0 : A^src -> A^tgt`` over the residue field, rows = targets."""
        src = [i for i, g in enumerate(self.degrees) if g == src_deg]
        tgt = [k for k, g in enumerate(self.degrees) if g == tgt_deg]
        M = [[self.diff.get(i, {}).get(k, None) for i in src] for k in tgt]
        M = [[c.residue() if c is not None else self.field.zero for c in row] for row in M]
        return M, src, tgt

    # -- axioms
    def validate(self):
        deg = self.degrees
        for (i, j), out in self.mult.items():
            for k in out:
                if deg[k] != deg[i] + deg[j]:
                    raise ValueError("product %s*%s has a term in %s of the wrong degree"
                                     % (self.names[i], self.names[j], self.names[k]))
        for i, out in self.diff.items():
            for k in out:
                if deg[k] != deg[i] + 1:
                    raise ValueError("d(%s) has a term in %s of the wrong degree"
                                     % (self.names[i], self.names[k]))
        for k, c in enumerate(self.curvature):
            if not c.is_zero():
                if deg[k] != 2:
                    raise ValueError("curvature must have degree 2")
                if c.valuation() == 0:
                    raise ValueError("curvature must have positive valuation")
        for e in self._exponents():
            if not in_monoid(e, self.gapping):
                raise ValueError("exponent %s is not in the gapping monoid" % format_q(e))
        basis = [self.basis(i) for i in range(self.n)]
        for i in range(self.n):
            dd = self.d(self.d(basis[i]))
            if any(c.residue() for c in dd):
                raise ValueError("d^2(%s) is nonzero modulo Lambda_0^+" % self.names[i])
        if self.unit is not None:
            for i in range(self.n):
                if self.mul(self.unit, basis[i]) != basis[i] or self.mul(basis[i], self.unit) != basis[i]:
                    raise ValueError("unit law fails on %s" % self.names[i])
        for i in range(self.n):
            for j in range(self.n):
                ij = self.mult.get((i, j))
                for k in range(self.n):
                    left = self.zero()
                    if ij:
                        for a, c in ij.items():
                            for b, e in self.mult.get((a, k), {}).items():
                                left[b] = left[b] + c * e
                    right = self.zero()
                    for a, c in self.mult.get((j, k), {}).items():
                        for b, e in self.mult.get((i, a), {}).items():
                            right[b] = right[b] + c * e
                    if left != right:
                        raise ValueError("multiplication is not associative on (%s, %s, %s)"
                                         % (self.names[i], self.names[j], self.names[k]))

    def format_element(self, x: Element) -> str:
        from .novikov import format_scalar

        parts = ["(%s)*%s" % (format_scalar(a), self.names[i]) for i, a in enumerate(x) if not a.is_zero()]
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Maurer-Cartan


@dataclass
class MaurerCartanElement:
    b: Element
    levels: List = dc_field(default_factory=list)


@dataclass
class ObstructionReport:
    level: object
    cls: List            # residue-field coefficients on the degree-2 generators
    generators: List[str]
    partial: Element     # the solution up to (excluding) ``level``
    cocycle: bool

    def __str__(self):
        terms = ["%s*%s" % (c, g) for c, g in zip(self.cls, self.generators) if c]
        return "obstruction level=%s class=[%s]" % (format_q(self.level), " + ".join(terms))


def _check_degree_one(A: CurvedDGA, b: Element):
    if len(b) != A.n:
        raise ValueError("element has %d coefficients, expected %d" % (len(b), A.n))
    for i, a in enumerate(b):
        if not a.is_zero() and A.degrees[i] != 1:
            raise ValueError("b has a component on %s of degree %d" % (A.names[i], A.degrees[i]))


def mc_residual(A: CurvedDGA, b: Element, higher: Optional[Dict[int, Dict]] = None) -> Element:
    """``m0 + d(b) + b*b (+ sum_k m_k(b, ..., b))``.

    ``higher`` maps ``k >= 3`` to tensors ``{(i_1, ..., i_k): {out: scalar}}``.
    """
    _check_degree_one(A, b)
    b = [x.with_cutoff(A.cutoff) for x in b]
    R = A.add(A.add(A.curvature, A.d(b)), A.mul(b, b))
    for k, tensor in sorted((higher or {}).items()):
        if k < 3:
            raise ValueError("higher operations start at arity 3")
        for idx, out in tensor.items():
            idx = tuple(A._idx(i) for i in idx)
            if len(idx) != k:
                raise ValueError("m_%d entry has arity %d" % (k, len(idx)))
            coeff = NovikovScalar.one(A.cutoff, A.field)
            for i in idx:
                coeff = coeff * b[i]
            if coeff.is_zero():
                continue
            for o, c in out.items():
                o = A._idx(o)
                R[o] = R[o] + coeff * _coerce(c, A.cutoff, A.field)
    return R


def is_mc(A: CurvedDGA, b: Element, higher=None) -> bool:
    return A.valuation(b) > 0 and A.is_zero(mc_residual(A, b, higher))


def mc_solve(A: CurvedDGA, leading: Optional[Element] = None, higher=None, max_steps: int = 1000):
    """Solve ``(d + b)^2 = 0`` order by order in the energy.

    ``leading`` prescribes the first-order part of ``b`` (a degree-1,
    valuation-positive element with exponents in the gapping monoid);
    the solver only adds higher-energy corrections to it.  Returns a
    :class:`MaurerCartanElement` or an :class:`ObstructionReport`.
    """
    if not A.gapping and A.cutoff == INF and not A.is_zero(A.curvature):
        raise ValueError("malformed gapping: empty monoid with nonzero curvature")
    b = A.zero() if leading is None else [_coerce(x, A.cutoff, A.field) for x in leading]
    _check_degree_one(A, b)
    if A.valuation(b) <= 0:
        raise ValueError("leading term must have positive valuation")
    for x in b:
        for e in x.exponents():
            if not in_monoid(e, A.gapping):
                raise ValueError("leading term exponent %s is outside the gapping monoid" % format_q(e))
    D0, src, tgt = A.residue_matrix(1, 2)
    D1, src2, tgt3 = A.residue_matrix(2, 3)
    levels = []
    last = Fraction(0)
    for _ in range(max_steps):
        R = mc_residual(A, b, higher)
        v = A.valuation(R)
        if v == INF:
            return MaurerCartanElement(b, levels)
        if v <= last and levels:
            raise AssertionError("residual valuation failed to increase at %s" % format_q(v))
        last = v
        r = [R[k].coefficient(v) for k in tgt]
        if any(R[k].coefficient(v) for k in range(A.n) if k not in tgt):
            raise AssertionError("residual has components outside degree 2")
        x = residue_solve(D0, r, A.field) if src else (None if any(r) else [])
        if x is None:
            dr = [sum((row[i] * r[i] for i in range(len(r))), A.field.zero) for row in D1] if D1 else []
            return ObstructionReport(v, r, [A.names[k] for k in tgt], b, not any(dr))
        for i, c in zip(src, x):
            if c:
                b[i] = b[i] - NovikovScalar.monomial(v, c, A.cutoff, A.field)
        levels.append(v)
    raise RuntimeError("no convergence after %d levels; use a finite cutoff" % max_steps)


def obstruction_is_nonzero(A: CurvedDGA, rep: ObstructionReport) -> bool:
    """Independent check that the class is not in the image of ``d0`` (rank test)."""
    D0, src, tgt = A.residue_matrix(1, 2)
    base = residue_rank(D0, len(src), A.field) if src else 0
    aug = [list(row) + [c] for row, c in zip(D0, rep.cls)] if src else [[c] for c in rep.cls]
    return residue_rank(aug, len(src) + 1, A.field) > base


# ---------------------------------------------------------------------------
# twisted complexes


@dataclass
class Slot:
    degrees: Tuple[int, ...]
    level: object = Fraction(0)
    d: Optional[List[List[NovikovScalar]]] = None
    name: str = ""

    @property
    def size(self) -> int:
        return len(self.degrees)


def _degree_one_ok(M, src_degs, tgt_degs) -> bool:
    for q, row in enumerate(M):
        for p, x in enumerate(row):
            if not x.is_zero() and tgt_degs[q] != src_degs[p] + 1:
                return False
    return True


def _madd(a, b):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def _is_zero_matrix(M) -> bool:
    return all(x.is_zero() for r in M for x in r)


class TwistedComplex:
    """One-sided family ``(V_i, f_ij)``; ``maps[(i, j)]`` is ``f_ij : V_i -> V_j`` with ``i > j``."""

    def __init__(self, slots: Sequence[Slot], maps: Optional[Dict] = None, cutoff=INF, field=QQ,
                 check: bool = True):
        self.cutoff = exponent(cutoff)
        self.field = field
        cut = self.cutoff
        self.slots = []
        for s in slots:
            n = len(s.degrees)
            d = s.d if s.d is not None else zeros(n, n, cut, field)
            d = [[_coerce(x, cut, field) for x in row] for row in d]
            self.slots.append(Slot(tuple(int(g) for g in s.degrees), exponent(s.level), d, s.name))
        self.maps = {}
        for (i, j), M in (maps or {}).items():
            if not i > j:
                raise ValueError("twisted complexes are one-sided: f_%d%d with %d <= %d" % (i, j, i, j))
            if not (0 <= j and i < len(self.slots)):
                raise ValueError("map (%d, %d) refers to a missing slot" % (i, j))
            M = [[_coerce(x, cut, field) for x in row] for row in M]
            if len(M) != self.slots[j].size or any(len(r) != self.slots[i].size for r in M):
                raise ValueError("f_%d%d has the wrong shape" % (i, j))
            if not _is_zero_matrix(M):
                self.maps[(i, j)] = M
        if check:
            self.validate()

    def validate(self):
        for k, s in enumerate(self.slots):
            if len(s.d) != s.size or any(len(r) != s.size for r in s.d):
                raise ValueError("slot %d differential has the wrong shape" % k)
            if not _degree_one_ok(s.d, s.degrees, s.degrees):
                raise ValueError("slot %d differential is not of degree +1" % k)
            if s.size and not _is_zero_matrix(matmul(s.d, s.d, self.cutoff, self.field)):
                raise ValueError("slot %d differential does not square to zero" % k)
        for a, b in zip(self.slots, self.slots[1:]):
            if not a.level < b.level:
                raise ValueError("slot levels must be strictly increasing")
        for (i, j), M in self.maps.items():
            if not _degree_one_ok(M, self.slots[i].degrees, self.slots[j].degrees):
                raise ValueError("f_%d%d is not of degree +1" % (i, j))

    def map(self, i, j):
        return self.maps.get((i, j)) or zeros(self.slots[j].size, self.slots[i].size, self.cutoff, self.field)

    def is_direct_sum(self) -> bool:
        return not self.maps

    def __eq__(self, other):
        if not isinstance(other, TwistedComplex):
            return NotImplemented
        return (self.cutoff == other.cutoff
                and [(s.degrees, s.level, s.d) for s in self.slots]
                == [(s.degrees, s.level, s.d) for s in other.slots]
                and self.maps == other.maps)

    def __repr__(self):
        return "TwistedComplex(%d slots, %d maps)" % (len(self.slots), len(self.maps))


def _mm(a, b, cutoff, field):
    if not a or not b or not b[0]:
        return zeros(len(a), len(b[0]) if b else 0, cutoff, field)
    return matmul(a, b, cutoff, field)


def tc_residual(T: TwistedComplex) -> Dict[Tuple[int, int], List[List[NovikovScalar]]]:
    """``d f_ij + sum_{i > k > j} f_kj f_ik`` for every ``i > j``."""
    cut, fld = T.cutoff, T.field
    out = {}
    n = len(T.slots)
    for i in range(n):
        for j in range(i):
            f = T.map(i, j)
            r = _madd(_mm(T.slots[j].d, f, cut, fld), _mm(f, T.slots[i].d, cut, fld))
            for k in range(j + 1, i):
                r = _madd(r, _mm(T.map(k, j), T.map(i, k), cut, fld))
            out[(i, j)] = r
    return out


def tc_residual_is_zero(T: TwistedComplex) -> bool:
    return all(_is_zero_matrix(m) for m in tc_residual(T).values())


@dataclass
class Totalization:
    degrees: List[int]
    levels: List
    D: List[List[NovikovScalar]]
    cutoff: object = INF
    field: object = QQ

    def square_is_zero(self) -> bool:
        if not self.D:
            return True
        return _is_zero_matrix(matmul(self.D, self.D, self.cutoff, self.field))


def tc_totalize(T: TwistedComplex) -> Totalization:
    """``(+) V_i`` with differential ``sum d_i + sum f_ij`` (block upper-triangular)."""
    offs = []
    N = 0
    for s in T.slots:
        offs.append(N)
        N += s.size
    D = zeros(N, N, T.cutoff, T.field)
    for k, s in enumerate(T.slots):
        for q in range(s.size):
            for p in range(s.size):
                D[offs[k] + q][offs[k] + p] = s.d[q][p]
    for (i, j), M in T.maps.items():
        for q, row in enumerate(M):
            for p, x in enumerate(row):
                D[offs[j] + q][offs[i] + p] = x
    degrees = [g for s in T.slots for g in s.degrees]
    levels = [s.level for s in T.slots for _ in s.degrees]
    return Totalization(degrees, levels, D, T.cutoff, T.field)


def sigma_decompose(total: Totalization) -> TwistedComplex:
    """Split a filtered complex into its energy levels; inverse of :func:`tc_totalize`."""
    N = len(total.degrees)
    if len(total.levels) != N or len(total.D) != N or any(len(r) != N for r in total.D):
        raise ValueError("inconsistent totalization shape")
    order = sorted(range(N), key=lambda g: (total.levels[g], g))
    levels = sorted(set(total.levels))
    members = [[g for g in order if total.levels[g] == c] for c in levels]
    slot_of = {g: k for k, mem in enumerate(members) for g in mem}
    for q in range(N):
        for p in range(N):
            if not total.D[q][p].is_zero() and slot_of[q] > slot_of[p]:
                raise ValueError("differential is not triangular for the energy order")
    slots = []
    for c, mem in zip(levels, members):
        d = [[total.D[q][p] for p in mem] for q in mem]
        slots.append(Slot(tuple(total.degrees[g] for g in mem), c, d))
    maps = {}
    for i, src in enumerate(members):
        for j in range(i):
            maps[(i, j)] = [[total.D[q][p] for p in src] for q in members[j]]
    return TwistedComplex(slots, maps, total.cutoff, total.field)


def tc_cohomology(total: Totalization) -> Dict[int, EqBarcode]:
    """Cohomology of the totalized complex of free ``Lambda_0``-modules.

    Computed from the representatives at infinite cutoff: ``H^p`` is free
    of rank ``dim C^p - rk d^p - rk d^(p-1)`` plus ``Lambda_0/T^v`` for the
    positive elementary divisors ``v`` of ``d^(p-1)``.
    """
    if not total.square_is_zero():
        raise ValueError("total differential does not square to zero")
    fld = total.field
    degs = sorted(set(total.degrees))
    idx = {p: [g for g, x in enumerate(total.degrees) if x == p] for p in degs}

    def block(p):
        src, tgt = idx.get(p, []), idx.get(p + 1, [])
        return [[NovikovScalar(total.D[q][s].terms, INF, fld) for s in src] for q in tgt], len(src)

    def divisors(p):
        M, cols = block(p)
        if not M or not cols:
            return []
        return divisor_valuations(M, cols, INF, fld)

    out = {}
    for p in degs:
        here, before = divisors(p), divisors(p - 1)
        free = len(idx[p]) - len(here) - len(before)
        tors = [v for v in before if v > 0]
        out[p] = EqBarcode(tors, free)
    return out


# ---------------------------------------------------------------------------
# endomorphism dgas, real and bc


class EndomorphismDGA(CurvedDGA):
    """``End((+) V_i)`` with differential ``[delta, -]``, ``delta = sum d_i + f_st``.

    The basis element ``E[a,b]`` sends total generator ``b`` to ``a``;
    products are composition (``x*y = x o y``) and the curvature is
    ``delta^2``.
    """

    def __init__(self, slots: Sequence[Slot], f_st: Optional[Dict] = None, cutoff=INF, field=QQ,
                 gapping=None):
        self.standard = TwistedComplex(slots, f_st, cutoff, field)
        tot = tc_totalize(self.standard)
        self.tdeg = tot.degrees
        self.delta = tot.D
        N = len(self.tdeg)
        self.N = N
        cut = exponent(cutoff)
        one = NovikovScalar.one(cut, field)
        names, degrees = [], []
        for a in range(N):
            for b in range(N):
                names.append("E%d_%d" % (a, b))
                degrees.append(self.tdeg[a] - self.tdeg[b])
        mult = {}
        for a in range(N):
            for b in range(N):
                for d in range(N):
                    mult[(a * N + b, b * N + d)] = {a * N + d: one}
        unit = [one if (k // N == k % N) else NovikovScalar.zero(cut, field) for k in range(N * N)]
        diff = {}
        for a in range(N):
            for b in range(N):
                e = self.tdeg[a] - self.tdeg[b]
                out = {}
                for c in range(N):
                    x = self.delta[c][a]
                    if not x.is_zero():
                        out[c * N + b] = out.get(c * N + b, NovikovScalar.zero(cut, field)) + x
                    y = self.delta[b][c]
                    if not y.is_zero():
                        sgn = -y if e % 2 == 0 else y
                        out[a * N + c] = out.get(a * N + c, NovikovScalar.zero(cut, field)) + sgn
                if out:
                    diff[a * N + b] = out
        sq = matmul(self.delta, self.delta, cut, field) if N else []
        curv = {a * N + b: sq[a][b] for a in range(N) for b in range(N) if not sq[a][b].is_zero()}
        super().__init__(names, degrees, mult, diff, curv, cut, gapping, field, unit=unit, check=False)
        self._slot_of = [k for k, s in enumerate(self.standard.slots) for _ in s.degrees]
        self._offs = []
        n = 0
        for s in self.standard.slots:
            self._offs.append(n)
            n += s.size
        for k, c in enumerate(self.curvature):
            if not c.is_zero() and c.valuation() == 0:
                raise ValueError("standard element does not square to zero modulo Lambda_0^+")

    def as_matrix(self, x: Element):
        N = self.N
        return [[x[a * N + b] for b in range(N)] for a in range(N)]

    def from_matrix(self, M) -> Element:
        return [M[k // self.N][k % self.N] for k in range(self.N * self.N)]

    def from_blocks(self, blocks: Dict) -> Element:
        x = self.zero()
        for (i, j), M in blocks.items():
            for q, row in enumerate(M):
                for p, c in enumerate(row):
                    a, b = self._offs[j] + q, self._offs[i] + p
                    x[a * self.N + b] = x[a * self.N + b] + c
        return x

    def to_blocks(self, x: Element) -> Dict:
        """``{(i, j): block}`` of the component sending slot ``i`` to slot ``j``."""
        out = {}
        for k, c in enumerate(x):
            if c.is_zero():
                continue
            a, b = divmod(k, self.N)
            i, j = self._slot_of[b], self._slot_of[a]
            if (i, j) not in out:
                out[(i, j)] = zeros(self.standard.slots[j].size, self.standard.slots[i].size,
                                    self.cutoff, self.field)
            out[(i, j)][a - self._offs[j]][b - self._offs[i]] = c
        return out

    def f_st(self) -> Element:
        return self.from_blocks(self.standard.maps)

    def gauge(self, P, b: Element) -> Element:
        """Transport ``b`` along a degree-0 change of basis ``P = 1 mod Lambda_0^+``."""
        N = self.N
        cut, fld = self.cutoff, self.field
        for a in range(N):
            for c in range(N):
                x = P[a][c]
                if not x.is_zero() and self.tdeg[a] != self.tdeg[c]:
                    raise ValueError("gauge must have degree 0")
                if x.residue() != (fld.one if a == c else fld.zero):
                    raise ValueError("gauge must be the identity modulo Lambda_0^+")
        nil = [[P[a][c] - (1 if a == c else 0) for c in range(N)] for a in range(N)]
        inv = [[NovikovScalar.one(cut, fld) if a == c else NovikovScalar.zero(cut, fld)
                for c in range(N)] for a in range(N)]
        term = inv
        for _ in range(10000):
            term = matmul(term, [[-x for x in r] for r in nil], cut, fld)
            if _is_zero_matrix(term):
                break
            inv = _madd(inv, term)
        else:
            raise ValueError("gauge inverse does not terminate; use a finite cutoff")
        full = _madd(self.delta, self.as_matrix(b))
        conj = matmul(matmul(P, full, cut, fld), inv, cut, fld)
        return self.from_matrix(_madd(conj, [[-x for x in r] for r in self.delta]))


def real(A: EndomorphismDGA, b: Element) -> TwistedComplex:
    """Twisted complex whose maps are the components of ``f_st + b``."""
    _check_degree_one(A, b)
    total = A.add(A.f_st(), b)
    blocks = A.to_blocks(total)
    for (i, j), M in blocks.items():
        if i <= j and not _is_zero_matrix(M):
            raise ValueError("component (%d, %d) of f_st + b is nonzero with %d <= %d" % (i, j, i, j))
    slots = A.standard.slots
    return TwistedComplex(slots, {k: M for k, M in blocks.items() if k[0] > k[1]}, A.cutoff, A.field)


def bc(T: TwistedComplex, A: EndomorphismDGA) -> MaurerCartanElement:
    """``sum f_ij - f_st``; ``T`` must be a valid deformation of the standard complex."""
    if [(s.degrees, s.level, s.d) for s in T.slots] != \
            [(s.degrees, s.level, s.d) for s in A.standard.slots]:
        raise ValueError("twisted complex objects do not match the family")
    if not tc_residual_is_zero(T):
        raise ValueError("twisted complex does not satisfy the Maurer-Cartan equation")
    b = A.sub(A.from_blocks(T.maps), A.f_st())
    if A.valuation(b) <= 0:
        raise ValueError("twisted complex differs from the standard one modulo Lambda_0^+")
    return MaurerCartanElement(b)


# ---------------------------------------------------------------------------
# colimits


@dataclass
class ColimitPresentation:
    generators: List[Tuple[int, str]]
    relations: List[Tuple[Tuple[int, str], Element]]   # (k, g) ~ image in the next stage
    dga: CurvedDGA
    family: List[CurvedDGA]
    maps: List

    def push(self, b: Element, k: int) -> Element:
        """Image of an element of stage ``k`` in the colimit."""
        for m in range(k, len(self.maps)):
            b = _apply_map(self.maps[m], b, self.family[m + 1])
        return b


def _apply_map(M, x: Element, target: CurvedDGA) -> Element:
    out = target.zero()
    for i, a in enumerate(x):
        if a.is_zero():
            continue
        for k in range(target.n):
            c = M[k][i]
            if not c.is_zero():
                out[k] = out[k] + a * c
    return out


def colimit_dga(family: Sequence[CurvedDGA], maps: Sequence) -> ColimitPresentation:
    """Colimit of a chain ``A_0 -> A_1 -> ...`` of curved dga morphisms.

    ``maps[k]`` is the matrix (rows = generators of ``A_(k+1)``) of the
    refinement ``A_k -> A_(k+1)``.  The colimit is the quotient of the
    direct sum by ``x ~ phi(x)``, which for a chain is carried by the last
    stage with the finest gapping.
    """
    if not family:
        raise ValueError("empty family")
    if len(maps) != len(family) - 1:
        raise ValueError("need one refinement map per consecutive pair")
    gens, rels = [], []
    for k, A in enumerate(family):
        gens.extend((k, g) for g in A.names)
    for k, M in enumerate(maps):
        A, B = family[k], family[k + 1]
        if A.cutoff != B.cutoff:
            raise ValueError("stages %d and %d have different cutoffs" % (k, k + 1))
        M = [[_coerce(x, B.cutoff, B.field) for x in row] for row in M]
        if len(M) != B.n or any(len(r) != A.n for r in M):
            raise ValueError("map %d has the wrong shape" % k)
        for g in A.gapping:
            if not in_monoid(g, B.gapping):
                raise ValueError("gapping of stage %d is not refined by stage %d" % (k, k + 1))
        phi = lambda x, M=M, B=B: _apply_map(M, x, B)  # noqa: E731
        for i in range(A.n):
            img = phi(A.basis(i))
            if B.degree_of(img) not in (None, A.degrees[i]):
                raise ValueError("map %d does not preserve degrees" % k)
            if phi(A.d(A.basis(i))) != B.d(img):
                raise ValueError("map %d does not commute with d" % k)
            for j in range(A.n):
                if phi(A.mul(A.basis(i), A.basis(j))) != B.mul(img, phi(A.basis(j))):
                    raise ValueError("map %d is not multiplicative" % k)
            rels.append(((k, A.names[i]), img))
        if phi(A.curvature) != B.curvature:
            raise ValueError("map %d does not preserve curvature" % k)
        if A.unit is not None and B.unit is not None and phi(A.unit) != B.unit:
            raise ValueError("map %d is not unital" % k)
        maps = list(maps)
        maps[k] = M
    return ColimitPresentation(gens, rels, family[-1], list(family), list(maps))


# ---------------------------------------------------------------------------
# text formats


_BRACKET = re.compile(r"\[([^\]]*)\]\s*([A-Za-z_][\w']*)")


def _parse_sum(text: str, cutoff, field) -> Dict[str, NovikovScalar]:
    text = text.strip()
    if text in ("", "0"):
        return {}
    out = {}
    pos = 0
    for m in _BRACKET.finditer(text):
        gap = text[pos:m.start()].strip()
        if gap not in ("", "+") and pos:
            raise ValueError("cannot parse %r" % text)
        if not pos and gap:
            raise ValueError("cannot parse %r" % text)
        c = parse_scalar(m.group(1), cutoff, field).with_cutoff(cutoff)
        out[m.group(2)] = out[m.group(2)] + c if m.group(2) in out else c
        pos = m.end()
    if text[pos:].strip() or not out:
        raise ValueError("cannot parse %r" % text)
    return out


def parse_dga(text: str, field=QQ, cutoff=None) -> CurvedDGA:
    """Parse the line format::

        cutoff 3
        gapping 1
        basis 1:0 x:1 y:2
        unit 1
        x*x = [1] y
        d x = [T] y
        m0 = [T] y
    """
    cut = None if cutoff is None else exponent(cutoff)
    names, degs, gapping, unit = [], [], None, None
    mult, diff, curv = {}, {}, {}
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "cutoff":
            if cut is None:
                cut = exponent(line.split(None, 1)[1].strip())
        elif head == "gapping":
            gapping = [exponent(x) for x in line.split()[1:]]
        elif head == "basis":
            for tok in line.split()[1:]:
                if ":" not in tok:
                    raise ValueError("line %d: basis entries are name:degree" % lineno)
                n, d = tok.rsplit(":", 1)
                names.append(n)
                degs.append(int(d))
        elif head == "unit":
            unit = line.split()[1]
        else:
            pending.append((lineno, line))
    cut = INF if cut is None else cut
    for lineno, line in pending:
        if "=" not in line:
            raise ValueError("line %d: expected an equation" % lineno)
        lhs, rhs = (s.strip() for s in line.split("=", 1))
        terms = _parse_sum(rhs, cut, field)
        if lhs == "m0":
            curv.update(terms)
        elif lhs.startswith("d "):
            diff[lhs[2:].strip()] = terms
        elif "*" in lhs:
            a, b = (s.strip() for s in lhs.split("*", 1))
            mult[(a, b)] = terms
        else:
            raise ValueError("line %d: cannot parse %r" % (lineno, line))
    return CurvedDGA(names, degs, mult, diff, curv, cut, gapping, field, unit=unit)


def parse_twisted(text: str, field=QQ, cutoff=None) -> TwistedComplex:
    """Parse the line format::

        cutoff inf
        slot A level 0 degrees 0 1
        slot B level 1 degrees 0
        d A 1 0 = T            # internal differential entry (target, source)
        map B A 1 0 = 1 + T    # f from slot B to slot A, entry (target, source)
    """
    cut = None if cutoff is None else exponent(cutoff)
    slots, names, entries = [], {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "cutoff":
            if cut is None:
                cut = exponent(toks[1])
        elif toks[0] == "slot":
            if len(toks) < 5 or toks[2] != "level" or "degrees" not in toks:
                raise ValueError("line %d: slot NAME level C degrees D..." % lineno)
            k = toks.index("degrees")
            names[toks[1]] = len(slots)
            slots.append((toks[1], exponent(toks[3]), tuple(int(x) for x in toks[k + 1:])))
        elif toks[0] in ("d", "map"):
            if "=" not in line:
                raise ValueError("line %d: missing '='" % lineno)
            entries.append((lineno, line))
        else:
            raise ValueError("line %d: unknown directive %r" % (lineno, toks[0]))
    cut = INF if cut is None else cut
    ds = {nm: zeros(len(dg), len(dg), cut, field) for nm, _, dg in slots}
    maps = {}
    for lineno, line in entries:
        lhs, rhs = line.split("=", 1)
        toks = lhs.split()
        val = parse_scalar(rhs, cut, field).with_cutoff(cut)
        try:
            if toks[0] == "d":
                _, s, q, p = toks
                ds[s][int(q)][int(p)] = val
            else:
                _, a, b, q, p = toks
                i, j = names[a], names[b]
                if (i, j) not in maps:
                    maps[(i, j)] = zeros(len(slots[j][2]), len(slots[i][2]), cut, field)
                maps[(i, j)][int(q)][int(p)] = val
        except (KeyError, IndexError, ValueError) as exc:
            raise ValueError("line %d: %s" % (lineno, exc))
    return TwistedComplex([Slot(dg, lv, ds[nm], nm) for nm, lv, dg in slots], maps, cut, field)
