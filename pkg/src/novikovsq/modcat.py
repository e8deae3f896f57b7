"""Finitely presented modules over the Novikov ring.

A presentation is a matrix whose rows are relations and whose columns are
generators; the module is the cokernel ``Lambda_0^cols / rowspace``.  Over
the valuation ring ``Lambda_0`` every such module splits as
``(+)_i Lambda_0/T^{c_i}  (+)  Lambda_0^r`` and the elimination below
computes that splitting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple

from .novikov import INF, QQ, NovikovScalar, exponent, format_q

Matrix = List[List[NovikovScalar]]


# ---------------------------------------------------------------------------
# small matrix helpers


def zeros(rows: int, cols: int, cutoff=INF, field=QQ) -> Matrix:
    z = NovikovScalar.zero(cutoff, field)
    return [[z] * cols for _ in range(rows)]


def identity(n: int, cutoff=INF, field=QQ) -> Matrix:
    m = zeros(n, n, cutoff, field)
    one = NovikovScalar.one(cutoff, field)
    for i in range(n):
        m[i][i] = one
    return m


def matmul(a: Matrix, b: Matrix, cutoff=INF, field=QQ) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("shape mismatch: %dx%d times %dx%d" % (len(a), len(a[0]), len(b), len(b[0])))
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols, cutoff, field)
    for i, row in enumerate(a):
        for k in range(inner):
            aik = row[k]
            if aik.is_zero():
                continue
            bk = b[k]
            out_i = out[i]
            for j in range(cols):
                if not bk[j].is_zero():
                    out_i[j] = out_i[j] + aik * bk[j]
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def recut(a: Matrix, cutoff) -> Matrix:
    return [[x.with_cutoff(cutoff) for x in row] for row in a]


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class NormalForm:
    """``(+)_i Lambda_0/T^{torsion_i}  (+)  Lambda_0^free``.

    ``almost_zero`` counts formal ``Lambda_0/Lambda_0^+`` summands; they
    never arise from a finite presentation and are carried only when a
    caller supplies them explicitly.
    """

    torsion: Tuple = ()
    free: int = 0
    almost_zero: int = 0

    def __post_init__(self):
        lengths = tuple(sorted((exponent(c) for c in self.torsion), reverse=True))
        if any(not c > 0 for c in lengths):
            raise ValueError("torsion lengths must be positive")
        if any(c == INF for c in lengths):
            raise ValueError("infinite torsion length; use free rank")
        object.__setattr__(self, "torsion", lengths)
        if self.free < 0 or self.almost_zero < 0:
            raise ValueError("ranks must be nonnegative")

    def is_zero(self) -> bool:
        return not self.torsion and not self.free and not self.almost_zero

    def direct_sum(self, other: "NormalForm") -> "NormalForm":
        return NormalForm(self.torsion + other.torsion, self.free + other.free,
                          self.almost_zero + other.almost_zero)

    def __str__(self):
        return serialize_normal_form(self)


def serialize_normal_form(nf: NormalForm) -> str:
    text = "torsion: [%s], free: %d" % (", ".join(format_q(c) for c in nf.torsion), nf.free)
    if nf.almost_zero:
        text += ", almost_zero: %d" % nf.almost_zero
    return text


def parse_normal_form(text: str) -> NormalForm:
    import re

    m = re.match(r"\s*torsion:\s*\[(?P<t>[^\]]*)\]\s*,\s*free:\s*(?P<f>\d+)"
                 r"(?:\s*,\s*almost_zero:\s*(?P<a>\d+))?\s*$", text)
    if not m:
        raise ValueError("cannot parse normal form %r" % text)
    body = m.group("t").strip()
    torsion = [Fraction(x.strip()) for x in body.split(",")] if body else []
    return NormalForm(tuple(torsion), int(m.group("f")), int(m.group("a") or 0))


class PresentationModule:
    """Cokernel of ``entries`` (rows = relations, cols = generators)."""

    def __init__(self, entries: Sequence[Sequence[NovikovScalar]], cols: int = None,
                 cutoff=None, field=None):
        entries = [list(r) for r in entries]
        if cols is None:
            if not entries:
                raise ValueError("empty presentation needs an explicit generator count")
            cols = len(entries[0])
        if any(len(r) != cols for r in entries):
            raise ValueError("ragged presentation matrix")
        cuts = {x.cutoff for r in entries for x in r}
        fields = {x.field for r in entries for x in r}
        if len(cuts) > 1:
            raise ValueError("entries must share a cutoff")
        if len(fields) > 1:
            raise ValueError("entries must share a coefficient field")
        self.cutoff = exponent(cutoff) if cutoff is not None else (cuts.pop() if cuts else INF)
        self.field = field if field is not None else (fields.pop() if fields else QQ)
        if cuts and self.cutoff not in cuts and cutoff is not None and entries:
            entries = recut(entries, self.cutoff)
        self.entries = entries
        self.rows = len(entries)
        self.cols = cols

    @classmethod
    def from_normal_form(cls, nf: NormalForm, cutoff=INF, field=QQ) -> "PresentationModule":
        n = len(nf.torsion) + nf.free
        rows = []
        for i, c in enumerate(nf.torsion):
            row = [NovikovScalar.zero(cutoff, field)] * n
            row[i] = NovikovScalar.monomial(c, 1, cutoff, field)
            rows.append(row)
        return cls(rows, n, cutoff, field)

    def direct_sum(self, other: "PresentationModule") -> "PresentationModule":
        z = NovikovScalar.zero(self.cutoff, self.field)
        rows = [r + [z] * other.cols for r in self.entries]
        rows += [[z] * self.cols + r for r in other.entries]
        return PresentationModule(rows, self.cols + other.cols, self.cutoff, self.field)

    def __repr__(self):
        return "PresentationModule(%dx%d, cutoff=%s)" % (self.rows, self.cols, format_q(self.cutoff))


# ---------------------------------------------------------------------------
# elimination over the valuation ring


@dataclass
class SmithResult:
    """``U @ A @ V == D`` with ``D`` diagonal, pivots ``T^{valuations[k]}``."""

    valuations: List
    D: Matrix
    U: Matrix = dc_field(default=None)
    V: Matrix = dc_field(default=None)


def _normalizable(p: NovikovScalar) -> bool:
    return p.cutoff != INF or len(p.terms) == 1


def smith(entries: Matrix, cols: int, cutoff=INF, field=QQ, track: bool = False) -> SmithResult:
    """Diagonalize by row/column operations, pivoting on minimal valuation.

    Ties are broken by lowest row, then lowest column.  Division is always
    by the pivot, which has minimal valuation among the remaining entries,
    so every quotient lies in ``Lambda_0``.
    """
    A = [list(r) for r in entries]
    m = len(A)
    n = cols
    U = identity(m, cutoff, field) if track else None
    V = identity(n, cutoff, field) if track else None
    vals = []
    k = 0
    while k < min(m, n):
        best = None
        for i in range(k, m):
            row = A[i]
            for j in range(k, n):
                v = row[j].valuation()
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, pi, pj = best
        if pi != k:
            A[k], A[pi] = A[pi], A[k]
            if track:
                U[k], U[pi] = U[pi], U[k]
        if pj != k:
            for row in A:
                row[k], row[pj] = row[pj], row[k]
            if track:
                for row in V:
                    row[k], row[pj] = row[pj], row[k]
        p = A[k][k]
        if _normalizable(p):
            u = p.shift_down(v).with_cutoff(cutoff)
            uinv = u.inv()
            A[k] = [x * uinv for x in A[k]]
            if track:
                U[k] = [x * uinv for x in U[k]]
            p = A[k][k]
        # clear the pivot column
        for i in range(k + 1, m):
            if A[i][k].is_zero():
                continue
            q = A[i][k].divide_exact(p)
            A[i] = [a - q * b for a, b in zip(A[i], A[k])]
            if track:
                U[i] = [a - q * b for a, b in zip(U[i], U[k])]
        # clear the pivot row (column operations)
        for j in range(k + 1, n):
            if A[k][j].is_zero():
                continue
            q = A[k][j].divide_exact(p)
            for row in A:
                row[j] = row[j] - q * row[k]
            if track:
                for row in V:
                    row[j] = row[j] - q * row[k]
        vals.append(v)
        k += 1
    return SmithResult(vals, A, U, V)


def exponent_bound(entries: Matrix):
    """Sum over rows of the largest exponent present.

    Every nonzero minor has valuation at most this bound, hence so does
    every invariant factor.
    """
    total = Fraction(0)
    for row in entries:
        exps = [e for x in row for e, _ in x.terms]
        if exps:
            total += max(exps)
    return total


def divisor_valuations(entries: Matrix, cols: int, cutoff=INF, field=QQ) -> List:
    """Valuations of the nonzero elementary divisors.

    At infinite cutoff, elimination runs on exact representatives; when a
    unit ratio does not terminate it is redone modulo ``T^W`` with ``W``
    above :func:`exponent_bound`, which changes no elementary divisor and
    no rank.
    """
    try:
        return smith(entries, cols, cutoff, field).valuations
    except ValueError:
        if cutoff != INF:
            raise
    W = exponent_bound(entries) + 1
    return smith(recut(entries, W), cols, W, field).valuations


def normal_form(M: PresentationModule) -> NormalForm:
    """Elementary-divisor normal form of a finitely presented module."""
    if M.rows == 0:
        return NormalForm((), M.cols)
    vals = divisor_valuations(M.entries, M.cols, M.cutoff, M.field)
    torsion = tuple(v for v in vals if v > 0)
    return NormalForm(torsion, M.cols - len(vals))


# ---------------------------------------------------------------------------
# rank function oracle


def _det(rows: Sequence[Sequence[NovikovScalar]]) -> NovikovScalar:
    """Leibniz determinant (small matrices only)."""
    n = len(rows)
    total = None
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        prod = rows[0][perm[0]]
        for r in range(1, n):
            if prod.is_zero():
                break
            prod = prod * rows[r][perm[r]]
        if prod.is_zero():
            continue
        term = -prod if inv % 2 else prod
        total = term if total is None else total + term
    if total is None:
        return NovikovScalar.zero(rows[0][0].cutoff, rows[0][0].field)
    return total


def determinantal_valuations(M: PresentationModule) -> List:
    """Invariant-factor valuations from minimal valuations of minors.

    Minors are computed on the exact representatives (infinite cutoff), so
    the result does not share any code path with :func:`smith`.
    """
    A = [[x.with_cutoff(INF) for x in r] for r in M.entries]
    prev = Fraction(0)
    out = []
    for k in range(1, min(M.rows, M.cols) + 1):
        best = INF
        for rs in itertools.combinations(range(M.rows), k):
            for cs in itertools.combinations(range(M.cols), k):
                sub = [[A[r][c] for c in cs] for r in rs]
                best = min(best, _det(sub).valuation())
        if best == INF:
            break
        out.append(best - prev)
        prev = best
    return out


def rank_function(M, t) -> int:
    """``dim_kappa (T^t M (x) kappa)``: generators surviving at energy ``t``.

    For a :class:`NormalForm` this is ``free + #{c_i > t}``.  For a
    presentation it is computed from determinantal divisors, independently
    of :func:`normal_form`.
    """
    t = exponent(t)
    if isinstance(M, NormalForm):
        return M.free + sum(1 for c in M.torsion if c > t)
    if t < 0 or t >= M.cutoff:
        raise ValueError("t must lie in [0, cutoff)")
    divisors = determinantal_valuations(M)
    return M.cols - sum(1 for d in divisors if d <= t)


# ---------------------------------------------------------------------------
# invariants of a module


def torsion_order(M) -> object:
    """Least ``a`` with ``T^a id = 0``."""
    nf = M if isinstance(M, NormalForm) else normal_form(M)
    if nf.free:
        return INF
    if not nf.torsion:
        return Fraction(0)
    return nf.torsion[0]


def almost_parts(M, markers: int = 0) -> Tuple[NormalForm, NormalForm]:
    """Split into the almost-zero part and its quotient.

    A finite presentation never has ``Lambda_0/Lambda_0^+`` summands, so
    those come only from ``markers`` or from a NormalForm's own count.
    """
    nf = M if isinstance(M, NormalForm) else normal_form(M)
    zero_part = NormalForm((), 0, nf.almost_zero + markers)
    return zero_part, NormalForm(nf.torsion, nf.free)


RESIDUE = "residue"
FIELD = "field"


def base_change(M, target, c=None):
    """Base change along ``Lambda_0 -> kappa``, ``Lambda_0/T^c`` or ``Lambda``.

    * ``"residue"``: derived tensor with the residue field, returned as
      ``(dim Tor_0, dim Tor_1)``.
    * ``"truncation"`` with ``c``: the NormalForm of ``M / T^c M``.
    * ``"field"``: rank over the Novikov field.
    """
    nf = M if isinstance(M, NormalForm) else normal_form(M)
    if target == RESIDUE:
        return (nf.free + len(nf.torsion), len(nf.torsion))
    if target == "truncation":
        c = exponent(c)
        if not c > 0:
            raise ValueError("truncation level must be positive")
        if not isinstance(M, NormalForm) and not c < M.cutoff and M.cutoff != INF:
            raise ValueError("truncation level must lie below the cutoff")
        torsion = tuple(min(x, c) for x in nf.torsion) + (c,) * nf.free
        return NormalForm(torsion, 0)
    if target == FIELD:
        return nf.free
    raise ValueError("unknown base change target %r" % (target,))


# ---------------------------------------------------------------------------
# kernels and cokernels of maps between decomposed modules


def working_cutoff(lengths: Sequence, cutoff=INF):
    """Cutoff at which maps between the given summands are computed exactly."""
    if cutoff != INF:
        return cutoff
    if any(x == INF for x in lengths):
        return INF
    return max(lengths) if lengths else Fraction(1)


def kernel_basis(entries: Matrix, cols: int, cutoff, field=QQ) -> Matrix:
    """Generators (as columns) of ``{x : entries @ x = 0}`` over ``Lambda_0/T^cutoff``."""
    rows = len(entries)
    if rows == 0:
        return identity(cols, cutoff, field)
    res = smith(entries, cols, cutoff, field, track=True)
    V = res.V
    gens = []
    for k in range(cols):
        if k < len(res.valuations):
            d = res.valuations[k]
            if cutoff == INF or d == 0:
                continue
            scale = cutoff - d
            vec = [V[r][k].shift(scale) for r in range(cols)]
        else:
            vec = [V[r][k] for r in range(cols)]
        if any(not x.is_zero() for x in vec):
            gens.append(vec)
    return transpose(gens) if gens else [[] for _ in range(cols)]


def _diag_relations(lengths, cutoff, field):
    out = []
    n = len(lengths)
    for i, c in enumerate(lengths):
        if c == INF or c >= cutoff:
            continue
        row = [NovikovScalar.zero(cutoff, field)] * n
        row[i] = NovikovScalar.monomial(c, 1, cutoff, field)
        out.append(row)
    return out


def cokernel(A: Matrix, src: Sequence, tgt: Sequence, cutoff=INF, field=QQ) -> NormalForm:
    """Cokernel of ``A : (+) Lambda_0/T^src -> (+) Lambda_0/T^tgt``.

    ``A`` has one row per target summand and one column per source summand;
    ``INF`` lengths denote free summands.
    """
    W = working_cutoff(list(src) + list(tgt), cutoff)
    A = recut(A, W)
    rows = _diag_relations(tgt, W, field)
    rows += transpose(A) if A and A[0] else []
    if not rows:
        return _finish(NormalForm((), len(tgt)), W, cutoff)
    return _finish(normal_form(PresentationModule(rows, len(tgt), W, field)), W, cutoff)


def kernel(A: Matrix, src: Sequence, tgt: Sequence, cutoff=INF, field=QQ) -> NormalForm:
    """Kernel of ``A : (+) Lambda_0/T^src -> (+) Lambda_0/T^tgt``."""
    if not len(src):
        return NormalForm()
    try:
        return _kernel_at(A, src, tgt, working_cutoff(list(src) + list(tgt), cutoff), cutoff, field)
    except ValueError:
        if cutoff != INF:
            raise
    # free summands with a non-terminating unit ratio: truncating would
    # invent torsion (T^a on Lambda_0/T^W has kernel Lambda_0/T^a), so
    # eliminate exactly over the discrete valuation ring instead
    return _dvr_kernel(A, src, tgt, field)


def _kernel_at(A, src, tgt, W, cutoff, field) -> NormalForm:
    n, m = len(src), len(tgt)
    zero = NovikovScalar.zero(W, field)
    A = recut(A, W) if m else []
    # x with A x in image of diag(T^tgt): kernel of [A | diag(T^tgt)]
    block = []
    for j in range(m):
        row = list(A[j])
        diag = [zero] * m
        if tgt[j] != INF and tgt[j] < W:
            diag[j] = NovikovScalar.monomial(tgt[j], 1, W, field)
        row += diag
        block.append(row)
    if m:
        K = kernel_basis(block, n + m, W, field)
        gens = [[K[r][c] for r in range(n)] for c in range(len(K[0]) if K and K[0] else 0)]
    else:
        gens = transpose(identity(n, W, field))
    gens = [g for g in gens if any(not x.is_zero() for x in g)]
    s = len(gens)
    if s == 0:
        return NormalForm()
    # relations among generators: r with sum r_k g_k in image of diag(T^src)
    G = transpose(gens)  # n x s
    block = []
    for i in range(n):
        row = list(G[i])
        diag = [zero] * n
        if src[i] != INF and src[i] < W:
            diag[i] = NovikovScalar.monomial(src[i], 1, W, field)
        block.append(row + diag)
    R = kernel_basis(block, s + n, W, field)
    rels = [[R[r][c] for r in range(s)] for c in range(len(R[0]) if R and R[0] else 0)]
    rels = [r for r in rels if any(not x.is_zero() for x in r)]
    if not rels:
        return _finish(NormalForm((), s), W, cutoff)
    return _finish(normal_form(PresentationModule(rels, s, W, field)), W, cutoff)


def _finish(nf: NormalForm, W, cutoff) -> NormalForm:
    # at an internal working cutoff, surviving "free" generators are T^W-torsion
    if cutoff == INF and W != INF and nf.free:
        return NormalForm(nf.torsion + (W,) * nf.free, 0)
    return nf


# ---------------------------------------------------------------------------
# exact elimination over kappa[s] localized at s, s = T^(1/den)
#
# Every finite input is a polynomial in s for a common denominator ``den``
# of its exponents.  kappa[s]_(s) is a discrete valuation ring inside
# Lambda_0 over which Lambda_0 is flat, so kernels and normal forms computed
# there agree with those over Lambda_0, and every unit ratio is an exact
# rational function.  Elements are ``None`` (zero) or ``(k, num, den)``
# meaning ``s^k num/den`` with ``num(0), den(0)`` nonzero.


def _ptrim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(p)


def _padd(p, q, zero):
    n = max(len(p), len(q))
    return _ptrim((p[i] if i < len(p) else zero) + (q[i] if i < len(q) else zero) for i in range(n))


def _pmul(p, q, zero):
    if not p or not q:
        return ()
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] = out[i + j] + a * b
    return _ptrim(out)


def _pdivmod(p, q, zero):
    p = list(p)
    out = [zero] * max(len(p) - len(q) + 1, 1)
    lead = q[-1]
    while len(p) >= len(q) and p:
        c = p[-1] / lead
        k = len(p) - len(q)
        out[k] = c
        for i, b in enumerate(q):
            p[i + k] = p[i + k] - c * b
        p = list(_ptrim(p))
    return _ptrim(out), tuple(p)


def _pgcd(p, q, zero):
    while q:
        p, q = q, _pdivmod(p, q, zero)[1]
    return tuple(x / p[-1] for x in p)


class _Dvr:
    def __init__(self, field):
        self.zero = field.zero
        self.one = field.one

    def make(self, k, num, den):
        num = _ptrim(num)
        if not num:
            return None
        lead = next(i for i, c in enumerate(num) if c)
        k, num = k + lead, num[lead:]
        g = _pgcd(num, den, self.zero)
        if len(g) > 1:
            num = _pdivmod(num, g, self.zero)[0]
            den = _pdivmod(den, g, self.zero)[0]
        c = den[0]
        return (k, tuple(x / c for x in num), tuple(x / c for x in den))

    def scalar(self, x: NovikovScalar, den: int):
        if x.is_zero():
            return None
        n = int(max(e for e, _ in x.terms) * den) + 1
        poly = [self.zero] * n
        for e, c in x.terms:
            poly[int(e * den)] = c
        return self.make(0, poly, (self.one,))

    def monomial(self, k):
        return (k, (self.one,), (self.one,))

    def add(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        k = min(a[0], b[0])
        na = _pmul(((self.zero,) * (a[0] - k)) + a[1], b[2], self.zero)
        nb = _pmul(((self.zero,) * (b[0] - k)) + b[1], a[2], self.zero)
        return self.make(k, _padd(na, nb, self.zero), _pmul(a[2], b[2], self.zero))

    def neg(self, a):
        return None if a is None else (a[0], tuple(-x for x in a[1]), a[2])

    def mul(self, a, b):
        if a is None or b is None:
            return None
        return self.make(a[0] + b[0], _pmul(a[1], b[1], self.zero), _pmul(a[2], b[2], self.zero))

    def div(self, a, b):
        """``a / b`` for ``val(a) >= val(b)``."""
        if a is None:
            return None
        return self.make(a[0] - b[0], _pmul(a[1], b[2], self.zero), _pmul(a[2], b[1], self.zero))


def _dvr_smith(R: _Dvr, A, cols):
    """Valuations of the pivots and the column-operation matrix ``V``."""
    A = [list(r) for r in A]
    m, n = len(A), cols
    V = [[R.monomial(0) if i == j else None for j in range(n)] for i in range(n)]
    vals = []
    k = 0
    while k < min(m, n):
        best = None
        for i in range(k, m):
            for j in range(k, n):
                if A[i][j] is not None and (best is None or A[i][j][0] < best[0]):
                    best = (A[i][j][0], i, j)
        if best is None:
            break
        v, pi, pj = best
        A[k], A[pi] = A[pi], A[k]
        for row in A + V:
            row[k], row[pj] = row[pj], row[k]
        p = A[k][k]
        for i in range(k + 1, m):
            if A[i][k] is not None:
                q = R.neg(R.div(A[i][k], p))
                A[i] = [R.add(a, R.mul(q, b)) for a, b in zip(A[i], A[k])]
        for j in range(k + 1, n):
            if A[k][j] is not None:
                q = R.neg(R.div(A[k][j], p))
                for row in A + V:
                    row[j] = R.add(row[j], R.mul(q, row[k]))
        vals.append(v)
        k += 1
    return vals, V


def _dvr_kernel(A: Matrix, src: Sequence, tgt: Sequence, field=QQ) -> NormalForm:
    """Kernel of a map of decomposed modules, eliminating over kappa[s]_(s)."""
    R = _Dvr(field)
    n, m = len(src), len(tgt)
    dens = [Fraction(e).denominator for r in A for x in r for e, _ in x.terms]
    dens += [Fraction(c).denominator for c in list(src) + list(tgt) if c != INF]
    den = 1
    for d in dens:
        den = den * d // gcd(den, d)
    conv = [[R.scalar(x, den) for x in r] for r in A]

    def length(c):
        return None if c == INF else R.monomial(int(c * den))

    block = [conv[j] + [length(tgt[j]) if i == j else None for i in range(m)] for j in range(m)]
    vals, V = _dvr_smith(R, block, n + m)
    gens = [[V[r][c] for r in range(n)] for c in range(len(vals), n + m)]
    s = len(gens)
    if s == 0:
        return NormalForm()
    block = [[g[i] for g in gens] + [length(src[i]) if i == j else None for j in range(n)]
             for i in range(n)]
    vals, V = _dvr_smith(R, block, s + n)
    rels = [[V[r][c] for r in range(s)] for c in range(len(vals), s + n)]
    rels = [r for r in rels if any(x is not None for x in r)]
    if not rels:
        return NormalForm((), s)
    vals, _ = _dvr_smith(R, rels, s)
    return NormalForm(tuple(Fraction(v, den) for v in vals if v > 0), s - len(vals))
