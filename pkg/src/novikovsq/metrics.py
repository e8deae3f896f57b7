"""Interleaving and Hofer distances between Novikov modules.

A ``c``-isomorphism between ``E`` and ``F`` is a pair of degree-0 maps
whose composites are ``T^c`` times the identity on both sides; the
interleaving distance is the infimum of such ``c``.  For direct sums of
cyclic modules a matching of summands gives an explicit witness, and the
rank function gives a certified lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import networkx as nx

from .barcode import (
    Bar,
    EqBarcode,
    ModuleMap,
    PlainBarcode,
    compose,
    cone_torsion_order,
)
from .modcat import zeros
from .novikov import INF, QQ, NovikovScalar, exponent, format_q


@dataclass
class Interleaving:
    epsilon: object
    alpha: ModuleMap
    beta: ModuleMap


@dataclass
class WeakInterleaving:
    a: object
    b: object
    alpha: ModuleMap
    beta: ModuleMap
    gamma: ModuleMap
    delta: ModuleMap


@dataclass
class DistanceReport:
    upper: object
    lower: object
    witness: Optional[Interleaving] = None
    exact: bool = field(init=False)

    def __post_init__(self):
        if self.lower > self.upper:
            raise AssertionError("lower bound %s exceeds upper bound %s"
                                 % (format_q(self.lower), format_q(self.upper)))
        self.exact = self.lower == self.upper

    def __str__(self):
        return "d_I lower=%s upper=%s exact=%s" % (
            format_q(self.lower), format_q(self.upper), "true" if self.exact else "false")


# ---------------------------------------------------------------------------
# c-isomorphisms


def check_c_isomorphism(E: EqBarcode, F: EqBarcode, cand: Interleaving) -> bool:
    a, b = cand.alpha, cand.beta
    if (a.source, a.target, b.source, b.target) != (E, F, F, E) or a.degree or b.degree:
        return False
    eps = exponent(cand.epsilon)
    return compose(a, b) == ModuleMap.scalar(E, eps, field=a.field) and \
        compose(b, a) == ModuleMap.scalar(F, eps, field=a.field)


def check_weak(w: WeakInterleaving) -> bool:
    E, F = w.alpha.source, w.alpha.target
    s = exponent(w.a) + exponent(w.b)
    return (compose(w.alpha, w.beta) == ModuleMap.scalar(E, s, field=w.alpha.field)
            and compose(w.gamma, w.delta) == ModuleMap.scalar(F, s, field=w.alpha.field)
            and w.alpha.shift(w.a) == w.delta.shift(w.a)
            and w.beta.shift(w.b) == w.gamma.shift(w.b))


def weak_to_strong(w: WeakInterleaving) -> Interleaving:
    """A ``2(a+b)``-isomorphism from a weak ``(a, b)``-isomorphism.

    With ``A = T^a alpha = T^a delta`` and ``B = T^b beta = T^b gamma``,
    ``B A = T^(a+b) beta alpha`` and ``A B = T^(a+b) delta gamma``.
    """
    if not check_weak(w):
        raise ValueError("not a weak (a, b)-isomorphism")
    eps = 2 * (exponent(w.a) + exponent(w.b))
    out = Interleaving(eps, w.alpha.shift(w.a), w.beta.shift(w.b))
    assert check_c_isomorphism(w.alpha.source, w.alpha.target, out)
    return out


def cone_torsion_of_interleaving(i: Interleaving):
    """Measured torsion order of ``cone(alpha)``; must not exceed ``3 epsilon``."""
    order = cone_torsion_order(i.alpha)
    if order > 3 * exponent(i.epsilon):
        raise AssertionError("cone of a %s-interleaving has torsion order %s"
                             % (format_q(i.epsilon), format_q(order)))
    return order


# ---------------------------------------------------------------------------
# matching distance


def _candidate_grid(xs: Sequence, ys: Sequence) -> List:
    vals = {Fraction(0)}
    vals.update(xs)
    vals.update(ys)
    vals.update(abs(a - b) for a in xs for b in ys)
    return sorted(vals)


def _match(xs: Sequence, ys: Sequence, eps) -> Optional[dict]:
    """Perfect matching of torsion summands with deletion, all costs <= eps.

    Returns ``{i: j}`` for matched pairs (``j`` is ``None`` for a deleted
    ``xs[i]``) or ``None`` if infeasible.
    """
    G = nx.Graph()
    left = [("x", i) for i in range(len(xs))] + [("dy", j) for j in range(len(ys))]
    right = [("y", j) for j in range(len(ys))] + [("dx", i) for i in range(len(xs))]
    G.add_nodes_from(left, bipartite=0)
    G.add_nodes_from(right, bipartite=1)
    for i, a in enumerate(xs):
        for j, b in enumerate(ys):
            if abs(a - b) <= eps:
                G.add_edge(("x", i), ("y", j))
        if a <= eps:
            G.add_edge(("x", i), ("dx", i))
    for j, b in enumerate(ys):
        if b <= eps:
            G.add_edge(("dy", j), ("y", j))
        for i in range(len(xs)):
            G.add_edge(("dy", j), ("dx", i))
    matching = nx.bipartite.hopcroft_karp_matching(G, top_nodes=left)
    if sum(1 for n in left if n in matching) != len(left):
        return None
    out = {}
    for i in range(len(xs)):
        kind, j = matching[("x", i)]
        out[i] = j if kind == "y" else None
    return out


def _witness(E: EqBarcode, F: EqBarcode, pairs: dict, eps, field=QQ) -> Interleaving:
    cut = E.cutoff
    src, tgt = E.summands(), F.summands()
    alpha = zeros(len(tgt), len(src), cut, field)
    beta = zeros(len(src), len(tgt), cut, field)
    nt_e, nt_f = len(E.torsion), len(F.torsion)
    for i, j in pairs.items():
        if j is None:
            continue
        a, b = src[i], tgt[j]
        up = max(Fraction(0), b - a)
        alpha[j][i] = NovikovScalar.monomial(up, 1, cut, field)
        beta[i][j] = NovikovScalar.monomial(eps - up, 1, cut, field)
    for k in range(E.free):
        alpha[nt_f + k][nt_e + k] = NovikovScalar.one(cut, field)
        beta[nt_e + k][nt_f + k] = NovikovScalar.monomial(eps, 1, cut, field)
    return Interleaving(eps, ModuleMap(E, F, alpha, 0, field), ModuleMap(F, E, beta, 0, field))


def matching_upper_bound(E: EqBarcode, F: EqBarcode):
    """Smallest grid value at which a summand matching exists, with its pairs."""
    if E.free != F.free:
        return INF, None
    xs, ys = list(E.torsion), list(F.torsion)
    grid = _candidate_grid(xs, ys)
    lo, hi = 0, len(grid) - 1
    best = None
    # feasibility is monotone in eps
    while lo <= hi:
        mid = (lo + hi) // 2
        m = _match(xs, ys, grid[mid])
        if m is not None:
            best = (grid[mid], m)
            hi = mid - 1
        else:
            lo = mid + 1
    return best


def rank_lower_bound(E: EqBarcode, F: EqBarcode):
    """Least ``eps`` with ``N_E(t+eps) <= N_F(t)`` and ``N_F(t+eps) <= N_E(t)`` for all ``t``.

    ``N`` counts summands of length ``> t`` (free summands have infinite
    length).  An ``eps``-interleaving factors ``T^(t+eps)`` on one side
    through ``T^t`` on the other, and the minimal number of generators
    cannot grow under a surjection.
    """
    def one_side(X, Y):
        xs = sorted(X.summands(), reverse=True)
        ys = Y.summands()
        worst = Fraction(0)
        for t in sorted({Fraction(0)} | {y for y in ys if y != INF}):
            k = sum(1 for y in ys if y > t)
            if k < len(xs):
                need = xs[k] - t
                if need > worst:
                    worst = need
        return worst

    return max(one_side(E, F), one_side(F, E))


def interleaving_distance(E: EqBarcode, F: EqBarcode, field=QQ) -> DistanceReport:
    if E.cutoff != F.cutoff:
        from .novikov import CutoffMismatch

        raise CutoffMismatch("cutoff mismatch")
    lower = rank_lower_bound(E, F)
    best = matching_upper_bound(E, F)
    if best is None or best == (INF, None) or best[0] == INF:
        upper, witness = INF, None
    else:
        upper, pairs = best
        witness = _witness(E, F, pairs, upper, field)
    cut = E.cutoff
    if upper != INF and upper >= cut:
        upper, witness = INF, None
    if lower != INF and lower >= cut:
        lower = INF
    return DistanceReport(upper, lower, witness)


def hofer_distance(E: EqBarcode, F: EqBarcode):
    """Over the Novikov field torsion dies and free summands carry no shift."""
    return Fraction(0) if E.free == F.free else INF


# ---------------------------------------------------------------------------
# the non-equivariant (a, b)-isomorphism distance on plain barcodes


def _pair_bounds(x: Bar, y: Bar):
    """Minimal ``(a, b)`` for a nonzero pair ``x -> T_a y -> T_(a+b) x``, and the strict caps."""
    if x.length == INF and y.length == INF:
        return max(0, x.birth - y.birth), max(0, y.birth - x.birth), INF, INF
    if x.length == INF or y.length == INF:
        return None
    X, Y = x.death, y.death
    a = max(Fraction(0), x.birth - y.birth, X - Y)
    b = max(Fraction(0), y.birth - x.birth, Y - X)
    return a, b, X - y.birth, Y - x.birth


def _plain_feasible(E: PlainBarcode, F: PlainBarcode, a, b) -> bool:
    xs, ys = list(E.bars), list(F.bars)
    G = nx.Graph()
    left = [("x", i) for i in range(len(xs))] + [("dy", j) for j in range(len(ys))]
    G.add_nodes_from(left, bipartite=0)
    G.add_nodes_from([("y", j) for j in range(len(ys))] + [("dx", i) for i in range(len(xs))], bipartite=1)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            if x.degree != y.degree:
                continue
            pb = _pair_bounds(x, y)
            if pb and a >= pb[0] and b >= pb[1] and a < pb[2] and b < pb[3]:
                G.add_edge(("x", i), ("y", j))
        if a + b >= x.length:
            G.add_edge(("x", i), ("dx", i))
    for j, y in enumerate(ys):
        if a + b >= y.length:
            G.add_edge(("dy", j), ("y", j))
        for i in range(len(xs)):
            G.add_edge(("dy", j), ("dx", i))
    m = nx.bipartite.hopcroft_karp_matching(G, top_nodes=left)
    return all(n in m for n in left)


def plain_distance(E: PlainBarcode, F: PlainBarcode):
    """``inf {a + b : E, F are (a, b)-isomorphic}`` over a finite candidate grid."""
    a_cands = {Fraction(0)}
    b_base = {Fraction(0)}
    lengths = [x.length for x in E.bars + F.bars if x.length != INF]
    for x in E.bars:
        for y in F.bars:
            pb = _pair_bounds(x, y)
            if pb:
                a_cands.add(pb[0])
                b_base.add(pb[1])
    best = INF
    for a in sorted(a_cands):
        if a >= best:
            break
        b_cands = set(b_base) | {l - a for l in lengths if l - a > 0}
        for b in sorted(b_cands):
            if a + b >= best:
                break
            if _plain_feasible(E, F, a, b):
                best = a + b
                break
    return best


# ---------------------------------------------------------------------------
# completeness


def tail_radii(eps: Sequence, tail=0) -> List:
    """``R_n = sum_{k >= n} eps_k + tail`` for each term index ``n``."""
    tail = exponent(tail)
    out = [tail]
    for e in reversed(list(eps)):
        out.append(out[-1] + exponent(e))
    return list(reversed(out))


def _witness_pairs(w: Interleaving, E: EqBarcode, F: EqBarcode, eps) -> dict:
    """Summand matching read off a monomial witness, or recomputed at ``eps``."""
    A = w.alpha.entries
    ne, nf_ = E.rank(), F.rank()
    pairs = {}
    used = set()
    ok = True
    for i in range(ne):
        nz = [j for j in range(nf_) if not A[j][i].is_zero()]
        if len(nz) > 1 or (nz and nz[0] in used):
            ok = False
            break
        pairs[i] = nz[0] if nz else None
        used.update(nz)
    if ok:
        return pairs
    m = _match(list(E.torsion), list(F.torsion), eps)
    if m is None:
        raise ValueError("witness does not induce a summand matching at %s" % format_q(eps))
    for k in range(E.free):
        m[len(E.torsion) + k] = len(F.torsion) + k
    return m


def cauchy_limit(seq: Sequence[EqBarcode], eps: Sequence, witnesses: Sequence[Interleaving],
                 tail=0) -> EqBarcode:
    """Limit of a Cauchy sequence given consecutive interleaving witnesses.

    ``eps[n]`` bounds the distance between terms ``n`` and ``n+1`` and
    ``tail`` bounds everything after the last term.  Matched summands are
    chained back from the last term; each chain's limit length is taken in
    the intersection of the certified balls ``[l_n - R_n, l_n + R_n]``,
    at the end the chain is moving towards.  Chains whose limit reaches 0
    disappear.
    """
    if not seq:
        raise ValueError("empty sequence")
    if len(eps) != len(seq) - 1 or len(witnesses) != len(seq) - 1:
        raise ValueError("need one epsilon and one witness per consecutive pair")
    for n, w in enumerate(witnesses):
        if exponent(w.epsilon) > exponent(eps[n]) or not check_c_isomorphism(seq[n], seq[n + 1], w):
            raise ValueError("witness %d is not a valid %s-interleaving" % (n, format_q(eps[n])))
    radii = tail_radii(eps, tail)
    N = len(seq)
    # back[n][j] = summand of seq[n] matched to summand j of seq[n+1]
    back = []
    for n, w in enumerate(witnesses):
        pairs = _witness_pairs(w, seq[n], seq[n + 1], exponent(w.epsilon))
        inv = {j: i for i, j in pairs.items() if j is not None}
        back.append(inv)
    last = seq[-1]
    torsion = []
    for j, length in enumerate(last.summands()):
        if length == INF:
            continue
        chain = [(N - 1, length)]
        cur = j
        for n in range(N - 2, -1, -1):
            if cur not in back[n]:
                break
            cur = back[n][cur]
            chain.append((n, seq[n].summands()[cur]))
        lo = max(max(Fraction(0), l - radii[n]) for n, l in chain)
        hi = min(l + radii[n] for n, l in chain)
        if lo > hi:
            raise ValueError("witnesses are inconsistent with the epsilon schedule")
        current = chain[0][1]
        if len(chain) > 1 and chain[1][1] > current:
            value = lo
        elif len(chain) > 1 and chain[1][1] < current:
            value = hi
        else:
            value = min(max(current, lo), hi)
        if value > 0:
            torsion.append(value)
    return EqBarcode(torsion, last.free, last.cutoff)


# ---------------------------------------------------------------------------
# limits of compatible morphism systems


def limit_lift(alphas: Sequence[ModuleMap], thetas: Sequence) -> ModuleMap:
    """``alpha~`` with ``T^theta_j alpha~ = alpha_j`` for every ``j``."""
    if not alphas or len(alphas) != len(thetas):
        raise ValueError("need one theta per map")
    thetas = [exponent(t) for t in thetas]
    if any(t < 0 for t in thetas) or any(thetas[k] < thetas[k + 1] for k in range(len(thetas) - 1)):
        raise ValueError("thetas must be nonnegative and non-increasing")
    for j in range(len(alphas)):
        for k in range(j + 1, len(alphas)):
            if alphas[j] != alphas[k].shift(thetas[j] - thetas[k]):
                raise ValueError("incompatible system at (%d, %d)" % (j, k))
    last, th = alphas[-1], thetas[-1]
    cut = last.source.cutoff
    try:
        entries = [[x.shift_down(th).with_cutoff(cut) if th else x for x in row] for row in last.entries]
    except ArithmeticError as exc:
        raise ValueError("incompatible system: %s" % exc)
    lift = ModuleMap(last.source, last.target, entries, last.degree, last.field)
    for a, t in zip(alphas, thetas):
        if lift.shift(t) != a:
            raise ValueError("incompatible system: lift does not reproduce a term")
    return lift
