from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from novikovsq import modcat
from novikovsq.modcat import NormalForm, PresentationModule
from novikovsq.novikov import GF, INF, NovikovScalar

from randgen import brute_rank_function, kappa_cokernel, kappa_kernel, rscalar, runit, seeded

T = NovikovScalar.monomial
Z = NovikovScalar.zero


def pm(rows, cols=None, cutoff=INF):
    return PresentationModule(rows, cols, cutoff)


# --- examples ---------------------------------------------------------------


def test_triangular_example():
    M = pm([[T(1), T(2)], [Z(), T(3)]])
    assert modcat.normal_form(M) == NormalForm((3, 1), 0)


def test_unit_presentation_is_zero():
    assert modcat.normal_form(pm([[NovikovScalar.one()]])).is_zero()


def test_zero_relations_are_free():
    M = pm([[Z(), Z(), Z()]])
    assert modcat.normal_form(M) == NormalForm((), 3)
    assert modcat.normal_form(PresentationModule([], 3)) == NormalForm((), 3)


def test_rank_function_examples():
    M = pm([[T(3)]])
    assert modcat.rank_function(M, 1) == 1
    assert modcat.rank_function(M, 3) == 0
    assert modcat.rank_function(NormalForm((3,), 0), Fraction(5, 2)) == 1


def test_torsion_order():
    assert modcat.torsion_order(NormalForm((3, 1), 0)) == 3
    assert modcat.torsion_order(NormalForm((), 1)) == INF
    assert modcat.torsion_order(NormalForm()) == 0


def test_almost_parts():
    z, rest = modcat.almost_parts(NormalForm((2,), 1), markers=1)
    assert z == NormalForm((), 0, 1)
    assert rest == NormalForm((2,), 1)
    z, _ = modcat.almost_parts(pm([[T(2)]]))
    assert z.is_zero()


def test_base_change_examples():
    M = NormalForm((2,), 0)
    assert modcat.base_change(M, modcat.RESIDUE) == (1, 1)
    assert modcat.base_change(NormalForm((), 1), modcat.RESIDUE) == (1, 0)
    assert modcat.base_change(M, modcat.FIELD) == 0
    assert modcat.base_change(NormalForm((3, 1), 2), "truncation", 2) == NormalForm((2, 2, 2, 1), 0)
    with pytest.raises(ValueError):
        modcat.base_change(M, "nowhere")


def test_normal_form_text_round_trip():
    nf = NormalForm((Fraction(5, 2), 1), 2)
    assert str(nf) == "torsion: [5/2, 1], free: 2"
    assert modcat.parse_normal_form(str(nf)) == nf
    with pytest.raises(ValueError):
        modcat.parse_normal_form("torsion 1")
    with pytest.raises(ValueError):
        NormalForm((0,), 0)


def test_kernel_cokernel_cyclic():
    for a in [Fraction(1, 2), 1, 3, 5]:
        A = [[T(a)]]
        m = min(Fraction(a), 3)
        assert modcat.kernel(A, [3], [3]) == NormalForm((m,), 0)
        assert modcat.cokernel(A, [3], [3]) == NormalForm((m,), 0)


def test_kernel_cokernel_free():
    A = [[T(2)]]
    assert modcat.kernel(A, [INF], [INF]).is_zero()
    assert modcat.cokernel(A, [INF], [INF]) == NormalForm((2,), 0)
    assert modcat.cokernel(A, [INF], [3]) == NormalForm((2,), 0)


def test_finite_cutoff_and_prime_field():
    F3 = GF(3)
    M = PresentationModule([[T(1, 1, 4, F3), T(1, 2, 4, F3)], [T(1, 1, 4, F3), T(1, 1, 4, F3)]], 2, 4, F3)
    # second row minus first = (0, -T) so the torsion is [1, 1]
    assert modcat.normal_form(M) == NormalForm((1, 1), 0)
    M = PresentationModule([[T(5, 1, 4)]], 1, 4)
    assert modcat.normal_form(M) == NormalForm((), 1)


def test_ragged_rejected():
    with pytest.raises(ValueError):
        PresentationModule([[T(1)], [T(1), T(2)]])


# --- properties -------------------------------------------------------------


# elimination needs a finite cutoff; one above every possible minor valuation
# (size * max exponent) loses nothing
CUT = 3 * 4 + 1


def random_matrix(rng, rows, cols, max_exp=4):
    return [[rscalar(rng, CUT, max_terms=2, max_exp=max_exp) for _ in range(cols)] for _ in range(rows)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3))
def test_rank_function_matches_minors(seed, rows, cols):
    rng = seeded(seed)
    A = random_matrix(rng, rows, cols)
    nf = modcat.normal_form(pm(A, cols, CUT))
    for k in range(0, 4 * 6 + 1, 3):
        t = Fraction(k, 6)
        assert modcat.rank_function(nf, t) == brute_rank_function(A, cols, t)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_invariant_under_row_and_column_operations(seed):
    rng = seeded(seed)
    rows, cols = rng.randint(1, 3), rng.randint(1, 3)
    A = random_matrix(rng, rows, cols)
    base = modcat.normal_form(pm(A, cols, CUT))
    B = [list(r) for r in A]
    # add a multiple of one row to another, scale a row by a unit, permute columns
    if rows > 1:
        c = rscalar(rng, CUT, max_terms=2)
        B[1] = [x + c * y for x, y in zip(B[1], B[0])]
    u = runit(rng, CUT)
    B[0] = [u * x for x in B[0]]
    perm = list(range(cols))
    rng.shuffle(perm)
    B = [[r[p] for p in perm] for r in B]
    if cols > 1:
        c = rscalar(rng, CUT, max_terms=2)
        for r in B:
            r[1] = r[1] + c * r[0]
    rng.shuffle(B)
    assert modcat.normal_form(pm(B, cols, CUT)) == base


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_direct_sum_and_nakayama(seed):
    rng = seeded(seed)
    A = pm(random_matrix(rng, rng.randint(1, 2), 2), 2, CUT)
    B = pm(random_matrix(rng, rng.randint(1, 2), 2), 2, CUT)
    na, nb = modcat.normal_form(A), modcat.normal_form(B)
    assert modcat.normal_form(A.direct_sum(B)) == na.direct_sum(nb)
    tor0, tor1 = modcat.base_change(na, modcat.RESIDUE)
    assert (tor0 == 0) == na.is_zero()
    assert tor0 == modcat.rank_function(na, 0)
    assert tor1 == len(na.torsion)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_kernel_cokernel_match_kappa_model(seed):
    rng = seeded(seed)
    den = 2
    src = [Fraction(rng.randint(1, 6), den) for _ in range(rng.randint(1, 2))]
    tgt = [Fraction(rng.randint(1, 6), den) for _ in range(rng.randint(1, 2))]
    A = [[rscalar(rng, INF, max_terms=2, max_exp=3, den=den) for _ in src] for _ in tgt]
    # only module maps: entry (k, i) must kill T^{src_i}, i.e. have valuation >= tgt_k - src_i
    A = [[x.shift(max(Fraction(0), tgt[k] - src[i])) for i, x in enumerate(row)] for k, row in enumerate(A)]
    assert list(modcat.kernel(A, src, tgt).torsion) == kappa_kernel(A, src, tgt, den)
    assert list(modcat.cokernel(A, src, tgt).torsion) == kappa_cokernel(A, src, tgt, den)


def test_kernel_free_non_terminating_ratio():
    # (1 + T^(1/3)) / (1 - T^(2/3)) does not terminate; the answer is exact anyway
    one = NovikovScalar.one()
    a = one + T(Fraction(1, 3))
    b = one - T(Fraction(2, 3))
    A = [[a, b], [a * T(1), b * T(1)]]
    assert modcat.kernel(A, [INF, INF], [INF, INF]) == NormalForm((), 1)
    assert modcat.cokernel(A, [INF, INF], [INF, INF]) == NormalForm((), 1)
    # T^3 on a free summand has no kernel, whatever the truncation suggests
    assert modcat.kernel([[T(3) + T(Fraction(7, 2))]], [INF], [INF]).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_free_kernel_ranks(seed):
    rng = seeded(seed)
    src = [INF] * rng.randint(1, 2) + [Fraction(rng.randint(1, 6), 2) for _ in range(rng.randint(0, 1))]
    tgt = [INF] * rng.randint(1, 2) + [Fraction(rng.randint(1, 6), 2) for _ in range(rng.randint(0, 1))]
    A = [[rscalar(rng, INF, max_terms=2, max_exp=3, den=2) for _ in src] for _ in tgt]
    A = [[x.shift(max(Fraction(0), tgt[k] - src[i])) if tgt[k] != INF and src[i] != INF else x
          for i, x in enumerate(row)] for k, row in enumerate(A)]
    # there are no nonzero maps from a torsion summand into a free one
    A = [[x if src[i] == INF or tgt[k] != INF else NovikovScalar.zero() for i, x in enumerate(row)]
         for k, row in enumerate(A)]
    ker = modcat.kernel(A, src, tgt)
    coker = modcat.cokernel(A, src, tgt)
    nsrc = sum(1 for c in src if c == INF)
    ntgt = sum(1 for c in tgt if c == INF)
    assert nsrc - ntgt == ker.free - coker.free


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_exact_elimination_matches_kappa_model(seed):
    rng = seeded(seed)
    den = 2
    src = [Fraction(rng.randint(1, 6), den) for _ in range(rng.randint(1, 2))]
    tgt = [Fraction(rng.randint(1, 6), den) for _ in range(rng.randint(1, 2))]
    A = [[rscalar(rng, INF, max_terms=3, max_exp=3, den=den) for _ in src] for _ in tgt]
    A = [[x.shift(max(Fraction(0), tgt[k] - src[i])) for i, x in enumerate(row)] for k, row in enumerate(A)]
    assert list(modcat._dvr_kernel(A, src, tgt).torsion) == kappa_kernel(A, src, tgt, den)
