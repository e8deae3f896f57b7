from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from novikovsq import barcode, modcat
from novikovsq.barcode import Bar, EqBarcode, ModuleMap, PlainBarcode, RawInterval
from novikovsq.modcat import NormalForm, PresentationModule
from novikovsq.novikov import INF, CutoffMismatch, NovikovScalar

from randgen import kappa_ext1, kappa_hom, rbarcode, seeded

T = NovikovScalar.monomial


# --- brute-force stalks of interval sheaves ----------------------------------


def hc_interval(left, right, closed_left, closed_right):
    """(dim H^0_c, dim H^1_c) of an interval by case analysis."""
    if right < left or (right == left and not (closed_left and closed_right)):
        return (0, 0)
    if right == INF:
        closed_right = False
    if closed_left and closed_right:
        return (1, 0)
    if not closed_left and not closed_right:
        return (0, 1)
    return (0, 0)


def conv_stalk(x, y, t):
    """Stalk at t of K_x * K_y: H_c of {u in x : t - u in y} = x cap (t - y)."""
    # t - [b2, d2) = (t - d2, t - b2]
    lo2 = -INF if y.length == INF else t - y.death
    hi2 = t - y.birth
    if x.birth > lo2:
        left, cl = x.birth, True
    else:
        left, cl = lo2, False
    dx = x.death if x.length != INF else INF
    if hi2 < dx:
        right, cr = hi2, True
    else:
        right, cr = dx, False
    h0, h1 = hc_interval(left, right, cl, cr)
    return {x.degree + y.degree: h0, x.degree + y.degree + 1: h1}


def dims_from_bars(bars, t):
    out = {}
    for b in bars:
        if b.birth <= t < b.death:
            out[b.degree] = out.get(b.degree, 0) + 1
    return out


def brute_conv_dims(a, b, t):
    out = {}
    for x in a.bars:
        for y in b.bars:
            for k, v in conv_stalk(x, y, t).items():
                out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


# --- examples ---------------------------------------------------------------


def test_ray_convolution():
    a = PlainBarcode([Bar(1, INF)])
    b = PlainBarcode([Bar(2, INF)])
    assert barcode.star(a, b) == PlainBarcode([Bar(3, INF)])


def test_finite_bar_convolution_matches_stalks():
    a = PlainBarcode([Bar(0, 2)])
    b = PlainBarcode([Bar(0, 3)])
    out = barcode.star(a, b)
    assert out == PlainBarcode([Bar(0, 2, 0), Bar(3, 2, 1)])
    for k in range(-2, 14):
        t = Fraction(k, 2)
        assert dims_from_bars(out.bars, t) == brute_conv_dims(a, b, t)


def test_unit_law_example():
    E = EqBarcode((2, Fraction(1, 3)), 1)
    assert barcode.star(E, EqBarcode.unit()) == E


def test_cyclic_tensor():
    out = barcode.star(EqBarcode((2,)), EqBarcode((3,)))
    assert out == EqBarcode((2,))
    # presentation oracle: one generator, relations T^2 and T^3
    M = PresentationModule([[T(2)], [T(3)]], 1)
    assert modcat.normal_form(M) == out.normal_form


def test_star_cutoff_mismatch():
    with pytest.raises(CutoffMismatch):
        barcode.star(EqBarcode((), 1, 3), EqBarcode((), 1, 4))


def test_mixed_star():
    E = EqBarcode((3,), 1)
    b = PlainBarcode([Bar(7, 2)])
    assert barcode.star(E, b) == EqBarcode((2, 2))
    assert barcode.star(b, E) == EqBarcode((2, 2))


def test_induce_examples():
    assert barcode.induce(PlainBarcode([Bar(5, INF)])) == EqBarcode((), 1)
    assert barcode.induce(PlainBarcode([Bar(0, 2)])) == EqBarcode((2,))
    assert barcode.induce(PlainBarcode()) == EqBarcode()


def test_induce_preserves_t_shift():
    E = barcode.induce(PlainBarcode([Bar(0, 2), Bar(1, INF)]))
    f = ModuleMap.scalar(E, Fraction(1, 2))
    assert f == ModuleMap.identity(E).shift(Fraction(1, 2))


@pytest.mark.parametrize("text,expected", [
    ("[1,3)", [Bar(1, 2, 0)]),
    ("(1,3]", []),
    ("(1,3)", [Bar(3, INF, 1)]),
    ("[1,3]", [Bar(1, INF, 0)]),
    ("[2,2]", [Bar(2, INF, 0)]),
    ("[1,inf)", [Bar(1, INF, 0)]),
    ("(1,inf)", []),
])
def test_project_examples(text, expected):
    assert barcode.project([RawInterval.parse(text)]) == PlainBarcode(expected)


def test_project_empty():
    assert barcode.project([]) == PlainBarcode()


def test_project_is_convolution_with_ray():
    # half-open input bars are fixed points of  - * K_[0, inf)
    b = PlainBarcode([Bar(1, 2), Bar(0, INF)])
    assert barcode.star(b, PlainBarcode([Bar(0, INF)])) == b


def test_hom_examples():
    h = barcode.hom(EqBarcode((2,)), EqBarcode((5,)))
    assert h[0] == NormalForm((2,), 0)
    assert barcode.hom_generator_valuation(2, 5) == 3
    assert barcode.hom(EqBarcode((), 1), EqBarcode((), 1))[0] == NormalForm((), 1)
    assert barcode.hom(EqBarcode((3,)), EqBarcode((1,)))[1] == NormalForm((1,), 0)
    assert barcode.hom(EqBarcode((), 1), EqBarcode((4,)))[0] == NormalForm((4,), 0)
    assert barcode.hom(EqBarcode((4,)), EqBarcode((), 1)) == {0: NormalForm(), 1: NormalForm((4,), 0)}


def test_module_map_valuation_constraint():
    E, F = EqBarcode((2,)), EqBarcode((5,))
    ModuleMap(E, F, [[T(3)]])
    with pytest.raises(ValueError):
        ModuleMap(E, F, [[T(1)]])
    with pytest.raises(ValueError):
        ModuleMap(E, F, [[T(3), T(3)]])


def test_compose_scalars():
    E = EqBarcode((5, 2), 1)
    f = ModuleMap.scalar(E, 1)
    g = ModuleMap.scalar(E, Fraction(3, 2))
    assert barcode.compose(f, g) == ModuleMap.scalar(E, Fraction(5, 2))


def test_cone_examples():
    for a in [Fraction(1, 2), 2, 4]:
        E = EqBarcode((3,))
        c = barcode.cone(ModuleMap.scalar(E, a))
        m = min(Fraction(a), 3)
        assert c == {-1: EqBarcode((m,)), 0: EqBarcode((m,))}
    E = EqBarcode((3, 1), 2)
    assert all(h.is_zero() for h in barcode.cone(ModuleMap.identity(E)).values())


def test_plain_text_round_trip():
    b = PlainBarcode([Bar(0, 2), Bar(Fraction(1, 3), INF)])
    assert barcode.parse_plain(barcode.serialize_plain(b)) == b
    with pytest.raises(ValueError):
        Bar(0, 0)


# --- properties -------------------------------------------------------------


seeds = st.integers(0, 10 ** 6)


def rplain(rng, n=2):
    bars = []
    for _ in range(rng.randint(1, n)):
        birth = Fraction(rng.randint(-4, 4), 2)
        length = INF if rng.random() < 0.3 else Fraction(rng.randint(1, 6), 2)
        bars.append(Bar(birth, length, rng.randint(0, 1)))
    return PlainBarcode(bars)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_plain_star_matches_stalk_oracle(seed):
    rng = seeded(seed)
    a, b = rplain(rng), rplain(rng)
    out = barcode.star(a, b)
    for k in range(-20, 30):
        t = Fraction(k, 4)
        assert dims_from_bars(out.bars, t) == brute_conv_dims(a, b, t)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_symmetric_monoidal(seed):
    rng = seeded(seed)
    a, b, c = rbarcode(rng), rbarcode(rng), rbarcode(rng)
    star = barcode.star
    assert star(a, b) == star(b, a)
    assert star(star(a, b), c) == star(a, star(b, c))
    assert star(a, EqBarcode.unit()) == a
    assert star(a.direct_sum(b), c) == star(a, c).direct_sum(star(b, c))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_induce_compatible_with_star(seed):
    rng = seeded(seed)
    a = PlainBarcode([b for b in rplain(rng).bars if b.degree == 0] or [Bar(0, 1)])
    b = PlainBarcode([x for x in rplain(rng).bars if x.degree == 0] or [Bar(0, INF)])
    ab = barcode.star(a, b)
    assert barcode.induce(ab, 0) == barcode.star(barcode.induce(a), b)
    # the extra degree-one bars carry exactly Tor_1
    assert barcode.induce(ab, 1) == barcode.derived_star(barcode.induce(a), b)[-1]


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_hom_matches_kappa_model(seed):
    rng = seeded(seed)
    den = 2
    src = [Fraction(rng.randint(1, 6), den) for _ in range(rng.randint(1, 2))]
    tgt = [Fraction(rng.randint(1, 6), den) for _ in range(rng.randint(1, 2))]
    h = barcode.hom(EqBarcode(src), EqBarcode(tgt))
    assert list(h[0].torsion) == kappa_hom(src, tgt, den)
    assert list(h[1].torsion) == kappa_ext1(src, tgt, den)
    assert h[0].free == h[1].free == 0


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_scalar_endomorphisms(seed):
    rng = seeded(seed)
    E = rbarcode(rng, max_free=0)
    a = Fraction(rng.randint(0, 36), 6)
    f = ModuleMap.scalar(E, a)
    assert f.is_zero() == (a >= E.torsion_order())
    c = barcode.cone(f)
    for h in c.values():
        assert h.torsion_order() <= 2 * a
    assert c[0] == EqBarcode([min(a, x) for x in E.torsion if min(a, x) > 0])


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_euler_characteristic(seed):
    rng = seeded(seed)
    # Lambda-ranks only make sense at infinite cutoff, where exact division
    # needs monomial entries
    E, F = rbarcode(rng, max_free=2), rbarcode(rng, max_free=2)
    # a random honest map: each entry T^(valuation bound) times a random coefficient
    entries = []
    for b in F.summands():
        row = []
        for a in E.summands():
            v = barcode.hom_generator_valuation(a, b)
            row.append(T(v + Fraction(rng.randint(0, 2), 2), rng.randint(-2, 2)) if v != INF else T(0, 0))
        entries.append(row)
    f = ModuleMap(E, F, entries)
    c = barcode.cone(f)
    assert E.free - F.free == c[-1].free - c[0].free
