"""Determinants of based complexes and the resultant pipeline."""
import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricres.complexes import koszul_generic
from toricres.errors import InputError, MathFailure
from toricres.fixtures import (
    M33_ELIMINANT_TEXT,
    linear3_problem,
    m33_problem,
    sturmfels_eliminant,
    sturmfels_problem,
    sturmfels_twist,
)
from toricres.qpoly import (
    PolyMatrix,
    SparsePoly,
    poly_from_text,
    primitive_part,
    same_up_to_sign,
)
from toricres.resultant import (
    a_resultant,
    determinant_of_complex,
    implicitize_curve,
    incidence_sample,
    membership_test,
    random_specialization,
    resolve_twist,
    sylvester_resultant,
)
from toricres.toric import support_problem, variety_of
from toricres.weyman import weyman_differential


def embed(p: SparsePoly, variables) -> SparsePoly:
    """Reindex a polynomial into a variable tuple containing its own."""
    variables = tuple(variables)
    pos = [variables.index(v) for v in p.vars]
    terms = {}
    for e, c in p.terms.items():
        key = [0] * len(variables)
        for i, k in zip(pos, e):
            key[i] = k
        terms[tuple(key)] = c
    return SparsePoly(variables, terms)


def univariate_problem(d1: int, d2: int, labels=None):
    return support_problem([[(k,) for k in range(d1 + 1)],
                            [(k,) for k in range(d2 + 1)]], labels=labels)


def generic_univariate_pair(problem, d1, d2):
    labs = problem.all_labels()
    uvars = tuple(labs) + ("x",)
    n = len(labs)
    f = SparsePoly(uvars, {tuple(1 if i == k else 0 for i in range(n)) + (k,): 1
                           for k in range(d1 + 1)})
    g = SparsePoly(uvars, {tuple(1 if i == d1 + 1 + k else 0 for i in range(n)) + (k,): 1
                           for k in range(d2 + 1)})
    return f, g, uvars


# -- sylvester oracle ------------------------------------------------------------


def test_sylvester_of_a_linear_pair_is_the_two_by_two_determinant():
    vs = ("a0", "a1", "b0", "b1", "x")
    f = poly_from_text("1 * a0 + 1 * a1 * x", vs)
    g = poly_from_text("1 * b0 + 1 * b1 * x", vs)
    assert sylvester_resultant(f, g, "x") == poly_from_text(
        "1 * a0 * b1 + -1 * a1 * b0", vs)


def test_sylvester_detects_a_shared_root():
    vs = ("x",)
    f = poly_from_text("1 * x^2 + -1", vs)
    assert sylvester_resultant(f, poly_from_text("1 * x + -1", vs), "x").is_zero()
    assert not sylvester_resultant(f, poly_from_text("1 * x + -2", vs), "x").is_zero()


def test_sylvester_rejects_degenerate_input():
    vs = ("a", "x")
    f = poly_from_text("1 * a * x", vs)
    with pytest.raises(InputError):
        sylvester_resultant(f, SparsePoly.zero(vs), "x")
    with pytest.raises(InputError):
        sylvester_resultant(f, poly_from_text("1 * a", vs), "x")
    with pytest.raises(InputError):
        sylvester_resultant(f, f, "y")


@given(st.lists(st.integers(-4, 4), min_size=2, max_size=3),
       st.lists(st.integers(-4, 4), min_size=2, max_size=3),
       st.lists(st.integers(-4, 4), min_size=2, max_size=3))
@settings(max_examples=25, deadline=None)
def test_sylvester_is_multiplicative_in_the_second_slot(ca, cb, cc):
    """|Res(f, g*h)| = |Res(f, g)| * |Res(f, h)| for constant coefficients."""
    vs = ("x",)

    def mk(cs):
        return SparsePoly(vs, {(k,): c for k, c in enumerate(cs[:-1] + [cs[-1] or 1])})

    f, g, h = mk(ca), mk(cb), mk(cc)
    lhs = sylvester_resultant(f, g * h, "x").constant_value()
    rhs = (sylvester_resultant(f, g, "x") * sylvester_resultant(f, h, "x")).constant_value()
    assert abs(Fraction(lhs)) == abs(Fraction(rhs))


# -- determinants of based complexes ----------------------------------------------


def two_by_two():
    vm = ("p", "q")
    m = PolyMatrix.from_rows(
        [[poly_from_text("1 * p", vm), poly_from_text("1", vm)],
         [poly_from_text("1", vm), poly_from_text("1 * q", vm)]], vm)
    return vm, m


def test_two_term_square_determinant_is_the_plain_determinant():
    vm, m = two_by_two()
    assert same_up_to_sign(determinant_of_complex({-1: m}), m.det())


def test_determinant_unchanged_by_an_invertible_split_summand():
    """Padding with an identity pair in adjacent degrees keeps the determinant."""
    vm, m = two_by_two()
    zero = SparsePoly.zero(vm)
    one = SparsePoly.const(vm, 1)
    head = PolyMatrix.from_rows([[one, zero, zero]], vm)
    body = PolyMatrix.from_rows([[zero, zero], list(m.rows[0]), list(m.rows[1])], vm)
    padded = determinant_of_complex({-2: head, -1: body})
    assert same_up_to_sign(padded, m.det())


def test_determinant_is_seed_independent_up_to_sign():
    prob = linear3_problem()
    x = variety_of(prob)
    W = weyman_differential(koszul_generic(prob, x).twist(resolve_twist(x, "default")))
    a = determinant_of_complex(W, seed=0)
    b = determinant_of_complex(W, seed=7)
    assert same_up_to_sign(primitive_part(a), primitive_part(b))


def test_determinant_rejects_a_complex_with_homology():
    vm = ("p", "q")
    p = poly_from_text("1 * p", vm)
    q = poly_from_text("1 * q", vm)
    m = PolyMatrix.from_rows([[p, q], [p, q]], vm)
    with pytest.raises(MathFailure, match="homology"):
        determinant_of_complex({-1: m})


# -- the resultant pipeline --------------------------------------------------------


def test_binomial_resultant_for_two_point_supports():
    prob = univariate_problem(1, 1)
    out = a_resultant(prob)
    labs = prob.all_labels()
    expect = SparsePoly(tuple(labs), {(1, 0, 0, 1): 1, (0, 1, 1, 0): -1})
    assert out.multiplicity == 1
    assert same_up_to_sign(embed(out.delta, labs), expect)


def test_univariate_resultants_match_the_sylvester_oracle():
    for d1, d2 in itertools.product(range(1, 5), repeat=2):
        prob = univariate_problem(d1, d2)
        out = a_resultant(prob)
        f, g, uvars = generic_univariate_pair(prob, d1, d2)
        syl = sylvester_resultant(f, g, "x")
        assert out.multiplicity == 1, (d1, d2)
        assert same_up_to_sign(embed(out.delta, uvars), syl), (d1, d2)


def test_relabeled_problems_give_the_same_resultant():
    rng = random.Random(23)
    base = univariate_problem(2, 3)
    ref = a_resultant(base)
    for trial in range(5):
        labels = [[f"w{rng.randrange(10 ** 6)}_{j}_{k}" for k in range(len(sup))]
                  for j, sup in enumerate(base.supports)]
        prob = univariate_problem(2, 3, labels=labels)
        out = a_resultant(prob)
        renamed = ref.delta.rename(
            tuple(dict(zip(base.all_labels(), prob.all_labels()))[v]
                  for v in ref.delta.vars))
        assert same_up_to_sign(embed(renamed, prob.all_labels()),
                               embed(out.delta, prob.all_labels()))


def test_linear_system_resultant_is_the_coefficient_determinant():
    prob = linear3_problem()
    out = a_resultant(prob)
    labs = prob.all_labels()
    m = PolyMatrix(3, 3, labs)
    for j in range(3):
        for k in range(3):
            m.rows[j][k] = SparsePoly(
                labs, {tuple(1 if i == 3 * j + k else 0 for i in range(9)): 1})
    assert out.multiplicity == 1
    assert same_up_to_sign(embed(out.delta, labs), m.det())


def test_incidence_samples_vanish_and_generic_samples_do_not():
    rng = random.Random(41)
    for prob in (linear3_problem(), univariate_problem(2, 2)):
        delta = a_resultant(prob).delta
        for _ in range(20):
            assert membership_test(delta, incidence_sample(prob, rng))
        for _ in range(20):
            assert not membership_test(delta, random_specialization(prob, rng))


def test_membership_requires_a_full_specialization():
    prob = univariate_problem(1, 1)
    delta = a_resultant(prob).delta
    spec = incidence_sample(prob, random.Random(1))
    spec.pop(sorted(spec)[0])
    with pytest.raises(InputError):
        membership_test(delta, spec)


def test_perfect_power_multiplicity_is_extracted():
    """Supports {0,2},{0,2} on the line square the binomial resultant."""
    prob = support_problem([[(0,), (2,)], [(0,), (2,)]])
    out = a_resultant(prob)
    labs = prob.all_labels()
    root = SparsePoly(tuple(labs), {(0, 1, 1, 0): 1, (1, 0, 0, 1): -1})
    assert out.multiplicity == 2
    assert same_up_to_sign(embed(out.root, labs), root)
    assert same_up_to_sign(embed(out.root, labs) ** 2, embed(out.delta, labs))


def test_codimension_gate_rejects_deficient_supports():
    prob = support_problem([[(0,)], [(0,)]])
    with pytest.raises(MathFailure, match="codimension"):
        a_resultant(prob)


def test_support_count_must_match_the_dimension():
    prob = support_problem([[(0, 0), (1, 0), (0, 1)], [(0, 0), (1, 0), (0, 1)]])
    with pytest.raises(InputError, match="supports"):
        a_resultant(prob)


def test_resultant_does_not_depend_on_the_twist():
    """Three unit squares: shapes change with the twist, the determinant not."""
    sq = [(0, 0), (1, 0), (0, 1), (1, 1)]
    prob = support_problem([list(sq)] * 3)
    ref = a_resultant(prob)
    assert ref.delta.total_degree() == 6
    for tw in ((-1, 2), (3, -1)):
        out = a_resultant(prob, twist=tw)
        assert out.term_ranks != ref.term_ranks
        assert same_up_to_sign(embed(out.delta, ref.delta.vars), ref.delta)


def test_resultant_output_serializes():
    out = a_resultant(univariate_problem(1, 2))
    obj = out.to_obj()
    assert obj["multiplicity"] == 1
    assert set(obj) >= {"delta", "root", "e1", "term_ranks", "twist",
                        "policy", "index_subsets"}
    back = poly_from_text(obj["delta"], tuple(obj["coefficients"]))
    assert back == out.delta.rename(tuple(obj["coefficients"]))


# -- printed fixtures ---------------------------------------------------------------


def test_sturmfels_resultant_equals_the_printed_eliminant():
    prob = sturmfels_problem()
    x = variety_of(prob)
    out = a_resultant(prob, twist=sturmfels_twist(x, "unit"))
    assert out.multiplicity == 1
    assert {i: n for i, n in out.term_ranks.items()} == {-1: 15, 0: 15}
    eli = sturmfels_eliminant()
    assert same_up_to_sign(embed(out.delta, eli.vars), eli)


def test_stable_twist_gives_the_same_determinant():
    prob = sturmfels_problem()
    x = variety_of(prob)
    out = a_resultant(prob, twist=sturmfels_twist(x, "stable"))
    assert out.term_ranks == {-2: 4, -1: 27, 0: 23}
    eli = sturmfels_eliminant()
    assert same_up_to_sign(embed(out.delta, eli.vars), eli)


def test_m33_eliminant_vanishes_on_incidence_samples():
    prob = m33_problem()
    h = poly_from_text(M33_ELIMINANT_TEXT, prob.all_labels())
    rng = random.Random(9)
    for _ in range(20):
        assert membership_test(h, incidence_sample(prob, rng))
    for _ in range(20):
        assert not membership_test(h, random_specialization(prob, rng))


# -- implicitization ------------------------------------------------------------------


LINE = ("s", "t")


def random_form(rng: random.Random, d: int) -> SparsePoly:
    return SparsePoly(LINE, {(d - k, k): rng.randint(-5, 5) or 1
                             for k in range(d + 1)})


def sylvester_implicitization(f0, f1, f2, d):
    """Resultant in the dehomogenized line coordinate."""
    ov = ("u", "v", "t")

    def deh(p, chart=None):
        terms = {}
        for e, c in p.terms.items():
            key = (1 if chart == "u" else 0, 1 if chart == "v" else 0, e[1])
            terms[key] = terms.get(key, 0) + c
        return SparsePoly(ov, terms)

    return primitive_part(sylvester_resultant(
        deh(f0, "u") - deh(f1), deh(f0, "v") - deh(f2), "t"))


def test_implicitization_matches_the_sylvester_oracle():
    rng = random.Random(3)
    for d in (1, 2, 3):
        f0, f1, f2 = (random_form(rng, d) for _ in range(3))
        eq = implicitize_curve(f0, f1, f2)
        oracle = sylvester_implicitization(f0, f1, f2, d)
        assert same_up_to_sign(embed(eq, oracle.vars), oracle), d


def test_implicit_equation_of_the_standard_conic():
    f0 = poly_from_text("1 * s^2", LINE)
    f1 = poly_from_text("1 * s * t", LINE)
    f2 = poly_from_text("1 * t^2", LINE)
    eq = implicitize_curve(f0, f1, f2)
    assert same_up_to_sign(eq, poly_from_text("1 * u^2 + -1 * v", eq.vars))


def test_implicit_equation_vanishes_on_the_image():
    rng = random.Random(18)
    f0, f1, f2 = (random_form(rng, 3) for _ in range(3))
    eq = implicitize_curve(f0, f1, f2)
    hits = 0
    for k in range(10):
        tv = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
        point = {"s": Fraction(1), "t": tv}
        den = f0.eval(point)
        if not den:
            continue
        spec = {"u": Fraction(f1.eval(point)) / den,
                "v": Fraction(f2.eval(point)) / den}
        assert eq.eval({w: spec.get(w, Fraction(0)) for w in eq.vars}) == 0
        hits += 1
    assert hits >= 8


def test_implicitization_keeps_free_parameters():
    vs = ("c", "s", "t")
    f0 = poly_from_text("1 * s^2", vs)
    f1 = poly_from_text("1 * t^2", vs)
    f2 = poly_from_text("1 * c * s * t", vs)
    eq = implicitize_curve(f0, f1, f2)
    assert eq.vars == ("c", "u", "v")
    assert same_up_to_sign(eq, poly_from_text("1 * c^2 * u + -1 * v^2", eq.vars))


def test_implicitization_rejects_a_common_factor():
    f0 = poly_from_text("1 * s^2", LINE)
    f1 = poly_from_text("1 * s * t", LINE)
    f2 = poly_from_text("1 * s^2 + 1 * s * t", LINE)
    with pytest.raises(MathFailure, match="common factor"):
        implicitize_curve(f0, f1, f2)


def test_implicitization_validates_its_input():
    f0 = poly_from_text("1 * s^2", LINE)
    f1 = poly_from_text("1 * s * t", LINE)
    with pytest.raises(InputError):
        implicitize_curve(f0, f1, poly_from_text("1 * t", LINE))
    with pytest.raises(InputError):
        implicitize_curve(f0, f1, SparsePoly.zero(LINE))
    with pytest.raises(InputError):
        implicitize_curve(f0, f1, f1.rename(("s", "u")))
