"""Twisting maps: oracles for the rules, hexagon checks, inversion,
twisted multiplication, and module compatibility."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twistres.algebra import (
    SpecMismatchError, basis_up_to, cyclic_group_algebra, filtration_degree,
    multiply, parse_element, polynomial_algebra, solvable_2dim_algebra,
    weyl_algebra,
)
from twistres.kernel import QQ, PrimeField
from twistres.twist import (
    LEFT_BIMODULE, ONE_SIDED, RIGHT_BIMODULE,
    AlgebraAsBimodule, GroundModule, MissingRuleError, NonInvertibleTwistError,
    TwistError, apply_twist, bijective_on_truncation, check_bimodule_compat,
    check_hexagon, custom_twist, flip_twist, invert_twist, ore_twist,
    self_bimodule_compat, self_right_bimodule_compat, skew_group_twist,
    solvable_pair_twist, transposition_compat, triangular_action_twist,
    twisted_multiply, weyl_twist,
)


def flip_xy():
    return flip_twist(polynomial_algebra(("x",)), polynomial_algebra(("y",)))


# -- rule oracles -------------------------------------------------------------


def test_weyl_rule_on_generators():
    t = weyl_twist()
    y = parse_element("y", t.b_spec)
    x = parse_element("x", t.a_spec)
    out = apply_twist(t, y, x)
    assert out == parse_element("x⊗y - 1", t.product())


def test_unit_conditions():
    t = weyl_twist()
    one_b = t.b_spec.one()
    x = parse_element("x", t.a_spec)
    assert apply_twist(t, one_b, x) == parse_element("x", t.product())
    y = parse_element("y", t.b_spec)
    assert apply_twist(t, y, t.a_spec.one()) == parse_element("y", t.product())


def test_weyl_rule_on_square():
    # two rewriting steps by hand: y^2 x = x y^2 - 2 y
    t = weyl_twist()
    y2 = parse_element("y^2", t.b_spec)
    x = parse_element("x", t.a_spec)
    assert apply_twist(t, y2, x) == parse_element("x⊗y^2 - 2*y", t.product())


def test_apply_twist_rejects_foreign_elements():
    t = weyl_twist()
    with pytest.raises(SpecMismatchError):
        apply_twist(t, parse_element("x", t.a_spec), parse_element("x", t.a_spec))


def test_unit_conditions_hold_on_all_kinds():
    for t in (weyl_twist(), flip_xy(), solvable_pair_twist(),
              triangular_action_twist(3)):
        one_a = t.a_spec.one_monomial()
        one_b = t.b_spec.one_monomial()
        for am in basis_up_to(t.a_spec, 2):
            assert t.monomial_rule(one_b, am) == {(am, one_b): t.field.one}
        for bm in basis_up_to(t.b_spec, 2):
            assert t.monomial_rule(bm, one_a) == {(one_a, bm): t.field.one}


# -- hexagon ------------------------------------------------------------------


def test_hexagon_weyl():
    rep = check_hexagon(weyl_twist(), 3, sample_count=200, seed=11)
    assert rep.passed and rep.checked == 256 + 200


def test_hexagon_flip():
    rep = check_hexagon(flip_xy(), 3)
    assert rep.passed


def test_hexagon_solvable_pair():
    assert check_hexagon(solvable_pair_twist(), 3, sample_count=100, seed=3).passed


@pytest.mark.parametrize("p", [2, 3])
def test_hexagon_triangular_action(p):
    assert check_hexagon(triangular_action_twist(p), 3, sample_count=100,
                         seed=5).passed


def test_hexagon_catches_corrupted_sign():
    t = weyl_twist()
    bad = t.with_overrides({(((1,), (1,))): {((1,), (1,)): 1, ((0,), (0,)): 1}})
    rep = check_hexagon(bad, 2)
    assert not rep.passed
    broken = {(v["b"], v["b_prime"], v["a"], v["a_prime"])
              for v in rep.violations}
    assert ("y", "y", "x", "x") in broken
    v = next(iter(rep.violations))
    assert v["lhs"] != v["rhs"]


# -- twisted multiplication ---------------------------------------------------


def test_twisted_multiply_weyl_relation():
    prod = weyl_twist().product()
    u = parse_element("y", prod)
    v = parse_element("x", prod)
    assert twisted_multiply(u, v) == parse_element("x⊗y - 1", prod)
    assert twisted_multiply(v, u) == parse_element("x⊗y", prod)


def test_twisted_multiply_skew_order_two():
    # g of order 2 acting by s -> -s: (1(x)s)(g(x)1) = g(x)(-s)
    kg = cyclic_group_algebra(2, field=QQ)
    ks = polynomial_algebra(("s",), field=QQ)
    t = skew_group_twist(kg, ks, {"s": "-s"})
    prod = t.product()
    s = parse_element("s", prod)
    g = parse_element("g", prod)
    assert twisted_multiply(s, g) == -parse_element("g⊗s", prod)
    assert twisted_multiply(g, s) == parse_element("g⊗s", prod)


def test_twisted_multiply_spec_guard():
    t = weyl_twist()
    with pytest.raises(SpecMismatchError):
        twisted_multiply(parse_element("x", t.a_spec),
                         parse_element("x", t.a_spec))


def test_product_generator_name_clash():
    t = flip_twist(polynomial_algebra(("x",)), polynomial_algebra(("x",)))
    with pytest.raises(TwistError):
        t.product()


def test_product_element_degree():
    prod = weyl_twist().product()
    assert filtration_degree(parse_element("x⊗y", prod)) == 2


@st.composite
def product_elements(draw, prod, bound=2):
    basis = basis_up_to(prod, bound)
    n = draw(st.integers(min_value=1, max_value=2))
    terms = {}
    for _ in range(n):
        m = draw(st.sampled_from(basis))
        c = draw(st.integers(min_value=-3, max_value=3))
        terms[m] = c
    return prod.element({m: c for m, c in terms.items() if c})


@settings(max_examples=60, derandomize=True, deadline=None)
@given(st.data())
def test_twisted_multiply_associative_weyl(data):
    prod = weyl_twist().product()
    u = data.draw(product_elements(prod))
    v = data.draw(product_elements(prod))
    w = data.draw(product_elements(prod))
    assert (u * v) * w == u * (v * w)


@settings(max_examples=40, derandomize=True, deadline=None)
@given(st.data())
def test_twisted_multiply_associative_triangular(data):
    prod = triangular_action_twist(3).product()
    u = data.draw(product_elements(prod))
    v = data.draw(product_elements(prod))
    w = data.draw(product_elements(prod))
    assert (u * v) * w == u * (v * w)


# -- cross-module oracle: twist vs PBW rewriting ------------------------------


def test_ore_twist_matches_ore_normal_form():
    t = weyl_twist()
    ore = weyl_algebra()
    x = parse_element("x", ore)
    y = parse_element("y", ore)
    for n in range(5):
        for d in range(5):
            crossed = t.monomial_rule((n,), (d,))
            direct = multiply(y ** n, x ** d) if n or d else ore.one()
            got = {(i, j): c for ((i,), (j,)), c in crossed.items()}
            assert got == direct.terms


def test_solvable_twist_matches_ore_normal_form():
    t = solvable_pair_twist()
    ore = solvable_2dim_algebra()  # generators ordered (y, x)
    x = parse_element("x", ore)
    y = parse_element("y", ore)
    for n in range(5):
        for d in range(5):
            crossed = t.monomial_rule((n,), (d,))
            direct = multiply(x ** n, y ** d) if n or d else ore.one()
            got = {(j, i): c for ((j,), (i,)), c in crossed.items()}
            assert got == direct.terms


# -- graded twists preserve bidegree ------------------------------------------


def test_flip_and_skew_preserve_bidegree():
    for t in (flip_xy(), triangular_action_twist(2), triangular_action_twist(3)):
        for bm in basis_up_to(t.b_spec, 3):
            for am in basis_up_to(t.a_spec, 3):
                for (am2, bm2) in t.monomial_rule(bm, am):
                    assert t.a_spec.monomial_degree(am2) == t.a_spec.monomial_degree(am)
                    assert t.b_spec.monomial_degree(bm2) == t.b_spec.monomial_degree(bm)


# -- inversion ----------------------------------------------------------------


def test_invert_flip_is_flip():
    inv = invert_twist(flip_xy(), 3)
    assert inv.kind == "flip"
    assert inv.monomial_rule((2,), (1,)) == {((1,), (2,)): QQ.one}


def test_invert_weyl_hand_oracle():
    t = weyl_twist()
    inv = invert_twist(t, 4)
    # tau(y(x)x + 1(x)1) = x(x)y, so the inverse of x(x)y is y(x)x + 1(x)1
    got = inv.monomial_rule((1,), (1,))  # input pair x (x) y of A (x) B
    assert got == {((1,), (1,)): QQ.one, ((0,), (0,)): QQ.one}


def test_invert_skew_is_forward_action():
    t = triangular_action_twist(3)
    inv = invert_twist(t, 2)
    # tau^-1(g (x) y) = g(y) (x) g = (x + y) (x) g
    f = t.field
    got = inv.monomial_rule(1, (0, 1))
    assert got == {((1, 0), 1): f.one, ((0, 1), 1): f.one}


def test_invert_roundtrip_on_truncation():
    for t in (weyl_twist(), solvable_pair_twist(), triangular_action_twist(2)):
        bound = 3
        inv = invert_twist(t, bound)
        f = t.field
        for bm in basis_up_to(t.b_spec, bound):
            for am in basis_up_to(t.a_spec, bound):
                if (t.b_spec.monomial_degree(bm)
                        + t.a_spec.monomial_degree(am)) > bound:
                    continue
                back = {}
                for (a1, b1), c in t.monomial_rule(bm, am).items():
                    for pair, v in inv.monomial_rule(a1, b1).items():
                        acc = f.add(back.get(pair, f.zero), f.mul(c, v))
                        if f.is_zero(acc):
                            back.pop(pair, None)
                        else:
                            back[pair] = acc
                assert back == {(bm, am): f.one}


def test_invert_rejects_collapsed_rule():
    t = weyl_twist()
    bad = t.with_overrides({(((1,), (1,))): {}})  # tau(y(x)x) := 0
    with pytest.raises(NonInvertibleTwistError):
        invert_twist(bad, 2)


def test_bijectivity_rank_check():
    assert bijective_on_truncation(weyl_twist(), 4)
    bad = weyl_twist().with_overrides({(((1,), (1,))): {}})
    assert not bijective_on_truncation(bad, 2)


def test_custom_twist_missing_entry():
    a = polynomial_algebra(("x",))
    b = polynomial_algebra(("y",))
    t = custom_twist(a, b, {})
    with pytest.raises(MissingRuleError):
        t.monomial_rule((1,), (1,))


# -- skew-group validation ----------------------------------------------------


def test_skew_rejects_nonlinear_action():
    kg = cyclic_group_algebra(2, field=QQ)
    ks = polynomial_algebra(("s",), field=QQ)
    with pytest.raises(TwistError):
        skew_group_twist(kg, ks, {"s": "s^2"})


def test_skew_rejects_wrong_order_action():
    kg = cyclic_group_algebra(2, field=QQ)
    s2 = polynomial_algebra(("x", "y"), field=QQ)
    # g.y = x + y has order 2 only in characteristic 2
    with pytest.raises(TwistError):
        skew_group_twist(kg, s2, {"x": "x", "y": "x+y"})


# -- compatibility maps -------------------------------------------------------


def test_self_compat_left_weyl():
    rep = check_bimodule_compat(self_bimodule_compat(weyl_twist()), 2)
    assert rep.passed and rep.checked > 0


def test_self_compat_right_skew():
    rep = check_bimodule_compat(self_right_bimodule_compat(
        triangular_action_twist(2)), 2)
    assert rep.passed


def test_flip_compat_on_plain_tensor():
    t = flip_xy()
    left = transposition_compat(t, AlgebraAsBimodule(t.a_spec), LEFT_BIMODULE)
    right = transposition_compat(t, AlgebraAsBimodule(t.b_spec), RIGHT_BIMODULE)
    assert check_bimodule_compat(left, 2).passed
    assert check_bimodule_compat(right, 2).passed


def test_one_sided_compat_trivial_module_solvable():
    # epsilon . delta = 0 for delta(y) = y, so the flip is compatible
    t = solvable_pair_twist()
    c = transposition_compat(t, GroundModule(t.a_spec), ONE_SIDED)
    assert check_bimodule_compat(c, 3).passed


def test_one_sided_compat_trivial_module_weyl_fails():
    # epsilon(delta(x)) = -1 != 0: the flip is NOT compatible for the
    # Weyl pair, and the module-side equation must catch it
    t = weyl_twist()
    c = transposition_compat(t, GroundModule(t.a_spec), ONE_SIDED)
    rep = check_bimodule_compat(c, 2)
    assert not rep.passed
    assert any(v["equation"] == "module-side" for v in rep.violations)
