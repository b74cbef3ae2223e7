"""Resolution builders: frozen small differentials, d.d = 0, exactness
windows, and the attached factor-moving lifts with their checks."""

import pytest

from twistres.kernel import QQ, PrimeField
from twistres.algebra import (
    polynomial_algebra, cyclic_group_algebra, weyl_algebra,
    solvable_2dim_algebra, heisenberg_algebra, parse_element,
)
from twistres.complex import (
    CutoffError, FreeElement, compose_check, exactness_report,
)
from twistres.twist import (
    flip_twist, ore_twist, weyl_twist, solvable_pair_twist,
    triangular_action_twist,
)
from twistres.resolutions import (
    BAR, REDUCED_BAR, POLY_KOSZUL, ORE_KOSZUL, ONE_SIDED_KOSZUL,
    CYCLIC_PERIODIC, RESOLVES_ALGEBRA, RESOLVES_GROUND,
    AugmentationError, ChainMapError, ResolutionError, RestrictionError,
    bar, poly_koszul, ore_koszul, one_sided_koszul_kx, cyclic_periodic,
    lift_twist, check_lift_chain_map, check_lift_compat,
    sigma_delta_chain_maps, sort_wedge, reduce_bar_element, wedge_to_bar,
    crosscheck_koszul_lift,
)


def test_sort_wedge():
    assert sort_wedge((0, 1, 2)) == ((0, 1, 2), 1)
    assert sort_wedge((1, 0)) == ((0, 1), -1)
    assert sort_wedge((2, 0, 1)) == ((0, 1, 2), 1)
    assert sort_wedge((1, 1)) is None
    assert sort_wedge(()) == ((), 1)


# ---------------------------------------------------------------------------
# bar


def test_bar_kx_degree_one():
    kx = polynomial_algebra(("x",))
    b = bar(kx, 2, middle_cutoff=3)
    assert b.family == BAR
    assert b.resolved == RESOLVES_ALGEBRA
    d1 = b.complex.differentials[1][((1,),)]
    assert d1.terms == {((1,), (), (0,)): 1, ((0,), (), (1,)): -1}


def test_bar_label_counts():
    kx = polynomial_algebra(("x",))
    full = bar(kx, 2, middle_cutoff=3)
    red = bar(kx, 2, middle_cutoff=3, reduced=True)
    # pairs of exponents with sum <= 3: C(5,2) = 10; positive pairs: 3
    assert len(full.complex.terms[2].labels) == 10
    assert len(red.complex.terms[2].labels) == 3
    assert red.family == REDUCED_BAR


def test_bar_composes_to_zero():
    kx = polynomial_algebra(("x",))
    for red in (False, True):
        b = bar(kx, 3, middle_cutoff=4, reduced=red)
        rep = compose_check(b.complex)
        assert rep.passed, rep.failures


def test_bar_group_algebra_reduced_merge():
    k2 = cyclic_group_algebra(2, PrimeField(2))
    full = bar(k2, 2, middle_cutoff=0)
    red = bar(k2, 2, middle_cutoff=0, reduced=True)
    lab = (1, 1)  # the pair (g, g); g.g = 1 merges away in the reduced bar
    d_full = full.complex.differentials[2][lab]
    d_red = red.complex.differentials[2][lab]
    assert d_full.terms == {(1, (1,), 0): 1, (0, (0,), 0): 1, (0, (1,), 1): 1}
    assert d_red.terms == {(1, (1,), 0): 1, (0, (1,), 1): 1}
    assert compose_check(full.complex).passed
    assert compose_check(red.complex).passed


def test_bar_group_algebra_char0_composes():
    k3 = cyclic_group_algebra(3)
    b = bar(k3, 3, reduced=True)
    assert compose_check(b.complex).passed
    assert len(b.complex.terms[3].labels) == 8


# ---------------------------------------------------------------------------
# wedge families


def test_poly_koszul_kxy_degree_two():
    kxy = polynomial_algebra(("x", "y"))
    kz = poly_koszul(kxy)
    assert kz.family == POLY_KOSZUL
    d2 = kz.complex.differentials[2][(0, 1)]
    assert d2.terms == {
        ((1, 0), (1,), (0, 0)): 1, ((0, 0), (1,), (1, 0)): -1,
        ((0, 1), (0,), (0, 0)): -1, ((0, 0), (0,), (0, 1)): 1,
    }
    assert compose_check(kz.complex).passed


def test_poly_koszul_exactness():
    kxy = polynomial_algebra(("x", "y"))
    kz = poly_koszul(kxy)
    rep = exactness_report(kz.complex, 5)
    assert rep.passed
    assert all(v == 0 for v in rep.homology.values())


def test_poly_koszul_rejects_ore():
    with pytest.raises(ResolutionError):
        poly_koszul(weyl_algebra())


def test_one_sided_koszul_kx():
    kx = polynomial_algebra(("x",))
    b = one_sided_koszul_kx(kx)
    assert b.family == ONE_SIDED_KOSZUL
    assert b.resolved == RESOLVES_GROUND
    d1 = b.complex.differentials[1][(0,)]
    assert d1.terms == {((1,), ()): 1}
    rep = exactness_report(b.complex, 5)
    assert rep.passed


def test_ore_koszul_weyl_matches_poly_shape():
    w = weyl_algebra()
    kz = ore_koszul(w)
    assert kz.family == ORE_KOSZUL
    d2 = kz.complex.differentials[2][(0, 1)]
    # the commutator is central: no lower-order wedge term appears
    assert d2.terms == {
        ((1, 0), (1,), (0, 0)): 1, ((0, 0), (1,), (1, 0)): -1,
        ((0, 1), (0,), (0, 0)): -1, ((0, 0), (0,), (0, 1)): 1,
    }
    assert compose_check(kz.complex).passed


def test_ore_koszul_solvable_extra_term():
    u = solvable_2dim_algebra()
    kz = ore_koszul(u)
    d2 = kz.complex.differentials[2][(0, 1)]
    # gens are (y, x) with x.y = y.x + y: one extra unit-coefficient term
    assert d2.terms[((0, 0), (0,), (0, 0))] == 1
    assert len(d2.terms) == 5
    assert compose_check(kz.complex).passed


def test_ore_koszul_heisenberg_composes():
    h = heisenberg_algebra()
    kz = ore_koszul(h)
    assert compose_check(kz.complex).passed
    d2 = kz.complex.differentials[2][(1, 2)]  # y^x slot pair: extra z wedge
    assert d2.terms[((0, 0, 0), (0,), (0, 0, 0))] == 1


def test_ore_koszul_on_polynomial_equals_poly_koszul():
    kxy = polynomial_algebra(("x", "y"))
    a = poly_koszul(kxy)
    b = ore_koszul(kxy)
    for n in range(1, 3):
        for lab in a.complex.terms[n].labels:
            assert (a.complex.differentials[n][lab].terms
                    == b.complex.differentials[n][lab].terms)


def test_ore_koszul_exactness_windowed():
    u = solvable_2dim_algebra()
    kz = ore_koszul(u)
    rep = exactness_report(kz.complex, 6)
    assert rep.passed


# ---------------------------------------------------------------------------
# cyclic periodic


def test_cyclic_periodic_differentials():
    p2 = cyclic_periodic(2, 4)
    assert p2.family == CYCLIC_PERIODIC
    d1 = p2.complex.differentials[1]["e1"]
    d2 = p2.complex.differentials[2]["e2"]
    assert d1.terms == {(1, "e0", 0): 1, (0, "e0", 1): 1}  # char 2: -1 = 1
    assert d2.terms == {(1, "e1", 0): 1, (0, "e1", 1): 1}
    assert compose_check(p2.complex).passed


def test_cyclic_periodic_p3():
    p3 = cyclic_periodic(3, 5)
    d2 = p3.complex.differentials[2]["e2"]
    assert d2.terms == {(2, "e1", 0): 1, (1, "e1", 1): 1, (0, "e1", 2): 1}
    assert compose_check(p3.complex).passed
    rep = exactness_report(p3.complex, 5)
    assert rep.passed


def test_cyclic_periodic_spec_mismatch():
    k2 = cyclic_group_algebra(2, PrimeField(2))
    with pytest.raises(ResolutionError):
        cyclic_periodic(3, 2, spec=k2)


# ---------------------------------------------------------------------------
# wedge lifts (closed form) over derivation twists


def test_koszul_left_lift_weyl_frozen():
    t = weyl_twist()
    kz = lift_twist(poly_koszul(t.a_spec), t, side="left")
    unit = ((0,), (), (0,))
    # moving y across x (x) 1: the derivation eats the coefficient
    out = kz.lifts[0].pair_rule((1,), ((1,), (), (0,)))
    assert out == {(((1,), (), (0,)), (1,)): 1, (((0,), (), (0,)), (0,)): -1}
    # the wedge generator passes through untouched (constant derivative)
    out1 = kz.lifts[1].pair_rule((1,), ((0,), (0,), (0,)))
    assert out1 == {(((0,), (0,), (0,)), (1,)): 1}
    # unit stays unit
    assert kz.lifts[0].pair_rule((0,), unit) == {(unit, (0,)): 1}


def test_koszul_left_lift_weyl_checks():
    t = weyl_twist()
    kz = lift_twist(poly_koszul(t.a_spec), t, side="left")
    assert check_lift_chain_map(kz, 3).passed
    reports = check_lift_compat(kz, 2)
    assert all(r.passed for r in reports.values())


def test_koszul_left_lift_solvable_slot_term():
    t = solvable_pair_twist()
    kz = lift_twist(poly_koszul(t.a_spec), t, side="left")
    gen1 = ((0,), (0,), (0,))
    out = kz.lifts[1].pair_rule((1,), gen1)
    # delta(y) = y is linear: the slot reproduces itself with coefficient 1
    assert out == {(gen1, (1,)): 1, (gen1, (0,)): 1}
    assert check_lift_chain_map(kz, 3).passed
    reports = check_lift_compat(kz, 2)
    assert all(r.passed for r in reports.values())


def test_koszul_left_lift_powers_consistent_with_twist():
    t = solvable_pair_twist()
    kz = lift_twist(poly_koszul(t.a_spec), t, side="left")
    # degree-zero wedge keys behave exactly like the twist on coefficients
    for m in range(4):
        for d in range(4):
            got = kz.lifts[0].pair_rule((m,), ((d,), (), (0,)))
            want = {(((am[0],), (), (0,)), bm): c
                    for (am, bm), c in t.monomial_rule((m,), (d,)).items()}
            assert got == want


def test_koszul_one_sided_lift():
    t = solvable_pair_twist()
    b = lift_twist(poly_koszul(t.a_spec, bimodule=False), t, side="left")
    out = b.lifts[1].pair_rule((1,), ((0,), (0,)))
    assert out == {(((0,), (0,)), (1,)): 1, (((0,), (0,)), (0,)): 1}
    assert check_lift_chain_map(b, 3).passed
    reports = check_lift_compat(b, 2)
    assert all(r.passed for r in reports.values())


def test_koszul_one_sided_lift_weyl_not_a_chain_map():
    # the constant derivative has no right coefficient to cancel against,
    # so the one-sided lift fails the square at degree 1
    t = weyl_twist()
    b = lift_twist(poly_koszul(t.a_spec, bimodule=False), t, side="left")
    rep = check_lift_chain_map(b, 2)
    assert not rep.passed
    assert any(v["equation"] == "square" and v["where"][0] == 1
               for v in rep.violations)


def test_koszul_right_lift_weyl():
    t = weyl_twist()
    kz = lift_twist(poly_koszul(t.b_spec), t, side="right")
    gen1 = ((0,), (0,), (0,))
    assert kz.lifts[1].pair_rule(gen1, (1,)) == {((1,), gen1): 1}
    out = kz.lifts[0].pair_rule(((1,), (), (0,)), (1,))
    assert out == {((1,), ((1,), (), (0,))): 1, ((0,), ((0,), (), (0,))): -1}
    assert check_lift_chain_map(kz, 3).passed
    reports = check_lift_compat(kz, 2)
    assert all(r.passed for r in reports.values())


def test_lift_restriction_error_for_degree_raising_derivation():
    a = polynomial_algebra(("u",))
    bspec = polynomial_algebra(("x",))
    t = ore_twist(a, bspec, {"u": "u^2"})
    with pytest.raises(RestrictionError):
        lift_twist(poly_koszul(a), t, side="left")


def test_lift_side_validation():
    t = weyl_twist()
    with pytest.raises(ResolutionError):
        lift_twist(poly_koszul(t.a_spec), t, side="right")
    with pytest.raises(ResolutionError):
        lift_twist(poly_koszul(t.b_spec), t, side="left")
    with pytest.raises(ResolutionError):
        lift_twist(poly_koszul(t.a_spec, bimodule=False), t, side="up")


# ---------------------------------------------------------------------------
# bar lifts


def test_bar_left_lift_weyl_frozen():
    t = weyl_twist()
    b = lift_twist(bar(t.a_spec, 2, middle_cutoff=3), t, side="left")
    key = ((0,), ((1,),), (0,))  # 1 (x) [x] (x) 1
    out = b.lifts[1].pair_rule((1,), key)
    # y crosses x once in the middle: x [x] 1 (x) y  - 1 [1] 1 (x) 1 ... the
    # derivation lands once per factor
    assert out == {(key, (1,)): 1, (((0,), ((0,),), (0,)), (0,)): -1}
    assert check_lift_chain_map(b, 2).passed


def test_bar_reduced_lift_quotient_agrees():
    t = weyl_twist()
    full = lift_twist(bar(t.a_spec, 2, middle_cutoff=3), t, side="left")
    red = lift_twist(bar(t.a_spec, 2, middle_cutoff=3, reduced=True), t,
                     side="left")
    n = 2
    red_term = red.complex.terms[n]
    for key in red_term.basis(3):
        for m in range(3):
            lifted = full.lifts[n].apply({((m,), key): 1})
            q_full = {}
            for (k2, bm), c in lifted.items():
                elem = reduce_bar_element(
                    FreeElement(full.complex.terms[n], {k2: c}), red_term)
                for k3, c3 in elem.terms.items():
                    q_full[(k3, bm)] = c3
            direct = red.lifts[n].pair_rule((m,), key)
            assert q_full == dict(direct)


def test_bar_right_lift_checks():
    t = solvable_pair_twist()
    b = lift_twist(bar(t.b_spec, 2, middle_cutoff=3), t, side="right")
    assert check_lift_chain_map(b, 2).passed
    reports = check_lift_compat(b, 1)
    assert all(r.passed for r in reports.values())


def test_bar_lift_cutoff_error():
    a = polynomial_algebra(("u",))
    bspec = polynomial_algebra(("x",))
    t = ore_twist(a, bspec, {"u": "u^2"})
    b = lift_twist(bar(a, 1, middle_cutoff=1), t, side="left")
    with pytest.raises(CutoffError):
        b.lifts[1].pair_rule((1,), ((0,), ((1,),), (0,)))


# ---------------------------------------------------------------------------
# skew lifts: diagonal on wedges, embedded on the periodic side


def test_skew_right_lift_diagonal():
    t = triangular_action_twist(3)
    kz = lift_twist(poly_koszul(t.b_spec), t, side="right")
    gen_y = ((0, 0), (1,), (0, 0))
    out = kz.lifts[1].pair_rule(gen_y, 1)
    # g^-1 = g^2 sends y to 2x + y
    assert out == {(1, ((0, 0), (0,), (0, 0))): 2, (1, gen_y): 1}
    gen_xy = ((0, 0), (0, 1), (0, 0))
    out2 = kz.lifts[2].pair_rule(gen_xy, 1)
    # the wedge x^y is preserved: g^2(x)^g^2(y) = x^(2x+y) = x^y
    assert out2 == {(1, gen_xy): 1}
    assert check_lift_chain_map(kz, 2).passed
    reports = check_lift_compat(kz, 2)
    assert all(r.passed for r in reports.values())


def test_periodic_left_lift_closed_form():
    t = triangular_action_twist(3)
    per = lift_twist(cyclic_periodic(3, 4, spec=t.a_spec), t, side="left")
    y = (0, 1)
    # degree 0, trivial coefficients: y passes through untouched
    assert per.lifts[0].pair_rule(y, (0, "e0", 0)) == {((0, "e0", 0), y): 1}
    # degree 1: conjugation by g^-1: y -> 2x + y
    out = per.lifts[1].pair_rule(y, (0, "e1", 0))
    assert out == {((0, "e1", 0), (1, 0)): 2, ((0, "e1", 0), (0, 1)): 1}
    # coefficients g ... g add two more conjugations: total g^-3 = identity
    out2 = per.lifts[1].pair_rule(y, (1, "e1", 1))
    assert out2 == {((1, "e1", 1), y): 1}
    # degree 2: the embedded generator is translation invariant
    assert per.lifts[2].pair_rule(y, (0, "e2", 0)) == {((0, "e2", 0), y): 1}


def test_periodic_left_lift_checks():
    for p in (2, 3):
        t = triangular_action_twist(p)
        per = lift_twist(cyclic_periodic(p, 4, spec=t.a_spec), t,
                         side="left")
        assert check_lift_chain_map(per, 2).passed
        reports = check_lift_compat(per, 2)
        assert all(r.passed for r in reports.values())


def test_periodic_lift_wrong_shape():
    t = weyl_twist()
    per = cyclic_periodic(3, 2)
    with pytest.raises(ResolutionError):
        lift_twist(per, t, side="left")


# ---------------------------------------------------------------------------
# derivation chain maps on one-sided resolutions


def test_sigma_delta_solvable():
    ky = polynomial_algebra(("y",))
    b = poly_koszul(ky, bimodule=False)
    maps = sigma_delta_chain_maps(b, {"y": "y"})
    e0 = b.complex.terms[0].generator(())
    three = FreeElement(b.complex.terms[0], {((3,), ()): 1})
    assert maps.delta(0, e0).is_zero()
    assert maps.delta(0, three).terms == {((3,), ()): 3}
    e1 = b.complex.terms[1].generator((0,))
    assert maps.delta(1, e1) == e1


def test_sigma_delta_two_variables():
    kzy = polynomial_algebra(("z", "y"))
    b = poly_koszul(kzy, bimodule=False)
    maps = sigma_delta_chain_maps(b, {"y": "z"})  # central commutator shape
    e_y = b.complex.terms[1].generator((1,))
    assert maps.delta(1, e_y).terms == {((0, 0), (0,)): 1}
    e_zy = b.complex.terms[2].generator((0, 1))
    assert maps.delta(2, e_zy).is_zero()  # z^z collapses


def test_sigma_delta_augmentation_error():
    kx = polynomial_algebra(("x",))
    b = poly_koszul(kx, bimodule=False)
    with pytest.raises(AugmentationError):
        sigma_delta_chain_maps(b, {"x": "-1"})


def test_sigma_delta_chain_map_error():
    ku = polynomial_algebra(("u",))
    b = poly_koszul(ku, bimodule=False)
    with pytest.raises(ChainMapError):
        sigma_delta_chain_maps(b, {"u": "u^2"})


def test_sigma_delta_needs_one_sided():
    ky = polynomial_algebra(("y",))
    with pytest.raises(ResolutionError):
        sigma_delta_chain_maps(poly_koszul(ky), {"y": "y"})


# ---------------------------------------------------------------------------
# symmetrize - move across - project


def test_wedge_to_bar_signs():
    kxy = polynomial_algebra(("x", "y"))
    barb = bar(kxy, 2, middle_cutoff=2, reduced=True)
    bterm = barb.complex.terms[2]
    unit = (0, 0)
    elem = wedge_to_bar(bterm, (unit, (0, 1), unit))
    assert elem.terms == {
        (unit, ((1, 0), (0, 1)), unit): 1,
        (unit, ((0, 1), (1, 0)), unit): -1,
    }


def test_crosscheck_weyl_and_solvable():
    for t in (weyl_twist(), solvable_pair_twist()):
        kz = lift_twist(poly_koszul(t.a_spec), t, side="left")
        rep = crosscheck_koszul_lift(kz, n_bound=2, degree_bound=2)
        assert rep.passed, rep.violations


def test_crosscheck_two_generator_base():
    a = polynomial_algebra(("u", "v"))
    bspec = polynomial_algebra(("x",))
    t = ore_twist(a, bspec, {"u": "v", "v": "0"})
    kz = lift_twist(poly_koszul(a), t, side="left")
    assert check_lift_chain_map(kz, 2).passed
    rep = crosscheck_koszul_lift(kz, n_bound=2, degree_bound=2)
    assert rep.passed, rep.violations


def test_crosscheck_flip_two_generators():
    a = polynomial_algebra(("x", "y"))
    bspec = polynomial_algebra(("w",))
    t = flip_twist(a, bspec)
    kz = lift_twist(poly_koszul(a), t, side="left")
    rep = crosscheck_koszul_lift(kz, n_bound=2, degree_bound=2)
    assert rep.passed, rep.violations


# ---------------------------------------------------------------------------
# detecting corruption


def test_chain_map_check_detects_corruption():
    # x.gen + gen.x instead of x.gen - gen.x: the derivation corrections
    # no longer cancel between the two sides
    t = weyl_twist()
    kz = poly_koszul(t.a_spec)
    gen = kz.complex.terms[0].generator(())
    x = t.a_spec.gen("x")
    kz.complex.differentials[1][(0,)] = gen.left_mul(x) + gen.right_mul(x)
    lifted = lift_twist(kz, t, side="left")
    rep = check_lift_chain_map(lifted, 2)
    assert not rep.passed
