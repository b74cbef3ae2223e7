"""Dimension extraction: cochain cohomology with algebra/ground
coefficients, ground-field collapse, and the cross-checks between
independently built resolutions."""

from math import comb

import pytest

from twistres.kernel import QQ, PrimeField
from twistres.algebra import (
    cyclic_group_algebra, heisenberg_algebra, polynomial_algebra,
    solvable_2dim_algebra, weyl_algebra,
)
from twistres.twist import flip_twist, solvable_pair_twist, weyl_twist
from twistres.resolutions import (
    bar, cyclic_periodic, lift_twist, one_sided_koszul_kx, ore_koszul,
    poly_koszul,
)
from twistres.twistprod import (
    koszul_pair_product, one_sided_twisted_product, ore_module_resolution,
)
from twistres.homology import (
    CochainTruncation, HomologyError, algebra_is_graded, complex_is_graded,
    ext_over_augmented, hochschild_cohomology, tor_over_augmented,
)


def _kx():
    return polynomial_algebra(("x",), name="k[x]")


def _ky():
    return polynomial_algebra(("y",), name="k[y]")


# ---------------------------------------------------------------------------
# gradedness detection


def test_graded_detection():
    assert algebra_is_graded(_kx())
    assert algebra_is_graded(cyclic_group_algebra(3, PrimeField(3)))
    assert not algebra_is_graded(weyl_algebra())
    assert not algebra_is_graded(solvable_2dim_algebra())
    assert algebra_is_graded(flip_twist(_kx(), _ky()).product())
    assert not algebra_is_graded(weyl_twist().product())
    assert complex_is_graded(poly_koszul(_kx()).complex)
    assert not complex_is_graded(ore_koszul(weyl_algebra()).complex)


def test_cochain_codifferentials_compose_to_zero():
    co = CochainTruncation(poly_koszul(
        polynomial_algebra(("x", "y"), name="k[x,y]")).complex)
    assert co.compose_zero_check(0, 4)
    assert co.compose_zero_check(1, 4)
    cow = CochainTruncation(ore_koszul(weyl_algebra()).complex)
    assert cow.compose_zero_check(0, 4)
    assert cow.compose_zero_check(1, 4)


# ---------------------------------------------------------------------------
# group algebra in dividing characteristic


def test_cyclic_group_char3_dimension_three_every_stage():
    rep = hochschild_cohomology(cyclic_periodic(3, 5), cutoff=2)
    assert rep.graded
    assert rep.dims == {0: 3, 1: 3, 2: 3, 3: 3, 4: 3}
    assert rep.per_degree == {(n, 0): 3 for n in range(5)}
    assert rep.all_stable


def test_cyclic_group_cross_checked_against_reduced_bar():
    b = bar(cyclic_group_algebra(3, PrimeField(3)), 3, middle_cutoff=0,
            reduced=True)
    rep = hochschild_cohomology(b, cutoff=2)
    assert rep.dims == {0: 3, 1: 3, 2: 3}


def test_cyclic_group_ground_coefficients():
    rep = hochschild_cohomology(cyclic_periodic(3, 5), coeff="ground",
                                cutoff=2)
    assert rep.dims == {n: 1 for n in range(5)}


def test_truncated_resolution_rejects_deep_stages():
    with pytest.raises(HomologyError):
        hochschild_cohomology(cyclic_periodic(3, 5), n_top=5, cutoff=2)


# ---------------------------------------------------------------------------
# commutative polynomial algebra: zero codifferential


def test_two_variable_polynomial_per_degree_table():
    kxy = polynomial_algebra(("x", "y"), name="k[x,y]")
    rep = hochschild_cohomology(poly_koszul(kxy), cutoff=8)
    assert rep.graded
    # every total dimension keeps growing with the cutoff, and the
    # stability flags say so honestly
    assert rep.unstable == [0, 1, 2]
    for n in range(3):
        for d in range(7):
            assert rep.per_degree[(n, d - n)] == (d + 1) * comb(2, n)


def test_resolution_independence_wedge_vs_reduced_bar():
    kxy = polynomial_algebra(("x", "y"), name="k[x,y]")
    rep_w = hochschild_cohomology(poly_koszul(kxy), cutoff=5)
    rep_b = hochschild_cohomology(bar(kxy, 3, middle_cutoff=3, reduced=True),
                                  cutoff=5)
    common = set(rep_w.per_degree) & set(rep_b.per_degree)
    assert any(n == 2 for n, _ in common)
    for key in common:
        assert rep_w.per_degree[key] == rep_b.per_degree[key]


# ---------------------------------------------------------------------------
# filtered case: the derivation-twisted plane


def test_weyl_dimensions_and_stability():
    rep = hochschild_cohomology(ore_koszul(weyl_algebra()), cutoff=8)
    assert not rep.graded
    assert rep.per_degree is None
    assert rep.dims == {0: 1, 1: 0, 2: 0}
    assert rep.all_stable


def test_weyl_stability_monotone_up_to_ten():
    previous = None
    for cutoff in (6, 8, 10):
        rep = hochschild_cohomology(ore_koszul(weyl_algebra()), cutoff=cutoff)
        assert rep.dims == {0: 1, 1: 0, 2: 0}
        assert rep.all_stable
        if previous is not None:
            assert rep.dims == previous
        previous = rep.dims


def test_weyl_product_total_routes_through_twisted_coordinates():
    rep = hochschild_cohomology(koszul_pair_product(weyl_twist()), cutoff=6)
    assert not rep.graded
    assert rep.dims == {0: 1, 1: 0, 2: 0}
    assert rep.all_stable


# ---------------------------------------------------------------------------
# Kunneth convolution for the plain product


def test_product_cohomology_is_kunneth_convolution():
    kx, ky = _kx(), _ky()
    rep_prod = hochschild_cohomology(koszul_pair_product(flip_twist(kx, ky)),
                                     cutoff=6)
    assert rep_prod.graded
    rep_x = hochschild_cohomology(poly_koszul(kx), cutoff=8)
    rep_y = hochschild_cohomology(poly_koszul(ky), cutoff=8)
    for n in range(3):
        for t in range(-n, 4):
            if (n, t) not in rep_prod.per_degree:
                continue
            want = sum(
                rep_x.per_degree.get((n1, t1), 0)
                * rep_y.per_degree.get((n - n1, t - t1), 0)
                for n1 in range(n + 1) for t1 in range(-4, 9))
            assert rep_prod.per_degree[(n, t)] == want


def test_product_cohomology_matches_merged_algebra():
    kxy = polynomial_algebra(("x", "y"), name="k[x,y]")
    rep_prod = hochschild_cohomology(
        koszul_pair_product(flip_twist(_kx(), _ky())), cutoff=6)
    rep_xy = hochschild_cohomology(poly_koszul(kxy), cutoff=6)
    for key, want in rep_xy.per_degree.items():
        if key in rep_prod.per_degree:
            assert rep_prod.per_degree[key] == want


# ---------------------------------------------------------------------------
# ground-field collapse


def test_collapse_dimensions_for_bracket_tables():
    assert tor_over_augmented(
        ore_koszul(solvable_2dim_algebra(), bimodule=False)) == [1, 1, 0]
    kxy = polynomial_algebra(("x", "y"), name="k[x,y]")
    assert tor_over_augmented(poly_koszul(kxy, bimodule=False)) == [1, 2, 1]
    assert tor_over_augmented(
        ore_koszul(heisenberg_algebra(), bimodule=False)) == [1, 2, 2, 1]


def test_collapse_through_extension_total_uses_rebundled_form():
    tsol = solvable_pair_twist()
    tc = ore_module_resolution(one_sided_koszul_kx(tsol.a_spec), tsol)
    assert tor_over_augmented(tc) == [1, 1, 0]
    assert ext_over_augmented(tc) == [1, 1, 0]


def test_collapse_through_one_sided_product():
    kx, ky = _kx(), _ky()
    t = flip_twist(kx, ky)
    pm = lift_twist(one_sided_koszul_kx(kx), t, side="left")
    tc = one_sided_twisted_product(pm, one_sided_koszul_kx(ky))
    assert tor_over_augmented(tc) == [1, 2, 1]


def test_transposed_collapse_matches_direct_collapse():
    for bundle in (
            ore_koszul(solvable_2dim_algebra(), bimodule=False),
            ore_koszul(heisenberg_algebra(), bimodule=False),
            poly_koszul(polynomial_algebra(("x", "y"), name="k[x,y]"),
                        bimodule=False),
    ):
        assert tor_over_augmented(bundle) == ext_over_augmented(bundle)


def test_single_variable_collapse_with_padding():
    assert ext_over_augmented(one_sided_koszul_kx(_kx()), n_top=3) \
        == [1, 1, 0, 0]


def test_collapse_rejects_two_sided_input():
    with pytest.raises(HomologyError):
        tor_over_augmented(poly_koszul(_kx()))
    with pytest.raises(HomologyError):
        hochschild_cohomology(one_sided_koszul_kx(_kx()))
