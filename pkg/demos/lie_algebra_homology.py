"""Walkthrough: Lie-algebra homology through one-variable extensions.

The enveloping algebra of a finite-dimensional Lie algebra with a
triangular bracket table is an iterated one-variable extension of a
polynomial algebra.  Resolving the ground field over the smaller algebra
and totalizing against the extension variable -- with the derivation
correction folded into the differential -- rebuilds the standard
wedge-shaped resolution one generator at a time.  Collapsing its
coefficients through the counit leaves complexes whose homology
dimensions are the classical Lie-algebra homology numbers."""

from twistres.algebra import (
    heisenberg_algebra, polynomial_algebra, solvable_2dim_algebra,
)
from twistres.twist import solvable_pair_twist
from twistres.complex import compose_check, exactness_report
from twistres.resolutions import one_sided_koszul_kx, ore_koszul, poly_koszul
from twistres.twistprod import (
    complexes_match, iterated_ore_tower, ore_module_resolution,
)
from twistres.homology import ext_over_augmented, tor_over_augmented


def main():
    print("== the 2-dim solvable algebra, built as one extension ==")
    t = solvable_pair_twist()
    tc = ore_module_resolution(one_sided_koszul_kx(t.a_spec), t)
    print(compose_check(tc.complex))
    print(exactness_report(tc.complex, 6))
    print(tc.ore_form.roundtrip_report(2))
    reb = tc.ore_form.rebundled
    direct = ore_koszul(solvable_2dim_algebra(), bimodule=False)
    print(complexes_match(reb.complex, direct.complex))
    print("homology dims:", tor_over_augmented(tc),
          "(transposed:", ext_over_augmented(tc), ")")

    print("\n== the Heisenberg algebra, built as a two-stage tower ==")
    totals, bundle = iterated_ore_tower(
        ("z", "y", "x"), {("x", "y"): "z"})
    for stage, total in enumerate(totals, 1):
        print("stage %d: %s" % (stage, compose_check(total.complex)))
    direct = ore_koszul(heisenberg_algebra(), bimodule=False)
    print(complexes_match(bundle.complex, direct.complex))
    print("homology dims:", tor_over_augmented(bundle))

    print("\n== abelian comparison: the same machinery with zero "
          "brackets ==")
    plane = polynomial_algebra(("x", "y"), name="k[x,y]")
    print("homology dims:", tor_over_augmented(
        poly_koszul(plane, bimodule=False)),
        "(binomial coefficients, as the brackets vanish)")


if __name__ == "__main__":
    main()
