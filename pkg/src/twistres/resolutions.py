"""Free resolution builders with attached factor-moving lifts.

Families
--------
* ``bar`` / ``reduced bar`` of any algebra, as a complex of bimodules,
  truncated in homological degree and in the total degree of the middle
  factors;
* ``poly-koszul``: the exterior-generator resolution of a commutative
  polynomial algebra (bimodule, or one-sided resolving the ground field);
* ``ore-koszul``: the same shape over a filtered PBW algebra, with the
  extra lower-order terms in the differential coming from the commutator
  data;
* ``cyclic-periodic``: the two-periodic bimodule resolution of a cyclic
  group algebra, alternating between the difference element and the norm
  element.

Each builder returns a :class:`ResolutionBundle`: a ChainComplexSpec plus
bookkeeping (family tag, what is resolved, and - after ``lift_twist`` -
per-degree CompatMaps that move the other tensor factor across the
resolution).  ``check_lift_chain_map`` / ``check_lift_compat`` verify that
attached lifts commute with the differentials and satisfy the module
compatibility equations; ``crosscheck_koszul_lift`` replays the closed-form
wedge lift inside the reduced bar complex (symmetrize, move the factor
across, project back) and compares.
"""

from itertools import combinations, permutations

from .kernel import SparseMatrix, solve_dense
from .algebra import (
    POLYNOMIAL, ITERATED_ORE, CYCLIC_GROUP,
    AlgebraElement, basis_up_to, cyclic_group_algebra, parse_element,
)
from .complex import (
    BIMODULE, LEFT_MODULE, ChainComplexSpec, CutoffError, FreeElement,
    FreeModuleTerm,
)
from .twist import (
    FLIP, ORE, SKEW_GROUP,
    LEFT_BIMODULE, RIGHT_BIMODULE, ONE_SIDED,
    CompatMap, check_bimodule_compat,
)

__all__ = [
    "BAR", "REDUCED_BAR", "POLY_KOSZUL", "ORE_KOSZUL", "ONE_SIDED_KOSZUL",
    "CYCLIC_PERIODIC", "RESOLVES_ALGEBRA", "RESOLVES_GROUND",
    "ResolutionError", "RestrictionError", "ChainMapError",
    "AugmentationError",
    "ResolutionBundle", "sort_wedge",
    "bar", "poly_koszul", "ore_koszul", "one_sided_koszul_kx",
    "cyclic_periodic",
    "lift_twist", "LiftReport", "check_lift_chain_map", "check_lift_compat",
    "sigma_delta_chain_maps", "OreDerivationMaps",
    "reduce_bar_element", "wedge_to_bar", "crosscheck_koszul_lift",
]


BAR = "bar"
REDUCED_BAR = "reduced-bar"
POLY_KOSZUL = "poly-koszul"
ORE_KOSZUL = "ore-koszul"
ONE_SIDED_KOSZUL = "one-sided-koszul"
CYCLIC_PERIODIC = "cyclic-periodic"

RESOLVES_ALGEBRA = "algebra-as-bimodule"
RESOLVES_GROUND = "ground-field"


class ResolutionError(Exception):
    """Problems building a resolution or attaching a lift."""


class RestrictionError(ResolutionError):
    """A lifted image leaves the embedded subcomplex it must restrict to."""


class ChainMapError(ResolutionError):
    """A map that must commute with the differentials does not."""


class AugmentationError(ResolutionError):
    """A derivation does not descend along the augmentation."""


def sort_wedge(indices):
    """Sort a tuple of generator indices, tracking the permutation sign.

    Returns (sorted tuple, sign), or None when an index repeats (the
    alternating product collapses)."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i - 1] == idx[i]:
            return None
    return tuple(idx), sign


def _add(f, out, key, val):
    acc = f.add(out.get(key, f.zero), val)
    if f.is_zero(acc):
        out.pop(key, None)
    else:
        out[key] = acc


class ResolutionBundle:
    """A built resolution: complex + family tag + what it resolves.

    ``lifts`` (when attached) maps homological degree -> CompatMap moving
    the companion factor across that term; ``lift_side`` records whether the
    moved factor enters from the left or the right."""

    def __init__(self, complex, family, resolved, meta=None,
                 twist=None, lift_side=None, lifts=None):
        self.complex = complex
        self.family = family
        self.resolved = resolved
        self.meta = dict(meta or {})
        self.twist = twist
        self.lift_side = lift_side
        self.lifts = lifts or {}

    @property
    def algebra(self):
        return self.complex.algebra

    @property
    def n_max(self):
        return self.complex.n_max

    def with_lifts(self, twist, side, lifts):
        return ResolutionBundle(self.complex, self.family, self.resolved,
                                self.meta, twist, side, lifts)

    def __repr__(self):
        tail = ", lifted-%s" % self.lift_side if self.lifts else ""
        return "ResolutionBundle(%s, %s, n_max=%d%s)" % (
            self.family, self.complex.name or self.algebra, self.n_max, tail)


# ---------------------------------------------------------------------------
# bar and reduced bar


def _bar_labels(spec, n, cutoff, reduced):
    if n == 0:
        return [()]
    unit = spec.one_monomial()
    pool = [m for m in basis_up_to(spec, cutoff)
            if not (reduced and m == unit)]
    out = []

    def rec(prefix, used):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for m in pool:
            d = spec.monomial_degree(m)
            if used + d <= cutoff:
                rec(prefix + [m], used + d)

    rec([], 0)
    return out


def bar(spec, n_max, middle_cutoff=None, reduced=False):
    """The (reduced) two-sided simplicial resolution of an algebra by free
    bimodules, truncated at homological degree ``n_max``.

    Labels in degree n are n-tuples of monomials (nonunit monomials in the
    reduced version) whose total degree is at most ``middle_cutoff``
    (default: ``n_max``).  The differential alternately absorbs the outer
    factors into the coefficients and merges adjacent factors; the reduced
    version drops merges that land on the unit."""
    if middle_cutoff is None:
        middle_cutoff = n_max
    f = spec.field
    unit = spec.one_monomial()
    terms = []
    for n in range(n_max + 1):
        labels = _bar_labels(spec, n, middle_cutoff, reduced)
        deg = {lab: sum(spec.monomial_degree(m) for m in lab)
               for lab in labels}
        terms.append(FreeModuleTerm(spec, labels, BIMODULE, deg))
    diffs = [{}]
    for n in range(1, n_max + 1):
        dn = {}
        tgt = terms[n - 1]
        for mids in terms[n].labels:
            img = {}
            _add(f, img, (mids[0], mids[1:], unit), f.one)
            sign = f.one
            for i in range(1, n):
                sign = f.neg(sign)
                for m, c in spec.mono_mul(mids[i - 1], mids[i]).items():
                    if reduced and m == unit:
                        continue
                    newmids = mids[:i - 1] + (m,) + mids[i + 1:]
                    if not tgt.has_label(newmids):
                        raise CutoffError(
                            "middle-degree cutoff %d cannot hold %r"
                            % (middle_cutoff, newmids))
                    _add(f, img, (unit, newmids, unit), f.mul(sign, c))
            sign = f.neg(sign)
            _add(f, img, (unit, mids[:-1], mids[-1]), sign)
            dn[mids] = FreeElement(tgt, img)
        diffs.append(dn)
    aug = {(): spec.one()}
    name = "%s(%s)" % (REDUCED_BAR if reduced else BAR, spec.name or spec)
    cplx = ChainComplexSpec(spec, terms, diffs, augmentation=aug,
                            aug_kind="algebra", complete_above=False,
                            name=name)
    return ResolutionBundle(cplx, REDUCED_BAR if reduced else BAR,
                            RESOLVES_ALGEBRA,
                            meta={"middle_cutoff": middle_cutoff})


def reduce_bar_element(elem, reduced_term):
    """Project an element of a full bar term onto the reduced bar term of
    the same degree (drop keys whose label contains the unit)."""
    spec = reduced_term.algebra
    unit = spec.one_monomial()
    out = {}
    for key, c in elem.terms.items():
        if any(m == unit for m in key[1]):
            continue
        out[key] = c
    return FreeElement(reduced_term, out)


# ---------------------------------------------------------------------------
# wedge-type resolutions


def _wedge_terms(spec, side):
    t = len(spec.gens)
    terms = []
    for n in range(t + 1):
        labels = list(combinations(range(t), n))
        deg = {lab: n for lab in labels}
        terms.append(FreeModuleTerm(spec, labels, side, deg))
    return terms


def _gen_mono(spec, i):
    return tuple(1 if j == i else 0 for j in range(len(spec.gens)))


def _linear_part(spec, terms_dict):
    """[(generator index, coefficient)] for the degree-1 monomials."""
    out = []
    for mono, c in terms_dict.items():
        if sum(mono) == 1:
            out.append((mono.index(1), spec.field.coerce(c)))
    return out


def _wedge_differentials(spec, terms, side, delta=None):
    f = spec.field
    unit = spec.one_monomial()
    diffs = [{}]
    for n in range(1, len(terms)):
        dn = {}
        tgt = terms[n - 1]
        for w in terms[n].labels:
            img = {}
            for pos in range(n):
                rest = w[:pos] + w[pos + 1:]
                sign = f.one if pos % 2 == 0 else f.neg(f.one)
                gmono = _gen_mono(spec, w[pos])
                if side == BIMODULE:
                    _add(f, img, (gmono, rest, unit), sign)
                    _add(f, img, (unit, rest, gmono), f.neg(sign))
                else:
                    _add(f, img, (gmono, rest), sign)
            if delta:
                for pj in range(1, n):
                    sign = f.neg(f.one) if pj % 2 == 0 else f.one
                    for pi in range(pj):
                        entry = delta.get((w[pj], w[pi]))
                        if not entry:
                            continue
                        for k, c in _linear_part(spec, entry):
                            slots = list(w)
                            del slots[pj]
                            slots[pi] = k
                            sw = sort_wedge(slots)
                            if sw is None:
                                continue
                            w2, sgn = sw
                            val = f.mul(sign, c)
                            if sgn < 0:
                                val = f.neg(val)
                            if side == BIMODULE:
                                _add(f, img, (unit, w2, unit), val)
                            else:
                                _add(f, img, (unit, w2), val)
            dn[w] = FreeElement(tgt, img)
        diffs.append(dn)
    return diffs


def poly_koszul(spec, bimodule=True):
    """The exterior-generator resolution of a commutative polynomial
    algebra: degree n is free on the n-element subsets of the generators,
    and the differential removes one generator at a time with alternating
    signs, multiplying it onto the coefficient (on both sides in the
    bimodule version, with opposite signs)."""
    if spec.variant != POLYNOMIAL:
        raise ResolutionError(
            "exterior-generator resolutions of this plain shape need a "
            "commutative polynomial algebra; got %r" % (spec.variant,))
    side = BIMODULE if bimodule else LEFT_MODULE
    terms = _wedge_terms(spec, side)
    diffs = _wedge_differentials(spec, terms, side)
    if bimodule:
        aug = {(): spec.one()}
        kind = "algebra"
        resolved = RESOLVES_ALGEBRA
        family = POLY_KOSZUL
    else:
        aug = {(): spec.field.one}
        kind = "ground"
        resolved = RESOLVES_GROUND
        family = ONE_SIDED_KOSZUL
    name = "%s(%s)" % (family, spec.name or spec)
    cplx = ChainComplexSpec(spec, terms, diffs, augmentation=aug,
                            aug_kind=kind, complete_above=True, name=name)
    return ResolutionBundle(cplx, family, resolved,
                            meta={"gen_count": len(spec.gens)})


def ore_koszul(spec, bimodule=True):
    """The wedge-shaped bimodule resolution of a filtered PBW algebra.

    Same terms as the polynomial case; the differential gains, for every
    ordered pair of slots, a term that replaces the earlier generator by
    the linear part of the two generators' commutator and omits the later
    slot (with the sign of the omitted position).  With all commutators
    central or zero this is exactly the polynomial differential.

    ``bimodule=False`` builds the one-sided version resolving the ground
    field; that requires every commutator to have zero constant term
    (otherwise the ground field is not a module at all, and the wedge
    differential would not square to zero)."""
    if spec.variant not in (POLYNOMIAL, ITERATED_ORE):
        raise ResolutionError(
            "PBW wedge resolutions need a polynomial or iterated-Ore "
            "algebra; got %r" % (spec.variant,))
    delta = getattr(spec, "delta", None) or {}
    unit = spec.one_monomial()
    if not bimodule:
        for pair, table in delta.items():
            c = table.get(unit)
            if c is not None and not spec.field.is_zero(spec.field.coerce(c)):
                raise ResolutionError(
                    "commutator of generators %r has a constant term; the "
                    "ground field carries no module structure" % (pair,))
    side = BIMODULE if bimodule else LEFT_MODULE
    terms = _wedge_terms(spec, side)
    diffs = _wedge_differentials(spec, terms, side, delta=delta)
    if bimodule:
        aug = {(): spec.one()}
        kind = "algebra"
        resolved = RESOLVES_ALGEBRA
        family = ORE_KOSZUL
    else:
        aug = {(): spec.field.one}
        kind = "ground"
        resolved = RESOLVES_GROUND
        family = ONE_SIDED_KOSZUL
    name = "%s(%s)" % (family, spec.name or spec)
    cplx = ChainComplexSpec(spec, terms, diffs, augmentation=aug,
                            aug_kind=kind, complete_above=True,
                            name=name)
    return ResolutionBundle(cplx, family, resolved,
                            meta={"gen_count": len(spec.gens)})


def one_sided_koszul_kx(spec):
    """The length-one resolution of the ground field over k[x]:
    k[x] <- k[x], multiplication by x."""
    if spec.variant != POLYNOMIAL or len(spec.gens) != 1:
        raise ResolutionError("this convenience wants a one-variable "
                              "polynomial algebra")
    return poly_koszul(spec, bimodule=False)


# ---------------------------------------------------------------------------
# the two-periodic resolution of a cyclic group algebra


def cyclic_periodic(p, n_max, spec=None):
    """The two-periodic free bimodule resolution of k[Z/p]: one generator
    per degree, with the differential alternating between the difference
    element (g x 1 - 1 x g, odd degrees) and the norm element
    (sum of g^(p-1-i) x g^i, even degrees)."""
    if spec is None:
        from .kernel import PrimeField
        spec = cyclic_group_algebra(p, PrimeField(p))
    if spec.variant != CYCLIC_GROUP or spec.order != p:
        raise ResolutionError("need a cyclic group algebra of order %d" % p)
    f = spec.field
    g = spec.gen(spec.gens[0])
    terms = [FreeModuleTerm(spec, ["e%d" % n], BIMODULE, {"e%d" % n: 0})
             for n in range(n_max + 1)]
    diffs = [{}]
    for n in range(1, n_max + 1):
        gen = terms[n - 1].generator("e%d" % (n - 1))
        if n % 2 == 1:
            img = gen.left_mul(g) - gen.right_mul(g)
        else:
            img = terms[n - 1].zero()
            left = spec.element({(p - 1) % p: f.one})
            right = spec.one()
            for _ in range(p):
                img = img + gen.left_mul(left).right_mul(right)
                left = left * spec.element({(p - 1) % p: f.one})
                right = right * g
        diffs.append({"e%d" % n: img})
    aug = {"e0": spec.one()}
    name = "%s(p=%d)" % (CYCLIC_PERIODIC, p)
    cplx = ChainComplexSpec(spec, terms, diffs, augmentation=aug,
                            aug_kind="algebra", complete_above=False,
                            name=name)
    return ResolutionBundle(cplx, CYCLIC_PERIODIC, RESOLVES_ALGEBRA,
                            meta={"p": p})


# ---------------------------------------------------------------------------
# lifts: moving the companion factor across a resolution


def _bar_left_rule(t, term, reduced):
    """Move a B-monomial across every tensor factor of a bar key, left to
    right; in the reduced bar, crossings that turn a middle factor into the
    unit are dropped (the quotient)."""
    f = t.field
    unit = t.a_spec.one_monomial()

    def rule(b_mono, key):
        l, mids, r = key
        factors = (l,) + tuple(mids) + (r,)
        state = {((), b_mono): f.one}
        for fac in factors:
            new = {}
            for (built, bcur), c in state.items():
                for (am, bm), cc in t.monomial_rule(bcur, fac).items():
                    _add(f, new, (built + (am,), bm), f.mul(c, cc))
            state = new
        out = {}
        for (built, bfin), c in state.items():
            mids2 = built[1:-1]
            if reduced and any(m == unit for m in mids2):
                continue
            if not term.has_label(mids2):
                raise CutoffError(
                    "lift image needs the missing label %r" % (mids2,))
            _add(f, out, ((built[0], mids2, built[-1]), bfin), c)
        return out

    return rule


def _bar_right_rule(t, term, reduced):
    """Move an A-monomial across every tensor factor of a bar key over B,
    right to left."""
    f = t.field
    unit = t.b_spec.one_monomial()

    def rule(key, a_mono):
        b0, mids, b1 = key
        factors = (b0,) + tuple(mids) + (b1,)
        state = {((), a_mono): f.one}
        for fac in reversed(factors):
            new = {}
            for (built, acur), c in state.items():
                for (am, bm), cc in t.monomial_rule(fac, acur).items():
                    _add(f, new, (built + (bm,), am), f.mul(c, cc))
            state = new
        out = {}
        for (built, afin), c in state.items():
            facs = built[::-1]
            mids2 = facs[1:-1]
            if reduced and any(m == unit for m in mids2):
                continue
            if not term.has_label(mids2):
                raise CutoffError(
                    "lift image needs the missing label %r" % (mids2,))
            _add(f, out, (afin, (facs[0], mids2, facs[-1])), c)
        return out

    return rule


def _delta_data(t, alg):
    """Pull the derivation data off an Ore-type twist; the flip has none.

    Raises RestrictionError when a derivation image sticks out of
    constants-plus-linear (the lifted image would then leave the wedge
    subcomplex inside the bar complex)."""
    if t.kind == FLIP:
        return (lambda mono: {}), {}
    delta_of_monomial = getattr(t, "delta_of_monomial", None)
    images = getattr(t, "delta_images", None)
    if delta_of_monomial is None or images is None:
        raise ResolutionError(
            "closed-form wedge lifts need a derivation-type or flip twist")
    for idx, img in images.items():
        for mono in img.terms:
            if alg.monomial_degree(mono) > 1:
                raise RestrictionError(
                    "derivation image %r of generator %d leaves "
                    "constants-plus-linear; the wedge lift does not restrict"
                    % (img, idx))
    dbar = {idx: _linear_part(alg, img.terms) for idx, img in images.items()}
    return delta_of_monomial, dbar


def _koszul_left_rule(t, alg, bimodule, holder):
    """Closed-form lift of an Ore-type twist over a wedge resolution:
    the moved generator passes through untouched, plus correction terms
    applying the derivation to each coefficient and (linearized) to each
    wedge slot; higher powers by splitting off one generator at a time."""
    f = t.field
    delta_of_monomial, dbar = _delta_data(t, alg)
    one_b = (1,)
    zero_b = (0,)

    def rule(b_mono, key):
        m = b_mono[0]
        out = {}
        if m == 1:
            if bimodule:
                l, w, r = key
            else:
                l, w = key
            _add(f, out, (key, one_b), f.one)
            for dm, dc in delta_of_monomial(l).items():
                k2 = (dm, w, r) if bimodule else (dm, w)
                _add(f, out, (k2, zero_b), dc)
            if bimodule:
                for dm, dc in delta_of_monomial(r).items():
                    _add(f, out, ((l, w, dm), zero_b), dc)
            for pos in range(len(w)):
                for k, c in dbar.get(w[pos], ()):
                    slots = list(w)
                    slots[pos] = k
                    sw = sort_wedge(slots)
                    if sw is None:
                        continue
                    w2, sgn = sw
                    val = c if sgn > 0 else f.neg(c)
                    k2 = (l, w2, r) if bimodule else (l, w2)
                    _add(f, out, (k2, zero_b), val)
            return out
        cm = holder["cm"]
        for (k1, b1), c in cm.pair_rule((m - 1,), key).items():
            for (k2, b2), c2 in cm.pair_rule((1,), k1).items():
                _add(f, out, (k2, (b1[0] + b2[0],)), f.mul(c, c2))
        return out

    return rule


def _koszul_right_rule(t):
    """Move an A-monomial across a wedge key over B = k[x]: the wedge slot
    is transparent (the moved factor exchanges with the slot generator with
    no correction), so only the two coefficients conjugate, right to left."""
    f = t.field

    def rule(key, a_mono):
        b0, w, b1 = key
        out = {}
        for (a1, c1m), c1 in t.monomial_rule(b1, a_mono).items():
            for (a3, c0m), c3 in t.monomial_rule(b0, a1).items():
                _add(f, out, (a3, (c0m, w, c1m)), f.mul(c1, c3))
        return out

    return rule


def _skew_right_rule(t, alg):
    """Move a group element across a wedge key over the acted-on polynomial
    algebra: the inverse group element acts diagonally on both coefficients
    and on every wedge slot (through the linearized action, with resorting
    signs)."""
    f = t.field
    act = t.group_action
    order = t.group_order
    gen_monos = [_gen_mono(alg, i) for i in range(len(alg.gens))]

    def act_wedge(e, w):
        states = {(): f.one}
        for gi in w:
            new = {}
            img = act(e, gen_monos[gi])
            for slots, c in states.items():
                for mono, ci in img.items():
                    if sum(mono) != 1:
                        raise RestrictionError(
                            "group action image is not linear on slot %d"
                            % gi)
                    k = mono.index(1)
                    if k in slots:
                        continue
                    _add(f, new, slots + (k,), f.mul(c, ci))
            states = new
        out = {}
        for slots, c in states.items():
            sw = sort_wedge(slots)
            if sw is None:
                continue
            w2, sgn = sw
            _add(f, out, w2, c if sgn > 0 else f.neg(c))
        return out

    def rule(key, e):
        b0, w, b1 = key
        inv = (order - e) % order
        out = {}
        for m0, c0 in act(inv, b0).items():
            for w2, cw in act_wedge(inv, w).items():
                for m1, c1 in act(inv, b1).items():
                    _add(f, out, (e, (m0, w2, m1)),
                         f.mul(f.mul(c0, cw), c1))
        return out

    return rule


def _periodic_left_rules(bundle, t):
    """Lift a skew twist over the two-periodic resolution of k[Z/p] by
    embedding it into the reduced bar resolution, moving the polynomial
    factor across there, and expressing the image back in the embedded
    generators.

    The embedding is built degree by degree with the standard extra
    degeneracy (prepend the left coefficient as a new first middle factor,
    killing unit left coefficients); images that cannot be written in the
    translates of the embedded generator raise RestrictionError."""
    spec = bundle.algebra
    f = spec.field
    p = bundle.meta["p"]
    nb = bundle.n_max
    barb = bar(spec, nb, middle_cutoff=0, reduced=True)
    bterms = barb.complex.terms
    bar_cms = {n: CompatMap(LEFT_BIMODULE, t, bterms[n],
                            _bar_left_rule(t, bterms[n], True),
                            name="bar-left-%d" % n)
               for n in range(nb + 1)}
    unit = spec.one_monomial()

    def degeneracy(elem, n):
        out = {}
        for (l, mids, r), c in elem.terms.items():
            if l == unit:
                continue
            out[(unit, (l,) + mids, r)] = c
        return FreeElement(bterms[n + 1], out)

    mu = [FreeElement(bterms[0], {(unit, (), unit): f.one})]
    for n in range(1, nb + 1):
        dgen = bundle.complex.differentials[n]["e%d" % n]
        x = bterms[n - 1].zero()
        for (l, _lab, r), c in dgen.terms.items():
            moved = mu[n - 1].left_mul(spec.element({l: f.one}))
            moved = moved.right_mul(spec.element({r: f.one}))
            x = x + moved.scale(c)
        mu.append(degeneracy(x, n - 1))

    solvers = {}

    def solver(n):
        hit = solvers.get(n)
        if hit is not None:
            return hit
        cols = []
        for a in range(p):
            for b in range(p):
                moved = mu[n].left_mul(spec.element({a: f.one}))
                moved = moved.right_mul(spec.element({b: f.one}))
                cols.append(((a, b), moved.terms))
        rows = {}
        for _, terms in cols:
            for k in terms:
                rows.setdefault(k, len(rows))
        entries = [(rows[k], j, v)
                   for j, (_, terms) in enumerate(cols)
                   for k, v in terms.items()]
        mat = SparseMatrix(len(rows), len(cols), entries, f)
        if mat.rank() != p * p:
            raise ResolutionError(
                "translates of the embedded generator are dependent in "
                "degree %d" % n)
        solvers[n] = (mat, rows, [ab for ab, _ in cols])
        return solvers[n]

    def make_rule(n):
        lab = "e%d" % n

        def rule(s_mono, key):
            ga, _lab, gb = key
            x = mu[n].left_mul(spec.element({ga: f.one}))
            x = x.right_mul(spec.element({gb: f.one}))
            lifted = bar_cms[n].apply(
                {(s_mono, k): c for k, c in x.terms.items()})
            groups = {}
            for (bk, s2), c in lifted.items():
                groups.setdefault(s2, {})[bk] = c
            mat, rows, col_ab = solver(n)
            out = {}
            for s2, vec in groups.items():
                rhs = {}
                for k, c in vec.items():
                    if k not in rows:
                        raise RestrictionError(
                            "lifted image leaves the embedded periodic "
                            "subcomplex in degree %d" % n)
                    rhs[rows[k]] = c
                sol = solve_dense(mat, rhs)
                if sol is None:
                    raise RestrictionError(
                        "lifted image leaves the embedded periodic "
                        "subcomplex in degree %d" % n)
                for j, c in sol.items():
                    a, b = col_ab[j]
                    _add(f, out, ((a, lab, b), s2), c)
            return out

        return rule

    return {n: make_rule(n) for n in range(nb + 1)}, mu


def lift_twist(bundle, t, side="left"):
    """Attach per-degree maps moving the companion tensor factor across the
    resolution, chosen by family:

    * bar / reduced bar: iterate the twisting map across all tensor factors
      (left lifts cross left-to-right; right lifts right-to-left);
    * wedge families, left: the closed-form rule (generator passes through,
      derivation corrections on coefficients and slots);
    * wedge families, right: coefficient conjugation (Ore/flip twists) or
      the diagonal inverse group action (skew twists);
    * cyclic-periodic, left: restriction of the bar lift along the standard
      embedding.

    Returns a new bundle carrying the lifts."""
    if side not in ("left", "right"):
        raise ResolutionError("side must be 'left' or 'right'")
    cplx = bundle.complex
    if side == "left" and bundle.algebra is not t.a_spec:
        raise ResolutionError("left lifts move the second factor across a "
                              "resolution over the twist's first factor")
    if side == "right" and bundle.algebra is not t.b_spec:
        raise ResolutionError("right lifts move the first factor across a "
                              "resolution over the twist's second factor")
    one_sided = cplx.terms[0].side != BIMODULE
    if one_sided and side != "left":
        raise ResolutionError("one-sided resolutions only take left lifts")
    kind = (ONE_SIDED if one_sided
            else (LEFT_BIMODULE if side == "left" else RIGHT_BIMODULE))
    lifts = {}
    fam = bundle.family
    if fam in (BAR, REDUCED_BAR):
        red = fam == REDUCED_BAR
        for n in range(bundle.n_max + 1):
            term = cplx.terms[n]
            rule = (_bar_left_rule(t, term, red) if side == "left"
                    else _bar_right_rule(t, term, red))
            lifts[n] = CompatMap(kind, t, term, rule,
                                 name="%s-%s-%d" % (fam, side, n))
    elif fam in (POLY_KOSZUL, ORE_KOSZUL, ONE_SIDED_KOSZUL):
        if side == "left":
            if t.kind not in (ORE, FLIP):
                raise ResolutionError(
                    "closed-form wedge lifts need a derivation-type or "
                    "flip twist; got %r" % (t.kind,))
            if len(t.b_spec.gens) != 1:
                raise ResolutionError("the moved factor must be k[x]")
            for n in range(bundle.n_max + 1):
                holder = {}
                rule = _koszul_left_rule(t, bundle.algebra,
                                         not one_sided, holder)
                cm = CompatMap(kind, t, cplx.terms[n], rule,
                               name="%s-left-%d" % (fam, n))
                holder["cm"] = cm
                lifts[n] = cm
        else:
            if t.kind in (ORE, FLIP):
                rule = _koszul_right_rule(t)
            elif t.kind == SKEW_GROUP:
                rule = _skew_right_rule(t, bundle.algebra)
            else:
                raise ResolutionError(
                    "no right wedge lift for twist kind %r" % (t.kind,))
            for n in range(bundle.n_max + 1):
                lifts[n] = CompatMap(kind, t, cplx.terms[n], rule,
                                     name="%s-right-%d" % (fam, n))
    elif fam == CYCLIC_PERIODIC:
        if side != "left" or t.kind != SKEW_GROUP:
            raise ResolutionError(
                "the two-periodic resolution takes left lifts of skew "
                "twists only")
        rules, mu = _periodic_left_rules(bundle, t)
        for n, rule in rules.items():
            lifts[n] = CompatMap(kind, t, cplx.terms[n], rule,
                                 name="%s-left-%d" % (fam, n))
        out = bundle.with_lifts(t, side, lifts)
        out.meta["bar_embedding"] = mu
        return out
    else:
        raise ResolutionError("no lift recipe for family %r" % (fam,))
    return bundle.with_lifts(t, side, lifts)


# ---------------------------------------------------------------------------
# verifying attached lifts


class LiftReport:
    def __init__(self, name, side, degree_bound):
        self.name = name
        self.side = side
        self.degree_bound = degree_bound
        self.checked = 0
        self.violations = []

    @property
    def passed(self):
        return not self.violations

    def _record(self, equation, where, lhs, rhs):
        self.checked += 1
        if lhs != rhs:
            self.violations.append({
                "equation": equation,
                "where": where,
                "lhs": repr(sorted(lhs.items(), key=repr)),
                "rhs": repr(sorted(rhs.items(), key=repr)),
            })

    def __repr__(self):
        state = "pass" if self.passed else "FAIL(%d)" % len(self.violations)
        return "lift-chain-map(%s, %s, deg<=%d): %s on %d squares" % (
            self.name, self.side, self.degree_bound, state, self.checked)


def check_lift_chain_map(bundle, degree_bound):
    """Verify that the attached lifts commute with the differentials on
    every generator label, against all moved monomials of degree at most
    ``degree_bound``; the bottom square against the augmentation is
    included (for one-sided resolutions this is where a derivation that
    does not kill the augmentation shows up)."""
    if not bundle.lifts:
        raise ResolutionError("no lifts attached")
    t = bundle.twist
    f = t.field
    cplx = bundle.complex
    side = bundle.lift_side
    report = LiftReport(cplx.name, side, degree_bound)
    movers = basis_up_to(t.b_spec if side == "left" else t.a_spec,
                         degree_bound)
    for n in range(1, bundle.n_max + 1):
        term = cplx.terms[n]
        for lab in term.labels:
            genkey = next(iter(term.generator(lab).terms))
            d_img = cplx.differentials[n][lab]
            for mono in movers:
                if side == "left":
                    lhs = bundle.lifts[n - 1].apply(
                        {(mono, k): c for k, c in d_img.terms.items()})
                    rhs = {}
                    for (k2, b2), c in bundle.lifts[n].pair_rule(
                            mono, genkey).items():
                        img = cplx.apply_differential(
                            n, FreeElement(term, {k2: f.one}))
                        for k3, c3 in img.terms.items():
                            _add(f, rhs, (k3, b2), f.mul(c, c3))
                else:
                    lhs = bundle.lifts[n - 1].apply(
                        {(k, mono): c for k, c in d_img.terms.items()})
                    rhs = {}
                    for (a2, k2), c in bundle.lifts[n].pair_rule(
                            genkey, mono).items():
                        img = cplx.apply_differential(
                            n, FreeElement(term, {k2: f.one}))
                        for k3, c3 in img.terms.items():
                            _add(f, rhs, (a2, k3), f.mul(c, c3))
                report._record("square", (n, lab, mono), lhs, rhs)
    term0 = cplx.terms[0]
    for lab in term0.labels:
        genkey = next(iter(term0.generator(lab).terms))
        for mono in movers:
            if side == "left":
                pairs = bundle.lifts[0].pair_rule(mono, genkey)
                if cplx.aug_kind == "algebra":
                    lhs = {}
                    for (k2, b2), c in pairs.items():
                        img = cplx.apply_augmentation(
                            FreeElement(term0, {k2: f.one}))
                        for am, ac in img.terms.items():
                            _add(f, lhs, (am, b2), f.mul(c, ac))
                    rhs = {}
                    img = cplx.apply_augmentation(
                        FreeElement(term0, {genkey: f.one}))
                    for am, ac in img.terms.items():
                        for (a2, b2), c2 in t.monomial_rule(mono, am).items():
                            _add(f, rhs, (a2, b2), f.mul(ac, c2))
                else:
                    lhs = {}
                    for (k2, b2), c in pairs.items():
                        s = cplx.apply_augmentation(
                            FreeElement(term0, {k2: f.one}))
                        _add(f, lhs, b2, f.mul(c, s))
                    rhs = {}
                    s = cplx.apply_augmentation(
                        FreeElement(term0, {genkey: f.one}))
                    _add(f, rhs, mono, s)
            else:
                pairs = bundle.lifts[0].pair_rule(genkey, mono)
                lhs = {}
                for (a2, k2), c in pairs.items():
                    img = cplx.apply_augmentation(
                        FreeElement(term0, {k2: f.one}))
                    for bm, bc in img.terms.items():
                        _add(f, lhs, (a2, bm), f.mul(c, bc))
                rhs = {}
                img = cplx.apply_augmentation(
                    FreeElement(term0, {genkey: f.one}))
                for bm, bc in img.terms.items():
                    for (a2, b2), c2 in t.monomial_rule(bm, mono).items():
                        _add(f, rhs, (a2, b2), f.mul(bc, c2))
            report._record("augmentation", (0, lab, mono), lhs, rhs)
    return report


def check_lift_compat(bundle, degree_bound):
    """Run the module-compatibility equations on every attached lift;
    returns {degree: CompatReport}."""
    if not bundle.lifts:
        raise ResolutionError("no lifts attached")
    return {n: check_bimodule_compat(cm, degree_bound)
            for n, cm in sorted(bundle.lifts.items())}


# ---------------------------------------------------------------------------
# derivation chain maps on one-sided wedge resolutions


class OreDerivationMaps:
    """The pair (identity, derivation) extended over a one-sided wedge
    resolution: the degree-zero part applies the derivation to the
    coefficient; the correction replaces each wedge slot by the linear part
    of its derivative.  Checked to commute with the differential at
    construction time."""

    def __init__(self, bundle, images, label_images):
        self.bundle = bundle
        self.images = images
        self._label_images = label_images
        self._cache = {}

    def sigma(self, n, elem):
        return elem

    def delta_label(self, n, lab):
        return self._label_images[(n, lab)]

    def delta(self, n, elem):
        cplx = self.bundle.complex
        term = cplx.terms[n]
        alg = cplx.algebra
        f = alg.field
        out = term.zero()
        for (l, lab), c in elem.terms.items():
            der = self._derive(l)
            if der.terms:
                base = FreeElement(term, {(alg.one_monomial(), lab): c})
                out = out + base.left_mul(der)
            lab_img = self._label_images[(n, lab)].scale(c)
            out = out + lab_img.left_mul(alg.element({l: f.one}))
        return out

    def _derive(self, mono):
        return _derive_monomial(self.bundle.algebra, self.images,
                                self._cache, mono)


def _derive_monomial(spec, images, cache, mono):
    """Extend generator images to a derivation on monomials by the product
    rule, normal-ordering as it goes."""
    hit = cache.get(mono)
    if hit is not None:
        return hit
    f = spec.field
    word = spec._word(mono)
    out = spec.zero()
    for pos, g in enumerate(word):
        img = images.get(g)
        if img is None or img.is_zero():
            continue
        left = spec.element({spec._exp(word[:pos]): f.one})
        right = spec.element({spec._exp(word[pos + 1:]): f.one})
        out = out + left * img * right
    cache[mono] = out
    return out


def sigma_delta_chain_maps(bundle, delta_gens):
    """Extend a derivation of the base algebra over a one-sided wedge
    resolution of the ground field.

    ``delta_gens`` maps generator names to elements (or parseable strings).
    Raises AugmentationError when the derivation does not kill the
    augmentation ideal's complement (a generator image with a constant
    term), and ChainMapError when the extension fails to commute with the
    differential.  Returns an OreDerivationMaps."""
    cplx = bundle.complex
    alg = cplx.algebra
    f = alg.field
    if cplx.terms[0].side == BIMODULE:
        raise ResolutionError("derivation extensions live on one-sided "
                              "resolutions")
    images = {}
    for gname, val in delta_gens.items():
        idx = alg.gen_index(gname)
        if isinstance(val, str):
            val = parse_element(val, alg)
        if not isinstance(val, AlgebraElement) or val.spec is not alg:
            raise ResolutionError("derivation image of %r is not over the "
                                  "resolution's algebra" % (gname,))
        images[idx] = val
    unit = alg.one_monomial()
    for idx, img in images.items():
        c = img.terms.get(unit)
        if c is not None and not f.is_zero(c):
            raise AugmentationError(
                "derivation image of generator %d has the constant term %r; "
                "the derivation does not descend to the ground field"
                % (idx, c))
    dbar = {idx: _linear_part(alg, img.terms) for idx, img in images.items()}
    label_images = {}
    for n in range(bundle.n_max + 1):
        term = cplx.terms[n]
        for w in term.labels:
            img = {}
            for pos in range(len(w)):
                for k, c in dbar.get(w[pos], ()):
                    slots = list(w)
                    slots[pos] = k
                    sw = sort_wedge(slots)
                    if sw is None:
                        continue
                    w2, sgn = sw
                    _add(f, img, (unit, w2), c if sgn > 0 else f.neg(c))
            label_images[(n, w)] = FreeElement(term, img)
    maps = OreDerivationMaps(bundle, images, label_images)
    for n in range(1, bundle.n_max + 1):
        for lab in cplx.terms[n].labels:
            d_gen = cplx.differentials[n][lab]
            lhs = maps.delta(n - 1, d_gen)
            rhs = cplx.apply_differential(n, maps.delta_label(n, lab))
            if lhs != rhs:
                raise ChainMapError(
                    "derivation extension fails to commute with the "
                    "differential on %r in degree %d" % (lab, n))
    return maps


# ---------------------------------------------------------------------------
# symmetrize - move across - project: replaying the wedge lift in the bar


def wedge_to_bar(bar_term, key):
    """Send a bimodule wedge key into the reduced bar term of the same
    degree: sum over all orderings of the slots with the permutation
    sign, each slot becoming a middle factor."""
    alg = bar_term.algebra
    f = alg.field
    l, w, r = key
    out = {}
    for perm in permutations(range(len(w))):
        tup = tuple(w[p] for p in perm)
        _, sgn = sort_wedge(tup)
        mids = tuple(_gen_mono(alg, i) for i in tup)
        if not bar_term.has_label(mids):
            raise CutoffError("bar truncation cannot hold %r" % (mids,))
        _add(f, out, (l, mids, r), f.one if sgn > 0 else f.neg(f.one))
    return FreeElement(bar_term, out)


class CrosscheckReport:
    def __init__(self, name, n_bound, degree_bound):
        self.name = name
        self.n_bound = n_bound
        self.degree_bound = degree_bound
        self.checked = 0
        self.violations = []

    @property
    def passed(self):
        return not self.violations

    def _record(self, equation, where, lhs, rhs):
        self.checked += 1
        if lhs != rhs:
            self.violations.append({
                "equation": equation,
                "where": where,
                "lhs": repr(sorted(lhs.items(), key=repr)),
                "rhs": repr(sorted(rhs.items(), key=repr)),
            })

    def __repr__(self):
        state = "pass" if self.passed else "FAIL(%d)" % len(self.violations)
        return "wedge-vs-bar lift crosscheck(%s, n<=%d, deg<=%d): %s on %d" % (
            self.name, self.n_bound, self.degree_bound, state, self.checked)


def crosscheck_koszul_lift(bundle, n_bound=2, degree_bound=2):
    """Replay the closed-form wedge lift inside the reduced bar complex.

    For each wedge generator: symmetrize it into the bar term, move the
    factor across with the iterated bar lift, project the result back onto
    wedges (strictly increasing middle slots), verify the projection
    reconstructs the bar-side answer exactly (else RestrictionError), and
    compare with the closed-form lift."""
    if not bundle.lifts or bundle.lift_side != "left":
        raise ResolutionError("needs a bundle with left lifts attached")
    t = bundle.twist
    alg = bundle.algebra
    f = t.field
    unit = alg.one_monomial()
    n_bound = min(n_bound, bundle.n_max)
    barb = bar(alg, n_bound, middle_cutoff=n_bound + degree_bound,
               reduced=True)
    report = CrosscheckReport(bundle.complex.name, n_bound, degree_bound)
    for n in range(n_bound + 1):
        kterm = bundle.complex.terms[n]
        bterm = barb.complex.terms[n]
        bar_cm = CompatMap(LEFT_BIMODULE, t, bterm,
                           _bar_left_rule(t, bterm, True),
                           name="crosscheck-bar-%d" % n)
        phi = {}

        def embed(key, phi=phi, bterm=bterm):
            hit = phi.get(key)
            if hit is None:
                hit = phi[key] = wedge_to_bar(bterm, key)
            return hit

        for w in kterm.labels:
            genkey = (unit, w, unit)
            for b_mono in basis_up_to(t.b_spec, degree_bound):
                closed = bundle.lifts[n].pair_rule(b_mono, genkey)
                sym = embed(genkey)
                bar_side = bar_cm.apply(
                    {(b_mono, k): c for k, c in sym.terms.items()})
                candidate = {}
                for ((l2, mids, r2), b2), c in bar_side.items():
                    idxs = []
                    for m in mids:
                        if sum(m) != 1:
                            idxs = None
                            break
                        idxs.append(m.index(1))
                    if idxs is None:
                        continue
                    tup = tuple(idxs)
                    if tup != tuple(sorted(tup)) or len(set(tup)) != len(tup):
                        continue
                    _add(f, candidate, ((l2, tup, r2), b2), c)
                rebuilt = {}
                for (k2, b2), c in candidate.items():
                    for bk, bc in embed(k2).terms.items():
                        _add(f, rebuilt, (bk, b2), f.mul(c, bc))
                if rebuilt != bar_side:
                    raise RestrictionError(
                        "bar-side image of %r (moved %r) does not project "
                        "back onto wedges" % (w, b_mono))
                report._record("agree", (n, w, b_mono), candidate, dict(closed))
    return report
