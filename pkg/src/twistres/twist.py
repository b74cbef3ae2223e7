"""Twisting maps and their verification.

A ``TwistMap`` is a linear map  tau: B (x) A -> A (x) B  given by a rule
on monomial pairs, subject to the unit conditions
tau(1 (x) a) = a (x) 1 and tau(b (x) 1) = 1 (x) b and to the hexagon
identity

    tau . (m_B (x) m_A)
      = (m_A (x) m_B) . (1 (x) tau (x) 1) . (tau (x) tau) . (1 (x) tau (x) 1)

as maps B (x) B (x) A (x) A -> A (x) B.  Such a map makes the vector
space A (x) B an associative algebra with the crossed multiplication
(a (x) b)(a' (x) b') = a tau(b (x) a') b'.

Four kinds are provided:

* ``flip``        -- tau(b (x) a) = a (x) b (the plain tensor product);
* ``ore``         -- B = k[x] one variable, tau(x (x) r) = r (x) x +
                     delta(r) (x) 1 for a derivation delta of A, with
                     higher powers of x expanded by the hexagon recursion;
* ``skew-group``  -- A = k(Z/n), B commutative polynomial, the group
                     acting by linear substitutions:
                     tau(s (x) g^e) = g^e (x) (g^-e . s);
* ``custom``      -- an explicit table on monomial pairs, optionally
                     layered over a base twist (used for corrupted-rule
                     experiments and for tabulated inverses).

``CompatMap`` plays the same role one level up: it moves B- (or A-)
factors across a module, and ``check_bimodule_compat`` verifies the two
compatibility equations (multiplication side and module side) that make
the move consistent with the module structure.

Memo caches are append-only dicts; recomputation is idempotent, so
concurrent readers are safe.
"""

from __future__ import annotations

import random

from .kernel import QQ, PrimeField, NonInvertibleError, SparseMatrix, invert_dense
from .algebra import (
    CYCLIC_GROUP, POLYNOMIAL, TWISTED_PRODUCT,
    AlgebraSpec, AlgebraElement, SpecMismatchError,
    basis_up_to, cyclic_group_algebra, parse_element, polynomial_algebra,
)
from .complex import BIMODULE, LEFT_MODULE, FreeElement, FreeModuleTerm

FLIP = "flip"
ORE = "ore"
SKEW_GROUP = "skew-group"
CUSTOM = "custom"

LEFT_BIMODULE = "left-of-bimodule"
RIGHT_BIMODULE = "right-of-bimodule"
ONE_SIDED = "one-sided"


class TwistError(Exception):
    pass


class MissingRuleError(TwistError):
    """A custom table was asked for a pair outside its tabulated range."""


class NonInvertibleTwistError(TwistError):
    """tau is not bijective on the requested truncation."""


# ---------------------------------------------------------------------------
# TwistMap


class TwistMap:
    """tau: B (x) A -> A (x) B on monomial pairs, memoized.

    ``monomial_rule(b_mono, a_mono)`` returns a dict
    (a_mono, b_mono) -> scalar describing tau(b (x) a) in A (x) B.
    Unit conditions are built in and cannot be overridden.
    """

    def __init__(self, a_spec, b_spec, kind, rule, name=""):
        if a_spec.field != b_spec.field:
            raise TwistError("twist factors must share a field")
        self.a_spec = a_spec
        self.b_spec = b_spec
        self.kind = kind
        self.name = name or kind
        self._rule = rule
        self._cache = {}
        self._product = None

    @property
    def field(self):
        return self.a_spec.field

    def monomial_rule(self, b_mono, a_mono):
        key = (b_mono, a_mono)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        f = self.field
        if b_mono == self.b_spec.one_monomial():
            out = {(a_mono, b_mono): f.one}
        elif a_mono == self.a_spec.one_monomial():
            out = {(a_mono, b_mono): f.one}
        else:
            out = self._rule(b_mono, a_mono)
        self._cache[key] = out
        return out

    def product(self, name=None):
        """The twisted-product algebra A (x)_tau B (cached)."""
        if self._product is None:
            overlap = set(self.a_spec.gens) & set(self.b_spec.gens)
            if overlap:
                raise TwistError(
                    "generator names %r appear in both factors" % sorted(overlap))
            self._product = AlgebraSpec(
                TWISTED_PRODUCT, self.field,
                gens=tuple(self.a_spec.gens) + tuple(self.b_spec.gens),
                left=self.a_spec, right=self.b_spec, twist=self,
                name=name or "%s⊗_τ%s" % (self.a_spec, self.b_spec))
        return self._product

    def with_overrides(self, table, name=None):
        """A copy whose rule on the tabulated pairs is replaced verbatim."""
        return TwistMap(self.a_spec, self.b_spec, CUSTOM,
                        _table_rule(table, self.field, base=self),
                        name=name or "%s+overrides" % self.name)

    def __repr__(self):
        return "TwistMap(%s: %r⊗%r→%r⊗%r)" % (
            self.name, self.b_spec, self.a_spec, self.a_spec, self.b_spec)


def _table_rule(table, field, base=None):
    def rule(b_mono, a_mono):
        hit = table.get((b_mono, a_mono))
        if hit is not None:
            return {pair: field.coerce(c) for pair, c in hit.items()}
        if base is not None:
            return base.monomial_rule(b_mono, a_mono)
        raise MissingRuleError(
            "no tabulated value for pair (%r, %r)" % (b_mono, a_mono))
    return rule


def flip_twist(a_spec, b_spec, name=None):
    """The identity-like twist tau(b (x) a) = a (x) b."""
    f = a_spec.field

    def rule(b_mono, a_mono):
        return {(a_mono, b_mono): f.one}

    return TwistMap(a_spec, b_spec, FLIP, rule, name=name or "flip")


def ore_twist(a_spec, b_spec, delta_gens, name=None):
    """tau(x (x) r) = r (x) x + delta(r) (x) 1 for a derivation delta of A.

    B must be a one-variable polynomial algebra k[x]; A a commutative
    polynomial algebra.  ``delta_gens`` maps each A generator name to its
    image (an A element or a parseable string); delta extends to all of A
    by the Leibniz rule.  tau on higher powers of x is computed by the
    hexagon recursion tau(x^m (x) r) = (split x^m = x . x^(m-1)).
    """
    if b_spec.variant != POLYNOMIAL or len(b_spec.gens) != 1:
        raise TwistError("the twisting side must be a one-variable polynomial algebra")
    if a_spec.variant != POLYNOMIAL:
        raise TwistError("derivation twists need a commutative polynomial base")
    f = a_spec.field
    images = {}
    for gname, val in delta_gens.items():
        idx = a_spec.gen_index(gname)
        if isinstance(val, str):
            val = parse_element(val, a_spec)
        elif isinstance(val, AlgebraElement):
            if val.spec is not a_spec:
                raise SpecMismatchError("delta image in the wrong algebra")
        else:
            val = a_spec.one().scale(val)
        images[idx] = val
    delta_cache = {}

    def delta_of_monomial(mono):
        hit = delta_cache.get(mono)
        if hit is not None:
            return hit
        out = {}
        for i, e in enumerate(mono):
            img = images.get(i)
            if e == 0 or img is None:
                continue
            rest = tuple(v - 1 if j == i else v for j, v in enumerate(mono))
            coeff = f.coerce(e)
            for m, c in img.terms.items():
                m2 = tuple(u + v for u, v in zip(m, rest))
                acc = f.add(out.get(m2, f.zero), f.mul(coeff, c))
                if f.is_zero(acc):
                    out.pop(m2, None)
                else:
                    out[m2] = acc
        delta_cache[mono] = out
        return out

    b_one = (0,)
    holder = {}

    def rule(b_mono, a_mono):
        m = b_mono[0]
        if m == 1:
            out = {(a_mono, (1,)): f.one}
            for dm, dc in delta_of_monomial(a_mono).items():
                acc = f.add(out.get((dm, b_one), f.zero), dc)
                if f.is_zero(acc):
                    out.pop((dm, b_one), None)
                else:
                    out[(dm, b_one)] = acc
            return out
        t = holder["twist"]
        first = t.monomial_rule((m - 1,), a_mono)
        out = {}
        for (am, bm), c in first.items():
            for (am2, bm2), c2 in t.monomial_rule((1,), am).items():
                key = (am2, (bm2[0] + bm[0],))
                acc = f.add(out.get(key, f.zero), f.mul(c, c2))
                if f.is_zero(acc):
                    out.pop(key, None)
                else:
                    out[key] = acc
        return out

    t = TwistMap(a_spec, b_spec, ORE, rule, name=name or "ore")
    t.delta_of_monomial = delta_of_monomial
    t.delta_images = images
    holder["twist"] = t
    return t


def skew_group_twist(group_spec, poly_spec, action, name=None):
    """tau(s (x) g^e) = g^e (x) (g^-e . s) for a cyclic group acting on
    a polynomial algebra by linear substitutions.

    ``action`` maps each polynomial generator name to the image of the
    group generator acting on it (element or string); images must be
    homogeneous linear, and the action must have order dividing the group
    order."""
    if group_spec.variant != CYCLIC_GROUP:
        raise TwistError("group factor must be a cyclic group algebra")
    if poly_spec.variant != POLYNOMIAL:
        raise TwistError("acted-on factor must be a polynomial algebra")
    f = poly_spec.field
    n = group_spec.order
    base_images = []
    for gname in poly_spec.gens:
        val = action[gname]
        if isinstance(val, str):
            val = parse_element(val, poly_spec)
        if any(poly_spec.monomial_degree(m) != 1 for m in val.terms):
            raise TwistError("action images must be homogeneous linear")
        base_images.append(val)

    def substitute(images, elem):
        out = poly_spec.zero()
        for mono, c in elem.terms.items():
            piece = poly_spec.one().scale(c)
            for i, e in enumerate(mono):
                for _ in range(e):
                    piece = piece * images[i]
            out = out + piece
        return out

    powers = [[poly_spec.gen(g) for g in poly_spec.gens]]
    for _ in range(1, n):
        powers.append([substitute(base_images, prev) for prev in powers[-1]])
    closed = [substitute(base_images, prev) for prev in powers[-1]]
    if any(closed[i] != powers[0][i] for i in range(len(closed))):
        raise TwistError("action order does not divide the group order")

    act_cache = {}

    def act(e, s_mono):
        """The action of g^e on a polynomial monomial, as a terms dict."""
        key = (e, s_mono)
        hit = act_cache.get(key)
        if hit is not None:
            return hit
        elem = poly_spec.one()
        for i, exp in enumerate(s_mono):
            for _ in range(exp):
                elem = elem * powers[e][i]
        act_cache[key] = elem.terms
        return elem.terms

    def keyed_rule(b_mono, a_mono):
        return {((a_mono, m)): c for m, c in act((n - a_mono) % n, b_mono).items()}

    t = TwistMap(group_spec, poly_spec, SKEW_GROUP, keyed_rule,
                 name=name or "skew-group")
    t.group_action = act
    t.group_order = n
    return t


def custom_twist(a_spec, b_spec, table, base=None, name=None):
    """A twist given by an explicit table on monomial pairs."""
    return TwistMap(a_spec, b_spec, CUSTOM,
                    _table_rule(table, a_spec.field, base=base),
                    name=name or "custom")


# ---------------------------------------------------------------------------
# application, twisted multiplication, hexagon


def apply_twist(t, b_elem, a_elem):
    """Bilinear extension of the monomial rule; result lives in A (x)_tau B."""
    if b_elem.spec is not t.b_spec or a_elem.spec is not t.a_spec:
        raise SpecMismatchError("operands do not match the twist's factors")
    prod = t.product()
    f = t.field
    out = {}
    for bm, bc in b_elem.terms.items():
        for am, ac in a_elem.terms.items():
            w = f.mul(bc, ac)
            for pair, c in t.monomial_rule(bm, am).items():
                acc = f.add(out.get(pair, f.zero), f.mul(w, c))
                if f.is_zero(acc):
                    out.pop(pair, None)
                else:
                    out[pair] = acc
    return AlgebraElement(prod, out)


def twisted_multiply(u, v):
    """(a (x) b)(a' (x) b') routed through tau; normalized."""
    if u.spec is not v.spec:
        raise SpecMismatchError("operands from different twisted products")
    if u.spec.variant != TWISTED_PRODUCT:
        raise SpecMismatchError("twisted_multiply needs twisted-product elements")
    return u * v


def hexagon_sides(t, b, b2, a, a2):
    """Both sides of the hexagon identity on a monomial 4-tuple
    (b, b', a, a'), each as a dict (a_mono, b_mono) -> scalar."""
    f = t.field
    lhs = {}
    for bm, bc in t.b_spec.mono_mul(b, b2).items():
        for am, ac in t.a_spec.mono_mul(a, a2).items():
            w = f.mul(bc, ac)
            for pair, c in t.monomial_rule(bm, am).items():
                acc = f.add(lhs.get(pair, f.zero), f.mul(w, c))
                if f.is_zero(acc):
                    lhs.pop(pair, None)
                else:
                    lhs[pair] = acc
    rhs = {}
    for (a1, b1), c1 in t.monomial_rule(b2, a).items():
        for (a_l, b_l), c2 in t.monomial_rule(b, a1).items():
            for (a_r, b_r), c3 in t.monomial_rule(b1, a2).items():
                c123 = f.mul(c1, f.mul(c2, c3))
                for (a4, b4), c4 in t.monomial_rule(b_l, a_r).items():
                    w = f.mul(c123, c4)
                    for am, ac in t.a_spec.mono_mul(a_l, a4).items():
                        for bm, bc in t.b_spec.mono_mul(b4, b_r).items():
                            ww = f.mul(w, f.mul(ac, bc))
                            pair = (am, bm)
                            acc = f.add(rhs.get(pair, f.zero), ww)
                            if f.is_zero(acc):
                                rhs.pop(pair, None)
                            else:
                                rhs[pair] = acc
    return lhs, rhs


class HexagonReport:
    def __init__(self, name, degree_bound, sample_count, seed):
        self.name = name
        self.degree_bound = degree_bound
        self.sample_count = sample_count
        self.seed = seed
        self.checked = 0
        self.violations = []

    @property
    def passed(self):
        return not self.violations

    def __repr__(self):
        state = "pass" if self.passed else "FAIL(%d)" % len(self.violations)
        return ("hexagon(%s, deg<=%d, %d samples): %s on %d tuples"
                % (self.name, self.degree_bound, self.sample_count, state,
                   self.checked))


def _format_pairs(t, pairs):
    if not pairs:
        return "0"
    bits = []
    for (am, bm) in sorted(pairs, key=lambda p: (t.a_spec.monomial_key(p[0]),
                                                 t.b_spec.monomial_key(p[1]))):
        bits.append("%s·(%s⊗%s)" % (pairs[(am, bm)],
                                    t.a_spec.format_monomial(am),
                                    t.b_spec.format_monomial(bm)))
    return " + ".join(bits)


def check_hexagon(t, degree_bound, sample_count=0, seed=0):
    """Verify the hexagon identity on all monomial 4-tuples whose factors
    each have degree <= degree_bound, plus seeded random 4-tuples drawn
    from degree <= degree_bound + 1.  Violations are report entries."""
    if degree_bound < 1:
        raise TwistError("degree_bound must be >= 1")
    report = HexagonReport(t.name, degree_bound, sample_count, seed)
    bs = basis_up_to(t.b_spec, degree_bound)
    as_ = basis_up_to(t.a_spec, degree_bound)

    def run(b, b2, a, a2):
        lhs, rhs = hexagon_sides(t, b, b2, a, a2)
        report.checked += 1
        if lhs != rhs:
            report.violations.append({
                "b": t.b_spec.format_monomial(b),
                "b_prime": t.b_spec.format_monomial(b2),
                "a": t.a_spec.format_monomial(a),
                "a_prime": t.a_spec.format_monomial(a2),
                "lhs": _format_pairs(t, lhs),
                "rhs": _format_pairs(t, rhs),
            })

    for b in bs:
        for b2 in bs:
            for a in as_:
                for a2 in as_:
                    run(b, b2, a, a2)
    if sample_count:
        rng = random.Random(seed)
        pool_b = basis_up_to(t.b_spec, degree_bound + 1)
        pool_a = basis_up_to(t.a_spec, degree_bound + 1)
        for _ in range(sample_count):
            run(rng.choice(pool_b), rng.choice(pool_b),
                rng.choice(pool_a), rng.choice(pool_a))
    return report


# ---------------------------------------------------------------------------
# truncated bijectivity and inversion


def _pair_bases(t, degree_bound):
    """Deterministic bases of the degree <= bound truncations of
    B (x) A (inputs) and A (x) B (outputs)."""
    a, b = t.a_spec, t.b_spec
    ins = [(bm, am)
           for bm in basis_up_to(b, degree_bound)
           for am in basis_up_to(a, degree_bound)
           if b.monomial_degree(bm) + a.monomial_degree(am) <= degree_bound]
    ins.sort(key=lambda p: (b.monomial_degree(p[0]) + a.monomial_degree(p[1]),
                            b.monomial_key(p[0]), a.monomial_key(p[1])))
    outs = [(am, bm) for (bm, am) in ins]
    outs.sort(key=lambda p: (a.monomial_degree(p[0]) + b.monomial_degree(p[1]),
                             a.monomial_key(p[0]), b.monomial_key(p[1])))
    return ins, outs


def _truncation_matrix(t, degree_bound):
    ins, outs = _pair_bases(t, degree_bound)
    index = {p: i for i, p in enumerate(outs)}
    entries = []
    for j, (bm, am) in enumerate(ins):
        for pair, c in t.monomial_rule(bm, am).items():
            if pair not in index:
                raise NonInvertibleTwistError(
                    "tau raises filtration degree on (%r, %r)" % (bm, am))
            entries.append((index[pair], j, c))
    m = SparseMatrix(len(outs), len(ins), entries, t.field)
    return ins, outs, m


def bijective_on_truncation(t, degree_bound):
    """Rank check of tau on the degree <= bound truncation."""
    ins, _, m = _truncation_matrix(t, degree_bound)
    return m.rank() == len(ins)


def invert_twist(t, degree_bound):
    """tau^-1 as a tabulated TwistMap from A (x) B back to B (x) A.

    The table covers pairs of total degree <= degree_bound; asking the
    inverse for anything beyond raises MissingRuleError."""
    if t.kind == FLIP:
        return flip_twist(t.b_spec, t.a_spec, name="flip")
    ins, outs, m = _truncation_matrix(t, degree_bound)
    try:
        cols = invert_dense(m)
    except NonInvertibleError:
        raise NonInvertibleTwistError(
            "tau is not bijective on the degree <= %d truncation" % degree_bound)
    table = {}
    for r, (am, bm) in enumerate(outs):
        table[(am, bm)] = {(ins[j][0], ins[j][1]): c
                           for j, c in cols[r].items()}
    return custom_twist(t.b_spec, t.a_spec, table,
                        name="inverse(%s)" % t.name)


# ---------------------------------------------------------------------------
# modules for compatibility checks


class AlgebraAsBimodule:
    """An algebra seen as a bimodule over itself: keys are its monomials."""

    def __init__(self, algebra):
        self.algebra = algebra
        self.side = BIMODULE

    def basis(self, n):
        return basis_up_to(self.algebra, n)

    def key_degree(self, key):
        return self.algebra.monomial_degree(key)

    def format_key(self, key):
        return self.algebra.format_monomial(key)

    def act_left(self, a_elem, vec):
        alg = self.algebra
        f = alg.field
        out = {}
        for key, c in vec.items():
            for am, ac in a_elem.terms.items():
                w = f.mul(ac, c)
                for m, mc in alg.mono_mul(am, key).items():
                    acc = f.add(out.get(m, f.zero), f.mul(w, mc))
                    if f.is_zero(acc):
                        out.pop(m, None)
                    else:
                        out[m] = acc
        return out

    def act_right(self, vec, a_elem):
        alg = self.algebra
        f = alg.field
        out = {}
        for key, c in vec.items():
            for am, ac in a_elem.terms.items():
                w = f.mul(c, ac)
                for m, mc in alg.mono_mul(key, am).items():
                    acc = f.add(out.get(m, f.zero), f.mul(w, mc))
                    if f.is_zero(acc):
                        out.pop(m, None)
                    else:
                        out[m] = acc
        return out


class GroundModule:
    """The ground field as a module: the algebra acts through the
    augmentation (positive-degree monomials act by zero, degree-zero
    monomials — including group elements — act by one)."""

    def __init__(self, algebra, label="k"):
        self.algebra = algebra
        self.label = label
        self.side = LEFT_MODULE

    def basis(self, n):
        return [self.label]

    def key_degree(self, key):
        return 0

    def format_key(self, key):
        return "[%s]" % (key,)

    def augment(self, a_elem):
        f = self.algebra.field
        total = f.zero
        for m, c in a_elem.terms.items():
            if self.algebra.monomial_degree(m) == 0:
                total = f.add(total, c)
        return total

    def act_left(self, a_elem, vec):
        f = self.algebra.field
        eps = self.augment(a_elem)
        if f.is_zero(eps):
            return {}
        return {k: f.mul(eps, c) for k, c in vec.items()}


def _mod_act_left(mod, a_elem, vec):
    if isinstance(mod, FreeModuleTerm):
        return FreeElement(mod, dict(vec)).left_mul(a_elem).terms
    return mod.act_left(a_elem, vec)


def _mod_act_right(mod, vec, a_elem):
    if isinstance(mod, FreeModuleTerm):
        return FreeElement(mod, dict(vec)).right_mul(a_elem).terms
    return mod.act_right(vec, a_elem)


# ---------------------------------------------------------------------------
# CompatMap


class CompatMap:
    """A rule moving algebra factors across a module.

    * ``left-of-bimodule``: tau_mod: B (x) M -> M (x) B, M a bimodule
      over A; rule(b_mono, key) -> dict (key', b_mono') -> scalar.
    * ``right-of-bimodule``: tau_mod: N (x) A -> A (x) N, N a bimodule
      over B; rule(key, a_mono) -> dict (a_mono', key') -> scalar.
    * ``one-sided``: same shape as left, M only a left module over A.
    """

    def __init__(self, kind, twist, module, rule, name=""):
        if kind not in (LEFT_BIMODULE, RIGHT_BIMODULE, ONE_SIDED):
            raise TwistError("unknown compat kind %r" % (kind,))
        self.kind = kind
        self.twist = twist
        self.module = module
        self.name = name or kind
        self._rule = rule
        self._cache = {}

    def pair_rule(self, x, y):
        """rule on one (monomial, key) or (key, monomial) pair, memoized;
        unit conditions are built in."""
        hit = self._cache.get((x, y))
        if hit is not None:
            return hit
        f = self.twist.field
        if self.kind in (LEFT_BIMODULE, ONE_SIDED):
            if x == self.twist.b_spec.one_monomial():
                out = {(y, x): f.one}
            else:
                out = self._rule(x, y)
        else:
            if y == self.twist.a_spec.one_monomial():
                out = {(y, x): f.one}
            else:
                out = self._rule(x, y)
        self._cache[(x, y)] = out
        return out

    def apply(self, vec_pairs):
        """Bilinear extension on a dict of input pairs -> scalar."""
        f = self.twist.field
        out = {}
        for (x, y), c in vec_pairs.items():
            for pair, v in self.pair_rule(x, y).items():
                acc = f.add(out.get(pair, f.zero), f.mul(c, v))
                if f.is_zero(acc):
                    out.pop(pair, None)
                else:
                    out[pair] = acc
        return out

    def __repr__(self):
        return "CompatMap(%s, %s)" % (self.kind, self.name)


def self_bimodule_compat(t):
    """A as a bimodule over itself, moved by tau itself."""
    mod = AlgebraAsBimodule(t.a_spec)

    def rule(b_mono, key):
        return {((m, bm)): c for (m, bm), c in t.monomial_rule(b_mono, key).items()}

    return CompatMap(LEFT_BIMODULE, t, mod, rule, name="%s-on-itself" % t.name)


def self_right_bimodule_compat(t):
    """B as a bimodule over itself, moved across A by tau itself."""
    mod = AlgebraAsBimodule(t.b_spec)
    return CompatMap(RIGHT_BIMODULE, t, mod, t.monomial_rule,
                     name="%s-on-itself-right" % t.name)


def transposition_compat(t, module, kind=ONE_SIDED):
    """The plain flip b (x) m -> m (x) b (or n (x) a -> a (x) n)."""
    f = t.field

    def rule(x, y):
        return {(y, x): f.one}

    return CompatMap(kind, t, module, rule, name="transposition")


class CompatReport:
    def __init__(self, name, kind, degree_bound):
        self.name = name
        self.kind = kind
        self.degree_bound = degree_bound
        self.checked = 0
        self.violations = []

    @property
    def passed(self):
        return not self.violations

    def __repr__(self):
        state = "pass" if self.passed else "FAIL(%d)" % len(self.violations)
        return ("compat(%s, %s, deg<=%d): %s on %d tuples"
                % (self.name, self.kind, self.degree_bound, state, self.checked))


def _record(report, equation, inputs, lhs, rhs):
    report.checked += 1
    if lhs != rhs:
        report.violations.append({
            "equation": equation,
            "inputs": inputs,
            "lhs": repr(sorted(lhs.items(), key=repr)),
            "rhs": repr(sorted(rhs.items(), key=repr)),
        })


def check_bimodule_compat(c, degree_bound):
    """Verify the compatibility equations of a CompatMap on all basis
    tuples whose factors each have degree <= degree_bound.

    Left/one-sided multiplication side:
        tau_mod(b b' (x) m) = move b', then b, multiplying the B parts.
    Left bimodule side:
        tau_mod(b (x) a m a') = tau(b (x) a), move across m, tau(.. (x) a'),
        with the A parts acting on the module.
    One-sided module side uses only the left action; the right-of-bimodule
    equations are the mirror images."""
    t = c.twist
    f = t.field
    mod = c.module
    report = CompatReport(c.name, c.kind, degree_bound)
    mkeys = mod.basis(degree_bound)

    def unit_elem(spec):
        return AlgebraElement(spec, {spec.one_monomial(): f.one})

    def mono_elem(spec, m):
        return AlgebraElement(spec, {m: f.one})

    if c.kind in (LEFT_BIMODULE, ONE_SIDED):
        bs = basis_up_to(t.b_spec, degree_bound)
        as_ = basis_up_to(t.a_spec, degree_bound)
        for m in mkeys:
            lhs = c.pair_rule(t.b_spec.one_monomial(), m)
            _record(report, "unit", (mod.format_key(m),), lhs,
                    {(m, t.b_spec.one_monomial()): f.one})
        # multiplication side
        for b in bs:
            for b2 in bs:
                for m in mkeys:
                    lhs = {}
                    for bm, bc in t.b_spec.mono_mul(b, b2).items():
                        for pair, v in c.pair_rule(bm, m).items():
                            acc = f.add(lhs.get(pair, f.zero), f.mul(bc, v))
                            if f.is_zero(acc):
                                lhs.pop(pair, None)
                            else:
                                lhs[pair] = acc
                    rhs = {}
                    for (m1, b1), c1 in c.pair_rule(b2, m).items():
                        for (m2, b2b), c2 in c.pair_rule(b, m1).items():
                            w = f.mul(c1, c2)
                            for bm, bc in t.b_spec.mono_mul(b2b, b1).items():
                                pair = (m2, bm)
                                acc = f.add(rhs.get(pair, f.zero), f.mul(w, bc))
                                if f.is_zero(acc):
                                    rhs.pop(pair, None)
                                else:
                                    rhs[pair] = acc
                    _record(report, "product-side",
                            (t.b_spec.format_monomial(b),
                             t.b_spec.format_monomial(b2),
                             mod.format_key(m)), lhs, rhs)
        # module side
        for b in bs:
            for a in as_:
                for m in mkeys:
                    rights = as_ if c.kind == LEFT_BIMODULE else [None]
                    for a2 in rights:
                        vec = _mod_act_left(mod, mono_elem(t.a_spec, a), {m: f.one})
                        if a2 is not None:
                            vec = _mod_act_right(mod, vec, mono_elem(t.a_spec, a2))
                        lhs = c.apply({(b, k): v for k, v in vec.items()})
                        rhs = {}
                        for (a1, b1), c1 in t.monomial_rule(b, a).items():
                            for (m1, b2b), c2 in c.pair_rule(b1, m).items():
                                w = f.mul(c1, c2)
                                if a2 is None:
                                    moved = _mod_act_left(
                                        mod, mono_elem(t.a_spec, a1), {m1: f.one})
                                    for k, kc in moved.items():
                                        pair = (k, b2b)
                                        acc = f.add(rhs.get(pair, f.zero),
                                                    f.mul(w, kc))
                                        if f.is_zero(acc):
                                            rhs.pop(pair, None)
                                        else:
                                            rhs[pair] = acc
                                else:
                                    for (a3, b3), c3 in t.monomial_rule(b2b, a2).items():
                                        w3 = f.mul(w, c3)
                                        moved = _mod_act_left(
                                            mod, mono_elem(t.a_spec, a1), {m1: f.one})
                                        moved = _mod_act_right(
                                            mod, moved, mono_elem(t.a_spec, a3))
                                        for k, kc in moved.items():
                                            pair = (k, b3)
                                            acc = f.add(rhs.get(pair, f.zero),
                                                        f.mul(w3, kc))
                                            if f.is_zero(acc):
                                                rhs.pop(pair, None)
                                            else:
                                                rhs[pair] = acc
                        inputs = (t.b_spec.format_monomial(b),
                                  t.a_spec.format_monomial(a),
                                  mod.format_key(m),
                                  "" if a2 is None else t.a_spec.format_monomial(a2))
                        _record(report, "module-side", inputs, lhs, rhs)
        return report

    # right-of-bimodule: N over B, rule (key, a_mono) -> (a', key')
    as_ = basis_up_to(t.a_spec, degree_bound)
    bs = basis_up_to(t.b_spec, degree_bound)
    for m in mkeys:
        lhs = c.pair_rule(m, t.a_spec.one_monomial())
        _record(report, "unit", (mod.format_key(m),), lhs,
                {(t.a_spec.one_monomial(), m): f.one})
    # multiplication side
    for m in mkeys:
        for a in as_:
            for a2 in as_:
                lhs = {}
                for am, ac in t.a_spec.mono_mul(a, a2).items():
                    for pair, v in c.pair_rule(m, am).items():
                        acc = f.add(lhs.get(pair, f.zero), f.mul(ac, v))
                        if f.is_zero(acc):
                            lhs.pop(pair, None)
                        else:
                            lhs[pair] = acc
                rhs = {}
                for (a1, m1), c1 in c.pair_rule(m, a).items():
                    for (a2b, m2), c2 in c.pair_rule(m1, a2).items():
                        w = f.mul(c1, c2)
                        for am, ac in t.a_spec.mono_mul(a1, a2b).items():
                            pair = (am, m2)
                            acc = f.add(rhs.get(pair, f.zero), f.mul(w, ac))
                            if f.is_zero(acc):
                                rhs.pop(pair, None)
                            else:
                                rhs[pair] = acc
                _record(report, "product-side",
                        (mod.format_key(m), t.a_spec.format_monomial(a),
                         t.a_spec.format_monomial(a2)), lhs, rhs)
    # module side: tau_mod((b n b') (x) a)
    for b in bs:
        for m in mkeys:
            for b2 in bs:
                for a in as_:
                    vec = _mod_act_left(mod, mono_elem(t.b_spec, b), {m: f.one})
                    vec = _mod_act_right(mod, vec, mono_elem(t.b_spec, b2))
                    lhs = c.apply({(k, a): v for k, v in vec.items()})
                    rhs = {}
                    for (a1, b1), c1 in t.monomial_rule(b2, a).items():
                        for (a2v, m2), c2 in c.pair_rule(m, a1).items():
                            w = f.mul(c1, c2)
                            for (a3, b3), c3 in t.monomial_rule(b, a2v).items():
                                w3 = f.mul(w, c3)
                                moved = _mod_act_left(
                                    mod, mono_elem(t.b_spec, b3), {m2: f.one})
                                moved = _mod_act_right(
                                    mod, moved, mono_elem(t.b_spec, b1))
                                for k, kc in moved.items():
                                    pair = (a3, k)
                                    acc = f.add(rhs.get(pair, f.zero),
                                                f.mul(w3, kc))
                                    if f.is_zero(acc):
                                        rhs.pop(pair, None)
                                    else:
                                        rhs[pair] = acc
                    _record(report, "module-side",
                            (t.b_spec.format_monomial(b), mod.format_key(m),
                             t.b_spec.format_monomial(b2),
                             t.a_spec.format_monomial(a)), lhs, rhs)
    return report


# ---------------------------------------------------------------------------
# ready-made twists


def weyl_twist(field=None):
    """k[x] and k[y] crossed by y.x = x.y - 1."""
    f = field or QQ
    ax = polynomial_algebra(("x",), field=f, name="k[x]")
    by = polynomial_algebra(("y",), field=f, name="k[y]")
    return ore_twist(ax, by, {"x": "-1"}, name="weyl")


def solvable_pair_twist(field=None):
    """k[y] and k[x] crossed by x.y = y.x + y (the 2-dim solvable pair)."""
    f = field or QQ
    ay = polynomial_algebra(("y",), field=f, name="k[y]")
    bx = polynomial_algebra(("x",), field=f, name="k[x]")
    return ore_twist(ay, bx, {"y": "y"}, name="solvable-pair")


def triangular_action_twist(p):
    """Z/p acting on k[x, y] in characteristic p by g.x = x,
    g.y = x + y (the unipotent triangular action)."""
    f = PrimeField(p)
    kg = cyclic_group_algebra(p, field=f, name="kZ/%d" % p)
    s = polynomial_algebra(("x", "y"), field=f, name="k[x,y]")
    return skew_group_twist(kg, s, {"x": "x", "y": "x+y"},
                            name="triangular-p%d" % p)
