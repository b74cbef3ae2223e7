"""Free (bi)module chain complexes with symbolic differentials.

A ``FreeModuleTerm`` is A (x) span(labels) (x) A (bimodule side) or
A (x) span(labels) (left-module side); elements are sparse sums of
(left monomial, label, right monomial) keys.  A ``ChainComplexSpec``
stores one term per homological degree, differentials given on labels,
and an optional augmentation treated as the (-1)-degree map.

Everything quantitative happens after ``truncate``: keys of total
filtration degree <= N, enumerated in a fixed deterministic order,
yield exact sparse matrices.  ``exactness_report`` computes homology
dimensions inside the faithful window: degree <= N - s, where s is the
maximal filtration-degree drop any differential exhibits (computed from
the actual structure constants).  Inside the window, "cycle" and
"boundary" counts match the infinite complex, so zero means exact.
"""

from __future__ import annotations

from .kernel import SparseMatrix
from .algebra import basis_up_to

BIMODULE = "bimodule"
LEFT_MODULE = "left-module"


class ComplexError(Exception):
    pass


class DegreeRaisingError(ComplexError):
    """A differential strictly raised total filtration degree."""


class CutoffError(ComplexError):
    """A differential image needs a label outside the enumerated set."""


class FreeModuleTerm:
    """A free term: ordered labels with internal degrees, over an algebra."""

    def __init__(self, algebra, labels, side=BIMODULE, internal_degree=None):
        self.algebra = algebra
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ComplexError("labels must be distinct")
        self.side = side
        deg = internal_degree or {}
        self.internal_degree = {lab: deg.get(lab, 0) for lab in self.labels}
        for lab, d in self.internal_degree.items():
            if d < 0:
                raise ComplexError("negative internal degree on %r" % (lab,))
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}

    def zero(self):
        return FreeElement(self, {})

    def has_label(self, label):
        return label in self._label_index

    def generator(self, label):
        one = self.algebra.one_monomial()
        key = (one, label, one) if self.side == BIMODULE else (one, label)
        return FreeElement(self, {key: self.algebra.field.one})

    def key_degree(self, key):
        a = self.algebra
        if self.side == BIMODULE:
            l, lab, r = key
            return (a.monomial_degree(l) + self.internal_degree[lab]
                    + a.monomial_degree(r))
        l, lab = key
        return a.monomial_degree(l) + self.internal_degree[lab]

    def basis(self, n):
        """All keys of total degree <= n: labels in declared order, then
        (degree, left key, right key)."""
        a = self.algebra
        out = []
        for lab in self.labels:
            room = n - self.internal_degree[lab]
            if room < 0:
                continue
            if self.side == BIMODULE:
                keys = []
                for l in basis_up_to(a, room):
                    dl = a.monomial_degree(l)
                    for r in basis_up_to(a, room - dl):
                        keys.append((l, lab, r))
                keys.sort(key=lambda k: (a.monomial_degree(k[0]) + a.monomial_degree(k[2]),
                                         a.monomial_key(k[0]), a.monomial_key(k[2])))
            else:
                keys = [(l, lab) for l in basis_up_to(a, room)]
                keys.sort(key=lambda k: a.monomial_key(k[0]))
            out.extend(keys)
        return out

    def format_key(self, key):
        a = self.algebra
        if self.side == BIMODULE:
            l, lab, r = key
            return "%s⊗[%s]⊗%s" % (a.format_monomial(l), lab, a.format_monomial(r))
        l, lab = key
        return "%s⊗[%s]" % (a.format_monomial(l), lab)


class FreeElement:
    """Sparse element of a free term: dict key -> scalar."""

    __slots__ = ("term", "terms")

    def __init__(self, term, terms):
        self.term = term
        self.terms = terms

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if self.term is not other.term:
            raise ComplexError("elements of different terms")
        f = self.term.algebra.field
        out = dict(self.terms)
        for k, c in other.terms.items():
            acc = f.add(out.get(k, f.zero), c)
            if f.is_zero(acc):
                out.pop(k, None)
            else:
                out[k] = acc
        return FreeElement(self.term, out)

    def __neg__(self):
        f = self.term.algebra.field
        return FreeElement(self.term, {k: f.neg(c) for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar):
        f = self.term.algebra.field
        s = f.coerce(scalar)
        if f.is_zero(s):
            return FreeElement(self.term, {})
        return FreeElement(self.term, {k: f.mul(s, c) for k, c in self.terms.items()})

    def left_mul(self, a_elem):
        """a . element: multiplies the left coefficients."""
        alg = self.term.algebra
        f = alg.field
        out = {}
        for k, c in self.terms.items():
            l = k[0]
            rest = k[1:]
            for am, ac in a_elem.terms.items():
                w = f.mul(ac, c)
                for m, mc in alg.mono_mul(am, l).items():
                    key = (m,) + rest
                    acc = f.add(out.get(key, f.zero), f.mul(w, mc))
                    if f.is_zero(acc):
                        out.pop(key, None)
                    else:
                        out[key] = acc
        return FreeElement(self.term, out)

    def right_mul(self, a_elem):
        """element . a: multiplies the right coefficients (bimodule side)."""
        if self.term.side != BIMODULE:
            raise ComplexError("right action on a one-sided term")
        alg = self.term.algebra
        f = alg.field
        out = {}
        for (l, lab, r), c in self.terms.items():
            for am, ac in a_elem.terms.items():
                w = f.mul(c, ac)
                for m, mc in alg.mono_mul(r, am).items():
                    key = (l, lab, m)
                    acc = f.add(out.get(key, f.zero), f.mul(w, mc))
                    if f.is_zero(acc):
                        out.pop(key, None)
                    else:
                        out[key] = acc
        return FreeElement(self.term, out)

    def map_labels(self, target_term, label_map):
        """Transport along a relabeling (for comparisons between complexes)."""
        out = {}
        for k, c in self.terms.items():
            key = (k[0], label_map[k[1]]) + k[2:]
            out[key] = c
        return FreeElement(target_term, out)

    def __eq__(self, other):
        return (isinstance(other, FreeElement) and self.term is other.term
                and self.terms == other.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        fmt = self.term.format_key
        bits = []
        for k in sorted(self.terms, key=lambda k: (self.term.key_degree(k), repr(k))):
            bits.append("%s·%s" % (self.terms[k], fmt(k)))
        return " + ".join(bits)


class ChainComplexSpec:
    """Terms indexed 0..n_max; differentials[n] maps labels of term n to
    FreeElements of term n-1; augmentation maps degree-0 labels to the
    resolved object (an algebra element, or a scalar for the ground field).

    complete_above=False marks truncations of longer complexes (bar,
    periodic): the top spot is then excluded from exactness reports.
    """

    def __init__(self, algebra, terms, differentials, augmentation=None,
                 aug_kind=None, complete_above=True, name=""):
        self.algebra = algebra
        self.terms = list(terms)
        self.differentials = list(differentials)
        self.augmentation = augmentation
        self.aug_kind = aug_kind  # "algebra" | "ground" | None
        self.complete_above = complete_above
        self.name = name
        if augmentation is not None and aug_kind not in ("algebra", "ground"):
            raise ComplexError("augmented complex needs aug_kind")

    @property
    def n_max(self):
        return len(self.terms) - 1

    def differential_of_label(self, n, label):
        return self.differentials[n][label]

    def apply_differential(self, n, elem):
        """d_n applied to an element of term n."""
        term_out = self.terms[n - 1]
        out = term_out.zero()
        alg = self.algebra
        for k, c in elem.terms.items():
            img = self.differentials[n][k[1]]
            piece = img.scale(c)
            lmono = alg.element({k[0]: alg.field.one})
            piece = piece.left_mul(lmono)
            if self.terms[n].side == BIMODULE:
                rmono = alg.element({k[2]: alg.field.one})
                piece = piece.right_mul(rmono)
            out = out + piece
        return out

    def apply_augmentation(self, elem):
        """The (-1)-degree map on an element of term 0.

        Returns an AlgebraElement (aug_kind 'algebra') or a scalar
        (aug_kind 'ground', where epsilon kills positive-degree left
        coefficients)."""
        alg = self.algebra
        f = alg.field
        if self.aug_kind == "algebra":
            out = alg.zero()
            for k, c in elem.terms.items():
                img = self.augmentation[k[1]].scale(c)
                l = alg.element({k[0]: f.one})
                if self.terms[0].side == BIMODULE:
                    r = alg.element({k[2]: f.one})
                    out = out + l * img * r
                else:
                    out = out + l * img
            return out
        total = f.zero
        for k, c in elem.terms.items():
            if alg.monomial_degree(k[0]) == 0:
                scalar = self.augmentation[k[1]]
                unit = _ground_unit_coeff(alg, k[0])
                total = f.add(total, f.mul(f.mul(c, f.coerce(scalar)), unit))
        return total


def _ground_unit_coeff(alg, mono):
    """epsilon on a degree-0 monomial: 1 on the unit; group elements also
    map to 1 (the group-algebra augmentation)."""
    return alg.field.one


class CompositionReport:
    """Outcome of d(d(label)) = 0 checks, plus augmentation . d_1 = 0."""

    def __init__(self, name):
        self.name = name
        self.failures = []
        self.checked = 0

    @property
    def passed(self):
        return not self.failures

    def __repr__(self):
        state = "pass" if self.passed else "FAIL(%d)" % len(self.failures)
        return "compose_check(%s): %s on %d labels" % (self.name, state, self.checked)


def compose_check(c):
    """Symbolic d . d = 0 on every label (and augmentation . d_1 = 0)."""
    report = CompositionReport(c.name)
    for n in range(2, c.n_max + 1):
        for label in c.terms[n].labels:
            img = c.differentials[n][label]
            dd = c.apply_differential(n - 1, img)
            report.checked += 1
            if not dd.is_zero():
                report.failures.append((n, label, repr(dd)))
    if c.augmentation is not None and c.n_max >= 1:
        for label in c.terms[1].labels:
            img = c.differentials[1][label]
            res = c.apply_augmentation(img)
            report.checked += 1
            bad = bool(res) if c.aug_kind == "algebra" else not c.algebra.field.is_zero(res)
            if bad:
                report.failures.append((1, label, "augmentation: %r" % (res,)))
    return report


class TruncatedComplex:
    """Finite matrices of a complex cut at total filtration degree <= N."""

    def __init__(self, spec, cutoff):
        self.spec = spec
        self.cutoff = cutoff
        alg = spec.algebra
        f = alg.field
        self.field = f
        self.bases = []
        self.key_degrees = []
        index = []
        for n, term in enumerate(spec.terms):
            b = term.basis(cutoff)
            self.bases.append(b)
            self.key_degrees.append([term.key_degree(k) for k in b])
            index.append({k: i for i, k in enumerate(b)})
        self.matrices = [None]
        self.max_drop = 0
        for n in range(1, spec.n_max + 1):
            entries = []
            term = spec.terms[n]
            for j, key in enumerate(self.bases[n]):
                src_deg = term.key_degree(key)
                elem = FreeElement(term, {key: f.one})
                img = spec.apply_differential(n, elem)
                for k, v in img.terms.items():
                    d = spec.terms[n - 1].key_degree(k)
                    if d > src_deg:
                        raise DegreeRaisingError(
                            "d_%d raises degree on %r" % (n, key))
                    self.max_drop = max(self.max_drop, src_deg - d)
                    entries.append((index[n - 1][k], j, v))
            self.matrices.append(SparseMatrix(
                len(self.bases[n - 1]), len(self.bases[n]), entries, f))
        self.aug_matrix = None
        self.target_basis = None
        if spec.augmentation is not None:
            if spec.aug_kind == "algebra":
                self.target_basis = basis_up_to(alg, cutoff)
                tindex = {m: i for i, m in enumerate(self.target_basis)}
                self.target_degrees = [alg.monomial_degree(m) for m in self.target_basis]
                entries = []
                for j, key in enumerate(self.bases[0]):
                    src_deg = spec.terms[0].key_degree(key)
                    elem = FreeElement(spec.terms[0], {key: f.one})
                    img = spec.apply_augmentation(elem)
                    for m, v in img.terms.items():
                        d = alg.monomial_degree(m)
                        if d > src_deg:
                            raise DegreeRaisingError("augmentation raises degree")
                        self.max_drop = max(self.max_drop, src_deg - d)
                        entries.append((tindex[m], j, v))
            else:
                self.target_basis = [()]
                self.target_degrees = [0]
                entries = []
                for j, key in enumerate(self.bases[0]):
                    src_deg = spec.terms[0].key_degree(key)
                    elem = FreeElement(spec.terms[0], {key: f.one})
                    v = spec.apply_augmentation(elem)
                    if not f.is_zero(v):
                        self.max_drop = max(self.max_drop, src_deg)
                        entries.append((0, j, v))
            self.aug_matrix = SparseMatrix(
                len(self.target_basis), len(self.bases[0]), entries, f)

    # -- windowed homology ----------------------------------------------------

    @property
    def window(self):
        return self.cutoff - self.max_drop

    def _outgoing(self, n):
        if n == 0:
            if self.aug_matrix is not None:
                return self.aug_matrix
            return SparseMatrix.zero(0, len(self.bases[0]), self.field)
        return self.matrices[n]

    def _incoming(self, n):
        if n + 1 <= self.spec.n_max:
            return self.matrices[n + 1]
        return SparseMatrix.zero(len(self.bases[n]), 0, self.field)

    def boundary_dim_in_window(self, n, window=None):
        """dim( im(d_{n+1}) intersected with the degree<=window part )."""
        d = self.window if window is None else window
        inc = self._incoming(n)
        r1 = inc.rank()
        high = [i for i, dg in enumerate(self.key_degrees[n]) if dg > d]
        r2 = inc.restrict(rows=high).rank()
        return r1 - r2

    def cycle_dim_in_window(self, n, window=None):
        d = self.window if window is None else window
        out = self._outgoing(n)
        cols = [j for j, dg in enumerate(self.key_degrees[n]) if dg <= d]
        return out.restrict(cols=cols).kernel_dim()

    def windowed_homology(self, n):
        return self.cycle_dim_in_window(n) - self.boundary_dim_in_window(n)

    def coabsolute_h0(self):
        """dim of (term_0 / im d_1) inside the window — the degree-0 homology
        ignoring the augmentation, for comparison against the resolved object."""
        d = self.window
        free = sum(1 for dg in self.key_degrees[0] if dg <= d)
        return free - self.boundary_dim_in_window(0)

    def augmentation_cokernel(self):
        """Windowed dim of target / im(augmentation)."""
        if self.aug_matrix is None:
            return None
        d = self.window
        r1 = self.aug_matrix.rank()
        high = [i for i, dg in enumerate(self.target_degrees) if dg > d]
        r2 = self.aug_matrix.restrict(rows=high).rank()
        free = sum(1 for dg in self.target_degrees if dg <= d)
        return free - (r1 - r2)

    def target_dim_in_window(self):
        if self.target_basis is None:
            return None
        d = self.window
        return sum(1 for dg in self.target_degrees if dg <= d)

    # -- graded fast path -----------------------------------------------------

    def is_graded(self):
        """True when every differential (and the augmentation) preserves
        total degree exactly."""
        if self.max_drop:
            return False
        for n in range(1, self.spec.n_max + 1):
            degs_out = self.key_degrees[n - 1]
            degs_in = self.key_degrees[n]
            for (i, j) in self.matrices[n].entries:
                if degs_out[i] != degs_in[j]:
                    return False
        if self.aug_matrix is not None:
            for (i, j) in self.aug_matrix.entries:
                if self.target_degrees[i] != self.key_degrees[0][j]:
                    return False
        return True

    def graded_homology(self, n, d):
        """Exact homology in internal degree d at spot n (graded complexes)."""
        out = self._outgoing(n)
        inc = self._incoming(n)
        cols = [j for j, dg in enumerate(self.key_degrees[n]) if dg == d]
        ker = out.restrict(cols=cols).kernel_dim()
        if n + 1 <= self.spec.n_max:
            inc_cols = [j for j, dg in enumerate(self.key_degrees[n + 1]) if dg == d]
            rows = [i for i, dg in enumerate(self.key_degrees[n]) if dg == d]
            bnd = inc.restrict(rows=rows, cols=inc_cols).rank()
        else:
            bnd = 0
        return ker - bnd


def truncate(c, n):
    """Cut the complex at total filtration degree <= n."""
    if n < 0:
        raise ComplexError("cutoff must be >= 0")
    return TruncatedComplex(c, n)


class ExactnessReport:
    def __init__(self, name, cutoff):
        self.name = name
        self.cutoff = cutoff
        self.window = None
        self.max_drop = None
        self.graded = None
        self.homology = {}       # spot -> windowed dim (spots >= 1)
        self.h0_relative = None  # ker(aug)/im(d_1), windowed
        self.aug_coker = None
        self.per_degree = {}     # (spot, internal degree) -> dim, graded only
        self.top_spot_reported = None

    @property
    def passed(self):
        vals = list(self.homology.values())
        if self.h0_relative is not None:
            vals.append(self.h0_relative)
        if self.aug_coker is not None:
            vals.append(self.aug_coker)
        vals.extend(self.per_degree.values())
        return all(v == 0 for v in vals)

    def __repr__(self):
        return ("exactness(%s, N=%d, window<=%d): %s %r"
                % (self.name, self.cutoff, self.window,
                   "pass" if self.passed else "FAIL", self.homology))


def exactness_report(c, n_cutoff):
    """Windowed homology dimensions of the truncated augmented complex."""
    tc = truncate(c, n_cutoff)
    rep = ExactnessReport(c.name, n_cutoff)
    rep.window = tc.window
    rep.max_drop = tc.max_drop
    rep.graded = tc.is_graded()
    top = c.n_max if c.complete_above else c.n_max - 1
    rep.top_spot_reported = top
    for n in range(1, top + 1):
        rep.homology[n] = tc.windowed_homology(n)
    if c.augmentation is not None:
        rep.h0_relative = tc.windowed_homology(0)
        rep.aug_coker = tc.augmentation_cokernel()
    if rep.graded:
        for n in range(1, top + 1):
            for d in range(n_cutoff + 1):
                h = tc.graded_homology(n, d)
                if h:
                    rep.per_degree[(n, d)] = h
    return rep
