"""Dimension extraction from constructed resolutions.

Two reductions of a resolution produce computable invariants:

* cochains valued in the algebra itself (or the ground field): for a
  two-sided free resolution, maps out of a free bimodule are determined
  by their values on generators, so the cochain space at stage n is
  spanned by pairs (generator label, target monomial), and the
  codifferential pushes values through the differential entries,
  multiplying by the coefficient pair on both sides;

* the ground-field collapse of a one-sided resolution: each free term
  keeps only its generators, differential entries survive through the
  counit of their coefficient.

Truncation policy.  A finitely-supported cochain's codifferential is
computed exactly (target rows extend far enough to hold every image), so
kernels of the truncated matrices consist of honest cocycles.
Coboundaries are counted from a slightly larger source window and
intersected with the reported one, which repairs the edge effect of
coboundaries whose potential lives just above the window.  Graded inputs
(degree-additive multiplication and degree-homogeneous differentials)
additionally get exact per-degree dimensions on slices that fit entirely
inside the window; merely filtered inputs get the windowed dimensions at
two cutoffs and a stability flag -- reported, never asserted."""

from .algebra import (
    CYCLIC_GROUP,
    ITERATED_ORE,
    POLYNOMIAL,
    TWISTED_PRODUCT,
    basis_up_to,
)
from .complex import BIMODULE, ChainComplexSpec
from .kernel import SparseMatrix, homology_dim, kernel_dim, rank
from .twist import FLIP, SKEW_GROUP, ORE

__all__ = [
    "HomologyError",
    "SELF_COEFF",
    "GROUND_COEFF",
    "algebra_is_graded",
    "complex_is_graded",
    "CochainTruncation",
    "CohomologyReport",
    "hochschild_cohomology",
    "tor_over_augmented",
    "ext_over_augmented",
]

SELF_COEFF = "self"
GROUND_COEFF = "ground"


class HomologyError(Exception):
    """Dimension computation asked of an unsuitable resolution."""


def algebra_is_graded(spec):
    """Whether the algebra's multiplication adds monomial degrees.

    Polynomial and group algebras are graded; PBW extensions only when
    every commutator table is empty; twisted products when both factors
    are graded and the twist moves monomials without changing degree
    (flips and group actions do, derivation twists with nonzero images
    do not)."""
    if spec.variant in (POLYNOMIAL, CYCLIC_GROUP):
        return True
    if spec.variant == ITERATED_ORE:
        return not any(spec.delta.values())
    if spec.variant == TWISTED_PRODUCT:
        t = spec.twist
        if not (algebra_is_graded(t.a_spec) and algebra_is_graded(t.b_spec)):
            return False
        if t.kind in (FLIP, SKEW_GROUP):
            return True
        if t.kind == ORE:
            images = getattr(t, "delta_images", {})
            return not any(img.terms for img in images.values())
        return False
    return False


def complex_is_graded(cplx):
    """Whether the complex supports exact per-degree slicing: graded
    algebra, degree-homogeneous differential entries, homogeneous
    augmentation images."""
    if not algebra_is_graded(cplx.algebra):
        return False
    for n in range(1, len(cplx.terms)):
        src = cplx.terms[n]
        tgt = cplx.terms[n - 1]
        for lab, img in cplx.differentials[n].items():
            want = src.internal_degree[lab]
            for key in img.terms:
                if tgt.key_degree(key) != want:
                    return False
    if cplx.augmentation is not None and cplx.aug_kind == "algebra":
        for lab, img in cplx.augmentation.items():
            want = cplx.terms[0].internal_degree[lab]
            for mono in img.terms:
                if cplx.algebra.monomial_degree(mono) != want:
                    return False
    return True


def _counit(spec, mono):
    """1 on degree-zero monomials, 0 otherwise (the augmentation of every
    shipped algebra on its monomial basis)."""
    return 1 if spec.monomial_degree(mono) == 0 else 0


def _resolve_algebra_source(source):
    """Accept a two-sided resolution in any packaging: a bundle, a total
    complex (re-presented over the twisted algebra so the coefficient
    multiplication is the real one), or a bare complex."""
    cplx = source
    if hasattr(source, "ore_form") or hasattr(source, "bicomplex"):
        from .twistprod import present_over_twisted_algebra
        cplx = present_over_twisted_algebra(source)
    elif hasattr(source, "complex"):
        cplx = source.complex
    if not isinstance(cplx, ChainComplexSpec):
        raise HomologyError("unsupported source %r" % (type(source).__name__,))
    if cplx.terms[0].side != BIMODULE:
        raise HomologyError(
            "algebra-valued cochains need a two-sided resolution")
    if cplx.aug_kind != "algebra":
        raise HomologyError(
            "the resolution must resolve the algebra itself")
    return cplx


def _resolve_ground_source(source):
    """Accept a one-sided resolution of the ground field: a bundle, a
    total complex (its re-bundled extension form when present, else the
    twisted-coordinate presentation), or a bare complex."""
    cplx = source
    if hasattr(source, "ore_form"):
        cplx = source.ore_form.rebundled.complex
    elif hasattr(source, "bicomplex"):
        from .twistprod import present_over_twisted_algebra
        cplx = present_over_twisted_algebra(source)
    elif hasattr(source, "complex"):
        cplx = source.complex
    if not isinstance(cplx, ChainComplexSpec):
        raise HomologyError("unsupported source %r" % (type(source).__name__,))
    if cplx.terms[0].side == BIMODULE:
        raise HomologyError(
            "ground-field collapse needs a one-sided resolution")
    if cplx.aug_kind != "ground":
        raise HomologyError(
            "the resolution must resolve the ground field")
    return cplx


class CochainTruncation:
    """Cochains on a free two-sided resolution, valued in the algebra
    (pairs label/target monomial) or the ground field (labels only),
    truncated by target degree.  Codifferential matrices extend their
    rows far enough that images of truncated cochains are exact."""

    def __init__(self, cplx, coeff=SELF_COEFF):
        if coeff not in (SELF_COEFF, GROUND_COEFF):
            raise HomologyError("unknown coefficient choice %r" % (coeff,))
        self.cplx = cplx
        self.coeff = coeff
        self.alg = cplx.algebra
        self.field = cplx.algebra.field
        self.graded = complex_is_graded(cplx)
        self.top = len(cplx.terms) - 1
        self.raises = [0]
        for n in range(1, self.top + 1):
            shift = 0
            for img in cplx.differentials[n].values():
                for key in img.terms:
                    shift = max(shift,
                                self.alg.monomial_degree(key[0])
                                + self.alg.monomial_degree(key[2]))
            self.raises.append(shift)
        self._mats = {}
        self._bases = {}

    def computable_top(self):
        return self.top if self.cplx.complete_above else self.top - 1

    def basis(self, n, cutoff):
        """Ordered cochain basis at stage n: (label, monomial) for
        algebra coefficients, (label,) for ground ones."""
        key = (n, cutoff)
        if key in self._bases:
            return self._bases[key]
        if n > self.top:
            cols = []
        elif self.coeff == GROUND_COEFF:
            cols = [(lab,) for lab in self.cplx.terms[n].labels]
        else:
            monos = basis_up_to(self.alg, cutoff)
            cols = [(lab, m) for lab in self.cplx.terms[n].labels
                    for m in monos]
        self._bases[key] = cols
        return cols

    def t_value(self, col, n):
        """Internal degree of a cochain basis element: target degree
        minus generator degree."""
        lab = col[0]
        base = self.cplx.terms[n].internal_degree[lab]
        if self.coeff == GROUND_COEFF:
            return -base
        return self.alg.monomial_degree(col[1]) - base

    def matrix(self, n, cutoff):
        """The codifferential out of stage n on targets of degree <=
        cutoff.  Returns (matrix, cols, rows); rows live at stage n+1
        with targets up to cutoff plus that stage's coefficient shift,
        so every image is represented exactly."""
        key = (n, cutoff)
        if key in self._mats:
            return self._mats[key]
        f = self.field
        cols = self.basis(n, cutoff)
        col_index = {c: i for i, c in enumerate(cols)}
        if n + 1 > self.top:
            rows = []
            mat = SparseMatrix(0, len(cols), [], f)
            self._mats[key] = (mat, cols, rows)
            return self._mats[key]
        shift = self.raises[n + 1]
        rows = self.basis(n + 1, cutoff + shift)
        row_index = {r: i for i, r in enumerate(rows)}
        entries = {}
        for mu, img in self.cplx.differentials[n + 1].items():
            for (l, lab, r), c in img.terms.items():
                if self.coeff == GROUND_COEFF:
                    scale = _counit(self.alg, l) * _counit(self.alg, r)
                    if not scale:
                        continue
                    ri = row_index[(mu,)]
                    ci = col_index[(lab,)]
                    acc = f.add(entries.get((ri, ci), f.zero), c)
                    entries[(ri, ci)] = acc
                    continue
                for col in self._mono_cols(lab, cutoff):
                    m = col[1]
                    ci = col_index[col]
                    for m1, c1 in self.alg.mono_mul(l, m).items():
                        for m2, c2 in self.alg.mono_mul(m1, r).items():
                            ri = row_index[(mu, m2)]
                            val = f.mul(c, f.mul(c1, c2))
                            acc = f.add(entries.get((ri, ci), f.zero), val)
                            entries[(ri, ci)] = acc
        triples = [(i, j, v) for (i, j), v in entries.items()
                   if not f.is_zero(v)]
        mat = SparseMatrix(len(rows), len(cols), triples, f)
        self._mats[key] = (mat, cols, rows)
        return self._mats[key]

    def _mono_cols(self, lab, cutoff):
        return [(lab, m) for m in basis_up_to(self.alg, cutoff)]

    def compose_zero_check(self, n, cutoff):
        """Consecutive codifferentials compose to zero: verified on the
        matrices whose cutoffs line up exactly."""
        shift = self.raises[n + 1] if n + 1 <= self.top else 0
        m1, cols1, rows1 = self.matrix(n, cutoff)
        m2, cols2, rows2 = self.matrix(n + 1, cutoff + shift)
        assert rows1 == cols2
        f = self.field
        by_col = {}
        for (i, j), v in m1.entries.items():
            by_col.setdefault(j, []).append((i, v))
        m2_by_col = {}
        for (i, j), v in m2.entries.items():
            m2_by_col.setdefault(j, []).append((i, v))
        for j, column in by_col.items():
            acc = {}
            for mid, v1 in column:
                for i, v2 in m2_by_col.get(mid, ()):
                    s = f.add(acc.get(i, f.zero), f.mul(v2, v1))
                    if f.is_zero(s):
                        acc.pop(i, None)
                    else:
                        acc[i] = s
            if acc:
                return False
        return True

    # -- windowed dimensions ------------------------------------------

    def window_dim(self, n, cutoff, slack=2):
        """dim of stage-n cohomology seen at the window: exact cocycles
        with targets <= cutoff, minus coboundaries inside the window
        coming from sources up to cutoff + slack."""
        mat, cols, _rows = self.matrix(n, cutoff)
        kernel = kernel_dim(mat)
        if n == 0:
            return kernel
        prev, pcols, prows = self.matrix(n - 1, cutoff + slack)
        total = rank(prev)
        if self.coeff == GROUND_COEFF:
            high = []
        else:
            high = [i for i, row in enumerate(prows)
                    if self.alg.monomial_degree(row[1]) > cutoff]
        inside = total - rank(prev.restrict(rows=high))
        return kernel - inside

    def degree_slice_dim(self, n, t, cutoff):
        """Exact dimension of the degree-t slice at stage n (graded
        complexes only); None when the slice does not fit the window."""
        if not self.graded:
            raise HomologyError("per-degree slices need a graded complex")
        stages = [m for m in (n - 1, n, n + 1) if 0 <= m <= self.top]
        maxlab = max(self.cplx.terms[m].internal_degree[lab]
                     for m in stages for lab in self.cplx.terms[m].labels)
        if t + maxlab > cutoff:
            return None
        mat, cols, rows = self.matrix(n, cutoff)
        keep_c = [i for i, col in enumerate(cols)
                  if self.t_value(col, n) == t]
        keep_r = [i for i, row in enumerate(rows)
                  if self.t_value(row, n + 1) == t] if rows else []
        sliced = mat.restrict(rows=keep_r, cols=keep_c)
        kernel = kernel_dim(sliced)
        if n == 0:
            return kernel
        prev, pcols, prows = self.matrix(n - 1, cutoff)
        keep_pc = [i for i, col in enumerate(pcols)
                   if self.t_value(col, n - 1) == t]
        keep_pr = [i for i, row in enumerate(prows)
                   if self.t_value(row, n) == t]
        image = rank(prev.restrict(rows=keep_pr, cols=keep_pc))
        return kernel - image


class CohomologyReport:
    """Per-stage dimensions with stability bookkeeping.

    ``dims[n]`` is the windowed dimension at ``cutoff``; ``stable[n]``
    says whether recomputing at ``recheck_cutoff`` gave the same number.
    Graded inputs also carry ``per_degree[(n, t)]`` -- exact dimensions
    of internal-degree slices that fit the window."""

    def __init__(self, name, coeff, cutoff, recheck_cutoff, graded):
        self.name = name
        self.coeff = coeff
        self.cutoff = cutoff
        self.recheck_cutoff = recheck_cutoff
        self.graded = graded
        self.dims = {}
        self.stable = {}
        self.per_degree = {} if graded else None

    @property
    def unstable(self):
        return sorted(n for n, ok in self.stable.items() if not ok)

    @property
    def all_stable(self):
        return not self.unstable

    def __repr__(self):
        mode = "graded" if self.graded else "filtered"
        flag = "stable" if self.all_stable else (
            "UNSTABLE at %r" % (self.unstable,))
        return "<CohomologyReport %s [%s] dims=%r %s>" % (
            self.name, mode, self.dims, flag)


def hochschild_cohomology(source, n_top=None, cutoff=8, coeff=SELF_COEFF,
                          slack=2, stability_shift=2):
    """Cohomology dimensions of a two-sided free resolution with values
    in the algebra itself (default) or the ground field.

    Graded inputs report exact per-internal-degree dimensions alongside
    the windowed counts; filtered inputs report windowed counts at
    ``cutoff`` and ``cutoff + stability_shift`` with per-stage stability
    flags (disagreement flags, never raises)."""
    cplx = _resolve_algebra_source(source)
    co = CochainTruncation(cplx, coeff=coeff)
    computable = co.computable_top()
    if n_top is None:
        n_top = computable
    if n_top > computable and not cplx.complete_above:
        raise HomologyError(
            "stage %d beyond the truncated resolution's trustworthy top %d"
            % (n_top, computable))
    recheck = cutoff + stability_shift
    rep = CohomologyReport(cplx.name, coeff, cutoff, recheck, co.graded)
    for n in range(n_top + 1):
        here = co.window_dim(n, cutoff, slack=slack)
        again = co.window_dim(n, recheck, slack=slack)
        rep.dims[n] = here
        rep.stable[n] = here == again
    if co.graded:
        for n in range(n_top + 1):
            ts = sorted({co.t_value(col, n)
                         for col in co.basis(n, cutoff)})
            for t in ts:
                d = co.degree_slice_dim(n, t, cutoff)
                if d is not None:
                    rep.per_degree[(n, t)] = d
    return rep


# ---------------------------------------------------------------------------
# ground-field collapse of one-sided resolutions


def _reduced_matrices(cplx):
    """Collapse a one-sided resolution along the counit: stage n keeps a
    basis of generator labels, a differential entry survives with the
    counit of its coefficient."""
    f = cplx.algebra.field
    alg = cplx.algebra
    sizes = [len(term.labels) for term in cplx.terms]
    mats = [None]
    for n in range(1, len(cplx.terms)):
        src = {lab: i for i, lab in enumerate(cplx.terms[n].labels)}
        tgt = {lab: i for i, lab in enumerate(cplx.terms[n - 1].labels)}
        entries = {}
        for lab, img in cplx.differentials[n].items():
            for (l, lab2), c in img.terms.items():
                if not _counit(alg, l):
                    continue
                key = (tgt[lab2], src[lab])
                acc = f.add(entries.get(key, f.zero), c)
                entries[key] = acc
        triples = [(i, j, v) for (i, j), v in entries.items()
                   if not f.is_zero(v)]
        mats.append(SparseMatrix(sizes[n - 1], sizes[n], triples, f))
    return sizes, mats


def _transpose(mat, f):
    triples = [(j, i, v) for (i, j), v in mat.entries.items()]
    return SparseMatrix(mat.ncols, mat.nrows, triples, f)


def _collapse_dims(cplx, n_top, transpose):
    f = cplx.algebra.field
    sizes, mats = _reduced_matrices(cplx)
    top = len(cplx.terms) - 1
    computable = top if cplx.complete_above else top - 1
    if n_top is None:
        n_top = computable
    if n_top > computable and not cplx.complete_above:
        raise HomologyError(
            "stage %d beyond the truncated resolution's trustworthy top %d"
            % (n_top, computable))
    dims = []
    for n in range(n_top + 1):
        if n > top:
            dims.append(0)
            continue
        d_here = mats[n] if n >= 1 else SparseMatrix(0, sizes[0], [], f)
        d_next = (mats[n + 1] if n + 1 <= top
                  else SparseMatrix(sizes[n], 0, [], f))
        if transpose:
            dims.append(homology_dim(_transpose(d_here, f),
                                     _transpose(d_next, f)))
        else:
            dims.append(homology_dim(d_next, d_here))
    return dims


def tor_over_augmented(source, n_top=None):
    """Homology dimensions of the ground-field collapse of a one-sided
    resolution (stage n keeps its generators; entries survive through
    the counit of their coefficient)."""
    return _collapse_dims(_resolve_ground_source(source), n_top,
                          transpose=False)


def ext_over_augmented(source, n_top=None):
    """Cohomology dimensions of the ground-field-valued cochains on a
    one-sided resolution: the transposed collapse.  Over a field these
    agree with the homology dimensions; that equality is a theorem
    about finite-rank complexes and is *checked* by tests, not wired
    in."""
    return _collapse_dims(_resolve_ground_source(source), n_top,
                          transpose=True)
