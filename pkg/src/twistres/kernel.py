"""Exact scalar arithmetic and sparse exact linear algebra.

Everything downstream reduces to ranks and kernel dimensions of sparse
matrices over an exact field: either the rationals (elements are
``fractions.Fraction``) or a prime field F_p with p < 2^31 (elements are
ints in [0, p)).  No floating point appears anywhere.

Over the rationals, elimination is fraction-free: rows are cleared to
integers and kept gcd-reduced, so entries stay integral and exact while
coefficient growth stays controlled (Bareiss-style two-term updates).
Over F_p elimination is the straightforward one.  Small matrices go
through a dense routine, larger ones through sparse elimination with
Markowitz-style pivoting.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


DENSE_LIMIT = 512  # below this, dense elimination is fine


class KernelError(Exception):
    pass


class CompositionNonzeroError(KernelError):
    """d_out . d_in != 0 — a broken differential upstream."""


class NonInvertibleError(KernelError):
    pass


def _is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class RationalField:
    """The field Q; elements are Fraction (ints are accepted and coerced)."""

    characteristic = 0

    def coerce(self, v):
        if isinstance(v, Fraction):
            return v
        return Fraction(v)

    def is_zero(self, v):
        return v == 0

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    @property
    def one(self):
        return Fraction(1)

    @property
    def zero(self):
        return Fraction(0)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """F_p for prime p < 2^31; elements are ints in [0, p)."""

    def __init__(self, p):
        if not (2 <= p < 2**31 and _is_prime(p)):
            raise ValueError("prime modulus < 2^31 required, got %r" % (p,))
        self.p = p
        self.characteristic = p

    def coerce(self, v):
        if isinstance(v, Fraction):
            if v.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by %d" % self.p)
            return v.numerator * pow(v.denominator, -1, self.p) % self.p
        return int(v) % self.p

    def is_zero(self, v):
        return v % self.p == 0

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * pow(b, -1, self.p) % self.p

    @property
    def one(self):
        return 1

    @property
    def zero(self):
        return 0

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return "GF(%d)" % self.p


QQ = RationalField()


def field_of_characteristic(ch):
    return QQ if ch == 0 else PrimeField(ch)


class SparseMatrix:
    """Immutable sparse matrix over an exact field.

    Entries are stored as a dict (row, col) -> nonzero scalar.  The matrix
    acts on column vectors: column j holds the image of the j-th basis
    vector of the source.
    """

    def __init__(self, nrows, ncols, entries, field):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        data = {}
        for i, j, v in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise KernelError("entry (%d,%d) out of range" % (i, j))
            if (i, j) in data:
                raise KernelError("duplicate entry at (%d,%d)" % (i, j))
            v = field.coerce(v)
            if not field.is_zero(v):
                data[(i, j)] = v
        self.entries = data

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_rows(cls, rows, field, ncols=None):
        """rows: list of lists (dense) of field-coercible values."""
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        ent = []
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                ent.append((i, j, v))
        return cls(len(rows), ncols, ent, field)

    @classmethod
    def zero(cls, nrows, ncols, field):
        return cls(nrows, ncols, [], field)

    @classmethod
    def identity(cls, n, field):
        return cls(n, n, [(i, i, field.one) for i in range(n)], field)

    # -- basic operations ----------------------------------------------------

    def transpose(self):
        return SparseMatrix(
            self.ncols, self.nrows,
            [(j, i, v) for (i, j), v in self.entries.items()], self.field)

    def compose(self, other):
        """self . other (apply other first); shapes must chain."""
        if other.nrows != self.ncols:
            raise KernelError("shape mismatch in compose: %dx%d . %dx%d"
                              % (self.nrows, self.ncols, other.nrows, other.ncols))
        f = self.field
        by_col = {}
        for (k, j), v in other.entries.items():
            by_col.setdefault(k, []).append((j, v))
        acc = {}
        for (i, k), u in self.entries.items():
            for j, v in by_col.get(k, ()):
                key = (i, j)
                w = f.add(acc.get(key, f.zero), f.mul(u, v))
                if f.is_zero(w):
                    acc.pop(key, None)
                else:
                    acc[key] = w
        return SparseMatrix(self.nrows, other.ncols,
                            [(i, j, v) for (i, j), v in acc.items()], f)

    def is_zero(self):
        return not self.entries

    def restrict(self, rows=None, cols=None):
        """Submatrix on the given (ordered) row/col index lists."""
        rows = range(self.nrows) if rows is None else rows
        cols = range(self.ncols) if cols is None else cols
        rindex = {r: i for i, r in enumerate(rows)}
        cindex = {c: j for j, c in enumerate(cols)}
        ent = [(rindex[i], cindex[j], v) for (i, j), v in self.entries.items()
               if i in rindex and j in cindex]
        return SparseMatrix(len(rindex), len(cindex), ent, self.field)

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.field == other.field
                and self.entries == other.entries)

    def __repr__(self):
        return "SparseMatrix(%dx%d over %r, %d nonzero)" % (
            self.nrows, self.ncols, self.field, len(self.entries))

    # -- rank ----------------------------------------------------------------

    def _integer_rows(self):
        """Rows as dicts col -> int, denominators cleared, gcd-reduced."""
        rows = [dict() for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        out = []
        for row in rows:
            if not row:
                continue
            if self.field.characteristic == 0:
                lcm = 1
                for v in row.values():
                    d = Fraction(v).denominator
                    lcm = lcm * d // gcd(lcm, d)
                ints = {j: int(v * lcm) for j, v in row.items()}
                g = 0
                for v in ints.values():
                    g = gcd(g, v)
                if g > 1:
                    ints = {j: v // g for j, v in ints.items()}
                out.append(ints)
            else:
                out.append(dict(row))
        return out

    def rank(self):
        if not self.entries:
            return 0
        if max(self.nrows, self.ncols) < DENSE_LIMIT:
            return _rank_dense(self)
        return _rank_sparse_rows(self._integer_rows(), self.field)

    def kernel_dim(self):
        return self.ncols - self.rank()


def _rank_dense(m):
    """Dense elimination; fraction-free Bareiss over Q, plain over F_p."""
    f = m.field
    rows = [[f.zero] * m.ncols for _ in range(m.nrows)]
    for (i, j), v in m.entries.items():
        rows[i][j] = v
    if f.characteristic == 0:
        # clear to integers row by row
        irows = []
        for row in rows:
            lcm = 1
            for v in row:
                d = Fraction(v).denominator
                lcm = lcm * d // gcd(lcm, d)
            irows.append([int(v * lcm) for v in row])
        rank = 0
        prev = 1
        r = 0
        for c in range(m.ncols):
            piv = None
            for i in range(r, len(irows)):
                if irows[i][c]:
                    piv = i
                    break
            if piv is None:
                continue
            irows[r], irows[piv] = irows[piv], irows[r]
            pv = irows[r][c]
            for i in range(r + 1, len(irows)):
                vi = irows[i][c]
                # Bareiss update: exactness of the division needs every row
                # below the pivot rescaled, zero pivot-column entry or not
                irows[i] = [(pv * a - vi * b) // prev
                            for a, b in zip(irows[i], irows[r])]
            prev = pv
            r += 1
            rank += 1
            if r == len(irows):
                break
        return rank
    p = f.p
    rank = 0
    r = 0
    for c in range(m.ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        for i in range(r + 1, len(rows)):
            if rows[i][c] % p:
                fac = rows[i][c] * inv % p
                rows[i] = [(a - fac * b) % p for a, b in zip(rows[i], rows[r])]
        r += 1
        rank += 1
        if r == len(rows):
            break
    return rank


def _rank_sparse_rows(rows, field):
    """Sparse elimination with Markowitz-style pivoting.

    rows: list of dicts col -> value (ints over Q, residues over F_p).
    Over Q rows stay integral: two-term cross-multiplication updates with a
    gcd reduction afterwards.
    """
    modp = field.characteristic
    rows = [r for r in rows if r]
    col_count = {}
    for r in rows:
        for c in r:
            col_count[c] = col_count.get(c, 0) + 1
    rank = 0
    active = list(range(len(rows)))
    while active:
        # Markowitz: minimize (nnz(row)-1) * (nnz(col)-1)
        best = None
        best_score = None
        for ri in active:
            row = rows[ri]
            rn = len(row) - 1
            for c in row:
                score = rn * (col_count[c] - 1)
                if best_score is None or score < best_score:
                    best_score = score
                    best = (ri, c)
                    if score == 0:
                        break
            if best_score == 0:
                break
        ri, pc = best
        prow = rows[ri]
        pv = prow[pc]
        active.remove(ri)
        for c in prow:
            col_count[c] -= 1
        rank += 1
        if modp:
            inv = pow(pv, -1, modp)
        for oi in active:
            orow = rows[oi]
            if pc not in orow:
                continue
            ov = orow[pc]
            for c in orow:
                col_count[c] -= 1
            if modp:
                fac = ov * inv % modp
                new = {}
                for c, v in orow.items():
                    if c == pc:
                        continue
                    w = (v - fac * prow.get(c, 0)) % modp
                    if w:
                        new[c] = w
                for c, v in prow.items():
                    if c != pc and c not in orow:
                        w = (-fac * v) % modp
                        if w:
                            new[c] = w
            else:
                new = {}
                for c, v in orow.items():
                    if c == pc:
                        continue
                    w = pv * v - ov * prow.get(c, 0)
                    if w:
                        new[c] = w
                for c, v in prow.items():
                    if c != pc and c not in orow:
                        new[c] = -ov * v
                if new:
                    g = 0
                    for v in new.values():
                        g = gcd(g, v)
                    if g > 1:
                        new = {c: v // g for c, v in new.items()}
            rows[oi] = new
            for c in new:
                col_count[c] = col_count.get(c, 0) + 1
        active = [oi for oi in active if rows[oi]]
    return rank


def rank(m):
    """Exact rank of a SparseMatrix over its field."""
    return m.rank()


def kernel_dim(m):
    """dim ker = columns - rank."""
    return m.kernel_dim()


def homology_dim(d_in, d_out):
    """ker(d_out) / im(d_in) at the middle spot of  . --d_in--> . --d_out--> .

    d_in maps into the middle space (rows of d_in = middle basis), d_out maps
    out of it (cols of d_out = middle basis).  Raises if d_out . d_in != 0.
    """
    if d_in.nrows != d_out.ncols:
        raise KernelError("middle dimensions disagree: %d vs %d"
                          % (d_in.nrows, d_out.ncols))
    if not d_out.compose(d_in).is_zero():
        raise CompositionNonzeroError("d_out . d_in != 0")
    return d_out.kernel_dim() - d_in.rank()


def solve_dense(m, rhs):
    """One exact solution x of  m . x = rhs  for a small SparseMatrix.

    rhs is a dict row -> value; the result is a dict col -> value with zero
    entries omitted (free variables, if any, are set to zero).  Returns None
    if the system is inconsistent.
    """
    f = m.field
    nr, nc = m.nrows, m.ncols
    aug = [[f.zero] * (nc + 1) for _ in range(nr)]
    for (i, j), v in m.entries.items():
        aug[i][j] = v
    for i, v in rhs.items():
        aug[i][nc] = f.coerce(v)
    r = 0
    pivots = []
    for c in range(nc):
        piv = None
        for i in range(r, nr):
            if not f.is_zero(aug[i][c]):
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = f.inv(aug[r][c])
        aug[r] = [f.mul(inv, v) for v in aug[r]]
        for i in range(nr):
            if i != r and not f.is_zero(aug[i][c]):
                fac = aug[i][c]
                aug[i] = [f.sub(a, f.mul(fac, b)) for a, b in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
    for i in range(r, nr):
        if not f.is_zero(aug[i][nc]):
            return None
    sol = {}
    for i, c in pivots:
        v = aug[i][nc]
        if not f.is_zero(v):
            sol[c] = v
    return sol


def invert_dense(m):
    """Inverse of a small square SparseMatrix, as a list of columns
    (dicts row -> value).  Raises NonInvertibleError if singular."""
    if m.nrows != m.ncols:
        raise NonInvertibleError("not square")
    f = m.field
    n = m.nrows
    rows = [[f.zero] * n for _ in range(n)]
    for (i, j), v in m.entries.items():
        rows[i][j] = v
    aug = [row + [f.one if i == k else f.zero for k in range(n)]
           for i, row in enumerate(rows)]
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, n):
            if not f.is_zero(aug[i][c]):
                piv = i
                break
        if piv is None:
            raise NonInvertibleError("singular at column %d" % c)
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = f.inv(aug[r][c])
        aug[r] = [f.mul(inv, v) for v in aug[r]]
        for i in range(n):
            if i != r and not f.is_zero(aug[i][c]):
                fac = aug[i][c]
                aug[i] = [f.sub(a, f.mul(fac, b)) for a, b in zip(aug[i], aug[r])]
        r += 1
    cols = []
    for j in range(n):
        col = {}
        for i in range(n):
            v = aug[i][n + j]
            if not f.is_zero(v):
                col[i] = v
        cols.append(col)
    return cols
