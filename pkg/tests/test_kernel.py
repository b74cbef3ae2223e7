"""Tests for the exact linear algebra kernel."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twistres.kernel import (
    QQ, PrimeField, SparseMatrix, CompositionNonzeroError, NonInvertibleError,
    homology_dim, invert_dense,
)

GF2 = PrimeField(2)
GF3 = PrimeField(3)


def M(rows, field=QQ):
    return SparseMatrix.from_rows(rows, field)


# ---------------------------------------------------------------- rank basics

def test_rank_identity():
    assert SparseMatrix.identity(3, QQ).rank() == 3


def test_rank_proportional_rows():
    assert M([[1, 2], [2, 4]]).rank() == 1


def test_rank_equal_rows_mod2():
    assert M([[1, 1], [1, 1]], GF2).rank() == 1


def test_rank_zero_matrix():
    assert SparseMatrix.zero(4, 7, QQ).rank() == 0


def test_rank_fractions():
    assert M([[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]]).rank() == 1


def test_rank_mod_p_differs_from_rational():
    # [[1,1],[1,-1]] is invertible over Q but rank 1 over F_2
    rows = [[1, 1], [1, -1]]
    assert M(rows).rank() == 2
    assert M(rows, GF2).rank() == 1


# ---------------------------------------------------------------- kernel dims

def test_kernel_dim_zero_matrix():
    assert SparseMatrix.zero(2, 5, QQ).kernel_dim() == 5


def test_kernel_dim_identity():
    assert SparseMatrix.identity(3, QQ).kernel_dim() == 0


def test_kernel_dim_rank_one():
    assert M([[1, 2], [2, 4]]).kernel_dim() == 1


# ---------------------------------------------------------------- homology

def test_homology_dim_no_incoming():
    d_in = SparseMatrix.zero(1, 0, QQ)     # nothing comes in
    d_out = SparseMatrix.zero(1, 1, QQ)    # zero map out of a line
    assert homology_dim(d_in, d_out) == 1


def test_homology_dim_exact_spot():
    d_in = SparseMatrix.identity(2, QQ)
    d_out = SparseMatrix.zero(1, 2, QQ)
    assert homology_dim(d_in, d_out) == 0


def test_homology_dim_line_into_plane():
    d_in = M([[1], [0]])
    d_out = M([[0, 1]])
    assert homology_dim(d_in, d_out) == 0


def test_homology_rejects_nonzero_composite():
    d_in = SparseMatrix.identity(2, QQ)
    d_out = M([[1, 0]])
    with pytest.raises(CompositionNonzeroError):
        homology_dim(d_in, d_out)


# ---------------------------------------------------------------- properties

int_entries = st.integers(min_value=-9, max_value=9)


@st.composite
def int_matrices(draw, max_dim=8):
    n = draw(st.integers(1, max_dim))
    m = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(int_entries, min_size=m, max_size=m),
                         min_size=n, max_size=n))
    return rows


@settings(max_examples=60, derandomize=True, deadline=None)
@given(int_matrices())
def test_rank_equals_transpose_rank(rows):
    a = M(rows)
    assert a.rank() == a.transpose().rank()


@settings(max_examples=60, derandomize=True, deadline=None)
@given(int_matrices())
def test_rank_matches_sympy(rows):
    sympy = pytest.importorskip("sympy")
    assert M(rows).rank() == sympy.Matrix(rows).rank()


@settings(max_examples=40, derandomize=True, deadline=None)
@given(int_matrices(max_dim=6))
def test_rank_mod_large_prime_matches_rational(rows):
    # same integer matrix over a large prime: rank agrees for all but
    # finitely many p, and 2^31 - 1 dodges the tiny entries used here
    big = PrimeField(2**31 - 1)
    assert M(rows).rank() == M(rows, big).rank()


@settings(max_examples=30, derandomize=True, deadline=None)
@given(int_matrices(max_dim=5), int_matrices(max_dim=5))
def test_homology_additive_over_blocks(rows_a, rows_b):
    # block-diagonal complexes: 0 -> A -> 0 style spots add up
    a, b = M(rows_a), M(rows_b)
    # homology of 0 -> source --matrix--> target at the source spot
    ha = homology_dim(SparseMatrix.zero(a.ncols, 0, QQ), a)
    hb = homology_dim(SparseMatrix.zero(b.ncols, 0, QQ), b)
    block = [[0] * (a.ncols + b.ncols) for _ in range(a.nrows + b.nrows)]
    for (i, j), v in a.entries.items():
        block[i][j] = v
    for (i, j), v in b.entries.items():
        block[a.nrows + i][a.ncols + j] = v
    hblock = homology_dim(SparseMatrix.zero(a.ncols + b.ncols, 0, QQ), M(block))
    assert hblock == ha + hb


# ---------------------------------------------------------------- sparse path

def test_sparse_path_agrees_with_dense_on_structured_matrix():
    # force the sparse branch with a >512-column matrix of known rank
    n = 520
    ent = []
    for i in range(40):
        ent.append((i, i, 1))
        ent.append((i, i + 40, 2))
        ent.append((40, i, 1))  # row 40 = sum of e_i rows' first entries
    a = SparseMatrix(41, n, ent, QQ)
    assert a.rank() == 41
    b = SparseMatrix(41, n, [(i, j, v) for (i, j, v) in ent if i < 40], QQ)
    assert b.rank() == 40


def test_sparse_rank_mod_p():
    p = PrimeField(3)
    n = 600
    ent = [(i, i, 1) for i in range(50)] + [(i, i + 1, 2) for i in range(50)]
    ent += [(50, 0, 1), (50, 1, 2)]  # = row 0
    a = SparseMatrix(51, n, ent, p)
    assert a.rank() == 50


# ---------------------------------------------------------------- inversion

def test_invert_dense_roundtrip():
    a = M([[1, 2], [3, 4]])
    cols = invert_dense(a)
    inv = SparseMatrix(2, 2, [(i, j, v) for j, col in enumerate(cols)
                              for i, v in col.items()], QQ)
    assert a.compose(inv) == SparseMatrix.identity(2, QQ)


def test_invert_dense_singular():
    with pytest.raises(NonInvertibleError):
        invert_dense(M([[1, 2], [2, 4]]))
