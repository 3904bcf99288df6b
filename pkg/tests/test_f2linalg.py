from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from sqalg.f2linalg import (
    Echelon,
    F2Matrix,
    F2Vector,
    bits_of,
    kernel_basis,
    rank,
    rref,
    solve,
    solve_rows,
)

import numpy as np


@st.composite
def matrices(draw, max_rows=9, max_cols=9):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r))
    return F2Matrix(r, c, tuple(rows))


def to_np(m: F2Matrix) -> np.ndarray:
    return np.array(m.to_lists(), dtype=np.uint8).reshape(m.nrows, m.ncols)


def test_bits_of_is_increasing():
    assert bits_of(0b101100) == [2, 3, 5]
    assert bits_of(0) == []


def test_identity_and_zero():
    assert rank(F2Matrix.identity(5)) == 5
    assert rank(F2Matrix.zero(3, 4)) == 0
    assert kernel_basis(F2Matrix.identity(3)) == []


def test_known_rank():
    m = F2Matrix.from_lists([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert rank(m) == 2
    (k,) = kernel_basis(m)
    assert k.to_list() == [1, 1, 1]


@given(matrices())
def test_rank_matches_numpy_oracle(m):
    assert rank(m) == O.np_rank(to_np(m))


@given(matrices())
def test_rank_nullity(m):
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.ncols
    for v in ker:
        assert m.matvec(v).is_zero()
    assert rank(F2Matrix(len(ker), m.ncols, tuple(v.bits for v in ker))) == len(ker)


@given(matrices())
def test_transpose_preserves_rank(m):
    assert rank(m.transpose()) == rank(m)
    assert m.transpose().transpose() == m


@given(matrices())
def test_rref_is_idempotent_and_row_equivalent(m):
    r, piv = rref(m)
    r2, piv2 = rref(r)
    assert (r2, piv2) == (r, piv)
    assert len(piv) == rank(m)
    for i, p in enumerate(piv):
        col = [(row >> p) & 1 for row in r.rows[: len(piv)]]
        assert col == [int(j == i) for j in range(len(piv))]


@given(matrices(), st.integers(0, 2**9 - 1))
def test_solve_consistent_systems(m, seed):
    x = F2Vector(m.ncols, seed & ((1 << m.ncols) - 1))
    b = m.matvec(x)
    sol = solve(m, b)
    assert sol is not None
    assert m.matvec(sol) == b


def test_solve_inconsistent():
    m = F2Matrix.from_lists([[1, 0], [1, 0]])
    assert solve(m, F2Vector.from_list([1, 0])) is None


def test_solve_rejects_length_mismatch():
    with pytest.raises(ValueError):
        solve(F2Matrix.identity(2), F2Vector.from_list([1, 0, 1]))


@given(matrices(), matrices())
def test_matmul_associates_with_matvec(a, b):
    b = F2Matrix(a.ncols, b.ncols, tuple(r & ((1 << b.ncols) - 1) for r in (list(b.rows) + [0] * a.ncols)[: a.ncols]))
    for j in range(b.ncols):
        e = F2Vector(b.ncols, 1 << j)
        assert (a @ b).matvec(e) == a.matvec(b.matvec(e))


@settings(max_examples=50)
@given(st.lists(st.integers(0, 255), max_size=10), st.integers(0, 255))
def test_echelon_coordinates(vectors, target):
    ech = Echelon(track=True)
    for v in vectors:
        ech.add(v)
    tag = ech.coordinates(target)
    if tag is None:
        assert not ech.contains(target)
        return
    acc = 0
    for i in bits_of(tag):
        acc ^= vectors[i]
    assert acc == target
    assert solve_rows(vectors, target) is not None


def test_vector_round_trip():
    v = F2Vector.from_list([1, 0, 1, 1])
    assert v.to_list() == [1, 0, 1, 1]
    assert (v + v).is_zero()
    assert v[2] == 1
