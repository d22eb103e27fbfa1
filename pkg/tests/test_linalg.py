import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superelem import linalg
from superelem.linalg import FieldMatrix, field, frobenius, field_arith


F3 = field(3)
F9 = field(3, 2)
F27 = field(3, 3)
F5 = field(5)


def test_modulus_is_deterministic_and_published():
    assert F3.modulus == (0, 1)
    assert F9.modulus == (1, 0, 1)  # t^2 + 1
    assert F27.modulus == (1, 2, 0, 1)  # t^3 + 2t + 1
    assert field(3, 2) is F9


def test_field_spec_rejects_bad_parameters():
    with pytest.raises(ValueError):
        linalg.FieldSpec(4, 1, (0, 1))
    with pytest.raises(ValueError):
        linalg.FieldSpec(2, 1, (0, 1))
    with pytest.raises(ValueError):
        linalg.FieldSpec(3, 2, (0, 0, 1))  # t^2 is reducible


def test_prime_field_arithmetic():
    two = F3.from_int(2)
    assert two + two == F3.from_int(1)
    assert field_arith(F3.one, two, "div") == two  # 2*2 = 1 mod 3
    with pytest.raises(ZeroDivisionError):
        field_arith(F3.one, F3.zero, "div")


def test_extension_reduction():
    t = F9.gen()
    assert t * t == F9.from_int(-1)  # t^2 = -1 under t^2+1
    assert (t * t).coefficients == (2, 0)


@pytest.mark.parametrize("fld", [F3, F9, F27, F5])
def test_field_axioms_randomized(fld):
    rng = random.Random(1234)
    for _ in range(1000):
        a, b, c = (fld.random(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a + fld.zero == a and a * fld.one == a
        assert a - a == fld.zero
        if not b.is_zero():
            assert (a / b) * b == a


@pytest.mark.parametrize("fld", [F9, F27])
def test_frobenius_is_ring_hom(fld):
    rng = random.Random(7)
    for _ in range(300):
        a, b = fld.random(rng), fld.random(rng)
        assert frobenius(a * b, 1) == frobenius(a, 1) * frobenius(b, 1)
        assert frobenius(a + b, 1) == frobenius(a, 1) + frobenius(b, 1)
        assert frobenius(frobenius(a, 1), -1) == a
    assert all(frobenius(x, fld.e) == x for x in fld.elements())


def test_frobenius_fixes_prime_field():
    for x in F3.elements():
        for k in (-2, -1, 0, 1, 5):
            assert frobenius(x, k) == x


def test_frobenius_example_f9():
    t = F9.gen()
    assert frobenius(t, 1) == t**3 == -t


def test_rref_identity_and_zero():
    I = FieldMatrix.identity(F3, 4)
    rank, red, piv = linalg.rref(I)
    assert rank == 4 and red == I and piv == (0, 1, 2, 3)
    Z = FieldMatrix.zeros(F3, 3, 2)
    assert linalg.rref(Z)[0] == 0
    assert linalg.kernel_basis(FieldMatrix.identity(F3, 3)).cols == 0
    assert linalg.kernel_basis(FieldMatrix.zeros(F3, 2, 2)).codes.T.tolist() == [[1, 0], [0, 1]]


def test_rref_proportional_rows():
    M = FieldMatrix.from_rows(F3, [[1, 2], [2, 1]])
    rank, red, piv = linalg.rref(M)
    assert rank == 1
    ker = linalg.kernel_basis(M)
    assert ker.cols == 1
    # (1,1) since 1 + 2*1 = 0 mod 3
    assert M.matvec(ker.codes[:, 0]).tolist() == [0, 0]
    assert ker.codes[:, 0].tolist() == [1, 1]


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 5),
    st.integers(1, 5),
    st.integers(0, 10**9),
    st.sampled_from([F3, F9, F5]),
)
def test_rref_rank_nullity_and_idempotence(rows, cols, seed, fld):
    rng = random.Random(seed)
    M = FieldMatrix(
        fld, np.array([[fld.random(rng).code for _ in range(cols)] for _ in range(rows)], dtype=np.int16)
    )
    rank, red, piv = linalg.rref(M)
    ker = linalg.kernel_basis(M)
    assert rank + ker.cols == cols
    for j in range(ker.cols):
        assert not np.any(M.matvec(ker.codes[:, j]))
    rank2, red2, piv2 = linalg.rref(red)
    assert red2 == red and piv2 == piv and rank2 == rank
    # determinism
    assert linalg.rref(M)[1] == red


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**9), st.sampled_from([F3, F9]))
def test_solve_cache_consistency(n, seed, fld):
    rng = random.Random(seed)
    M = FieldMatrix(
        fld, np.array([[fld.random(rng).code for _ in range(n)] for _ in range(n + 1)], dtype=np.int16)
    )
    x = np.array([fld.random(rng).code for _ in range(n)], dtype=np.int16)
    b = M.matvec(x)
    sc = linalg.SolveCache(M)
    sol = sc.solve(b)
    assert sol is not None
    assert np.array_equal(M.matvec(sol), b)


def test_matmul_matches_scalar_definition():
    rng = random.Random(3)
    A = FieldMatrix(F9, np.array([[F9.random(rng).code for _ in range(3)] for _ in range(2)], dtype=np.int16))
    B = FieldMatrix(F9, np.array([[F9.random(rng).code for _ in range(2)] for _ in range(3)], dtype=np.int16))
    C = A @ B
    for i in range(2):
        for j in range(2):
            acc = F9.zero
            for k in range(3):
                acc = acc + A[i, k] * B[k, j]
            assert C[i, j] == acc


def test_embedding_is_ring_hom_and_canonical():
    table = linalg.embed_table(F3, F9)
    assert table.tolist() == [0, 1, 2]
    t9 = linalg.embed_table(F9, field(3, 4))
    for a in F9.elements():
        for b in list(F9.elements())[::3]:
            ea = linalg.embed_element(a, field(3, 4))
            eb = linalg.embed_element(b, field(3, 4))
            assert linalg.embed_element(a * b, field(3, 4)) == ea * eb
            assert linalg.embed_element(a + b, field(3, 4)) == ea + eb
    with pytest.raises(ValueError):
        linalg.embed_table(F9, F27)  # 2 does not divide 3


def test_fieldspec_json():
    assert F9.to_json() == {"p": 3, "e": 2, "modulus": [1, 0, 1]}
