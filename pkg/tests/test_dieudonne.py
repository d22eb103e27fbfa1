import random

import numpy as np
import pytest

from superelem import dieudonne as dd
from superelem import linalg, superalg
from superelem.dieudonne import (
    GuardExceeded,
    KochLabel,
    brute_force_iso,
    build_label,
    build_Mmn,
    build_Mmnmu,
    canonical_mu,
    enumerate_cyclic_quotients,
    koch_iso_test,
    label_to_algebra,
    validate_module,
)


F3 = linalg.field(3)
F9 = linalg.field(3, 2)
F27 = linalg.field(3, 3)


def all_labels(fld, maxsum):
    labs = []
    for m in range(1, maxsum):
        for n in range(1, maxsum - m + 1):
            labs.append(KochLabel("Mmn", m, n))
            for mu in range(1, fld.q):
                labs.append(KochLabel("Mmnmu", m, n, mu))
    return labs


def test_build_mmn_shapes():
    assert build_Mmn(1, 1, F3).dim == 1
    m22 = build_Mmn(2, 2, F3)
    assert m22.dim == 3
    m31 = build_Mmn(3, 1, F3)
    assert m31.dim == 3 and m31.F_mat.is_zero()
    # V is a single Jordan shift on M(3,1)
    v = m31.V_mat.codes
    assert v.tolist() == [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert build_Mmn(1, 1, F3).V_mat.is_zero()


def test_build_mmnmu_shapes_and_socle():
    with pytest.raises(ValueError):
        build_Mmnmu(1, 1, 0, F3)
    m = build_Mmnmu(1, 1, 1, F3)
    assert m.dim == 2
    # F g = mu V g != 0
    g = m.generator
    assert np.any(m.apply_F(g)) and np.array_equal(m.apply_F(g), m.apply_V(g))
    for mm in (1, 2, 3):
        for nn in (1, 2, 3):
            for mu in (1, 2):
                M = build_Mmnmu(mm, nn, mu, F3)
                assert M.dim == mm + nn
                assert validate_module(M).passed
                stacked = np.concatenate([M.op_matrix("V").codes, M.op_matrix("F").codes])
                kern = linalg.kernel_basis(linalg.FieldMatrix(F3, stacked))
                assert kern.cols == 1  # socle is one-dimensional


def test_validate_catches_broken_modules():
    M = build_Mmn(2, 2, F3)
    bad = dd.SemilinearModule(F3, M.V_mat, linalg.FieldMatrix.identity(F3, 3), M.generator, M.label)
    rep = validate_module(bad)
    assert not rep.passed and rep.first_failure() is not None
    rng = random.Random(0)
    hits = 0
    for _ in range(20):
        V = linalg.FieldMatrix(F3, np.array([[rng.randrange(3) for _ in range(3)] for _ in range(3)], dtype=np.int16))
        F = linalg.FieldMatrix(F3, np.array([[rng.randrange(3) for _ in range(3)] for _ in range(3)], dtype=np.int16))
        r = validate_module(dd.SemilinearModule(F3, V, F))
        if not r.passed:
            hits += 1
            assert r.failures[0]
    assert hits > 10  # random matrices essentially never satisfy the relations


def test_koch_self_and_kind_mismatch():
    a = KochLabel("Mmn", 2, 1)
    b = KochLabel("Mmnmu", 2, 1, 1)
    assert koch_iso_test(a, a, F3)
    assert not koch_iso_test(a, b, F3)
    assert not koch_iso_test(a, KochLabel("Mmn", 1, 2), F3)


def test_remark_a3_prime_field():
    """Over F_p the power-map criterion degenerates to mu = mu'."""
    for m, n in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        for mu1 in (1, 2):
            for mu2 in (1, 2):
                expected = mu1 == mu2
                got = koch_iso_test(
                    KochLabel("Mmnmu", m, n, mu1), KochLabel("Mmnmu", m, n, mu2), F3
                )
                assert got == expected


def test_power_image_examples_f27_f9():
    g27 = F27.gen()
    assert not koch_iso_test(
        KochLabel("Mmnmu", 1, 2, 1), KochLabel("Mmnmu", 1, 2, g27.code), F27
    )
    g9 = F9.gen()
    sq = (g9 * g9).code
    assert koch_iso_test(KochLabel("Mmnmu", 1, 2, sq), KochLabel("Mmnmu", 1, 2, 1), F9)


def test_brute_force_guard():
    with pytest.raises(GuardExceeded):
        brute_force_iso(build_Mmn(4, 3, F3), build_Mmn(4, 3, F3))


def test_brute_force_basics():
    M = build_Mmnmu(1, 1, 1, F3)
    assert brute_force_iso(M, build_Mmnmu(1, 1, 1, F3))
    assert not brute_force_iso(M, build_Mmnmu(1, 1, 2, F3))
    assert not brute_force_iso(build_Mmn(1, 1, F3), build_Mmn(2, 1, F3))


@pytest.mark.parametrize("fld", [F3, F9])
def test_koch_matches_brute_force(fld):
    labs = all_labels(fld, 4)
    mods = {l: build_label(l, fld) for l in labs}
    for i, l1 in enumerate(labs):
        for l2 in labs[i:]:
            k = koch_iso_test(l1, l2, fld)
            if mods[l1].dim != mods[l2].dim:
                assert not k
                continue
            assert k == brute_force_iso(mods[l1], mods[l2]), (str(l1), str(l2))


def test_enumerate_m1n1():
    out = enumerate_cyclic_quotients(1, 1, F3)
    assert dict(out) == {KochLabel("Mmn", 1, 1): 1}


def test_enumerate_m2n1_frozen():
    """Regression fixture from the oracle run: F = 0 on M(2,1), so no
    mu-labels can occur among its quotients."""
    out = enumerate_cyclic_quotients(2, 1, F3)
    assert dict(out) == {KochLabel("Mmn", 2, 1): 1, KochLabel("Mmn", 1, 1): 1}


def test_enumerate_m2n2_all_classifiable_and_bounded():
    out = enumerate_cyclic_quotients(2, 2, F3)
    assert sum(out.values()) >= 4
    for label in out:
        assert label.m <= 2 and label.n <= 2
        if label.kind == "Mmnmu":
            assert label.m <= 1 and label.n <= 1
    # both mu classes over F_3 appear
    assert out[KochLabel("Mmnmu", 1, 1, 1)] == 1
    assert out[KochLabel("Mmnmu", 1, 1, 2)] == 1


@pytest.mark.parametrize("mn", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)])
def test_enumerated_labels_agree_with_brute_force(mn):
    """Chain-length classification cross-checked against the oracle: rebuild
    each quotient and compare with the constructed label module."""
    m, n = mn
    fld = F3
    M = dd.build_Mmn(m, n, fld)
    from superelem.dieudonne import _classify_cyclic, _reduce_against, _subspaces
    from superelem.linalg import FieldMatrix

    checked = 0
    for rows, pivots in _subspaces(fld, M.dim):
        k = rows.shape[0]
        if k == M.dim:
            continue
        closed = all(
            not np.any(_reduce_against(fld, rows, pivots, img))
            for r in range(k)
            for img in (M.apply_V(rows[r]), M.apply_F(rows[r]))
        )
        if not closed:
            continue
        free = [c for c in range(M.dim) if c not in pivots]
        proj = np.zeros((len(free), M.dim), dtype=np.int16)
        for j in range(M.dim):
            e = np.zeros(M.dim, dtype=np.int16)
            e[j] = 1
            proj[:, j] = _reduce_against(fld, rows, pivots, e)[free]
        lift = np.zeros((M.dim, len(free)), dtype=np.int16)
        for i, c in enumerate(free):
            lift[c, i] = 1
        projM, liftM = FieldMatrix(fld, proj), FieldMatrix(fld, lift)
        Q = dd.SemilinearModule(
            fld,
            projM @ M.V_mat @ liftM.entrywise_frobenius(-1),
            projM @ M.F_mat @ liftM.entrywise_frobenius(1),
            projM.matvec(M.generator),
        )
        label = _classify_cyclic(Q)
        assert brute_force_iso(Q, build_label(label, fld)), (mn, str(label))
        checked += 1
    assert checked >= 1


def test_canonical_mu():
    lab = KochLabel("Mmnmu", 1, 2, (F9.gen() ** 2).code)
    canon = canonical_mu(lab, F9)
    assert koch_iso_test(lab, canon, F9)
    assert canon.mu <= lab.mu


def test_label_to_algebra():
    A, H = label_to_algebra(KochLabel("Mmn", 1, 1), F3)
    assert A.dim == 3  # k[s]/(s^p)
    A2, _ = label_to_algebra(KochLabel("Mmn", 3, 1), F3)
    assert A2.dim == 27 and A2.generators[0].bound == 27  # k[s]/(s^(p^m))
    for m, n in [(1, 1), (2, 1), (1, 2), (2, 2)]:
        A3, _ = label_to_algebra(KochLabel("Mmn", m, n), F3)
        assert A3.dim == 3 ** (m + n - 1)
        A4, H4 = label_to_algebra(KochLabel("Mmnmu", m, n, 2), F3)
        assert A4.dim == 3 ** (m + n)
        assert superalg.hopf_check(A4, H4).passed


def test_enumeration_guard():
    with pytest.raises(GuardExceeded):
        enumerate_cyclic_quotients(4, 3, F3)
