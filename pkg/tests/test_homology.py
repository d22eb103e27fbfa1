import itertools
import random

import numpy as np
import pytest

from superelem import homology as hm
from superelem import linalg, superalg
from superelem.superalg import catalog, include_w_minus, make_morphism, quotient_emn_minus


F3 = linalg.field(3)
F9 = linalg.field(3, 2)


def presentation_count(polys, exts, d, t):
    """Monomial count of bidegree (d, t) in a free graded-commutative ring
    with polynomial generators (s_i, t_i) and exterior generators; the stated
    oracle for the cohomology presentations."""
    count = 0
    ext_choices = list(itertools.product((0, 1), repeat=len(exts)))

    def poly_fill(i, left, tpar):
        nonlocal count
        if i == len(polys):
            if left == 0 and tpar % 2 == t:
                count += 1
            return
        s_i, t_i = polys[i]
        e = 0
        while e * s_i <= left:
            poly_fill(i + 1, left - e * s_i, tpar + e * t_i)
            e += 1

    for choice in ext_choices:
        used = sum(c * e[0] for c, e in zip(choice, exts))
        tp = sum(c * e[1] for c, e in zip(choice, exts))
        if used <= d:
            poly_fill(0, d - used, tp)
    return count


PRESENTATIONS = {
    # label -> (catalog args, polynomial gens, exterior gens)
    "Ga-": (("Ga_minus", {}), [(1, 1)], []),                      # k[zeta]
    "W21": (("W_m1", {"m": 2}), [(2, 0)], [(1, 0)]),              # k[x] (x) L(lambda)
    "W21-": (("W_m1_minus", {"m": 2}), [(2, 0), (1, 1)], []),     # k[x, zeta]/(zeta^2)...
    "E-(2,1)": (("E_mn_minus", {"m": 2, "n": 1}), [(2, 0), (1, 1)], [(1, 0)]),
    "E-(2,2)": (("E_mn_minus", {"m": 2, "n": 2}), [(2, 0), (2, 0), (1, 1)], [(1, 0), (1, 0)]),
    "E-(1,1,mu)": (("E_mn_mu_minus", {"m": 1, "n": 1, "mu": 1}), [(2, 0), (1, 1)], [(1, 0)]),
}


@pytest.mark.parametrize("key", list(PRESENTATIONS))
def test_ext_dims_match_presentation_oracle(key):
    (name, kw), polys, exts = PRESENTATIONS[key]
    A, _ = catalog(name, F3, **kw)
    dims = hm.ext_dims(A, 4)
    for d in dims:
        s = d["s"]
        if key == "W21-":
            # k[x, zeta]/(zeta^2): zeta exterior-like despite even total degree
            expected_even = presentation_count([(2, 0)], [(1, 1)], s, 0)
            expected_odd = presentation_count([(2, 0)], [(1, 1)], s, 1)
        else:
            expected_even = presentation_count(polys, exts, s, 0)
            expected_odd = presentation_count(polys, exts, s, 1)
        assert (d["even"], d["odd"]) == (expected_even, expected_odd), (key, s)


def test_degree1_generators_of_emn():
    for (m, n) in [(2, 1), (2, 2), (1, 2)]:
        A, _ = catalog("E_mn_minus", F3, m=m, n=n)
        res = hm.minimal_resolution(A, 1)
        assert res.gen_parities[1].count(0) == n  # the lambda classes
        assert res.gen_parities[1].count(1) == 1  # zeta


def test_resolution_invariants():
    for name, kw in [("E_mn_minus", {"m": 2, "n": 1}), ("W_m1_minus", {"m": 1}), ("Ga_r", {"r": 2})]:
        A, _ = catalog(name, F3, **kw)
        res = hm.minimal_resolution(A, 5)
        assert res.composes_to_zero(5)
        assert res.is_minimal(5)


def test_regular_trivial_radical_modules():
    A, _ = catalog("E_mn_minus", F3, m=2, n=1)
    reg = hm.regular_module(A)
    assert hm.validate_module(reg).passed
    assert hm.is_projective(reg)
    triv = hm.trivial_module(A)
    assert hm.validate_module(triv).passed
    assert not hm.is_projective(triv)
    rad = hm.radical_module(A)
    assert hm.validate_module(rad).passed
    assert not hm.is_projective(rad)
    G, _ = catalog("Ga_minus", F3)
    assert not hm.is_projective(hm.trivial_module(G))  # r=1, 1 != 2
    assert not hm.is_projective(hm.radical_module(G))  # dim 1 over dim-2 algebra


def test_validate_rejects_broken_action():
    A, _ = catalog("E_mn_minus", F3, m=1, n=1)
    reg = hm.regular_module(A)
    bad = hm.SuperModule(A, [np.eye(A.dim, dtype=np.int16), reg.action[1]], reg.parities)
    rep = hm.validate_module(bad)
    assert not rep.passed  # identity breaks the power rule s^p = 0


def test_restriction_functorial_and_free_over_subalgebra():
    A, _ = catalog("E_mn_minus", F3, m=2, n=1)
    reg = hm.regular_module(A)
    inc = include_w_minus(2, F3)
    res = hm.restrict_module(reg, inc)
    assert hm.validate_module(res).passed
    assert hm.is_projective(res)
    assert res.dim == 3 * inc.source.dim  # free of rank 3: basis 1, s, s^2
    ident = superalg.identity_morphism(A)
    same = hm.restrict_module(reg, ident)
    assert all(np.array_equal(a, b) for a, b in zip(same.action, reg.action))


def test_detect_projectivity_reports():
    A, _ = catalog("E_mn_minus", F3, m=2, n=1)
    inc = include_w_minus(2, F3)
    rep = hm.detect_projectivity(hm.regular_module(A), [inc])
    assert rep.all_pass and rep.per_embedding[0]["projective"]
    rep2 = hm.detect_projectivity(hm.trivial_module(A), [inc])
    assert not rep2.all_pass


def test_base_change_invariance():
    A, _ = catalog("E_mn_minus", F3, m=2, n=1)
    for mod in (hm.regular_module(A), hm.radical_module(A), hm.trivial_module(A)):
        assert hm.is_projective(mod) == hm.is_projective(hm.extend_scalars(mod, F9))


def test_yoneda_ring_structure():
    W11m, _ = catalog("W_m1_minus", F3, m=1)
    res = hm.minimal_resolution(W11m, 6)
    z = hm.zeta_class(res)
    assert hm.yoneda_product(z, z).is_zero()
    assert hm.nilpotence_order(z, 6, 6) == 2

    E11, _ = catalog("E_mn_minus", F3, m=1, n=1)
    res11 = hm.minimal_resolution(E11, 6)
    z11 = hm.zeta_class(res11)
    assert not hm.yoneda_product(z11, z11).is_zero()
    assert hm.nilpotence_order(z11, 5, 6) is None

    W21, _ = catalog("W_m1", F3, m=2)
    lam = hm.unique_class(hm.minimal_resolution(W21, 6), 1, 0)
    assert hm.nilpotence_order(lam, 6, 6) == 2

    one = hm.unique_class(res11, 0, 0)
    assert np.array_equal(hm.yoneda_product(one, z11).coords, z11.coords)
    assert np.array_equal(hm.yoneda_product(z11, one).coords, z11.coords)


def test_yoneda_sign_rule():
    """Coordinates of xi.eta and (-1)^(mn+ab) eta.xi agree, for all sampled
    homogeneous classes over kE-(2,1)."""
    A, _ = catalog("E_mn_minus", F3, m=2, n=1)
    res = hm.minimal_resolution(A, 6)
    classes = []
    for s in (1, 2):
        for t in (0, 1):
            for j in range(len(res.generator_indices(s, t))):
                coords = np.zeros(len(res.generator_indices(s, t)), dtype=np.int16)
                coords[j] = 1
                classes.append(hm.ExtElement(res, s, t, coords))
    p = 3
    for xi in classes:
        for eta in classes:
            ab = hm.yoneda_product(xi, eta)
            ba = hm.yoneda_product(eta, xi)
            sign = (-1) ** (xi.s * eta.s + xi.t * eta.t)
            expected = ba.coords if sign == 1 else (-ba.coords) % p
            assert np.array_equal(ab.coords, expected), (xi, eta)


def test_yoneda_associative_sampled():
    A, _ = catalog("E_mn_minus", F3, m=2, n=1)
    res = hm.minimal_resolution(A, 6)
    z = hm.zeta_class(res)
    lam = hm.unique_class(res, 1, 0)
    x = hm.xhat_class(A)
    for a, b, c in [(z, lam, z), (lam, z, z), (x, z, z), (z, z, z)]:
        left = hm.yoneda_product(hm.yoneda_product(a, b), c)
        right = hm.yoneda_product(a, hm.yoneda_product(b, c))
        assert left.s == right.s and left.t == right.t
        assert np.array_equal(left.coords, right.coords)


def test_induced_map_identity():
    A, _ = catalog("E_mn_minus", F3, m=1, n=1)
    mats = hm.induced_ext_map(superalg.identity_morphism(A), 3)
    for s, mat in enumerate(mats):
        assert np.array_equal(mat, np.eye(mat.shape[0], dtype=np.int16) % 3), s


def test_induced_map_composite_along_the_E_chain():
    f32 = quotient_emn_minus(3, 1, F3)
    f21 = quotient_emn_minus(2, 1, F3)
    comp = superalg.compose(f21, f32)
    smax = 3
    m1 = hm.induced_ext_map(f32, smax)
    m2 = hm.induced_ext_map(f21, smax)
    mc = hm.induced_ext_map(comp, smax)
    for s in range(smax + 1):
        lhs = (m1[s].astype(np.int64) @ m2[s].astype(np.int64)) % 3
        assert np.array_equal(lhs.astype(np.int16), mc[s]), s


def test_induced_map_well_defined_under_solver_change():
    phi = quotient_emn_minus(2, 1, F3)
    a = hm.induced_ext_map(phi, 3)
    b = hm.induced_ext_map(phi, 3, flip_solver=True)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_inflation_kernel_e21_e11():
    """Theorem-8.5 shape: the degree-(2,0) inflation kernel along
    kE-(2,1) ->> kE-(1,1) is one-dimensional, spanned by zeta^2 - gamma*xhat
    with gamma a unit.  gamma = -1 in the composition-product convention used
    here (frozen); the identification dictionary absorbs it."""
    E21, _ = catalog("E_mn_minus", F3, m=2, n=1)
    E11, _ = catalog("E_mn_minus", F3, m=1, n=1)
    phi = quotient_emn_minus(2, 1, F3)
    mats = hm.induced_ext_map(phi, 2)
    res_a = hm.minimal_resolution(E21, 2)
    res_b = hm.minimal_resolution(E11, 4)
    block = hm.induced_map_on_bidegree(mats, res_a, res_b, 2, 0)
    kern = linalg.kernel_basis(linalg.FieldMatrix(F3, block))
    assert kern.cols == 1
    kv = kern.codes[:, 0]
    z2 = hm.yoneda_product(hm.zeta_class(res_b), hm.zeta_class(res_b))
    xh = hm.xhat_class(E11)
    gamma = None
    for g in (1, 2):
        cand = (z2.coords - g * xh.coords) % 3
        if any(np.array_equal((c * cand) % 3, kv) for c in (1, 2)):
            gamma = g
    assert gamma is not None, "kernel is not of the shape zeta^2 - gamma*x"
    assert gamma == 2  # frozen: -1 mod 3
    # degree-1 inflation is injective
    for t in (0, 1):
        blk = hm.induced_map_on_bidegree(mats, res_a, res_b, 1, t)
        assert linalg.rref(linalg.FieldMatrix(F3, blk))[0] == blk.shape[1]


def test_inflation_kills_x_at_higher_m():
    """Along kE-(3,1) ->> kE-(2,1): x is killed, zeta^2 survives."""
    E31, _ = catalog("E_mn_minus", F3, m=3, n=1)
    E21, _ = catalog("E_mn_minus", F3, m=2, n=1)
    phi = quotient_emn_minus(3, 1, F3)
    mats = hm.induced_ext_map(phi, 2)
    res_a = hm.minimal_resolution(E31, 2)
    res_b = hm.minimal_resolution(E21, 4)
    block = hm.induced_map_on_bidegree(mats, res_a, res_b, 2, 0)
    kern = linalg.kernel_basis(linalg.FieldMatrix(F3, block))
    assert kern.cols == 1
    xh = hm.xhat_class(E21)
    kv = kern.codes[:, 0]
    assert any(np.array_equal((c * xh.coords) % 3, kv) for c in (1, 2))
    for t in (0, 1):
        blk = hm.induced_map_on_bidegree(mats, res_a, res_b, 1, t)
        assert linalg.rref(linalg.FieldMatrix(F3, blk))[0] == blk.shape[1]


def test_identify_classes_reports_dictionary():
    A, _ = catalog("E_mn_minus", F3, m=2, n=1)
    ident = hm.identify_classes(A)
    assert ident["zeta"]["coords"] == [1]
    assert len(ident["lambda"]) == 1
    assert "x" in ident


def test_xhat_restricts_to_w_generator():
    A, _ = catalog("E_mn_minus", F3, m=2, n=1)
    xh = hm.xhat_class(A)
    W, _ = catalog("W_m1", F3, m=2)
    inc = make_morphism(W, A, {"s": A.gen_el("s1")})
    mats = hm.induced_ext_map(inc, 2)
    res_w = hm.minimal_resolution(W, 2)
    res_a = hm.minimal_resolution(A, 2)
    blk = hm.induced_map_on_bidegree(mats, res_w, res_a, 2, 0)
    out = (blk.astype(np.int64) @ xh.coords.astype(np.int64)) % 3
    assert out.tolist() == [1]
