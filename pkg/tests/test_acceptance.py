"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v`` to get one PASS/FAIL line per
criterion.  Each test also asserts its stated runtime budget."""

import itertools
import json
import time
from pathlib import Path

import numpy as np
import pytest

from superelem import cli, dieudonne as dd, homology as hm, linalg, steenrod as st, superalg, witt
from superelem.steenrod import apply_op, parse_element
from superelem.superalg import catalog
from superelem.witt import IntPolynomial, build_witt_table


F3 = linalg.field(3)
F9 = linalg.field(3, 2)
FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


class Budget:
    def __init__(self, seconds: float):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        if exc[0] is None:
            elapsed = time.perf_counter() - self.t0
            assert elapsed < self.seconds, f"runtime {elapsed:.1f}s exceeds budget {self.seconds}s"


def test_criterion_01_witt_polynomial_identities():
    """p in {3,5}, n <= 3: w_i(S)=w_i(X)+w_i(Y), w_i(P)=w_i(X)w_i(Y),
    w_i(N)=-w_i(Z) exactly; S_0, S_1, P_0, P_1 in the printed closed forms
    (S_1 with the ghost-consistent carry sign; the printed '+' sign
    contradicts the defining identity, see the decisions ledger)."""
    with Budget(10):
        for p in (3, 5):
            t = build_witt_table(3, p)
            for kind in "SPN":
                for i in range(4):
                    assert witt.verify_ghost_identity(t, kind, i), (p, kind, i)
            v0 = ("X0", "Y0")
            assert t.S[0] == IntPolynomial.from_terms(v0, [((1, 0), 1), ((0, 1), 1)])
            assert t.P[0] == IntPolynomial.from_terms(v0, [((1, 1), 1)])
            v1 = ("X0", "X1", "Y0", "Y1")
            x0, x1, y0, y1 = (IntPolynomial.variable(v1, i) for i in range(4))
            carry = ((x0 + y0) ** p - x0**p - y0**p).divide_exact(p)
            assert t.S[1] == x1 + y1 - carry
            assert t.P[1] == (x1 * y1).scale(p) + x0**p * y1 + x1 * y0**p


def test_criterion_02_witt_operator_laws():
    """1000 randomized trials on W_4(F_9) of FV = VF = p, V x^sigma = x V,
    F x = x^sigma F; exhaustive cyclicity of (W_2(F_3), +)."""
    with Budget(10):
        W4 = witt.witt_ring(F9, 4)
        rng = np.random.default_rng(20240902)
        n = 1000
        U = rng.integers(0, 9, size=(n, 4)).astype(np.int16)
        X = rng.integers(0, 9, size=(n, 4)).astype(np.int16)
        pU = W4.add_batch(W4.add_batch(U, U), U)
        assert np.array_equal(W4.frobenius_batch(W4.verschiebung_batch(U)), pU)
        assert np.array_equal(W4.verschiebung_batch(W4.frobenius_batch(U)), pU)
        Xs = W4.frobenius_batch(X)
        assert np.array_equal(
            W4.verschiebung_batch(W4.mul_batch(Xs, U)),
            W4.mul_batch(X, W4.verschiebung_batch(U)),
        )
        assert np.array_equal(
            W4.frobenius_batch(W4.mul_batch(X, U)),
            W4.mul_batch(Xs, W4.frobenius_batch(U)),
        )
        W2 = witt.witt_ring(F3, 2)
        u = W2.vector([1, 0])
        acc, seen = W2.zero, set()
        for _ in range(9):
            seen.add(acc.codes)
            acc = acc + u
        assert len(seen) == 9 and acc.codes == (0, 0)


def test_criterion_03_koch_classification():
    """enumerate_cyclic_quotients within m+n <= 4 over F_3 yields only
    Theorem-A.2 labels; koch_iso_test == brute_force_iso on every label pair
    with m+n <= 4 over F_3 and F_9; over F_3 distinct mu are never
    isomorphic."""
    with Budget(120):
        for m in range(1, 4):
            for n in range(1, 5 - m):
                out = dd.enumerate_cyclic_quotients(m, n, F3)
                assert sum(out.values()) >= 1
                for label in out:
                    if label.kind == "Mmn":
                        assert 1 <= label.m <= m and 1 <= label.n <= n
                    else:
                        assert 1 <= label.m <= m - 1 and 1 <= label.n <= n - 1
                        assert label.mu != 0
        for fld in (F3, F9):
            labs = []
            for m in range(1, 4):
                for n in range(1, 5 - m):
                    labs.append(dd.KochLabel("Mmn", m, n))
                    labs.extend(
                        dd.KochLabel("Mmnmu", m, n, mu) for mu in range(1, fld.q)
                    )
            mods = {l: dd.build_label(l, fld) for l in labs}
            for i, l1 in enumerate(labs):
                for l2 in labs[i:]:
                    k = dd.koch_iso_test(l1, l2, fld)
                    if mods[l1].dim != mods[l2].dim:
                        assert not k
                    else:
                        assert k == dd.brute_force_iso(mods[l1], mods[l2]), (str(l1), str(l2))
        for m, n in [(1, 1), (2, 2)]:
            assert not dd.koch_iso_test(
                dd.KochLabel("Mmnmu", m, n, 1), dd.KochLabel("Mmnmu", m, n, 2), F3
            )


def test_criterion_04_hopf_axioms():
    """hopf_check passes for every catalog entry with coproduct data at
    p = 3, m, n <= 2, with mu over F_3^x and F_9^x."""
    with Budget(120):
        for fld in (F3, F9):
            entries = [("Ga_minus", {}), ("Ga_r", {"r": 1}), ("Ga_r", {"r": 2})]
            entries += [("W_m1", {"m": m}) for m in (1, 2)]
            entries += [("W_m1_minus", {"m": m}) for m in (1, 2)]
            entries += [("E_mn", {"m": m, "n": n}) for m in (1, 2) for n in (1, 2)]
            entries += [("E_mn_minus", {"m": m, "n": n}) for m in (1, 2) for n in (1, 2)]
            entries += [
                ("E_mn_mu_minus", {"m": m, "n": n, "mu": mu})
                for m in (1, 2)
                for n in (1, 2)
                for mu in range(1, fld.q)
            ]
            for name, kw in entries:
                A, H = catalog(name, fld, **kw)
                report = superalg.hopf_check(A, H)
                assert report.passed, (fld.q, name, kw, report.failures)


def _presentation_split(polys, exts, d):
    even = odd = 0
    for choice in itertools.product((0, 1), repeat=len(exts)):
        used = sum(c * e[0] for c, e in zip(choice, exts))
        tp = sum(c * e[1] for c, e in zip(choice, exts))
        if used > d:
            continue
        stack = [(0, d - used, tp)]
        while stack:
            i, left, t = stack.pop()
            if i == len(polys):
                if left == 0:
                    if t % 2:
                        odd += 1
                    else:
                        even += 1
                continue
            s_i, t_i = polys[i]
            e = 0
            while e * s_i <= left:
                stack.append((i + 1, left - e * s_i, t + e * t_i))
                e += 1
    return even, odd


def test_criterion_05_cohomology_dimension_tables():
    """Ext dimensions with parity split match the presentation monomial
    counts for s <= 6 at p = 3."""
    with Budget(300):
        cases = [
            (("Ga_minus", {}), [(1, 1)], [], None),
            (("W_m1", {"m": 2}), [(2, 0)], [(1, 0)], None),
            (("W_m1_minus", {"m": 2}), [(2, 0)], [(1, 1)], None),  # zeta^2 = 0
            (("E_mn_minus", {"m": 2, "n": 1}), [(2, 0), (1, 1)], [(1, 0)], lambda d: d + 1),
            (
                ("E_mn_minus", {"m": 2, "n": 2}),
                [(2, 0), (2, 0), (1, 1)],
                [(1, 0), (1, 0)],
                lambda d: (d + 2) * (d + 1) // 2,
            ),
            (("E_mn_mu_minus", {"m": 1, "n": 1, "mu": 1}), [(2, 0), (1, 1)], [(1, 0)], lambda d: d + 1),
            (("E_mn_mu_minus", {"m": 1, "n": 1, "mu": 2}), [(2, 0), (1, 1)], [(1, 0)], lambda d: d + 1),
        ]
        for (name, kw), polys, exts, closed_form in cases:
            A, _ = catalog(name, F3, **kw)
            dims = hm.ext_dims(A, 6)
            for row in dims:
                s = row["s"]
                ev, od = _presentation_split(polys, exts, s)
                assert (row["even"], row["odd"]) == (ev, od), (name, kw, s)
                if closed_form is not None:
                    assert row["total"] == closed_form(s)
                if name in ("Ga_minus",) or name.startswith("W_m1"):
                    assert row["total"] == 1
            if name == "W_m1_minus":
                for row in dims:
                    pari = 1 if row["s"] % 2 else 0
                    assert (row["odd"] if pari else row["even"]) == 1


def test_criterion_06_yoneda_ring_spot_checks():
    """zeta^2 = 0 over kW-(1,1); zeta^2 != 0 over kE-(1,1); the (2,0)
    inflation kernel along kE-(2,1) ->> kE-(1,1) is one-dimensional and, in
    the identified basis, spanned by zeta^2 - x_1 (here x_1 = gamma*xhat with
    the frozen unit gamma = -1 absorbed into the dictionary; see ledger)."""
    with Budget(120):
        W11m, _ = catalog("W_m1_minus", F3, m=1)
        resw = hm.minimal_resolution(W11m, 4)
        zw = hm.zeta_class(resw)
        assert hm.yoneda_product(zw, zw).is_zero()

        E11, _ = catalog("E_mn_minus", F3, m=1, n=1)
        res11 = hm.minimal_resolution(E11, 4)
        z11 = hm.zeta_class(res11)
        assert not hm.yoneda_product(z11, z11).is_zero()

        E21, _ = catalog("E_mn_minus", F3, m=2, n=1)
        phi = superalg.quotient_emn_minus(2, 1, F3)
        mats = hm.induced_ext_map(phi, 2)
        res21 = hm.minimal_resolution(E21, 2)
        block = hm.induced_map_on_bidegree(mats, res21, res11, 2, 0)
        kern = linalg.kernel_basis(linalg.FieldMatrix(F3, block))
        assert kern.cols == 1
        kv = kern.codes[:, 0]
        zsq = hm.yoneda_product(z11, z11)
        xh = hm.xhat_class(E11)
        gamma = 2  # frozen: -1 mod 3 in the composition-product convention
        x1 = (gamma * xh.coords) % 3
        target = (zsq.coords - x1) % 3
        assert any(np.array_equal((c * target) % 3, kv) for c in (1, 2))


def test_criterion_07_projectivity_engine():
    with Budget(60):
        A, _ = catalog("E_mn_minus", F3, m=2, n=1)
        reg = hm.regular_module(A)
        assert hm.is_projective(reg)
        assert not hm.is_projective(hm.trivial_module(A))
        syz = hm.radical_module(A)  # first syzygy of k
        assert not hm.is_projective(syz)
        inc = superalg.include_w_minus(2, F3)
        restricted = hm.restrict_module(reg, inc)
        assert hm.is_projective(restricted)
        assert restricted.dim == 3 * inc.source.dim  # free of rank 3
        for mod in (reg, syz, hm.trivial_module(A)):
            assert hm.is_projective(mod) == hm.is_projective(hm.extend_scalars(mod, F9))


def test_criterion_08_steenrod_tables():
    """Every entry of the printed operation tables reproduced by apply_op,
    and the Cartan values P^0(zeta^2) = 0, P^1(zeta^2) = zeta^(2p)."""
    with Budget(10):
        R = st.standard_ring(2, 2, 1, F3)
        table1 = [
            ("P", 0, "l1", "l2"),
            ("P", 0, "l2", "0"),
            ("betaP", 0, "l1", "-x1"),
            ("betaP", 0, "l2", "-x2"),
            ("P", 2, "l1", "0"),
            ("P", 4, "l1", "0"),
            ("betaP", 2, "l1", "0"),
            ("P", 0, "y1", "y1"),
            ("betaP", 0, "y1", "z1"),
            ("P", 2, "y1", "0"),
            ("betaP", 2, "y1", "0"),
            ("P", 1, "zeta", "zeta^3"),
            ("betaP", 1, "zeta", "0"),
            ("P", 0, "x1", "x2"),
            ("P", 0, "x2", "0"),
            ("betaP", 0, "x1", "0"),
            ("P", 2, "x1", "x1^3"),
            ("P", 4, "x1", "0"),
            ("betaP", 2, "x1", "0"),
            ("P", 0, "z1", "z1"),
            ("betaP", 0, "z1", "0"),
            ("P", 2, "z1", "z1^3"),
            ("P", 4, "z1", "0"),
            ("betaP", 2, "z1", "0"),
        ]
        for op, i2, expr, expect in table1:
            got = apply_op(R, op, i2, parse_element(R, expr))
            want = R.zero() if expect == "0" else parse_element(R, expect)
            assert got == want, ("table1", op, i2, expr, repr(got))
        E = st.emn_ring(2, 2, F3)
        emn_table = [
            ("P", 0, "l1", "l2"),
            ("betaP", 0, "l1", "-x1"),
            ("P", 0, "l2", "0"),
            ("betaP", 0, "l2", "-zeta^2"),
            ("P", 1, "zeta", "zeta^3"),
            ("betaP", 1, "zeta", "0"),
            ("P", 0, "x1", "x2"),
            ("betaP", 0, "x1", "0"),
            ("P", 2, "x1", "x1^3"),
            ("P", 0, "x2", "0"),
            ("betaP", 0, "x2", "0"),
            ("P", 2, "x2", "0"),
        ]
        for op, i2, expr, expect in emn_table:
            got = apply_op(E, op, i2, parse_element(E, expr))
            want = E.zero() if expect == "0" else parse_element(E, expect)
            assert got == want, ("emn", op, i2, expr, repr(got))
        assert apply_op(R, "P", 0, parse_element(R, "zeta^2")).is_zero()
        assert apply_op(R, "P", 2, parse_element(R, "zeta^2")) == parse_element(R, "zeta^6")


def _fixture_matches(rel: str, cmd: list[str]) -> bool:
    return (FIXTURES / rel).read_text() == cli._capture(cmd)


def test_criterion_09_theorem_b36_dichotomy_and_serre():
    """Desk-scale saturations (bound 2 p^2 = 18) classify as predicted and
    byte-match the committed fixtures."""
    with Budget(300):
        R1 = st.standard_ring(1, 0, 1, F3)
        for gamma in (1, 2):
            sat = st.saturate(R1, [parse_element(R1, f"zeta^2 + {gamma}*x1")], 18)
            assert sat.slice_dim(2, 0) == 1
            v = st.classify_b36(R1, sat, 1, 0)
            assert v.case == "ii"
            assert sat.verify_stable()
        R20 = st.standard_ring(2, 0, 0, F3)
        sat = st.saturate(R20, [parse_element(R20, "l1*l2")], 18)
        v = st.classify_b36(R20, sat, 2, 0)
        assert v.case == "i" and v.detail == {"n": 4, "factors": []}
        R01 = st.standard_ring(0, 1, 0, F3)
        v2 = st.classify_b36(R01, st.saturate(R01, [R01.gen("z1")], 18), 0, 1)
        assert v2.case == "i" and v2.detail["factors"] == [[1]]
        R02 = st.standard_ring(0, 2, 0, F3)
        assert st.serre_check(1, R01.gen("z1"), 12).found
        assert st.serre_check(2, parse_element(R02, "z1 + z2"), 12).factors == [[1, 1]]
        y1y2 = st.serre_check(2, parse_element(R02, "y1*y2"), 12)
        assert y1y2.found and len(y1y2.factors) == 2
        for rel, cmd in cli._fixture_plan():
            if rel.startswith(("steenrod_classify", "steenrod_serre")):
                assert _fixture_matches(rel, cmd), rel


def test_criterion_10_folding():
    """fold(z_lift(m,n,a)) is structurally identical to the catalog
    kE-(m,n) for m, n <= 2 and a in {1, 3}."""
    with Budget(5):
        for m in (1, 2):
            for n in (1, 2):
                for a in (1, 3):
                    L, HL = superalg.z_lift_emn(m, n, a, F3)
                    Fd, HF = superalg.fold(L, HL)
                    E, HE = catalog("E_mn_minus", F3, m=m, n=n)
                    assert superalg.structurally_equal(Fd, E, HF, HE), (m, n, a)
                    sig = dict((g.name, g.zdegree) for g in L.generators)["sigma"]
                    assert sig == a * 3**n and sig % 2 == 1
