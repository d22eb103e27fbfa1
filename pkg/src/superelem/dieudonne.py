"""Finite-length p-killed Dieudonne modules as semilinear-operator spaces.

A module carries two matrices: V acts as ``v -> V_mat . frob^(-1)(v)``
(sigma^(-1)-semilinear) and F as ``v -> F_mat . frob(v)`` (sigma-semilinear),
with F V = V F = 0 since everything in scope is killed by p.  The cyclic
modules M_(m,n) and M_(m,n,mu) of the classification are built explicitly;
``koch_iso_test`` decides isomorphism by the power-map criterion
``mu/mu' = a^(p^(m+n)-1)`` and ``brute_force_iso`` is its independent oracle
(an exhaustive generator-image search)."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import superalg
from .linalg import FieldMatrix, FieldSpec, _rref_codes

_ISO_DIM_GUARD = 5
_ISO_Q_GUARD = 9


class GuardExceeded(ValueError):
    """A brute-force search was asked to run outside its feasibility guard."""


@dataclass(frozen=True)
class KochLabel:
    kind: str  # "Mmn" or "Mmnmu"
    m: int
    n: int
    mu: Optional[int] = None  # element code; required (nonzero) for Mmnmu

    def __post_init__(self):
        if self.kind not in ("Mmn", "Mmnmu"):
            raise ValueError("kind must be Mmn or Mmnmu")
        if self.m < 1 or self.n < 1:
            raise ValueError("m, n must be >= 1")
        if self.kind == "Mmnmu" and not self.mu:
            raise ValueError("mu must be nonzero for Mmnmu")

    @property
    def dim(self) -> int:
        return self.m + self.n - (1 if self.kind == "Mmn" else 0)

    def __str__(self):
        if self.kind == "Mmn":
            return f"M({self.m},{self.n})"
        return f"M({self.m},{self.n},mu={self.mu})"


class SemilinearModule:
    """d-dimensional k-space with sigma-semilinear F and sigma^(-1)-semilinear V."""

    def __init__(
        self,
        fld: FieldSpec,
        V_mat: FieldMatrix,
        F_mat: FieldMatrix,
        generator: Optional[np.ndarray] = None,
        label: Optional[KochLabel] = None,
    ):
        if V_mat.rows != V_mat.cols or F_mat.rows != F_mat.cols or V_mat.rows != F_mat.rows:
            raise ValueError("V and F must be square of equal size")
        self.field = fld
        self.dim = V_mat.rows
        self.V_mat = V_mat
        self.F_mat = F_mat
        self.generator = None if generator is None else np.asarray(generator, dtype=np.int16)
        self.label = label

    # operators -----------------------------------------------------------------

    def apply_V(self, v: np.ndarray) -> np.ndarray:
        t = self.field.tables
        return self.V_mat.matvec(t.frob_pows[-1 % self.field.e][v] if self.field.e > 1 else v)

    def apply_F(self, v: np.ndarray) -> np.ndarray:
        t = self.field.tables
        return self.F_mat.matvec(t.frob[v])

    def op_matrix(self, word: str) -> FieldMatrix:
        """Matrix of the composite operator given by a word in 'V','F' (left
        factor applied last), with all Frobenius twists pushed onto the
        matrices: the operator acts as  mat . frob^k(v)  for the appropriate k."""
        mat = FieldMatrix.identity(self.field, self.dim)
        twist = 0
        for ch in reversed(word):
            step, k = (self.V_mat, -1) if ch == "V" else (self.F_mat, 1)
            # operator = step . frob^k( current )
            mat = step @ mat.entrywise_frobenius(k)
            twist += k
        return mat

    def operator_is_zero(self, word: str) -> bool:
        return self.op_matrix(word).is_zero()

    def __repr__(self):
        lab = f" [{self.label}]" if self.label else ""
        return f"SemilinearModule(dim {self.dim} over F_{self.field.q}){lab}"


def build_Mmn(m: int, n: int, fld: FieldSpec) -> SemilinearModule:
    """M_(m,n) = D/(V^m, F^n, p), cyclic of dimension m+n-1 with basis
    V^(m-1)g, ..., Vg, g, Fg, ..., F^(n-1)g."""
    if m < 1 or n < 1:
        raise ValueError("m, n must be >= 1")
    d = m + n - 1
    V = np.zeros((d, d), dtype=np.int16)
    F = np.zeros((d, d), dtype=np.int16)
    for i in range(1, m):
        V[i - 1, i] = 1  # V: e_i -> e_(i-1) on the V-chain
    for j in range(m - 1, m + n - 2):
        F[j + 1, j] = 1  # F: e_j -> e_(j+1) along g, Fg, ...
    gen = np.zeros(d, dtype=np.int16)
    gen[m - 1] = 1
    return SemilinearModule(
        fld, FieldMatrix(fld, V), FieldMatrix(fld, F), gen, KochLabel("Mmn", m, n)
    )


def build_Mmnmu(m: int, n: int, mu, fld: FieldSpec) -> SemilinearModule:
    """M_(m,n,mu) = D/(F^n - mu V^m, p), cyclic of dimension m+n with basis
    V^m g, ..., Vg, g, Fg, ..., F^(n-1)g and the relation F^n g = mu V^m g."""
    if m < 1 or n < 1:
        raise ValueError("m, n must be >= 1")
    mu_code = fld.element(mu).code
    if mu_code == 0:
        raise ValueError("mu must be nonzero")
    d = m + n
    V = np.zeros((d, d), dtype=np.int16)
    F = np.zeros((d, d), dtype=np.int16)
    for i in range(1, m + 1):
        V[i - 1, i] = 1
    for j in range(m, m + n - 1):
        F[j + 1, j] = 1
    F[0, m + n - 1] = mu_code  # F^n g = mu V^m g
    gen = np.zeros(d, dtype=np.int16)
    gen[m] = 1
    return SemilinearModule(
        fld, FieldMatrix(fld, V), FieldMatrix(fld, F), gen, KochLabel("Mmnmu", m, n, mu_code)
    )


def build_label(label: KochLabel, fld: FieldSpec) -> SemilinearModule:
    if label.kind == "Mmn":
        return build_Mmn(label.m, label.n, fld)
    return build_Mmnmu(label.m, label.n, label.mu, fld)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ModuleReport:
    passed: bool
    failures: list[str]

    def first_failure(self) -> Optional[str]:
        return self.failures[0] if self.failures else None


def validate_module(M: SemilinearModule, rng=None) -> ModuleReport:
    """Check the defining relations: FV = VF = 0 (p kills everything), the
    nilpotency orders demanded by the label, and the semilinearity encoding
    on sampled vectors."""
    failures = []
    if not M.operator_is_zero("FV"):
        failures.append("FV != 0")
    if not M.operator_is_zero("VF"):
        failures.append("VF != 0")
    if M.label is not None:
        m, n = M.label.m, M.label.n
        vm = m if M.label.kind == "Mmn" else m + 1
        fn = n if M.label.kind == "Mmn" else n + 1
        if not M.operator_is_zero("V" * vm):
            failures.append(f"V^{vm} != 0")
        if not M.operator_is_zero("F" * fn):
            failures.append(f"F^{fn} != 0")
    else:
        if not M.operator_is_zero("V" * M.dim):
            failures.append("V not nilpotent")
        if not M.operator_is_zero("F" * M.dim):
            failures.append("F not nilpotent")
    # semilinearity encoding: F(x v) = x^p F(v), V(x v) = x^(1/p) V(v)
    import random

    rng = rng or random.Random(20240901)
    t = M.field.tables
    for _ in range(4):
        v = np.array([rng.randrange(M.field.q) for _ in range(M.dim)], dtype=np.int16)
        x = rng.randrange(1, M.field.q)
        xv = t.mul[x, v]
        if not np.array_equal(M.apply_F(xv), t.mul[int(t.frob[x]), M.apply_F(v)]):
            failures.append("F semilinearity encoding broken")
            break
        xinvfrob = int(t.frob_pows[-1 % M.field.e][x]) if M.field.e > 1 else x
        if not np.array_equal(M.apply_V(xv), t.mul[xinvfrob, M.apply_V(v)]):
            failures.append("V semilinearity encoding broken")
            break
    return ModuleReport(not failures, failures)


# ---------------------------------------------------------------------------
# Koch isomorphism criterion and the brute-force oracle


def koch_iso_test(l1: KochLabel, l2: KochLabel, fld: FieldSpec) -> bool:
    """Theorem-A.2 criterion: kinds and (m,n) match, and for the mu family
    mu/mu' must be a (p^(m+n)-1)-th power in F_q^*."""
    if l1.kind != l2.kind or (l1.m, l1.n) != (l2.m, l2.n):
        return False
    if l1.kind == "Mmn":
        return True
    q = fld.q
    d = fld.p ** (l1.m + l1.n) - 1
    g = _gcd(d, q - 1)
    ratio = fld.element(l1.mu) / fld.element(l2.mu)
    return (ratio ** ((q - 1) // g)) == fld.one


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _generator_words(M: SemilinearModule) -> list[str]:
    """Deterministic words w with {w(g)} a basis, found by breadth-first
    closure from the generator (V before F)."""
    if M.generator is None:
        raise ValueError("module has no marked generator")
    fld = M.field
    words: list[str] = []
    mat = np.zeros((0, M.dim), dtype=np.int16)

    def rank_of(stack: np.ndarray) -> int:
        return _rref_codes(fld, stack)[0]

    queue = [("", M.generator)]
    seen_rank = 0
    while queue and len(words) < M.dim:
        word, vec = queue.pop(0)
        if not np.any(vec):
            continue
        stack = np.concatenate([mat, vec.reshape(1, -1)], axis=0)
        r = rank_of(stack)
        if r > seen_rank:
            mat = stack
            seen_rank = r
            words.append(word)
            queue.append(("V" + word, M.apply_V(vec)))
            queue.append(("F" + word, M.apply_F(vec)))
    if len(words) != M.dim:
        raise ValueError("generator does not generate the module")
    return words


def brute_force_iso(M: SemilinearModule, N: SemilinearModule) -> bool:
    """Exhaustive search for an invertible k-linear intertwiner M -> N.

    Correctness: M is cyclic with generator g and basis {w_i(g)}; any module
    map is determined by the image u of g via w_i(g) -> w_i(u), so sweeping u
    over all of N and testing the intertwining relations on the basis is a
    complete search.  Vectorized over all q^d candidates at once."""
    if M.field is not N.field:
        raise ValueError("field mismatch")
    fld = M.field
    if M.dim != N.dim:
        return False
    d = M.dim
    if d > _ISO_DIM_GUARD or fld.q > _ISO_Q_GUARD:
        raise GuardExceeded(f"brute force guard: dim <= {_ISO_DIM_GUARD}, q <= {_ISO_Q_GUARD}")
    words = _generator_words(M)
    t = fld.tables
    q = fld.q

    # basis-change: columns w_i(g) in M coordinates
    Wcols = np.zeros((d, d), dtype=np.int16)
    for i, w in enumerate(words):
        v = M.generator
        for ch in reversed(w):
            v = M.apply_V(v) if ch == "V" else M.apply_F(v)
        Wcols[:, i] = v
    Winv = _invert(FieldMatrix(fld, Wcols))

    # all candidates u, as an array (q^d, d)
    grid = np.indices((q,) * d).reshape(d, -1).T.astype(np.int16)
    ncand = grid.shape[0]

    def apply_op_batch(cols: np.ndarray, which: str) -> np.ndarray:
        # cols: (ncand, d); apply the operator of N to every row
        if which == "V":
            tw = t.frob_pows[-1 % fld.e] if fld.e > 1 else None
            mat = N.V_mat.codes
        else:
            tw = t.frob
            mat = N.F_mat.codes
        x = cols if tw is None else tw[cols]
        out = np.zeros_like(cols)
        for i in range(d):
            acc = np.zeros(ncand, dtype=np.int16)
            for k in range(d):
                if mat[i, k]:
                    acc = t.add[acc, t.mul[mat[i, k], x[:, k]]]
            out[:, i] = acc
        return out

    # images w_i(u) for all candidates: (ncand, d, d); [:, :, i] = w_i(u)
    images = np.zeros((ncand, d, d), dtype=np.int16)
    cache = {"": grid}
    for i, w in enumerate(words):
        cur = grid
        built = ""
        for ch in reversed(w):
            built = ch + built
            if built in cache:
                cur = cache[built]
            else:
                cur = apply_op_batch(cur, ch)
                cache[built] = cur
        images[:, :, i] = cur

    # Phi = images . W^(-1), batched right-multiplication by a constant matrix
    def right_mul_const(stack: np.ndarray, A: np.ndarray) -> np.ndarray:
        out = np.zeros_like(stack)
        for i in range(d):
            acc = np.zeros((ncand, d), dtype=np.int16)
            for k in range(d):
                if A[k, i]:
                    acc = t.add[acc, t.mul[stack[:, :, k], A[k, i]]]
            out[:, :, i] = acc
        return out

    def left_mul_const(A: np.ndarray, stack: np.ndarray) -> np.ndarray:
        out = np.zeros_like(stack)
        for i in range(d):
            acc = np.zeros((ncand, d), dtype=np.int16)
            for k in range(d):
                if A[i, k]:
                    acc = t.add[acc, t.mul[A[i, k], stack[:, k, :]]]
            out[:, i, :] = acc
        return out

    phi = right_mul_const(images, Winv.codes)

    # intertwining: Phi . V_M == V_N . frob^(-1)(Phi), Phi . F_M == F_N . frob(Phi)
    lhs_v = right_mul_const(phi, M.V_mat.codes)
    rhs_v = left_mul_const(N.V_mat.codes, (t.frob_pows[-1 % fld.e][phi] if fld.e > 1 else phi))
    lhs_f = right_mul_const(phi, M.F_mat.codes)
    rhs_f = left_mul_const(N.F_mat.codes, t.frob[phi])
    ok = np.all(lhs_v == rhs_v, axis=(1, 2)) & np.all(lhs_f == rhs_f, axis=(1, 2))
    for ci in np.nonzero(ok)[0]:
        if _rref_codes(fld, phi[ci])[0] == d:
            return True
    return False


def _invert(M: FieldMatrix) -> FieldMatrix:
    fld = M.field
    d = M.rows
    aug = np.concatenate([M.codes, np.eye(d, dtype=np.int16)], axis=1)
    rank, red, piv = _rref_codes(fld, aug)
    if tuple(piv[:d]) != tuple(range(d)):
        raise ValueError("matrix is singular")
    return FieldMatrix(fld, red[:, d:])


# ---------------------------------------------------------------------------
# enumeration and classification of cyclic quotients


class UnclassifiableQuotient(RuntimeError):
    pass


def _subspaces(fld: FieldSpec, d: int):
    """All rref canonical forms of subspaces of F_q^d, as (rows, pivots)."""
    q = fld.q
    for k in range(d + 1):
        for pivots in itertools.combinations(range(d), k):
            free_pos = [
                (r, c)
                for r in range(k)
                for c in range(pivots[r] + 1, d)
                if c not in pivots
            ]
            for vals in itertools.product(range(q), repeat=len(free_pos)):
                rows = np.zeros((k, d), dtype=np.int16)
                for r, pc in enumerate(pivots):
                    rows[r, pc] = 1
                for (r, c), v in zip(free_pos, vals):
                    rows[r, c] = v
                yield rows, pivots


def _reduce_against(fld: FieldSpec, rows: np.ndarray, pivots, v: np.ndarray) -> np.ndarray:
    t = fld.tables
    v = v.copy()
    for r, pc in enumerate(pivots):
        c = int(v[pc])
        if c:
            v = t.add[v, t.mul[int(t.neg[c]), rows[r]]]
    return v


def _classify_cyclic(Q: SemilinearModule) -> KochLabel:
    """Identify the Koch label of a cyclic p-killed module via the V/F chain
    lengths from the generator, extracting mu from the socle relation."""
    fld = Q.field
    g = Q.generator
    vchain = [g]
    while np.any(vchain[-1]):
        vchain.append(Q.apply_V(vchain[-1]))
    a = len(vchain) - 1  # least a with V^a g = 0
    fchain = [g]
    while np.any(fchain[-1]):
        fchain.append(Q.apply_F(fchain[-1]))
    b = len(fchain) - 1
    d = Q.dim
    if d == a + b - 1:
        return KochLabel("Mmn", a, b)
    if d == a + b - 2:
        vtop = vchain[a - 1]  # V^(a-1) g, spans the socle
        ftop = fchain[b - 1]  # F^(b-1) g = mu V^(a-1) g
        nz = np.nonzero(vtop)[0]
        if nz.size == 0:
            raise UnclassifiableQuotient("socle vanished unexpectedly")
        i = int(nz[0])
        t = fld.tables
        mu = int(t.mul[ftop[i], t.inv[vtop[i]]])
        if mu == 0 or not np.array_equal(ftop, t.mul[mu, vtop]):
            raise UnclassifiableQuotient("F-top is not a multiple of V-top")
        return KochLabel("Mmnmu", a - 1, b - 1, mu)
    raise UnclassifiableQuotient(f"dimension {d} does not match chain lengths ({a},{b})")


def canonical_mu(label: KochLabel, fld: FieldSpec) -> KochLabel:
    """Canonical representative of the isomorphism class: the least mu code
    isomorphic to the given one (labels themselves compare via koch_iso_test)."""
    if label.kind != "Mmnmu":
        return label
    for code in range(1, fld.q):
        cand = KochLabel("Mmnmu", label.m, label.n, code)
        if koch_iso_test(label, cand, fld):
            return cand
    raise AssertionError("unreachable: label is isomorphic to itself")


def enumerate_cyclic_quotients(m: int, n: int, fld: FieldSpec) -> Counter:
    """Classify M_(m,n)/S for every proper submodule S; returns the multiset
    of canonicalized Koch labels."""
    d = m + n - 1
    if d > _ISO_DIM_GUARD or fld.q > _ISO_Q_GUARD:
        raise GuardExceeded("enumeration guard: dim <= 5, q <= 9")
    M = build_Mmn(m, n, fld)
    t = fld.tables
    out: Counter = Counter()
    for rows, pivots in _subspaces(fld, d):
        k = rows.shape[0]
        if k == d:
            continue  # zero quotient is excluded
        closed = True
        for r in range(k):
            for img in (M.apply_V(rows[r]), M.apply_F(rows[r])):
                if np.any(_reduce_against(fld, rows, pivots, img)):
                    closed = False
                    break
            if not closed:
                break
        if not closed:
            continue
        free = [c for c in range(d) if c not in pivots]
        dq = len(free)
        # projection matrix: proj(v) = reduced v restricted to free columns
        proj = np.zeros((dq, d), dtype=np.int16)
        for j in range(d):
            e = np.zeros(d, dtype=np.int16)
            e[j] = 1
            proj[:, j] = _reduce_against(fld, rows, pivots, e)[free]
        lift = np.zeros((d, dq), dtype=np.int16)
        for i, c in enumerate(free):
            lift[c, i] = 1
        projM = FieldMatrix(fld, proj)
        liftM = FieldMatrix(fld, lift)
        Vq = projM @ M.V_mat @ liftM.entrywise_frobenius(-1)
        Fq = projM @ M.F_mat @ liftM.entrywise_frobenius(1)
        gen = projM.matvec(M.generator)
        Q = SemilinearModule(fld, Vq, Fq, gen)
        label = _classify_cyclic(Q)
        out[canonical_mu(label, fld)] += 1
    return out


def label_to_algebra(label: KochLabel, fld: FieldSpec):
    """The group algebra of psi(label): the even catalog algebra with its
    Witt-type (or mu-twisted) coproduct."""
    if label.kind == "Mmn":
        return superalg.catalog("E_mn", fld, m=label.m, n=label.n)
    return superalg.catalog("E_mn_mu", fld, m=label.m, n=label.n, mu=label.mu)
