"""Modules over the catalog algebras, minimal free resolutions of the
trivial module, bigraded Ext, Yoneda products, induced maps on Ext, and the
projectivity-detection harness.

Resolutions run over the underlying ungraded algebra; the Z/2 grading rides
along as parity labels on free generators (all ideals and power rules are
parity-homogeneous, so kernels split by parity).  Generator selection is
deterministic: kernel vectors come out of the rref free-variable
construction in coordinate order, radical-quotient reduction keeps the first
independent ones, even parity processed before odd."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .linalg import (
    FieldMatrix,
    FieldSpec,
    _kernel_codes,
    _matmul_codes,
    _rref_codes,
    reduce_row as _reduce_row,
    span_insert as _span_insert,
)
from .superalg import AlgebraElement, AlgebraMorphism, SuperAlgebra


# ---------------------------------------------------------------------------
# modules


class SuperModule:
    """Finite-dimensional module: one action matrix per algebra generator,
    plus a parity for every basis vector."""

    def __init__(self, algebra: SuperAlgebra, action: Sequence[np.ndarray], parities):
        self.algebra = algebra
        self.action = [np.ascontiguousarray(a, dtype=np.int16) for a in action]
        self.parities = np.asarray(parities, dtype=np.int8)
        if len(self.action) != algebra.ngens:
            raise ValueError("need one action matrix per generator")
        self.dim = int(self.action[0].shape[0]) if self.action else len(self.parities)
        for a in self.action:
            if a.shape != (self.dim, self.dim):
                raise ValueError("action matrices must be square of equal size")
        if self.parities.shape != (self.dim,):
            raise ValueError("parity vector has wrong length")

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    def act_element(self, el: AlgebraElement) -> np.ndarray:
        """Matrix of the action of an algebra element."""
        fld = self.field
        out = np.zeros((self.dim, self.dim), dtype=np.int16)
        t = fld.tables
        for mon, c in el.terms.items():
            m = np.eye(self.dim, dtype=np.int16)
            for i, e in enumerate(mon):
                for _ in range(e):
                    m = _matmul_codes(fld, self.action[i], m)
            out = t.add[out, t.mul[c, m]]
        return out

    def __repr__(self):
        return f"SuperModule(dim {self.dim} over {self.algebra.label or 'algebra'})"


def regular_module(A: SuperAlgebra) -> SuperModule:
    return SuperModule(A, [A.gen_matrix(i) for i in range(A.ngens)], A.parities())


def trivial_module(A: SuperAlgebra) -> SuperModule:
    z = np.zeros((1, 1), dtype=np.int16)
    return SuperModule(A, [z.copy() for _ in range(A.ngens)], [0])


def radical_module(A: SuperAlgebra) -> SuperModule:
    """The augmentation ideal of A as a module: the first syzygy of k."""
    keep = [i for i, m in enumerate(A.basis) if any(m)]
    mats = []
    for g in range(A.ngens):
        full = A.gen_matrix(g)
        mats.append(full[np.ix_(keep, keep)])
    pars = A.parities()[keep]
    return SuperModule(A, mats, pars)


@dataclass
class ModuleReport:
    passed: bool
    failures: list[str]


def validate_module(M: SuperModule) -> ModuleReport:
    """Commuting actions, power rules, parity homogeneity."""
    fld = M.field
    failures = []
    A = M.algebra
    for i in range(A.ngens):
        for j in range(i + 1, A.ngens):
            ab = _matmul_codes(fld, M.action[i], M.action[j])
            ba = _matmul_codes(fld, M.action[j], M.action[i])
            if not np.array_equal(ab, ba):
                failures.append(f"action({A.names[i]}) does not commute with action({A.names[j]})")
    for i, g in enumerate(A.generators):
        power = np.eye(M.dim, dtype=np.int16)
        for _ in range(g.bound):
            power = _matmul_codes(fld, M.action[i], power)
        if g.power_image is None:
            target = np.zeros((M.dim, M.dim), dtype=np.int16)
        else:
            c, mon = g.power_image
            target = np.eye(M.dim, dtype=np.int16)
            for j, e in enumerate(mon):
                for _ in range(e):
                    target = _matmul_codes(fld, M.action[j], target)
            target = fld.tables.mul[c, target]
        if not np.array_equal(power, target):
            failures.append(f"power rule violated for {g.name}")
    for i, g in enumerate(A.generators):
        rows, cols = np.nonzero(M.action[i])
        if np.any((M.parities[rows] ^ M.parities[cols]) != g.parity):
            failures.append(f"action({g.name}) is not parity-homogeneous")
    return ModuleReport(not failures, failures)


def restrict_module(M: SuperModule, phi: AlgebraMorphism) -> SuperModule:
    """View a module over phi's target as a module over its source."""
    if M.algebra is not phi.target:
        raise ValueError("module is not over the morphism target")
    action = [M.act_element(phi.images[i]) for i in range(phi.source.ngens)]
    return SuperModule(phi.source, action, M.parities)


def extend_algebra(A: SuperAlgebra, fld2: FieldSpec) -> SuperAlgebra:
    """The same presentation over an extension field (coefficients embedded)."""
    from .superalg import Generator

    emb = linalg.embed_table(A.field, fld2)
    gens = []
    for g in A.generators:
        img = None
        if g.power_image is not None:
            c, mon = g.power_image
            img = (int(emb[c]), mon)
        gens.append(Generator(g.name, g.parity, g.bound, img, g.zdegree))
    return SuperAlgebra(fld2, gens, label=f"{A.label}@F{fld2.q}")


def extend_scalars(M: SuperModule, fld2: FieldSpec, A2: Optional[SuperAlgebra] = None) -> SuperModule:
    """Base change along the canonical embedding F_q -> F_q'."""
    emb = linalg.embed_table(M.field, fld2)
    if A2 is None:
        A2 = extend_algebra(M.algebra, fld2)
    return SuperModule(A2, [emb[a] for a in M.action], M.parities)


def is_projective(M: SuperModule) -> bool:
    """Over a local algebra: projective == free == dim M = r * dim A with
    r = dim M/(rad M), by Nakayama."""
    if M.dim == 0:
        return True
    stacked = np.concatenate(M.action, axis=1) if M.action else np.zeros((M.dim, 0), dtype=np.int16)
    rank, _, _ = _rref_codes(M.field, stacked)
    r = M.dim - rank
    return M.dim == r * M.algebra.dim


@dataclass
class DetectionReport:
    per_embedding: list[dict]
    all_pass: bool

    def to_json(self):
        return {"embeddings": self.per_embedding, "projective_on_all": self.all_pass}


def detect_projectivity(M: SuperModule, embeddings: Sequence[AlgebraMorphism]) -> DetectionReport:
    """Restrict along each embedding and test freeness there."""
    rows = []
    ok = True
    for i, phi in enumerate(embeddings):
        res = restrict_module(M, phi)
        proj = is_projective(res)
        ok = ok and proj
        rows.append(
            {
                "index": i,
                "source": phi.source.label,
                "projective": proj,
            }
        )
    return DetectionReport(rows, ok)


# ---------------------------------------------------------------------------
# minimal resolutions


class FreeResolution:
    """Minimal resolution of the trivial module, extended on demand.

    Degree s data: parities of the free generators and, for s >= 1, the
    boundary vectors (each a code vector over the coordinates of A^(r_(s-1)),
    coordinate (i, m) at index i*D + m)."""

    def __init__(self, algebra: SuperAlgebra):
        self.algebra = algebra
        self.field = algebra.field
        self.gen_parities: list[list[int]] = [[0]]
        self.boundaries: list[np.ndarray] = [np.zeros((1, 0), dtype=np.int16)]  # unused slot 0
        self._matrices: list[Optional[np.ndarray]] = [None]
        self._solvers: dict[tuple[int, int], linalg.SolveCache] = {}
        D = algebra.dim
        self._gen_mats = [algebra.gen_matrix(i) for i in range(algebra.ngens)]
        # kernel of the augmentation = radical coordinates
        self._top_kernel = self._augmentation_kernel()

    # -- plumbing ---------------------------------------------------------------

    def rank(self, s: int) -> int:
        return len(self.gen_parities[s])

    def coord_parities(self, s: int) -> np.ndarray:
        D = self.algebra.dim
        gp = np.repeat(np.array(self.gen_parities[s], dtype=np.int8), D)
        mp = np.tile(self.algebra.parities(), self.rank(s))
        return gp ^ mp

    def _augmentation_kernel(self) -> np.ndarray:
        A = self.algebra
        D = A.dim
        unit = A.index[(0,) * A.ngens]
        rows = np.zeros((D - 1, D), dtype=np.int16)
        k = 0
        for m in range(D):
            if m != unit:
                rows[k, m] = 1
                k += 1
        return rows

    def _module_action(self, s: int, rows: np.ndarray) -> np.ndarray:
        """Apply every generator to every row of a coordinate matrix over
        A^(r_s); returns the stacked results."""
        r = self.rank(s)
        D = self.algebra.dim
        fld = self.field
        blocks = []
        resh = rows.reshape(rows.shape[0] * r, D)
        for G in self._gen_mats:
            acted = _matmul_codes(fld, resh, G.T)
            blocks.append(acted.reshape(rows.shape[0], r * D))
        return np.concatenate(blocks, axis=0) if blocks else np.zeros((0, r * D), dtype=np.int16)

    def extend(self, s_max: int):
        """Compute resolution degrees up to s_max."""
        while len(self.gen_parities) - 1 < s_max:
            self._step()

    def _step(self):
        A = self.algebra
        fld = self.field
        D = A.dim
        s = len(self.gen_parities) - 1
        kernel = self._top_kernel  # rows: basis of ker(boundary_s) in A^(r_s)
        coord_par = self.coord_parities(s)
        # the boundary matrix is parity-block, so every kernel basis row is
        # parity-pure; rad(kernel) must still be built from the WHOLE kernel
        # because the odd generator flips parity
        rad_full = self._module_action(s, kernel)
        new_pars: list[int] = []
        new_bounds: list[np.ndarray] = []
        for parity in (0, 1):
            mask = coord_par == parity

            def _select(rows):
                keep = [i for i in range(rows.shape[0]) if np.any(rows[i]) and not np.any(rows[i][~mask])]
                return rows[keep] if keep else np.zeros((0, rows.shape[1]), dtype=np.int16)

            kpart = _select(kernel)
            if not kpart.shape[0]:
                continue
            rad = _select(rad_full)
            # deterministic span growth: radical span first, then kernel rows
            red_rank, red, piv = _rref_codes(fld, rad)
            span = red[:red_rank]
            for row in kpart:
                resid = _reduce_row(fld, span, piv, row)
                if np.any(resid):
                    new_pars.append(parity)
                    new_bounds.append(row)
                    span, piv = _span_insert(fld, span, piv, resid)
        r_new = len(new_pars)
        bmat = np.array(new_bounds, dtype=np.int16) if r_new else np.zeros((0, self.rank(s) * D), dtype=np.int16)
        self.gen_parities.append(new_pars)
        self.boundaries.append(bmat)
        self._matrices.append(None)
        # kernel for the next step: kernel of the assembled boundary matrix
        if r_new:
            mat = self.boundary_matrix(s + 1)
            self._top_kernel = _kernel_codes(fld, mat).copy()
            self._top_kernel = self._top_kernel if self._top_kernel.ndim == 2 else self._top_kernel.reshape(0, r_new * D)
        else:
            self._top_kernel = np.zeros((0, 0), dtype=np.int16)

    def boundary_matrix(self, s: int) -> np.ndarray:
        """The k-linear matrix of boundary_s: A^(r_s) -> A^(r_(s-1)), columns
        indexed by (generator j, monomial m) at j*D + m."""
        if s == 0:
            raise ValueError("degree 0 has the augmentation, not a boundary")
        if self._matrices[s] is None:
            A = self.algebra
            fld = self.field
            D = A.dim
            r_prev = self.rank(s - 1)
            r_cur = self.rank(s)
            idx, coef = A.prod_table
            mat = np.zeros((r_prev * D, r_cur * D), dtype=np.int16)
            for j in range(r_cur):
                v = self.boundaries[s][j]
                for i in range(r_prev):
                    comp = v[i * D : (i + 1) * D]
                    nz = np.nonzero(comp)[0]
                    if nz.size == 0:
                        continue
                    block = _right_mult_matrix(fld, A, comp, nz, idx, coef)
                    mat[i * D : (i + 1) * D, j * D : (j + 1) * D] = block
            self._matrices[s] = mat
        return self._matrices[s]

    def solver(self, s: int, parity: int) -> linalg.SolveCache:
        """Solver for boundary_s restricted to columns of the given parity."""
        key = (s, parity)
        if key not in self._solvers:
            mat = self.boundary_matrix(s)
            cols = np.nonzero(self.coord_parities(s) == parity)[0]
            self._solvers[key] = _MaskedSolver(self.field, mat, cols)
        return self._solvers[key]

    # -- read-off ------------------------------------------------------------

    def ext_dims(self, s_max: int) -> list[dict]:
        self.extend(s_max)
        out = []
        for s in range(s_max + 1):
            pars = self.gen_parities[s]
            out.append({"s": s, "even": pars.count(0), "odd": pars.count(1), "total": len(pars)})
        return out

    def generator_indices(self, s: int, t: int) -> list[int]:
        return [i for i, p in enumerate(self.gen_parities[s]) if p == t]

    def is_minimal(self, s_max: int) -> bool:
        """All boundary entries lie in the radical."""
        A = self.algebra
        D = A.dim
        unit = A.index[(0,) * A.ngens]
        for s in range(1, min(s_max, len(self.gen_parities) - 1) + 1):
            b = self.boundaries[s]
            for j in range(b.shape[0]):
                v = b[j].reshape(-1, D)
                if np.any(v[:, unit]):
                    return False
        return True

    def composes_to_zero(self, s_max: int) -> bool:
        for s in range(2, min(s_max, len(self.gen_parities) - 1) + 1):
            m1 = self.boundary_matrix(s - 1) if s - 1 >= 1 else None
            m2 = self.boundary_matrix(s)
            if m1 is not None:
                prod = _matmul_codes(self.field, m1, m2)
                if np.any(prod):
                    return False
        return True


class _MaskedSolver:
    """Solve M x = b where x is supported on a fixed column subset."""

    def __init__(self, fld: FieldSpec, mat: np.ndarray, cols: np.ndarray):
        self.cols = cols
        self.ncols_full = mat.shape[1]
        self.inner = linalg.SolveCache(FieldMatrix(fld, mat[:, cols]))

    def solve(self, b: np.ndarray) -> Optional[np.ndarray]:
        x = self.inner.solve(b)
        if x is None:
            return None
        full = np.zeros(self.ncols_full, dtype=np.int16)
        full[self.cols] = x
        return full


def _right_mult_matrix(fld: FieldSpec, A: SuperAlgebra, comp: np.ndarray, nz, idx, coef) -> np.ndarray:
    """Matrix of m -> m*w for w with nonzero coefficients at ``nz``."""
    D = A.dim
    out = np.zeros((D, D), dtype=np.int16)
    t = fld.tables
    if fld.e == 1:
        p = fld.p
        acc = np.zeros((D, D), dtype=np.int64)
        for m2 in nz:
            targets = idx[:, m2]
            vals = (coef[:, m2].astype(np.int64) * int(comp[m2])) % p
            cols = np.arange(D)
            np.add.at(acc, (targets, cols), vals)
        return (acc % p).astype(np.int16)
    for m2 in nz:
        c2 = int(comp[m2])
        for m1 in range(D):
            c = coef[m1, m2]
            if c:
                tgt = idx[m1, m2]
                out[tgt, m1] = int(t.add[out[tgt, m1], int(t.mul[int(t.mul[c, c2]), 1])])
    return out


_res_cache: dict[int, FreeResolution] = {}


def minimal_resolution(A: SuperAlgebra, s_max: int) -> FreeResolution:
    res = _res_cache.get(id(A))
    if res is None or res.algebra is not A:
        res = FreeResolution(A)
        _res_cache[id(A)] = res
    res.extend(s_max)
    return res


def ext_dims(A: SuperAlgebra, s_max: int) -> list[dict]:
    return minimal_resolution(A, s_max).ext_dims(s_max)


# ---------------------------------------------------------------------------
# Ext classes and products


@dataclass
class ExtElement:
    resolution: FreeResolution
    s: int
    t: int
    coords: np.ndarray  # over the parity-t generators of degree s

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.int16)
        n = len(self.resolution.generator_indices(self.s, self.t))
        if self.coords.shape != (n,):
            raise ValueError(f"expected {n} coordinates in bidegree ({self.s},{self.t})")

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def full_functional(self) -> np.ndarray:
        """Values on all generators of degree s (zero off-parity)."""
        out = np.zeros(self.resolution.rank(self.s), dtype=np.int16)
        for c, j in zip(self.coords, self.resolution.generator_indices(self.s, self.t)):
            out[j] = c
        return out

    def __repr__(self):
        return f"Ext^({self.s},{self.t})[{list(self.coords)}]"


def ext_class(res: FreeResolution, s: int, t: int, coords) -> ExtElement:
    return ExtElement(res, s, t, np.asarray(coords, dtype=np.int16))


def _mult_element_vector(fld: FieldSpec, A: SuperAlgebra, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two elements given as dense coefficient vectors."""
    idx, coef = A.prod_table
    D = A.dim
    if fld.e == 1:
        p = fld.p
        nz1 = np.nonzero(a)[0]
        out = np.zeros(D, dtype=np.int64)
        for m1 in nz1:
            contrib = (int(a[m1]) * b.astype(np.int64) * coef[m1].astype(np.int64)) % p
            out += np.bincount(idx[m1], weights=contrib, minlength=D).astype(np.int64)
        return (out % p).astype(np.int16)
    t = fld.tables
    out = np.zeros(D, dtype=np.int16)
    for m1 in np.nonzero(a)[0]:
        for m2 in np.nonzero(b)[0]:
            c = coef[m1, m2]
            if c:
                tgt = idx[m1, m2]
                v = int(t.mul[int(t.mul[a[m1], b[m2]]), c])
                out[tgt] = int(t.add[out[tgt], v])
    return out


def chain_lift(eta: ExtElement, height: int) -> list[np.ndarray]:
    """Lift the functional eta: P_(s2) -> k to a chain map; returns, for each
    i = 0..height, the images of the degree-(s2+i) generators inside A^(r_i)
    (stacked as rows)."""
    res = eta.resolution
    A = res.algebra
    fld = res.field
    D = A.dim
    s2 = eta.s
    res.extend(s2 + height)
    unit = A.index[(0,) * A.ngens]
    maps: list[np.ndarray] = []
    func = eta.full_functional()
    rows0 = np.zeros((res.rank(s2), D), dtype=np.int16)
    for j in range(res.rank(s2)):
        rows0[j, unit] = func[j]
    maps.append(rows0)
    for i in range(1, height + 1):
        r_src = res.rank(s2 + i)
        r_tgt = res.rank(i)
        rows = np.zeros((r_src, r_tgt * D), dtype=np.int16)
        prev = maps[i - 1]
        for j in range(r_src):
            bnd = res.boundaries[s2 + i][j].reshape(res.rank(s2 + i - 1), D)
            target = np.zeros(res.rank(i - 1) * D, dtype=np.int16)
            for kk in range(res.rank(s2 + i - 1)):
                a = bnd[kk]
                if not np.any(a):
                    continue
                ph = prev[kk].reshape(res.rank(i - 1), D)
                for c in range(res.rank(i - 1)):
                    if np.any(ph[c]):
                        target[c * D : (c + 1) * D] = fld.tables.add[
                            target[c * D : (c + 1) * D],
                            _mult_element_vector(fld, A, a, ph[c]),
                        ]
            # parity of the target coordinates determines the solve block
            par = (res.gen_parities[s2 + i][j] + eta.t) & 1
            x = res.solver(i, par).solve(target)
            if x is None:
                raise RuntimeError("chain lift failed: resolution is not exact here")
            rows[j] = x
        maps.append(rows)
    return maps


def yoneda_product(xi: ExtElement, eta: ExtElement) -> ExtElement:
    """Composition product: lift eta, evaluate xi on the top of the lift."""
    if xi.resolution is not eta.resolution:
        raise ValueError("classes live over different resolutions")
    res = xi.resolution
    A = res.algebra
    D = A.dim
    s = xi.s + eta.s
    t = (xi.t + eta.t) & 1
    res.extend(s)
    lift = chain_lift(eta, xi.s)
    top = lift[xi.s]  # rows: generators of degree s -> A^(r_(xi.s))
    unit = A.index[(0,) * A.ngens]
    fx = xi.full_functional()
    tbl = res.field.tables
    vals = np.zeros(res.rank(s), dtype=np.int16)
    for j in range(res.rank(s)):
        row = top[j].reshape(res.rank(xi.s), D)
        acc = 0
        for kk in range(res.rank(xi.s)):
            if fx[kk]:
                acc = int(tbl.add[acc, int(tbl.mul[fx[kk], row[kk, unit]])])
        vals[j] = acc
    idxs = res.generator_indices(s, t)
    off = [j for j in range(res.rank(s)) if j not in set(idxs) and vals[j]]
    if off:
        raise AssertionError("Yoneda product has off-parity components")
    return ExtElement(res, s, t, vals[idxs])


def nilpotence_order(xi: ExtElement, n_max: int, s_max: int) -> Optional[int]:
    """Least n <= n_max with xi^n = 0 (Yoneda powers), or None if no power
    vanished within the bounds (including when s_max cuts the search off)."""
    if xi.is_zero():
        return 1
    power = xi
    for n in range(2, n_max + 1):
        if power.s + xi.s > s_max:
            return None
        power = yoneda_product(xi, power)
        if power.is_zero():
            return n
    return None


# ---------------------------------------------------------------------------
# induced maps on Ext


def induced_ext_map(phi: AlgebraMorphism, s_max: int, flip_solver: bool = False) -> list[np.ndarray]:
    """Matrices of Ext^s_B(k,k) -> Ext^s_A(k,k) for phi: A -> B, s <= s_max.

    Row index: generators of A's resolution degree s; column: B's.  Computed
    from a comparison chain map between the minimal resolutions over phi.
    ``flip_solver`` picks a different (still valid) lift, for testing
    well-definedness."""
    A, B = phi.source, phi.target
    res_a = minimal_resolution(A, s_max)
    res_b = minimal_resolution(B, s_max)
    fld = A.field
    DB = B.dim
    unit_b = B.index[(0,) * B.ngens]
    # comparison maps: rows per A-generator, coordinates over B^(r^B_s)
    comp: list[np.ndarray] = []
    c0 = np.zeros((1, DB), dtype=np.int16)
    c0[0, unit_b] = 1
    comp.append(c0)
    out: list[np.ndarray] = [np.array([[1]], dtype=np.int16)]
    for s in range(1, s_max + 1):
        r_a = res_a.rank(s)
        rows = np.zeros((r_a, res_b.rank(s) * DB), dtype=np.int16)
        for j in range(r_a):
            bnd = res_a.boundaries[s][j].reshape(res_a.rank(s - 1), res_a.algebra.dim)
            target = np.zeros(res_b.rank(s - 1) * DB, dtype=np.int16)
            for kk in range(res_a.rank(s - 1)):
                a_el = res_a.algebra.from_vector(bnd[kk])
                if a_el.is_zero():
                    continue
                b_el = phi.apply(a_el).to_vector()
                prev = comp[s - 1][kk].reshape(res_b.rank(s - 1), DB)
                for c in range(res_b.rank(s - 1)):
                    if np.any(prev[c]):
                        target[c * DB : (c + 1) * DB] = fld.tables.add[
                            target[c * DB : (c + 1) * DB],
                            _mult_element_vector(fld, B, b_el, prev[c]),
                        ]
            par = res_a.gen_parities[s][j]
            solver = res_b.solver(s, par)
            if flip_solver:
                x = _flipped_solve(res_b, s, par, target)
            else:
                x = solver.solve(target)
            if x is None:
                raise RuntimeError("comparison lift failed")
            rows[j] = x
        comp.append(rows)
        # Ext matrix: entry (j, i) = eps(component i of comp[s][j])
        mat = np.zeros((r_a, res_b.rank(s)), dtype=np.int16)
        for j in range(r_a):
            comps = rows[j].reshape(res_b.rank(s), DB)
            mat[j] = comps[:, unit_b]
        out.append(mat)
    return out


def _flipped_solve(res_b: FreeResolution, s: int, par: int, target: np.ndarray) -> Optional[np.ndarray]:
    """Alternative lift: solve with the column order reversed, giving a
    different representative of the same chain-homotopy class."""
    fld = res_b.field
    mat = res_b.boundary_matrix(s)
    cols = np.nonzero(res_b.coord_parities(s) == par)[0]
    rev = cols[::-1]
    sc = linalg.SolveCache(FieldMatrix(fld, mat[:, rev]))
    x = sc.solve(target)
    if x is None:
        return None
    full = np.zeros(mat.shape[1], dtype=np.int16)
    full[rev] = x
    return full


def induced_map_on_bidegree(
    mats: list[np.ndarray], res_a: FreeResolution, res_b: FreeResolution, s: int, t: int
) -> np.ndarray:
    """Restrict the degree-s induced matrix to the parity-t generator blocks."""
    rows = res_a.generator_indices(s, t)
    cols = res_b.generator_indices(s, t)
    return mats[s][np.ix_(rows, cols)]


# ---------------------------------------------------------------------------
# named classes


def unique_class(res: FreeResolution, s: int, t: int) -> ExtElement:
    """The class with coordinate vector (1, 0, ...) in bidegree (s, t)."""
    n = len(res.generator_indices(s, t))
    if n == 0:
        raise ValueError(f"no generators in bidegree ({s},{t})")
    coords = np.zeros(n, dtype=np.int16)
    coords[0] = 1
    return ExtElement(res, s, t, coords)


def zeta_class(res: FreeResolution) -> ExtElement:
    """The degree-(1,1) class, normalized; requires a one-dimensional slot."""
    res.extend(1)
    n = len(res.generator_indices(1, 1))
    if n != 1:
        raise ValueError("(1,1) slot is not one-dimensional")
    return unique_class(res, 1, 1)


def xhat_class(A: SuperAlgebra) -> ExtElement:
    """The canonical polynomial degree-2 class of kE^-_(m,1) (or of kW).

    Pinned by restriction to the even subalgebra k[s]/(s^(p^m)): the unique
    class of bidegree (2,0) that restricts to the normalized degree-2
    generator there and has zero coefficient on zeta^2's leading coordinate.
    This matches the restriction normalization of the W-chain; the paper does
    not pin the scalar of this class anywhere computable."""
    from . import superalg as sa

    fld = A.field
    names = set(A.names)
    if names == {"s"} or names == {"sigma"}:
        res = minimal_resolution(A, 2)
        return unique_class(res, 2, 0)
    if "sigma" not in names or "s2" in names:
        raise ValueError("xhat pin implemented for the one-even-generator family only")
    import math

    m = round(math.log(A.generators[0].bound) / math.log(fld.p))
    W, _ = sa.catalog("W_m1", fld, m=m)
    inc = sa.make_morphism(W, A, {"s": A.gen_el("s1")})
    mats = induced_ext_map(inc, 2)  # restriction Ext_A -> Ext_W
    res_a = minimal_resolution(A, 2)
    res_w = minimal_resolution(W, 2)
    block = induced_map_on_bidegree(mats, res_w, res_a, 2, 0)  # rows: W, cols: A
    zsq = yoneda_product(zeta_class(res_a), zeta_class(res_a))
    lead = int(np.nonzero(zsq.coords)[0][0])
    ncols = block.shape[1]
    keep = [c for c in range(ncols) if c != lead]
    sub = FieldMatrix(fld, block[:, keep])
    sol = linalg.SolveCache(sub).solve(np.array([1], dtype=np.int16))
    if sol is None:
        raise ValueError("restriction does not hit the W-generator")
    coords = np.zeros(ncols, dtype=np.int16)
    coords[keep] = sol
    return ExtElement(res_a, 2, 0, coords)


def identify_classes(A: SuperAlgebra) -> dict:
    """The computed-coordinate dictionary for the named degree-one and
    degree-two classes, where defined for this algebra."""
    res = minimal_resolution(A, 2)
    out: dict = {"convention": "coordinates over the deterministic resolution basis"}
    odd1 = res.generator_indices(1, 1)
    if len(odd1) == 1:
        out["zeta"] = {"s": 1, "t": 1, "coords": [1]}
    ev1 = res.generator_indices(1, 0)
    if ev1:
        out["lambda"] = [
            {"s": 1, "t": 0, "coords": [1 if j == i else 0 for j in range(len(ev1))]}
            for i in range(len(ev1))
        ]
    try:
        xh = xhat_class(A)
        out["x"] = {"s": 2, "t": 0, "coords": [int(c) for c in xh.coords]}
    except ValueError:
        pass
    return out
