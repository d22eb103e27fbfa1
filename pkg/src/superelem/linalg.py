"""Exact arithmetic over F_{p^e} (p an odd prime) and dense linear algebra.

Field elements are polynomial residues modulo a fixed irreducible monic
polynomial.  Each element is encoded internally as an integer code
``c_0 + c_1*p + ... + c_{e-1}*p^{e-1}``; all arithmetic goes through
precomputed lookup tables, so the same tables drive both the scalar
``FieldElement`` API and the vectorized numpy paths used by the heavier
modules.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

_MAX_Q = 2048  # lookup tables are q*q; every field in scope is tiny


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient lists, lowest degree first)


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_divmod(out, mod, p)


def _poly_divmod(a: list[int], mod: list[int], p: int) -> list[int]:
    """Remainder of a modulo a monic polynomial."""
    a = _poly_trim([c % p for c in a])
    dm = len(mod) - 1
    while a and len(a) - 1 >= dm:
        k = len(a) - 1 - dm
        f = a[-1]
        for i, mi in enumerate(mod):
            a[i + k] = (a[i + k] - f * mi) % p
        _poly_trim(a)
    return a


def _poly_powmod(a: list[int], n: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_divmod(list(a), mod, p)
    while n:
        if n & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        n >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        a, b = b, _poly_remainder(a, b, p)
    return a


def _poly_remainder(a: list[int], b: list[int], p: int) -> list[int]:
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = (a[-1] * inv_lead) % p
        for i, bi in enumerate(b):
            a[i + k] = (a[i + k] - f * bi) % p
        _poly_trim(a)
    return a


def _is_irreducible(poly: list[int], p: int) -> bool:
    """Rabin test for a monic polynomial over F_p."""
    e = len(poly) - 1
    if e <= 0:
        return False
    if e == 1:
        return True
    x = [0, 1]
    # x^(p^e) == x mod poly
    t = x
    for _ in range(e):
        t = _poly_powmod(t, p, poly, p)
    lhs = _poly_trim(list(t))
    if lhs != _poly_trim([0, 1]):
        return False
    for ell in {d for d in range(2, e + 1) if e % d == 0 and _is_prime(d)}:
        t = x
        for _ in range(e // ell):
            t = _poly_powmod(t, p, poly, p)
        diff = [(u - v) % p for u, v in itertools.zip_longest(t, x, fillvalue=0)]
        g = _poly_gcd(poly, diff, p)
        if len(_poly_trim(g)) - 1 > 0:
            return False
    return True


def _default_modulus(p: int, e: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree e, ordered by the base-p code of
    the non-leading coefficients.  Fixed once per (p, e) for reproducibility."""
    if e == 1:
        return (0, 1)
    for code in range(p**e):
        coeffs = [(code // p**i) % p for i in range(e)]
        poly = coeffs + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise RuntimeError(f"no irreducible polynomial of degree {e} over F_{p}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """A concrete finite field F_{p^e}, p >= 3, with a pinned modulus."""

    p: int
    e: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not _is_prime(self.p) or self.p < 3:
            raise ValueError(f"p must be an odd prime >= 3, got {self.p}")
        if self.e < 1:
            raise ValueError("extension degree must be >= 1")
        if len(self.modulus) != self.e + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree e")
        if self.q > _MAX_Q:
            raise ValueError(f"field size {self.q} exceeds the table limit {_MAX_Q}")
        if not _is_irreducible(list(self.modulus), self.p):
            raise ValueError("modulus is not irreducible")

    @property
    def q(self) -> int:
        return self.p**self.e

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    # -- element construction ------------------------------------------------

    def element(self, value) -> "FieldElement":
        """Coerce an int (reduced mod p when e == 1, else a code) or a
        coefficient sequence into a field element."""
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            if self.e == 1:
                return FieldElement(self, int(value) % self.p)
            code = int(value)
            if not 0 <= code < self.q:
                raise ValueError(f"code {code} out of range for F_{self.q}")
            return FieldElement(self, code)
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.e:
            raise ValueError("too many coefficients")
        coeffs += [0] * (self.e - len(coeffs))
        return FieldElement(self, sum(c * self.p**i for i, c in enumerate(coeffs)))

    def from_int(self, n: int) -> "FieldElement":
        """Image of the integer n under Z -> F_q (lands in the prime field)."""
        return FieldElement(self, int(n) % self.p)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def gen(self) -> "FieldElement":
        """The residue of t, i.e. the adjoined root of the modulus."""
        if self.e == 1:
            raise ValueError("prime field has no adjoined generator")
        return FieldElement(self, self.p)

    def elements(self):
        return (FieldElement(self, c) for c in range(self.q))

    def random(self, rng) -> "FieldElement":
        return FieldElement(self, rng.randrange(self.q))

    # -- tables ---------------------------------------------------------------

    @property
    def tables(self) -> "_Tables":
        return _tables_for(self)

    def code_coeffs(self, code: int) -> tuple[int, ...]:
        return tuple((code // self.p**i) % self.p for i in range(self.e))


_field_cache: dict[tuple[int, int], FieldSpec] = {}


def field(p: int, e: int = 1) -> FieldSpec:
    """The field F_{p^e} with the deterministic modulus for (p, e).

    Always returns the same instance per (p, e), so identity checks across
    modules agree."""
    key = (int(p), int(e))
    spec = _field_cache.get(key)
    if spec is None:
        spec = FieldSpec(key[0], key[1], _default_modulus(*key))
        _field_cache[key] = spec
    return spec


class _Tables:
    """Dense lookup tables for one field; shared by scalar and numpy paths."""

    def __init__(self, spec: FieldSpec):
        p, e, q = spec.p, spec.e, spec.q
        coeffs = np.array([spec.code_coeffs(c) for c in range(q)], dtype=np.int64)
        powers = p ** np.arange(e, dtype=np.int64)
        add = ((coeffs[:, None, :] + coeffs[None, :, :]) % p) @ powers
        self.add = add.astype(np.int16)
        self.neg = (((-coeffs) % p) @ powers).astype(np.int16)
        mod = list(spec.modulus)
        mul = np.zeros((q, q), dtype=np.int16)
        for a in range(q):
            ca = list(spec.code_coeffs(a))
            for b in range(a, q):
                cb = list(spec.code_coeffs(b))
                prod = _poly_mulmod(ca, cb, mod, p)
                code = sum(c * p**i for i, c in enumerate(prod))
                mul[a, b] = code
                mul[b, a] = code
        self.mul = mul
        inv = np.zeros(q, dtype=np.int16)
        for a in range(1, q):
            inv[a] = int(np.where(mul[a] == 1)[0][0])
        self.inv = inv
        frob = np.zeros(q, dtype=np.int16)
        for a in range(q):
            t = a
            r = 1
            k = p
            while k:
                if k & 1:
                    r = int(mul[r, t])
                t = int(mul[t, t])
                k >>= 1
            frob[a] = r
        self.frob = frob
        # iterated frobenius x -> x^(p^k) for k = 0..e-1
        self.frob_pows = [np.arange(q, dtype=np.int16)]
        for _ in range(1, e):
            self.frob_pows.append(frob[self.frob_pows[-1]])


@lru_cache(maxsize=None)
def _tables_for(spec: FieldSpec) -> _Tables:
    return _Tables(spec)


class FieldElement:
    """An element of a fixed FieldSpec; immutable."""

    __slots__ = ("field", "code")

    def __init__(self, fld: FieldSpec, code: int):
        object.__setattr__(self, "field", fld)
        object.__setattr__(self, "code", int(code))

    def __setattr__(self, *args):
        raise AttributeError("FieldElement is immutable")

    @property
    def coefficients(self) -> tuple[int, ...]:
        return self.field.code_coeffs(self.code)

    def is_zero(self) -> bool:
        return self.code == 0

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("field mismatch")
            return other
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, int(self.field.tables.add[self.code, o.code]))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.tables.neg[self.code]))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, int(self.field.tables.mul[self.code, o.code]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.code == 0:
            raise ZeroDivisionError("division by zero field element")
        return self * FieldElement(self.field, int(self.field.tables.inv[o.code]))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def __pow__(self, n: int):
        if n < 0:
            if self.code == 0:
                raise ZeroDivisionError("inverting zero")
            return (self.field.one / self) ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self == self.field.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.code))

    def __repr__(self):
        if self.field.e == 1:
            return str(self.code)
        return f"F{self.field.q}({list(self.coefficients)})"

    def to_json(self) -> list[int]:
        return list(self.coefficients)


def frobenius(a: FieldElement, k: int) -> FieldElement:
    """a^(p^k); negative k is the inverse automorphism (k is reduced mod e)."""
    fld = a.field
    k = k % fld.e
    return FieldElement(fld, int(fld.tables.frob_pows[k][a.code]))


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# matrices


class FieldMatrix:
    """Dense matrix over a FieldSpec.  Entries are stored as an int16 numpy
    array of element codes; the array must never be mutated after
    construction."""

    __slots__ = ("field", "codes")

    def __init__(self, fld: FieldSpec, codes: np.ndarray):
        self.field = fld
        self.codes = np.ascontiguousarray(codes, dtype=np.int16)
        if self.codes.ndim != 2:
            raise ValueError("matrix must be two-dimensional")

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_rows(fld: FieldSpec, rows: Sequence[Sequence]) -> "FieldMatrix":
        data = [[fld.element(x).code for x in row] for row in rows]
        ncols = {len(r) for r in data}
        if len(ncols) > 1:
            raise ValueError("ragged rows")
        arr = np.array(data, dtype=np.int16) if data else np.zeros((0, 0), dtype=np.int16)
        return FieldMatrix(fld, arr)

    @staticmethod
    def zeros(fld: FieldSpec, rows: int, cols: int) -> "FieldMatrix":
        return FieldMatrix(fld, np.zeros((rows, cols), dtype=np.int16))

    @staticmethod
    def identity(fld: FieldSpec, n: int) -> "FieldMatrix":
        return FieldMatrix(fld, np.eye(n, dtype=np.int16))

    # -- basics ---------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.codes.shape[0]

    @property
    def cols(self) -> int:
        return self.codes.shape[1]

    def __getitem__(self, ij) -> FieldElement:
        i, j = ij
        return FieldElement(self.field, int(self.codes[i, j]))

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and self.field is other.field
            and self.codes.shape == other.codes.shape
            and bool(np.all(self.codes == other.codes))
        )

    def __hash__(self):
        return hash((id(self.field), self.codes.shape, self.codes.tobytes()))

    def __repr__(self):
        return f"FieldMatrix({self.rows}x{self.cols} over F_{self.field.q})\n{self.codes}"

    def is_zero(self) -> bool:
        return bool(np.all(self.codes == 0))

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.codes.T.copy())

    def to_lists(self) -> list[list[list[int]]]:
        fld = self.field
        return [[list(fld.code_coeffs(int(c))) for c in row] for row in self.codes]

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        return FieldMatrix(self.field, self.field.tables.add[self.codes, other.codes])

    def __sub__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other)
        t = self.field.tables
        return FieldMatrix(self.field, t.add[self.codes, t.neg[other.codes]])

    def __neg__(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.field.tables.neg[self.codes])

    def scale(self, a: FieldElement) -> "FieldMatrix":
        return FieldMatrix(self.field, self.field.tables.mul[a.code, self.codes])

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        self._check(other, square=False)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return FieldMatrix(self.field, _matmul_codes(self.field, self.codes, other.codes))

    def matvec(self, vec: np.ndarray) -> np.ndarray:
        return _matmul_codes(self.field, self.codes, vec.reshape(-1, 1))[:, 0]

    def entrywise_frobenius(self, k: int) -> "FieldMatrix":
        t = self.field.tables
        return FieldMatrix(self.field, t.frob_pows[k % self.field.e][self.codes])

    def _check(self, other, square=True):
        if not isinstance(other, FieldMatrix) or other.field is not self.field:
            raise ValueError("field mismatch")
        if square and self.codes.shape != other.codes.shape:
            raise ValueError("shape mismatch")


def _matmul_codes(fld: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product on code arrays."""
    t = fld.tables
    if fld.e == 1:
        return (a.astype(np.int64) @ b.astype(np.int64) % fld.p).astype(np.int16)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int16)
    for k in range(a.shape[1]):
        out = t.add[out, t.mul[a[:, k][:, None], b[k, :][None, :]]]
    return out


# ---------------------------------------------------------------------------
# row reduction


def _rref_codes(fld: FieldSpec, mat: np.ndarray) -> tuple[int, np.ndarray, tuple[int, ...]]:
    """Reduced row-echelon form with leftmost-pivot/topmost-row pivoting."""
    m = mat.astype(np.int64, copy=True) if fld.e == 1 else mat.copy()
    t = fld.tables
    nrows, ncols = m.shape
    pivots: list[int] = []
    r = 0
    p = fld.p
    for c in range(ncols):
        if r >= nrows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        if fld.e == 1:
            inv = pow(int(m[r, c]), p - 2, p)
            m[r] = m[r] * inv % p
            rows = np.nonzero(m[:, c])[0]
            rows = rows[rows != r]
            if rows.size:
                m[rows] = (m[rows] - np.outer(m[rows, c], m[r])) % p
        else:
            inv = int(t.inv[m[r, c]])
            m[r] = t.mul[inv, m[r]]
            rows = np.nonzero(m[:, c])[0]
            rows = rows[rows != r]
            if rows.size:
                f = t.neg[m[rows, c]]
                m[rows] = t.add[m[rows], t.mul[f[:, None], m[r][None, :]]]
        pivots.append(c)
        r += 1
    return r, m.astype(np.int16), tuple(pivots)


def rref(M: FieldMatrix) -> tuple[int, FieldMatrix, tuple[int, ...]]:
    """(rank, reduced matrix, pivot columns)."""
    rank, codes, pivots = _rref_codes(M.field, M.codes)
    return rank, FieldMatrix(M.field, codes), pivots


def _kernel_codes(fld: FieldSpec, mat: np.ndarray) -> np.ndarray:
    """Basis of the right null space, one basis vector per ROW of the result,
    via the standard free-variable construction from the rref."""
    rank, red, pivots = _rref_codes(fld, mat)
    ncols = mat.shape[1]
    free = np.array([c for c in range(ncols) if c not in set(pivots)], dtype=np.int64)
    basis = np.zeros((len(free), ncols), dtype=np.int16)
    if len(free) == 0:
        return basis
    neg = fld.tables.neg
    basis[np.arange(len(free)), free] = 1
    if pivots:
        basis[:, np.array(pivots, dtype=np.int64)] = neg[red[:rank][:, free]].T
    return basis


def kernel_basis(M: FieldMatrix) -> FieldMatrix:
    """Matrix whose columns form the deterministic null-space basis of M."""
    basis = _kernel_codes(M.field, M.codes)
    return FieldMatrix(M.field, basis.T.copy())


def reduce_row(fld: FieldSpec, span: np.ndarray, pivots, row: np.ndarray) -> np.ndarray:
    """Reduce a row against an echelon span (rows with pivot columns)."""
    t = fld.tables
    row = row.copy()
    if fld.e == 1:
        p = fld.p
        r64 = row.astype(np.int64)
        for r, pc in enumerate(pivots):
            c = int(r64[pc])
            if c:
                r64 = (r64 - c * span[r].astype(np.int64)) % p
        return r64.astype(np.int16)
    for r, pc in enumerate(pivots):
        c = int(row[pc])
        if c:
            row = t.add[row, t.mul[int(t.neg[c]), span[r]]]
    return row


def span_insert(fld: FieldSpec, span: np.ndarray, pivots, resid: np.ndarray):
    """Insert an already-reduced nonzero row into an echelon span; returns the
    new (span, pivots)."""
    t = fld.tables
    lead = int(np.nonzero(resid)[0][0])
    inv = int(t.inv[resid[lead]])
    if fld.e == 1:
        resid = (resid.astype(np.int64) * inv % fld.p).astype(np.int16)
    else:
        resid = t.mul[inv, resid]
    rows = [r for r in span]
    newpiv = sorted(list(pivots) + [lead])
    pos = newpiv.index(lead)
    rows.insert(pos, resid)
    out = np.array(rows, dtype=np.int16)
    for r in range(len(rows)):
        if r != pos and out[r, lead]:
            c = int(out[r, lead])
            if fld.e == 1:
                out[r] = ((out[r].astype(np.int64) - c * out[pos].astype(np.int64)) % fld.p).astype(np.int16)
            else:
                out[r] = t.add[out[r], t.mul[int(t.neg[c]), out[pos]]]
    return out, tuple(newpiv)


class SolveCache:
    """Precomputed elimination data for solving M x = b repeatedly."""

    def __init__(self, M: FieldMatrix):
        self.field = M.field
        fld = M.field
        nrows = M.rows
        aug = np.concatenate([M.codes, np.eye(nrows, dtype=np.int16)], axis=1)
        rank, red, pivots = _rref_codes(fld, aug)
        # pivot columns inside the original block only
        self.pivots = tuple(c for c in pivots if c < M.cols)
        self.rank = len(self.pivots)
        self.red = red[:, : M.cols]
        self.transform = red[:, M.cols:]
        self.ncols = M.cols

    def solve(self, b: np.ndarray) -> np.ndarray | None:
        """A solution with free variables set to zero, or None if inconsistent."""
        fld = self.field
        c = _matmul_codes(fld, self.transform, b.reshape(-1, 1))[:, 0]
        if np.any(c[self.rank:] != 0):
            return None
        x = np.zeros(self.ncols, dtype=np.int16)
        for r, pc in enumerate(self.pivots):
            x[pc] = c[r]
        return x


# ---------------------------------------------------------------------------
# field embeddings


@lru_cache(maxsize=None)
def embed_table(src: FieldSpec, dst: FieldSpec) -> np.ndarray:
    """Code-translation table for the canonical embedding F_{p^e} -> F_{p^(e*d)}.

    The generator of src maps to the first root (in code order) of src's
    modulus inside dst."""
    if src.p != dst.p or dst.e % src.e != 0:
        raise ValueError("no embedding between these fields")
    if src is dst:
        return np.arange(src.q, dtype=np.int16)
    root = None
    for cand in dst.elements():
        acc = dst.zero
        for c in reversed(src.modulus):
            acc = acc * cand + dst.from_int(c)
        if acc.is_zero():
            root = cand
            break
    assert root is not None, "modulus must split in the extension"
    table = np.zeros(src.q, dtype=np.int16)
    for code in range(src.q):
        acc = dst.zero
        for c in reversed(src.code_coeffs(code)):
            acc = acc * root + dst.from_int(c)
        table[code] = acc.code
    return table


def embed_element(a: FieldElement, dst: FieldSpec) -> FieldElement:
    return FieldElement(dst, int(embed_table(a.field, dst)[a.code]))
