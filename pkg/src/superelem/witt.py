"""Witt structure polynomials over Z and truncated Witt vectors over F_q.

The addition/multiplication/negation laws are the integer polynomials S_i,
P_i, N_i obtained by back-substitution through the ghost components
``w_n = p^n Z_n + p^(n-1) Z_(n-1)^p + ... + Z_0^(p^n)``; every division by a
power of p is performed exactly over Z and an inexact division aborts (it
would mean the construction is wrong).  Vectors over F_q evaluate the mod-p
reductions of these laws coordinatewise.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from operator import add as _int_add

import numpy as np

from . import linalg
from .linalg import FieldElement, FieldSpec

_SHIFT = 16  # bits per exponent lane in packed monomial keys
_MASK = (1 << _SHIFT) - 1
_MULTINOMIAL_LIMIT = 300_000


class IntPolynomial:
    """Multivariate polynomial with arbitrary-precision integer coefficients.

    Monomials are packed into a single integer key, 16 bits per variable, so
    monomial products are plain integer additions.  Zero coefficients are
    never stored.
    """

    __slots__ = ("variables", "_terms")

    def __init__(self, variables: tuple[str, ...], terms: dict[int, int]):
        self.variables = variables
        self._terms = terms

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(variables) -> "IntPolynomial":
        return IntPolynomial(tuple(variables), {})

    @staticmethod
    def constant(variables, c: int) -> "IntPolynomial":
        return IntPolynomial(tuple(variables), {0: c} if c else {})

    @staticmethod
    def variable(variables, idx: int, exp: int = 1) -> "IntPolynomial":
        if exp >= (1 << _SHIFT):
            raise ValueError("exponent exceeds the packed-monomial bound")
        return IntPolynomial(tuple(variables), {exp << (_SHIFT * idx): 1})

    @staticmethod
    def from_terms(variables, items) -> "IntPolynomial":
        """items: iterable of (exponent tuple, coefficient)."""
        variables = tuple(variables)
        terms: dict[int, int] = {}
        for exps, c in items:
            key = _pack(exps)
            c = terms.get(key, 0) + int(c)
            if c:
                terms[key] = c
            else:
                terms.pop(key, None)
        return IntPolynomial(variables, terms)

    # -- inspection -----------------------------------------------------------

    def terms(self):
        """Iterate (exponent tuple, coefficient), exponents per self.variables."""
        n = len(self.variables)
        for key, c in self._terms.items():
            yield _unpack(key, n), c

    def sorted_terms(self):
        n = len(self.variables)
        return [(_unpack(k, n), self._terms[k]) for k in sorted(self._terms)]

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        return (
            isinstance(other, IntPolynomial)
            and self.variables == other.variables
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.variables, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "0"
        bits = []
        for exps, c in sorted(self.terms()):
            mon = "*".join(
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(self.variables, exps)
                if e
            )
            bits.append(f"{c}" if not mon else (f"{c}*{mon}" if c != 1 else mon))
        return " + ".join(bits)

    # -- arithmetic -----------------------------------------------------------

    def _require_same(self, other: "IntPolynomial"):
        if self.variables != other.variables:
            raise ValueError("variable sets differ")

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        self._require_same(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            v = terms.get(k, 0) + c
            if v:
                terms[k] = v
            else:
                terms.pop(k, None)
        return IntPolynomial(self.variables, terms)

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(self.variables, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def scale(self, c: int) -> "IntPolynomial":
        if c == 0:
            return IntPolynomial.zero(self.variables)
        return IntPolynomial(self.variables, {k: c * v for k, v in self._terms.items()})

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        self._require_same(other)
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, int] = {}
        get = out.get
        for k2, c2 in b.items():
            for k1, c1 in a.items():
                k = k1 + k2
                v = get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return IntPolynomial(self.variables, out)

    def __pow__(self, n: int) -> "IntPolynomial":
        if n < 0:
            raise ValueError("negative power")
        if n == 0:
            return IntPolynomial.constant(self.variables, 1)
        if n == 1:
            return self
        t = len(self._terms)
        if t == 1:
            ((k, c),) = self._terms.items()
            return IntPolynomial(self.variables, {k * n: c**n})
        if 1 < t <= 8 and math.comb(t + n - 1, t - 1) <= _MULTINOMIAL_LIMIT:
            return self._pow_multinomial(n)
        # binary powering with eager merging
        result = IntPolynomial.constant(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _pow_multinomial(self, n: int) -> "IntPolynomial":
        items = list(self._terms.items())
        t = len(items)
        out: dict[int, int] = {}

        def rec(pos: int, remaining: int, coeff: int, key: int):
            k, c = items[pos]
            if pos == t - 1:
                kk = key + k * remaining
                v = out.get(kk, 0) + coeff * c**remaining
                if v:
                    out[kk] = v
                else:
                    out.pop(kk, None)
                return
            ca = 1  # c^a
            for a in range(remaining + 1):
                rec(pos + 1, remaining - a, coeff * math.comb(remaining, a) * ca, key + k * a)
                ca *= c

        rec(0, n, 1, 0)
        return IntPolynomial(self.variables, out)

    # -- substitution ----------------------------------------------------------

    def substitute(self, args: list["IntPolynomial"]) -> "IntPolynomial":
        """Plug polynomials (over a common variable set) in for the variables."""
        if len(args) != len(self.variables):
            raise ValueError("wrong number of arguments")
        tvars = args[0].variables
        result = IntPolynomial.zero(tvars)
        cache: dict[tuple[int, int], IntPolynomial] = {}

        def arg_pow(i: int, e: int) -> IntPolynomial:
            r = cache.get((i, e))
            if r is None:
                r = args[i] ** e
                cache[(i, e)] = r
            return r

        for exps, c in self.terms():
            term = IntPolynomial.constant(tvars, c)
            for i, e in enumerate(exps):
                if e:
                    term = term * arg_pow(i, e)
            result = result + term
        return result

    def evaluate(self, values: list, scalar):
        """Evaluate at ring elements; ``scalar`` lifts an int into the ring.

        The values must support + and *."""
        result = None
        cache: dict[tuple[int, int], object] = {}

        def val_pow(i: int, e: int):
            r = cache.get((i, e))
            if r is None:
                if e == 1:
                    r = values[i]
                else:
                    h = val_pow(i, e // 2)
                    r = h * h
                    if e & 1:
                        r = r * values[i]
                cache[(i, e)] = r
            return r

        for exps, c in self.terms():
            term = scalar(c)
            for i, e in enumerate(exps):
                if e:
                    term = term * val_pow(i, e)
            result = term if result is None else result + term
        return result if result is not None else scalar(0)

    def divide_exact(self, d: int) -> "IntPolynomial":
        out = {}
        for k, c in self._terms.items():
            q, r = divmod(c, d)
            if r:
                raise ArithmeticError(
                    f"inexact division by {d}: ghost back-substitution is broken"
                )
            out[k] = q
        return IntPolynomial(self.variables, out)


def _pack(exps) -> int:
    key = 0
    for i, e in enumerate(exps):
        e = int(e)
        if e < 0 or e >= (1 << _SHIFT):
            raise ValueError("exponent out of packed range")
        key |= e << (_SHIFT * i)
    return key


def _unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (_SHIFT * i)) & _MASK for i in range(n))


# ---------------------------------------------------------------------------
# ghost components and the structure-polynomial table


def _xy_vars(n: int) -> tuple[str, ...]:
    return tuple(f"X{i}" for i in range(n + 1)) + tuple(f"Y{i}" for i in range(n + 1))


def _z_vars(n: int) -> tuple[str, ...]:
    return tuple(f"Z{i}" for i in range(n + 1))


def ghost_poly(n: int, p: int, variables: tuple[str, ...] | None = None, offset: int = 0) -> IntPolynomial:
    """w_n = sum_i p^i * Z_(i)^(p^(n-i)), in Z0..Zn by default.

    ``offset`` shifts which variable slots are used (for the X/Y blocks of a
    larger variable set)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    variables = _z_vars(n) if variables is None else tuple(variables)
    result = IntPolynomial.zero(variables)
    for i in range(n + 1):
        result = result + IntPolynomial.variable(variables, offset + i, p ** (n - i)).scale(p**i)
    return result


def _embed(poly: IntPolynomial, src_slots: list[int], tvars: tuple[str, ...]) -> IntPolynomial:
    """Rename poly's variables into the slots ``src_slots`` of ``tvars``."""
    items = []
    for exps, c in poly.terms():
        new = [0] * len(tvars)
        for i, e in enumerate(exps):
            new[src_slots[i]] = e
        items.append((tuple(new), c))
    return IntPolynomial.from_terms(tvars, items)


@dataclass(frozen=True)
class WittPolynomialTable:
    """Structure polynomials S_i (sum), P_i (product), N_i (negation) for
    i <= n at the prime p.  S_i/P_i live in (X0..Xi, Y0..Yi), N_i in (Z0..Zi)."""

    p: int
    n: int
    S: tuple[IntPolynomial, ...]
    P: tuple[IntPolynomial, ...]
    N: tuple[IntPolynomial, ...]


_table_cache: dict[tuple[int, int], WittPolynomialTable] = {}
_table_lock = threading.Lock()


def build_witt_table(n: int, p: int) -> WittPolynomialTable:
    if n < 0:
        raise ValueError("n must be >= 0")
    key = (n, p)
    cached = _table_cache.get(key)
    if cached is not None:
        return cached
    with _table_lock:
        cached = _table_cache.get(key)
        if cached is not None:
            return cached
        # reuse the largest smaller table as a warm start
        best = None
        for (m, q), tab in _table_cache.items():
            if q == p and m < n and (best is None or m > best.n):
                best = tab
        S: list[IntPolynomial] = []
        P: list[IntPolynomial] = []
        N: list[IntPolynomial] = []
        for i in range(n + 1):
            if best is not None and i <= best.n:
                S.append(best.S[i])
                P.append(best.P[i])
                N.append(best.N[i])
                continue
            xy = _xy_vars(i)
            wx = ghost_poly(i, p, xy, offset=0)
            wy = ghost_poly(i, p, xy, offset=i + 1)
            num_s = wx + wy
            num_p = wx * wy
            for j in range(i):
                slots = list(range(j + 1)) + list(range(i + 1, i + 1 + j + 1))
                sj = _embed(S[j], slots, xy)
                pj = _embed(P[j], slots, xy)
                num_s = num_s - (sj ** (p ** (i - j))).scale(p**j)
                num_p = num_p - (pj ** (p ** (i - j))).scale(p**j)
            S.append(num_s.divide_exact(p**i))
            P.append(num_p.divide_exact(p**i))
            zv = _z_vars(i)
            num_n = -ghost_poly(i, p, zv)
            for j in range(i):
                nj = _embed(N[j], list(range(j + 1)), zv)
                num_n = num_n - (nj ** (p ** (i - j))).scale(p**j)
            N.append(num_n.divide_exact(p**i))
        table = WittPolynomialTable(p, n, tuple(S), tuple(P), tuple(N))
        _table_cache[key] = table
        return table


def verify_ghost_identity(table: WittPolynomialTable, kind: str, i: int) -> bool:
    """Fresh substitution check of the defining identity for index i:
    w_i(S)=w_i(X)+w_i(Y), w_i(P)=w_i(X)w_i(Y), w_i(N)=-w_i(Z)."""
    p = table.p
    if kind in ("S", "P"):
        xy = _xy_vars(i)
        polys = table.S if kind == "S" else table.P
        args = [_embed(polys[j], list(range(j + 1)) + list(range(i + 1, i + 2 + j)), xy) for j in range(i + 1)]
        lhs = ghost_poly(i, p, _z_vars(i)).substitute(args)
        wx = ghost_poly(i, p, xy, offset=0)
        wy = ghost_poly(i, p, xy, offset=i + 1)
        rhs = wx + wy if kind == "S" else wx * wy
        return lhs == rhs
    if kind == "N":
        zv = _z_vars(i)
        args = [_embed(table.N[j], list(range(j + 1)), zv) for j in range(i + 1)]
        lhs = ghost_poly(i, p, _z_vars(i)).substitute(args)
        return lhs == -ghost_poly(i, p, zv)
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# truncated Witt vectors over F_q


def _compile(poly: IntPolynomial, p: int):
    """Reduce an integer polynomial mod p into an evaluation program:
    a list of (coefficient code, ((var, exp), ...)) with zero terms dropped."""
    prog = []
    for exps, c in poly.sorted_terms():
        cc = c % p
        if cc == 0:
            continue
        factors = tuple((i, e) for i, e in enumerate(exps) if e)
        prog.append((cc, factors))
    return prog


def _eval_batch(prog, cols: list[np.ndarray], fld: FieldSpec) -> np.ndarray:
    """Evaluate a compiled polynomial on parallel columns of element codes."""
    t = fld.tables
    MUL, ADD = t.mul, t.add
    n = cols[0].shape[0]
    powcache: dict[tuple[int, int], np.ndarray] = {}

    def vpow(v: int, k: int) -> np.ndarray:
        r = powcache.get((v, k))
        if r is None:
            if k == 1:
                r = cols[v]
            else:
                h = vpow(v, k // 2)
                r = MUL[h, h]
                if k & 1:
                    r = MUL[r, cols[v]]
            powcache[(v, k)] = r
        return r

    acc = None
    for coeff, factors in prog:
        term = None
        for v, k in factors:
            pv = vpow(v, k)
            term = pv if term is None else MUL[term, pv]
        if term is None:
            term = np.full(n, coeff, dtype=np.int16)
        elif coeff != 1:
            term = MUL[coeff, term]
        acc = term.copy() if acc is None else ADD[acc, term]
    return acc if acc is not None else np.zeros(n, dtype=np.int16)


class WittRing:
    """W_m(F_q): truncated Witt vectors with compiled structure laws."""

    def __init__(self, fld: FieldSpec, m: int):
        if m < 1:
            raise ValueError("length must be >= 1")
        self.field = fld
        self.m = m
        self.table = build_witt_table(m - 1, fld.p)
        self._S = [_compile(s, fld.p) for s in self.table.S]
        self._P = [_compile(s, fld.p) for s in self.table.P]
        self._N = [_compile(s, fld.p) for s in self.table.N]

    # batch ops on arrays of shape (N, m) of element codes ---------------------

    def add_batch(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        cols = [u[:, i] for i in range(self.m)] + [v[:, i] for i in range(self.m)]
        out = np.empty_like(u)
        for i in range(self.m):
            sel = cols[: i + 1] + cols[self.m : self.m + i + 1]
            out[:, i] = _eval_batch(self._S[i], sel, self.field)
        return out

    def mul_batch(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        cols = [u[:, i] for i in range(self.m)] + [v[:, i] for i in range(self.m)]
        out = np.empty_like(u)
        for i in range(self.m):
            sel = cols[: i + 1] + cols[self.m : self.m + i + 1]
            out[:, i] = _eval_batch(self._P[i], sel, self.field)
        return out

    def neg_batch(self, u: np.ndarray) -> np.ndarray:
        cols = [u[:, i] for i in range(self.m)]
        out = np.empty_like(u)
        for i in range(self.m):
            out[:, i] = _eval_batch(self._N[i], cols[: i + 1], self.field)
        return out

    def verschiebung_batch(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        out[:, 1:] = u[:, :-1]
        return out

    def frobenius_batch(self, u: np.ndarray) -> np.ndarray:
        return self.field.tables.frob[u]

    # element API ---------------------------------------------------------------

    def vector(self, entries) -> "WittVector":
        codes = tuple(self.field.element(x).code for x in entries)
        if len(codes) != self.m:
            raise ValueError(f"expected {self.m} coordinates")
        return WittVector(self, codes)

    @property
    def zero(self) -> "WittVector":
        return WittVector(self, (0,) * self.m)

    @property
    def one(self) -> "WittVector":
        return WittVector(self, (1,) + (0,) * (self.m - 1))

    def elements(self):
        from itertools import product

        for codes in product(range(self.field.q), repeat=self.m):
            yield WittVector(self, codes)

    def random(self, rng) -> "WittVector":
        return WittVector(self, tuple(rng.randrange(self.field.q) for _ in range(self.m)))


@lru_cache(maxsize=None)
def witt_ring(fld: FieldSpec, m: int) -> WittRing:
    return WittRing(fld, m)


@dataclass(frozen=True)
class WittVector:
    ring: WittRing
    codes: tuple[int, ...]

    def _arr(self) -> np.ndarray:
        return np.array([self.codes], dtype=np.int16)

    def _check(self, other: "WittVector"):
        if other.ring is not self.ring:
            raise ValueError("Witt vectors from different rings")

    def __add__(self, other: "WittVector") -> "WittVector":
        self._check(other)
        out = self.ring.add_batch(self._arr(), other._arr())
        return WittVector(self.ring, tuple(int(c) for c in out[0]))

    def __mul__(self, other: "WittVector") -> "WittVector":
        self._check(other)
        out = self.ring.mul_batch(self._arr(), other._arr())
        return WittVector(self.ring, tuple(int(c) for c in out[0]))

    def __neg__(self) -> "WittVector":
        out = self.ring.neg_batch(self._arr())
        return WittVector(self.ring, tuple(int(c) for c in out[0]))

    def __sub__(self, other: "WittVector") -> "WittVector":
        return self + (-other)

    def entries(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(self.ring.field, c) for c in self.codes)

    def __repr__(self):
        return f"W{self.ring.m}({list(self.codes)})"


def witt_add(u: WittVector, v: WittVector) -> WittVector:
    return u + v


def witt_mul(u: WittVector, v: WittVector) -> WittVector:
    return u * v


def witt_neg(u: WittVector) -> WittVector:
    return -u


def verschiebung(u: WittVector) -> WittVector:
    return WittVector(u.ring, (0,) + u.codes[:-1])


def frobenius_F(u: WittVector) -> WittVector:
    frob = u.ring.field.tables.frob
    return WittVector(u.ring, tuple(int(frob[c]) for c in u.codes))


def sigma(u: WittVector) -> WittVector:
    """Coefficientwise Frobenius; on truncated vectors it acts like F but is
    kept as a separate named operator."""
    return frobenius_F(u)


def scalar_multiple(k: int, u: WittVector) -> WittVector:
    """k-fold witt_add (k >= 0)."""
    acc = u.ring.zero
    for _ in range(k):
        acc = acc + u
    return acc
