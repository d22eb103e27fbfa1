"""The catalog of group algebras of small unipotent supergroup schemes.

Every algebra here is a commutative monomial algebra: finitely many
generators, each with a parity, an exponent bound N_g, and a power rule
``g^N_g -> c * monomial`` (or zero).  That shape covers the whole catalog —
truncated polynomial algebras, the odd exterior generator with
``sigma^2 = s^p``, and their tensor products — and keeps multiplication a
pure monomial rewrite.  Coproducts are elements of A (x) A with the Koszul
sign in the tensor multiplication; the Witt-type coproducts evaluate the
integer structure polynomials S_i from :mod:`superelem.witt`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import witt
from .linalg import FieldElement, FieldSpec

_DIM_LIMIT = 300_000


@dataclass(frozen=True)
class Generator:
    name: str
    parity: int
    bound: int
    power_image: Optional[tuple[int, tuple[int, ...]]]  # (coeff code, exponents) or None = 0
    zdegree: Optional[int] = None


class SuperAlgebra:
    """Finite-dimensional commutative monomial algebra over a FieldSpec."""

    def __init__(self, fld: FieldSpec, generators: Sequence[Generator], label: str = ""):
        self.field = fld
        self.generators = tuple(generators)
        self.label = label
        dim = 1
        for g in self.generators:
            if g.bound < 2:
                raise ValueError(f"generator {g.name}: bound must be >= 2")
            if g.parity not in (0, 1):
                raise ValueError("parity must be 0 or 1")
            dim *= g.bound
        if dim > _DIM_LIMIT:
            raise ValueError(f"algebra dimension {dim} exceeds limit")
        self.names = tuple(g.name for g in self.generators)
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be distinct")
        self.basis: list[tuple[int, ...]] = [
            tuple(reversed(mon))
            for mon in itertools.product(*[range(g.bound) for g in reversed(self.generators)])
        ]
        self.basis.sort()
        self.index = {m: i for i, m in enumerate(self.basis)}
        self.dim = dim
        self._parities = np.array([self.monomial_parity(m) for m in self.basis], dtype=np.int8)
        self._prod = None

    # -- monomials --------------------------------------------------------------

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def monomial_parity(self, exps: tuple[int, ...]) -> int:
        return sum(e * g.parity for e, g in zip(exps, self.generators)) & 1

    def monomial_zdegree(self, exps: tuple[int, ...]) -> Optional[int]:
        if any(g.zdegree is None for g in self.generators):
            return None
        return sum(e * g.zdegree for e, g in zip(exps, self.generators))

    def reduce_monomial(self, exps: Sequence[int]) -> Optional[tuple[int, tuple[int, ...]]]:
        """Rewrite to the reduced basis: returns (coeff code, monomial) or None
        for zero.  Confluent because every power image is a single monomial."""
        exps = list(exps)
        coeff = 1
        mul = self.field.tables.mul
        guard = 0
        while True:
            for i, g in enumerate(self.generators):
                if exps[i] >= g.bound:
                    break
            else:
                return (coeff, tuple(exps))
            guard += 1
            if guard > 10_000:
                raise RuntimeError("power rules did not terminate")
            g = self.generators[i]
            exps[i] -= g.bound
            if g.power_image is None:
                return None
            c, mon = g.power_image
            coeff = int(mul[coeff, c])
            if coeff == 0:
                return None
            for j, e in enumerate(mon):
                exps[j] += e

    def multiply_monomials(self, m1: tuple[int, ...], m2: tuple[int, ...]):
        return self.reduce_monomial([a + b for a, b in zip(m1, m2)])

    def monomial_str(self, exps: tuple[int, ...]) -> str:
        bits = [
            (f"{g.name}^{e}" if e > 1 else g.name)
            for e, g in zip(exps, self.generators)
            if e
        ]
        return "*".join(bits) if bits else "1"

    def parse_monomial(self, text: str) -> tuple[int, ...]:
        exps = [0] * self.ngens
        text = text.strip()
        if text == "1":
            return tuple(exps)
        pos = {g.name: i for i, g in enumerate(self.generators)}
        for factor in text.split("*"):
            if "^" in factor:
                name, _, e = factor.partition("^")
                exps[pos[name.strip()]] += int(e)
            else:
                exps[pos[factor.strip()]] += 1
        return tuple(exps)

    # -- elements ---------------------------------------------------------------

    def zero_el(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def one_el(self) -> "AlgebraElement":
        return AlgebraElement(self, {(0,) * self.ngens: 1})

    def gen_el(self, i) -> "AlgebraElement":
        if isinstance(i, str):
            i = self.names.index(i)
        exps = [0] * self.ngens
        exps[i] = 1
        return AlgebraElement(self, {tuple(exps): 1})

    def element(self, terms: dict[tuple[int, ...], int]) -> "AlgebraElement":
        """Build an element from (possibly unreduced) monomial -> code terms."""
        out: dict[tuple[int, ...], int] = {}
        add, mul = self.field.tables.add, self.field.tables.mul
        for exps, c in terms.items():
            red = self.reduce_monomial(exps)
            if red is None:
                continue
            cc, mon = red
            v = int(add[out.get(mon, 0), int(mul[cc, int(c)])])
            if v:
                out[mon] = v
            else:
                out.pop(mon, None)
        return AlgebraElement(self, out)

    def from_vector(self, vec: np.ndarray) -> "AlgebraElement":
        return AlgebraElement(self, {self.basis[i]: int(c) for i, c in enumerate(vec) if c})

    # -- dense structure (for the homology engine) -------------------------------

    @property
    def prod_table(self):
        """(idx, coef) arrays: basis[i]*basis[j] = coef[i,j] * basis[idx[i,j]]."""
        if self._prod is None:
            D = self.dim
            idx = np.zeros((D, D), dtype=np.int32)
            coef = np.zeros((D, D), dtype=np.int16)
            for i, m1 in enumerate(self.basis):
                for j in range(i, D):
                    red = self.multiply_monomials(m1, self.basis[j])
                    if red is not None:
                        c, mon = red
                        k = self.index[mon]
                        idx[i, j] = idx[j, i] = k
                        coef[i, j] = coef[j, i] = c
            self._prod = (idx, coef)
        return self._prod

    def gen_matrix(self, i: int) -> np.ndarray:
        """Left multiplication by generator i on the monomial basis (codes)."""
        D = self.dim
        out = np.zeros((D, D), dtype=np.int16)
        gexps = [0] * self.ngens
        gexps[i] = 1
        for j, mon in enumerate(self.basis):
            red = self.multiply_monomials(tuple(gexps), mon)
            if red is not None:
                c, m = red
                out[self.index[m], j] = c
        return out

    def parities(self) -> np.ndarray:
        return self._parities

    def __repr__(self):
        return f"SuperAlgebra({self.label or ','.join(self.names)}; dim {self.dim} over F_{self.field.q})"

    # -- serialization ------------------------------------------------------------

    def to_json(self, hopf: Optional["HopfData"] = None) -> dict:
        gens = []
        for g in self.generators:
            if g.power_image is None:
                img = {}
            else:
                c, mon = g.power_image
                img = {self.monomial_str(mon): list(self.field.code_coeffs(c))}
            gens.append(
                {
                    "name": g.name,
                    "parity": g.parity,
                    "zdegree": g.zdegree,
                    "bound": g.bound,
                    "power_image": img,
                }
            )
        out = {"field": self.field.to_json(), "generators": gens}
        if hopf is not None:
            cop = {}
            for i, g in enumerate(self.generators):
                terms = []
                for (m1, m2), c in sorted(hopf.coproduct[i].terms.items()):
                    terms.append([self.monomial_str(m1), self.monomial_str(m2), list(self.field.code_coeffs(c))])
                cop[g.name] = terms
            out["coproduct"] = cop
        return out


class AlgebraElement:
    """Element of a SuperAlgebra: reduced-monomial -> coefficient code."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: SuperAlgebra, terms: dict[tuple[int, ...], int]):
        self.algebra = algebra
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and self.algebra is other.algebra
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((id(self.algebra), frozenset(self.terms.items())))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        add = self.algebra.field.tables.add
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = int(add[out.get(m, 0), c])
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return AlgebraElement(self.algebra, out)

    def __neg__(self) -> "AlgebraElement":
        neg = self.algebra.field.tables.neg
        return AlgebraElement(self.algebra, {m: int(neg[c]) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, code: int) -> "AlgebraElement":
        if code == 0:
            return self.algebra.zero_el()
        mul = self.algebra.field.tables.mul
        return AlgebraElement(self.algebra, {m: int(mul[c, code]) for m, c in self.terms.items()})

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        A = self.algebra
        add, mul = A.field.tables.add, A.field.tables.mul
        out: dict[tuple[int, ...], int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                red = A.multiply_monomials(m1, m2)
                if red is None:
                    continue
                cr, mon = red
                v = int(add[out.get(mon, 0), int(mul[int(mul[c1, c2]), cr])])
                if v:
                    out[mon] = v
                else:
                    out.pop(mon, None)
        return AlgebraElement(A, out)

    def __pow__(self, n: int) -> "AlgebraElement":
        if n == 0:
            return self.algebra.one_el()
        # freshman's dream for p-power exponents of even elements
        p = self.algebra.field.p
        if self.is_even():
            k = 0
            nn = n
            while nn % p == 0:
                nn //= p
                k += 1
            base = self.frobenius_power(k) if k else self
            n = nn
        else:
            base = self
        result = None
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius_power(self, k: int) -> "AlgebraElement":
        """x -> x^(p^k), termwise; valid since the algebra is commutative and
        every stored monomial here is even (checked by the caller)."""
        A = self.algebra
        t = A.field.tables
        p = A.field.p
        out: dict[tuple[int, ...], int] = {}
        add = t.add
        for m, c in self.terms.items():
            cc = c
            for _ in range(k):
                cc = int(t.frob[cc])
            red = A.reduce_monomial([e * p**k for e in m])
            if red is None:
                continue
            cr, mon = red
            v = int(add[out.get(mon, 0), int(t.mul[cc, cr])])
            if v:
                out[mon] = v
            else:
                out.pop(mon, None)
        return AlgebraElement(A, out)

    def is_even(self) -> bool:
        return all(self.algebra.monomial_parity(m) == 0 for m in self.terms)

    def parity(self) -> Optional[int]:
        """Common parity of all monomials, or None if mixed/zero."""
        ps = {self.algebra.monomial_parity(m) for m in self.terms}
        return ps.pop() if len(ps) == 1 else None

    def augmentation(self) -> int:
        return self.terms.get((0,) * self.algebra.ngens, 0)

    def to_vector(self) -> np.ndarray:
        v = np.zeros(self.algebra.dim, dtype=np.int16)
        for m, c in self.terms.items():
            v[self.algebra.index[m]] = c
        return v

    def __repr__(self):
        if not self.terms:
            return "0"
        A = self.algebra
        bits = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mon = A.monomial_str(m)
            if mon == "1":
                bits.append(str(FieldElement(A.field, c)))
            elif c == 1:
                bits.append(mon)
            else:
                bits.append(f"{FieldElement(A.field, c)}*{mon}")
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# tensor square elements (for coproducts)


class TensorElement:
    """Element of A (x) A with the super multiplication
    (a (x) b)(a' (x) b') = (-1)^(|b||a'|) aa' (x) bb'."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: SuperAlgebra, terms: dict[tuple[tuple[int, ...], tuple[int, ...]], int]):
        self.algebra = algebra
        self.terms = terms

    @staticmethod
    def zero(A: SuperAlgebra) -> "TensorElement":
        return TensorElement(A, {})

    @staticmethod
    def unit(A: SuperAlgebra) -> "TensorElement":
        u = (0,) * A.ngens
        return TensorElement(A, {(u, u): 1})

    @staticmethod
    def simple(a: AlgebraElement, b: AlgebraElement) -> "TensorElement":
        A = a.algebra
        mul = A.field.tables.mul
        out = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                c = int(mul[c1, c2])
                if c:
                    out[(m1, m2)] = c
        return TensorElement(A, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, TensorElement)
            and self.algebra is other.algebra
            and self.terms == other.terms
        )

    def __add__(self, other: "TensorElement") -> "TensorElement":
        add = self.algebra.field.tables.add
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = int(add[out.get(m, 0), c])
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return TensorElement(self.algebra, out)

    def __neg__(self) -> "TensorElement":
        neg = self.algebra.field.tables.neg
        return TensorElement(self.algebra, {m: int(neg[c]) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, code: int) -> "TensorElement":
        if code == 0:
            return TensorElement.zero(self.algebra)
        mul = self.algebra.field.tables.mul
        return TensorElement(self.algebra, {m: int(mul[c, code]) for m, c in self.terms.items()})

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        A = self.algebra
        t = A.field.tables
        add, mul, neg = t.add, t.mul, t.neg
        par = A.monomial_parity
        out: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
        for (a1, b1), c1 in self.terms.items():
            pb1 = par(b1)
            for (a2, b2), c2 in other.terms.items():
                sign = pb1 and par(a2)
                r1 = A.multiply_monomials(a1, a2)
                if r1 is None:
                    continue
                r2 = A.multiply_monomials(b1, b2)
                if r2 is None:
                    continue
                ca, ma = r1
                cb, mb = r2
                c = int(mul[int(mul[c1, c2]), int(mul[ca, cb])])
                if sign:
                    c = int(neg[c])
                key = (ma, mb)
                v = int(add[out.get(key, 0), c])
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return TensorElement(A, out)

    def is_even_even(self) -> bool:
        par = self.algebra.monomial_parity
        return all(par(a) == 0 and par(b) == 0 for a, b in self.terms)

    def frobenius_power(self, k: int) -> "TensorElement":
        """Termwise x -> x^(p^k); only valid when every term is even (x) even."""
        A = self.algebra
        t = A.field.tables
        p = A.field.p
        out: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
        add = t.add
        for (a, b), c in self.terms.items():
            cc = c
            for _ in range(k):
                cc = int(t.frob[cc])
            ra = A.reduce_monomial([e * p**k for e in a])
            if ra is None:
                continue
            rb = A.reduce_monomial([e * p**k for e in b])
            if rb is None:
                continue
            ca, ma = ra
            cb, mb = rb
            v = int(add[out.get((ma, mb), 0), int(t.mul[cc, int(t.mul[ca, cb])])])
            if v:
                out[(ma, mb)] = v
            else:
                out.pop((ma, mb), None)
        return TensorElement(A, out)

    def __pow__(self, n: int) -> "TensorElement":
        if n == 0:
            return TensorElement.unit(self.algebra)
        p = self.algebra.field.p
        if self.is_even_even():
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            base = self.frobenius_power(k) if k else self
        else:
            base = self
        result = None
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def swap(self) -> "TensorElement":
        """The super twist: m1 (x) m2 -> (-1)^(|m1||m2|) m2 (x) m1."""
        A = self.algebra
        neg = A.field.tables.neg
        par = A.monomial_parity
        out = {}
        for (a, b), c in self.terms.items():
            if par(a) and par(b):
                c = int(neg[c])
            out[(b, a)] = c
        return TensorElement(A, out)

    def counit_left(self) -> AlgebraElement:
        """(eps (x) id) applied to the element."""
        A = self.algebra
        unit = (0,) * A.ngens
        out: dict[tuple[int, ...], int] = {}
        add = A.field.tables.add
        for (a, b), c in self.terms.items():
            if a == unit:
                v = int(add[out.get(b, 0), c])
                if v:
                    out[b] = v
                else:
                    out.pop(b, None)
        return AlgebraElement(A, out)

    def counit_right(self) -> AlgebraElement:
        A = self.algebra
        unit = (0,) * A.ngens
        out: dict[tuple[int, ...], int] = {}
        add = A.field.tables.add
        for (a, b), c in self.terms.items():
            if b == unit:
                v = int(add[out.get(a, 0), c])
                if v:
                    out[a] = v
                else:
                    out.pop(a, None)
        return AlgebraElement(A, out)

    def __repr__(self):
        A = self.algebra
        bits = []
        for (a, b) in sorted(self.terms):
            c = self.terms[(a, b)]
            cs = "" if c == 1 else f"{FieldElement(A.field, c)}*"
            bits.append(f"{cs}{A.monomial_str(a)}(x){A.monomial_str(b)}")
        return " + ".join(bits) if bits else "0"


# ---------------------------------------------------------------------------
# Hopf data


@dataclass
class HopfData:
    algebra: SuperAlgebra
    coproduct: dict[int, TensorElement]  # per generator index
    antipode: dict[int, AlgebraElement] | None = None  # optional, per generator

    def delta_gen(self, i: int) -> TensorElement:
        return self.coproduct[i]


class _DeltaCache:
    """Powers Delta(g)^k per generator, built incrementally."""

    def __init__(self, hopf: HopfData):
        self.hopf = hopf
        self.pows: dict[int, list[TensorElement]] = {}

    def gen_power(self, i: int, k: int) -> TensorElement:
        lst = self.pows.setdefault(i, [TensorElement.unit(self.hopf.algebra)])
        while len(lst) <= k:
            lst.append(lst[-1] * self.hopf.coproduct[i])
        return lst[k]

    def monomial(self, exps: tuple[int, ...]) -> TensorElement:
        result = TensorElement.unit(self.hopf.algebra)
        for i, e in enumerate(exps):
            if e:
                result = result * self.gen_power(i, e)
        return result

    def element(self, el: AlgebraElement) -> TensorElement:
        out = TensorElement.zero(self.hopf.algebra)
        for m, c in el.terms.items():
            out = out + self.monomial(m).scale(c)
        return out


@dataclass
class CheckReport:
    passed: bool
    checks: list[str]
    failures: list[str]

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks, "failures": self.failures}


def hopf_check(A: SuperAlgebra, H: HopfData) -> CheckReport:
    """Verify: (a) Delta respects the power rules, (b) coassociativity on
    generators, (c) counit axioms, (d) cocommutativity up to Koszul sign,
    (e) the antipode axiom where an antipode is supplied."""
    checks: list[str] = []
    failures: list[str] = []
    cache = _DeltaCache(H)
    unit_mon = (0,) * A.ngens

    for i, g in enumerate(A.generators):
        dg = H.coproduct[i]
        # parity homogeneity of the coproduct
        name = f"parity(Delta({g.name}))"
        checks.append(name)
        par = A.monomial_parity
        if any((par(a) + par(b)) & 1 != g.parity for (a, b) in dg.terms):
            failures.append(name)

        # (a) relations
        name = f"relation(Delta({g.name})^{g.bound})"
        checks.append(name)
        lhs = cache.gen_power(i, g.bound)
        if g.power_image is None:
            rhs = TensorElement.zero(A)
        else:
            c, mon = g.power_image
            rhs = cache.monomial(mon).scale(c)
        if lhs != rhs:
            failures.append(name)

        # (b) coassociativity on generators
        name = f"coassoc({g.name})"
        checks.append(name)
        left: dict[tuple, int] = {}
        right: dict[tuple, int] = {}
        addt = A.field.tables.add
        mult = A.field.tables.mul
        for (m1, m2), c in dg.terms.items():
            for (a, b), c2 in cache.monomial(m1).terms.items():
                key = (a, b, m2)
                v = int(addt[left.get(key, 0), int(mult[c, c2])])
                if v:
                    left[key] = v
                else:
                    left.pop(key, None)
            for (a, b), c2 in cache.monomial(m2).terms.items():
                key = (m1, a, b)
                v = int(addt[right.get(key, 0), int(mult[c, c2])])
                if v:
                    right[key] = v
                else:
                    right.pop(key, None)
        if left != right:
            failures.append(name)

        # (c) counit axioms
        name = f"counit({g.name})"
        checks.append(name)
        ge = A.gen_el(i)
        if dg.counit_left() != ge or dg.counit_right() != ge:
            failures.append(name)

        # (d) cocommutativity
        name = f"cocomm({g.name})"
        checks.append(name)
        if dg.swap() != dg:
            failures.append(name)

        # (e) antipode axiom: mult (S (x) id) Delta(g) = eps(g) 1 = 0
        if H.antipode is not None and i in H.antipode:
            name = f"antipode({g.name})"
            checks.append(name)
            s_img = H.antipode[i]
            acc = A.zero_el()
            for (m1, m2), c in dg.terms.items():
                sm = A.one_el()
                for j, e in enumerate(m1):
                    if e:
                        sm = sm * (H.antipode[j] ** e)
                acc = acc + (sm * AlgebraElement(A, {m2: 1})).scale(c)
            if not acc.is_zero():
                failures.append(name)

    return CheckReport(not failures, checks, failures)


# ---------------------------------------------------------------------------
# catalog


def _witt_coproduct(A: SuperAlgebra, sgen_indices: list[int], p: int) -> dict[int, TensorElement]:
    """Delta(s_i) = S_(i-1)(s_1 (x) 1, ..., s_i (x) 1, 1 (x) s_1, ..., 1 (x) s_i)."""
    table = witt.build_witt_table(len(sgen_indices) - 1, p)
    out = {}
    one = A.one_el()
    for i, gi in enumerate(sgen_indices):
        left = [TensorElement.simple(A.gen_el(sgen_indices[j]), one) for j in range(i + 1)]
        right = [TensorElement.simple(one, A.gen_el(sgen_indices[j])) for j in range(i + 1)]
        out[gi] = table.S[i].evaluate(
            left + right, lambda c: TensorElement.unit(A).scale(A.field.from_int(c).code)
        )
    return out


def _mu_coproduct(A: SuperAlgebra, sgen_indices: list[int], sn_idx: int, m: int, mu_code: int, p: int) -> dict[int, TensorElement]:
    """Delta(s_i) = S_i(mu s_n^(p^m) (x) 1, s_1 (x) 1, ..., 1 (x) mu s_n^(p^m), 1 (x) s_1, ...)."""
    n = len(sgen_indices)
    table = witt.build_witt_table(n, p)
    one = A.one_el()
    exps = [0] * A.ngens
    exps[sn_idx] = p**m
    twist = AlgebraElement(A, {tuple(exps): 1}).scale(mu_code)
    out = {}
    for i, gi in enumerate(sgen_indices):
        left = [TensorElement.simple(twist, one)] + [
            TensorElement.simple(A.gen_el(sgen_indices[j]), one) for j in range(i + 1)
        ]
        right = [TensorElement.simple(one, twist)] + [
            TensorElement.simple(one, A.gen_el(sgen_indices[j])) for j in range(i + 1)
        ]
        out[gi] = table.S[i + 1].evaluate(
            left + right, lambda c: TensorElement.unit(A).scale(A.field.from_int(c).code)
        )
    return out


def _witt_antipode(A: SuperAlgebra, sgen_indices: list[int], p: int) -> dict[int, AlgebraElement]:
    table = witt.build_witt_table(len(sgen_indices) - 1, p)
    out = {}
    for i, gi in enumerate(sgen_indices):
        args = [A.gen_el(sgen_indices[j]) for j in range(i + 1)]
        out[gi] = table.N[i].evaluate(args, lambda c: A.one_el().scale(A.field.from_int(c).code))
    return out


_catalog_cache: dict[tuple, tuple[SuperAlgebra, Optional[HopfData]]] = {}


def catalog(name: str, fld: FieldSpec, **params) -> tuple[SuperAlgebra, Optional[HopfData]]:
    """Construct a catalog algebra (+ Hopf data where the coproduct is part of
    the catalog).  Names: Ga_r, Ga_minus, Zp_power, W_m1, W_m1_minus, E_mn,
    E_mn_minus, E_mn_mu, E_mn_mu_minus.

    Instances are cached per (name, field, parameters), so repeated calls
    return the identical object and elements from separate call sites mix."""
    if "mu" in params:
        params = dict(params, mu=fld.element(params["mu"]).code)
    key = (name, fld, tuple(sorted(params.items())))
    hit = _catalog_cache.get(key)
    if hit is not None:
        return hit
    result = _build_catalog(name, fld, **params)
    _catalog_cache[key] = result
    return result


def _build_catalog(name: str, fld: FieldSpec, **params) -> tuple[SuperAlgebra, Optional[HopfData]]:
    p = fld.p

    if name == "Ga_r":
        r = params["r"]
        if r < 0:
            raise ValueError("r must be >= 0")
        gens = [Generator(f"s{i+1}", 0, p, None) for i in range(r)]
        A = SuperAlgebra(fld, gens, label=f"Ga({r})")
        if r == 0:
            return A, HopfData(A, {}, {})
        idxs = list(range(r))
        H = HopfData(A, _witt_coproduct(A, idxs, p), _witt_antipode(A, idxs, p))
        return A, H

    if name == "Ga_minus":
        A = SuperAlgebra(fld, [Generator("sigma", 1, 2, None)], label="Ga-")
        H = HopfData(
            A,
            {0: TensorElement.simple(A.gen_el(0), A.one_el()) + TensorElement.simple(A.one_el(), A.gen_el(0))},
            {0: -A.gen_el(0)},
        )
        return A, H

    if name == "Zp_power":
        s = params["s"]
        if s < 0:
            raise ValueError("s must be >= 0")
        gens = [Generator(f"y{i+1}", 0, p, None) for i in range(s)]
        # group-like coproduct deliberately not modeled; algebra structure only
        return SuperAlgebra(fld, gens, label=f"Zp^{s}"), None

    if name == "W_m1":
        m = params["m"]
        if m < 1:
            raise ValueError("m must be >= 1")
        A = SuperAlgebra(fld, [Generator("s", 0, p**m, None)], label=f"W({m},1)")
        H = HopfData(
            A,
            {0: TensorElement.simple(A.gen_el(0), A.one_el()) + TensorElement.simple(A.one_el(), A.gen_el(0))},
            {0: -A.gen_el(0)},
        )
        return A, H

    if name == "W_m1_minus":
        m = params["m"]
        if m < 1:
            raise ValueError("m must be >= 1")
        A = SuperAlgebra(fld, [Generator("sigma", 1, 2 * p**m, None)], label=f"W({m},1)-")
        H = HopfData(
            A,
            {0: TensorElement.simple(A.gen_el(0), A.one_el()) + TensorElement.simple(A.one_el(), A.gen_el(0))},
            {0: -A.gen_el(0)},
        )
        return A, H

    if name in ("E_mn", "E_mn_minus"):
        m, n = params["m"], params["n"]
        if m < 1 or n < 1:
            raise ValueError("m, n must be >= 1")
        gens = [Generator(f"s{i+1}", 0, p, None) for i in range(n - 1)]
        gens.append(Generator(f"s{n}", 0, p**m, None))
        odd = name == "E_mn_minus"
        if odd:
            if m == 1:
                # sigma^2 = s_n^p is already zero when s_n^p = 0
                gens.append(Generator("sigma", 1, 2, None))
            else:
                img_exps = [0] * (n + 1)
                img_exps[n - 1] = p
                gens.append(Generator("sigma", 1, 2, (1, tuple(img_exps))))
        A = SuperAlgebra(fld, gens, label=("E-" if odd else "E") + f"({m},{n})")
        idxs = list(range(n))
        cop = _witt_coproduct(A, idxs, p)
        anti = _witt_antipode(A, idxs, p)
        if odd:
            cop[n] = TensorElement.simple(A.gen_el(n), A.one_el()) + TensorElement.simple(A.one_el(), A.gen_el(n))
            anti[n] = -A.gen_el(n)
        return A, HopfData(A, cop, anti)

    if name in ("E_mn_mu", "E_mn_mu_minus"):
        m, n = params["m"], params["n"]
        mu = params["mu"]
        if m < 1 or n < 1:
            raise ValueError("m, n must be >= 1")
        mu_code = fld.element(mu).code
        if mu_code == 0:
            raise ValueError("mu must be nonzero")
        gens = [Generator(f"s{i+1}", 0, p, None) for i in range(n - 1)]
        gens.append(Generator(f"s{n}", 0, p ** (m + 1), None))
        odd = name == "E_mn_mu_minus"
        if odd:
            img_exps = [0] * (n + 1)
            img_exps[n - 1] = p
            gens.append(Generator("sigma", 1, 2, (1, tuple(img_exps))))
        A = SuperAlgebra(fld, gens, label=("E-" if odd else "E") + f"({m},{n},mu={mu_code})")
        idxs = list(range(n))
        cop = _mu_coproduct(A, idxs, n - 1, m, mu_code, p)
        if odd:
            cop[n] = TensorElement.simple(A.gen_el(n), A.one_el()) + TensorElement.simple(A.one_el(), A.gen_el(n))
        # no antipode: not printed for the mu-twisted coproduct
        return A, HopfData(A, cop, None)

    raise ValueError(f"unknown catalog name {name!r}")


def multiply(A: SuperAlgebra, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
    if u.algebra is not A or v.algebra is not A:
        raise ValueError("elements not over this algebra")
    return u * v


# ---------------------------------------------------------------------------
# tensor products


def tensor(
    A: SuperAlgebra,
    B: SuperAlgebra,
    hopf_a: Optional[HopfData] = None,
    hopf_b: Optional[HopfData] = None,
) -> tuple[SuperAlgebra, Optional[HopfData]]:
    """Tensor product.  With at most one odd-containing factor (true for the
    whole catalog: at most one generator of odd parity is ever present), the
    Koszul rule makes all cross products commute strictly, so the result is
    again a commutative monomial algebra."""
    if A.field is not B.field:
        raise ValueError("field mismatch")
    if any(g.parity for g in A.generators) and any(g.parity for g in B.generators):
        raise ValueError(
            "tensor of two odd-containing algebras is not a commutative monomial algebra"
        )
    names_a = set(A.names)
    rename_b = {nm: (nm if nm not in names_a else nm + "'") for nm in B.names}
    gens = list(A.generators)
    na = len(gens)
    for g in B.generators:
        img = None
        if g.power_image is not None:
            c, mon = g.power_image
            img = (c, (0,) * na + tuple(mon))
        gens.append(Generator(rename_b[g.name], g.parity, g.bound, img, g.zdegree))
    fixed = []
    for g in gens[:na]:
        img = None
        if g.power_image is not None:
            c, mon = g.power_image
            img = (c, tuple(mon) + (0,) * len(B.generators))
        fixed.append(Generator(g.name, g.parity, g.bound, img, g.zdegree))
    gens = fixed + gens[na:]
    C = SuperAlgebra(A.field, gens, label=f"{A.label}(x){B.label}")

    hopf = None
    if hopf_a is not None and hopf_b is not None:
        cop: dict[int, TensorElement] = {}
        for i in range(len(A.generators)):
            cop[i] = _retag_tensor(hopf_a.coproduct[i], C, offset=0, width=A.ngens)
        for i in range(len(B.generators)):
            cop[na + i] = _retag_tensor(hopf_b.coproduct[i], C, offset=na, width=B.ngens)
        anti = None
        if hopf_a.antipode is not None and hopf_b.antipode is not None:
            anti = {}
            for i in range(len(A.generators)):
                anti[i] = _retag_element(hopf_a.antipode[i], C, offset=0)
            for i in range(len(B.generators)):
                anti[na + i] = _retag_element(hopf_b.antipode[i], C, offset=na)
        hopf = HopfData(C, cop, anti)
    return C, hopf


def _retag_element(el: AlgebraElement, C: SuperAlgebra, offset: int) -> AlgebraElement:
    w = C.ngens - el.algebra.ngens - offset
    return AlgebraElement(
        C, {(0,) * offset + m + (0,) * w: c for m, c in el.terms.items()}
    )


def _retag_tensor(t: TensorElement, C: SuperAlgebra, offset: int, width: int) -> TensorElement:
    w = C.ngens - width - offset
    return TensorElement(
        C,
        {
            ((0,) * offset + a + (0,) * w, (0,) * offset + b + (0,) * w): c
            for (a, b), c in t.terms.items()
        },
    )


# ---------------------------------------------------------------------------
# morphisms


@dataclass
class AlgebraMorphism:
    source: SuperAlgebra
    target: SuperAlgebra
    images: tuple[AlgebraElement, ...]

    def apply_gen(self, i: int) -> AlgebraElement:
        return self.images[i]

    def apply(self, el: AlgebraElement) -> AlgebraElement:
        if el.algebra is not self.source:
            raise ValueError("element not over the source algebra")
        out = self.target.zero_el()
        for m, c in el.terms.items():
            term = self.target.one_el()
            for i, e in enumerate(m):
                if e:
                    term = term * (self.images[i] ** e)
            out = out + term.scale(c)
        return out

    def is_identity_shape(self) -> bool:
        return self.source is self.target and all(
            self.images[i] == self.source.gen_el(i) for i in range(self.source.ngens)
        )


def make_morphism(A: SuperAlgebra, B: SuperAlgebra, images) -> AlgebraMorphism:
    """Validated algebra morphism A -> B; ``images`` is one element of B per
    generator of A (dict by name or sequence).  Rejects parity mismatches and
    any violated power rule, naming the relation."""
    if A.field is not B.field:
        raise ValueError("field mismatch")
    if isinstance(images, dict):
        images = [images[g.name] for g in A.generators]
    images = tuple(images)
    if len(images) != A.ngens:
        raise ValueError("need one image per generator")
    for g, img in zip(A.generators, images):
        if img.algebra is not B:
            raise ValueError("image not in the target algebra")
        if not img.is_zero() and img.parity() != g.parity:
            raise ValueError(f"image of {g.name} is not parity-homogeneous of parity {g.parity}")
    phi = AlgebraMorphism(A, B, images)
    for i, g in enumerate(A.generators):
        lhs = images[i] ** g.bound
        if g.power_image is None:
            rhs = B.zero_el()
        else:
            c, mon = g.power_image
            rhs = phi.apply(AlgebraElement(A, {mon: 1})).scale(c)
        if lhs != rhs:
            raise ValueError(
                f"relation violated: {g.name}^{g.bound} "
                f"{'-> 0' if g.power_image is None else '-> power image'} does not map to zero"
            )
    return phi


def identity_morphism(A: SuperAlgebra) -> AlgebraMorphism:
    return make_morphism(A, A, [A.gen_el(i) for i in range(A.ngens)])


def compose(g: AlgebraMorphism, f: AlgebraMorphism) -> AlgebraMorphism:
    """g after f."""
    if f.target is not g.source:
        raise ValueError("morphisms not composable")
    return make_morphism(f.source, g.target, [g.apply(f.images[i]) for i in range(f.source.ngens)])


def is_hopf_morphism(phi: AlgebraMorphism, HA: HopfData, HB: HopfData) -> bool:
    """Check (phi (x) phi) Delta_A(g) == Delta_B(phi(g)) on every generator."""
    A, B = phi.source, phi.target
    cache = _DeltaCache(HB)
    mul = B.field.tables.mul
    add = B.field.tables.add
    for i in range(A.ngens):
        lhs = TensorElement.zero(B)
        for (m1, m2), c in HA.coproduct[i].terms.items():
            piece = TensorElement.simple(
                phi.apply(AlgebraElement(A, {m1: 1})), phi.apply(AlgebraElement(A, {m2: 1}))
            ).scale(c)
            lhs = lhs + piece
        rhs = cache.element(phi.images[i])
        if lhs != rhs:
            return False
    return True


def quotient_emn_minus(m: int, n: int, fld: FieldSpec) -> AlgebraMorphism:
    """The standard quotient kE-_(m,n) ->> kE-_(m-1,n) (identity on names)."""
    if m < 2:
        raise ValueError("need m >= 2")
    A, _ = catalog("E_mn_minus", fld, m=m, n=n)
    B, _ = catalog("E_mn_minus", fld, m=m - 1, n=n)
    return make_morphism(A, B, {g.name: B.gen_el(g.name) for g in A.generators})


def quotient_to_mu(m: int, n: int, mu, fld: FieldSpec) -> AlgebraMorphism:
    """kE-_(m+1,n+1) ->> kE-_(m,n,mu): s_1 -> mu*s_n^(p^m), s_(i+1) -> s_i."""
    A, _ = catalog("E_mn_minus", fld, m=m + 1, n=n + 1)
    B, _ = catalog("E_mn_mu_minus", fld, m=m, n=n, mu=mu)
    p = fld.p
    images = {}
    exps = [0] * B.ngens
    exps[n - 1] = p**m
    images["s1"] = AlgebraElement(B, {tuple(exps): 1}).scale(fld.element(mu).code)
    for i in range(1, n + 1):
        images[f"s{i+1}"] = B.gen_el(f"s{i}")
    images["sigma"] = B.gen_el("sigma")
    return make_morphism(A, B, images)


def include_w_minus(m: int, fld: FieldSpec) -> AlgebraMorphism:
    """kW-_(m-1,1) into kE-_(m,1) sending sigma to sigma."""
    if m < 2:
        raise ValueError("need m >= 2")
    A, _ = catalog("W_m1_minus", fld, m=m - 1)
    B, _ = catalog("E_mn_minus", fld, m=m, n=1)
    return make_morphism(A, B, {"sigma": B.gen_el("sigma")})


def include_odd_primitive(B: SuperAlgebra, element: AlgebraElement, fld: FieldSpec) -> AlgebraMorphism:
    """k[sigma]/(sigma^2) into B along an odd element squaring to zero."""
    A, _ = catalog("Ga_minus", fld)
    return make_morphism(A, B, [element])


# ---------------------------------------------------------------------------
# Z-graded lifting and folding


def z_lift_emn(m: int, n: int, a: int, fld: FieldSpec) -> tuple[SuperAlgebra, Optional[HopfData]]:
    """The Z-graded lift of kE-_(m,n): |sigma| = a*p^n, |s_i| = 2*a*p^(i-1),
    a odd."""
    if a % 2 == 0:
        raise ValueError("the grading parameter a must be odd")
    p = fld.p
    A, H = catalog("E_mn_minus", fld, m=m, n=n)
    gens = []
    for g in A.generators:
        if g.name == "sigma":
            deg = a * p**n
        else:
            i = int(g.name[1:])
            deg = 2 * a * p ** (i - 1)
        gens.append(Generator(g.name, g.parity, g.bound, g.power_image, deg))
    L = SuperAlgebra(fld, gens, label=f"E-({m},{n});Z-graded a={a}")
    cop = {i: TensorElement(L, dict(H.coproduct[i].terms)) for i in H.coproduct}
    anti = {i: AlgebraElement(L, dict(H.antipode[i].terms)) for i in H.antipode} if H.antipode else None
    return L, HopfData(L, cop, anti)


def fold(A: SuperAlgebra, hopf: Optional[HopfData] = None) -> tuple[SuperAlgebra, Optional[HopfData]]:
    """Collapse a Z-grading to Z/2: parity := degree mod 2, preserving all
    structure.  Every generator must carry a Z-degree."""
    gens = []
    for g in A.generators:
        if g.zdegree is None:
            raise ValueError(f"generator {g.name} has no Z-degree")
        gens.append(Generator(g.name, g.zdegree & 1, g.bound, g.power_image, None))
    F = SuperAlgebra(A.field, gens, label=f"fold({A.label})")
    if hopf is None:
        return F, None
    cop = {i: TensorElement(F, dict(hopf.coproduct[i].terms)) for i in hopf.coproduct}
    anti = (
        {i: AlgebraElement(F, dict(hopf.antipode[i].terms)) for i in hopf.antipode}
        if hopf.antipode
        else None
    )
    return F, HopfData(F, cop, anti)


_ELEMENT_TOKEN = None


def parse_element(A: SuperAlgebra, text: str) -> AlgebraElement:
    """Parse 'sigma', 's1^3', '2*s1 + sigma*s1^2' style expressions."""
    import re

    global _ELEMENT_TOKEN
    if _ELEMENT_TOKEN is None:
        _ELEMENT_TOKEN = re.compile(r"\s*(\d+|[A-Za-z][A-Za-z0-9']*|\^|\*|\+|-)")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _ELEMENT_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"cannot tokenize {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    tokens.append(None)
    i = [0]

    def peek():
        return tokens[i[0]]

    def take():
        tok = tokens[i[0]]
        i[0] += 1
        return tok

    def parse_sum():
        el = parse_term()
        while peek() in ("+", "-"):
            op = take()
            rhs = parse_term()
            el = el + rhs if op == "+" else el - rhs
        return el

    def parse_term():
        sign = 1
        while peek() in ("+", "-"):
            if take() == "-":
                sign = -sign
        el = parse_factor()
        while peek() == "*":
            take()
            el = el * parse_factor()
        return el if sign > 0 else -el

    def parse_factor():
        tok = take()
        if tok is None:
            raise ValueError("unexpected end of expression")
        if tok.isdigit():
            el = A.one_el().scale(A.field.from_int(int(tok)).code)
        else:
            if tok not in A.names:
                raise ValueError(f"unknown generator {tok!r}")
            el = A.gen_el(tok)
        while peek() == "^":
            take()
            e = take()
            if not (e and e.isdigit()):
                raise ValueError("exponent must be an integer")
            el = el ** int(e)
        return el

    out = parse_sum()
    if peek() is not None:
        raise ValueError(f"trailing tokens near {peek()!r}")
    return out


def structurally_equal(A: SuperAlgebra, B: SuperAlgebra, ha: Optional[HopfData] = None, hb: Optional[HopfData] = None) -> bool:
    """Same generators (name, parity, bound, power rule) and same coproducts."""
    if A.field is not B.field or A.ngens != B.ngens:
        return False
    for g, h in zip(A.generators, B.generators):
        if (g.name, g.parity, g.bound, g.power_image) != (h.name, h.parity, h.bound, h.power_image):
            return False
    if (ha is None) != (hb is None):
        return False
    if ha is not None:
        for i in range(A.ngens):
            if dict(ha.coproduct[i].terms) != dict(hb.coproduct[i].terms):
                return False
    return True
