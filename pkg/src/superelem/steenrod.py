"""Symbolic bigraded-commutative rings with Steenrod operations.

Generators carry a bidegree (s, t) with s the cohomological degree and t in
Z/2; the commutation rule yx = (-1)^(ss'+tt') xy forces generators with s+t
odd to be exterior.  Operations P^i and beta P^i are defined on generators by
finite tables (indices stored doubled, so half-integer indices are odd ints)
and extended to monomials by the Cartan formula exactly as printed, with no
extra signs; products of the resulting factors are canonicalized by the ring
sign rule.  The vanishing bounds are P^i = 0 unless 0 <= i <= s/2 and
beta P^i = 0 unless 0 <= i < s/2, with the top case P^(s/2) x = x^p."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .linalg import FieldElement, FieldSpec, reduce_row as _reduce_row, span_insert as _span_insert


@dataclass(frozen=True)
class BigradedGen:
    name: str
    s: int
    t: int  # internal degree mod 2

    @property
    def exterior(self) -> bool:
        return (self.s + self.t) % 2 == 1


class SteenrodRing:
    """Free bigraded-commutative ring on named generators, plus an OpTable."""

    def __init__(self, fld: FieldSpec, gens: Sequence[BigradedGen], label: str = ""):
        self.field = fld
        self.gens = tuple(gens)
        self.label = label
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        self.names = tuple(names)
        self.pos = {n: i for i, n in enumerate(names)}
        # op table: (gen index, op, doubled index) -> SteenrodElement
        self.optable: dict[tuple[int, str, int], "SteenrodElement"] = {}

    def ngens(self) -> int:
        return len(self.gens)

    # -- elements -----------------------------------------------------------

    def zero(self) -> "SteenrodElement":
        return SteenrodElement(self, {})

    def one(self) -> "SteenrodElement":
        return SteenrodElement(self, {(0,) * len(self.gens): 1})

    def gen(self, name_or_idx) -> "SteenrodElement":
        i = self.pos[name_or_idx] if isinstance(name_or_idx, str) else name_or_idx
        e = [0] * len(self.gens)
        e[i] = 1
        return SteenrodElement(self, {tuple(e): 1})

    def monomial(self, exps, coeff: int = 1) -> "SteenrodElement":
        exps = tuple(exps)
        for e, g in zip(exps, self.gens):
            if g.exterior and e > 1:
                return self.zero()
        return SteenrodElement(self, {exps: coeff} if coeff else {})

    def bidegree(self, exps: tuple[int, ...]) -> tuple[int, int]:
        s = sum(e * g.s for e, g in zip(exps, self.gens))
        t = sum(e * g.t for e, g in zip(exps, self.gens)) & 1
        return s, t

    def monomials_of_bidegree(self, s: int, t: int) -> list[tuple[int, ...]]:
        """All reduced monomials of bidegree (s, t), lex order."""
        out = []

        def rec(i, left, exps):
            if i == len(self.gens):
                if left == 0:
                    e = tuple(exps)
                    if self.bidegree(e)[1] == t:
                        out.append(e)
                return
            g = self.gens[i]
            top = 1 if g.exterior else (left // g.s if g.s else 0)
            for e in range(top + 1):
                if e * g.s <= left:
                    rec(i + 1, left - e * g.s, exps + [e])

        rec(0, s, [])
        out.sort()
        return out

    def monomial_str(self, exps) -> str:
        bits = [
            (f"{g.name}^{e}" if e > 1 else g.name)
            for e, g in zip(exps, self.gens)
            if e
        ]
        return "*".join(bits) if bits else "1"

    # -- op table -----------------------------------------------------------

    def set_op(self, gen_name: str, op: str, i2: int, value: "SteenrodElement"):
        self.optable[(self.pos[gen_name], op, i2)] = value

    def op_on_gen(self, gi: int, op: str, i2: int) -> "SteenrodElement":
        """P^i or beta P^i on a single generator, by table + general rules."""
        g = self.gens[gi]
        if (i2 & 1) != (g.t & 1):
            return self.zero()  # indices of the wrong parity act as zero inside Cartan sums
        hit = self.optable.get((gi, op, i2))
        if hit is not None:
            return hit
        if op == "P":
            if i2 < 0 or i2 > g.s:
                return self.zero()
            if i2 == g.s:  # top power: P^(s/2) x = x^p
                return self.gen(gi) ** self.field.p
            return self.zero()
        if op == "betaP":
            if i2 < 0 or i2 >= g.s:
                return self.zero()
            return self.zero()
        raise ValueError(f"unknown operation {op!r}")

    def __repr__(self):
        return f"SteenrodRing({self.label or ','.join(self.names)})"


class SteenrodElement:
    """Sum of coefficient * monomial, exponents over the ring's generators,
    canonicalized (exterior exponents <= 1, Koszul signs absorbed)."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: SteenrodRing, terms: dict[tuple[int, ...], int]):
        self.ring = ring
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, SteenrodElement)
            and self.ring is other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((id(self.ring), frozenset(self.terms.items())))

    def __add__(self, other: "SteenrodElement") -> "SteenrodElement":
        add = self.ring.field.tables.add
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = int(add[out.get(m, 0), c])
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return SteenrodElement(self.ring, out)

    def __neg__(self) -> "SteenrodElement":
        neg = self.ring.field.tables.neg
        return SteenrodElement(self.ring, {m: int(neg[c]) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, code: int) -> "SteenrodElement":
        if code == 0:
            return self.ring.zero()
        mul = self.ring.field.tables.mul
        return SteenrodElement(self.ring, {m: int(mul[c, code]) for m, c in self.terms.items()})

    def __mul__(self, other: "SteenrodElement") -> "SteenrodElement":
        R = self.ring
        t = R.field.tables
        out: dict[tuple[int, ...], int] = {}
        gens = R.gens
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                # Koszul sign for interleaving m2's factors past m1's
                sign = 0
                zero = False
                for i, g in enumerate(gens):
                    if g.exterior and m1[i] and m2[i]:
                        zero = True
                        break
                if zero:
                    continue
                for i in range(len(gens)):
                    if not m2[i]:
                        continue
                    gi = gens[i]
                    for j in range(i + 1, len(gens)):
                        if m1[j]:
                            gj = gens[j]
                            sign += m2[i] * m1[j] * (gi.s * gj.s + gi.t * gj.t)
                c = int(t.mul[c1, c2])
                if sign & 1:
                    c = int(t.neg[c])
                key = tuple(a + b for a, b in zip(m1, m2))
                v = int(t.add[out.get(key, 0), c])
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return SteenrodElement(R, out)

    def __pow__(self, n: int) -> "SteenrodElement":
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def bidegree(self) -> Optional[tuple[int, int]]:
        degs = {self.ring.bidegree(m) for m in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def homogeneous_parts(self) -> dict[tuple[int, int], "SteenrodElement"]:
        parts: dict[tuple[int, int], dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.ring.bidegree(m), {})[m] = c
        return {bd: SteenrodElement(self.ring, t) for bd, t in parts.items()}

    def to_vector(self, monomials: list[tuple[int, ...]]) -> np.ndarray:
        idx = {m: i for i, m in enumerate(monomials)}
        v = np.zeros(len(monomials), dtype=np.int16)
        for m, c in self.terms.items():
            v[idx[m]] = c
        return v

    def __repr__(self):
        if not self.terms:
            return "0"
        R = self.ring
        fld = R.field
        bits = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mon = R.monomial_str(m)
            if mon == "1":
                bits.append(repr(FieldElement(fld, c)))
            elif c == 1:
                bits.append(mon)
            elif fld.e == 1 and c == fld.p - 1:
                bits.append(f"-{mon}")
            else:
                bits.append(f"{FieldElement(fld, c)}*{mon}")
        return " + ".join(bits).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# the standard rings and their tables


def standard_ring(r: int, s: int, epsilon: int, fld: FieldSpec) -> SteenrodRing:
    """H of Ga(r) x (Ga^-)^eps x (Z/p)^s:
    k[x_1..x_r] (x) Lambda(l_1..l_r) (x) k[zeta]^eps (x) k[z_1..z_s] (x) Lambda(y_1..y_s),
    with the printed operation table (conventions l_(r+1) = x_(r+1) = 0)."""
    if r < 0 or s < 0 or epsilon not in (0, 1):
        raise ValueError("need r, s >= 0 and epsilon in {0, 1}")
    gens = []
    gens += [BigradedGen(f"l{i+1}", 1, 0) for i in range(r)]
    gens += [BigradedGen(f"x{i+1}", 2, 0) for i in range(r)]
    if epsilon:
        gens.append(BigradedGen("zeta", 1, 1))
    gens += [BigradedGen(f"y{i+1}", 1, 0) for i in range(s)]
    gens += [BigradedGen(f"z{i+1}", 2, 0) for i in range(s)]
    R = SteenrodRing(fld, gens, label=f"std:{r},{s},{epsilon}")
    p = fld.p
    for i in range(1, r + 1):
        R.set_op(f"l{i}", "P", 0, R.gen(f"l{i+1}") if i < r else R.zero())
        R.set_op(f"l{i}", "betaP", 0, -R.gen(f"x{i}"))
        R.set_op(f"x{i}", "P", 0, R.gen(f"x{i+1}") if i < r else R.zero())
        R.set_op(f"x{i}", "betaP", 0, R.zero())
        R.set_op(f"x{i}", "P", 2, R.gen(f"x{i}") ** p)
    if epsilon:
        R.set_op("zeta", "P", 1, R.gen("zeta") ** p)
        R.set_op("zeta", "betaP", 1, R.zero())
    for i in range(1, s + 1):
        R.set_op(f"y{i}", "P", 0, R.gen(f"y{i}"))
        R.set_op(f"y{i}", "betaP", 0, R.gen(f"z{i}"))
        R.set_op(f"z{i}", "P", 0, R.gen(f"z{i}"))
        R.set_op(f"z{i}", "betaP", 0, R.zero())
        R.set_op(f"z{i}", "P", 2, R.gen(f"z{i}") ** p)
    return R


def emn_ring(m: int, n: int, fld: FieldSpec) -> SteenrodRing:
    """H of E^-_(m,n) (m >= 2): k[x_1..x_n, zeta] (x) Lambda(l_1..l_n) with
    the table: P^0 l_i = l_(i+1), beta P^0 l_i = -x_i (i < n);
    P^0 l_n = 0, beta P^0 l_n = -zeta^2; P^0 x_i = x_(i+1) (i < n),
    P^1 x_i = x_i^p (i < n); every operation vanishes on x_n;
    P^(1/2) zeta = zeta^p."""
    if m < 2 or n < 1:
        raise ValueError("need m >= 2, n >= 1")
    gens = [BigradedGen(f"l{i+1}", 1, 0) for i in range(n)]
    gens += [BigradedGen(f"x{i+1}", 2, 0) for i in range(n)]
    gens.append(BigradedGen("zeta", 1, 1))
    R = SteenrodRing(fld, gens, label=f"emn:{m},{n}")
    p = fld.p
    for i in range(1, n + 1):
        last = i == n
        R.set_op(f"l{i}", "P", 0, R.zero() if last else R.gen(f"l{i+1}"))
        R.set_op(f"l{i}", "betaP", 0, -(R.gen("zeta") ** 2) if last else -R.gen(f"x{i}"))
        R.set_op(f"x{i}", "P", 0, R.zero() if last else R.gen(f"x{i+1}"))
        R.set_op(f"x{i}", "betaP", 0, R.zero())
        R.set_op(f"x{i}", "P", 2, R.zero() if last else R.gen(f"x{i}") ** p)
    R.set_op("zeta", "P", 1, R.gen("zeta") ** p)
    R.set_op("zeta", "betaP", 1, R.zero())
    return R


# ---------------------------------------------------------------------------
# applying operations


class IndexParityError(ValueError):
    pass


def apply_op(R: SteenrodRing, op: str, i2: int, u: SteenrodElement) -> SteenrodElement:
    """P^(i2/2) or beta P^(i2/2) on a homogeneous element; the index parity
    must match the internal degree (integer indices for t even, half-integer
    for t odd), otherwise the operation is undefined and rejected."""
    if u.is_zero():
        return R.zero()
    bd = u.bidegree()
    if bd is None:
        raise ValueError("operation applied to an inhomogeneous element")
    if (i2 & 1) != (bd[1] & 1):
        raise IndexParityError(
            f"index {i2}/2 has the wrong parity for internal degree {bd[1]}"
        )
    out = R.zero()
    cache: dict = {}
    t = R.field.tables
    for mon, c in u.terms.items():
        # semilinearity: P^i(a u) = a^p P^i(u)
        val = _op_monomial(R, op, i2, mon, cache)
        out = out + val.scale(int(t.frob[c]))
    return out


def _op_monomial(R: SteenrodRing, op: str, i2: int, mon: tuple[int, ...], cache) -> SteenrodElement:
    key = (op, i2, mon)
    hit = cache.get(key)
    if hit is not None:
        return hit
    # find the first generator present and split one factor off
    gi = next((i for i, e in enumerate(mon) if e), None)
    if gi is None:
        # the unit: P^0(1) = 1, everything else vanishes
        if op == "P" and i2 == 0:
            result = R.one()
        else:
            result = R.zero()
        cache[key] = result
        return result
    rest = list(mon)
    rest[gi] -= 1
    rest = tuple(rest)
    g = R.gens[gi]
    result = R.zero()
    # Cartan: P^j(g . rest) = sum_i P^i(g) P^(j-i)(rest);
    # beta P^j(g . rest) = sum_i beta P^i(g) P^(j-i)(rest) + P^i(g) beta P^(j-i)(rest)
    for ia in _gen_indices(g):
        ib = i2 - ia
        if op == "P":
            pg = R.op_on_gen(gi, "P", ia)
            if pg.is_zero():
                continue
            pr = _op_monomial(R, "P", ib, rest, cache)
            if not pr.is_zero():
                result = result + pg * pr
        else:
            bg = R.op_on_gen(gi, "betaP", ia)
            if not bg.is_zero():
                pr = _op_monomial(R, "P", ib, rest, cache)
                if not pr.is_zero():
                    result = result + bg * pr
            pg = R.op_on_gen(gi, "P", ia)
            if not pg.is_zero():
                br = _op_monomial(R, "betaP", ib, rest, cache)
                if not br.is_zero():
                    result = result + pg * br
    cache[key] = result
    return result


def _gen_indices(g: BigradedGen):
    """Doubled indices that can act nontrivially on a single generator:
    0 <= i <= s/2 with the parity of t."""
    start = 0 if g.t % 2 == 0 else 1
    return range(start, g.s + 1, 2)


# ---------------------------------------------------------------------------
# saturation under operations, and the dichotomy classifiers


class Saturation:
    """Per-bidegree rref spans of the smallest ideal containing the seeds and
    stable under all defined P^i / beta P^i, truncated at a cohomological
    degree bound."""

    def __init__(self, R: SteenrodRing, seeds: Sequence[SteenrodElement], bound: int):
        self.ring = R
        self.bound = bound
        self.basis_mon: dict[tuple[int, int], list[tuple[int, ...]]] = {}
        self.spans: dict[tuple[int, int], tuple[np.ndarray, tuple]] = {}
        self._opcache: dict = {}
        self._saturate(seeds)

    def _mons(self, bd):
        if bd not in self.basis_mon:
            self.basis_mon[bd] = self.ring.monomials_of_bidegree(*bd)
        return self.basis_mon[bd]

    def _insert(self, el: SteenrodElement) -> bool:
        """Reduce against the span of its bidegree; grow the span if new."""
        if el.is_zero():
            return False
        bd = el.bidegree()
        if bd is None:
            raise ValueError("saturation works with homogeneous elements")
        if bd[0] > self.bound:
            return False
        mons = self._mons(bd)
        vec = el.to_vector(mons)
        fld = self.ring.field
        span, piv = self.spans.get(bd, (np.zeros((0, len(mons)), dtype=np.int16), ()))
        resid = _reduce_row(fld, span, piv, vec)
        if not np.any(resid):
            return False
        self.spans[bd] = _span_insert(fld, span, piv, resid)
        return True

    def _saturate(self, seeds):
        R = self.ring
        work = []
        for seed in seeds:
            for bd, part in seed.homogeneous_parts().items():
                if self._insert(part):
                    work.append(part)
        while work:
            el = work.pop()
            bd = el.bidegree()
            # close under multiplication by every generator
            for i in range(R.ngens()):
                child = R.gen(i) * el
                if self._insert(child):
                    work.append(child)
            # close under all defined operations with results inside the bound
            tpar = bd[1] & 1
            for op in ("P", "betaP"):
                for i2 in range(tpar, bd[0] + 1, 2):
                    target_s = bd[0] + i2 * (R.field.p - 1) + (1 if op == "betaP" else 0)
                    if target_s > self.bound:
                        continue
                    child = apply_op(R, op, i2, el)
                    if self._insert(child):
                        work.append(child)

    def slice_dim(self, s: int, t: int) -> int:
        span = self.spans.get((s, t))
        return 0 if span is None else span[0].shape[0]

    def slice_basis(self, s: int, t: int) -> list[SteenrodElement]:
        span = self.spans.get((s, t))
        if span is None:
            return []
        mons = self._mons((s, t))
        out = []
        for row in span[0]:
            out.append(SteenrodElement(self.ring, {mons[i]: int(c) for i, c in enumerate(row) if c}))
        return out

    def contains(self, el: SteenrodElement) -> bool:
        if el.is_zero():
            return True
        for bd, part in el.homogeneous_parts().items():
            if bd[0] > self.bound:
                return False
            span, piv = self.spans.get(bd, (None, None))
            if span is None:
                return False
            vec = part.to_vector(self._mons(bd))
            if np.any(_reduce_row(self.ring.field, span, piv, vec)):
                return False
        return True

    def verify_stable(self) -> bool:
        """Re-apply every defined operation and generator multiplication to
        every recorded basis element; nothing may leave the spans (within the
        bound)."""
        R = self.ring
        for (s, t), _ in sorted(self.spans.items()):
            for el in self.slice_basis(s, t):
                for i in range(R.ngens()):
                    child = R.gen(i) * el
                    bd = child.bidegree()
                    if child.is_zero() or bd[0] > self.bound:
                        continue
                    if not self.contains(child):
                        return False
                for op in ("P", "betaP"):
                    for i2 in range(t & 1, s + 1, 2):
                        child = apply_op(R, op, i2, el)
                        if child.is_zero():
                            continue
                        if child.bidegree()[0] > self.bound:
                            continue
                        if not self.contains(child):
                            return False
        return True


def saturate(R: SteenrodRing, seeds: Sequence[SteenrodElement], bound: int) -> Saturation:
    return Saturation(R, seeds, bound)


# -- witness search ----------------------------------------------------------


def _fp_lines(p: int, s: int):
    """Nonzero F_p-coefficient vectors of length s, one per projective class,
    lex order, leading coefficient 1."""
    out = []
    for vec in itertools.product(range(p), repeat=s):
        nz = [i for i, c in enumerate(vec) if c]
        if nz and vec[nz[0]] == 1:
            out.append(vec)
    return out


@dataclass
class B36Verdict:
    case: str  # "i", "ii", or "inconclusive"
    witness: Optional[SteenrodElement]
    detail: dict

    def to_json(self):
        return {
            "case": self.case,
            "witness": None if self.witness is None else repr(self.witness),
            "detail": self.detail,
        }


def classify_b36(R: SteenrodRing, sat: Saturation, r: int, s: int) -> B36Verdict:
    """Decide the dichotomy for a saturated ideal in standard_ring(r, s, eps):
    case (i): some x_r^a * prod_j beta P^0(v_j) lies in the ideal (v_j nonzero
    F_p-combinations of the y's, a and the number of factors not both zero);
    case (ii): the (2,0) slice is one-dimensional spanned by zeta^2 + c x_r."""
    p = R.field.p
    # case (i) search: witnesses ordered by total degree, then lex
    lines = _fp_lines(p, s)
    bound = sat.bound

    def bockstein(vec) -> SteenrodElement:
        out = R.zero()
        for j, c in enumerate(vec):
            if c:
                out = out + R.gen(f"z{j+1}").scale(R.field.from_int(c).code)
        return out

    for total in range(2, bound + 1, 2):
        # total = 2a + 2m
        for a in range(total // 2 + 1):
            m = total // 2 - a
            if a == 0 and m == 0:
                continue
            if a > 0 and r == 0:
                continue
            base = (R.gen(f"x{r}") ** a) if a else R.one()
            if m == 0:
                if sat.contains(base):
                    return B36Verdict("i", base, {"n": a, "factors": []})
                continue
            if s == 0:
                continue
            for combo in itertools.combinations_with_replacement(range(len(lines)), m):
                w = base
                for ci in combo:
                    w = w * bockstein(lines[ci])
                if not w.is_zero() and sat.contains(w):
                    return B36Verdict(
                        "i", w, {"n": a, "factors": [list(lines[ci]) for ci in combo]}
                    )
    # case (ii): the (2,0) slice
    basis = sat.slice_basis(2, 0)
    if len(basis) == 1:
        el = basis[0]
        zsq = {m for m in el.terms if R.bidegree(m) == (2, 0)}
        # must be zeta^2 + c*x_r in shape
        if "zeta" in R.pos:
            zmon = [0] * R.ngens()
            zmon[R.pos["zeta"]] = 2
            zmon = tuple(zmon)
            allowed = {zmon}
            if r > 0:
                xmon = [0] * R.ngens()
                xmon[R.pos[f"x{r}"]] = 1
                allowed.add(tuple(xmon))
            if set(el.terms) <= allowed and zmon in el.terms:
                return B36Verdict("ii", el, {"slice_dim": 1})
    return B36Verdict("inconclusive", None, {"slice_dim_2_0": sat.slice_dim(2, 0)})


@dataclass
class SerreVerdict:
    found: bool
    factors: list[list[int]]
    witness: Optional[SteenrodElement]

    def to_json(self):
        return {
            "found": self.found,
            "factors": self.factors,
            "witness": None if self.witness is None else repr(self.witness),
        }


def serre_check(s: int, seed: SteenrodElement, bound: int) -> SerreVerdict:
    """For H((Z/p)^s) = standard_ring(0, s, 0): saturate the seed and search
    for a product of Bocksteins of degree-one classes inside the ideal."""
    if s > 3:
        raise ValueError("guard: s <= 3")
    R = seed.ring
    p = R.field.p
    sat = saturate(R, [seed], bound)
    lines = _fp_lines(p, s)

    def bockstein(vec) -> SteenrodElement:
        out = R.zero()
        for j, c in enumerate(vec):
            if c:
                out = out + R.gen(f"z{j+1}").scale(R.field.from_int(c).code)
        return out

    for m in range(1, bound // 2 + 1):
        for combo in itertools.combinations_with_replacement(range(len(lines)), m):
            w = R.one()
            for ci in combo:
                w = w * bockstein(lines[ci])
            if not w.is_zero() and sat.contains(w):
                return SerreVerdict(True, [list(lines[ci]) for ci in combo], w)
    return SerreVerdict(False, [], None)


# ---------------------------------------------------------------------------
# expression parser (names, ^, *, +, -, integer coefficients)


_TOKEN = re.compile(r"\s*(\d+|[A-Za-z][A-Za-z0-9]*|\^|\*|\+|-|\(|\))")


def parse_element(R: SteenrodRing, text: str) -> SteenrodElement:
    """Parse 'l1', '-x1', 'zeta^2 + 2*x1', 'z1*z2' style expressions."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"cannot tokenize {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    tokens.append(None)
    idx = [0]

    def peek():
        return tokens[idx[0]]

    def take():
        tok = tokens[idx[0]]
        idx[0] += 1
        return tok

    def parse_sum():
        el = parse_product()
        while peek() in ("+", "-"):
            op = take()
            rhs = parse_product()
            el = el + rhs if op == "+" else el - rhs
        return el

    def parse_product():
        sign = 1
        while peek() in ("+", "-"):
            if take() == "-":
                sign = -sign
        el = parse_factor()
        while peek() == "*":
            take()
            el = el * parse_factor()
        if sign < 0:
            el = -el
        return el

    def parse_factor():
        tok = take()
        if tok == "(":
            el = parse_sum()
            if take() != ")":
                raise ValueError("unbalanced parentheses")
        elif tok is None:
            raise ValueError("unexpected end of expression")
        elif tok.isdigit():
            el = R.one().scale(R.field.from_int(int(tok)).code)
        else:
            if tok not in R.pos:
                raise ValueError(f"unknown generator {tok!r}")
            el = R.gen(tok)
        while peek() == "^":
            take()
            e = take()
            if not (e and e.isdigit()):
                raise ValueError("exponent must be an integer")
            el = el ** int(e)
        return el

    result = parse_sum()
    if peek() is not None:
        raise ValueError(f"trailing tokens near {peek()!r}")
    return result
