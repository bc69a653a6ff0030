"""Exact univariate polynomials over the rationals and Sturm-based sign decisions.

Everything in this module is float-free: coefficients are fractions.Fraction,
root counting goes through Sturm chains, and sign questions over the real line
are answered by isolating roots and sampling each cell at a rational point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union


class EndpointRootError(ValueError):
    """Raised when a root-counting endpoint is itself a root; caller must perturb."""


class SignOnSet(Enum):
    STRICTLY_POSITIVE = "StrictlyPositive"
    NON_NEGATIVE = "NonNegative"
    STRICTLY_NEGATIVE = "StrictlyNegative"
    NON_POSITIVE = "NonPositive"
    IDENTICALLY_ZERO = "IdenticallyZero"
    MIXED = "Mixed"

    @property
    def is_nonnegative(self) -> bool:
        return self in (
            SignOnSet.STRICTLY_POSITIVE,
            SignOnSet.NON_NEGATIVE,
            SignOnSet.IDENTICALLY_ZERO,
        )

    @property
    def is_nonpositive(self) -> bool:
        return self in (
            SignOnSet.STRICTLY_NEGATIVE,
            SignOnSet.NON_POSITIVE,
            SignOnSet.IDENTICALLY_ZERO,
        )

    @property
    def is_strict(self) -> bool:
        return self in (SignOnSet.STRICTLY_POSITIVE, SignOnSet.STRICTLY_NEGATIVE)


def sign_set_from_flags(has_pos: bool, has_zero: bool, has_neg: bool) -> SignOnSet:
    if has_pos and has_neg:
        return SignOnSet.MIXED
    if has_pos:
        return SignOnSet.NON_NEGATIVE if has_zero else SignOnSet.STRICTLY_POSITIVE
    if has_neg:
        return SignOnSet.NON_POSITIVE if has_zero else SignOnSet.STRICTLY_NEGATIVE
    return SignOnSet.IDENTICALLY_ZERO


def sign_set_flags(s: SignOnSet) -> tuple[bool, bool, bool]:
    return {
        SignOnSet.STRICTLY_POSITIVE: (True, False, False),
        SignOnSet.NON_NEGATIVE: (True, True, False),
        SignOnSet.STRICTLY_NEGATIVE: (False, False, True),
        SignOnSet.NON_POSITIVE: (False, True, True),
        SignOnSet.IDENTICALLY_ZERO: (False, True, False),
        SignOnSet.MIXED: (True, True, True),
    }[s]


def join_sign_sets(*sets: SignOnSet) -> SignOnSet:
    has_pos = has_zero = has_neg = False
    for s in sets:
        p, z, n = sign_set_flags(s)
        has_pos |= p
        has_zero |= z
        has_neg |= n
    return sign_set_from_flags(has_pos, has_zero, has_neg)


class _Infinity:
    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self) -> str:
        return "+oo" if self.sign > 0 else "-oo"


POS_INF = _Infinity(1)
NEG_INF = _Infinity(-1)

ExtendedPoint = Union[Fraction, _Infinity]


def as_fraction(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot build an exact rational from {x!r}")


@dataclass(frozen=True)
class RationalPoly:
    """Dense univariate polynomial, coefficients lowest degree first."""

    coeffs: tuple[Fraction, ...]

    @staticmethod
    def from_coeffs(cs: Iterable) -> "RationalPoly":
        coeffs = [as_fraction(c) for c in cs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return RationalPoly(tuple(coeffs))

    @staticmethod
    def zero() -> "RationalPoly":
        return RationalPoly(())

    @staticmethod
    def constant(c) -> "RationalPoly":
        return RationalPoly.from_coeffs([c])

    @staticmethod
    def x() -> "RationalPoly":
        return RationalPoly.from_coeffs([0, 1])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        # degree of the zero polynomial is reported as -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        out = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            out[i] += c
        for i, c in enumerate(other.coeffs):
            out[i] += c
        return RationalPoly.from_coeffs(out)

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __mul__(self, other: "RationalPoly") -> "RationalPoly":
        if self.is_zero or other.is_zero:
            return RationalPoly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly.from_coeffs(out)

    def scale(self, k) -> "RationalPoly":
        k = as_fraction(k)
        if k == 0:
            return RationalPoly.zero()
        return RationalPoly(tuple(c * k for c in self.coeffs))

    def __pow__(self, n: int) -> "RationalPoly":
        if n < 0:
            raise ValueError("negative power")
        result = RationalPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        dlead = other.leading
        dd = other.degree
        while len(rem) - 1 >= dd and any(c != 0 for c in rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < dd:
                break
            k = len(rem) - 1 - dd
            f = rem[-1] / dlead
            quot[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] -= f * c
            rem.pop()
        return RationalPoly.from_coeffs(quot), RationalPoly.from_coeffs(rem)

    def exact_div(self, other: "RationalPoly") -> "RationalPoly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise ValueError("division is not exact")
        return q

    def derivative(self) -> "RationalPoly":
        return RationalPoly.from_coeffs(
            [i * c for i, c in enumerate(self.coeffs)][1:]
        )

    def evaluate(self, x) -> Fraction:
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def evaluate_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def primitive(self) -> "RationalPoly":
        """Integer-primitive positive multiple of self (content divided out)."""
        if self.is_zero:
            return self
        den_lcm = 1
        for c in self.coeffs:
            den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
        ints = [int(c * den_lcm) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, abs(v))
        return RationalPoly(tuple(Fraction(v // g) for v in ints))

    def monic(self) -> "RationalPoly":
        if self.is_zero:
            return self
        return self.scale(1 / self.leading)

    def gcd(self, other: "RationalPoly") -> "RationalPoly":
        a, b = self, other
        while not b.is_zero:
            _, r = a.divmod(b)
            a, b = b, r.primitive() if not r.is_zero else r
        if a.is_zero:
            return a
        return a.monic()

    def squarefree_part(self) -> "RationalPoly":
        if self.degree <= 0:
            return self
        g = self.gcd(self.derivative())
        if g.degree <= 0:
            return self
        return self.exact_div(g).primitive()

    def squarefree_decomposition(self) -> list[tuple["RationalPoly", int]]:
        """Monic squarefree factors with multiplicities: self = c * prod f_i^i."""
        if self.degree <= 0:
            return []
        g = self.gcd(self.derivative())
        w = self.exact_div(g)
        out: list[tuple[RationalPoly, int]] = []
        mult = 1
        while w.degree > 0:
            y = w.gcd(g)
            f = w.exact_div(y)
            if f.degree > 0:
                out.append((f.monic(), mult))
            w = y
            if g.degree > 0:
                g = g.exact_div(y)
            mult += 1
        return out

    def odd_multiplicity_part(self) -> "RationalPoly":
        """Monic product of the squarefree factors whose multiplicity is odd."""
        out = RationalPoly.constant(1)
        for f, mult in self.squarefree_decomposition():
            if mult % 2 == 1:
                out = out * f
        return out

    def cauchy_bound(self) -> Fraction:
        """Every real root lies strictly inside [-B, B]."""
        if self.degree <= 0:
            return Fraction(1)
        lead = abs(self.leading)
        m = max(abs(c) for c in self.coeffs[:-1])
        return Fraction(1) + m / lead

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @staticmethod
    def from_json(data: Sequence[str]) -> "RationalPoly":
        return RationalPoly.from_coeffs(data)

    def __repr__(self) -> str:
        if self.is_zero:
            return "Poly(0)"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*t")
            else:
                parts.append(f"{c}*t^{i}")
        return "Poly(" + " + ".join(parts) + ")"


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def sign_at(p: RationalPoly, point: ExtendedPoint) -> int:
    """Sign of p at a rational point or at +-infinity via leading behavior."""
    if p.is_zero:
        return 0
    if isinstance(point, _Infinity):
        s = _sign(p.leading)
        if point.sign < 0 and p.degree % 2 == 1:
            s = -s
        return s
    return _sign(p.evaluate(point))


def sturm_sequence(p: RationalPoly) -> list[RationalPoly]:
    """Canonical Sturm chain: s0=p, s1=p', s_{i+1} = -rem(s_{i-1}, s_i).

    Returned without any rescaling so that algebraic identities on the tail
    hold on the nose (the last element of a quadratic chain is B^2/(4A) - C).
    """
    if p.is_zero:
        return [p]
    chain = [p, p.derivative()]
    while not chain[-1].is_zero and chain[-1].degree > 0:
        _, r = chain[-2].divmod(chain[-1])
        if r.is_zero:
            break
        chain.append(-r)
    if chain[-1].is_zero:
        chain.pop()
    return chain


def _scaled_sturm_chain(p: RationalPoly) -> list[RationalPoly]:
    """Sturm chain with each remainder rescaled to a positive integer-primitive
    multiple; sign patterns, and hence variation counts, are unchanged."""
    if p.is_zero:
        return [p]
    chain = [p.primitive(), p.derivative().primitive()]
    if chain[1].is_zero:
        return chain[:1]
    while chain[-1].degree > 0:
        _, r = chain[-2].divmod(chain[-1])
        if r.is_zero:
            break
        chain.append((-r).primitive())
    return chain


def sign_variations(chain: Sequence[RationalPoly], at: ExtendedPoint) -> int:
    signs = [sign_at(q, at) for q in chain]
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def count_distinct_roots(
    p: RationalPoly, lo: ExtendedPoint = NEG_INF, hi: ExtendedPoint = POS_INF
) -> int:
    """Number of distinct real roots of p in (lo, hi); endpoints must not be roots."""
    if p.is_zero:
        raise ValueError("root counting needs a nonzero polynomial")
    if p.degree == 0:
        return 0
    for pt in (lo, hi):
        if not isinstance(pt, _Infinity) and p.evaluate(pt) == 0:
            raise EndpointRootError(f"endpoint {pt} is a root; perturb the interval")
    chain = _scaled_sturm_chain(p)
    return sign_variations(chain, lo) - sign_variations(chain, hi)


def _nonroot_split(q: RationalPoly, lo: Fraction, hi: Fraction) -> Fraction:
    width = hi - lo
    for num, den in ((1, 2), (3, 7), (5, 11), (7, 13), (9, 17), (11, 23)):
        cand = lo + width * Fraction(num, den)
        if q.evaluate(cand) != 0:
            return cand
    # q has finitely many roots, so some shifted midpoint must work
    k = 29
    while True:
        cand = lo + width * Fraction(1, k)
        if q.evaluate(cand) != 0:
            return cand
        k += 2


def isolate_real_roots(p: RationalPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals, each containing exactly one distinct real root."""
    if p.is_zero:
        raise ValueError("cannot isolate roots of the zero polynomial")
    q = p.squarefree_part()
    if q.degree <= 0:
        return []
    chain = _scaled_sturm_chain(q)
    bound = q.cauchy_bound()
    big = Fraction(math.ceil(bound) + 1)

    def count(lo: Fraction, hi: Fraction) -> int:
        return sign_variations(chain, lo) - sign_variations(chain, hi)

    done: list[tuple[Fraction, Fraction]] = []
    work = [(-big, big)]
    while work:
        lo, hi = work.pop()
        n = count(lo, hi)
        if n == 0:
            continue
        if n == 1:
            done.append((lo, hi))
            continue
        mid = _nonroot_split(q, lo, hi)
        work.append((lo, mid))
        work.append((mid, hi))
    done.sort()
    # bisection can leave adjacent intervals sharing an endpoint; shrink the
    # left one (keeping the half that holds its root) until they are disjoint
    for i in range(1, len(done)):
        while done[i - 1][1] >= done[i][0]:
            plo, phi = done[i - 1]
            mid = _nonroot_split(q, plo, phi)
            done[i - 1] = (plo, mid) if count(plo, mid) == 1 else (mid, phi)
    return done


def refine_interval(
    p: RationalPoly, interval: tuple[Fraction, Fraction], width: Fraction
) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval of squarefree p below the requested width."""
    q = p.squarefree_part()
    lo, hi = interval
    slo = _sign(q.evaluate(lo))
    while hi - lo > width:
        mid = _nonroot_split(q, lo, hi)
        smid = _sign(q.evaluate(mid))
        if smid == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


@dataclass(frozen=True)
class CellDecomposition:
    """Root intervals of a product polynomial plus one rational sample per cell."""

    intervals: list[tuple[Fraction, Fraction]]
    samples: list[Fraction]
    outer_bound: Fraction


def real_line_cells(polys: Sequence[RationalPoly]) -> CellDecomposition:
    """Cells of R cut by all roots of the given nonzero polynomials.

    samples[i] lies strictly between root i-1 and root i (with samples[0]
    below every root and samples[-1] above every root).
    """
    product = RationalPoly.constant(1)
    for q in polys:
        if q.is_zero:
            raise ValueError("cell decomposition needs nonzero polynomials")
        if q.degree > 0:
            product = product * q.squarefree_part()
    if product.degree <= 0:
        return CellDecomposition([], [Fraction(0)], Fraction(1))
    intervals = isolate_real_roots(product)
    bound = Fraction(math.ceil(product.cauchy_bound()) + 1)
    samples = [-bound]
    for (a, b), (c, d) in zip(intervals, intervals[1:]):
        samples.append(b + (c - b) / 2)
    samples.append(bound)
    return CellDecomposition(intervals, samples, bound)


_PREMISE_OK = {"<0": lambda s: s < 0, ">0": lambda s: s > 0}
_CONCLUSION_OK = {"<=0": lambda s: s <= 0, ">=0": lambda s: s >= 0}


def sign_implication(
    a: RationalPoly, cond_a: str, b: RationalPoly, cond_b: str
) -> tuple[bool, Optional[Fraction]]:
    """Decide whether A(t) cond_a implies B(t) cond_b for every real t.

    cond_a is a strict sign ('<0' or '>0'), cond_b a non-strict one
    ('<=0' or '>=0'). Returns (holds, witness); the witness is a rational
    point violating the implication. Decision: at roots of A the premise is
    false and at roots of B the non-strict conclusion holds, so it is enough
    to check one rational sample inside each open cell cut by roots of A*B.
    """
    if cond_a not in _PREMISE_OK or cond_b not in _CONCLUSION_OK:
        raise ValueError(f"unsupported condition pair {cond_a!r}, {cond_b!r}")
    if a.is_zero:
        return True, None
    if b.is_zero:
        return True, None
    prem = _PREMISE_OK[cond_a]
    concl = _CONCLUSION_OK[cond_b]
    cells = real_line_cells([a, b])
    for s in cells.samples:
        if prem(_sign(a.evaluate(s))) and not concl(_sign(b.evaluate(s))):
            return False, s
    return True, None


def find_strict_interval(
    constraints: Sequence[tuple[RationalPoly, int]]
) -> Optional[tuple[Fraction, Fraction]]:
    """A closed rational interval of positive length where every polynomial
    keeps the requested strict sign (+1 or -1), or None.

    The interval is a root-free gap of the product polynomial, so a single
    exact sample certifies the strict signs on all of it.
    """
    polys = [p for p, _ in constraints]
    if any(p.is_zero for p in polys):
        return None
    cells = real_line_cells(polys)
    n = len(cells.samples)
    for idx, s in enumerate(cells.samples):
        if all(_sign(p.evaluate(s)) == want for p, want in constraints):
            if not cells.intervals:
                return (s - 1, s + 1)
            if idx == 0:
                return (s - 2, s - 1)
            if idx == n - 1:
                return (s + 1, s + 2)
            left = cells.intervals[idx - 1][1]
            right = cells.intervals[idx][0]
            return (left, right)
    return None


def sign_on_real_line(p: RationalPoly) -> SignOnSet:
    """Exact sign classification of p over all of R."""
    if p.is_zero:
        return SignOnSet.IDENTICALLY_ZERO
    if p.degree == 0:
        return (
            SignOnSet.STRICTLY_POSITIVE if p.leading > 0 else SignOnSet.STRICTLY_NEGATIVE
        )
    cells = real_line_cells([p])
    has_zero = bool(cells.intervals)
    has_pos = has_neg = False
    for s in cells.samples:
        v = _sign(p.evaluate(s))
        has_pos |= v > 0
        has_neg |= v < 0
        # a sample can only be zero if p has an even-multiplicity root there;
        # cells are cut by roots of the squarefree part, so v == 0 cannot occur
    return sign_set_from_flags(has_pos, has_zero, has_neg)


def sign_report_on_real_line(
    p: RationalPoly,
) -> tuple[SignOnSet, Optional[Fraction], Optional[Fraction]]:
    """Sign classification plus rational sample points attaining >0 and <0."""
    if p.is_zero:
        return SignOnSet.IDENTICALLY_ZERO, None, None
    cells = real_line_cells([p]) if p.degree > 0 else None
    samples = cells.samples if cells else [Fraction(0)]
    pos_at = neg_at = None
    for s in samples:
        v = _sign(p.evaluate(s))
        if v > 0 and pos_at is None:
            pos_at = s
        if v < 0 and neg_at is None:
            neg_at = s
    has_zero = bool(cells.intervals) if cells else False
    return (
        sign_set_from_flags(pos_at is not None, has_zero, neg_at is not None),
        pos_at,
        neg_at,
    )
