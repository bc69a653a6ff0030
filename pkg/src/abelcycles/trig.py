"""Exact trigonometric polynomials and rational functions on the circle.

A TrigPoly is a finite sum  sum c_{ij} cos^i(t) sin^j(t)  kept in the
canonical form with sin-powers reduced to 0 or 1 via sin^2 = 1 - cos^2, which
makes equality and the zero test decidable by coefficient comparison.

Sign questions over a full period are settled exactly in one of two charts:

* tangent chart, x = tan(t): for a parity-pure f (all i+j of equal parity)
  f(t) = cos(t)^d P(x) on (-pi/2, pi/2) with P rational, plus the point
  t = pi/2 and a sign flip (-1)^d on the shifted half period;
* half-angle chart, u = tan(t/2): any f equals N(u)/(1+u^2)^k on the circle
  minus the single point t = pi, with N rational.

Both charts reduce circle questions to RationalPoly sign decisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .poly import (
    RationalPoly,
    SignOnSet,
    as_fraction,
    count_distinct_roots,
    join_sign_sets,
    sign_report_on_real_line,
)


class Period(Enum):
    PI = "pi"
    TWO_PI = "2pi"

    @property
    def value_float(self) -> float:
        return math.pi if self is Period.PI else 2 * math.pi


class NonHomogeneousError(ValueError):
    """Input cannot be written as homogeneous of the requested trig degree."""


def _binom(n: int, k: int) -> int:
    return math.comb(n, k)


@dataclass(frozen=True)
class TrigPoly:
    """Canonical trig polynomial: terms map (cos_power, sin_power) -> Fraction
    with sin_power in {0, 1}."""

    terms: tuple[tuple[tuple[int, int], Fraction], ...]

    @staticmethod
    def from_terms(raw: Iterable[tuple[int, int, object]]) -> "TrigPoly":
        acc: dict[tuple[int, int], Fraction] = {}
        for i, j, c in raw:
            c = as_fraction(c)
            if c == 0:
                continue
            if i < 0 or j < 0:
                raise ValueError("negative trig powers are not allowed")
            m, j0 = divmod(j, 2)
            # sin^(2m) = (1 - cos^2)^m
            for l in range(m + 1):
                key = (i + 2 * l, j0)
                acc[key] = acc.get(key, Fraction(0)) + c * _binom(m, l) * (-1) ** l
        return TrigPoly(tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    @staticmethod
    def zero() -> "TrigPoly":
        return TrigPoly(())

    @staticmethod
    def constant(c) -> "TrigPoly":
        return TrigPoly.from_terms([(0, 0, c)])

    @staticmethod
    def coswave(power: int = 1, coeff=1) -> "TrigPoly":
        return TrigPoly.from_terms([(power, 0, coeff)])

    @staticmethod
    def sinwave(power: int = 1, coeff=1) -> "TrigPoly":
        return TrigPoly.from_terms([(0, power, coeff)])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def term_dict(self) -> dict[tuple[int, int], Fraction]:
        return dict(self.terms)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        acc = self.term_dict()
        for key, c in other.terms:
            acc[key] = acc.get(key, Fraction(0)) + c
        return TrigPoly(tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        raw = []
        for (i1, j1), c1 in self.terms:
            for (i2, j2), c2 in other.terms:
                raw.append((i1 + i2, j1 + j2, c1 * c2))
        return TrigPoly.from_terms(raw)

    def scale(self, k) -> "TrigPoly":
        k = as_fraction(k)
        if k == 0:
            return TrigPoly.zero()
        return TrigPoly(tuple((key, c * k) for key, c in self.terms))

    def derivative(self) -> "TrigPoly":
        """d/dt, using (cos^i)' = -i cos^(i-1) sin and (cos^i sin)' re-reduced."""
        raw = []
        for (i, j), c in self.terms:
            if j == 0:
                if i > 0:
                    raw.append((i - 1, 1, -i * c))
            else:
                # (cos^i sin)' = -i cos^(i-1) (1 - cos^2) + cos^(i+1)
                if i > 0:
                    raw.append((i - 1, 0, -i * c))
                raw.append((i + 1, 0, (i + 1) * c))
        return TrigPoly.from_terms(raw)

    def eval_at(self, c: Fraction, s: Fraction) -> Fraction:
        """Exact value at a point (cos t, sin t) = (c, s) on the circle."""
        total = Fraction(0)
        for (i, j), coeff in self.terms:
            total += coeff * c**i * s**j
        return total

    def evaluate_float(self, theta: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        total = 0.0
        for (i, j), coeff in self.terms:
            total += float(coeff) * c**i * s**j
        return total

    @property
    def max_degree(self) -> int:
        """Largest i+j over canonical terms (-1 for the zero polynomial)."""
        return max((i + j for (i, j), _ in self.terms), default=-1)

    def parity(self) -> Optional[int]:
        """0 or 1 if every canonical term has i+j of that parity, else None."""
        if self.is_zero:
            return 0
        parities = {(i + j) % 2 for (i, j), _ in self.terms}
        return parities.pop() if len(parities) == 1 else None

    def detect_period(self) -> Period:
        """PI iff f(t + pi) = f(t); exact because the canonical form is unique."""
        return Period.PI if self.parity() == 0 else Period.TWO_PI

    def tan_substitute(self, d: int) -> RationalPoly:
        """The polynomial P with f(t) = cos(t)^d P(tan t) on (-pi/2, pi/2).

        Requires f to be homogeneous of trig degree d, i.e. each canonical
        term must satisfy i + j <= d with d - i - j even; the term is then
        padded by (cos^2 + sin^2)^((d-i-j)/2).
        """
        out = RationalPoly.zero()
        one_plus_t2 = RationalPoly.from_coeffs([1, 0, 1])
        for (i, j), c in self.terms:
            gap = d - i - j
            if gap < 0 or gap % 2:
                raise NonHomogeneousError(
                    f"term cos^{i} sin^{j} does not fit trig degree {d}"
                )
            mono = RationalPoly.from_coeffs([0] * j + [c])
            out = out + mono * one_plus_t2 ** (gap // 2)
        return out

    def tan_chart(self) -> tuple[RationalPoly, int]:
        """tan_substitute at the smallest valid degree; requires pure parity."""
        if self.parity() is None:
            raise NonHomogeneousError("mixed parity; no single tangent chart")
        d = max(self.max_degree, 0)
        return self.tan_substitute(d), d

    def half_angle_chart(self) -> tuple[RationalPoly, int]:
        """(N, k) with f(t) = N(u) / (1+u^2)^k for u = tan(t/2)."""
        k = max(self.max_degree, 0)
        out = RationalPoly.zero()
        cos_u = RationalPoly.from_coeffs([1, 0, -1])  # 1 - u^2
        sin_u = RationalPoly.from_coeffs([0, 2])  # 2u
        one_plus = RationalPoly.from_coeffs([1, 0, 1])
        for (i, j), c in self.terms:
            out = out + (cos_u**i * sin_u**j * one_plus ** (k - i - j)).scale(c)
        return out, k

    @staticmethod
    def from_half_angle(n: RationalPoly, k: int) -> "TrigPoly":
        """Inverse of half_angle_chart; needs deg N <= 2k.

        Uses u = sin t / (1 + cos t) and 1 + u^2 = 2 / (1 + cos t):
        u^m / (1+u^2)^k = 2^-k sin^m (1+cos)^(k-m)            for m <= k,
                        = 2^-k sin^(2k-m) (1-cos)^(m-k)        for m > k.
        """
        if n.degree > 2 * k:
            raise ValueError("numerator degree exceeds 2k; not a trig polynomial")
        raw: list[tuple[int, int, Fraction]] = []
        scale = Fraction(1, 2**k)
        for m, a in enumerate(n.coeffs):
            if a == 0:
                continue
            if m <= k:
                e, sgn, spow = k - m, 1, m
            else:
                e, sgn, spow = m - k, -1, 2 * k - m
            for l in range(e + 1):
                raw.append((l, spow, a * scale * _binom(e, l) * sgn**l))
        return TrigPoly.from_terms(raw)

    def to_json(self) -> list[dict]:
        return [
            {"i": i, "j": j, "c": f"{c.numerator}/{c.denominator}"}
            for (i, j), c in self.terms
        ]

    @staticmethod
    def from_json(data: Sequence[dict]) -> "TrigPoly":
        return TrigPoly.from_terms((d["i"], d["j"], d["c"]) for d in data)

    def __repr__(self) -> str:
        if self.is_zero:
            return "Trig(0)"
        parts = []
        for (i, j), c in self.terms:
            bit = str(c)
            if i:
                bit += f"*c^{i}" if i > 1 else "*c"
            if j:
                bit += "*s"
            parts.append(bit)
        return "Trig(" + " + ".join(parts) + ")"


def circle_point(u: Fraction) -> tuple[Fraction, Fraction]:
    """Rational point (cos t, sin t) for u = tan(t/2)."""
    d = 1 + u * u
    return (1 - u * u) / d, 2 * u / d


def theta_from_half_angle(u: Fraction) -> float:
    return 2.0 * math.atan(float(u))


def theta_from_tangent(t: Fraction, second_half: bool = False) -> float:
    theta = math.atan(float(t))
    if second_half:
        theta += math.pi
    return theta % (2 * math.pi)


class PoleError(ZeroDivisionError):
    """Evaluation at a zero of the denominator."""


@dataclass(frozen=True)
class TrigRational:
    """Quotient of two trig polynomials; den is never identically zero."""

    num: TrigPoly
    den: TrigPoly

    def __post_init__(self):
        if self.den.is_zero:
            raise ZeroDivisionError("trig rational with zero denominator")

    @staticmethod
    def from_poly(p: TrigPoly) -> "TrigRational":
        return TrigRational(p, TrigPoly.constant(1))

    @staticmethod
    def constant(c) -> "TrigRational":
        return TrigRational.from_poly(TrigPoly.constant(c))

    @staticmethod
    def zero() -> "TrigRational":
        return TrigRational.from_poly(TrigPoly.zero())

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __add__(self, other: "TrigRational") -> "TrigRational":
        return TrigRational(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "TrigRational":
        return TrigRational(-self.num, self.den)

    def __sub__(self, other: "TrigRational") -> "TrigRational":
        return self + (-other)

    def __mul__(self, other: "TrigRational") -> "TrigRational":
        return TrigRational(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "TrigRational") -> "TrigRational":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero trig rational")
        return TrigRational(self.num * other.den, self.den * other.num)

    def scale(self, k) -> "TrigRational":
        return TrigRational(self.num.scale(k), self.den)

    def derivative(self) -> "TrigRational":
        return TrigRational(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def equals(self, other: "TrigRational") -> bool:
        return (self.num * other.den - other.num * self.den).is_zero

    def eval_at(self, c: Fraction, s: Fraction) -> Fraction:
        d = self.den.eval_at(c, s)
        if d == 0:
            raise PoleError("denominator vanishes at the requested circle point")
        return self.num.eval_at(c, s) / d

    def evaluate_float(self, theta: float, guard: float = 0.0) -> float:
        d = self.den.evaluate_float(theta)
        if abs(d) <= guard:
            raise PoleError(f"denominator {d} within pole guard at theta={theta}")
        return self.num.evaluate_float(theta) / d

    def half_angle_pair(self) -> tuple[RationalPoly, RationalPoly]:
        """Coprime (P, Q) with self = P(u)/Q(u) for u = tan(t/2), t != pi.

        Q is integer-primitive with positive leading coefficient.
        """
        nn, kn = self.num.half_angle_chart()
        nd, kd = self.den.half_angle_chart()
        one_plus = RationalPoly.from_coeffs([1, 0, 1])
        p = nn * one_plus ** max(0, kd - kn)
        q = nd * one_plus ** max(0, kn - kd)
        g = p.gcd(q)
        if g.degree > 0:
            p = p.exact_div(g)
            q = q.exact_div(g)
        # normalize so the denominator is integer-primitive with positive lead
        qq = q.primitive()
        factor = q.leading / qq.leading
        if qq.leading < 0:
            qq = qq.scale(-1)
            factor = -factor
        return p.scale(1 / factor), qq

    def reduced(self) -> "TrigRational":
        """Cancel all common factors exactly via the half-angle chart.

        The chart turns the quotient into a rational function of u where
        gcd cancellation is available; the reduced pair is mapped back with a
        shared (1+u^2) normalization so the ratio is unchanged.
        """
        if self.num.is_zero:
            return TrigRational.zero()
        p, q = self.half_angle_pair()
        k = max((p.degree + 1) // 2, (q.degree + 1) // 2)
        return TrigRational(
            TrigPoly.from_half_angle(p, k), TrigPoly.from_half_angle(q, k)
        )

    def sign_proxy(self) -> TrigPoly:
        """num*den of the reduced form: same sign as self wherever defined,
        zero exactly at zeros and poles of self."""
        r = self.reduced()
        return r.num * r.den

    def period(self) -> Period:
        pn, pd = self.num.parity(), self.den.parity()
        if pn is not None and pd is not None and pn == pd:
            return Period.PI
        if self.num.is_zero:
            return Period.PI
        return Period.TWO_PI

    def pole_free(self) -> bool:
        """True when the reduced denominator never vanishes on the circle."""
        r = self.reduced()
        nd, _ = r.den.half_angle_chart()
        from .poly import count_distinct_roots

        if nd.degree > 0 and count_distinct_roots(nd) > 0:
            return False
        return r.den.eval_at(Fraction(-1), Fraction(0)) != 0

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @staticmethod
    def from_json(data) -> "TrigRational":
        if isinstance(data, list):
            return TrigRational.from_poly(TrigPoly.from_json(data))
        return TrigRational(
            TrigPoly.from_json(data["num"]), TrigPoly.from_json(data["den"])
        )

    def __repr__(self) -> str:
        return f"TrigRational({self.num!r} / {self.den!r})"


@dataclass(frozen=True)
class SignReport:
    """Sign classification over one full period with attaining samples.

    Samples are (chart, coordinate) pairs: chart 'tan' or 'tan2' (shifted half
    period) with coordinate tan t, chart 'half' with coordinate tan(t/2), or
    chart 'point' with the float angle itself.
    """

    sign: SignOnSet
    positive_at: Optional[tuple[str, Fraction]] = None
    negative_at: Optional[tuple[str, Fraction]] = None


def sample_theta(sample: tuple[str, Fraction]) -> float:
    chart, coord = sample
    if chart == "tan":
        return theta_from_tangent(coord)
    if chart == "tan2":
        return theta_from_tangent(coord, second_half=True)
    if chart == "half":
        return theta_from_half_angle(coord)
    return float(coord)


def _point_sign_set(value: Fraction) -> SignOnSet:
    if value > 0:
        return SignOnSet.STRICTLY_POSITIVE
    if value < 0:
        return SignOnSet.STRICTLY_NEGATIVE
    return SignOnSet.IDENTICALLY_ZERO


def _flip_sign_set(s: SignOnSet) -> SignOnSet:
    return {
        SignOnSet.STRICTLY_POSITIVE: SignOnSet.STRICTLY_NEGATIVE,
        SignOnSet.NON_NEGATIVE: SignOnSet.NON_POSITIVE,
        SignOnSet.STRICTLY_NEGATIVE: SignOnSet.STRICTLY_POSITIVE,
        SignOnSet.NON_POSITIVE: SignOnSet.NON_NEGATIVE,
        SignOnSet.IDENTICALLY_ZERO: SignOnSet.IDENTICALLY_ZERO,
        SignOnSet.MIXED: SignOnSet.MIXED,
    }[s]


def definite_sign_report(f: TrigPoly) -> SignReport:
    """Exact sign classification of f over [0, 2pi] with witnesses."""
    if f.is_zero:
        return SignReport(SignOnSet.IDENTICALLY_ZERO)
    parity = f.parity()
    pieces: list[SignOnSet] = []
    pos_at = neg_at = None

    def record(sign_val, where):
        nonlocal pos_at, neg_at
        if sign_val > 0 and pos_at is None:
            pos_at = where
        if sign_val < 0 and neg_at is None:
            neg_at = where

    if parity is not None:
        p, d = f.tan_chart()
        s_open, pos_t, neg_t = sign_report_on_real_line(p)
        pieces.append(s_open)
        if pos_t is not None:
            record(1, ("tan", pos_t))
        if neg_t is not None:
            record(-1, ("tan", neg_t))
        if d % 2 == 1:
            pieces.append(_flip_sign_set(s_open))
            if pos_t is not None:
                record(-1, ("tan2", pos_t))
            if neg_t is not None:
                record(1, ("tan2", neg_t))
        # the tangent chart misses t = +-pi/2
        for s_val, angle in (
            (f.eval_at(Fraction(0), Fraction(1)), math.pi / 2),
            (f.eval_at(Fraction(0), Fraction(-1)), 3 * math.pi / 2),
        ):
            pieces.append(_point_sign_set(s_val))
            if s_val:
                record(1 if s_val > 0 else -1, ("point", Fraction(angle).limit_denominator(10**9)))
    else:
        n, _ = f.half_angle_chart()
        s_open, pos_u, neg_u = sign_report_on_real_line(n)
        pieces.append(s_open)
        if pos_u is not None:
            record(1, ("half", pos_u))
        if neg_u is not None:
            record(-1, ("half", neg_u))
        v = f.eval_at(Fraction(-1), Fraction(0))  # t = pi, missed by the chart
        pieces.append(_point_sign_set(v))
        if v:
            record(1 if v > 0 else -1, ("point", Fraction(math.pi).limit_denominator(10**9)))

    return SignReport(join_sign_sets(*pieces), pos_at, neg_at)


def definite_sign_on_period(f) -> SignOnSet:
    """SignOnSet of a TrigPoly or TrigRational over one full period.

    For rationals the classification is that of num*den of the reduced form:
    identical wherever the function is defined, with poles contributing their
    two-sided sign behavior (an odd-order pole forces Mixed).
    """
    if isinstance(f, TrigRational):
        return definite_sign_report(f.sign_proxy()).sign
    return definite_sign_report(f).sign


def rotate_half(f: TrigPoly) -> TrigPoly:
    """f(theta + pi): each cos^i sin^j term picks up (-1)^(i+j)."""
    return TrigPoly(
        tuple(((i, j), c * (-1) ** (i + j)) for (i, j), c in f.terms)
    )


def vanishing_order_at_pi(f: TrigPoly) -> int:
    """Order of the zero of f at theta = pi (0 when f(pi) != 0).

    theta = pi maps to u = 0 after rotating by half a period, where
    u = tan(theta/2) is an analytic chart, so the order equals the
    valuation of the rotated half-angle numerator.
    """
    if f.is_zero:
        raise ValueError("the zero function has no finite vanishing order")
    n, _ = rotate_half(f).half_angle_chart()
    order = 0
    while n.coeffs[order] == 0:
        order += 1
    return order


def has_odd_order_pole(f: TrigRational) -> bool:
    """True when the reduced form has a pole of odd order somewhere on the
    circle; such a pole forces a sign change, so no definite-sign analysis
    can absorb it."""
    r = f.reduced()
    nd, _ = r.den.half_angle_chart()
    if nd.degree > 0:
        nn, _ = r.num.half_angle_chart()
        g = nd.gcd(nn)
        core = nd.exact_div(g) if g.degree > 0 else nd
        for factor, mult in core.squarefree_decomposition():
            if mult % 2 == 1 and factor.degree > 0 and count_distinct_roots(factor) > 0:
                return True
    # the half-angle chart misses theta = pi
    if r.den.eval_at(Fraction(-1), Fraction(0)) == 0:
        vd = vanishing_order_at_pi(r.den)
        vn = vanishing_order_at_pi(r.num) if not r.num.is_zero else vd
        if vd > vn and (vd - vn) % 2 == 1:
            return True
    return False


def cancel_pole_combination(b2: TrigRational, a1: TrigPoly, eta) -> TrigRational:
    """b2 + eta * a1'/a1 in reduced form; cancellation is exact, so choices of
    eta that remove the poles at zeros of a1 really produce a pole-free result."""
    if a1.is_zero:
        raise ZeroDivisionError("a1 must not be identically zero")
    eta = as_fraction(eta)
    log_deriv = TrigRational(a1.derivative().scale(eta), a1)
    return (b2 + log_deriv).reduced()
