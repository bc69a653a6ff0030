"""Periodic Abel equations with the invariant curves x = 0 and a1(t)x = 1.

The raw form is x' = x(C1 + C2 x + C3 x^2). Requiring a1(t)x - 1 = 0 to be
invariant factors the field as

    x' = (a1 x - 1)(a2 x - b2) x - (a1'/a1) x,

with C3 = a1 a2, C2 = -(a1 b2 + a2), C1 = b2 - a1'/a1. This module holds the
two equation models, the factorization with its exact invariance residual,
cofactors of the two curves, the stability quadratic in x whose circle-wide
sign bounds the cycle count, region classification by the sign of a1, and the
scaled normal form x' = (a1x - b1)(a2x - b2)x + (b1' - a1'x)x/b1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Union

from .poly import SignOnSet, as_fraction
from .trig import (
    Period,
    TrigPoly,
    TrigRational,
    definite_sign_on_period,
)


def _as_trig_rational(f) -> TrigRational:
    if isinstance(f, TrigRational):
        return f
    if isinstance(f, TrigPoly):
        return TrigRational.from_poly(f)
    return TrigRational.constant(as_fraction(f))


@dataclass(frozen=True)
class XPoly:
    """Polynomial in x with trig-rational coefficients, low to high degree."""

    coeffs: tuple[TrigRational, ...]

    @staticmethod
    def from_coeffs(raw: Iterable) -> "XPoly":
        cs = [_as_trig_rational(c) for c in raw]
        while cs and cs[-1].is_zero:
            cs.pop()
        return XPoly(tuple(cs))

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> TrigRational:
        return self.coeffs[k] if k < len(self.coeffs) else TrigRational.zero()

    def __add__(self, other: "XPoly") -> "XPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return XPoly.from_coeffs(
            self.coeff(k) + other.coeff(k) for k in range(n)
        )

    def __neg__(self) -> "XPoly":
        return XPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "XPoly") -> "XPoly":
        return self + (-other)

    def __mul__(self, other: "XPoly") -> "XPoly":
        out = [TrigRational.zero()] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return XPoly.from_coeffs(out)

    def partial_x(self) -> "XPoly":
        return XPoly.from_coeffs(
            c.scale(k) for k, c in enumerate(self.coeffs) if k > 0
        )

    def partial_t(self) -> "XPoly":
        return XPoly.from_coeffs(c.derivative() for c in self.coeffs)

    def eval_at(self, c: Fraction, s: Fraction, x: Fraction) -> Fraction:
        total = Fraction(0)
        for k, coeff in enumerate(self.coeffs):
            total += coeff.eval_at(c, s) * x**k
        return total

    def evaluate_float(self, theta: float, x: float, guard: float = 0.0) -> float:
        total = 0.0
        for k, coeff in enumerate(self.coeffs):
            total += coeff.evaluate_float(theta, guard=guard) * x**k
        return total


def _joint_period(*fs: TrigRational) -> Period:
    for f in fs:
        if f.period() is not Period.PI:
            return Period.TWO_PI
    return Period.PI


@dataclass(frozen=True)
class AbelEquation:
    """x' = x (C1 + C2 x + C3 x^2); x = 0 is a solution by construction."""

    c1: TrigRational
    c2: TrigRational
    c3: TrigRational

    @staticmethod
    def from_coefficients(c1, c2, c3) -> "AbelEquation":
        return AbelEquation(
            _as_trig_rational(c1), _as_trig_rational(c2), _as_trig_rational(c3)
        )

    @property
    def period(self) -> Period:
        return _joint_period(self.c1, self.c2, self.c3)

    def rhs(self) -> XPoly:
        return XPoly.from_coeffs([TrigRational.zero(), self.c1, self.c2, self.c3])

    def to_json(self) -> dict:
        return {
            "C1": self.c1.to_json(),
            "C2": self.c2.to_json(),
            "C3": self.c3.to_json(),
        }

    @staticmethod
    def from_json(data: dict) -> "AbelEquation":
        return AbelEquation(
            TrigRational.from_json(data["C1"]),
            TrigRational.from_json(data["C2"]),
            TrigRational.from_json(data["C3"]),
        )


class InvarianceError(ValueError):
    """The candidate curve a1(t)x - 1 = 0 is not invariant; carries the exact
    trig-rational residual C1 - b2 + a1'/a1."""

    def __init__(self, residual: TrigRational):
        self.residual = residual
        super().__init__(
            "curve is not invariant: the consistency identity for the linear "
            "coefficient fails with a nonzero residual"
        )


@dataclass(frozen=True)
class FactoredAbel:
    """x' = (a1 x - 1)(a2 x - b2) x - (a1'/a1) x."""

    a1: TrigPoly
    a2: TrigRational
    b2: TrigRational

    def __post_init__(self):
        if self.a1.is_zero:
            raise ValueError("a1 must not be identically zero")

    @staticmethod
    def from_parts(a1: TrigPoly, a2, b2) -> "FactoredAbel":
        return FactoredAbel(a1, _as_trig_rational(a2), _as_trig_rational(b2))

    def log_deriv_a1(self) -> TrigRational:
        """a1'/a1."""
        return TrigRational(self.a1.derivative(), self.a1)

    @property
    def c3(self) -> TrigRational:
        return _as_trig_rational(self.a1) * self.a2

    @property
    def c2(self) -> TrigRational:
        return -(_as_trig_rational(self.a1) * self.b2 + self.a2)

    @property
    def c1(self) -> TrigRational:
        return self.b2 - self.log_deriv_a1()

    def to_abel(self) -> AbelEquation:
        return AbelEquation(self.c1, self.c2, self.c3)

    @property
    def period(self) -> Period:
        if self.a1.detect_period() is not Period.PI:
            return Period.TWO_PI
        return _joint_period(self.a2, self.b2)

    def rhs(self) -> XPoly:
        return self.to_abel().rhs()

    def cofactors(self) -> tuple[XPoly, XPoly]:
        """(cofactor of x = 0, cofactor of a1 x - 1 = 0)."""
        a1r = _as_trig_rational(self.a1)
        p1 = XPoly.from_coeffs(
            [self.b2 - self.log_deriv_a1(), -(a1r * self.b2 + self.a2), a1r * self.a2]
        )
        p2 = XPoly.from_coeffs(
            [TrigRational.zero(), -(a1r * self.b2), a1r * self.a2]
        )
        return p1, p2

    def to_json(self) -> dict:
        return {
            "a1": self.a1.to_json(),
            "a2": self.a2.to_json(),
            "b2": self.b2.to_json(),
        }

    @staticmethod
    def from_json(data: dict) -> "FactoredAbel":
        return FactoredAbel(
            TrigPoly.from_json(data["a1"]),
            TrigRational.from_json(data["a2"]),
            TrigRational.from_json(data["b2"]),
        )


def factor_through_invariant(eq: AbelEquation, a1: TrigPoly) -> FactoredAbel:
    """Factor the cubic field through the candidate curve a1(t)x - 1 = 0.

    Matching coefficients gives a2 = C3/a1 and b2 = -(C2 + a2)/a1; the curve
    is invariant iff the remaining identity C1 = b2 - a1'/a1 holds exactly.
    """
    if a1.is_zero:
        raise ValueError("a1 must not be identically zero")
    a1r = _as_trig_rational(a1)
    a2 = eq.c3 / a1r
    b2 = -(eq.c2 + a2) / a1r
    residual = (eq.c1 - b2 + TrigRational(a1.derivative(), a1)).reduced()
    if not residual.is_zero:
        raise InvarianceError(residual)
    return FactoredAbel(a1, a2.reduced(), b2.reduced())


@dataclass(frozen=True)
class CombinationParams:
    """Multipliers (alpha, beta, eta) for the cofactor combination
    p_x + alpha p1 + beta p2 + (1 + alpha + eta) a1'/a1."""

    alpha: Fraction
    beta: Fraction
    eta: Fraction

    @staticmethod
    def of(alpha, beta, eta) -> "CombinationParams":
        return CombinationParams(
            as_fraction(alpha), as_fraction(beta), as_fraction(eta)
        )


def stability_quadratic(f: FactoredAbel, params: CombinationParams) -> XPoly:
    """The quadratic in x whose definite sign on the region bounds the cycle
    count at one per connected component:

        (3+A+B) a1 a2 x^2 - ((2+A) a2 + (2+A+B) a1 b2) x
        + (1+A) b2 + E a1'/a1

    for (A, B, E) = params. Equals p_x + A p1 + B p2 + (1+A+E) a1'/a1.
    """
    al, be, eta = params.alpha, params.beta, params.eta
    a1r = _as_trig_rational(f.a1)
    lead = (a1r * f.a2).scale(3 + al + be)
    mid = -(f.a2.scale(2 + al) + (a1r * f.b2).scale(2 + al + be))
    low = f.b2.scale(1 + al) + f.log_deriv_a1().scale(eta)
    return XPoly.from_coeffs([low, mid, lead])


def stability_sturm_tail(f: FactoredAbel, params: CombinationParams) -> TrigRational:
    """Closed form of the constant tail of the Sturm chain of the stability
    quadratic in x (convention: tail = B^2/(4A) - C for A x^2 + B x + C).
    Valid wherever a1, a2 are nonzero; needs alpha + beta + 3 != 0."""
    al, be, eta = params.alpha, params.beta, params.eta
    if al + be + 3 == 0:
        raise ValueError("degenerate leading coefficient: alpha + beta + 3 = 0")
    if f.a2.is_zero:
        raise ValueError("a2 identically zero has no quadratic tail")
    a1r = _as_trig_rational(f.a1)
    term1 = (f.a2 / a1r).scale((2 + al) ** 2 / (4 * (3 + al + be)))
    term2 = (a1r * f.b2 * f.b2 / f.a2).scale(
        (2 + al + be) ** 2 / (4 * (3 + al + be))
    )
    term3 = f.b2.scale(-(2 + al**2 + al * (4 + be)) / (2 * (3 + al + be)))
    term4 = f.log_deriv_a1().scale(-eta)
    return term1 + term2 + term3 + term4


class RegionKind(Enum):
    A1_POSITIVE = "A1Positive"
    A1_SIGN_CHANGING = "A1SignChanging"
    A1_NEGATIVE = "A1Negative"


@dataclass(frozen=True)
class RegionV:
    """The bounded region between/around the curves x = 0 and a1 x = 1."""

    kind: RegionKind
    description: str


_REGION_TEXT = {
    RegionKind.A1_POSITIVE: "0 < x < 1/a1(t) for every t",
    RegionKind.A1_SIGN_CHANGING: (
        "x > 0, additionally x < 1/a1(t) for t with a1(t) > 0"
    ),
    RegionKind.A1_NEGATIVE: "x > 0 or x < 1/a1(t) (two components)",
}


def classify_region(f: FactoredAbel) -> RegionV:
    """Region shape from the circle-wide sign of a1.

    Zeros of a1 send 1/a1 to infinity, so the non-strict sign classes count
    as sign-changing for region purposes.
    """
    sign = definite_sign_on_period(f.a1)
    if sign is SignOnSet.IDENTICALLY_ZERO:
        raise ValueError("a1 must not be identically zero")
    if sign is SignOnSet.STRICTLY_POSITIVE:
        kind = RegionKind.A1_POSITIVE
    elif sign is SignOnSet.STRICTLY_NEGATIVE:
        kind = RegionKind.A1_NEGATIVE
    else:
        kind = RegionKind.A1_SIGN_CHANGING
    return RegionV(kind, _REGION_TEXT[kind])


@dataclass(frozen=True)
class NormalizedAbel:
    """Scaled form x' = (a1n x - b1n)(a2n x - b2n) x + (b1n' - a1n' x) x / b1n
    obtained from FactoredAbel by a nowhere-zero multiplier b1n."""

    a1n: TrigPoly
    b1n: TrigPoly
    a2n: TrigRational
    b2n: TrigRational


def normalize(f: FactoredAbel, b1n: TrigPoly) -> NormalizedAbel:
    """Rescale by a nowhere-vanishing b1n:

        a1n = a1 b1n,  a2n = a2 / b1n,  b2n = (b2 - a1n'/a1n) / b1n.

    This is the unique map making the scaled form expand to the same cubic
    coefficients as the input equation (re-bracketing, not a change of
    variables); see the coefficient identity test.
    """
    sign = definite_sign_on_period(b1n)
    if sign not in (SignOnSet.STRICTLY_POSITIVE, SignOnSet.STRICTLY_NEGATIVE):
        raise ValueError("the multiplier b1n must be nowhere zero on the period")
    b1r = _as_trig_rational(b1n)
    a1n = f.a1 * b1n
    a2n = (f.a2 / b1r).reduced()
    log_a1n = TrigRational(a1n.derivative(), a1n)
    b2n = ((f.b2 - log_a1n) / b1r).reduced()
    return NormalizedAbel(a1n, b1n, a2n, b2n)


def denormalize(n: NormalizedAbel) -> AbelEquation:
    """Invert the normalization map back to raw coefficients:
    a1 = a1n/b1n, a2 = a2n b1n, b2 = b2n b1n + a1n'/a1n."""
    b1r = _as_trig_rational(n.b1n)
    a1 = _as_trig_rational(n.a1n) / b1r
    a2 = n.a2n * b1r
    log_a1n = TrigRational(n.a1n.derivative(), n.a1n)
    b2 = n.b2n * b1r + log_a1n
    log_a1 = log_a1n - TrigRational(n.b1n.derivative(), n.b1n)
    c3 = a1 * a2
    c2 = -(a1 * b2 + a2)
    c1 = b2 - log_a1
    return AbelEquation(c1.reduced(), c2.reduced(), c3.reduced())


def negative_component_transform(f: FactoredAbel) -> FactoredAbel:
    """Bounded chart for the two-component region when a1 < 0 everywhere.

    y = a1(t) x turns the equation into y' = (1/a1) y (y-1)(a2 y - a1 b2),
    i.e. the factored form with a1 = 1, a2 -> a2/a1, b2 unchanged; the region
    becomes {y < 0 or y > 1}.
    """
    if definite_sign_on_period(f.a1) is not SignOnSet.STRICTLY_NEGATIVE:
        raise ValueError("transform requires a1 strictly negative on the period")
    a1r = _as_trig_rational(f.a1)
    return FactoredAbel(
        TrigPoly.constant(1), (f.a2 / a1r).reduced(), f.b2.reduced()
    )


def riccati_bound_applies(f: FactoredAbel) -> bool:
    """a2 identically zero degenerates the equation to a Riccati equation,
    which has at most one non-null limit cycle; callers route around the
    cubic machinery in that case."""
    return f.a2.is_zero


def period_float(p: Period) -> float:
    return math.pi if p is Period.PI else 2 * math.pi
