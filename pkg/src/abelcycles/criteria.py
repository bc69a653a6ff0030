"""Exact limit-cycle criteria for cubic Abel equations and planar reductions.

Every decision here is symbolic: circle-wide sign questions are pushed into
polynomial charts (tangent or half-angle) and settled with Sturm counts, so a
verdict is a certificate, not a sampling heuristic.

Checkers:

* check_no_cycle / check_at_most_one: factored Abel equations with invariant
  curves x = 0 and a1 x = 1, parameterized by a rational multiplier eta;
* check_definite_a2: one-signed a2 alone bounds the cycle count by one;
* check_normalized: the normalized-form criterion, including an exact
  decision of "some eta makes the combination sign definite";
* check_planar_no_cycle / check_planar_at_most_one: homogeneous planar
  systems, decided directly on the angular/radial components phi and psi;
* obstruction_report: five certificates that no sign-combination argument of
  the normalized family applies to a given homogeneous system;
* eta_candidates: rational multipliers that cancel the odd-order poles of
  b2 + eta a1'/a1.

Verdict vocabulary: outcome Holds/Fails/Inapplicable, bound NoNontrivialCycle
or AtMostOne, branch PositiveBranch/NegativeBranch. Fails verdicts carry
witnesses whose violated signs can be re-evaluated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

from .abel import (
    FactoredAbel,
    NormalizedAbel,
    RegionKind,
    classify_region,
    riccati_bound_applies,
)
from .planar import HomogeneousSystem
from .poly import (
    EndpointRootError,
    RationalPoly,
    SignOnSet,
    as_fraction,
    count_distinct_roots,
    find_strict_interval,
    isolate_real_roots,
    refine_interval,
    sign_implication,
    sign_on_real_line,
    sign_report_on_real_line,
)
from .trig import (
    SignReport,
    TrigPoly,
    TrigRational,
    cancel_pole_combination,
    definite_sign_report,
    has_odd_order_pole,
    rotate_half,
    sample_theta,
)

TrigLike = Union[TrigPoly, TrigRational]


class Outcome(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INAPPLICABLE = "Inapplicable"


class Bound(str, Enum):
    NO_CYCLE = "NoNontrivialCycle"
    AT_MOST_ONE = "AtMostOne"


class Branch(str, Enum):
    POSITIVE = "PositiveBranch"
    NEGATIVE = "NegativeBranch"


def _frac_str(x: Optional[Fraction]) -> Optional[str]:
    if x is None:
        return None
    return f"{x.numerator}/{x.denominator}"


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Witness:
    """A chart sample (point or isolating interval) at which the named
    condition is violated or attained; signs there are re-checkable exactly.

    chart is 'tan', 'tan2' (shifted half period), 'half', or 'point'; for
    'point' the exact circle coordinates are carried in `circle`.
    """

    condition: str
    chart: str
    point: Optional[Fraction] = None
    interval: Optional[tuple[Fraction, Fraction]] = None
    circle: Optional[tuple[Fraction, Fraction]] = None

    def theta(self) -> float:
        if self.chart == "point" and self.circle is not None:
            c, s = self.circle
            return math.atan2(float(s), float(c)) % (2 * math.pi)
        coord = self.point
        if coord is None and self.interval is not None:
            coord = (self.interval[0] + self.interval[1]) / 2
        return sample_theta((self.chart, coord))

    def to_json(self) -> dict:
        out: dict = {"condition": self.condition, "chart": self.chart}
        if self.point is not None:
            out["point"] = _frac_str(self.point)
        if self.interval is not None:
            out["interval"] = [_frac_str(self.interval[0]), _frac_str(self.interval[1])]
        if self.circle is not None:
            out["circle"] = {"cos": _frac_str(self.circle[0]), "sin": _frac_str(self.circle[1])}
        out["theta"] = self.theta()
        return out


@dataclass(frozen=True)
class StrictnessEvidence:
    """A positive-length chart interval on which the strict inequalities of a
    criterion hold; certified root-free, so one rational sample fixes the
    signs on the whole interval."""

    condition: str
    chart: str
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("strictness interval must have positive length")

    def theta_interval(self) -> tuple[float, float]:
        a = sample_theta((self.chart, self.lo))
        b = sample_theta((self.chart, self.hi))
        return (min(a, b), max(a, b))

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "chart": self.chart,
            "interval": [_frac_str(self.lo), _frac_str(self.hi)],
            "theta_interval": list(self.theta_interval()),
        }


@dataclass(frozen=True)
class CriterionVerdict:
    criterion: str
    outcome: Outcome
    bound: Optional[Bound] = None
    branch: Optional[Branch] = None
    eta: Optional[Fraction] = None
    witnesses: tuple[Witness, ...] = ()
    strictness: Optional[StrictnessEvidence] = None
    notes: str = ""

    def __post_init__(self):
        if self.outcome is Outcome.HOLDS and self.bound is None:
            raise ValueError("a holding criterion must state its bound")
        if self.outcome is Outcome.FAILS and not self.witnesses and not self.notes:
            raise ValueError("a failing criterion needs a witness or an explanation")

    @property
    def holds(self) -> bool:
        return self.outcome is Outcome.HOLDS

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "outcome": self.outcome.value,
            "bound": self.bound.value if self.bound else None,
            "branch": self.branch.value if self.branch else None,
            "eta": _frac_str(self.eta),
            "witnesses": [w.to_json() for w in self.witnesses],
            "strictness_evidence": self.strictness.to_json() if self.strictness else None,
            "notes": self.notes,
        }


# --- joint sign charts over the circle ------------------------------------


@dataclass(frozen=True)
class ChartPiece:
    chart: str
    proxies: tuple[RationalPoly, ...]


@dataclass(frozen=True)
class CirclePoint:
    label: str
    cos: Fraction
    sin: Fraction
    values: tuple[Fraction, ...]


_TAN_POINTS = ((Fraction(0), Fraction(1), "pi/2"), (Fraction(0), Fraction(-1), "3pi/2"))
_HALF_POINTS = ((Fraction(-1), Fraction(0), "pi"),)


def _as_pair(f: TrigLike) -> tuple[TrigPoly, TrigPoly]:
    if isinstance(f, TrigPoly):
        return f, TrigPoly.constant(1)
    r = f.reduced()
    return r.num, r.den


def chart_functions(fs: Sequence[TrigLike]) -> tuple[list[ChartPiece], list[CirclePoint]]:
    """Joint sign charts for several functions: polynomial sign proxies on one
    or two open chart pieces, plus the circle points the charts miss.

    On every piece and point the proxy sign equals the function sign wherever
    the function is defined, and is zero at its zeros and poles.
    """
    pairs = [_as_pair(f) for f in fs]
    pure = all(
        (n.is_zero or n.parity() is not None) and d.parity() is not None
        for n, d in pairs
    )
    pieces: list[ChartPiece] = []
    if pure:
        prox: list[RationalPoly] = []
        flips: list[int] = []
        for n, d in pairs:
            if n.is_zero:
                prox.append(RationalPoly.zero())
                flips.append(1)
                continue
            pn, dn = n.tan_chart()
            pd, dd = d.tan_chart()
            prox.append(pn * pd)
            flips.append((-1) ** (dn + dd))
        pieces.append(ChartPiece("tan", tuple(prox)))
        if any(fl < 0 for fl in flips):
            pieces.append(
                ChartPiece("tan2", tuple(p.scale(fl) for p, fl in zip(prox, flips)))
            )
        raw_points = _TAN_POINTS
    else:
        prox = []
        for n, d in pairs:
            if n.is_zero:
                prox.append(RationalPoly.zero())
                continue
            nn, _ = n.half_angle_chart()
            nd, _ = d.half_angle_chart()
            prox.append(nn * nd)
        pieces.append(ChartPiece("half", tuple(prox)))
        raw_points = _HALF_POINTS
    points = [
        CirclePoint(
            label, c, s, tuple(n.eval_at(c, s) * d.eval_at(c, s) for n, d in pairs)
        )
        for c, s, label in raw_points
    ]
    return pieces, points


def circle_implication(
    premise: TrigLike,
    prem_dir: int,
    conclusion: TrigLike,
    concl_dir: int,
    condition: str = "",
) -> tuple[bool, Optional[Witness]]:
    """Decide: wherever the premise has strict sign prem_dir on the circle,
    the conclusion has non-strict sign concl_dir.

    Zeros and poles of the premise never activate it; zeros and poles of the
    conclusion never violate it (proxy value zero lands in the closed class).
    """
    pieces, points = chart_functions([premise, conclusion])
    cond_a = "<0" if prem_dir < 0 else ">0"
    cond_b = ">=0" if concl_dir > 0 else "<=0"
    for piece in pieces:
        holds, sample = sign_implication(
            piece.proxies[0], cond_a, piece.proxies[1], cond_b
        )
        if not holds:
            return False, Witness(condition, piece.chart, point=sample)
    for pt in points:
        vp, vc = pt.values
        if vp * prem_dir > 0 and vc * concl_dir < 0:
            return False, Witness(condition, "point", circle=(pt.cos, pt.sin))
    return True, None


def circle_strict_interval(
    constraints: Sequence[tuple[TrigLike, int]], condition: str = ""
) -> Optional[StrictnessEvidence]:
    """A positive-length chart interval where every constraint keeps its
    requested strict sign, or None when no such interval exists anywhere (the
    chart cells are exhaustive, so None is a certificate of absence)."""
    pieces, _ = chart_functions([f for f, _ in constraints])
    dirs = [d for _, d in constraints]
    for piece in pieces:
        got = find_strict_interval(list(zip(piece.proxies, dirs)))
        if got is not None:
            return StrictnessEvidence(condition, piece.chart, got[0], got[1])
    return None


def sign_at_sample(
    f: TrigLike,
    chart: str,
    coordinate: Optional[Fraction] = None,
    circle: Optional[tuple[Fraction, Fraction]] = None,
) -> int:
    """Exact sign of f at a chart sample; the re-validation path for
    witnesses. Returns 0 at zeros and poles."""
    n, d = _as_pair(f)
    if chart == "point":
        c, s = circle
        return _sgn(n.eval_at(c, s) * d.eval_at(c, s))
    if chart in ("tan", "tan2"):
        if n.is_zero:
            return 0
        pn, dn = n.tan_chart()
        pd, dd = d.tan_chart()
        v = pn.evaluate(coordinate) * pd.evaluate(coordinate)
        if chart == "tan2" and (dn + dd) % 2 == 1:
            v = -v
        return _sgn(v)
    if chart == "half":
        if n.is_zero:
            return 0
        nn, _ = n.half_angle_chart()
        nd, _ = d.half_angle_chart()
        return _sgn(nn.evaluate(coordinate) * nd.evaluate(coordinate))
    raise ValueError(f"unknown chart {chart!r}")


def witness_sign(f: TrigLike, w: Witness) -> int:
    return sign_at_sample(f, w.chart, w.point, w.circle)


_POINT_ANGLES = (
    (math.pi / 2, (Fraction(0), Fraction(1))),
    (math.pi, (Fraction(-1), Fraction(0))),
    (3 * math.pi / 2, (Fraction(0), Fraction(-1))),
)


def _witness_from_sample(condition: str, sample: tuple[str, Fraction]) -> Witness:
    chart, coord = sample
    if chart == "point":
        angle = float(coord)
        for ref, circle in _POINT_ANGLES:
            if abs(angle - ref) < 1e-6:
                return Witness(condition, "point", circle=circle)
        return Witness(condition, "point", point=coord)
    return Witness(condition, chart, point=coord)


def _sign_change_witnesses(label: str, rep: SignReport) -> list[Witness]:
    out = []
    if rep.positive_at is not None:
        out.append(_witness_from_sample(f"{label} > 0 here", rep.positive_at))
    if rep.negative_at is not None:
        out.append(_witness_from_sample(f"{label} < 0 here", rep.negative_at))
    return out


def _zero_witness(fp: TrigPoly, label: str) -> Optional[Witness]:
    """An isolating interval (or exact point) around a zero of fp."""
    pieces, points = chart_functions([fp])
    for piece in pieces:
        p = piece.proxies[0]
        if not p.is_zero and p.degree > 0:
            intervals = isolate_real_roots(p)
            if intervals:
                return Witness(label, piece.chart, interval=intervals[0])
    for pt in points:
        if pt.values[0] == 0:
            return Witness(label, "point", circle=(pt.cos, pt.sin))
    return None


# --- one-parameter exact feasibility ---------------------------------------


@dataclass(frozen=True)
class FeasibilityOutcome:
    status: str  # "Feasible" | "Infeasible" | "Unknown"
    value: Optional[Fraction] = None
    witnesses: tuple[Witness, ...] = ()
    note: str = ""


_SEED_SAMPLES = tuple(
    Fraction(x) for x in (0, 1, -1, 2, -2, 10, -10, 100, -100, 10000, -10000)
)
_DEFAULT_MULTIPLIERS = tuple(
    Fraction(*x)
    for x in (
        (0, 1),
        (-1, 1),
        (1, 1),
        (-1, 2),
        (1, 2),
        (-2, 1),
        (2, 1),
        (-3, 1),
        (3, 1),
        (-5, 1),
        (5, 1),
        (-10, 1),
        (10, 1),
    )
)


def _root_obstructions(
    pa: RationalPoly, pb: RationalPoly
) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals of real roots r of pb with pa(r) < 0 certified.

    At such r the value pa(r) + mu*pb(r) = pa(r) is negative for every mu, so
    the one-parameter family cannot be nonnegative there; each interval is an
    independent certificate.
    """
    if pa.is_zero or pb.degree <= 0:
        return []
    out = []
    g = pa.gcd(pb)
    for lo, hi in isolate_real_roots(pb):
        if g.degree > 0 and count_distinct_roots(g, lo, hi) > 0:
            continue  # common root: pa vanishes together with pb
        if hi - lo > Fraction(1, 8):
            lo, hi = refine_interval(pb, (lo, hi), Fraction(1, 8))
        while True:
            try:
                inside = count_distinct_roots(pa, lo, hi)
            except EndpointRootError:
                lo, hi = refine_interval(pb, (lo, hi), (hi - lo) / 4)
                continue
            if inside == 0:
                break
            lo, hi = refine_interval(pb, (lo, hi), (hi - lo) / 4)
        if pa.evaluate((lo + hi) / 2) < 0:
            out.append((lo, hi))
    return out


def linear_parameter_feasible(
    pairs: Sequence[tuple[RationalPoly, RationalPoly]],
    value_planes: Sequence[tuple[Fraction, Fraction]] = (),
    candidates: Sequence[Fraction] = (),
    max_rounds: int = 32,
    chart: str = "half",
) -> FeasibilityOutcome:
    """Decide whether some rational mu satisfies pa + mu*pb >= 0 on all of R
    for every pair, and va + mu*vb >= 0 for every value plane.

    Infeasibility is certified two ways: a root of some pb where pa < 0, or an
    empty intersection of the half-line constraints collected from exact
    counterexample samples (cutting planes). Feasibility is certified by an
    exact sign check of the candidate. Bounded rounds, so Unknown is possible.
    """
    for pa, pb in pairs:
        if pa.is_zero:
            continue
        db = -1 if pb.is_zero else pb.degree
        if pa.degree > db and (pa.degree % 2 == 1 or pa.leading < 0):
            return FeasibilityOutcome(
                "Infeasible",
                note=(
                    "the multiplier-independent part dominates at infinity "
                    "with the wrong sign"
                ),
            )
    obstructions: list[Witness] = []
    for pa, pb in pairs:
        if pb.is_zero:
            continue
        obstructions.extend(
            Witness(
                "the multiplier coefficient vanishes here while the offset is negative",
                chart,
                interval=ob,
            )
            for ob in _root_obstructions(pa, pb)
        )
    if obstructions:
        return FeasibilityOutcome("Infeasible", witnesses=tuple(obstructions))

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    lo_w: Optional[Witness] = None
    hi_w: Optional[Witness] = None

    def conflict() -> FeasibilityOutcome:
        wits = tuple(w for w in (lo_w, hi_w) if w is not None)
        return FeasibilityOutcome(
            "Infeasible",
            witnesses=wits,
            note="the sign constraints on the multiplier are contradictory",
        )

    def add(va: Fraction, vb: Fraction, wit: Witness) -> Optional[FeasibilityOutcome]:
        nonlocal lo, hi, lo_w, hi_w
        if vb == 0:
            if va < 0:
                return FeasibilityOutcome(
                    "Infeasible",
                    witnesses=(wit,),
                    note="a constraint independent of the multiplier is violated",
                )
            return None
        bound = -va / vb
        if vb > 0:
            if lo is None or bound > lo:
                lo, lo_w = bound, wit
        else:
            if hi is None or bound < hi:
                hi, hi_w = bound, wit
        if lo is not None and hi is not None and lo > hi:
            return conflict()
        return None

    for idx, (va, vb) in enumerate(value_planes):
        res = add(va, vb, Witness(f"fixed-point constraint {idx}", "point"))
        if res is not None:
            return res
    for pa, pb in pairs:
        for u in _SEED_SAMPLES:
            res = add(pa.evaluate(u), pb.evaluate(u), Witness("seed sample", chart, point=u))
            if res is not None:
                return res

    tried: set[Fraction] = set()
    pool = list(candidates) + list(_DEFAULT_MULTIPLIERS)
    for _ in range(max_rounds):
        mu = _pick_multiplier(lo, hi, pool, tried)
        if mu is None:
            break
        tried.add(mu)
        violated = False
        for pa, pb in pairs:
            fmu = pa + pb.scale(mu)
            sign, _, neg = sign_report_on_real_line(fmu)
            if not sign.is_nonnegative:
                violated = True
                res = add(
                    pa.evaluate(neg),
                    pb.evaluate(neg),
                    Witness("exact counterexample sample", chart, point=neg),
                )
                if res is not None:
                    return res
                break
        if not violated:
            return FeasibilityOutcome("Feasible", value=mu)
    return FeasibilityOutcome(
        "Unknown", note=f"no decision within {max_rounds} rounds"
    )


def _pick_multiplier(
    lo: Optional[Fraction],
    hi: Optional[Fraction],
    pool: Sequence[Fraction],
    tried: set,
) -> Optional[Fraction]:
    def inside(x: Fraction) -> bool:
        return (lo is None or x >= lo) and (hi is None or x <= hi)

    for c in pool:
        if c not in tried and inside(c):
            return c
    if lo is not None and hi is not None:
        for x in ((lo + hi) / 2, lo, hi, lo + (hi - lo) / 3, hi - (hi - lo) / 3):
            if x not in tried:
                return x
        return None
    if lo is not None:
        x, step = lo, Fraction(1)
        while x in tried:
            x, step = lo + step, step * 2
        return x
    if hi is not None:
        x, step = hi, Fraction(1)
        while x in tried:
            x, step = hi - step, step * 2
        return x
    x = Fraction(0)
    while x in tried:
        x += 1
    return x


def definite_combination_feasible(
    base: TrigLike,
    multiplier: TrigLike,
    sign: int = 1,
    candidates: Sequence[Fraction] = (),
    parameter_planes: Sequence[tuple[Fraction, Fraction]] = (),
    max_rounds: int = 32,
) -> FeasibilityOutcome:
    """Decide whether some rational mu makes sign*(base + mu*multiplier) >= 0
    on the whole circle. Both functions must be pole-free; the decision runs
    on common-denominator half-angle numerators plus the point theta = pi."""
    rl = _as_rational(base).reduced()
    rm = _as_rational(multiplier).reduced()
    if not rl.pole_free() or not rm.pole_free():
        raise ValueError("the combination test needs pole-free inputs")
    pl, ql = rl.half_angle_pair()
    pm, qm = rm.half_angle_pair()
    g = ql.gcd(qm)
    ql_red = ql.exact_div(g) if g.degree > 0 else ql
    qm_red = qm.exact_div(g) if g.degree > 0 else qm
    # both denominators are root-free with positive leading coefficient, so
    # the common denominator ql*qm_red is positive on all of R
    na = (pl * qm_red).scale(sign)
    nb = (pm * ql_red).scale(sign)
    c, s = Fraction(-1), Fraction(0)
    planes = [(sign * rl.eval_at(c, s), sign * rm.eval_at(c, s))]
    planes.extend(parameter_planes)
    return linear_parameter_feasible([(na, nb)], planes, candidates, max_rounds)


def _as_rational(f: TrigLike) -> TrigRational:
    return f if isinstance(f, TrigRational) else TrigRational.from_poly(f)


def _exists_definite_combination(
    base: TrigRational,
    multiplier: TrigRational,
    candidates: Sequence[Fraction],
    max_rounds: int = 32,
) -> tuple[FeasibilityOutcome, Optional[Branch]]:
    """Both sign branches of definite_combination_feasible, positive first."""
    pos = definite_combination_feasible(base, multiplier, 1, candidates, (), max_rounds)
    if pos.status == "Feasible":
        return pos, Branch.POSITIVE
    neg = definite_combination_feasible(base, multiplier, -1, candidates, (), max_rounds)
    if neg.status == "Feasible":
        return neg, Branch.NEGATIVE
    if pos.status == "Infeasible" and neg.status == "Infeasible":
        return (
            FeasibilityOutcome(
                "Infeasible",
                witnesses=pos.witnesses + neg.witnesses,
                note="no multiplier gives either sign",
            ),
            None,
        )
    return FeasibilityOutcome("Unknown", note="feasibility search inconclusive"), None


# --- factored-equation criteria ---------------------------------------------

_RICCATI_NOTE = (
    "a2 is identically zero: the equation is a Riccati equation with at most "
    "one non-null limit cycle, and the cubic criteria do not apply"
)


def check_no_cycle(f: FactoredAbel, eta=Fraction(0)) -> CriterionVerdict:
    """No nontrivial limit cycle in region V when the sign conditions hold."""
    return _factored_criterion(f, as_fraction(eta), "no_cycle")


def check_at_most_one(f: FactoredAbel, eta=Fraction(0)) -> CriterionVerdict:
    """At most one nontrivial limit cycle in V (hyperbolic when it exists)."""
    return _factored_criterion(f, as_fraction(eta), "at_most_one")


def _condition_two(f: FactoredAbel, eta: Fraction) -> TrigRational:
    """a1*b2 - a2 + eta*a1', the quantity conditioned where a1 > 0."""
    a1r = TrigRational.from_poly(f.a1)
    tail = TrigRational.from_poly(f.a1.derivative()).scale(eta)
    return (a1r * f.b2 - f.a2 + tail).reduced()


def _factored_criterion(f: FactoredAbel, eta: Fraction, cid: str) -> CriterionVerdict:
    bound = Bound.NO_CYCLE if cid == "no_cycle" else Bound.AT_MOST_ONE
    if riccati_bound_applies(f):
        return CriterionVerdict(cid, Outcome.INAPPLICABLE, eta=eta, notes=_RICCATI_NOTE)
    if cid == "at_most_one" and f.b2.is_zero:
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            eta=eta,
            notes="b2 is identically zero, which this criterion excludes",
        )
    h = cancel_pole_combination(f.b2, f.a1, eta)
    if has_odd_order_pole(h):
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            eta=eta,
            notes=(
                f"b2 + ({eta}) a1'/a1 keeps an odd-order pole, so its sign "
                "cannot be definite; try the multipliers from eta_candidates"
            ),
        )
    hrep = definite_sign_report(h.sign_proxy())
    branches = []
    if hrep.sign.is_nonnegative:
        branches.append(Branch.POSITIVE)
    if hrep.sign.is_nonpositive and Branch.NEGATIVE not in branches:
        branches.append(Branch.NEGATIVE)
    if not branches:
        return CriterionVerdict(
            cid,
            Outcome.FAILS,
            eta=eta,
            witnesses=tuple(
                _sign_change_witnesses(f"b2 + ({eta}) a1'/a1", hrep)
            ),
            notes="the combination b2 + eta a1'/a1 is not sign definite",
        )

    region = classify_region(f)
    # With a1 < 0 on the whole circle, V has a second component below the
    # invariant curve x = 1/a1.  Excluding cycles there rides on the curve
    # itself being a hyperbolic cycle, whose multiplier exponent is
    # int (a1 b2 - a2 + eta a1') * (-1/a1) dt: the second condition must then
    # hold on the whole circle (its a1 > 0 premise is empty) and strictly
    # somewhere, else the exclusion argument has no teeth.
    two_sided = cid == "no_cycle" and region.kind is RegionKind.A1_NEGATIVE
    combo = _condition_two(f, eta)
    fail_witnesses: list[Witness] = []
    equality_only = False
    curve_neutral = False
    for branch in branches:
        sigma = 1 if branch is Branch.POSITIVE else -1
        dir_i = -sigma if cid == "no_cycle" else sigma
        cmp_i = "<= 0" if dir_i < 0 else ">= 0"
        ok_i, w_i = circle_implication(
            f.a1, -1, f.a2, dir_i, f"a1 < 0 implies a2 {cmp_i}"
        )
        cmp_ii = ">= 0" if sigma > 0 else "<= 0"
        ok_ii, w_ii = circle_implication(
            f.a1, 1, combo, sigma, f"a1 > 0 implies a1 b2 - a2 + eta a1' {cmp_ii}"
        )
        if not (ok_i and ok_ii):
            fail_witnesses.extend(w for w in (w_i, w_ii) if w is not None)
            continue
        if two_sided:
            ok_g, w_g = circle_implication(
                TrigPoly.constant(1),
                1,
                combo,
                sigma,
                f"a1 < 0 everywhere requires a1 b2 - a2 + eta a1' {cmp_ii} "
                "on the whole circle",
            )
            if not ok_g:
                if w_g is not None:
                    fail_witnesses.append(w_g)
                continue
            curve_ev = circle_strict_interval(
                [(combo, sigma)],
                f"a1 b2 - a2 + eta a1' {'>' if sigma > 0 else '<'} 0 strictly",
            )
            if curve_ev is None:
                curve_neutral = True
                continue
        ev = circle_strict_interval(
            [(f.a1, -1), (f.a2, dir_i)],
            f"a1 < 0 and a2 {'<' if dir_i < 0 else '>'} 0 strictly",
        )
        if ev is None:
            ev = circle_strict_interval(
                [(f.a1, 1), (combo, sigma)],
                f"a1 > 0 and a1 b2 - a2 + eta a1' {'>' if sigma > 0 else '<'} 0 strictly",
            )
        if ev is None:
            equality_only = True
            continue
        return CriterionVerdict(
            cid,
            Outcome.HOLDS,
            bound=bound,
            branch=branch,
            eta=eta,
            strictness=ev,
            notes=_region_notes(region.kind, cid),
        )
    if fail_witnesses:
        return CriterionVerdict(
            cid,
            Outcome.FAILS,
            eta=eta,
            witnesses=tuple(fail_witnesses),
            notes="a sign condition is violated at the listed witnesses",
        )
    if curve_neutral:
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            eta=eta,
            notes=(
                "a1 < 0 on the whole circle and a1 b2 - a2 + eta a1' is "
                "identically zero, so the invariant curve x = 1/a1 is a "
                "neutral cycle and cannot repel its component of V"
            ),
        )
    if equality_only:
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            eta=eta,
            notes=(
                "the sign conditions never hold strictly on an interval, so "
                "the positive-measure strictness requirement cannot be met"
            ),
        )
    raise AssertionError("unreachable: some branch must conclude")


def _region_notes(kind: RegionKind, cid: str) -> str:
    note = f"region: {kind.value}"
    if kind is RegionKind.A1_NEGATIVE:
        if cid == "no_cycle":
            note += (
                "; a1 < 0 on the whole circle, so the second condition was "
                "required globally: it makes the invariant curve x = 1/a1 a "
                "hyperbolic cycle repelling the lower component of V, while "
                "the definite sign of a2 guards the upper one"
            )
        else:
            note += (
                "; a1 < 0 on the whole circle, so the premise of the second "
                "condition is empty and the bound rides on the definite sign "
                "of a2 over both components of V"
            )
    return note


def check_definite_a2(f: FactoredAbel) -> CriterionVerdict:
    """One-signed a2 (strict on an interval) bounds the count by one on its
    own, for any region shape."""
    cid = "definite_a2"
    if riccati_bound_applies(f):
        return CriterionVerdict(cid, Outcome.INAPPLICABLE, notes=_RICCATI_NOTE)
    rep = definite_sign_report(f.a2.sign_proxy())
    if rep.sign.is_nonnegative or rep.sign.is_nonpositive:
        branch = Branch.POSITIVE if rep.sign.is_nonnegative else Branch.NEGATIVE
        direction = 1 if branch is Branch.POSITIVE else -1
        ev = circle_strict_interval(
            [(f.a2, direction)], f"a2 {'>' if direction > 0 else '<'} 0 strictly"
        )
        if ev is None:
            return CriterionVerdict(
                cid,
                Outcome.INAPPLICABLE,
                notes="a2 is one-signed but vanishes off a null set",
            )
        return CriterionVerdict(
            cid,
            Outcome.HOLDS,
            bound=Bound.AT_MOST_ONE,
            branch=branch,
            strictness=ev,
            notes="a2 keeps one sign over the whole period",
        )
    return CriterionVerdict(
        cid,
        Outcome.FAILS,
        witnesses=tuple(_sign_change_witnesses("a2", rep)),
        notes="a2 changes sign",
    )


# --- normalized-form criterion ----------------------------------------------


def check_normalized(
    n: NormalizedAbel, eta_grid: Sequence[Fraction] = ()
) -> CriterionVerdict:
    """Normalized-form bound: Holds (AtMostOne) when any of the following is
    certified: (i) a1 never vanishes and some eta makes
    a1*b2 + eta*a2*b1 + a1'/b1 sign definite; (ii) a2 keeps one sign;
    (iii) a1*a2 and b1*b2 keep opposite (non-strict) signs.

    Fails only when all three are certifiably false; an inconclusive eta
    search with no other condition holding is reported as Inapplicable.
    """
    cid = "normalized_bound"
    if not (n.a2n.pole_free() and n.b2n.pole_free()):
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            notes="a2 or b2 has poles in normalized form; the criterion needs pole-free data",
        )
    b1rep = definite_sign_report(n.b1n)
    if not b1rep.sign.is_strict:
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            notes="the normalizing multiplier b1 must keep a strict sign",
        )

    held: list[str] = []
    witnesses: list[Witness] = []
    eta_val: Optional[Fraction] = None
    branch: Optional[Branch] = None
    unknown = False

    rep2 = definite_sign_report(n.a2n.sign_proxy())
    if rep2.sign.is_nonnegative or rep2.sign.is_nonpositive:
        held.append("(ii) a2 keeps one sign")
    else:
        witnesses.extend(_sign_change_witnesses("a2", rep2))

    g1 = TrigRational.from_poly(n.a1n) * n.a2n
    g2 = TrigRational.from_poly(n.b1n) * n.b2n
    rep_g1 = definite_sign_report(g1.sign_proxy())
    rep_g2 = definite_sign_report(g2.sign_proxy())
    if (rep_g1.sign.is_nonnegative and rep_g2.sign.is_nonpositive) or (
        rep_g1.sign.is_nonpositive and rep_g2.sign.is_nonnegative
    ):
        held.append("(iii) a1*a2 and b1*b2 keep opposite signs")
    else:
        witnesses.extend(_sign_change_witnesses("a1*a2", rep_g1))
        witnesses.extend(_sign_change_witnesses("b1*b2", rep_g2))

    rep1 = definite_sign_report(n.a1n)
    if not rep1.sign.is_strict:
        if rep1.sign is SignOnSet.MIXED:
            witnesses.extend(_sign_change_witnesses("a1", rep1))
        zw = _zero_witness(n.a1n, "a1 = 0 inside this interval")
        if zw is not None:
            witnesses.append(zw)
    else:
        base = TrigRational.from_poly(n.a1n) * n.b2n + TrigRational(
            n.a1n.derivative(), n.b1n
        )
        mult = n.a2n * TrigRational.from_poly(n.b1n)
        out, br = _exists_definite_combination(
            base.reduced(), mult.reduced(), list(eta_grid)
        )
        if out.status == "Feasible":
            held.append(
                "(i) a1 never vanishes and the eta-combination keeps one sign"
            )
            eta_val, branch = out.value, br
        elif out.status == "Infeasible":
            witnesses.extend(out.witnesses)
        else:
            unknown = True

    if held:
        return CriterionVerdict(
            cid,
            Outcome.HOLDS,
            bound=Bound.AT_MOST_ONE,
            branch=branch,
            eta=eta_val,
            notes="satisfied: " + "; ".join(held),
        )
    if unknown:
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            witnesses=tuple(witnesses),
            notes=(
                "the eta feasibility search was inconclusive and no other "
                "condition holds"
            ),
        )
    return CriterionVerdict(
        cid,
        Outcome.FAILS,
        witnesses=tuple(witnesses),
        notes="all three conditions fail",
    )


# --- planar homogeneous criteria ---------------------------------------------


def check_planar_no_cycle(sys: HomogeneousSystem) -> CriterionVerdict:
    """No limit cycle surrounding the origin when the phi/psi sign conditions
    hold; branch fixed by the sign of a."""
    return _planar_criterion(sys, "planar_no_cycle")


def check_planar_at_most_one(sys: HomogeneousSystem) -> CriterionVerdict:
    """At most one limit cycle surrounding the origin; same structure with the
    first condition flipped."""
    return _planar_criterion(sys, "planar_at_most_one")


def _planar_criterion(sys: HomogeneousSystem, cid: str) -> CriterionVerdict:
    bound = Bound.NO_CYCLE if cid == "planar_no_cycle" else Bound.AT_MOST_ONE
    if sys.a == 0:
        return CriterionVerdict(
            cid, Outcome.INAPPLICABLE, notes="the trace parameter a must be nonzero"
        )
    psi = sys.psi()
    phi = sys.phi()
    if psi.is_zero:
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            notes=(
                "psi is identically zero: the radial equation is a Riccati "
                "equation with at most one non-null limit cycle"
            ),
        )
    omega = psi.scale(sys.a) - phi
    if omega.is_zero:
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            notes=(
                "a*psi - phi is identically zero, so the reduced equation is "
                "Riccati with at most one non-null cycle"
            ),
        )
    sigma = 1 if sys.a > 0 else -1
    branch = Branch.POSITIVE if sigma > 0 else Branch.NEGATIVE
    dir_i = -sigma if cid == "planar_no_cycle" else sigma
    cmp_i = "<= 0" if dir_i < 0 else ">= 0"
    ok_i, w_i = circle_implication(
        psi, -1, omega, dir_i, f"psi < 0 implies a psi - phi {cmp_i}"
    )
    cmp_ii = ">= 0" if sigma > 0 else "<= 0"
    ok_ii, w_ii = circle_implication(psi, 1, phi, sigma, f"psi > 0 implies phi {cmp_ii}")
    if not (ok_i and ok_ii):
        return CriterionVerdict(
            cid,
            Outcome.FAILS,
            eta=Fraction(-1),
            witnesses=tuple(w for w in (w_i, w_ii) if w is not None),
            notes=f"a sign condition is violated (branch forced by a = {sys.a})",
        )
    if (
        cid == "planar_no_cycle"
        and definite_sign_report(psi).sign is SignOnSet.STRICTLY_NEGATIVE
    ):
        # psi < 0 on the whole circle: the transformed picture has a second
        # component below the curve psi*rho = 1, reached by orbits with
        # 1 + psi r^(n-1) < 0.  Excluding cycles there needs that curve to be
        # a hyperbolic cycle, i.e. phi one-signed on the whole circle (its
        # psi > 0 premise is empty) and not identically zero.
        ok_g, w_g = circle_implication(
            TrigPoly.constant(1),
            1,
            phi,
            sigma,
            f"psi < 0 everywhere requires phi {cmp_ii} on the whole circle",
        )
        if not ok_g:
            return CriterionVerdict(
                cid,
                Outcome.FAILS,
                eta=Fraction(-1),
                witnesses=(w_g,) if w_g is not None else (),
                notes=(
                    "psi < 0 on the whole circle, so phi must keep one sign "
                    f"everywhere (branch forced by a = {sys.a})"
                ),
            )
        if circle_strict_interval(
            [(phi, sigma)], f"phi {'>' if sigma > 0 else '<'} 0 strictly"
        ) is None:
            return CriterionVerdict(
                cid,
                Outcome.INAPPLICABLE,
                notes=(
                    "psi < 0 on the whole circle and phi is identically "
                    "zero, so the curve psi*rho = 1 is a neutral cycle and "
                    "cannot repel its component"
                ),
            )
    ev = circle_strict_interval(
        [(psi, -1), (omega, dir_i)],
        f"psi < 0 and a psi - phi {'<' if dir_i < 0 else '>'} 0 strictly",
    )
    if ev is None:
        ev = circle_strict_interval(
            [(psi, 1), (phi, sigma)],
            f"psi > 0 and phi {'>' if sigma > 0 else '<'} 0 strictly",
        )
    if ev is None:
        return CriterionVerdict(
            cid,
            Outcome.INAPPLICABLE,
            notes="the sign conditions never hold strictly on an interval",
        )
    return CriterionVerdict(
        cid,
        Outcome.HOLDS,
        bound=bound,
        branch=branch,
        eta=Fraction(-1),
        strictness=ev,
        notes=f"branch fixed by the sign of a = {sys.a}",
    )


# --- obstruction certificates ------------------------------------------------


@dataclass(frozen=True)
class ObstructionCheck:
    """holds=True: certified that no combination of the checked family has
    definite sign; holds=False: some combination works (or the data is
    degenerate); holds=None: undecided within the search budget."""

    check: str
    holds: Optional[bool]
    witnesses: tuple[Witness, ...] = ()
    note: str = ""

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "holds": self.holds,
            "witnesses": [w.to_json() for w in self.witnesses],
            "note": self.note,
        }


@dataclass(frozen=True)
class ObstructionReport:
    checks: tuple[ObstructionCheck, ...]

    @property
    def all_hold(self) -> bool:
        return all(c.holds is True for c in self.checks)

    def to_json(self) -> dict:
        return {
            "all_hold": self.all_hold,
            "checks": [c.to_json() for c in self.checks],
        }


def obstruction_report(sys: HomogeneousSystem) -> ObstructionReport:
    """Five exact certificates that no sign-combination route applies to the
    system: chart-polynomial combinations, weighted products, and the
    individual pieces are all indefinite."""
    psi = sys.psi()
    phi = sys.phi()
    m = sys.n - 1
    omega1 = psi.scale(sys.a) - phi
    omega2 = (psi.scale(2 * sys.a) - phi).scale(m) + psi.derivative()
    checks = (
        _chart_combination_check(omega1, omega2),
        _weighted_product_check(sys.a, omega1, psi, phi),
        _indefinite_parts_check(
            "parts_indefinite",
            [("a psi - phi", omega1), ("offset part", omega2)],
        ),
        _indefinite_parts_check(
            "offset_combinations_indefinite",
            [
                ("second part minus (n-1) times first", omega2 - omega1.scale(m)),
                ("second part minus 2(n-1) times first", omega2 - omega1.scale(2 * m)),
            ],
        ),
        _indefinite_parts_check(
            "product_parts_indefinite",
            [
                ("a (a psi - phi) psi", (omega1 * psi).scale(sys.a)),
                ("(a psi - phi) phi", omega1 * phi),
            ],
        ),
    )
    return ObstructionReport(checks)


def _indefinite_parts_check(
    check_id: str, labeled: Sequence[tuple[str, TrigPoly]]
) -> ObstructionCheck:
    witnesses: list[Witness] = []
    degenerate: list[str] = []
    for label, fp in labeled:
        rep = definite_sign_report(fp)
        if rep.sign is SignOnSet.MIXED:
            witnesses.extend(_sign_change_witnesses(label, rep))
        else:
            degenerate.append(f"{label} has definite sign {rep.sign.value}")
    if degenerate:
        return ObstructionCheck(check_id, False, note="; ".join(degenerate))
    return ObstructionCheck(
        check_id, True, tuple(witnesses), "every part changes sign"
    )


def _chart_combination_check(omega1: TrigPoly, omega2: TrigPoly) -> ObstructionCheck:
    """No real combination mu1*P1 + mu2*P2 of the two chart polynomials keeps
    one sign on the real line."""
    check_id = "chart_combination"
    if omega1.is_zero or omega2.is_zero:
        return ObstructionCheck(
            check_id, False, note="a part vanishes identically (degenerate)"
        )
    pieces, _ = chart_functions([omega1, omega2])
    p1, p2 = pieces[0].proxies
    chart = pieces[0].chart
    s1 = sign_on_real_line(p1)
    if s1 is not SignOnSet.MIXED:
        return ObstructionCheck(
            check_id,
            False,
            note=f"the first chart polynomial alone has sign {s1.value}",
        )
    up = linear_parameter_feasible([(p2, p1)], chart=chart)
    if up.status == "Feasible":
        return ObstructionCheck(
            check_id, False, note=f"P2 + ({up.value}) P1 is nonnegative"
        )
    down = linear_parameter_feasible([(p2.scale(-1), p1.scale(-1))], chart=chart)
    if down.status == "Feasible":
        return ObstructionCheck(
            check_id, False, note=f"P2 + ({down.value}) P1 is nonpositive"
        )
    if up.status == "Infeasible" and down.status == "Infeasible":
        return ObstructionCheck(
            check_id,
            True,
            up.witnesses + down.witnesses,
            "no combination of the chart polynomials keeps one sign",
        )
    return ObstructionCheck(check_id, None, note="feasibility search inconclusive")


def _weighted_product_check(
    a: Fraction, omega1: TrigPoly, psi: TrigPoly, phi: TrigPoly
) -> ObstructionCheck:
    """No admissible weights nu1, nu2 >= 0 (not both trivial) make
    (a psi - phi) * (nu1 a psi - nu2 phi) nonpositive on the circle."""
    check_id = "weighted_product"
    t_phi = omega1 * phi
    rep_b = definite_sign_report(t_phi)
    if rep_b.sign.is_nonnegative:
        return ObstructionCheck(
            check_id,
            False,
            note="(a psi - phi) phi is nonnegative, so the phi-only weight works",
        )
    wit_b: list[Witness] = []
    if rep_b.negative_at is not None:
        wit_b.append(
            _witness_from_sample("(a psi - phi) phi < 0 here", rep_b.negative_at)
        )
    if a == 0:
        return ObstructionCheck(
            check_id,
            True,
            tuple(wit_b),
            "a = 0 leaves only the phi weight, and it fails",
        )
    base = (omega1 * psi).scale(-a)
    out = definite_combination_feasible(
        base, t_phi, 1, parameter_planes=[(Fraction(0), Fraction(1))]
    )
    if out.status == "Feasible":
        return ObstructionCheck(
            check_id,
            False,
            note=f"weights nu1 = 1, nu2 = {out.value} make the product nonpositive",
        )
    if out.status == "Infeasible":
        return ObstructionCheck(
            check_id,
            True,
            tuple(wit_b) + out.witnesses,
            "no admissible weights make the product one-signed",
        )
    return ObstructionCheck(check_id, None, note="feasibility search inconclusive")


# --- eta sweep -----------------------------------------------------------------


def eta_candidates(f: FactoredAbel) -> list[Fraction]:
    """Rational multipliers worth trying in b2 + eta*a1'/a1: the standard
    {-1, 0, 1} plus any eta that cancels every odd-order pole (matched on the
    half-angle chart and on its half-period rotation, so the point theta = pi
    is covered)."""
    found = {Fraction(-1), Fraction(0), Fraction(1)}
    log_deriv = TrigRational(f.a1.derivative(), f.a1)
    for rotated in (False, True):
        b2, ld = f.b2, log_deriv
        if rotated:
            b2 = TrigRational(rotate_half(b2.num), rotate_half(b2.den))
            ld = TrigRational(rotate_half(ld.num), rotate_half(ld.den))
        eta = _pole_matching_eta(b2, ld)
        if eta is not None and eta not in found:
            if not has_odd_order_pole(cancel_pole_combination(f.b2, f.a1, eta)):
                found.add(eta)
    return sorted(found)


def _pole_matching_eta(b2: TrigRational, log_deriv: TrigRational) -> Optional[Fraction]:
    """The unique eta with numerator(b2) + eta*numerator(log-derivative)
    divisible by the odd-multiplicity part of the common chart denominator,
    when such an eta exists."""
    nb, db = b2.reduced().half_angle_pair()
    na, da = log_deriv.reduced().half_angle_pair()
    g = db.gcd(da)
    da_red = da.exact_div(g) if g.degree > 0 else da
    db_red = db.exact_div(g) if g.degree > 0 else db
    denom = db * da_red
    target = denom.odd_multiplicity_part()
    if target.degree <= 0:
        return None
    ra = (nb * da_red).divmod(target)[1]
    rb = (na * db_red).divmod(target)[1]
    if rb.is_zero:
        return None
    if ra.is_zero:
        return Fraction(0)
    k = next(i for i, c in enumerate(rb.coeffs) if c != 0)
    num = ra.coeffs[k] if k < len(ra.coeffs) else Fraction(0)
    eta = -num / rb.coeffs[k]
    if (ra + rb.scale(eta)).is_zero:
        return eta
    return None
