"""Numerical displacement-map oracle for periodic Abel equations.

The exact criteria certify bounds; this module independently measures them.
It integrates x' = x (C1 + C2 x + C3 x^2) with an embedded adaptive
Runge-Kutta 5(4) pair (Dormand-Prince coefficients, FSAL), co-integrating the
variational equation so the derivative of the displacement map comes from the
flow itself rather than finite differences. Sweeps are vectorized over the
initial conditions with a shared adaptive step and per-sample escape flags.

Region handling mirrors the exact classifier: the bounded fiber (0, 1/a1(0))
when a1 starts positive, a flagged heuristic cutoff when the fiber is
unbounded, and the y = a1 x chart for the two-component region of strictly
negative a1 (components y < 0 and y > 1 in bounded coordinates).
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .abel import (
    AbelEquation,
    FactoredAbel,
    RegionKind,
    classify_region,
    negative_component_transform,
)
from .trig import Period, TrigRational

Equation = Union[AbelEquation, FactoredAbel]

UNBOUNDED_FIBER_CUTOFF = 1.0e3  # heuristic: no a priori amplitude bound
NONHYPERBOLIC_MARGIN = 1.0e-6
BISECTION_WIDTH = 1.0e-10


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1.0e-10
    atol: float = 1.0e-12
    max_step_fraction: float = 0.05
    pole_guard: float = 1.0e-6
    x_max: float = 1.0e6
    min_step: float = 1.0e-13
    max_steps: int = 500_000

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if self.pole_guard <= 0:
            raise ValueError("the pole-guard margin must be positive")


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    variation: float
    escaped: bool
    reason: str = ""
    t_reached: float = 0.0


@dataclass(frozen=True)
class DisplacementSample:
    x0: float
    d: float
    dprime: float
    escaped: bool

    def to_json(self) -> dict:
        return {
            "x0": self.x0,
            "d": self.d,
            "dprime": self.dprime,
            "escaped": self.escaped,
        }


@dataclass(frozen=True)
class Cycle:
    component: str
    bracket: tuple[float, float]
    x_star: float
    dprime: float
    stability: str  # "Stable" | "Unstable" | "NonHyperbolic?"

    def to_json(self) -> dict:
        return {
            "component": self.component,
            "bracket": list(self.bracket),
            "x_star": self.x_star,
            "dprime": self.dprime,
            "stability": self.stability,
        }


@dataclass(frozen=True)
class CycleReport:
    region: str
    cycles: tuple[Cycle, ...]
    components: tuple[str, ...]
    sign_changes: int
    escaped_samples: int
    total_samples: int
    heuristic_cutoff: bool
    notes: str = ""

    @property
    def count(self) -> int:
        return len(self.cycles)

    def to_json(self) -> dict:
        return {
            "region": self.region,
            "count": self.count,
            "cycles": [c.to_json() for c in self.cycles],
            "components": list(self.components),
            "sign_changes": self.sign_changes,
            "escaped_samples": self.escaped_samples,
            "total_samples": self.total_samples,
            "heuristic_cutoff": self.heuristic_cutoff,
            "notes": self.notes,
        }


# --- coefficient compilation -----------------------------------------------


def period_float(p: Period) -> float:
    return math.pi if p is Period.PI else 2.0 * math.pi


class _PoleGuard(Exception):
    pass


def _compile_rational(tr: TrigRational) -> tuple[tuple, tuple]:
    r = tr.reduced()
    num = tuple((i, j, float(c)) for (i, j), c in r.num.terms)
    den = tuple((i, j, float(c)) for (i, j), c in r.den.terms)
    return num, den


def _eval_terms(terms: tuple, c: float, s: float) -> float:
    total = 0.0
    for i, j, co in terms:
        total += co * c**i * s**j
    return total


class CubicField:
    """Float evaluator of the cubic right-hand side and its x-derivative."""

    def __init__(self, eq: Equation, guard: float):
        abel = eq.to_abel() if isinstance(eq, FactoredAbel) else eq
        self.coeffs = [
            _compile_rational(abel.c1),
            _compile_rational(abel.c2),
            _compile_rational(abel.c3),
        ]
        self.guard = guard
        self.period = period_float(abel.period)

    def values(self, t: float) -> tuple[float, float, float]:
        c, s = math.cos(t), math.sin(t)
        out = []
        for num, den in self.coeffs:
            dv = _eval_terms(den, c, s)
            if abs(dv) <= self.guard:
                raise _PoleGuard(f"coefficient denominator below guard at t={t:.6g}")
            out.append(_eval_terms(num, c, s) / dv)
        return tuple(out)

    def __call__(self, t: float, x: np.ndarray, z: np.ndarray):
        c1, c2, c3 = self.values(t)
        with np.errstate(all="ignore"):
            fx = c1 + x * (2.0 * c2 + 3.0 * c3 * x)
            return x * (c1 + x * (c2 + c3 * x)), fx * z


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_ERR = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def _integrate_batch(
    field: CubicField,
    t0: float,
    t1: float,
    x0: Sequence[float],
    cfg: IntegratorConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[str]]:
    """Advance the batch from t0 to t1. Returns final x, final variational
    factor z (dx(t1)/dx0), escape flags, and per-sample escape reasons."""
    x = np.asarray(x0, dtype=float).copy()
    z = np.ones_like(x)
    escaped = np.zeros(x.shape, dtype=bool)
    reasons = [""] * x.size
    span = t1 - t0
    if span <= 0:
        return x, z, escaped, reasons
    h_max = span * cfg.max_step_fraction
    h = h_max / 8
    t = t0
    active = np.ones(x.shape, dtype=bool)

    def mark(mask: np.ndarray, why: str):
        for idx in np.nonzero(mask)[0]:
            if not escaped[idx]:
                reasons[idx] = why
        escaped[mask] = True
        active[mask] = False

    big = np.abs(x) > cfg.x_max
    mark(big, "initial condition beyond x_max")

    try:
        k1 = field(t, x, z)
    except _PoleGuard as exc:
        mark(active.copy(), str(exc))
        return x, z, escaped, reasons

    steps = 0
    while t < t1 - 1e-14 * span and active.any():
        steps += 1
        if steps > cfg.max_steps:
            mark(active.copy(), "step budget exhausted")
            break
        h = min(h, t1 - t)
        kx = [k1[0]]
        kz = [k1[1]]
        try:
            with np.errstate(all="ignore"):
                for stage in range(1, 7):
                    xa = x.copy()
                    za = z.copy()
                    for coeff, sx, sz in zip(_DP_A[stage], kx, kz):
                        xa = xa + h * coeff * sx
                        za = za + h * coeff * sz
                    fx, fz = field(t + _DP_C[stage] * h, xa, za)
                    kx.append(fx)
                    kz.append(fz)
        except _PoleGuard as exc:
            h *= 0.25
            if h < cfg.min_step:
                mark(active.copy(), str(exc))
                break
            continue
        # stage 7 state is the 5th-order solution (FSAL)
        x5, z5 = xa, za
        err_x = np.zeros_like(x)
        err_z = np.zeros_like(z)
        with np.errstate(all="ignore"):
            for coeff, sx, sz in zip(_DP_ERR, kx, kz):
                err_x = err_x + h * coeff * sx
                err_z = err_z + h * coeff * sz
        with np.errstate(invalid="ignore", over="ignore"):
            scale_x = cfg.atol + cfg.rtol * np.maximum(np.abs(x), np.abs(x5))
            scale_z = cfg.atol + cfg.rtol * np.maximum(np.abs(z), np.abs(z5))
            ratio = np.maximum(np.abs(err_x) / scale_x, np.abs(err_z) / scale_z)
        bad = active & (~np.isfinite(ratio) | ~np.isfinite(x5))
        ratio = np.where(np.isfinite(ratio), ratio, np.inf)
        enorm = float(np.max(ratio[active])) if active.any() else 0.0
        if enorm > 1.0 or bad.any():
            if h <= cfg.min_step * 1.0001:
                # cannot shrink further: drop the offending samples, keep
                # the rest moving
                worst = active & (ratio > 1.0)
                mark(worst, "step-size underflow (blow-up or stiffness)")
                continue
            h = max(h * max(0.2, 0.9 * enorm ** (-0.2) if enorm > 0 else 0.2), cfg.min_step)
            continue
        t += h
        x = np.where(active, x5, x)
        z = np.where(active, z5, z)
        k1 = (kx[6], kz[6])
        big = active & (np.abs(x) > cfg.x_max)
        if big.any():
            mark(big, "left the x_max window")
        factor = 5.0 if enorm == 0.0 else min(5.0, max(0.2, 0.9 * enorm ** (-0.2)))
        h = min(h * factor, h_max)
    return x, z, escaped, reasons


def integrate(
    eq: Equation,
    x0: float,
    t0: float,
    t1: float,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> IntegrationResult:
    """Solve from (t0, x0) to t1; escape (x_max, pole guard, or step
    underflow) is reported, not raised."""
    field = CubicField(eq, cfg.pole_guard)
    x, z, esc, reasons = _integrate_batch(field, t0, t1, [x0], cfg)
    return IntegrationResult(
        value=float(x[0]),
        variation=float(z[0]),
        escaped=bool(esc[0]),
        reason=reasons[0],
        t_reached=t1 if not esc[0] else math.nan,
    )


def _thread_count() -> int:
    raw = os.environ.get("ABEL_CYCLES_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def displacement_map(
    eq: Equation,
    grid: Sequence[float],
    cfg: IntegratorConfig = IntegratorConfig(),
) -> list[DisplacementSample]:
    """One displacement sample per initial condition: d = u(T, x0) - x0 and
    d' from the variational factor. Samples are independent; the sweep splits
    across ABEL_CYCLES_THREADS chunks when that is set above 1."""
    field = CubicField(eq, cfg.pole_guard)
    period = field.period
    xs = np.asarray(list(grid), dtype=float)
    threads = _thread_count()
    if threads > 1 and xs.size >= 2 * threads:
        chunks = np.array_split(np.arange(xs.size), threads)
        results: list = [None] * threads

        def run(i: int):
            results[i] = _integrate_batch(field, 0.0, period, xs[chunks[i]], cfg)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(threads)))
        xT = np.concatenate([r[0] for r in results])
        zT = np.concatenate([r[1] for r in results])
        esc = np.concatenate([r[2] for r in results])
    else:
        xT, zT, esc, _ = _integrate_batch(field, 0.0, period, xs, cfg)
    out = []
    for x0, xf, zf, e in zip(xs, xT, zT, esc):
        out.append(
            DisplacementSample(
                x0=float(x0),
                d=float(xf - x0) if not e else math.nan,
                dprime=float(zf - 1.0) if not e else math.nan,
                escaped=bool(e),
            )
        )
    return out


def graded_grid(lo: float, hi: float, m: int) -> list[float]:
    """m interior points of (lo, hi), denser near both endpoints (cycles tend
    to hide near the invariant boundary curves)."""
    out = []
    for k in range(1, m + 1):
        u = k / (m + 1)
        w = u * u * (3 - 2 * u)
        out.append(lo + (hi - lo) * w)
    return out


def fiber_components(f: FactoredAbel) -> tuple[list[tuple[str, Equation, float, float]], bool, str]:
    """Connected components of V's fiber at t=0 in bounded coordinates:
    (label, equation to integrate, lo, hi) per component, heuristic flag,
    note."""
    region = classify_region(f)
    a10 = float(f.a1.evaluate_float(0.0))
    if region.kind is RegionKind.A1_NEGATIVE:
        g = negative_component_transform(f)
        cut = UNBOUNDED_FIBER_CUTOFF
        comps = [
            ("y<0 (x>0)", g, -cut, 0.0),
            ("y>1 (x<1/a1)", g, 1.0, 1.0 + cut),
        ]
        return comps, True, "two components scanned in the y = a1 x chart"
    if a10 > 0:
        return [("0<x<1/a1(0)", f, 0.0, 1.0 / a10)], False, ""
    note = (
        "a1(0) <= 0 leaves the fiber unbounded; grid cut at "
        f"{UNBOUNDED_FIBER_CUTOFF:g} (heuristic)"
    )
    return [("x>0 (cutoff)", f, 0.0, UNBOUNDED_FIBER_CUTOFF)], True, note


def _classify(dprime: float) -> str:
    if not math.isfinite(dprime) or abs(dprime) < NONHYPERBOLIC_MARGIN:
        return "NonHyperbolic?"
    return "Stable" if dprime < 0 else "Unstable"


def _refine_bracket(
    eq: Equation,
    period: float,
    lo: float,
    hi: float,
    d_lo: float,
    cfg: IntegratorConfig,
) -> tuple[float, float, tuple[float, float]]:
    field = CubicField(eq, cfg.pole_guard)
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        x, z, esc, _ = _integrate_batch(field, 0.0, period, [mid], cfg)
        if esc[0]:
            break
        d_mid = float(x[0]) - mid
        if d_mid == 0.0:
            lo = hi = mid
            break
        if (d_mid > 0) == (d_lo > 0):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    x_star = 0.5 * (lo + hi)
    x, z, esc, _ = _integrate_batch(field, 0.0, period, [x_star], cfg)
    dprime = float(z[0]) - 1.0 if not esc[0] else math.nan
    return x_star, dprime, (lo, hi)


def count_cycles_in_V(
    f: FactoredAbel,
    cfg: IntegratorConfig = IntegratorConfig(),
    grid_density: int = 400,
) -> CycleReport:
    """Scan every component of V's fiber at t=0, bracket the sign changes of
    the displacement map, refine each bracket by bisection, and classify the
    stability of each cycle by the sign of d'."""
    comps, heuristic, note = fiber_components(f)
    cycles: list[Cycle] = []
    sign_changes = 0
    escaped_total = 0
    total = 0
    for label, eq, lo, hi in comps:
        period = period_float(eq.period)
        samples = displacement_map(eq, graded_grid(lo, hi, grid_density), cfg)
        total += len(samples)
        escaped_total += sum(1 for s in samples if s.escaped)
        valid = [s for s in samples if not s.escaped and math.isfinite(s.d)]
        for s in valid:
            if s.d == 0.0:
                cycles.append(
                    Cycle(label, (s.x0, s.x0), s.x0, s.dprime, _classify(s.dprime))
                )
        for left, right in zip(valid, valid[1:]):
            if left.d == 0.0 or right.d == 0.0:
                continue
            if (left.d > 0) != (right.d > 0):
                sign_changes += 1
                x_star, dprime, bracket = _refine_bracket(
                    eq, period, left.x0, right.x0, left.d, cfg
                )
                cycles.append(
                    Cycle(label, bracket, x_star, dprime, _classify(dprime))
                )
    return CycleReport(
        region=classify_region(f).kind.value,
        cycles=tuple(cycles),
        components=tuple(label for label, _, _, _ in comps),
        sign_changes=sign_changes,
        escaped_samples=escaped_total,
        total_samples=total,
        heuristic_cutoff=heuristic,
        notes=note,
    )


def verify_invariance(
    f: FactoredAbel,
    curve: str,
    cfg: IntegratorConfig = IntegratorConfig(),
    theta_range: Optional[tuple[float, float]] = None,
    checkpoints: int = 64,
) -> float:
    """Maximum deviation of the named invariant curve along a trajectory
    started on it: |u(t)| for curve 'zero', |a1(t) u(t) - 1| for curve 'a1'.

    For 'a1' the range must keep a1 bounded away from zero; the sweep stops
    (returning the maximum so far) if the trajectory escapes.
    """
    if curve not in ("zero", "a1"):
        raise ValueError("curve must be 'zero' or 'a1'")
    period = period_float(f.period)
    t_lo, t_hi = theta_range if theta_range is not None else (0.0, period)
    if curve == "zero":
        x0 = 0.0
    else:
        a1_start = f.a1.evaluate_float(t_lo)
        if abs(a1_start) < 10 * cfg.pole_guard:
            raise ValueError("a1 vanishes at the start of the requested range")
        x0 = 1.0 / a1_start
    field = CubicField(f, cfg.pole_guard)
    ts = [t_lo + (t_hi - t_lo) * k / checkpoints for k in range(checkpoints + 1)]
    worst = 0.0
    x = np.array([x0])
    for ta, tb in zip(ts, ts[1:]):
        x, _, esc, _ = _integrate_batch(field, ta, tb, x, cfg)
        if esc[0]:
            break
        if curve == "zero":
            dev = abs(float(x[0]))
        else:
            dev = abs(f.a1.evaluate_float(tb) * float(x[0]) - 1.0)
        worst = max(worst, dev)
    return worst


def write_displacement_csv(samples: Sequence[DisplacementSample], path: str):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x0", "d", "dprime", "escaped"])
        for s in samples:
            writer.writerow([repr(s.x0), repr(s.d), repr(s.dprime), int(s.escaped)])


def stability_integral(f: FactoredAbel, eta: float = 0.0, panels: int = 4096) -> float:
    """Numeric value of exp(integral of a1 b2 - a2 + eta a1'/a1) - 1 over one
    period; in the two-component region its sign matches the measured
    stability of the cycle riding the a1 curve."""
    period = period_float(f.period)

    def value(theta: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        a1v = f.a1.evaluate_float(theta)
        b2n = f.b2.num.evaluate_float(theta)
        b2d = f.b2.den.evaluate_float(theta)
        a2n = f.a2.num.evaluate_float(theta)
        a2d = f.a2.den.evaluate_float(theta)
        da1 = f.a1.derivative().evaluate_float(theta)
        return a1v * b2n / b2d - a2n / a2d + eta * da1 / a1v

    total = 0.0
    h = period / panels
    for k in range(panels):
        total += value((k + 0.5) * h) * h
    return math.exp(total) - 1.0
