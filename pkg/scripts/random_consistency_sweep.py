#!/usr/bin/env python3
"""Rejection-sample random instances until enough pass each criterion, then
verify the oracle never finds more cycles than certified."""

import argparse
import random
import sys
from fractions import Fraction

from abelcycles.abel import FactoredAbel
from abelcycles.criteria import (
    Outcome,
    check_at_most_one,
    check_no_cycle,
    eta_candidates,
)
from abelcycles.oracle import IntegratorConfig, count_cycles_in_V
from abelcycles.trig import TrigPoly, TrigRational


def random_instance(rng: random.Random) -> FactoredAbel:
    """Small rational trig coefficients; a1 either a nonzero constant or a
    constant-dominated wave so the region classification stays clean."""
    def frac(lo=-2, hi=2, den=2):
        return Fraction(rng.randint(lo, hi), rng.randint(1, den))

    sign = rng.choice([-1, 1])
    if rng.random() < 0.5:
        a1 = TrigPoly.constant(sign * Fraction(rng.randint(1, 2), 1))
    else:
        c0 = Fraction(rng.randint(2, 3), 1)
        a1 = TrigPoly.constant(sign * c0) + TrigPoly.coswave(1, frac(-1, 1, 2))
    a2 = TrigPoly.constant(frac()) + TrigPoly.sinwave(1, frac(-1, 1, 2))
    b2 = TrigPoly.constant(frac()) + TrigPoly.coswave(1, frac(-1, 1, 2))
    return FactoredAbel.from_parts(
        a1, TrigRational.from_poly(a2), TrigRational.from_poly(b2)
    )


def holds_for_some_eta(checker, f: FactoredAbel):
    for eta in eta_candidates(f):
        v = checker(f, eta)
        if v.outcome is Outcome.HOLDS:
            return v
    return None


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--per-criterion", type=int, default=20)
    parser.add_argument("--grid", type=int, default=80)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    cfg = IntegratorConfig()

    violations = 0
    for name, checker, bound in (
        ("no_cycle", check_no_cycle, 0),
        ("at_most_one", check_at_most_one, 1),
    ):
        found = 0
        tried = 0
        while found < args.per_criterion:
            tried += 1
            f = random_instance(rng)
            v = holds_for_some_eta(checker, f)
            if v is None:
                continue
            found += 1
            rep = count_cycles_in_V(f, cfg, grid_density=args.grid)
            ok = rep.count <= bound
            print(f"{name} #{found:02d} (draw {tried}): certified <= {bound}, "
                  f"oracle {rep.count} [{rep.region}] {'ok' if ok else 'VIOLATION'}")
            if not ok:
                violations += 1
    print("consistent" if violations == 0 else f"{violations} violation(s)")
    return 0 if violations == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
