#!/usr/bin/env python3
"""Re-derive both gallery systems end to end and cross-check the exact
verdicts against the numerical oracle; exit nonzero on any mismatch."""

import sys
import time

from abelcycles.criteria import Outcome, check_at_most_one, check_planar_no_cycle
from abelcycles.gallery import (
    EXAMPLE1_ETA,
    example1_factored,
    example2_system,
    reproduce,
)
from abelcycles.oracle import IntegratorConfig, count_cycles_in_V
from abelcycles.planar import cherkas_transform


def main() -> int:
    failures = 0
    for example in ("example1", "example2"):
        t0 = time.monotonic()
        report = reproduce(example)
        dt = time.monotonic() - t0
        for line in report.lines:
            status = "PASS" if line.passed else "FAIL"
            print(f"  {status}  {line.name}")
        print(f"{example}: {'ok' if report.ok else 'MISMATCH'} ({dt:.1f}s)")
        failures += sum(1 for line in report.lines if not line.passed)

    cfg = IntegratorConfig()
    print("cross-checks against the displacement-map oracle:")

    f1 = example1_factored()
    v1 = check_at_most_one(f1, EXAMPLE1_ETA)
    rep1 = count_cycles_in_V(f1, cfg, grid_density=200)
    ok1 = v1.outcome is Outcome.HOLDS and rep1.count <= 1
    print(f"  {'PASS' if ok1 else 'FAIL'}  gallery 1: certified at most one, "
          f"oracle found {rep1.count}")
    failures += 0 if ok1 else 1

    sys2 = example2_system()
    v2 = check_planar_no_cycle(sys2)
    rep2 = count_cycles_in_V(cherkas_transform(sys2), cfg, grid_density=200)
    ok2 = v2.outcome is Outcome.HOLDS and rep2.count == 0
    print(f"  {'PASS' if ok2 else 'FAIL'}  gallery 2: certified cycle-free, "
          f"oracle found {rep2.count}")
    failures += 0 if ok2 else 1

    print("all good" if failures == 0 else f"{failures} failure(s)")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
