"""Command-line front end: criterion checks, transforms, displacement-map
sweeps, and one-command re-derivation of the gallery systems.

Exit codes: 0 when some criterion holds (or the requested action succeeded),
1 when every attempted criterion fails (or a reproduction mismatch), 2 for
inapplicable-only results, schema violations, and usage errors. All JSON
output is key-sorted, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .abel import (
    AbelEquation,
    FactoredAbel,
    InvarianceError,
    factor_through_invariant,
    normalize,
)
from .criteria import (
    CriterionVerdict,
    Outcome,
    check_at_most_one,
    check_definite_a2,
    check_no_cycle,
    check_normalized,
    check_planar_at_most_one,
    check_planar_no_cycle,
    eta_candidates,
    obstruction_report,
)
from .gallery import reproduce
from .oracle import (
    IntegratorConfig,
    count_cycles_in_V,
    displacement_map,
    fiber_components,
    graded_grid,
    write_displacement_csv,
)
from .planar import (
    HomogeneousSystem,
    PlanarPolySystem,
    RiccatiRouteError,
    RigidStructureError,
    cherkas_transform,
    detect_rigid,
    rigid_to_abel,
)
from .serialize import ParsedInput, SchemaError, dumps, load_input, write_json
from .trig import TrigPoly

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_INAPPLICABLE = 2

FACTORED_CRITERIA = ("no_cycle", "at_most_one", "definite_a2", "normalized_bound")
PLANAR_CRITERIA = ("planar_no_cycle", "planar_at_most_one")


@dataclass(frozen=True)
class RunConfig:
    input: Optional[str] = None
    pipeline: str = "auto"
    criteria: Optional[tuple[str, ...]] = None
    eta: Optional[Fraction] = None
    grid: int = 400
    rtol: float = 1.0e-10
    atol: float = 1.0e-12
    out: Optional[str] = None
    seed: int = 0


class UsageError(ValueError):
    pass


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_INAPPLICABLE


def _resolve_factored(parsed: ParsedInput, pipeline: str) -> FactoredAbel:
    """Reduce any input schema to the factored form (raises UsageError when
    the route needs an a1 candidate that was not supplied)."""
    if isinstance(parsed.model, FactoredAbel):
        return parsed.model
    if isinstance(parsed.model, HomogeneousSystem):
        return cherkas_transform(parsed.model)
    if isinstance(parsed.model, PlanarPolySystem):
        if pipeline not in ("auto", "rigid"):
            raise UsageError(
                f"pipeline {pipeline!r} cannot consume a planar xdot/ydot input"
            )
        rigid = detect_rigid(parsed.model)
        eq = rigid_to_abel(rigid)
        if parsed.a1_candidate is None:
            raise UsageError(
                "the rigid route needs an \"a1\" candidate in the input to "
                "factor through an invariant curve"
            )
        return factor_through_invariant(eq, parsed.a1_candidate)
    # plain cubic coefficients
    eq = parsed.model
    if parsed.a1_candidate is None:
        raise UsageError(
            "cubic-coefficient input needs an \"a1\" candidate to factor "
            "through an invariant curve"
        )
    return factor_through_invariant(eq, parsed.a1_candidate)


def _eta_pool(f: FactoredAbel, override: Optional[Fraction]) -> list[Fraction]:
    if override is not None:
        return [override]
    return eta_candidates(f)


def _best_over_etas(runner, f: FactoredAbel, etas: Sequence[Fraction]) -> CriterionVerdict:
    """First Holds wins; otherwise prefer a certified failure over an
    inapplicable shrug."""
    fallback: Optional[CriterionVerdict] = None
    for eta in etas:
        v = runner(f, eta)
        if v.outcome is Outcome.HOLDS:
            return v
        if fallback is None or (
            v.outcome is Outcome.FAILS and fallback.outcome is not Outcome.FAILS
        ):
            fallback = v
    assert fallback is not None
    return fallback


def _run_criteria(
    parsed: ParsedInput, cfg: RunConfig
) -> tuple[list[CriterionVerdict], Optional[dict], dict]:
    """Returns (verdicts, obstruction report json or None, equation json)."""
    requested = cfg.criteria
    verdicts: list[CriterionVerdict] = []
    obstructions = None
    if isinstance(parsed.model, HomogeneousSystem):
        wanted = requested or PLANAR_CRITERIA
        known = set(PLANAR_CRITERIA) | set(FACTORED_CRITERIA) | {"obstructions"}
        bad = [c for c in wanted if c not in known]
        if bad:
            raise UsageError(f"unknown criteria: {', '.join(bad)}")
        if "planar_no_cycle" in wanted:
            verdicts.append(check_planar_no_cycle(parsed.model))
        if "planar_at_most_one" in wanted:
            verdicts.append(check_planar_at_most_one(parsed.model))
        factored_wanted = [c for c in wanted if c in FACTORED_CRITERIA]
        if factored_wanted:
            f = cherkas_transform(parsed.model)
            verdicts.extend(_factored_verdicts(f, tuple(factored_wanted), cfg))
        if requested is None or "obstructions" in wanted:
            obstructions = obstruction_report(parsed.model).to_json()
        return verdicts, obstructions, parsed.model.to_json()
    f = _resolve_factored(parsed, cfg.pipeline)
    wanted = requested or FACTORED_CRITERIA
    bad = [c for c in wanted if c not in FACTORED_CRITERIA]
    if bad:
        raise UsageError(f"unknown criteria: {', '.join(bad)}")
    verdicts.extend(_factored_verdicts(f, tuple(wanted), cfg))
    return verdicts, None, f.to_json()


def _factored_verdicts(
    f: FactoredAbel, wanted: tuple[str, ...], cfg: RunConfig
) -> list[CriterionVerdict]:
    etas = _eta_pool(f, cfg.eta)
    out = []
    if "no_cycle" in wanted:
        out.append(_best_over_etas(check_no_cycle, f, etas))
    if "at_most_one" in wanted:
        out.append(_best_over_etas(check_at_most_one, f, etas))
    if "definite_a2" in wanted:
        out.append(check_definite_a2(f))
    if "normalized_bound" in wanted:
        out.append(check_normalized(normalize(f, TrigPoly.constant(1))))
    return out


def _exit_from_verdicts(verdicts: Sequence[CriterionVerdict]) -> int:
    if any(v.outcome is Outcome.HOLDS for v in verdicts):
        return EXIT_HOLDS
    if any(v.outcome is Outcome.FAILS for v in verdicts):
        return EXIT_FAILS
    return EXIT_INAPPLICABLE


def cmd_check(cfg: RunConfig) -> int:
    if cfg.input is None:
        return _fail("--input is required")
    try:
        parsed = load_input(cfg.input)
        verdicts, obstructions, equation = _run_criteria(parsed, cfg)
    except (SchemaError, UsageError, OSError, RigidStructureError,
            RiccatiRouteError, InvarianceError, ValueError) as exc:
        return _fail(str(exc))
    code = _exit_from_verdicts(verdicts)
    bundle = {
        "schema": parsed.kind,
        "equation": equation,
        "verdicts": [v.to_json() for v in verdicts],
        "exit": code,
        "seed": cfg.seed,
    }
    if obstructions is not None:
        bundle["obstructions"] = obstructions
    text = dumps(bundle)
    sys.stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w") as handle:
            handle.write(text)
    return code


def cmd_transform(cfg: RunConfig) -> int:
    if cfg.input is None:
        return _fail("--input is required")
    try:
        parsed = load_input(cfg.input)
        if isinstance(parsed.model, AbelEquation) and parsed.a1_candidate is None:
            data = parsed.model.to_json()
        else:
            data = _resolve_factored(parsed, cfg.pipeline).to_json()
    except InvarianceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"residual: {exc.residual.to_json()}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except (SchemaError, UsageError, OSError, RigidStructureError,
            RiccatiRouteError, ValueError) as exc:
        return _fail(str(exc))
    text = dumps(data)
    sys.stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w") as handle:
            handle.write(text)
    return EXIT_HOLDS


def cmd_oracle(cfg: RunConfig) -> int:
    if cfg.input is None:
        return _fail("--input is required")
    try:
        parsed = load_input(cfg.input)
        f = _resolve_factored(parsed, cfg.pipeline)
    except (SchemaError, UsageError, OSError, RigidStructureError,
            RiccatiRouteError, InvarianceError, ValueError) as exc:
        return _fail(str(exc))
    icfg = IntegratorConfig(rtol=cfg.rtol, atol=cfg.atol)
    report = count_cycles_in_V(f, icfg, grid_density=cfg.grid)
    samples = []
    for _, eq, lo, hi in fiber_components(f)[0]:
        samples.extend(displacement_map(eq, graded_grid(lo, hi, cfg.grid), icfg))
    text = dumps(report.to_json())
    sys.stdout.write(text)
    if cfg.out:
        with open(cfg.out, "w") as handle:
            handle.write(text)
        csv_path = cfg.out + ".csv" if not cfg.out.endswith(".json") else cfg.out[:-5] + ".csv"
        write_displacement_csv(samples, csv_path)
    return EXIT_HOLDS


def cmd_reproduce(example_id: str, out: Optional[str] = None) -> int:
    try:
        report = reproduce(example_id)
    except KeyError as exc:
        return _fail(str(exc))
    width = max(len(line.name) for line in report.lines)
    for line in report.lines:
        status = "PASS" if line.passed else "FAIL"
        suffix = f"  [{line.detail}]" if line.detail else ""
        print(f"{status}  {line.name.ljust(width)}{suffix}")
    print(f"{'ok' if report.ok else 'MISMATCH'}: {example_id}")
    if out:
        write_json(report.to_json(), out)
    return EXIT_HOLDS if report.ok else EXIT_FAILS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abel-cycles",
        description="limit-cycle bounds for periodic Abel equations with two "
        "invariant curves, checked exactly and cross-checked numerically",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", help="path to a JSON system/equation")
        p.add_argument(
            "--pipeline",
            choices=("auto", "abel", "rigid", "homogeneous"),
            default="auto",
        )
        p.add_argument("--criteria", help="comma-separated criterion ids")
        p.add_argument("--eta", help="multiplier as an exact rational, e.g. -1 or 3/2")
        p.add_argument("--grid", type=int, default=400)
        p.add_argument("--rtol", type=float, default=1.0e-10)
        p.add_argument("--atol", type=float, default=1.0e-12)
        p.add_argument("--out", help="also write the JSON output here")
        p.add_argument("--seed", type=int, default=0)

    for name in ("check", "transform", "oracle"):
        common(sub.add_parser(name))
    rep = sub.add_parser("reproduce")
    rep.add_argument("example", help="example1 or example2")
    rep.add_argument("--out", help="also write the JSON report here")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    criteria = None
    if args.criteria:
        criteria = tuple(c.strip() for c in args.criteria.split(",") if c.strip())
    eta = None
    if args.eta is not None:
        try:
            eta = Fraction(args.eta)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --eta value {args.eta!r}: {exc}") from exc
    return RunConfig(
        input=args.input,
        pipeline=args.pipeline,
        criteria=criteria,
        eta=eta,
        grid=args.grid,
        rtol=args.rtol,
        atol=args.atol,
        out=args.out,
        seed=args.seed,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "reproduce":
        return cmd_reproduce(args.example, args.out)
    try:
        cfg = _config_from_args(args)
    except UsageError as exc:
        return _fail(str(exc))
    if args.command == "check":
        return cmd_check(cfg)
    if args.command == "transform":
        return cmd_transform(cfg)
    return cmd_oracle(cfg)


if __name__ == "__main__":
    sys.exit(main())
