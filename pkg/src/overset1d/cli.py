"""Command-line entry point.

Exit codes: 0 success, 1 failed check, 2 invalid configuration,
3 admissibility abort, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from overset1d.config import ConfigError, RunConfig, load_config
from overset1d.systems import SYSTEMS, AdmissibilityError, jump_condition_residual, make_system

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_ADMISSIBILITY = 3
EXIT_IO = 4

JUMP_TOLERANCE = 1.0e-12

log = logging.getLogger("overset1d")


def _output_dir(args, cfg: RunConfig) -> Path:
    return Path(args.out) if args.out is not None else Path(cfg.output.directory)


def resolve_config(name: str) -> Path:
    """A config path, or the name of a shipped preset."""
    path = Path(name)
    if path.exists():
        return path
    shipped = resources.files("overset1d") / "presets" / f"{name}.json"
    if shipped.is_file():
        return Path(str(shipped))
    return path


def preset_names() -> list[str]:
    root = resources.files("overset1d") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _load(args) -> RunConfig:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    cfg = load_config(resolve_config(args.config))
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def cmd_run(args) -> int:
    from overset1d.config import dump_config
    from overset1d.driver import run

    cfg = _load(args)
    out = _output_dir(args, cfg)
    result = run(cfg, out, figures=False if args.no_figures else None)
    dump_config(cfg, out / "config.json")

    worst_s = max((r.entropy_rate_residual for r in result.ledger), default=0.0)
    worst_c = max((float(np.max(r.conservation_rate_residual)) for r in result.ledger), default=0.0)
    print(f"t = {result.t:.6g} after {result.n_steps} steps")
    print(f"max entropy-rate residual      {worst_s:.3e}")
    print(f"max conservation-rate residual {worst_c:.3e}")
    for f in result.files:
        print(f"wrote {f}")
    return EXIT_OK


def cmd_equivalence(args) -> int:
    from overset1d.driver import run_equivalence

    cfg = _load(args)
    report = run_equivalence(cfg)
    print(report.summary())
    if args.tolerance is not None and not report.max_difference < args.tolerance:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_convergence(args) -> int:
    from overset1d.driver import run_convergence

    cfg = _load(args)
    table = run_convergence(cfg, levels=args.levels)
    print(table.format())

    out = _output_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    print(f"wrote {table.write_csv(out / 'convergence.csv')}")
    if cfg.output.figures and not args.no_figures and len(table.errors) > 1:
        from overset1d.plotting import plot_convergence

        print(f"wrote {plot_convergence(table.dx, table.errors, out / 'convergence.png')}")
    return EXIT_OK


def cmd_presets(args) -> int:
    print("\n".join(preset_names()))
    return EXIT_OK


def cmd_verify_fluxes(args) -> int:
    seed = args.seed
    if seed is None:
        seed = load_config(resolve_config(args.config)).seed if args.config else 0

    rng = np.random.default_rng(seed)
    ok = True
    for name in sorted(SYSTEMS):
        system = make_system(name)
        ql = system.random_states(rng, args.pairs)
        qr = system.random_states(rng, args.pairs)

        jump = float(np.max(jump_condition_residual(system, ql, qr).relative_residual))
        sym = float(np.max(np.abs(system.ec_flux(ql, qr) - system.ec_flux(qr, ql))))
        cons = float(np.max(np.abs(system.ec_flux(ql, ql) - system.flux(ql))))
        passed = jump < JUMP_TOLERANCE and sym == 0.0 and cons == 0.0
        ok &= passed

        print(
            f"{name:14s} jump {jump:.2e}  symmetry {sym:.1e}  consistency {cons:.1e}  "
            f"{'PASS' if passed else 'FAIL'}"
        )

    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration, or the name of a shipped preset")
    common.add_argument("--out", help="output directory (overrides output.directory)")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="overset1d",
        description="Entropy-stable overset-grid solver for 1D conservation laws.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a simulation, write ledger and final states")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figures")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("equivalence", parents=[common], help="compare with the single-domain solver")
    p.add_argument("--tolerance", type=float, help="exit 1 if the difference reaches this value")
    p.set_defaults(func=cmd_equivalence)

    p = sub.add_parser("convergence", parents=[common], help="grid refinement study")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("presets", parents=[common], help="list the shipped preset configurations")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("verify-fluxes", parents=[common], help="check the two-point fluxes on random states")
    p.add_argument("--pairs", type=int, default=10_000)
    p.set_defaults(func=cmd_verify_fluxes)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdmissibilityError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
