"""Command-line front end.

Six subcommands: `simulate` runs one stability experiment into a results
directory, `sweep` runs an (alpha, separation) grid, `decompose` fits
soliton parameters to a stored snapshot, `spectrum` reports the linearized
operator's eigenvalues and coercivity gaps, `verify` executes the identity
suite, and `inequalities` measures the randomized functional-inequality
constants.  Flags mirror the config-file keys (`--config` loads a file
first, explicit flags win).  `simulate` and `sweep` require `--out` and
`--seed` so results are reproducible by construction.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .harness import (
    ExperimentConfig,
    derive_cell_config,
    load_config,
    load_snapshot,
    measure_inequalities,
    run_experiment,
    run_sweep,
    run_verification_suite,
)
from .modulation import DegenerateConfigurationError, TrackingLostError, decompose
from .operators import assemble_h, eigen_spectrum
from .solitons import SolitonParams, SolitonTrain
from .spectral import Grid, l2_norm, sobolev_norm


def _floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _jsonable(value):
    """NaN and infinities have no JSON spelling; map them to null."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    return value


def _config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="config file; explicit flags override it")
    parser.add_argument("--domain-length", type=float, dest="domain_length")
    parser.add_argument("--n", type=int)
    parser.add_argument("--speeds", type=_floats, help="comma-separated initial speeds")
    parser.add_argument("--centers", type=_floats, help="comma-separated initial centers")
    parser.add_argument("--perturbation-kind", dest="perturbation_kind",
                        choices=("bump", "mode", "seeded-noise"))
    parser.add_argument("--perturbation-amplitude", type=float, dest="perturbation_amplitude")
    parser.add_argument("--perturbation-offset", type=float, dest="perturbation_offset")
    parser.add_argument("--perturbation-width", type=float, dest="perturbation_width")
    parser.add_argument("--perturbation-mode", type=int, dest="perturbation_mode")
    parser.add_argument("--perturbation-band", type=int, dest="perturbation_band")
    parser.add_argument("--dt", type=float)
    parser.add_argument("--t-end", type=float, dest="t_end")
    parser.add_argument("--record-every", type=int, dest="record_every")
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--separation", type=float)


_FLAG_KEYS = (
    "domain_length", "n", "speeds", "centers", "perturbation_kind",
    "perturbation_amplitude", "perturbation_offset", "perturbation_width",
    "perturbation_mode", "perturbation_band", "dt", "t_end", "record_every",
    "gamma", "separation",
)


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        mapping = load_config(args.config).to_mapping()
    else:
        mapping = ExperimentConfig(speeds0=(1.0,), centers0=(-20.0,)).to_mapping()
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            mapping[key] = value
    mapping["perturbation_seed"] = args.seed
    mapping.pop("out_dir", None)
    return ExperimentConfig.from_mapping(mapping)


def _emit(payload: dict, out: Path | None) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        print(f"wrote {out}")


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    report = run_experiment(cfg, args.out)
    for name, ok in sorted(report.flags.items()):
        print(f"[{'pass' if ok else 'FAIL'}] {name}")
    print(f"sup eps_h12 = {report.sup_eps_h12:.6g} (envelope {report.eps_envelope:.6g})")
    print(f"sup speed dev = {report.sup_speed_dev:.6g} (envelope {report.speed_envelope:.6g})")
    if report.failure is not None:
        print(f"failure: {report.failure}")
    print(f"results in {report.out_dir}")
    return 0 if report.passed else 1


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = _build_config(args)
    table = run_sweep(base, args.alphas, args.separations, args.out,
                      max_workers=args.workers)
    for row in table:
        eps = row.get("sup_eps_h12")
        eps_text = f"{eps:.6g}" if isinstance(eps, float) else "-"
        print(f"sep={row['separation']:g} alpha={row['alpha']:g} "
              f"{row['status']}: sup eps_h12 = {eps_text}")
    print(f"results in {args.out}")
    bad = [row for row in table if row["status"] in ("error", "invalid")]
    return 1 if bad else 0


def _cmd_decompose(args: argparse.Namespace) -> int:
    u, meta = load_snapshot(args.snapshot)
    guess = SolitonTrain(
        tuple(SolitonParams(c, x) for c, x in zip(args.speeds, args.centers))
    )
    try:
        state = decompose(u, guess)
    except (TrackingLostError, DegenerateConfigurationError) as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return 1
    _emit(
        {
            "snapshot": str(args.snapshot),
            "time": meta.get("time"),
            "speeds": state.speeds.tolist(),
            "centers": state.centers.tolist(),
            "eps_l2": l2_norm(state.residual),
            "eps_h12": sobolev_norm(state.residual, 0.5),
            "ortho_defect": state.ortho_defect,
        },
        args.out,
    )
    return 0


def _cmd_spectrum(args: argparse.Namespace) -> int:
    grid = Grid(args.domain_length, args.n)
    h = assemble_h(grid, args.speed)
    report = eigen_spectrum(h, args.modes, include_gaps=not args.no_gaps)
    payload = {
        "domain_length": args.domain_length,
        "n": args.n,
        "speed": args.speed,
        "eigenvalues": report.eigenvalues.tolist(),
        "overlaps": report.overlaps,
        "kk": report.kk,
        "gap_l2": report.gap_l2,
        "gap_h12": report.gap_h12,
    }
    _emit(payload, args.out)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    summary = run_verification_suite(domain_length=args.domain_length, n=args.n,
                                     analysis_n=args.analysis_n, seed=args.seed)
    if args.json:
        sys.stdout.write(summary.to_json())
    else:
        sys.stdout.write(summary.to_text())
    if args.out is not None:
        args.out.write_text(summary.to_json())
        print(f"wrote {args.out}")
    return 0 if summary.all_passed else 1


def _cmd_inequalities(args: argparse.Namespace) -> int:
    result = measure_inequalities(domain_length=args.domain_length, n=args.n,
                                  samples=args.samples, seed=args.seed)
    _emit(result, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bolab",
        description="Soliton stability laboratory for the Benjamin-Ono equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one stability experiment")
    _config_flags(p)
    p.add_argument("--seed", type=int, required=True, help="perturbation seed")
    p.add_argument("--out", type=Path, required=True, help="results directory")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run an (alpha, separation) sweep")
    _config_flags(p)
    p.add_argument("--seed", type=int, required=True, help="perturbation seed")
    p.add_argument("--out", type=Path, required=True, help="sweep directory")
    p.add_argument("--alphas", type=_floats, required=True)
    p.add_argument("--separations", type=_floats, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("decompose", help="fit soliton parameters to a snapshot")
    p.add_argument("--snapshot", type=Path, required=True, help=".bin field snapshot")
    p.add_argument("--speeds", type=_floats, required=True, help="initial speed guesses")
    p.add_argument("--centers", type=_floats, required=True, help="initial center guesses")
    p.add_argument("--out", type=Path, default=None, help="write JSON here (default stdout)")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("spectrum", help="linearized-operator eigenvalues and gaps")
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--domain-length", type=float, dest="domain_length", default=256.0)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--modes", type=int, default=12)
    p.add_argument("--no-gaps", action="store_true", help="skip the constrained-gap solves")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("verify", help="run the identity suite")
    p.add_argument("--domain-length", type=float, dest="domain_length", default=256.0)
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--analysis-n", type=int, dest="analysis_n", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="JSON to stdout instead of text")
    p.add_argument("--out", type=Path, default=None, help="also write JSON here")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("inequalities", help="measure functional-inequality constants")
    p.add_argument("--domain-length", type=float, dest="domain_length", default=256.0)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_inequalities)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
