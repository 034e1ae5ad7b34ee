"""Command line interface: ``leaguephase {fit,simulate,draw,sweep,stats,validate}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .csvio import (emit_curve_csv, emit_sweep_csv, file_digest, parse_fixtures_csv,
                    parse_matches_csv, parse_teams_csv, read_params, write_manifest,
                    write_params, write_schedule_csv)
from .draw import PotAssignment, association_clashes, generate_schedule, validate_schedule
from .errors import LeaguePhaseError
from .fitting import EloScale, FitOptions, ModelKind, fit
from .montecarlo import SimConfig, rho_sweep, threshold_curve
from .presets import COEFFICIENTS, preset_params
from .summary import summarize_matches

log = logging.getLogger("leaguephase")


def parse_rho_grid(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included, e.g. ``0:0.2:0.02`` gives 11 points."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("need step > 0 and stop >= start")
    n = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _params_from_args(args, teams):
    """Returns (ModelParams, manifest description of where they came from)."""
    if args.preset:
        params = preset_params(args.preset, teams)
        source = {"preset": args.preset, "standardisation": "teams file, sample sd"}
    else:
        params, values = read_params(args.params)
        source = {"file": args.params, "sha256": file_digest(args.params), "model": values["model"]}
    if args.rho is not None:
        params = params.with_rho(args.rho)
        source["rho_override"] = args.rho
    return params, source


def _params_dict(params) -> dict:
    return {k: getattr(params, k) for k in ("beta0", "beta1", "beta2", "rho", "elo_mean", "elo_sd")}


def _sim_config(args) -> SimConfig:
    return SimConfig(n_runs=args.runs, master_seed=args.seed, max_goals=args.max_goals,
                     workers=args.workers)


def _config_dict(cfg: SimConfig) -> dict:
    # workers never changes the output, so it is left out of the manifest
    return {"n_runs": cfg.n_runs, "master_seed": cfg.master_seed, "max_goals": cfg.max_goals,
            "top_k_direct": cfg.top_k_direct, "top_k_playoff": cfg.top_k_playoff}


def cmd_fit(args) -> int:
    matches = parse_matches_csv(args.matches)
    kind = ModelKind(args.model)
    result = fit(matches, kind, FitOptions(elo_scale=EloScale(args.elo_scale)))
    extra = {"log_likelihood": repr(result.log_likelihood), "n_obs": result.n_obs,
             "converged": str(result.converged).lower()}
    for name, se in (result.std_errors or {}).items():
        extra[f"se_{name}"] = repr(se)
    out = args.output or "-"
    if out == "-":
        import tempfile
        with tempfile.TemporaryDirectory() as tmp:
            p = Path(tmp) / "params.txt"
            write_params(result.params, p, model=kind.value, extra=extra)
            sys.stdout.write(p.read_text())
    else:
        write_params(result.params, out, model=kind.value, extra=extra)
        print(f"wrote {out}")
    if not result.converged:
        print("warning: optimiser hit its iteration limit", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    teams = parse_teams_csv(args.teams)
    params, psource = _params_from_args(args, teams)
    cfg = _sim_config(args)
    inputs = {"teams": {"path": args.teams, "sha256": file_digest(args.teams)}}
    if args.random_draws:
        source = PotAssignment.from_teams(teams)
        mode = "random-draws"
    else:
        source = parse_fixtures_csv(args.schedule, teams)
        inputs["schedule"] = {"path": args.schedule, "sha256": file_digest(args.schedule)}
        mode = "fixed-schedule"
    direct, playoff = threshold_curve(source, params, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_curve_csv([direct, playoff], out / "curves.csv")
    write_manifest(out / "manifest.json", {
        "command": "simulate", "version": __version__, "schedule_mode": mode,
        "inputs": inputs, "params_source": psource, "params": _params_dict(params),
        "config": _config_dict(cfg), "seed": cfg.master_seed, "outputs": ["curves.csv"],
    })
    print(f"{'points':>6} {'P(top 8)':>9} {'P(top 24)':>10} {'n':>8}")
    for pts in sorted(set(direct.entries) | set(playoff.entries)):
        d = direct.entries.get(pts)
        p = playoff.entries.get(pts)
        print(f"{pts:>6} {d.probability:>9.3f} {p.probability:>10.3f} {d.sample_count:>8}")
    print(f"wrote {out / 'curves.csv'}")
    return 0


def cmd_draw(args) -> int:
    teams = parse_teams_csv(args.teams)
    pots = PotAssignment.from_teams(teams)
    schedule = generate_schedule(pots, np.random.default_rng(args.seed))
    if args.output in (None, "-"):
        print("home_id,away_id")
        for f in schedule.fixtures:
            print(f"{f.home_id},{f.away_id}")
    else:
        write_schedule_csv(schedule, args.output)
        print(f"wrote {args.output} ({len(schedule.fixtures)} fixtures)")
    return 0


def cmd_sweep(args) -> int:
    teams = parse_teams_csv(args.teams)
    params, psource = _params_from_args(args, teams)
    cfg = _sim_config(args)
    pots = PotAssignment.from_teams(teams)
    result = rho_sweep(pots, params, args.rho_grid, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_sweep_csv(result, out / "sweep_draws.csv", out / "sweep_curves.csv")
    write_manifest(out / "manifest.json", {
        "command": "sweep", "version": __version__, "schedule_mode": "random-draws",
        "inputs": {"teams": {"path": args.teams, "sha256": file_digest(args.teams)}},
        "params_source": psource, "params": _params_dict(params), "rho_grid": result.rho_grid,
        "config": _config_dict(cfg), "seed": cfg.master_seed,
        "outputs": ["sweep_draws.csv", "sweep_curves.csv"],
    })
    print(f"{'rho':>6} {'avg draws':>10}")
    for rho, d in zip(result.rho_grid, result.avg_draws):
        print(f"{rho:>6.3f} {d:>10.2f}")
    return 0


def cmd_stats(args) -> int:
    matches = parse_matches_csv(args.matches)
    row = summarize_matches(matches).as_row()
    widths = {k: max(len(k), len(v)) for k, v in row.items()}
    print("  ".join(k.rjust(widths[k]) for k in row))
    print("  ".join(v.rjust(widths[k]) for k, v in row.items()))
    return 0


def cmd_validate(args) -> int:
    teams = parse_teams_csv(args.teams)
    pots = PotAssignment.from_teams(teams)
    schedule = parse_fixtures_csv(args.schedule, teams)
    violations = validate_schedule(schedule, pots)
    for v in violations:
        print(v)
    for note in association_clashes(schedule):
        print(f"note: {note}")
    if violations:
        print(f"{len(violations)} violation(s)")
        return 1
    print(f"valid: {len(schedule.fixtures)} fixtures")
    return 0


def _add_sim_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--params", help="fitted parameter file (from `fit`)")
    src.add_argument("--preset", choices=sorted(COEFFICIENTS),
                     help="published coefficients, standardised over the teams file")
    p.add_argument("--rho", type=float, help="override rho")
    p.add_argument("--runs", type=_positive, default=10_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--max-goals", type=int, default=10)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leaguephase", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a scoreline model to a matches CSV")
    p.add_argument("matches")
    p.add_argument("--model", choices=[k.value for k in ModelKind], default=ModelKind.DIXON_COLES.value)
    p.add_argument("--elo-scale", choices=[s.value for s in EloScale], default=EloScale.APPEARANCES.value)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="estimate qualification threshold curves")
    p.add_argument("--teams", required=True)
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--schedule", help="fixture CSV (home_id,away_id)")
    how.add_argument("--random-draws", action="store_true", help="draw a new schedule every run")
    _add_sim_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("draw", help="draw a random league-phase schedule")
    p.add_argument("--teams", required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_draw)

    p = sub.add_parser("sweep", help="rho sensitivity sweep with random draws")
    p.add_argument("--teams", required=True)
    p.add_argument("--rho-grid", type=parse_rho_grid, default=parse_rho_grid("0:0.2:0.02"))
    _add_sim_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="descriptive statistics of a matches CSV")
    p.add_argument("matches")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", help="check a schedule against the format rules")
    p.add_argument("schedule")
    p.add_argument("--teams", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (LeaguePhaseError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
