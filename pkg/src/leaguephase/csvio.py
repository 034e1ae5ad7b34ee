"""File formats: team, match, fixture and curve CSVs, parameter files, manifests.

All CSVs are UTF-8, comma separated, ``.`` decimal point and LF line endings.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .domain import (Cutoff, CurvePoint, Fixture, MatchObservation, ModelParams, Schedule,
                     TeamRecord, ThresholdCurve)
from .errors import DuplicateKeyError, LeaguePhaseError, ParseError
from .montecarlo import SweepResult

TEAM_HEADER = ["team_id", "name", "elo", "pot", "association"]
MATCH_HEADER = ["home_id", "away_id", "home_goals", "away_goals", "home_elo", "away_elo"]
FIXTURE_HEADER = ["home_id", "away_id"]
CURVE_HEADER = ["cutoff", "points", "probability", "sample_count", "low_sample_flag"]
SWEEP_HEADER = ["rho", "avg_draws"]
SWEEP_CURVE_HEADER = ["rho"] + CURVE_HEADER
PARAM_KEYS = ("model", "beta0", "beta1", "beta2", "rho", "elo_mean", "elo_sd")


def _rows(path, required: Sequence[str]):
    """Yield (line number, row dict) after checking the header has ``required``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"missing column(s) {', '.join(missing)}", line=1, path=str(path))
        for row in reader:
            if None in row or any(v is None for v in row.values()):
                raise ParseError("wrong number of fields", line=reader.line_num, path=str(path))
            yield reader.line_num, row


def _int(value: str, what: str, line: int, path, minimum: int | None = 0) -> int:
    try:
        v = int(value)
    except ValueError:
        raise ParseError(f"{what} is not an integer: {value!r}", line=line, path=str(path)) from None
    if minimum is not None and v < minimum:
        raise ParseError(f"{what} must be >= {minimum}, got {v}", line=line, path=str(path))
    return v


def _float(value: str, what: str, line: int, path) -> float:
    try:
        v = float(value)
    except ValueError:
        raise ParseError(f"{what} is not a number: {value!r}", line=line, path=str(path)) from None
    if not math.isfinite(v):
        raise ParseError(f"{what} must be finite", line=line, path=str(path))
    return v


def parse_teams_csv(path) -> list[TeamRecord]:
    teams, seen = [], set()
    for line, row in _rows(path, ["team_id", "name", "elo"]):
        tid = row["team_id"].strip()
        if tid in seen:
            raise DuplicateKeyError(f"duplicate team_id {tid!r}", line=line, path=str(path))
        seen.add(tid)
        pot = (row.get("pot") or "").strip()
        assoc = (row.get("association") or "").strip()
        try:
            teams.append(TeamRecord(
                tid, row["name"].strip(), _float(row["elo"], "elo", line, path),
                pot=_int(pot, "pot", line, path) if pot else None,
                association=assoc or None))
        except LeaguePhaseError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), line=line, path=str(path)) from exc
    return teams


def parse_matches_csv(path) -> list[MatchObservation]:
    out = []
    for line, row in _rows(path, MATCH_HEADER):
        try:
            out.append(MatchObservation(
                row["home_id"].strip(), row["away_id"].strip(),
                _int(row["home_goals"], "home_goals", line, path),
                _int(row["away_goals"], "away_goals", line, path),
                _float(row["home_elo"], "home_elo", line, path),
                _float(row["away_elo"], "away_elo", line, path)))
        except ParseError:
            raise
        except LeaguePhaseError as exc:
            raise ParseError(str(exc), line=line, path=str(path)) from exc
    return out


def parse_fixtures_csv(path, teams: Sequence[TeamRecord]) -> Schedule:
    """Read a schedule; only ``home_id`` and ``away_id`` are used, extra columns are ignored."""
    known = {t.team_id for t in teams}
    fixtures = []
    for line, row in _rows(path, FIXTURE_HEADER):
        h, a = row["home_id"].strip(), row["away_id"].strip()
        for tid in (h, a):
            if tid not in known:
                raise ParseError(f"unknown team {tid!r}", line=line, path=str(path))
        try:
            fixtures.append(Fixture(h, a))
        except LeaguePhaseError as exc:
            raise ParseError(str(exc), line=line, path=str(path)) from exc
    return Schedule(tuple(fixtures), tuple(teams))


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_teams_csv(teams: Iterable[TeamRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(TEAM_HEADER)
        for t in teams:
            w.writerow([t.team_id, t.name, repr(t.elo), t.pot or "", t.association or ""])


def write_schedule_csv(schedule: Schedule, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(FIXTURE_HEADER)
        for f in schedule.fixtures:
            w.writerow([f.home_id, f.away_id])


def _curve_rows(curves: Iterable[ThresholdCurve]):
    for curve in sorted(curves, key=lambda c: list(Cutoff).index(c.cutoff)):
        for pts, cp in sorted(curve.entries.items()):
            yield [curve.cutoff.value, pts, f"{cp.probability:.6f}", cp.sample_count, int(cp.low_sample)]


def emit_curve_csv(curves: Iterable[ThresholdCurve], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(CURVE_HEADER)
        w.writerows(_curve_rows(curves))


def parse_curve_csv(path) -> list[ThresholdCurve]:
    entries: dict[Cutoff, dict[int, CurvePoint]] = {}
    for line, row in _rows(path, CURVE_HEADER):
        try:
            cutoff = Cutoff(row["cutoff"])
        except ValueError:
            raise ParseError(f"unknown cutoff {row['cutoff']!r}", line=line, path=str(path)) from None
        pts = _int(row["points"], "points", line, path)
        entries.setdefault(cutoff, {})[pts] = CurvePoint(
            _float(row["probability"], "probability", line, path),
            _int(row["sample_count"], "sample_count", line, path, minimum=1))
    return [ThresholdCurve(c, e) for c, e in entries.items()]


def emit_sweep_csv(result: SweepResult, draws_path, curves_path) -> None:
    with open(draws_path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(SWEEP_HEADER)
        for rho, d in zip(result.rho_grid, result.avg_draws):
            w.writerow([f"{rho:.6g}", f"{d:.4f}"])
    with open(curves_path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(SWEEP_CURVE_HEADER)
        for rho, pair in zip(result.rho_grid, result.curves):
            for row in _curve_rows(pair):
                w.writerow([f"{rho:.6g}"] + row)


def write_params(params: ModelParams, path, *, model: str, extra: dict | None = None) -> None:
    """Flat ``key=value`` file; standardisation constants always travel with the betas."""
    lines = [f"model={model}"]
    for key in PARAM_KEYS[1:]:
        lines.append(f"{key}={getattr(params, key)!r}")
    for key, value in (extra or {}).items():
        lines.append(f"{key}={value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_params(path) -> tuple[ModelParams, dict[str, str]]:
    values: dict[str, str] = {}
    for i, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError("expected key=value", line=i, path=str(path))
        values[key.strip()] = value.strip()
    missing = [k for k in PARAM_KEYS if k not in values]
    if missing:
        raise ParseError(f"missing key(s) {', '.join(missing)}", path=str(path))
    nums = {k: _float(values[k], k, None, path) for k in PARAM_KEYS[1:]}
    return ModelParams(**nums), values


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, manifest: dict) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
