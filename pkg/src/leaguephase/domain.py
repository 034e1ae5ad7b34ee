"""Value types shared across the package.

All types are frozen dataclasses that validate themselves on construction.
They carry no behaviour beyond that and a few convenience accessors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InvalidArgumentError

POTS = (1, 2, 3, 4)


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class TeamRecord:
    team_id: str
    name: str
    elo: float
    pot: int | None = None
    association: str | None = None

    def __post_init__(self):
        if not self.team_id:
            raise InvalidArgumentError("team_id must be a non-empty string")
        elo = _finite("elo", self.elo)
        if elo <= 0:
            raise InvalidArgumentError(f"elo must be positive, got {elo}")
        object.__setattr__(self, "elo", elo)
        if self.pot is not None and self.pot not in POTS:
            raise InvalidArgumentError(f"pot must be one of {POTS}, got {self.pot!r}")


@dataclass(frozen=True)
class MatchObservation:
    home_id: str
    away_id: str
    home_goals: int
    away_goals: int
    home_elo: float
    away_elo: float

    def __post_init__(self):
        if self.home_id == self.away_id:
            raise InvalidArgumentError(f"team {self.home_id!r} cannot play itself")
        for side in ("home_goals", "away_goals"):
            goals = getattr(self, side)
            if isinstance(goals, bool) or int(goals) != goals or goals < 0:
                raise InvalidArgumentError(f"{side} must be a non-negative integer, got {goals!r}")
            object.__setattr__(self, side, int(goals))
        object.__setattr__(self, "home_elo", _finite("home_elo", self.home_elo))
        object.__setattr__(self, "away_elo", _finite("away_elo", self.away_elo))


@dataclass(frozen=True, order=True)
class Fixture:
    home_id: str
    away_id: str

    def __post_init__(self):
        if self.home_id == self.away_id:
            raise InvalidArgumentError(f"team {self.home_id!r} cannot play itself")


@dataclass(frozen=True)
class Schedule:
    """Oriented fixtures plus the teams they refer to.

    Construction only checks referential integrity. Format rules (match
    counts, pot quotas, home/away balance) are checked by
    :func:`leaguephase.draw.validate_schedule`, so toy leagues of any shape
    can still be represented.
    """

    fixtures: tuple[Fixture, ...]
    teams: tuple[TeamRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "fixtures", tuple(self.fixtures))
        object.__setattr__(self, "teams", tuple(self.teams))
        ids = [t.team_id for t in self.teams]
        if len(set(ids)) != len(ids):
            raise InvalidArgumentError("duplicate team_id in schedule teams")
        known = set(ids)
        for fx in self.fixtures:
            for tid in (fx.home_id, fx.away_id):
                if tid not in known:
                    raise InvalidArgumentError(f"fixture refers to unknown team {tid!r}")

    @property
    def team_ids(self) -> list[str]:
        return [t.team_id for t in self.teams]

    def team(self, team_id: str) -> TeamRecord:
        for t in self.teams:
            if t.team_id == team_id:
                return t
        raise KeyError(team_id)


@dataclass(frozen=True)
class ModelParams:
    """Linear predictor coefficients plus the Elo standardisation constants.

    ``rho`` is 0 for the independent model.
    """

    beta0: float
    beta1: float
    beta2: float
    rho: float = 0.0
    elo_mean: float = 0.0
    elo_sd: float = 1.0

    def __post_init__(self):
        for name in ("beta0", "beta1", "beta2", "rho", "elo_mean", "elo_sd"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.elo_sd <= 0:
            raise InvalidArgumentError(f"elo_sd must be positive, got {self.elo_sd}")

    def with_rho(self, rho: float) -> "ModelParams":
        return ModelParams(self.beta0, self.beta1, self.beta2, rho, self.elo_mean, self.elo_sd)


@dataclass(frozen=True)
class Scoreline:
    home_goals: int
    away_goals: int

    def __post_init__(self):
        if self.home_goals < 0 or self.away_goals < 0:
            raise InvalidArgumentError("goals must be non-negative")


@dataclass(frozen=True)
class StandingsRow:
    team_id: str
    points: int
    wins: int
    draws: int
    losses: int
    goals_for: int
    goals_against: int

    def __post_init__(self):
        if self.points != 3 * self.wins + self.draws:
            raise InvalidArgumentError(
                f"{self.team_id}: points {self.points} != 3*{self.wins} + {self.draws}"
            )

    @property
    def played(self) -> int:
        return self.wins + self.draws + self.losses

    @property
    def goal_difference(self) -> int:
        return self.goals_for - self.goals_against


class Cutoff(str, enum.Enum):
    ROUND_OF_16 = "ROUND_OF_16"
    PLAYOFF = "PLAYOFF"


LOW_SAMPLE_THRESHOLD = 50


@dataclass(frozen=True)
class CurvePoint:
    probability: float
    sample_count: int

    @property
    def low_sample(self) -> bool:
        return self.sample_count < LOW_SAMPLE_THRESHOLD


@dataclass(frozen=True)
class ThresholdCurve:
    """Estimated probability of making a cutoff, keyed by final points total."""

    cutoff: Cutoff
    entries: Mapping[int, CurvePoint] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cutoff", Cutoff(self.cutoff))
        entries = {}
        for pts, cp in sorted(self.entries.items()):
            if not isinstance(cp, CurvePoint):
                cp = CurvePoint(*cp)
            if not 0.0 <= cp.probability <= 1.0:
                raise InvalidArgumentError(f"probability at {pts} points outside [0, 1]: {cp.probability}")
            if cp.sample_count < 1:
                raise InvalidArgumentError(f"sample_count at {pts} points must be >= 1")
            entries[int(pts)] = cp
        object.__setattr__(self, "entries", entries)

    def probability(self, points: int) -> float:
        return self.entries[points].probability

    def points(self) -> list[int]:
        return list(self.entries)


def teams_by_id(teams: Iterable[TeamRecord]) -> dict[str, TeamRecord]:
    out: dict[str, TeamRecord] = {}
    for t in teams:
        if t.team_id in out:
            raise InvalidArgumentError(f"duplicate team_id {t.team_id!r}")
        out[t.team_id] = t
    return out
