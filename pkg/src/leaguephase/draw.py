"""Random league-phase draws and schedule validation.

Every team meets two opponents from every pot (its own included), one at
home and one away. For two different pots the fixtures are two disjoint
perfect matchings between the pots, one per orientation. Inside a pot they
form a 2-regular simple graph (a union of cycles of length >= 3), and each
cycle is oriented in one direction so every team hosts exactly one
own-pot opponent.

The UEFA format is 4 pots of 9. Any number of pots of equal size >= 3
is accepted here.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .domain import Fixture, Schedule, TeamRecord
from .errors import GenerationFailureError, InvalidArgumentError

MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class PotAssignment:
    pots: tuple[tuple[TeamRecord, ...], ...]

    def __post_init__(self):
        pots = tuple(tuple(p) for p in self.pots)
        object.__setattr__(self, "pots", pots)
        if not pots:
            raise InvalidArgumentError("need at least one pot")
        sizes = {len(p) for p in pots}
        if len(sizes) != 1:
            raise InvalidArgumentError(f"pots must have equal sizes, got {sorted(len(p) for p in pots)}")
        if sizes.pop() < 3:
            raise InvalidArgumentError("pots need at least 3 teams")
        ids = [t.team_id for p in pots for t in p]
        if len(set(ids)) != len(ids):
            raise InvalidArgumentError("a team appears in more than one pot slot")

    @classmethod
    def from_teams(cls, teams: Iterable[TeamRecord]) -> "PotAssignment":
        """Group teams by their ``pot`` field (pots numbered 1..k)."""
        grouped: dict[int, list[TeamRecord]] = defaultdict(list)
        for t in teams:
            if t.pot is None:
                raise InvalidArgumentError(f"team {t.team_id!r} has no pot")
            grouped[t.pot].append(t)
        keys = sorted(grouped)
        if keys != list(range(1, len(keys) + 1)):
            raise InvalidArgumentError(f"pots must be numbered 1..k, got {keys}")
        return cls(tuple(tuple(grouped[k]) for k in keys))

    @property
    def pot_size(self) -> int:
        return len(self.pots[0])

    @property
    def teams(self) -> list[TeamRecord]:
        return [t for p in self.pots for t in p]

    def pot_of(self) -> dict[str, int]:
        return {t.team_id: i for i, p in enumerate(self.pots) for t in p}


def _disjoint_matchings(m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    first = rng.permutation(m)
    for _ in range(MAX_ATTEMPTS):
        second = rng.permutation(m)
        if not np.any(first == second):
            return first, second
    raise GenerationFailureError("could not sample two disjoint matchings")


def _two_regular(m: int, rng: np.random.Generator) -> list[list[int]]:
    """Uniform random 2-regular simple graph on m vertices, returned as cycles."""
    stubs = np.repeat(np.arange(m), 2)
    for _ in range(MAX_ATTEMPTS):
        pairs = rng.permutation(stubs).reshape(m, 2)
        a, b = pairs[:, 0], pairs[:, 1]
        if np.any(a == b):
            continue
        edges = {(min(u, v), max(u, v)) for u, v in zip(a.tolist(), b.tolist())}
        if len(edges) < m:
            continue
        adj: dict[int, list[int]] = defaultdict(list)
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        cycles, seen = [], set()
        for start in range(m):
            if start in seen:
                continue
            cycle, prev, cur = [start], None, start
            seen.add(start)
            while True:
                nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
                if nxt == start:
                    break
                cycle.append(nxt)
                seen.add(nxt)
                prev, cur = cur, nxt
            cycles.append(cycle)
        return cycles
    raise GenerationFailureError("could not sample a simple 2-regular graph")


def generate_fixture_indices(n_pots: int, m: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Draw one schedule as (home, away) pairs of global team indices.

    Team ``i`` of pot ``p`` has global index ``p * m + i``.
    """
    out: list[tuple[int, int]] = []
    for p, q in combinations(range(n_pots), 2):
        first, second = _disjoint_matchings(m, rng)
        for i in range(m):
            out.append((p * m + i, q * m + int(first[i])))
            out.append((q * m + int(second[i]), p * m + i))
    for p in range(n_pots):
        for cycle in _two_regular(m, rng):
            if rng.random() < 0.5:
                cycle = cycle[::-1]
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                out.append((p * m + a, p * m + b))
    return out


def generate_schedule(pots: PotAssignment, rng: np.random.Generator) -> Schedule:
    teams = pots.teams
    pairs = generate_fixture_indices(len(pots.pots), pots.pot_size, rng)
    fixtures = sorted(Fixture(teams[h].team_id, teams[a].team_id) for h, a in pairs)
    return Schedule(tuple(fixtures), tuple(teams))


@dataclass(frozen=True)
class Violation:
    kind: str
    team_ids: tuple[str, ...]
    detail: str

    def __str__(self):
        return f"{self.kind}: {', '.join(self.team_ids)}: {self.detail}"


def validate_schedule(schedule: Schedule, pots: PotAssignment) -> list[Violation]:
    """List every broken format rule; an empty list means the schedule is valid."""
    out: list[Violation] = []
    pot_of = pots.pot_of()
    n_pots = len(pots.pots)
    per_team = 2 * n_pots

    for fx in schedule.fixtures:
        for tid in (fx.home_id, fx.away_id):
            if tid not in pot_of:
                out.append(Violation("unknown-team", (tid,), "team is not in any pot"))

    pairs = Counter(frozenset((fx.home_id, fx.away_id)) for fx in schedule.fixtures)
    for pair, n in sorted(pairs.items(), key=lambda kv: sorted(kv[0])):
        if n > 1:
            out.append(Violation("duplicate-pairing", tuple(sorted(pair)), f"teams meet {n} times"))

    home, away = Counter(), Counter()
    home_vs_pot, away_vs_pot = Counter(), Counter()
    for fx in schedule.fixtures:
        home[fx.home_id] += 1
        away[fx.away_id] += 1
        if fx.home_id in pot_of and fx.away_id in pot_of:
            home_vs_pot[fx.home_id, pot_of[fx.away_id]] += 1
            away_vs_pot[fx.away_id, pot_of[fx.home_id]] += 1

    for tid in pot_of:
        played = home[tid] + away[tid]
        if played != per_team:
            out.append(Violation("match-count", (tid,), f"plays {played} matches, expected {per_team}"))
        if home[tid] != away[tid] or home[tid] != n_pots:
            out.append(Violation("home-away-split", (tid,),
                                 f"{home[tid]} home / {away[tid]} away, expected {n_pots}/{n_pots}"))
        for p in range(n_pots):
            h, a = home_vs_pot[tid, p], away_vs_pot[tid, p]
            if h + a != 2:
                out.append(Violation("pot-quota", (tid,), f"meets {h + a} opponents from pot {p + 1}, expected 2"))
            elif h != 1:
                out.append(Violation("pot-orientation", (tid,),
                                     f"pot {p + 1}: {h} home / {a} away, expected 1/1"))
    return out


def association_clashes(schedule: Schedule) -> list[Violation]:
    """Informational only: fixtures between clubs of the same association.

    The simulation deliberately ignores association restrictions, so these
    never make a schedule invalid.
    """
    assoc = {t.team_id: t.association for t in schedule.teams}
    out = []
    for fx in schedule.fixtures:
        a = assoc.get(fx.home_id)
        if a and a == assoc.get(fx.away_id):
            out.append(Violation("same-association", (fx.home_id, fx.away_id), f"both from {a}"))
    return out


def schedule_from_pairs(pairs: Sequence[tuple[str, str]], teams: Sequence[TeamRecord]) -> Schedule:
    return Schedule(tuple(Fixture(h, a) for h, a in pairs), tuple(teams))
