"""Monte Carlo league-phase simulation and qualification threshold curves.

Each simulated run samples a scoreline for every fixture, awards 3/1/0
points and ranks teams by points only. A cutoff at rank ``k`` gives credit 1
to teams strictly above the points value at rank ``k``, 0 to those below,
and ``s/n`` to each of the ``n`` teams tied on that value when ``s`` slots
remain. Threshold curves pool all (team, run) observations that share a
points total.

Reproducibility: runs are processed in blocks of ``BLOCK_SIZE``. The random
stream of block ``b`` is ``SeedSequence(master_seed, spawn_key=(b,))``. Inside
a block, runs consume the stream in order: schedule first (random-draw mode),
then one uniform per fixture. A run's outcome therefore depends only on
``(master_seed, run index)``. Credits are accumulated as integers scaled by
``lcm(1..n_teams)``, so the reduction is exact and does not depend on the
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .domain import Cutoff, CurvePoint, ModelParams, Schedule, StandingsRow, TeamRecord, ThresholdCurve
from .draw import PotAssignment, generate_fixture_indices
from .errors import InvalidArgumentError, InvalidRhoError
from .scoreline import DEFAULT_MAX_GOALS, expected_goals, rho_bounds, scoreline_matrix

BLOCK_SIZE = 256
# lcm(1..36) * 36 * BLOCK_SIZE stays below 2**63; one more team would not
MAX_TEAMS = 36


@dataclass(frozen=True)
class SimConfig:
    n_runs: int = 10_000
    master_seed: int = 0
    max_goals: int = DEFAULT_MAX_GOALS
    top_k_direct: int = 8
    top_k_playoff: int = 24
    workers: int = 1

    def __post_init__(self):
        if self.n_runs < 1:
            raise InvalidArgumentError("n_runs must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidArgumentError("master_seed must be an unsigned 64-bit integer")
        if not 0 < self.top_k_direct < self.top_k_playoff:
            raise InvalidArgumentError("need 0 < top_k_direct < top_k_playoff")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be >= 1")

    def check_team_count(self, n_teams: int) -> None:
        if not self.top_k_playoff < n_teams:
            raise InvalidArgumentError(
                f"top_k_playoff={self.top_k_playoff} must be below the team count {n_teams}")


@dataclass(frozen=True)
class RunOutcome:
    standings: list[StandingsRow]
    credits: dict[str, tuple[Fraction, Fraction]]
    draws: int


@dataclass(frozen=True)
class SweepResult:
    rho_grid: list[float]
    avg_draws: list[float]
    curves: list[tuple[ThresholdCurve, ThresholdCurve]]


# ---------------------------------------------------------------------------
# sampling tables


def _pair_cdfs(teams: Sequence[TeamRecord], params: ModelParams, max_goals: int,
               pairs: set[tuple[int, int]]) -> np.ndarray:
    """Cumulative scoreline tables, one row per ordered pair ``h * n + a``.

    Rows for pairs that are never played stay all-ones (they would sample 0:0).
    """
    n = len(teams)
    cells = (max_goals + 1) ** 2
    table = np.ones((n * n, cells))
    for h, a in sorted(pairs):
        rates = expected_goals(params, teams[h].elo, teams[a].elo)
        lo, hi = rho_bounds(rates)
        if not lo <= params.rho <= hi:
            raise InvalidRhoError(
                f"rho={params.rho} outside [{lo:.6g}, {hi:.6g}] for "
                f"{teams[h].team_id} v {teams[a].team_id}", rho=params.rho)
        table[h * n + a] = scoreline_matrix(rates, params.rho, max_goals).cdf
    return table


def sample_cells(cdf: np.ndarray, rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF lookup, ``searchsorted(cdf[row], u, side="right")`` elementwise.

    A fixed number of bisection steps over gathered entries, so memory stays
    proportional to ``rows.size`` rather than ``rows.size * cells``.
    """
    cells = cdf.shape[1]
    lo = np.zeros(rows.shape, dtype=np.int64)
    hi = np.full(rows.shape, cells - 1, dtype=np.int64)
    for _ in range(max(1, math.ceil(math.log2(cells)))):
        mid = (lo + hi) >> 1
        right = cdf[rows, mid] <= u
        lo = np.where(right, mid + 1, lo)
        hi = np.where(right, hi, mid)
    return lo


def _credit_scale(n_teams: int) -> int:
    return math.lcm(*range(1, n_teams + 1))


def scaled_credits(points: np.ndarray, k: int, scale: int) -> np.ndarray:
    """Tie-split credits times ``scale`` as exact int64, row-wise over runs."""
    th = -np.sort(-points, axis=1)[:, k - 1:k]
    above = points > th
    tie = points == th
    slots = k - above.sum(axis=1, keepdims=True)
    n_tie = tie.sum(axis=1, keepdims=True)
    return above * np.int64(scale) + tie * (slots * (scale // n_tie))


@dataclass
class _Tally:
    n_points: int
    n_teams: int
    draws: int = 0
    counts: list[int] = field(default_factory=list)
    direct: list[int] = field(default_factory=list)
    playoff: list[int] = field(default_factory=list)
    team_direct: list[int] = field(default_factory=list)
    team_playoff: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.counts = [0] * self.n_points
        self.direct = [0] * self.n_points
        self.playoff = [0] * self.n_points
        self.team_direct = [0] * self.n_teams
        self.team_playoff = [0] * self.n_teams

    def add(self, other: "_Tally") -> None:
        # python ints, so the totals are exact however many blocks are added
        self.draws += other.draws
        for name in ("counts", "direct", "playoff", "team_direct", "team_playoff"):
            mine, theirs = getattr(self, name), getattr(other, name)
            for i, v in enumerate(theirs):
                mine[i] += v


@dataclass
class _BlockOutput:
    points: np.ndarray
    goals_for: np.ndarray
    goals_against: np.ndarray
    wins: np.ndarray
    draws_by_team: np.ndarray
    draws: np.ndarray
    direct: np.ndarray
    playoff: np.ndarray


def _play(cdf: np.ndarray, home: np.ndarray, away: np.ndarray, u: np.ndarray, n: int,
          max_goals: int, k_direct: int, k_playoff: int, scale: int) -> _BlockOutput:
    """Play a block of runs; ``home``/``away``/``u`` have shape (runs, fixtures)."""
    runs = u.shape[0]
    cell = sample_cells(cdf, home * n + away, u)
    x, y = np.divmod(cell, max_goals + 1)
    offset = (np.arange(runs) * n)[:, None]

    def per_team(idx, weights):
        return np.bincount((idx + offset).ravel(), weights=weights.ravel(),
                           minlength=runs * n).reshape(runs, n).astype(np.int64)

    hw, dr, aw = x > y, x == y, x < y
    points = per_team(home, 3 * hw + dr) + per_team(away, 3 * aw + dr)
    out = _BlockOutput(
        points=points,
        goals_for=per_team(home, x) + per_team(away, y),
        goals_against=per_team(home, y) + per_team(away, x),
        wins=per_team(home, hw) + per_team(away, aw),
        draws_by_team=per_team(home, dr) + per_team(away, dr),
        draws=dr.sum(axis=1),
        direct=scaled_credits(points, k_direct, scale),
        playoff=scaled_credits(points, k_playoff, scale),
    )
    return out


def _tally(out: _BlockOutput, n_points: int) -> _Tally:
    t = _Tally(n_points, out.points.shape[1])
    t.draws = int(out.draws.sum())
    pts = out.points.ravel()
    t.counts = np.bincount(pts, minlength=n_points).tolist()
    # int64 grouped sums; block sizes keep these far below 2**63
    for name, credits in (("direct", out.direct), ("playoff", out.playoff)):
        sums = np.zeros(n_points, dtype=np.int64)
        np.add.at(sums, pts, credits.ravel())
        setattr(t, name, [int(v) for v in sums])
    t.team_direct = [int(v) for v in out.direct.sum(axis=0)]
    t.team_playoff = [int(v) for v in out.playoff.sum(axis=0)]
    return t


def _block_rng(master_seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(block,))))


class _Simulator:
    """Shared state for one (teams, params, schedule source) simulation."""

    def __init__(self, source: Schedule | PotAssignment, params: ModelParams, config: SimConfig):
        self.config = config
        if isinstance(source, Schedule):
            self.teams = list(source.teams)
            index = {t.team_id: i for i, t in enumerate(self.teams)}
            self.fixed = np.array([[index[f.home_id], index[f.away_id]] for f in source.fixtures],
                                  dtype=np.int64).reshape(-1, 2)
            pairs = {(int(h), int(a)) for h, a in self.fixed}
            per_team = np.bincount(self.fixed.ravel(), minlength=len(self.teams))
            self.max_matches = int(per_team.max()) if per_team.size else 0
            self.pots = None
        elif isinstance(source, PotAssignment):
            self.teams = source.teams
            self.fixed = None
            self.pots = (len(source.pots), source.pot_size)
            n = len(self.teams)
            pairs = {(h, a) for h in range(n) for a in range(n) if h != a}
            self.max_matches = 2 * len(source.pots)
        else:
            raise InvalidArgumentError(f"unsupported schedule source {type(source).__name__}")
        n = len(self.teams)
        if n > MAX_TEAMS:
            raise InvalidArgumentError(f"at most {MAX_TEAMS} teams supported")
        config.check_team_count(n)
        self.n = n
        self.scale = _credit_scale(n)
        self.n_points = 3 * self.max_matches + 1
        self.cdf = _pair_cdfs(self.teams, params, config.max_goals, pairs)

    def _block_arrays(self, rng: np.random.Generator, runs: int):
        if self.fixed is not None:
            f = self.fixed.shape[0]
            u = rng.random((runs, f))
            home = np.broadcast_to(self.fixed[:, 0], (runs, f))
            away = np.broadcast_to(self.fixed[:, 1], (runs, f))
            return home, away, u
        n_pots, m = self.pots
        fixtures, uniforms = [], []
        for _ in range(runs):
            pairs = generate_fixture_indices(n_pots, m, rng)
            fixtures.append(pairs)
            uniforms.append(rng.random(len(pairs)))
        arr = np.array(fixtures, dtype=np.int64)
        return arr[:, :, 0], arr[:, :, 1], np.array(uniforms)

    def run_block(self, block: int) -> _BlockOutput:
        start = block * BLOCK_SIZE
        runs = min(BLOCK_SIZE, self.config.n_runs - start)
        rng = _block_rng(self.config.master_seed, block)
        home, away, u = self._block_arrays(rng, runs)
        return _play(self.cdf, home, away, u, self.n, self.config.max_goals,
                     self.config.top_k_direct, self.config.top_k_playoff, self.scale)

    def tally(self) -> _Tally:
        n_blocks = -(-self.config.n_runs // BLOCK_SIZE)
        total = _Tally(self.n_points, self.n)

        def work(b):
            return _tally(self.run_block(b), self.n_points)

        if self.config.workers == 1:
            results = map(work, range(n_blocks))
            for t in results:
                total.add(t)
        else:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                for t in pool.map(work, range(n_blocks)):
                    total.add(t)
        return total

    def curves(self, tally: _Tally) -> tuple[ThresholdCurve, ThresholdCurve]:
        out = []
        for cutoff, sums in ((Cutoff.ROUND_OF_16, tally.direct), (Cutoff.PLAYOFF, tally.playoff)):
            entries = {}
            for p, count in enumerate(tally.counts):
                if count:
                    entries[p] = CurvePoint(float(Fraction(sums[p], self.scale * count)), count)
            out.append(ThresholdCurve(cutoff, entries))
        return out[0], out[1]


# ---------------------------------------------------------------------------
# public operations


def qualification_credit(points: Sequence[int], k: int) -> list[Fraction]:
    """Credit for a top-``k`` cutoff, aligned with ``points``.

    ``points`` may be StandingsRow objects or plain integers and need not be
    sorted, although standings normally are.
    """
    pts = [p.points if isinstance(p, StandingsRow) else int(p) for p in points]
    if not 0 < k <= len(pts):
        raise InvalidArgumentError(f"cutoff k={k} outside 1..{len(pts)}")
    th = sorted(pts, reverse=True)[k - 1]
    above = sum(p > th for p in pts)
    tied = sum(p == th for p in pts)
    share = Fraction(k - above, tied)
    return [Fraction(1) if p > th else share if p == th else Fraction(0) for p in pts]


def simulate_run(schedule: Schedule, params: ModelParams, rng: np.random.Generator, *,
                 max_goals: int = DEFAULT_MAX_GOALS, top_k_direct: int = 8,
                 top_k_playoff: int = 24) -> RunOutcome:
    config = SimConfig(n_runs=1, max_goals=max_goals, top_k_direct=top_k_direct,
                       top_k_playoff=top_k_playoff)
    sim = _Simulator(schedule, params, config)
    home, away, u = sim._block_arrays(rng, 1)
    out = _play(sim.cdf, home, away, u, sim.n, max_goals, top_k_direct, top_k_playoff, sim.scale)

    rows = []
    for i, team in enumerate(sim.teams):
        w, d, pts = int(out.wins[0, i]), int(out.draws_by_team[0, i]), int(out.points[0, i])
        played = int(np.count_nonzero(sim.fixed == i))
        rows.append(StandingsRow(team.team_id, pts, w, d, played - w - d,
                                 int(out.goals_for[0, i]), int(out.goals_against[0, i])))
    credits = {t.team_id: (Fraction(int(out.direct[0, i]), sim.scale),
                           Fraction(int(out.playoff[0, i]), sim.scale))
               for i, t in enumerate(sim.teams)}
    rows.sort(key=lambda r: (-r.points, r.team_id))
    return RunOutcome(rows, credits, int(out.draws[0]))


def threshold_curve(source: Schedule | PotAssignment, params: ModelParams,
                    config: SimConfig | None = None) -> tuple[ThresholdCurve, ThresholdCurve]:
    """Estimate P(direct qualification | points) and P(top-24 | points).

    ``source`` is either a fixed :class:`Schedule` or a :class:`PotAssignment`,
    in which case a fresh random draw is made for every run.
    """
    config = config or SimConfig()
    sim = _Simulator(source, params, config)
    return sim.curves(sim.tally())


def team_probabilities(source: Schedule | PotAssignment, params: ModelParams,
                       config: SimConfig | None = None) -> dict[str, tuple[float, float]]:
    """Mean (direct, playoff) credit of every team over the simulated runs."""
    config = config or SimConfig()
    sim = _Simulator(source, params, config)
    tally = sim.tally()
    denom = sim.scale * config.n_runs
    return {t.team_id: (float(Fraction(tally.team_direct[i], denom)),
                        float(Fraction(tally.team_playoff[i], denom)))
            for i, t in enumerate(sim.teams)}


def global_rho_bounds(teams: Sequence[TeamRecord], params: ModelParams) -> tuple[float, float]:
    """Rho interval valid for every ordered pairing of distinct teams."""
    lo, hi = -math.inf, math.inf
    for h in teams:
        for a in teams:
            if h.team_id != a.team_id:
                l, u = rho_bounds(expected_goals(params, h.elo, a.elo))
                lo, hi = max(lo, l), min(hi, u)
    return lo, hi


def rho_sweep(pots: PotAssignment, base_params: ModelParams, rho_grid: Sequence[float],
              config: SimConfig | None = None) -> SweepResult:
    """Vary rho over a grid with random draws, other coefficients fixed.

    Every grid point reuses ``config.master_seed`` (common random numbers),
    so differences along the grid are not blurred by sampling noise.
    """
    config = config or SimConfig()
    grid = [float(r) for r in rho_grid]
    if not grid:
        raise InvalidArgumentError("empty rho grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidArgumentError("rho grid must be strictly increasing")
    lo, hi = global_rho_bounds(pots.teams, base_params)
    for r in grid:
        if not lo <= r <= hi:
            raise InvalidRhoError(f"grid point rho={r} outside valid range [{lo:.6g}, {hi:.6g}]", rho=r)

    avg_draws, curves = [], []
    for r in grid:
        sim = _Simulator(pots, base_params.with_rho(r), config)
        tally = sim.tally()
        avg_draws.append(tally.draws / config.n_runs)
        curves.append(sim.curves(tally))
    return SweepResult(grid, avg_draws, curves)
