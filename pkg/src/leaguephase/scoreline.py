"""Scoreline probabilities for the double-Poisson and Dixon-Coles models.

Goal rates come from standardised Elo differences::

    lam = exp(beta0 + beta1 * d + beta2)     # home
    mu  = exp(beta0 - beta1 * d)             # away

The four low-score cells are multiplied by ``tau``; everything else is the
product of two Poisson masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import ModelParams, Scoreline
from .errors import InvalidArgumentError, InvalidRhoError, NumericRangeError

DEFAULT_MAX_GOALS = 10


@dataclass(frozen=True)
class GoalRates:
    lam: float
    mu: float

    def __post_init__(self):
        for name in ("lam", "mu"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise InvalidArgumentError(f"goal rate {name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)


def standardize_elo(raw_elo: float, elo_mean: float, elo_sd: float) -> float:
    for name, v in (("raw_elo", raw_elo), ("elo_mean", elo_mean), ("elo_sd", elo_sd)):
        if not math.isfinite(v):
            raise InvalidArgumentError(f"{name} must be finite, got {v!r}")
    if elo_sd <= 0:
        raise InvalidArgumentError(f"elo_sd must be positive, got {elo_sd}")
    return (raw_elo - elo_mean) / elo_sd


def elo_difference(params: ModelParams, elo_home: float, elo_away: float) -> float:
    """Standardise both ratings, then subtract (the mean cancels)."""
    return (standardize_elo(elo_home, params.elo_mean, params.elo_sd)
            - standardize_elo(elo_away, params.elo_mean, params.elo_sd))


def expected_goals(params: ModelParams, elo_home: float, elo_away: float) -> GoalRates:
    d = elo_difference(params, elo_home, elo_away)
    try:
        lam = math.exp(params.beta0 + params.beta1 * d + params.beta2)
        mu = math.exp(params.beta0 - params.beta1 * d)
    except OverflowError as exc:
        raise NumericRangeError(f"goal rate overflow for EloDiff={d}") from exc
    if lam == 0.0 or mu == 0.0 or not (math.isfinite(lam) and math.isfinite(mu)):
        raise NumericRangeError(f"goal rates out of range: lam={lam}, mu={mu}")
    return GoalRates(lam, mu)


def rho_bounds(rates: GoalRates) -> tuple[float, float]:
    """Interval of rho for which all four correction factors are non-negative."""
    lo = max(-1.0 / rates.lam, -1.0 / rates.mu)
    hi = min(1.0 / (rates.lam * rates.mu), 1.0)
    return lo, hi


def tau(x: int, y: int, rates: GoalRates, rho: float) -> float:
    if x < 0 or y < 0:
        raise InvalidArgumentError("goals must be non-negative")
    if x == 0 and y == 0:
        t = 1.0 - rates.lam * rates.mu * rho
    elif x == 0 and y == 1:
        t = 1.0 + rates.lam * rho
    elif x == 1 and y == 0:
        t = 1.0 + rates.mu * rho
    elif x == 1 and y == 1:
        t = 1.0 - rho
    else:
        return 1.0
    if t < 0:
        raise InvalidRhoError(f"rho={rho} makes tau({x},{y}) negative ({t})", rho=rho)
    return t


def poisson_pmf(k: int, rate: float) -> float:
    return math.exp(k * math.log(rate) - rate - math.lgamma(k + 1))


def scoreline_prob(x: int, y: int, rates: GoalRates, rho: float) -> float:
    """Exact (untruncated) probability of the scoreline ``x:y``."""
    return tau(x, y, rates, rho) * poisson_pmf(x, rates.lam) * poisson_pmf(y, rates.mu)


@dataclass(frozen=True, eq=False)
class ScorelineMatrix:
    """Truncated, renormalised scoreline grid; rows are home goals.

    ``cdf`` is the cumulative sum over the row-major flattening with the last
    entry pinned to exactly 1.0 so inverse-CDF sampling never runs off the end.
    """

    probs: np.ndarray
    cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise InvalidArgumentError("scoreline matrix must be square")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise InvalidArgumentError("scoreline matrix entries must be finite and >= 0")
        total = p.sum()
        if total <= 0:
            raise InvalidArgumentError("scoreline matrix has no mass")
        p = p / total
        p.setflags(write=False)
        cdf = np.cumsum(p.ravel())
        cdf[-1] = 1.0
        cdf.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "cdf", cdf)

    @property
    def max_goals(self) -> int:
        return self.probs.shape[0] - 1

    def __getitem__(self, xy: tuple[int, int]) -> float:
        return float(self.probs[xy])


def poisson_vector(rate: float, max_goals: int) -> np.ndarray:
    k = np.arange(max_goals + 1)
    logp = k * math.log(rate) - rate - np.array([math.lgamma(i + 1) for i in k])
    return np.exp(logp)


def unnormalised_grid(rates: GoalRates, rho: float, max_goals: int) -> np.ndarray:
    lo, hi = rho_bounds(rates)
    if not lo <= rho <= hi:
        raise InvalidRhoError(
            f"rho={rho} outside [{lo:.6g}, {hi:.6g}] for rates ({rates.lam:.6g}, {rates.mu:.6g})", rho=rho
        )
    grid = np.outer(poisson_vector(rates.lam, max_goals), poisson_vector(rates.mu, max_goals))
    grid[0, 0] *= 1.0 - rates.lam * rates.mu * rho
    grid[0, 1] *= 1.0 + rates.lam * rho
    grid[1, 0] *= 1.0 + rates.mu * rho
    grid[1, 1] *= 1.0 - rho
    return grid


def scoreline_matrix(rates: GoalRates, rho: float, max_goals: int = DEFAULT_MAX_GOALS) -> ScorelineMatrix:
    if max_goals < 5:
        raise InvalidArgumentError(f"max_goals must be >= 5, got {max_goals}")
    return ScorelineMatrix(unnormalised_grid(rates, rho, max_goals))


def outcome_probs(matrix: ScorelineMatrix) -> tuple[float, float, float]:
    """(home win, draw, away win) probabilities."""
    p = matrix.probs
    p_home = float(np.tril(p, -1).sum())
    p_draw = float(np.trace(p))
    p_away = float(np.triu(p, 1).sum())
    return p_home, p_draw, p_away


def sample_scoreline(matrix: ScorelineMatrix, rng: np.random.Generator) -> Scoreline:
    cell = int(np.searchsorted(matrix.cdf, rng.random(), side="right"))
    cell = min(cell, matrix.cdf.size - 1)
    x, y = divmod(cell, matrix.max_goals + 1)
    return Scoreline(x, y)
