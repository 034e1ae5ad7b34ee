"""Maximum likelihood estimation of the Elo-driven scoreline models.

The likelihood uses exact Poisson masses (no truncation). The optimiser is
scipy's Nelder-Mead with restarts. Standard errors come from a central
finite-difference Hessian of the log-likelihood.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .domain import MatchObservation, ModelParams
from .errors import (FitDegenerateError, InvalidArgumentError, InvalidRhoError,
                     SingularInformationError)

log = logging.getLogger(__name__)

PARAM_NAMES = ("beta0", "beta1", "beta2", "rho")
MIN_MATCHES = 20
RHO_MARGIN = 1e-6


class ModelKind(str, enum.Enum):
    INDEPENDENT = "independent"
    DIXON_COLES = "dixon-coles"


class EloScale(str, enum.Enum):
    # every team-match appearance contributes one rating (two per match)
    APPEARANCES = "appearances"
    # one rating per distinct team (its mean over appearances)
    TEAMS = "teams"


@dataclass(frozen=True)
class FitOptions:
    max_iter: int = 10_000
    ftol: float = 1e-9
    max_restarts: int = 5
    elo_scale: EloScale = EloScale.APPEARANCES
    std_errors: bool = True
    hessian_step: float = 1e-4


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    log_likelihood: float
    std_errors: dict[str, float] | None
    converged: bool
    n_obs: int
    model_kind: ModelKind = ModelKind.DIXON_COLES
    iterations: int = 0


class _Data:
    """Column arrays for a match list under fixed standardisation constants."""

    def __init__(self, matches: Sequence[MatchObservation], elo_mean: float, elo_sd: float):
        if not matches:
            raise InvalidArgumentError("need at least one match")
        self.x = np.array([m.home_goals for m in matches], dtype=float)
        self.y = np.array([m.away_goals for m in matches], dtype=float)
        home = np.array([m.home_elo for m in matches], dtype=float)
        away = np.array([m.away_elo for m in matches], dtype=float)
        self.d = (home - elo_mean) / elo_sd - (away - elo_mean) / elo_sd
        self.log_fact = (np.array([math.lgamma(v + 1) for v in self.x])
                         + np.array([math.lgamma(v + 1) for v in self.y]))
        self.c00 = (self.x == 0) & (self.y == 0)
        self.c01 = (self.x == 0) & (self.y == 1)
        self.c10 = (self.x == 1) & (self.y == 0)
        self.c11 = (self.x == 1) & (self.y == 1)

    def __len__(self):
        return self.x.size

    def rates(self, b0, b1, b2):
        lam = np.exp(b0 + b1 * self.d + b2)
        mu = np.exp(b0 - b1 * self.d)
        return lam, mu

    def tau(self, lam, mu, rho):
        t = np.ones_like(lam)
        t[self.c00] = 1.0 - lam[self.c00] * mu[self.c00] * rho
        t[self.c01] = 1.0 + lam[self.c01] * rho
        t[self.c10] = 1.0 + mu[self.c10] * rho
        t[self.c11] = 1.0 - rho
        return t

    def loglik(self, theta) -> float:
        b0, b1, b2, rho = theta
        lam, mu = self.rates(b0, b1, b2)
        t = self.tau(lam, mu, rho)
        bad = np.flatnonzero(t <= 0)
        if bad.size:
            i = int(bad[0])
            raise InvalidRhoError(f"rho={rho} gives tau <= 0 for match {i}", rho=rho, match_index=i)
        terms = (self.x * np.log(lam) - lam + self.y * np.log(mu) - mu
                 - self.log_fact + np.log(t))
        # fsum is exact-rounded, so the total does not depend on summation order
        return math.fsum(terms.tolist())

    def rho_interval(self, b0, b1, b2) -> tuple[float, float]:
        """Tightest rho box over all matches at the given betas, shrunk by RHO_MARGIN."""
        lam, mu = self.rates(b0, b1, b2)
        lo = float(np.max(np.maximum(-1.0 / lam, -1.0 / mu)))
        hi = float(np.min(np.minimum(1.0 / (lam * mu), 1.0)))
        return lo + RHO_MARGIN, hi - RHO_MARGIN


def standardisation_constants(matches: Sequence[MatchObservation],
                              scale: EloScale = EloScale.APPEARANCES) -> tuple[float, float]:
    scale = EloScale(scale)
    if scale is EloScale.APPEARANCES:
        values = [m.home_elo for m in matches] + [m.away_elo for m in matches]
    else:
        per_team: dict[str, list[float]] = {}
        for m in matches:
            per_team.setdefault(m.home_id, []).append(m.home_elo)
            per_team.setdefault(m.away_id, []).append(m.away_elo)
        values = [float(np.mean(v)) for v in per_team.values()]
    if len(values) < 2:
        raise FitDegenerateError("need at least two Elo values to standardise")
    arr = np.asarray(values, dtype=float)
    sd = float(arr.std(ddof=1))
    if not sd > 0:
        raise FitDegenerateError("all Elo ratings are identical; EloDiff is not identifiable")
    return float(arr.mean()), sd


def _theta(params: ModelParams) -> np.ndarray:
    return np.array([params.beta0, params.beta1, params.beta2, params.rho])


def log_likelihood(params: ModelParams, matches: Sequence[MatchObservation]) -> float:
    return _Data(matches, params.elo_mean, params.elo_sd).loglik(_theta(params))


def log_likelihood_gradient(params: ModelParams, matches: Sequence[MatchObservation]) -> np.ndarray:
    """Analytic gradient with respect to (beta0, beta1, beta2, rho)."""
    data = _Data(matches, params.elo_mean, params.elo_sd)
    rho = params.rho
    lam, mu = data.rates(params.beta0, params.beta1, params.beta2)
    t = data.tau(lam, mu, rho)
    if np.any(t <= 0):
        raise InvalidRhoError("tau <= 0 at gradient point", rho=rho)
    d = data.d
    # derivatives of lam and mu with respect to (b0, b1, b2)
    dlam = np.stack([lam, lam * d, lam])
    dmu = np.stack([mu, -mu * d, np.zeros_like(mu)])
    grad = np.empty(4)
    poisson_part = dlam * (data.x / lam - 1.0) + dmu * (data.y / mu - 1.0)

    dtau = np.zeros((3, lam.size))
    dtau_drho = np.zeros(lam.size)
    c = data.c00
    dtau[:, c] = -rho * (dlam[:, c] * mu[c] + lam[c] * dmu[:, c])
    dtau_drho[c] = -lam[c] * mu[c]
    c = data.c01
    dtau[:, c] = rho * dlam[:, c]
    dtau_drho[c] = lam[c]
    c = data.c10
    dtau[:, c] = rho * dmu[:, c]
    dtau_drho[c] = mu[c]
    dtau_drho[data.c11] = -1.0

    for k in range(3):
        grad[k] = math.fsum((poisson_part[k] + dtau[k] / t).tolist())
    grad[3] = math.fsum((dtau_drho / t).tolist())
    return grad


def _hessian(f, theta: np.ndarray, step: float) -> np.ndarray:
    n = theta.size
    h = step * np.maximum(1.0, np.abs(theta))
    H = np.empty((n, n))
    f0 = f(theta)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        H[i, i] = (f(theta + ei) - 2.0 * f0 + f(theta - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(n)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (f(theta + ei + ej) - f(theta + ei - ej)
                                 - f(theta - ei + ej) + f(theta - ei - ej)) / (4.0 * h[i] * h[j])
    return H


def standard_errors(params: ModelParams, matches: Sequence[MatchObservation], *,
                    free_rho: bool = True, step: float = 1e-4) -> dict[str, float]:
    """Square roots of the diagonal of the inverse observed information.

    With ``free_rho=False`` rho is held fixed and only the betas get errors.
    """
    data = _Data(matches, params.elo_mean, params.elo_sd)
    full = _theta(params)
    k = 4 if free_rho else 3

    def f(sub):
        theta = full.copy()
        theta[:k] = sub
        return data.loglik(theta)

    info = -_hessian(f, full[:k], step)
    try:
        np.linalg.cholesky(info)
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise SingularInformationError("observed information is not positive definite") from exc
    var = np.diag(cov)
    if np.any(~np.isfinite(var)) or np.any(var <= 0):
        raise SingularInformationError("non-positive variance estimate")
    return {name: float(math.sqrt(v)) for name, v in zip(PARAM_NAMES[:k], var)}


def fit(matches: Sequence[MatchObservation], model_kind: ModelKind | str = ModelKind.DIXON_COLES,
        options: FitOptions | None = None) -> FitResult:
    options = options or FitOptions()
    model_kind = ModelKind(model_kind)
    if len(matches) < MIN_MATCHES:
        raise InvalidArgumentError(f"need at least {MIN_MATCHES} matches, got {len(matches)}")
    if len({(m.home_goals, m.away_goals) for m in matches}) == 1:
        raise FitDegenerateError("all observed scorelines are identical")

    elo_mean, elo_sd = standardisation_constants(matches, options.elo_scale)
    data = _Data(matches, elo_mean, elo_sd)
    free_rho = model_kind is ModelKind.DIXON_COLES
    k = 4 if free_rho else 3

    def negll(sub):
        theta = np.zeros(4)
        theta[:k] = sub
        if free_rho:
            lo, hi = data.rho_interval(*theta[:3])
            if not lo <= theta[3] <= hi:
                return math.inf
        try:
            return -data.loglik(theta)
        except InvalidRhoError:
            return math.inf

    mean_goals = (data.x.sum() + data.y.sum()) / (2 * len(data))
    x0 = np.array([math.log(max(mean_goals, 1e-3)), 0.1, 0.2, 0.0])[:k]

    iterations = 0
    best_x, best_f = x0, negll(x0)
    success = False
    for _ in range(options.max_restarts + 1):
        budget = options.max_iter - iterations
        if budget <= 0:
            success = False
            break
        res = minimize(negll, best_x, method="Nelder-Mead",
                       options={"maxiter": budget, "maxfev": 4 * budget,
                                "fatol": options.ftol, "xatol": math.inf})
        iterations += int(res.nit)
        improved = best_f - res.fun
        if res.fun <= best_f:
            best_x, best_f = np.asarray(res.x), float(res.fun)
        success = bool(res.success)
        if not success or improved < options.ftol:
            break

    converged = success and iterations < options.max_iter
    theta = np.zeros(4)
    theta[:k] = best_x
    params = ModelParams(*theta, elo_mean=elo_mean, elo_sd=elo_sd)

    se = None
    if options.std_errors and converged:
        try:
            se = standard_errors(params, matches, free_rho=free_rho, step=options.hessian_step)
        except (SingularInformationError, InvalidRhoError) as exc:
            log.warning("standard errors unavailable: %s", exc)
    return FitResult(params=params, log_likelihood=-best_f, std_errors=se, converged=converged,
                     n_obs=len(matches), model_kind=model_kind, iterations=iterations)
