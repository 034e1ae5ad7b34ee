"""Published coefficient sets and the bundled 2024/25 Champions League data.

The coefficient presets carry no standardisation constants of their own:
they were estimated on standardised ratings, and the constants have to come
from the team set being simulated (see :func:`team_standardisation`).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .domain import ModelParams, TeamRecord

# (beta0, beta1, beta2, rho)
COEFFICIENTS = {
    # independent double-Poisson fitted on 2023/24 top-four domestic leagues
    "national-2023": (0.225, 0.207, 0.220, 0.0),
    # Dixon-Coles fitted on the 2024/25 league phases
    "ucl-2024": (0.242, 0.286, 0.301, 0.105),
    "uel-2024": (0.170, 0.095, 0.314, 0.030),
}


def team_standardisation(teams: Sequence[TeamRecord]) -> tuple[float, float]:
    """Mean and sample standard deviation of the teams' ratings."""
    elo = np.array([t.elo for t in teams], dtype=float)
    return float(elo.mean()), float(elo.std(ddof=1))


def preset_params(name: str, teams: Sequence[TeamRecord]) -> ModelParams:
    try:
        b0, b1, b2, rho = COEFFICIENTS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(COEFFICIENTS)}") from None
    mean, sd = team_standardisation(teams)
    return ModelParams(b0, b1, b2, rho, elo_mean=mean, elo_sd=sd)


def data_path(filename: str) -> Path:
    return Path(str(resources.files("leaguephase") / "data" / filename))


UCL_ELO = "ucl_2024_25_elo.csv"          # ratings only, pots empty
UCL_TEAMS = "ucl_2024_25_teams.csv"      # ratings + pots + associations
UCL_RESULTS = "ucl_2024_25_results.csv"  # 144 league-phase results
