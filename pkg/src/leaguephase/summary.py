"""Descriptive statistics for a set of played matches."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .domain import MatchObservation
from .errors import InvalidArgumentError

LOPSIDED_MARGIN = 4


@dataclass(frozen=True)
class MatchSummary:
    n_matches: int
    home_win_share: float
    draw_share: float
    away_win_share: float
    avg_points: float
    avg_home_goals: float
    avg_away_goals: float
    avg_total_goals: float
    lopsided_share: float

    def as_row(self) -> dict[str, str]:
        """Formatted the way the results tables in the literature print them."""
        return {
            "Home win": f"{100 * self.home_win_share:.2f}%",
            "Draw": f"{100 * self.draw_share:.2f}%",
            "Away win": f"{100 * self.away_win_share:.2f}%",
            "Avg points": f"{self.avg_points:.2f}",
            "Home goals": f"{self.avg_home_goals:.2f}",
            "Away goals": f"{self.avg_away_goals:.2f}",
            "Total goals": f"{self.avg_total_goals:.2f}",
            "Lopsided": f"{100 * self.lopsided_share:.2f}%",
        }


def summarize_matches(matches: Sequence[MatchObservation]) -> MatchSummary:
    n = len(matches)
    if n == 0:
        raise InvalidArgumentError("no matches to summarise")
    home = sum(m.home_goals > m.away_goals for m in matches)
    draws = sum(m.home_goals == m.away_goals for m in matches)
    away = n - home - draws
    hg = sum(m.home_goals for m in matches)
    ag = sum(m.away_goals for m in matches)
    lopsided = sum(abs(m.home_goals - m.away_goals) >= LOPSIDED_MARGIN for m in matches)
    draw_share = draws / n
    return MatchSummary(
        n_matches=n,
        home_win_share=home / n,
        draw_share=draw_share,
        away_win_share=away / n,
        avg_points=3 * (1 - draw_share) + 2 * draw_share,
        avg_home_goals=hg / n,
        avg_away_goals=ag / n,
        avg_total_goals=(hg + ag) / n,
        lopsided_share=lopsided / n,
    )
