"""Scoreline modelling and Monte Carlo simulation of 36-team league phases."""

__version__ = "0.1.0"

from .domain import (Cutoff, CurvePoint, Fixture, MatchObservation, ModelParams, Schedule,
                     Scoreline, StandingsRow, TeamRecord, ThresholdCurve)
from .draw import PotAssignment, generate_schedule, validate_schedule
from .errors import (DuplicateKeyError, FitDegenerateError, GenerationFailureError,
                     InvalidArgumentError, InvalidRhoError, LeaguePhaseError, NumericRangeError,
                     ParseError, SingularInformationError)
from .fitting import EloScale, FitOptions, FitResult, ModelKind, fit
from .montecarlo import (SimConfig, qualification_credit, rho_sweep, simulate_run, team_probabilities,
                         threshold_curve)
from .scoreline import expected_goals, outcome_probs, rho_bounds, sample_scoreline, scoreline_matrix, tau

__all__ = [name for name in dir() if not name.startswith("_")]
