import numpy as np
import pytest

from leaguephase.csvio import parse_fixtures_csv, parse_matches_csv, parse_teams_csv
from leaguephase.domain import TeamRecord
from leaguephase.draw import PotAssignment
from leaguephase.presets import UCL_ELO, UCL_RESULTS, UCL_TEAMS, data_path


@pytest.fixture(scope="session")
def ucl_teams():
    return parse_teams_csv(data_path(UCL_TEAMS))


@pytest.fixture(scope="session")
def ucl_elo_only():
    return parse_teams_csv(data_path(UCL_ELO))


@pytest.fixture(scope="session")
def ucl_results():
    return parse_matches_csv(data_path(UCL_RESULTS))


@pytest.fixture(scope="session")
def ucl_pots(ucl_teams):
    return PotAssignment.from_teams(ucl_teams)


@pytest.fixture(scope="session")
def ucl_schedule(ucl_teams):
    return parse_fixtures_csv(data_path(UCL_RESULTS), ucl_teams)


def make_pots(n_pots=4, size=9, elo=1500.0):
    """Synthetic pots with distinct ids; ratings spread so rates differ."""
    pots = []
    for p in range(n_pots):
        pots.append(tuple(TeamRecord(f"t{p}{i}", f"Team {p}{i}", elo + 10 * (p * size + i), pot=p + 1)
                          for i in range(size)))
    return PotAssignment(tuple(pots))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
