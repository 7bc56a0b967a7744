import pytest

from cil_lighting.classifier import classify_record
from cil_lighting.ingestion import SchemeBook, parse_measurements, parse_profiles
from cil_lighting.reference import read_data
from cil_lighting.scoring import median_by_parameter, survey_scores

SURVEYS = ("G_Feb2023", "S_Mar2023", "S_Oct2023", "C_Mar2023", "C_Oct2023")

# Acceptance lines collected during the run and echoed in the terminal summary.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def registry():
    return parse_profiles(read_data("profiles.yaml"))


@pytest.fixture(scope="session")
def book(registry):
    return SchemeBook(registry)


@pytest.fixture(scope="session")
def surveys():
    return {s: parse_measurements(read_data("surveys", s + ".csv")) for s in SURVEYS}


@pytest.fixture(scope="session")
def scored(registry, book, surveys):
    """survey label -> (results, score table, medians)."""
    out = {}
    for label, survey in surveys.items():
        results = [classify_record(registry, book, r) for r in survey.records]
        table = survey_scores(survey, results)
        out[label] = (results, table, median_by_parameter(table))
    return out
