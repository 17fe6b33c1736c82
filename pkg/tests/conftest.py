import pytest

from critline import counting, topology

# window used by the topology/counting tests: covers lines n = 428..437
WINDOW = (968.0, 992.0)
PHASE_N = range(428, 438)
AMP_N = range(428, 437)


@pytest.fixture(scope="session")
def window_events():
    return counting.scan_events(*WINDOW)


@pytest.fixture(scope="session")
def phase_lines(window_events):
    return [topology.trace(topology.seed_phase_zero(n, 6.0), events=window_events) for n in PHASE_N]


@pytest.fixture(scope="session")
def amplitude_lines(window_events):
    return [topology.trace(topology.seed_amplitude_unity(n, 6.0), events=window_events) for n in AMP_N]


@pytest.fixture(scope="session")
def census_to_window():
    """All events on (0, 995]; used for cumulative counts."""
    return counting.scan_events(0.0, 995.0)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        ok, detail = results[k]
        terminalreporter.write_line(f"CRITERION {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
