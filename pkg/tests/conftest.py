import time

import pytest

from coxvanet.params import NetworkParams
from coxvanet.simulate import estimate_pc_thresholds

ACCEPTANCE_SEED = 12345
BASELINE_MU = (5.0, 10.0, 20.0)
BASELINE_BETA_DB = (-5.0, 0.0, 10.0)

_verdicts = []


def baseline_params(mu_l, beta=1.0):
    return NetworkParams(mu_l=mu_l, lambda_v=20, p=1, d=0.01, alpha=4, beta=beta, sigma2=0)


def run_baseline(window_radius, n_trials=100_000):
    """Monte-Carlo records keyed by (mu_l, beta_db), plus the elapsed seconds."""
    start = time.perf_counter()
    records = {}
    for mu in BASELINE_MU:
        betas = [10 ** (db / 10) for db in BASELINE_BETA_DB]
        for db, record in zip(BASELINE_BETA_DB, estimate_pc_thresholds(baseline_params(mu), betas, window_radius, n_trials, ACCEPTANCE_SEED)):
            records[mu, db] = record
    return records, time.perf_counter() - start


@pytest.fixture(scope="session")
def baseline_window2():
    return run_baseline(2.0)


@pytest.fixture
def report():
    """Record a one-line acceptance verdict; all of them are echoed at the end of the run."""

    def _report(name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} {name}: {detail}"
        _verdicts.append(line)
        print(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if _verdicts:
        terminalreporter.section("acceptance criteria")
        for line in _verdicts:
            terminalreporter.write_line(line)
