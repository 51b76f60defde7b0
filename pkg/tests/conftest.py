import random

import pytest

from bbp.core import validate_config


@pytest.fixture
def rng():
    return random.Random(20240601)


def cfg(m, l, b):  # noqa: E741
    return validate_config(m, l, b)


def brute_consistent(m, probes, outputs):
    """Directions whose channel outputs reproduce the log, filtered from scratch."""
    return [s for s in range(1, m + 1) if all((s in p.support) == bool(y) for p, y in zip(probes, outputs))]


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    record = {"detail": ""}
    yield record
    failed = getattr(request.node, "rep_call", None) is not None and request.node.rep_call.failed
    verdict = "FAIL" if failed else "PASS"
    ACCEPTANCE_LINES.append(f"{verdict}  {request.node.name}: {record['detail']}")


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
