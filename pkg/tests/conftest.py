import numpy as np
import pytest

from schromax.grid import GridSpec


@pytest.fixture
def grid1():
    return GridSpec(1, 40.0, 4096)


@pytest.fixture
def small1():
    return GridSpec(1, 20.0, 256)


@pytest.fixture
def small2():
    return GridSpec(2, 20.0, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_RESULTS = pytest.StashKey[dict]()


class CriterionLog:
    """Collects sub-check outcomes per acceptance criterion."""

    def __init__(self, store: dict):
        self.store = store

    def record(self, number: int, ok: bool, detail: str) -> bool:
        self.store.setdefault(number, []).append((bool(ok), detail))
        return ok


@pytest.fixture(scope="session")
def criteria(request):
    return CriterionLog(request.config.stash.setdefault(_RESULTS, {}))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        parts = results[number]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {detail}")
