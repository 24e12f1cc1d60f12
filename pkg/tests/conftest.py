import json
import math
from pathlib import Path

import mpmath
import pytest

from primecf import PrecisionContext, SieveHandle

ORACLE_PATH = Path(__file__).parent / "oracles" / "frozen.json"


@pytest.fixture(scope="session")
def oracle():
    """Values frozen by tests/oracles/generate.py (mpmath and sympy, 45 digits)."""
    return json.loads(ORACLE_PATH.read_text())


def okey(x) -> str:
    """Key used by json.dumps for a numeric dict key."""
    return json.dumps(x) if isinstance(x, (int, float)) else str(x)


@pytest.fixture(autouse=True)
def _compare_digits():
    """Reference arithmetic in tests runs well above the 30-digit targets."""
    with mpmath.workdps(50):
        yield


def mp(text):
    return mpmath.mpf(text)


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(digits=30)


@pytest.fixture(scope="session")
def ctx60():
    return PrecisionContext(digits=60)


@pytest.fixture(scope="session")
def sieve_1e6():
    return SieveHandle(10**6)


@pytest.fixture(scope="session")
def sieve_1e8():
    return SieveHandle(10**8)


@pytest.fixture(scope="session")
def sieve_gap():
    """Reaches e * 1e8 for the prime-gap slopes."""
    return SieveHandle(int(math.e * 10**8) + 1)


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; the terminal summary prints them in order."""
    results = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def record(number, ok, detail=""):
        results[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        print(results[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
