import pytest

from goldbach_explicit import arith, zeros


@pytest.fixture(scope="session")
def small_table():
    return arith.sieve_lambda(10**5)


@pytest.fixture(scope="session")
def table():
    # covers theorem-1 runs to 1e6 and S_tilde truncation 40N for N <= 2.5e4
    return arith.sieve_lambda(10**6 + 10**4)


@pytest.fixture(scope="session")
def zt100():
    return zeros.load_zeros("builtin:100")


@pytest.fixture(scope="session")
def zt():
    return zeros.load_zeros("builtin:100k")


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
