import pytest

# filled by tests/test_acceptance.py: (number, passed, detail)
ACCEPTANCE = []


@pytest.fixture
def record():
    def _record(n, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
        ACCEPTANCE.append((n, ok, line))
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
