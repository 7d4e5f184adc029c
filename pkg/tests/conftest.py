import pytest

# (criterion, passed, detail) records filled by tests/test_acceptance.py
ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion line and fail the test if it does not hold."""

    def record(name: str, checks: list[tuple[str, float, float]]):
        failed = [f"{label}={value:.3e} > {tol:.1e}" for label, value, tol in checks if not value <= tol]
        detail = "; ".join(failed) if failed else "; ".join(f"{label}={value:.2e}" for label, value, _ in checks)
        ACCEPTANCE.append((name, not failed, detail))
        assert not failed, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
