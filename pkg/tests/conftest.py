import time

import pytest

CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Run ``check() -> (ok, detail)`` for criterion ``k``, record the verdict and assert it."""

    def run(k: int, check, budget: float):
        t0 = time.perf_counter()
        ok, detail = check()
        elapsed = time.perf_counter() - t0
        if elapsed > budget:
            ok, detail = False, f"{detail}; runtime {elapsed:.1f} s exceeds {budget:.0f} s"
        line = f"CRITERION {k} {'PASS' if ok else 'FAIL'} ({elapsed:.1f} s): {detail}"
        request.config.stash.setdefault(CRITERIA, {})[k] = line
        print(line)
        assert ok, line

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(CRITERIA, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
