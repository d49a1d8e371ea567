import pytest

from zll.ladder import LadderConstants
from zll.quadrature import Integrator, QuadratureSpec
from zll.special_functions import EvaluatorConfig


@pytest.fixture(scope="session")
def cfg():
    return EvaluatorConfig()


@pytest.fixture(scope="session")
def consts():
    return LadderConstants()


@pytest.fixture(scope="session")
def integ(cfg):
    """One cached integrator shared by the whole run (J checkpoints are reused)."""
    return Integrator(cfg, QuadratureSpec())


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def accept(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _record(number, title, checks):
        ok = all(passed for passed, _ in checks)
        detail = "; ".join(f"{'ok' if passed else 'FAILED'} {text}" for passed, text in checks)
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} | {detail}"
        request.config.stash.setdefault(_ACCEPTANCE, {})[number] = line
        print(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
