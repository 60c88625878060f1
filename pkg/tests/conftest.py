import pytest
from hypothesis import settings

from sdhall import fqrep

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

_ACCEPTANCE: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def criterion():
    """Record a pass/fail line for an acceptance criterion."""

    def record(number: int, title: str, ok: bool):
        _ACCEPTANCE[number] = (title, bool(ok))
        print(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title}")
        return ok

    return record


@pytest.fixture(autouse=True)
def _restore_caps():
    saved = (fqrep.CAPS.max_dim, fqrep.CAPS.max_q)
    yield
    fqrep.CAPS.max_dim, fqrep.CAPS.max_q = saved


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title}")
