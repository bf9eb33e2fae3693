import pytest

_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """``record(k, passed, detail, part="")`` stores one line for the acceptance summary."""

    def record(k, passed, detail, part=""):
        label = f"{k}{part}"
        _ACCEPTANCE[(k, part)] = f"criterion {label:>3}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
