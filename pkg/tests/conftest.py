import contextlib

import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


class AcceptanceLog:
    @contextlib.contextmanager
    def criterion(self, key: str, title: str):
        """Record PASS/FAIL for one criterion; ``detail`` may be filled in the body."""
        record = {"detail": ""}
        try:
            yield record
        except BaseException:
            _ACCEPTANCE[key] = ("FAIL", f"{title}: {record['detail']}")
            raise
        _ACCEPTANCE[key] = ("PASS", f"{title}: {record['detail']}")


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=int):
        status, line = _ACCEPTANCE[key]
        terminalreporter.write_line(f"[{status}] {key}. {line}")
