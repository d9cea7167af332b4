import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from causalverif.cli import data_path  # noqa: E402

# criterion id -> (passed, detail); filled by the acceptance suite
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def data():
    return data_path


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
