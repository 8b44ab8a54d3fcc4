import sys
from pathlib import Path

import pytest

from residua.config import FamilySpec

ROOT = Path(__file__).resolve().parents[1]
FAMILIES = ROOT / "families"
sys.path.insert(0, str(Path(__file__).parent))

DEGENERATE = ["t_z_plus_inv_z", "t_z2", "z2_over_t", "mobius_quotient"]


def load_family(name: str):
    return FamilySpec.load(FAMILIES / f"{name}.json").to_pair()


@pytest.fixture(scope="session")
def families():
    return {name: load_family(name) for name in DEGENERATE}


@pytest.fixture(scope="session")
def tz():
    return load_family("t_z_plus_inv_z")


ACCEPTANCE: dict[int, tuple[bool, float, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, secs, title = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {secs:6.2f}s  {title}")
