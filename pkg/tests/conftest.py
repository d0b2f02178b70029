from __future__ import annotations

import shutil
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
TRACES = FIXTURES / "traces"
GOLDEN = FIXTURES / "golden"
DT = FIXTURES / "dt"
PACKAGES = FIXTURES / "packages"

TRACER = Path(__file__).resolve().parents[1] / "tracer" / "tracer.js"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def traces_dir() -> Path:
    return TRACES


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture
def dt_dir() -> Path:
    return DT


@pytest.fixture
def packages_dir() -> Path:
    return PACKAGES


def require_node() -> None:
    if shutil.which("node") is None:
        pytest.skip("node is not available")


def require_tracer() -> None:
    require_node()
    if not TRACER.is_file():
        pytest.skip("tracer script not built")
