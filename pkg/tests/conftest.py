from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from repo_fixture import FixtureRepo, build_fixture_repo


@pytest.fixture(scope="session")
def fixture_repo(tmp_path_factory) -> FixtureRepo:
    """The 12-commit scripted repository; read-only for all tests."""
    return build_fixture_repo(tmp_path_factory.mktemp("fixture") / "repo")


@pytest.fixture()
def data_dir(tmp_path) -> Path:
    return tmp_path / "data"
