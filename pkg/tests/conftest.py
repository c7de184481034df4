from __future__ import annotations

import os
import subprocess
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def run_cli(*args: str, env: dict = None) -> subprocess.CompletedProcess:
    full_env = dict(os.environ)
    full_env.pop("REMODEL_CHECK_FUEL", None)
    full_env.update(env or {})
    return subprocess.run([sys.executable, "-m", "remodel_check", *args], capture_output=True,
                          text=True, env=full_env, cwd=FIXTURES)


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES
