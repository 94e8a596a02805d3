from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from overset1d.config import RunConfig, config_from_dict
from overset1d.systems import Burgers, Euler, ShallowWater

PRESETS = resources.files("overset1d") / "presets"


def preset_path(name: str) -> Path:
    return Path(str(PRESETS / f"{name}.json"))


def preset(name: str, **changes) -> RunConfig:
    cfg = config_from_dict(json.loads(preset_path(name).read_text()))
    return cfg.replace(**changes) if changes else cfg


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["burgers", "shallow_water", "euler"])
def system(request):
    return {"burgers": Burgers(), "shallow_water": ShallowWater(), "euler": Euler()}[request.param]


# {{{ acceptance report

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, ok, detail)``."""

    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

# }}}
