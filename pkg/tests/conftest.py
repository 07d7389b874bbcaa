import logging
import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from asmgen.assembly import load_assembly, load_workcell
from asmgen.scenarios import fixture_paths, transcript_path
from asmgen.sim import SimConfig, Simulator

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

logging.getLogger("asmgen").setLevel(logging.ERROR)

TESTS = Path(__file__).parent


@pytest.fixture(scope="session")
def truck_paths():
    return fixture_paths()


@pytest.fixture(scope="session")
def truck_assembly(truck_paths):
    return load_assembly(Path(truck_paths[0]).read_text())


@pytest.fixture(scope="session")
def truck_workcell(truck_paths, truck_assembly):
    return load_workcell(Path(truck_paths[1]).read_text(), truck_assembly)


@pytest.fixture
def sim(truck_workcell, truck_assembly):
    return Simulator(truck_workcell, truck_assembly, SimConfig(seed=7))


@pytest.fixture
def transcripts():
    return transcript_path


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
