import os
import sys

import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")


_CRITERIA = []


def record_criterion(line):
    _CRITERIA.append(line)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_CRITERIA, key=lambda l: int(l.split()[1])):
        terminalreporter.write_line(line)


@pytest.fixture
def config_path():
    return lambda name: os.path.join(CONFIGS, name)
