from __future__ import annotations

import random

import pytest

from congest_cycles import gen_random


def corpus(directed: bool, count: int = 20, sizes=(20, 50, 100), base_seed: int = 0):
    """Random connected graphs cycling through ``sizes`` and a few degrees."""
    out = []
    for k in range(count):
        n = sizes[k % len(sizes)]
        deg = (2.5, 3, 4, 6)[k % 4]
        out.append(gen_random(n, deg, base_seed + k, 20, directed=directed))
    return out


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
