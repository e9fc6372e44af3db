import functools

import pytest

from lieadequacy.gf import field_new
from lieadequacy.matgrp import enumerate_group, gl2_generators, sl2_generators

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def sl2(p, b=1):
    return enumerate_group(sl2_generators(field_new(p, b)))


@functools.lru_cache(maxsize=None)
def gl2(p, b=1):
    return enumerate_group(gl2_generators(field_new(p, b)))


@pytest.fixture
def sl2_group():
    return sl2


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
