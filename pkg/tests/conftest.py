import os

import pytest

from yarel.checker import check_unit
from yarel.programs import path as program_path
from yarel.syntax import load_file, parse_module, unit_of

HERE = os.path.dirname(__file__)
FIXTURES = os.path.join(HERE, "fixtures")


@pytest.fixture(scope="session")
def fib_source():
    with open(program_path("Fibonacci"), encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture(scope="session")
def fib_env():
    return check_unit(load_file(program_path("Fibonacci")))


@pytest.fixture(scope="session")
def arith_env():
    return check_unit(load_file(program_path("Arith")))


def env_of(text):
    """Check a single-module source and return its environment."""
    return check_unit(unit_of(parse_module(text)))
