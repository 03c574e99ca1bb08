"""Example Yarel modules shipped with the package."""

import os

DIR = os.path.dirname(__file__)


def path(name: str) -> str:
    return os.path.join(DIR, name + ".yarel")
