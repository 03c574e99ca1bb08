"""Fixed-width two's-complement integers.

Every value that flows through a Yarel program is a machine integer of
``WIDTH`` bits.  Arithmetic wraps, so inc/dec/neg stay bijections even at
the edges of the range.
"""

WIDTH = 32
MODULUS = 1 << WIDTH
MIN = -(1 << (WIDTH - 1))
MAX = (1 << (WIDTH - 1)) - 1


def wrap(x: int) -> int:
    """Reduce an unbounded integer into ``[MIN, MAX]``."""
    return ((x - MIN) % MODULUS) + MIN


def in_range(x: int) -> bool:
    return MIN <= x <= MAX
