"""Angle bookkeeping on the principal branch (-pi, pi]."""

import math

TWO_PI = 2.0 * math.pi


def principal(angle: float) -> float:
    """Reduce an angle in radians to the principal branch (-pi, pi].

    ``math.remainder`` lands in [-pi, pi]; the lower endpoint is folded up
    so that a half-turn is always reported as +pi.
    """
    a = math.remainder(float(angle), TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    return a


def angle_distance(a: float, b: float) -> float:
    """Absolute distance between two angles measured mod 2*pi."""
    return abs(principal(a - b))
