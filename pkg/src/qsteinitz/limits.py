"""Enumeration guards.

Defaults can be overridden through the environment:

``QSTEINITZ_MAX_ENUM_POINTS``  facet / vertex / extreme-ray enumeration (40)
``QSTEINITZ_MAX_ENUM_DIM``     dimension for the same enumerations (6)
``QSTEINITZ_MAX_EXACT_POINTS`` exhaustive Steinitz selection (20)
"""
import os

from .errors import ScaleLimit

GREEDY_MAX_POINTS = 10_000
ORACLE_MAX_POINTS = 12


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


def max_enum_points():
    return _env_int("QSTEINITZ_MAX_ENUM_POINTS", 40)


def max_enum_dim():
    return _env_int("QSTEINITZ_MAX_ENUM_DIM", 6)


def max_exact_points():
    return _env_int("QSTEINITZ_MAX_EXACT_POINTS", 20)


def check_enumeration(n, dim, what="enumeration"):
    if n > max_enum_points() or dim > max_enum_dim():
        raise ScaleLimit(
            f"{what}: n={n}, d={dim} exceeds guard "
            f"(n <= {max_enum_points()}, d <= {max_enum_dim()})"
        )
