"""Serialization helpers and the optional thread pool."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .errors import InputError


def num_to_json(x):
    if x is None:
        return None
    if x == math.inf:
        return "inf"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else str(x)
    return x


def num_from_json(x):
    if x is None:
        return None
    if x == "inf":
        return math.inf
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad numeric literal {x!r}") from e
    if isinstance(x, (int,)):
        return Fraction(x)
    return float(x)


def pmap(fn, items):
    """Order-preserving map, threaded when PSMM_THREADS > 1.

    Results are identical to the sequential path; only wall time
    changes.
    """
    items = list(items)
    n = int(os.environ.get("PSMM_THREADS", "1") or "1")
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
