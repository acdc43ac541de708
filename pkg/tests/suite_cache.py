"""Run each suite at most once per test session."""
from __future__ import annotations

from functools import lru_cache
import time

from hopfdiag.suites import run_suite


@lru_cache(maxsize=None)
def suite(name: str):
    t0 = time.perf_counter()
    rep = run_suite(name)
    return rep, time.perf_counter() - t0
