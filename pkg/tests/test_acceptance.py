"""The fifteen acceptance criteria, one test each.

All checks share one run context so the expensive seminorm values for the
random suite are computed once.  Each test prints a single pass/fail line;
the same lines are repeated in the terminal summary.
"""
from __future__ import annotations

import time

import pytest

from horolip.acceptance import CHECKS, Context

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, str] = {}


@pytest.fixture(scope="module")
def ctx() -> Context:
    return Context(seed=0)


@pytest.mark.parametrize("k,name,fn", [(k, n, fn) for k, (n, _, fn) in enumerate(CHECKS, start=1)],
                         ids=[f"{k:02d}-{n}" for k, (n, _, _) in enumerate(CHECKS, start=1)])
def test_criterion(ctx, k, name, fn):
    t0 = time.perf_counter()
    rep = fn(ctx)
    status = "PASS" if rep.passed else "FAIL"
    line = f"criterion {k} {name}: {status} ({time.perf_counter() - t0:.1f}s)"
    RESULTS[k] = line
    print(line)
    failed = [f"{a.label}: {a.lhs} {a.relation} {a.rhs}" for a in rep.assertions if not a.passed]
    assert rep.passed, "\n".join(failed)
