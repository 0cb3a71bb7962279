"""Full-scale acceptance criteria A1-A8. Each test prints one PASS/FAIL line.
Together they take roughly 20 minutes on one core; set BPB_MARKET_WORKERS
to fan the per-instance work out over more processes."""
import os
import time

import pytest

from bpb_market.experiments import KEYS, run_criterion

WORKERS = int(os.environ.get("BPB_MARKET_WORKERS", "1"))


@pytest.mark.acceptance
@pytest.mark.parametrize("key", KEYS)
def test_criterion(key, capsys):
    t = time.perf_counter()
    crit = run_criterion(key, False, 0, WORKERS, None)
    with capsys.disabled():
        print(f"\n{crit.line()}  [{time.perf_counter() - t:.1f}s]")
    assert crit.passed, crit.detail
