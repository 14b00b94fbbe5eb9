from __future__ import annotations

import os
from collections import defaultdict
from pathlib import Path

import pytest

from reqclass.corpus import load_corpus

DATA = Path(__file__).parent / "data"
SAMPLE = DATA / "sample.arff"

ACCEPTANCE_TITLES = {
    1: "FR/NFR tree, raw corpus, 10-fold CV",
    2: "FR/NFR tree, processed beats raw by >= 2 points",
    3: "BNB sub-classification, processed, 5x5 CV",
    4: "method ordering BNB > LDA > clustering > BTM",
    5: "processed/unprocessed totals >= 1.5 for BNB and LDA",
    6: "Hopkins statistic: corpus < 0.3, uniform 0.5 +- 0.1",
    7: "mean silhouette in [0.02, 0.25]",
    8: "metrics and kappa equal a brute-force oracle",
    9: "BNB posteriors equal the hand-computed values",
    10: "Gibbs count conservation and topic purity",
    11: "k-means monotone, hybrid deterministic",
    12: "preprocessing idempotence and temporal rule examples",
    13: "doc_distance metric axioms",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test checks")
    config._criteria = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        reason = ""
        if rep.skipped and isinstance(rep.longrepr, tuple):
            reason = rep.longrepr[2].removeprefix("Skipped: ")
        item.config._criteria[n].append((rep.outcome, reason))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criteria", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_TITLES):
        runs = results.get(n)
        if not runs:
            continue
        outcomes = {o for o, _ in runs}
        reasons = sorted({r for o, r in runs if o == "skipped" and r})
        why = f" ({'; '.join(reasons)})" if reasons else ""
        if "failed" in outcomes:
            status = "FAIL"
        elif outcomes == {"skipped"}:
            status = "NOT RUN" + why
        elif "skipped" in outcomes:
            done = sum(o == "passed" for o, _ in runs)
            status = f"PARTIAL: {done} of {len(runs)} checks passed, the rest not run" + why
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {n:2d} [{ACCEPTANCE_TITLES[n]}]: {status}")


@pytest.fixture(scope="session")
def sample_corpus():
    return load_corpus(SAMPLE)


@pytest.fixture(scope="session")
def promise_path():
    """Path of the real PROMISE NFR file, taken from REQCLASS_PROMISE."""
    path = os.environ.get("REQCLASS_PROMISE")
    if not path or not os.path.isfile(path):
        pytest.skip("dataset unavailable: set REQCLASS_PROMISE to the PROMISE NFR file")
    return path
