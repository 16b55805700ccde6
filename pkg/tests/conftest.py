import math
import time

import pytest

from nonlocalbox import OptimizerOptions, max_equal_bias, pr_box, quantum_tsirelson_box, uniform_box
from nonlocalbox.box import EqualBiasBox, NsParams

SQRT2 = math.sqrt(2)


@pytest.fixture
def quantum():
    return quantum_tsirelson_box()


@pytest.fixture
def pr():
    return pr_box()


@pytest.fixture
def uniform():
    return uniform_box()


def _timed(kind, **kw):
    t0 = time.perf_counter()
    res = max_equal_bias(kind, OptimizerOptions(**kw))
    return res, time.perf_counter() - t0


# optimizer runs take tens of seconds; share one run per criterion across modules
@pytest.fixture(scope="session")
def ic_run():
    return _timed("ic")


@pytest.fixture(scope="session")
def ml_run():
    return _timed("ml")


@pytest.fixture(scope="session")
def ic_result(ic_run):
    return ic_run[0]


@pytest.fixture(scope="session")
def ml_result(ml_run):
    return ml_run[0]


def random_ns_params(rng, size=None, margin=0.0):
    """Valid NsParams with marginals in [margin, 1 - margin] and c uniform in its window."""
    out = []
    for _ in range(size or 1):
        m1, m2, n1, n2 = rng.uniform(margin, 1 - margin, 4)
        cs = []
        for m, n in ((m1, n1), (m1, n2), (m2, n1), (m2, n2)):
            lo, hi = max(0.0, m + n - 1), min(m, n)
            cs.append(lo + rng.random() * (hi - lo))
        out.append(NsParams(m1, m2, n1, n2, *cs))
    return out if size else out[0]


def random_equal_bias(rng, p_range=(0.01, 0.99)):
    p = rng.uniform(*p_range)
    lo, hi = max(0.0, 2 * p - 1), p
    return EqualBiasBox.from_c(p, lo + rng.random(4) * (hi - lo))


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid and rep.when == "call":
                lines.append((rep.nodeid.split("::")[-1], outcome))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(lines):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")

