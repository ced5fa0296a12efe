import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rsp_sim import ChannelSpec, DesiredStateSpec  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_specs(m, count, seed):
    rng = np.random.default_rng(seed)
    return [(DesiredStateSpec.random(m, rng), ChannelSpec.random(m, rng)) for _ in range(count)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
