import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bttree.dataset import builtin_table1, dump_csv  # noqa: E402
from bttree.induction import build_tree  # noqa: E402


@pytest.fixture
def table1():
    return builtin_table1()


@pytest.fixture
def tree1(table1):
    return build_tree(table1)


@pytest.fixture
def table1_csv(tmp_path, table1):
    path = tmp_path / "table1.csv"
    path.write_text(dump_csv(table1), encoding="utf-8")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_acceptance_lines = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else "FAIL"
        detail = dict(item.user_properties).get("detail", "")
        _acceptance_lines.append(f"[{status}] {marker.args[0]}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
