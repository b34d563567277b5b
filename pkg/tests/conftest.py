import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flipmine import Thresholds, build_taxonomy, load_transactions, read_taxonomy, read_transactions  # noqa: E402

DATA = Path(__file__).parent / "data"
TOY_TAXONOMY = DATA / "toy_taxonomy.tsv"
TOY_TRANSACTIONS = DATA / "toy_transactions.txt"
TOY_THRESHOLDS = Thresholds(0.6, 0.35, (0.1, 0.1, 0.1))

TWO_LEVEL = [("a", "ROOT"), ("a1", "a"), ("a2", "a"), ("b", "ROOT"), ("b1", "b")]


@pytest.fixture
def two_level():
    return build_taxonomy(TWO_LEVEL)


@pytest.fixture(scope="session")
def toy():
    tree = read_taxonomy(TOY_TAXONOMY)
    return tree, read_transactions(TOY_TRANSACTIONS, tree), TOY_THRESHOLDS


def ids(tree, *labels):
    return tuple(sorted(tree.terminal(tree.node(x)) for x in labels))


def labels(tree, items):
    return {tree.labels[v] for v in items}


def dataset(tree, lines):
    return load_transactions(lines, tree)


# one PASS/FAIL line per acceptance criterion, printed after the run
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    n = marker.args[0]
    entry = _CRITERIA.setdefault(n, {"title": marker.kwargs.get("title", ""), "ok": True, "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed or report.skipped:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "PASS" if e["ok"] and e["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {e['title']}")
