import csv
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def table1_rows():
    return read_csv(FIXTURES / "table1.csv")


@pytest.fixture(scope="session")
def table2_rows():
    return read_csv(FIXTURES / "table2.csv")


@pytest.fixture(scope="session")
def twin_params(table1_rows, table2_rows):
    """(entity, q, T, N(2)) for the 13 countries."""
    n2 = {r["entity"]: int(r["n2"]) for r in table1_rows}
    return [(r["entity"], float(r["q"]), float(r["T"]), n2[r["entity"]]) for r in table2_rows]


# -- acceptance report --------------------------------------------------------

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        num, title = marker.args
        detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
        prev = _CRITERIA.get(num)
        ok = rep.outcome == "passed" and (prev is None or prev[1])
        _CRITERIA[num] = (title, ok, detail if prev is None else f"{prev[2]} | {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[num]
        line = f"criterion {num:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
