import csv
import datetime as dt
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

START = dt.date(2023, 1, 1)


def days(n, start=START):
    return [start + dt.timedelta(days=i) for i in range(n)]


def write_table(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def write_single(directory, file_name, column, values, start=START):
    rows = [(d.isoformat(), v) for d, v in zip(days(len(values), start), values)]
    return write_table(Path(directory) / file_name, ["date", column], rows)


def make_algorand_dir(directory, n=10, proposers=None, tx=None, fees=None, contracts=True):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    proposers = [100] * n if proposers is None else proposers
    tx = [1000 + 100 * i for i in range(n)] if tx is None else tx
    fees = [10.0 + i for i in range(n)] if fees is None else fees
    ds = days(n)
    write_table(directory / "al_block_data_proposercount_reward.csv", ["date", "proposer_count"],
                [(d.isoformat(), p) for d, p in zip(ds, proposers)])
    write_table(directory / "al_transac_data_count_fee.csv", ["date", "transaction_count", "burned_fees"],
                [(d.isoformat(), t, f) for d, t, f in zip(ds, tx, fees)])
    write_single(directory, "al_block_data_reward.csv", "block_reward", [500.0] * n)
    if contracts:
        write_table(directory / "al_contracts_calls_unique_calls.csv",
                    ["date", "contract_calls", "unique_calls"],
                    [(d.isoformat(), 50 + i, 5 + i) for i, d in enumerate(ds)])
    return directory


def make_ethereum_dir(directory, n=10, validators=None, tx=None, fees=None, block_time=None,
                      participation=None):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    validators = [500000] * n if validators is None else validators
    tx = [900000 + 1000 * i for i in range(n)] if tx is None else tx
    fees = [2000.0 + 50 * i for i in range(n)] if fees is None else fees
    block_time = [12.0 + (i % 3) for i in range(n)] if block_time is None else block_time
    participation = [0.98] * n if participation is None else participation
    write_single(directory, "validator_data.csv", "validator_count", validators)
    write_single(directory, "daily_transactions.csv", "transaction_count", tx)
    write_single(directory, "burned_fees.csv", "burned_fees", fees)
    write_single(directory, "avg_blk_time.csv", "avg_block_time", block_time)
    write_single(directory, "daily_block_count.csv", "daily_block_count", [7000] * n)
    write_single(directory, "participation_rate.csv", "participation_rate", participation)
    write_single(directory, "network_Liveness.csv", "network_liveness", [2] * n)
    return directory


@pytest.fixture
def algorand_dir(tmp_path):
    return make_algorand_dir(tmp_path / "algorand")


@pytest.fixture
def ethereum_dir(tmp_path):
    return make_ethereum_dir(tmp_path / "ethereum2")


@pytest.fixture
def rng():
    return np.random.default_rng(20231017)


# acceptance bookkeeping: tests marked @pytest.mark.criterion(n, title) get a
# one-line PASS/FAIL entry in the terminal summary
_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    state = _CRITERIA.setdefault(number, {"title": title, "passed": 0, "failed": 0, "notes": []})
    if rep.when == "call":
        state["notes"].extend(getattr(item, "_diagnostics", []))
    if rep.skipped:
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else "skipped"
        state["notes"].append(f"{item.name}: {reason}")
    elif rep.failed:
        state["failed"] += 1
        state["notes"].append(f"{item.name}: failed")
    elif rep.when == "call":
        state["passed"] += 1


@pytest.fixture
def diagnostic(request):
    """Record a line shown under the test's criterion in the summary."""
    lines = request.node.__dict__.setdefault("_diagnostics", [])

    def note(text):
        lines.append(text)
        print(text)
    return note


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        state = _CRITERIA[number]
        status = "FAIL" if state["failed"] else "PASS" if state["passed"] else "SKIP"
        terminalreporter.write_line(f"[{status}] criterion {number}: {state['title']}")
        for note in state["notes"]:
            terminalreporter.write_line(f"         {note}")
