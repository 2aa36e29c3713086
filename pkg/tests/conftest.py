import os
from collections import defaultdict
from pathlib import Path

import numpy as np
import pytest

import oexnrule.ensemble as ensemble_mod
from oexnrule import Dataset

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = Path(os.environ.get("OEXNRULE_DATA", ROOT / "data"))

SELECTION_CHECKS = {"fits": 0, "violations": []}


def selection_violation(models, chosen):
    """None if ``chosen`` are the best-ranked of ``models``, else a message."""
    chosen_ids = {m.ordinal for m in chosen}
    rejected = [m for m in models if m.ordinal not in chosen_ids]
    if not rejected:
        return None
    worst = max(chosen, key=ensemble_mod.BaseModel.rank_key)
    best_rejected = min(rejected, key=ensemble_mod.BaseModel.rank_key)
    if worst.rank_key() > best_rejected.rank_key():
        return f"selected {worst.rank_key()} ranks after rejected {best_rejected.rank_key()}"
    if worst.scored and best_rejected.scored and worst.oob_error > best_rejected.oob_error:
        return f"selected error {worst.oob_error} > rejected {best_rejected.oob_error}"
    return None


@pytest.fixture(autouse=True)
def _audit_selection(monkeypatch):
    """Every in-process fit in the suite gets its selection checked."""
    original = ensemble_mod._select

    def checked(models, n_selected):
        chosen = original(models, n_selected)
        SELECTION_CHECKS["fits"] += 1
        msg = selection_violation(list(models), chosen)
        if msg:
            SELECTION_CHECKS["violations"].append(msg)
        assert msg is None, msg
        return chosen

    monkeypatch.setattr(ensemble_mod, "_select", checked)
    yield


def make_blobs(n=60, p=4, shift=1.5, seed=0, name="blobs"):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    X = rng.normal(size=(n, p)) + shift * y[:, None] * (np.arange(p) < 2)
    return Dataset(X, y, id=name)


@pytest.fixture
def blobs():
    return make_blobs()


# acceptance criterion bookkeeping -------------------------------------------

_CRITERIA = defaultdict(list)
_TITLES = {}
_NOTES = defaultdict(list)


def note(criterion: int, text: str):
    """Attach a measured value to a criterion's summary line."""
    _NOTES[criterion].append(text)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    crit = getattr(report, "_criterion", None)
    if crit is not None:
        _CRITERIA[crit].append((report.nodeid.split("::")[-1], report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep._criterion = m.args[0]
        _TITLES[m.args[0]] = m.args[1]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        results = _CRITERIA[num]
        ok = all(o == "passed" for _, o in results)
        failed = [name for name, o in results if o != "passed"]
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {_TITLES[num]}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        tr.write_line(line)
        for text in _NOTES.get(num, ()):
            tr.write_line(f"    {text}")
    tr.write_line(f"selection audited on {SELECTION_CHECKS['fits']} fits, "
                  f"{len(SELECTION_CHECKS['violations'])} violations")
