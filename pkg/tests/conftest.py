import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the end-of-run summary."""
    entry = {"name": request.node.name, "detail": ""}

    def note(name: str, detail: str = ""):
        entry["name"], entry["detail"] = name, detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    _CRITERIA.append((entry["name"], passed, entry["detail"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(_CRITERIA):
        line = f"{'PASS' if passed else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_lab(rng, h, w):
    lab = np.empty((h, w, 3))
    lab[..., 0] = rng.uniform(0, 100, (h, w))
    lab[..., 1:] = rng.uniform(-60, 60, (h, w, 2))
    return lab


def blocky_rgb(rng, h, w, cells=6):
    """Piecewise-constant random image plus mild noise, closer to real content than white noise."""
    ch, cw = -(-h // cells), -(-w // cells)
    base = rng.integers(0, 256, (cells, cells, 3))
    img = np.repeat(np.repeat(base, ch, axis=0), cw, axis=1)[:h, :w]
    img = img + rng.normal(0, 6, img.shape)
    return np.clip(np.round(img), 0, 255).astype(np.uint8)
