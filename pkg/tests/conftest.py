import collections

import pytest

CRITERIA = {
    1: "analytic g-factor of the Voss box",
    2: "mobility from conductivity",
    3: "noise coefficient eta and CGS prefactor",
    4: "end-to-end predict on voss1981_gold",
    5: "numeric g-factor (Voss box vs slab formula, sphere closed forms)",
    6: "Fourier identity oracles",
    7: "odd-spectrum correlation",
    8: "total-power convergence suite",
    9: "null and parity properties",
    10: "validity checker and Bose check",
}

_results = collections.defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _results[marker.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        runs = _results.get(n)
        if not runs:
            continue
        ok = all(p for _, p in runs)
        failed = [name for name, p in runs if not p]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {CRITERIA[n]}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        terminalreporter.write_line(line)
