#!/usr/bin/env python3
"""Smoke test for the scalelaw_py extension module.

Builds are located under target/ (release preferred), so run either of

    cargo build -p scalelaw-py --release
    cargo build -p scalelaw-py

first, then `python3 python/smoke_test.py`. With a maturin-installed
wheel the module is importable directly and the locator is skipped.
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]


def import_module():
    try:
        import scalelaw_py  # noqa: F401  (wheel already installed)

        return scalelaw_py
    except ImportError:
        pass

    names = ("libscalelaw_py.so", "scalelaw_py.so", "libscalelaw_py.dylib", "scalelaw_py.pyd")
    for profile in ("release", "debug"):
        for name in names:
            built = REPO_ROOT / "target" / profile / name
            if built.exists():
                staging = Path(tempfile.mkdtemp(prefix="scalelaw_py_"))
                suffix = ".pyd" if built.suffix == ".pyd" else ".so"
                shutil.copy2(built, staging / f"scalelaw_py{suffix}")
                sys.path.insert(0, str(staging))
                import scalelaw_py

                return scalelaw_py
    sys.exit("scalelaw_py is not built; run: cargo build -p scalelaw-py --release")


sl = import_module()

CHECKS = []


def check(name):
    def register(fn):
        CHECKS.append((name, fn))
        return fn

    return register


@check("normalization: T(0) == 1")
def _():
    assert sl.execution_time(0.7, 3.0, 0.0) == 1.0


@check("figure-2 marker: T(1/3) = 0.5 at S=0.2, R=10")
def _():
    assert math.isclose(sl.execution_time(0.2, 10.0, 1.0 / 3.0), 0.5, rel_tol=0, abs_tol=1e-12)


@check("optimal allocation: interior marker values")
def _():
    opt = sl.optimal_allocation(0.2, 10.0)
    assert opt.regime == "interior" and opt.method == "closed_form"
    assert math.isclose(opt.x_star, 1.0 / 3.0, abs_tol=1e-9)
    assert math.isclose(opt.time, 0.5, abs_tol=1e-9)


@check("optimal allocation: collapse above the threshold")
def _():
    opt = sl.optimal_allocation(0.95, 10.0)
    assert opt.regime == "collapse" and opt.x_star == 0.0 and opt.time == 1.0


@check("thresholds: S_c(10) = 0.9 and R_c(0.9) = 10")
def _():
    assert sl.collapse_threshold(10.0) == 0.9
    assert math.isclose(sl.critical_ratio(0.9), 10.0, rel_tol=1e-12)
    assert math.isclose(sl.mem_collapse_threshold(10.0, 0.7), 0.9, rel_tol=0)


@check("degenerate input raises ValueError")
def _():
    try:
        sl.optimal_allocation(0.0, 10.0)
    except ValueError as err:
        assert "scalable_fraction" in str(err)
    else:
        raise AssertionError("expected ValueError for S = 0")


@check("friction shrinks the optimum below 1/3")
def _():
    previous = 1.0 / 3.0
    for gamma in (0.01, 0.1, 1.0):
        opt = sl.optimal_allocation_mem(0.2, 10.0, gamma)
        assert opt.method == "numeric" and opt.regime == "interior"
        assert opt.x_star < 1.0 / 3.0 and opt.x_star <= previous
        previous = opt.x_star
    assert math.isclose(sl.optimal_allocation_mem(0.2, 10.0, 0.1).x_star, 0.30796949950258, abs_tol=1e-7)


@check("classical laws: Amdahl and Gustafson spot values")
def _():
    assert math.isclose(sl.amdahl_speedup(0.99, 64.0), 39.263803680981595, rel_tol=1e-12)
    assert math.isclose(sl.gustafson_speedup(0.9, 64.0), 57.7, rel_tol=1e-12)
    assert math.isclose(sl.amdahl_time(0.9, 64.0) * sl.amdahl_speedup(0.9, 64.0), 1.0, rel_tol=1e-12)


@check("time_curves columns with and without friction")
def _():
    table = sl.time_curves(10.0, [0.2, 0.95], 0.0, 0.65, 14)
    assert list(table) == ["abscissa", "S=0.2", "S=0.95"]
    assert table["abscissa"][0] == 0.0 and table["S=0.2"][0] == 1.0
    frictionless = sl.time_curves(10.0, [0.2], 0.0, 0.65, 14, gamma=0.0)
    assert frictionless["S=0.2"] == table["S=0.2"]
    rough = sl.time_curves(10.0, [0.2], 0.0, 0.65, 14, gamma=0.5)
    assert all(a >= b for a, b in zip(rough["S=0.2"][1:], table["S=0.2"][1:]))


@check("locus, boundary, and regime grids")
def _():
    locus = sl.optimal_locus(10.0, 0.01, 0.9, 90)
    assert locus["x_star"] == sorted(locus["x_star"], reverse=True)
    assert locus["x_star"][-1] == 0.0 and locus["time"][-1] == 1.0

    boundary = sl.phase_boundary(0.0, 0.9, 10)
    assert boundary["r_c"][0] == 1.0 and math.isclose(boundary["r_c"][-1], 10.0, rel_tol=1e-12)

    cells = sl.regime_grid(0.5, 0.95, 2, 2.0, 10.0, 2)
    assert cells["interior"] == [0.0, 1.0, 0.0, 0.0]


@check("scenario engine: JSON and CSV emission")
def _():
    document = json.dumps(
        {
            "name": "smoke",
            "analyses": [
                {"kind": "optimize", "scalable_fraction": 0.2, "efficiency_ratio": 10},
                {"kind": "phase_boundary", "s_grid": {"lo": 0, "hi": 0.9, "count": 10}},
            ],
        }
    )
    results = json.loads(sl.run_scenario(document))
    assert results[0]["results"]["x_star"] == 0.333333333
    assert results[0]["results"]["regime"] == "interior"
    assert results[1]["results"]["rows"][-1] == [0.9, 10]

    csvs = sl.scenario_csv(document)
    assert csvs[0].splitlines()[0] == "method,regime,time,x_star"
    assert csvs[1].endswith("0.9,10\n")


@check("validation errors name the offending field")
def _():
    try:
        sl.run_scenario('{"name":"t","analyses":[{"kind":"optimize","scalable_fraction":1.2,"efficiency_ratio":10}]}')
    except ValueError as err:
        assert "scalable_fraction 1.2 outside [0, 1]" in str(err)
    else:
        raise AssertionError("expected ValueError for S = 1.2")


def main():
    print(f"scalelaw_py {sl.__version__} (EPS_X = {sl.EPS_X})")
    failures = 0
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as err:  # noqa: BLE001
            failures += 1
            print(f"not ok - {name}: {err!r}")
        else:
            print(f"ok - {name}")
    if failures:
        sys.exit(f"{failures} of {len(CHECKS)} checks failed")
    print(f"all {len(CHECKS)} checks passed")


if __name__ == "__main__":
    main()
