#!/usr/bin/env python3
"""Smoke test for the lpma_py extension module.

Builds nothing by itself: compile the extension first with

    cargo build -p lpma-py            # or --release

then run

    python3 python/smoke_test.py

The script locates the compiled cdylib under target/, exposes it as the
importable module `lpma_py`, and exercises the main operations end to end
(panel loading, transforms, HP filter, Mallows weights, p-value
adjustments, and a full pipeline run on the bundled demo data).
"""

import json
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def import_extension():
    candidates = [
        ROOT / "target" / "release" / "liblpma_py.so",
        ROOT / "target" / "debug" / "liblpma_py.so",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("liblpma_py.so not found; run `cargo build -p lpma-py` first")
    newest = max(built, key=lambda p: p.stat().st_mtime)
    staging = pathlib.Path(tempfile.mkdtemp(prefix="lpma_py_"))
    shutil.copy2(newest, staging / "lpma_py.so")
    sys.path.insert(0, str(staging))
    import lpma_py

    return lpma_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    m = import_extension()

    # Transforms: 100*ln(1.02) against the frozen oracle value.
    growth = m.log_diff_100([100.0, 102.0, 101.0])
    assert growth[0] is None
    approx(growth[1], 1.9802627296179713, 1e-12)
    approx(growth[2], -0.985229644301163, 1e-12)

    # HP filter: a linear series is its own trend.
    series = [2.0 + 0.3 * t for t in range(40)]
    trend, cycle = m.hp_filter(series, 1600.0)
    assert max(abs(c) for c in cycle) < 1e-8
    assert all(abs(t - y) < 1e-6 for t, y in zip(trend, series))

    # Mallows weights: identical residual columns, smaller dim wins.
    residuals = [[math.sin(0.37 * t)] * 2 for t in range(50)]
    weights, value = m.mallows_weights(residuals, [20, 23], 0.8)
    approx(weights[0], 1.0, 1e-9)
    approx(weights[1], 0.0, 1e-9)
    assert value > 0

    # P-value adjustments against hand-computed oracles.
    assert m.adjust_pvalues([0.01, 0.02, 0.03], "bonferroni") == [0.03, 0.06, 0.09]
    holm = m.adjust_pvalues([0.01, 0.02, 0.03], "holm")
    for got, want in zip(holm, [0.03, 0.04, 0.04]):
        approx(got, want, 1e-12)
    by = m.adjust_pvalues([0.01, 0.02, 0.03], "benjamini_yekutieli")
    for got in by:
        approx(got, 0.055, 1e-12)
    approx(m.acceptance_proportion([0.05, 0.5, 0.2, 0.01], 0.1), 0.5)

    # Panel loading and regimes on the bundled demo data.
    schema = {
        "cpi": "log_diff_100",
        "rgdp": "log_diff_100",
        "reer": "log_diff_100",
        "unemp": "log_diff_100",
        "rr": "log_diff_100",
        "almp": "log_diff_100",
        "epl": "log_diff_100",
        "stir": "level",
    }
    panel = m.Panel.from_csv(str(ROOT / "data" / "demo_panel.csv"), schema)
    assert len(panel.countries) == 11
    assert len(panel.periods) == 104
    transformed = panel.apply_transforms()
    rows = transformed.summary()
    assert len(rows) == 11 * 8
    regimes = panel.regimes("stir")
    ind_q = [v for v in regimes["ind_q"] if v is not None]
    assert set(ind_q) <= {0.0, 1.0}

    # Full pipeline on a reduced configuration.
    out_dir = pathlib.Path(tempfile.mkdtemp(prefix="lpma_out_"))
    config = out_dir / "config.toml"
    config.write_text(
        f"""
[data]
panel = "{(ROOT / 'data' / 'demo_panel.csv').as_posix()}"
rate_column = "stir"

[series]
cpi = "log_diff_100"
rgdp = "log_diff_100"
reer = "log_diff_100"
unemp = "log_diff_100"
rr = "log_diff_100"
almp = "log_diff_100"
epl = "log_diff_100"
stir = "level"

[model]
outcomes = ["rgdp"]
policies = ["rr"]
controls = ["cpi", "rgdp", "reer", "unemp", "d_i_q"]
horizons = [1, 2]
"""
    )
    result = m.run(str(config), str(out_dir / "bundle"))
    assert "irf.csv" in result["files"]
    irf_text = (out_dir / "bundle" / "irf.csv").read_text().splitlines()
    assert irf_text[0] == "outcome,policy,model,horizon,regime,value,se,se_kind"
    run_meta = json.loads((out_dir / "bundle" / "run.json").read_text())
    assert run_meta["schema_version"] == "1"

    print("smoke test OK")


if __name__ == "__main__":
    main()
