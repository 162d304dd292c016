#!/usr/bin/env python3
"""Smoke test for the covobs_py extension module.

Builds nothing itself: expects `cargo build -p covobs-py` (or --release) to
have produced the cdylib, stages it under an importable name, and runs a few
end-to-end checks.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def stage_module() -> Path:
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("libcovobs_py.so", "covobs_py.so", "libcovobs_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p covobs-py")
    stage = Path(tempfile.mkdtemp(prefix="covobs-py-"))
    shutil.copy2(built, stage / "covobs_py.so")
    return stage


sys.path.insert(0, str(stage_module()))
import covobs_py as co  # noqa: E402

checks = 0


def check(label: str, ok: bool, detail: str = "") -> None:
    global checks
    checks += 1
    print(f"  {label}: {'ok' if ok else 'FAIL'} {detail}")
    if not ok:
        sys.exit(1)


print("covobs_py smoke test")

grid = co.Grid(4096, 40.0)
check("grid", grid.n == 4096 and abs(grid.dx - 40.0 / 4096) < 1e-15, repr(grid))

state = co.State.gaussian(grid, 0.7, 1.2)
check("state norm", abs(state.norm() - 1.0) <= 1e-12, f"norm={state.norm():.15f}")

smear = co.Measure.gaussian(0.0, 0.5, grid)
out = co.outcome(smear, state)
check(
    "outcome moments",
    abs(out.mean() - 0.7) <= 1e-9 and abs(out.variance() - (1.44 + 0.25)) <= 1e-6,
    f"mean={out.mean():.9f} var={out.variance():.9f}",
)

shifted = smear.translated(64 * grid.dx)
check(
    "translation acts on the mean",
    abs(shifted.mean() - smear.mean() - 64 * grid.dx) <= 1e-9,
    f"shift={shifted.mean() - smear.mean():.9f}",
)

res = co.resolution(co.Measure.gaussian(0.0, 1.0, grid), 1e-2)
check(
    "gaussian resolution",
    abs(res["gamma"] - 1.3490) <= 2 * res["tolerance"],
    f"gamma={res['gamma']:.6f} tol={res['tolerance']:.6f}",
)

vacuum = co.State.gaussian(grid, 0.0, math.sqrt(0.5))
prod = co.product_bound(vacuum, 2e-3)
check(
    "resolution product bound",
    prod["pass"] and prod["product"] >= prod["bound"],
    f"product={prod['product']:.6f} bound={prod['bound']:.6f}",
)

verdict = co.distinction(co.Measure.gaussian(0.0, 1.0, grid), co.Measure.band_limited(1.0, grid))
check("distinction order", verdict["relation"] == "RightLessEq", verdict["relation"])

bat = co.battery(smear, axis="position", trials=5, seed=3)
check("covariance battery", bat["pass"], f"max_deviation={bat['max_deviation']:.3e}")

mixture = co.State.mixture([(0.6, vacuum), (0.4, co.State.hermite(grid, 1, 0.5, 1.0))])
mixed_prod = co.product_bound(mixture, 2e-3)
check(
    "mixed-state product bound",
    mixed_prod["pass"],
    f"product={mixed_prod['product']:.6f}",
)

print(f"all {checks} checks passed")
