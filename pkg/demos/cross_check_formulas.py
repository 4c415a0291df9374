"""The complex bitension formula against the coordinate one on every conformal fixture."""

from __future__ import annotations

from biharmonic_lab.catalog import list_entries
from biharmonic_lab.harness import fixture_cross_check

for entry in list_entries():
    fix = entry.build()
    if not fix.conformal:
        continue
    cc = fixture_cross_check(fix)
    print(f"{entry.id:24s} rel gap {cc.max_rel_gap:.1e}   max |bitension| {cc.max_bitension:.3g}")
