"""Calibration dashboard: runs the scripted suite and prints, per scenario,
the dominant-window classification, assertion results, variant metric
orderings, and circuit-vs-correlation agreement. Used to pick and freeze the
default circuit magnitudes and thresholds."""

from __future__ import annotations

import sys
import time
from collections import Counter

sys.path.insert(0, "src")

from ctd.harness import compare_variants
from ctd.suite import scripted_suite


def main() -> None:
    t0 = time.perf_counter()
    suite = scripted_suite()
    agree_total = 0
    window_total = 0
    failures = []
    rows = []
    for s in suite:
        comparison = compare_variants(s)
        a = comparison.ddm
        dom = a.dominant
        ok_depth = dom.depth.value == s.expect["depth"]
        ok_dir = dom.direction.value == s.expect["direction"]
        agree = sum(r.depth is c for r, c in zip(a.readouts, a.correlation_depths))
        agree_total += agree
        window_total += len(a.readouts)
        md, mw = comparison.metrics_ddm, comparison.metrics_weights
        ords = comparison.orderings
        checks = {
            "depth": ok_depth, "dir": ok_dir,
            "excl": a.assertions["pdd_exclusivity"],
            "seiz": a.assertions["seizure_damped"],
            **{f"fig8_{k}": v for k, v in ords.items()},
        }
        if not all(checks.values()):
            failures.append((s.name, {k: v for k, v in checks.items() if not v}))
        corr_counts = Counter(c.value for c in a.correlation_depths)
        rows.append(
            f"{s.name:18s} dom=({dom.direction.value[:5]:5s},{dom.depth.value}) "
            f"exp={s.expect['depth']} {'OK ' if ok_depth and ok_dir else 'BAD'} "
            f"agree={agree}/{len(a.readouts)} corr={dict(corr_counts)} "
            f"step D/W={md.max_step:.2f}/{mw.max_step:.2f} "
            f"tv={md.total_variation:.1f}/{mw.total_variation:.1f} "
            f"mean={md.mean_level:+.4f}/{mw.mean_level:+.4f}")
    for r in rows:
        print(r)
    print(f"\nagreement: {agree_total}/{window_total} "
          f"({100.0 * agree_total / window_total:.1f}%)")
    print(f"failures: {len(failures)}")
    for name, bad in failures:
        print(f"  {name}: {sorted(bad)}")
    print(f"elapsed: {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
