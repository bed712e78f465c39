#!/usr/bin/env python3
"""Run the representative suites and print one summary line per check.

Usage: python3 scripts/run_flagship.py [samples] [seed]
"""

import sys

sys.path.insert(0, "src")

from subgeo import runner
from subgeo.config import parse_config

SUITES = (
    "hyperbolic:3",
    "gaussian:alpha=1",
    "euclidean:2",
    "tangent_bundle_of:hyperbolic:2",
)


def main():
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 64
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    worst = 0
    for name in SUITES:
        cfg = parse_config(
            {"builtin": name, "sampling": {"count": count, "seed": seed}},
            source=f"<{name}>",
        )
        report = runner.run_suite(cfg)
        print(f"== {name} (samples={count}, seed={seed}) ==")
        for c in report["checks"]:
            print(f"  {c['name']:<24s} {c['status']:<12s} "
                  f"max={c['max_residual']:.3e} tol={c['tolerance']:g}")
        s = report["summary"]
        print(f"  -> {s['pass']} pass, {s['fail']} fail, "
              f"{s['inconclusive']} inconclusive, "
              f"incident rate {s['incident_rate']:.3f}")
        worst = max(worst, runner.exit_code(report))
    return worst


if __name__ == "__main__":
    sys.exit(main())
