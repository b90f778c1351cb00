#!/usr/bin/env python3
"""Verify all three counterexample families across a parameter grid and
print one line per claim. Exits nonzero if anything fails."""

import sys
from fractions import Fraction

import shortsight as ss


def main() -> int:
    failures = 0
    grid = []
    for h in range(1, 9):
        grid.append((1, h, None))
        grid.append((3, h, None))
        for m in (Fraction(h + 2), Fraction(10 * (h + 2))):
            grid.append((2, h, m))

    for prop, h, m in grid:
        report = ss.verify_proposition(prop, h, m)
        tag = f"prop {prop} family={report.family} H={h}" + (f" M={m}" if m else "")
        print(f"== {tag}: {'PASS' if report.passed else 'FAIL'}")
        for check in report.checks:
            mark = "ok " if check.passed else "FAIL"
            print(f"   [{mark}] {check.description}: expected {check.expected}, got {check.computed}")
            failures += 0 if check.passed else 1
    print(f"\n{failures} failing checks")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
