"""Run a small identity grid and show how each reading fares.

Every identity is tested under two readings: the one the library designates
and the literal one.  The literal readings fail, and every failure carries a
witness (basis element, sample point, both sides).
"""
from collections import Counter

from rpqverify.suite import run_suite

ledger = run_suite({"presets": ["js", "bm"], "deltas": ["2"],
                    "suites": ["p1", "witt", "delta1", "bell"], "ranges": {"nm": [-1, 1]}})

tally = Counter((c.family, c.reading, c.verdict) for c in ledger.cases)
for (family, reading, verdict), n in sorted(tally.items()):
    print("%-12s %-32s %-8s %d" % (family, reading, verdict, n))

s = ledger.summary()
print("\n%d cases, %d allowlisted failures, %d unexplained" % (
    len(ledger.cases), s["allowlisted"], s["unexplained"]))

first = next(c for c in ledger.cases if c.verdict == "FAIL")
print("\nexample witness for %s (%s):" % (first.family, first.reading))
for key, val in sorted(first.witness.items()):
    print("  %s: %s" % (key, val))
