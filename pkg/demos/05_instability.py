"""A fixed defect with an unbounded deviation: psi = 0 against x' = 5x style growth."""

from tsvolterra import TimeScale, instability_probe

for name, ts in (("reals", TimeScale.interval(0, 4)), ("integers", TimeScale.integers(0, 4))):
    rec = instability_probe("1", "5", ts, [1, 2, 4], h_max=1e-3)
    print(name)
    for T, d, lb, eps in zip(rec.horizons, rec.sup_deviation, rec.lower_bound, rec.defects):
        print(f"  T={T:<4} deviation={d:<16.6g} lower bound={lb:<6g} defect={eps:g}")
