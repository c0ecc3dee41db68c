"""Jump operators, graininess and the exponential on a mixed time scale."""

import math

from tsvolterra import Interval, Point, TimeScale, ts_exp

ts = TimeScale([Interval(0, 1), Point(2), Point(3)])

for t in (0.5, 1.0, 2.0, 3.0):
    print(f"t={t}: sigma={ts.sigma(t)}, rho={ts.rho(t)}, mu={ts.mu(t)}, class={ts.classify(t)}")

# One unit of continuous growth, then two unit jumps: e^5 * 6 * 6
value = ts_exp(ts, 5, 3, 0)
print(f"e_5(3, 0) = {value:.6f}   (36 e^5 = {36 * math.exp(5):.6f})")

z = TimeScale.integers(0, 10)
print("on the integers e_5(n, 0):", [ts_exp(z, 5, n, 0) for n in range(5)])
