"""Solve x(t) = 1 + int_0^t 5 x(s) ds on [0, 1] both ways and watch Picard converge."""

import math

from tsvolterra import TimeScale, VolterraProblem, march_solve, picard_solve

problem = VolterraProblem(TimeScale.interval(0, 1), "1", "5", h_max=1e-3)
march = march_solve(problem)
picard, report = picard_solve(problem)

print(f"grid points: {problem.n}, M = {problem.M}")
print(f"march  x(1) = {march.phi(1.0):.8f}")
print(f"picard x(1) = {picard.phi(1.0):.8f}")
print(f"exact  e^5  = {math.exp(5):.8f}")

print("\nsweep   sup gap        factorial bound")
for i, (g, b) in enumerate(zip(report.sup_gaps, report.bound_gaps), start=1):
    if i <= 8 or i == report.iterates_kept:
        print(f"{i:>5}   {g:<13.6e}  {b:.6e}")
print(f"quadrature allowance: {problem.allowance:.3e}")

# On the integers the same equation is a recurrence with x(n) = 6^n
z = VolterraProblem(TimeScale.integers(0, 5), "1", "5")
print("\ninteger scale:", march_solve(z).phi.values.tolist())
