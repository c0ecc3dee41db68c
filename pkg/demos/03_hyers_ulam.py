"""Perturb the exact solution and certify the deviation against C * eps."""

from tsvolterra import TimeScale, VolterraProblem, certify_hyers_ulam, defect

problem = VolterraProblem(TimeScale.interval(0, 1), "1", "5", h_max=1e-3)
phi = problem.march.phi
psi = phi + 0.001 * (1 + phi.t)

eps, _ = defect(problem, psi)
cert = certify_hyers_ulam(problem, psi)
print(f"defect eps       = {eps:.6e}")
print(f"constant C       = {cert.C:.4f}")
print(f"bound C*eps      = {cert.C * eps:.6f}")
print(f"max deviation    = {cert.deviations.sup():.6f}")
print(f"verdict          = {cert.verdict} (min margin {cert.min_margin:.4f})")
