"""Weighted certificate with omega(t) = e^(2t) and a small kernel."""

from tsvolterra import TimeScale, VolterraProblem, certify_rassias, check_rassias_condition

problem = VolterraProblem(TimeScale.interval(0, 1), "1", "0.3", h_max=1e-3)
omega = problem.sample("exp(2*t)")
P = check_rassias_condition(problem, omega)
print(f"P* = {P:.6f}, so C = 1 + M/(1-P) = {1 + problem.M / (1 - P):.6f}")

for scale in (0.2, 0.5):
    psi = problem.march.phi + scale * omega
    cert = certify_rassias(problem, psi, omega)
    first = cert.iterate_excess[0]
    print(f"psi = phi + {scale} omega: {cert.verdict}, "
          f"iterate estimate holds: {cert.iterate_estimate_holds} (first sweep excess {first:+.3e})")
