"""Defects of approximate solutions and Hyers-Ulam(-Rassias) certificates.

A certificate compares the deviation ``|phi(t) - psi(t)|`` between an
approximate solution ``psi`` and the exact solution ``phi`` reached by
Picard iteration from ``psi`` with ``C * eps`` (Hyers-Ulam) or
``C * omega(t)`` (Hyers-Ulam-Rassias).  Sup norms are grid maxima, and every
verdict tolerates the problem's quadrature allowance.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .calculus import GridExponential, GridFunction, cumulative_integral, fmt
from .errors import ConditionFailed, GridMismatch, HypothesisViolated, InputError, NonPositiveOmega
from .expr import Expr
from .timescale import TimeScale
from .volterra import DEFAULT_H_MAX, DEFAULT_TOL, IterationReport, VolterraProblem, picard_solve

PsiSpec = Union[GridFunction, str, Expr, Callable[[VolterraProblem], GridFunction]]


@dataclass
class StabilityCertificate:
    mode: str
    C: float
    deviations: GridFunction
    bound: GridFunction
    margins: GridFunction
    verdict: str
    worst_point: float
    slack: float
    report: IterationReport
    epsilon: float | None = None
    omega: GridFunction | None = None
    P: float | None = None
    M: float = 0.0
    # Rassias mode: per sweep, max over the grid of gap_n(t) - M P^(n-1) omega(t)
    iterate_excess: list = field(default_factory=list)
    iterate_estimate_holds: bool | None = None
    within_omega_at: int | None = None

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins.values))

    def to_dict(self) -> dict:
        out = {"mode": self.mode}
        if self.mode == "hyers_ulam":
            out["epsilon"] = self.epsilon
        else:
            out["P"] = self.P
        out.update(
            C=self.C,
            M=self.M,
            verdict=self.verdict,
            worst_point=self.worst_point,
            min_margin=self.min_margin,
            max_deviation=self.deviations.sup(),
            slack=self.slack,
            iterations=self.report.iterates_kept,
        )
        if self.mode == "rassias":
            out["iterate_estimate_holds"] = self.iterate_estimate_holds
            out["iterate_excess"] = list(self.iterate_excess)
        return out

    def margins_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "deviation", "bound", "margin"])
        for row in zip(self.deviations.t, self.deviations.values, self.bound.values, self.margins.values):
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()


def defect(problem: VolterraProblem, psi: GridFunction) -> tuple[float, GridFunction]:
    """Sup and pointwise ``|psi(t) - f(t) - int_a^t k(t,s) psi(s) Ds|`` on the grid."""
    if not isinstance(psi, GridFunction) or psi.grid != problem.grid:
        raise GridMismatch("psi is not sampled on the problem grid")
    r = problem.residual(psi.values)
    return float(np.max(r)), GridFunction(problem.grid, r)


def _finish(mode, problem, psi, phi, bound_values, C, report, **extra):
    dev = np.abs(phi.values - psi.values)
    margins = bound_values - dev
    slack = problem.allowance
    worst = int(np.argmin(margins))
    verdict = "certified" if margins[worst] >= -slack else "violated"
    grid = problem.grid
    return StabilityCertificate(
        mode=mode,
        C=C,
        deviations=GridFunction(grid, dev),
        bound=GridFunction(grid, bound_values),
        margins=GridFunction(grid, margins),
        verdict=verdict,
        worst_point=float(grid.points[worst]),
        slack=slack,
        report=report,
        M=problem.M,
        **extra,
    )


def hyers_ulam_constant(M: float, length: float) -> float:
    return 1.0 + math.exp(M * length)


def certify_hyers_ulam(problem: VolterraProblem, psi: GridFunction, tol: float = DEFAULT_TOL, max_iter=None):
    """Check ``|phi - psi| <= (1 + e^{M(b-a)}) eps`` with ``eps`` the defect of ``psi``."""
    eps, _ = defect(problem, psi)
    sol, report = picard_solve(problem, psi, tol=tol, max_iter=max_iter)
    C = hyers_ulam_constant(problem.M, problem.b - problem.a)
    bound = np.full(problem.n, C * eps)
    return _finish("hyers_ulam", problem, psi, sol.phi, bound, C, report, epsilon=eps)


def check_rassias_condition(problem: VolterraProblem, omega: GridFunction) -> float:
    """Smallest ``P`` with ``int_a^t omega Ds <= P omega(t)`` at every grid point."""
    if omega.grid != problem.grid:
        raise GridMismatch("omega is not sampled on the problem grid")
    if np.any(omega.values <= 0):
        raise NonPositiveOmega("omega must be positive at every grid point")
    return float(np.max(cumulative_integral(omega) / omega.values))


def rassias_constant(M: float, P: float) -> float:
    return 1.0 + M / (1.0 - P)


def certify_rassias(
    problem: VolterraProblem,
    psi: GridFunction,
    omega: GridFunction,
    tol: float = DEFAULT_TOL,
    max_iter=None,
):
    """Check ``|phi - psi| <= (1 + M/(1-P)) omega`` for a ``psi`` with residual below ``omega``.

    Also records, per Picard sweep ``n``, how far ``|psi_n - psi_{n-1}|``
    exceeds ``M P^(n-1) omega`` anywhere on the grid, and the first sweep
    whose sup gap drops below ``min omega``.
    """
    if psi.grid != problem.grid:
        raise GridMismatch("psi is not sampled on the problem grid")
    P = check_rassias_condition(problem, omega)
    _, res = defect(problem, psi)
    over = res.values - omega.values
    if np.any(over > 0):
        j = int(np.argmax(over))
        raise HypothesisViolated(
            f"residual {res.values[j]:.6g} exceeds omega {omega.values[j]:.6g} at t={problem.grid.points[j]!r}"
        )
    if P >= 1:
        raise ConditionFailed(f"int_a^t omega <= P omega(t) needs P < 1, best P on the grid is {P:.6g}")

    M = problem.M
    excess = []
    within = []
    omin = float(np.min(omega.values))

    def watch(n, gap):
        excess.append(float(np.max(gap - M * P ** (n - 1) * omega.values)))
        if not within and float(np.max(gap)) <= omin:
            within.append(n)

    sol, report = picard_solve(problem, psi, tol=tol, max_iter=max_iter, callback=watch)
    C = rassias_constant(M, P)
    holds = all(e <= problem.allowance for e in excess)
    return _finish(
        "rassias", problem, psi, sol.phi, C * omega.values, C, report,
        omega=omega, P=P, iterate_excess=excess, iterate_estimate_holds=holds,
        within_omega_at=within[0] if within else None,
    )


def _resolve(spec: PsiSpec, problem: VolterraProblem) -> GridFunction:
    if isinstance(spec, GridFunction):
        return spec
    if callable(spec):
        return spec(problem)
    return problem.sample(spec)


@dataclass
class HorizonCertificate:
    horizon: float
    certificate: StabilityCertificate


def certify_rassias_horizons(
    problem: VolterraProblem,
    psi: PsiSpec,
    omega: PsiSpec,
    horizons: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> tuple[list, float]:
    """Re-run :func:`certify_rassias` on ``[a, T]`` for growing ``T``.

    ``psi`` and ``omega`` are expressions or callables producing grid
    functions for each truncated problem.  Returns the per-horizon
    certificates and the full-domain constant ``1 + M/(1-P)``, which no
    truncated constant may exceed.
    """
    _check_increasing(horizons)
    full_C = rassias_constant(problem.M, check_rassias_condition(problem, _resolve(omega, problem)))
    out = []
    for T in horizons:
        sub = problem.truncated(T)
        cert = certify_rassias(sub, _resolve(psi, sub), _resolve(omega, sub), tol=tol)
        if cert.C > full_C * (1 + 1e-12):
            raise AssertionError(f"constant on [a, {T}] is {cert.C}, above the full-domain {full_C}")
        out.append(HorizonCertificate(float(T), cert))
    return out, full_C


@dataclass
class PairCheck:
    eps1: float
    eps2: float
    bound: GridFunction
    difference: GridFunction
    slack: GridFunction
    verdict: str
    allowance: float

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


def pair_difference_check(problem: VolterraProblem, psi1: GridFunction, psi2: GridFunction) -> PairCheck:
    """Compare ``|psi1 - psi2|`` with ``(eps1 + eps2) e_M(t, a)``."""
    eps1, _ = defect(problem, psi1)
    eps2, _ = defect(problem, psi2)
    growth = GridExponential(problem.grid, problem.M).from_start(0)
    bound = (eps1 + eps2) * growth
    diff = np.abs(psi1.values - psi2.values)
    slack = bound - diff
    allowance = problem.allowance
    verdict = "certified" if np.min(slack) >= -allowance else "violated"
    g = problem.grid
    return PairCheck(eps1, eps2, GridFunction(g, bound), GridFunction(g, diff), GridFunction(g, slack), verdict, allowance)


@dataclass
class GrowthRecord:
    horizons: list
    sup_deviation: list
    lower_bound: list
    defects: list
    rate: float

    @property
    def bounded_below(self) -> bool:
        """Every deviation reaches its Bernoulli lower bound."""
        return all(d >= lb - 1e-9 for d, lb in zip(self.sup_deviation, self.lower_bound))

    @property
    def increasing(self) -> bool:
        return all(x < y for x, y in zip(self.sup_deviation, self.sup_deviation[1:]))

    def to_dict(self) -> dict:
        return {
            "horizons": list(self.horizons),
            "sup_deviation": list(self.sup_deviation),
            "lower_bound": list(self.lower_bound),
            "defects": list(self.defects),
            "rate": self.rate,
        }


def _check_increasing(horizons):
    if len(horizons) == 0:
        raise InputError("at least one horizon is required")
    if any(not x < y for x, y in zip(horizons, horizons[1:])):
        raise InputError("horizons must be strictly increasing")


def instability_probe(
    f,
    kernel,
    ts: TimeScale,
    horizons: Sequence[float],
    psi: PsiSpec = "0",
    h_max: float = DEFAULT_H_MAX,
    rate: float | None = None,
) -> GrowthRecord:
    """Deviation of ``psi`` from the exact solution on ``[a, T]`` for growing ``T``.

    The lower bound per horizon is ``1 + rate (T - a)``, the Bernoulli bound
    for ``e_rate(T, a)``; it bounds the solution from below when ``f = 1`` and
    ``k = rate`` (``rate`` defaults to the kernel bound on each horizon).  The
    defect of ``psi`` stays fixed while the deviation grows, so no single
    Hyers-Ulam constant can cover every horizon.
    """
    _check_increasing(horizons)
    a = ts.a
    record = GrowthRecord([], [], [], [], rate if rate is not None else math.nan)
    for T in horizons:
        if T < a:
            raise InputError(f"horizon {T} lies before the start of the time scale {a}")
        prob = VolterraProblem(ts.truncate(a, T), f, kernel, h_max=h_max)
        p = prob.M if rate is None else rate
        psi_T = _resolve(psi, prob)
        phi = prob.march.phi
        record.horizons.append(float(T))
        record.sup_deviation.append(float(np.max(np.abs(phi.values - psi_T.values))))
        record.lower_bound.append(1.0 + p * (prob.b - a))
        record.defects.append(float(np.max(prob.residual(psi_T.values))))
        if rate is None:
            record.rate = p
    return record
