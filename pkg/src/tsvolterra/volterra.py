"""Linear Volterra equations ``x(t) = f(t) + int_a^t k(t, s) x(s) Ds`` on a time scale.

Two solvers share one discretization (trapezoid inside intervals, exact
``mu``-weighted sums across gaps):

* :func:`picard_solve` runs successive approximation from a seed function
  and keeps the sup-norm gap of every sweep next to the factorial bound
  ``eps (M (b-a))^(i-1) / (i-1)!``.
* :func:`march_solve` walks forward through the grid; the diagonal trapezoid
  term is solved implicitly, so on purely discrete scales it is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .calculus import GridFunction, QuadratureWeights, sample_expr
from .errors import (
    GridMismatch,
    InputError,
    NoConvergence,
    NotRightScattered,
    SingularDiagonal,
    UnboundVariable,
)
from .expr import Expr, as_expr, evaluate, variables
from .timescale import Grid, TimeScale, build_grid

DEFAULT_TOL = 1e-10
DEFAULT_H_MAX = 1e-3
# dense operator cached up to this many grid points (~72 MB)
DENSE_LIMIT = 3000
_BLOCK = 256


class VolterraProblem:
    """Time scale, grid, forcing ``f(t)`` and kernel ``k(t, s)``.

    ``M`` is the largest ``|k(t_i, t_j)|`` over grid pairs with ``t_j <= t_i``.
    Instances are treated as immutable; derived arrays are cached lazily.
    """

    def __init__(self, ts: TimeScale, f, kernel, h_max: float | None = DEFAULT_H_MAX, grid: Grid | None = None):
        self.ts = ts
        self.f: Expr = as_expr(f)
        self.kernel: Expr = as_expr(kernel)
        if "s" in variables(self.f):
            raise UnboundVariable("s")
        if grid is None:
            if h_max is None:
                raise InputError("either h_max or grid is required")
            grid = build_grid(ts, h_max)
        self.h_max = h_max
        self.grid = grid
        pts = grid.points
        self.f_values = evaluate(self.f, pts) * np.ones_like(pts)
        q = QuadratureWeights.for_grid(grid)
        n = len(grid)
        # node weights: left contribution of pair j lands on node j, right on node j+1
        self._wl = np.concatenate([q.left, [0.0]])
        self._wr = np.concatenate([[0.0], q.right])
        self.M = self._kernel_bound()

    def __repr__(self):
        return f"VolterraProblem(n={len(self.grid)}, a={self.a}, b={self.b}, M={self.M:.6g})"

    @property
    def a(self) -> float:
        return self.grid.a

    @property
    def b(self) -> float:
        return self.grid.b

    @property
    def n(self) -> int:
        return len(self.grid)

    # kernel and operator -----------------------------------------------

    def kernel_block(self, i0: int, i1: int) -> np.ndarray:
        """Rows ``i0:i1`` of ``k(t_i, t_j)``, zero where ``j > i``."""
        pts = self.grid.points
        rows = np.arange(i0, i1)[:, None]
        cols = np.arange(self.n)[None, :]
        ii, jj = np.nonzero(cols <= rows)
        out = np.zeros((i1 - i0, self.n))
        if ii.size:
            out[ii, jj] = evaluate(self.kernel, pts[ii + i0], pts[jj]) * np.ones(ii.size)
        return out

    def weight_block(self, i0: int, i1: int) -> np.ndarray:
        """Rows ``i0:i1`` of the quadrature weights for ``int_a^{t_i}``."""
        rows = np.arange(i0, i1)[:, None]
        cols = np.arange(self.n)[None, :]
        return np.where(cols < rows, self._wl, 0.0) + np.where(cols <= rows, self._wr, 0.0)

    def operator_block(self, i0: int, i1: int) -> np.ndarray:
        return self.weight_block(i0, i1) * self.kernel_block(i0, i1)

    def _blocks(self):
        for i0 in range(0, self.n, _BLOCK):
            yield i0, min(self.n, i0 + _BLOCK)

    def _kernel_bound(self) -> float:
        if self.n <= DENSE_LIMIT:
            return float(np.max(np.abs(self.kernel_matrix)))
        return max(float(np.max(np.abs(self.kernel_block(i0, i1)))) for i0, i1 in self._blocks())

    @cached_property
    def kernel_matrix(self) -> np.ndarray:
        return self.kernel_block(0, self.n)

    @cached_property
    def operator(self) -> np.ndarray:
        """Dense lower-triangular matrix ``A`` with ``(A x)_i ~ int_a^{t_i} k(t_i, s) x(s) Ds``."""
        return self.weight_block(0, self.n) * self.kernel_matrix

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Discrete ``int_a^{t_i} k(t_i, s) x(s) Ds`` for every ``i``."""
        if self.n <= DENSE_LIMIT:
            return self.operator @ x
        out = np.empty(self.n)
        for i0, i1 in self._blocks():
            out[i0:i1] = self.operator_block(i0, i1) @ x
        return out

    def residual(self, x) -> np.ndarray:
        """Pointwise ``|x(t) - f(t) - int_a^t k(t,s) x(s) Ds|``."""
        if isinstance(x, GridFunction):
            if x.grid != self.grid:
                raise GridMismatch("function is not sampled on the problem grid")
            x = x.values
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise GridMismatch(f"expected {self.n} values, got {x.shape}")
        return np.abs(x - self.f_values - self.apply(x))

    # derived problems ----------------------------------------------------

    def with_grid(self, grid: Grid) -> "VolterraProblem":
        return VolterraProblem(self.ts, self.f, self.kernel, h_max=self.h_max, grid=grid)

    def refined(self) -> "VolterraProblem":
        """Same problem on the grid with every interval step bisected."""
        h = None if self.h_max is None else self.h_max / 2
        return VolterraProblem(self.ts, self.f, self.kernel, h_max=h, grid=self.grid.refined())

    def truncated(self, horizon: float) -> "VolterraProblem":
        """Restriction to ``[a, horizon]`` (re-gridded with the same ``h_max``)."""
        if self.h_max is None:
            raise InputError("truncation needs a problem built from h_max")
        ts = self.ts.truncate(self.ts.a, horizon)
        return VolterraProblem(ts, self.f, self.kernel, h_max=self.h_max)

    def sample(self, e) -> GridFunction:
        return sample_expr(self.grid, e)

    def zeros(self) -> GridFunction:
        return GridFunction.constant(self.grid, 0.0)

    @cached_property
    def march(self) -> "Solution":
        return march_solve(self)

    @cached_property
    def allowance(self) -> float:
        return quadrature_allowance(self)

    def default_max_iter(self) -> int:
        return math.ceil(self.M * (self.b - self.a)) + 60


@dataclass
class IterationReport:
    iterates_kept: int = 0
    sup_gaps: list = field(default_factory=list)
    bound_gaps: list = field(default_factory=list)
    converged: bool = False
    final_gap: float = math.inf
    epsilon: float = 0.0

    def to_dict(self) -> dict:
        return {
            "iterates_kept": self.iterates_kept,
            "epsilon": self.epsilon,
            "sup_gaps": list(self.sup_gaps),
            "bound_gaps": list(self.bound_gaps),
            "converged": self.converged,
            "final_gap": self.final_gap,
        }


@dataclass
class Solution:
    phi: GridFunction
    residual: float
    method: str


def factorial_bound(eps: float, rate: float, i: int) -> float:
    """``eps * rate^(i-1) / (i-1)!`` without overflowing for large ``i``."""
    if i == 1 or eps == 0.0:
        return eps
    if rate == 0.0:
        return 0.0
    return eps * math.exp((i - 1) * math.log(rate) - math.lgamma(i))


def picard_solve(
    problem: VolterraProblem,
    psi0: GridFunction | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    callback=None,
) -> tuple[Solution, IterationReport]:
    """Successive approximation ``psi_n = f + int_a^t k psi_{n-1}`` from ``psi0``.

    ``callback(n, gap)`` receives the pointwise ``|psi_n - psi_{n-1}|`` after
    every sweep.  Raises :class:`NoConvergence` (carrying the report) when
    ``max_iter`` sweeps do not bring the sup gap under ``tol``.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    if max_iter is None:
        max_iter = problem.default_max_iter()
    if max_iter <= 0:
        raise InputError("max_iter must be positive")
    if psi0 is None:
        psi0 = problem.zeros()
    elif psi0.grid != problem.grid:
        raise GridMismatch("psi0 is not sampled on the problem grid")

    rate = problem.M * (problem.b - problem.a)
    prev = np.array(psi0.values)
    report = IterationReport()
    for n in range(1, max_iter + 1):
        cur = problem.f_values + problem.apply(prev)
        gap = np.abs(cur - prev)
        sup_gap = float(np.max(gap))
        if n == 1:
            report.epsilon = sup_gap
        report.sup_gaps.append(sup_gap)
        report.bound_gaps.append(factorial_bound(report.epsilon, rate, n))
        report.iterates_kept = n
        report.final_gap = sup_gap
        if callback is not None:
            callback(n, gap)
        prev = cur
        if sup_gap <= tol:
            report.converged = True
            break
    phi = GridFunction(problem.grid, prev)
    sol = Solution(phi, float(np.max(problem.residual(prev))), "picard")
    if not report.converged:
        raise NoConvergence(
            f"Picard iteration stalled at gap {report.final_gap:.3e} after {max_iter} sweeps",
            report=report,
            solution=sol,
        )
    return sol, report


def march_solve(problem: VolterraProblem) -> Solution:
    """Forward marching with the implicit trapezoid diagonal.

    ``x_i (1 - w_ii k(t_i, t_i)) = f(t_i) + sum_{j<i} w_ij k(t_i, t_j) x_j``.
    """
    n = problem.n
    x = np.zeros(n)
    for i0, i1 in problem._blocks():
        A = problem.operator_block(i0, i1)
        for r, i in enumerate(range(i0, i1)):
            row = A[r]
            diag = 1.0 - row[i]
            if abs(diag) < 1e-12:
                raise SingularDiagonal(
                    f"1 - (h/2) k(t,t) vanishes at t={problem.grid.points[i]!r}; refine the grid"
                )
            x[i] = (problem.f_values[i] + row[:i] @ x[:i]) / diag
    return Solution(GridFunction(problem.grid, x), float(np.max(problem.residual(x))), "march")


def step_extend(problem: VolterraProblem, phi_r: float, r: float) -> float:
    """Value at ``sigma(r)`` of the solution extended across the gap after ``r``.

    ``f(sigma(r)) + mu(r) k(sigma(r), r) phi_r``.
    """
    m = problem.ts.mu(r)
    if m <= 0:
        raise NotRightScattered(r)
    r = problem.ts._locate(r)[1]
    sr = problem.ts.sigma(r)
    return evaluate(problem.f, sr) + m * evaluate(problem.kernel, sr, r) * phi_r


def quadrature_allowance(problem: VolterraProblem) -> float:
    """Slack used when comparing grid quantities with continuum inequalities.

    Ten times the larger of the marching solution's own residual, its change
    under one bisection of every interval step (a discretization-error
    estimate, zero on purely discrete scales) and a rounding floor.
    """
    sol = problem.march
    x = sol.phi.values
    scale = max(1.0, float(np.max(np.abs(x))))
    floor = 64 * np.finfo(float).eps * (1.0 + problem.M * (problem.b - problem.a)) * scale
    change = 0.0
    if not np.all(problem.grid.scattered):
        fine = problem.refined()
        xf = march_solve(fine).phi.values
        change = float(np.max(np.abs(xf[fine.grid.coarse_indices(problem.grid)] - x)))
    return 10.0 * max(sol.residual, change, floor)
