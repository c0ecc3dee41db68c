"""Delta integration on grids and the constant-rate time-scale exponential."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expr import as_expr, evaluate
from .errors import GridMismatch, InputError, NonRegressive, PointNotOnGrid
from .timescale import TOL_MEMBER, Grid, TimeScale, build_grid


class GridFunction:
    """Real values sampled at every point of a :class:`Grid`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        vals = np.array(values, dtype=float)
        if vals.shape != (len(grid),):
            raise GridMismatch(f"expected {len(grid)} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InputError("grid function values must be finite")
        vals.setflags(write=False)
        self.grid = grid
        self.values = vals

    @classmethod
    def sample(cls, grid: Grid, func: Callable) -> "GridFunction":
        return cls(grid, np.broadcast_to(func(grid.points), grid.points.shape))

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid, np.full(len(grid), float(c)))

    @property
    def t(self) -> np.ndarray:
        return self.grid.points

    def __len__(self):
        return len(self.values)

    def __call__(self, t: float) -> float:
        return float(self.values[self.grid.index_of(t)])

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise GridMismatch("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __repr__(self):
        return f"GridFunction(n={len(self)}, sup={self.sup():.6g})"

    def to_csv(self, header=("t", "value")) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for t, v in zip(self.grid.points, self.values):
            w.writerow([fmt(t), fmt(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, grid: Grid) -> "GridFunction":
        """Parse ``t,value`` rows; the ``t`` column must match ``grid`` point by point."""
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0][:2]] != ["t", "value"]:
            raise InputError("CSV must start with the header 't,value'")
        body = [r for r in rows[1:] if r]
        try:
            ts = np.array([float(r[0]) for r in body])
            vs = np.array([float(r[1]) for r in body])
        except (ValueError, IndexError) as exc:
            raise InputError(f"bad CSV row: {exc}") from None
        if ts.shape != grid.points.shape or np.any(np.abs(ts - grid.points) > TOL_MEMBER):
            raise GridMismatch("CSV t column does not match the problem grid")
        return cls(grid, vs)


def fmt(x: float) -> str:
    """Shortest text for a double that round-trips (at most 17 significant digits)."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class QuadratureWeights:
    """Per adjacent pair ``(t_j, t_{j+1})``: weight given to the left and right node.

    Within an interval the pair gets the trapezoid ``(h/2, h/2)``; across a
    gap it gets ``(mu(t_j), 0)``, which is the exact Delta-integral over
    ``[t_j, sigma(t_j))``.
    """

    left: np.ndarray
    right: np.ndarray

    @classmethod
    def for_grid(cls, grid: Grid) -> "QuadratureWeights":
        h = grid.steps
        left = np.where(grid.scattered, h, 0.5 * h)
        right = np.where(grid.scattered, 0.0, 0.5 * h)
        return cls(left, right)

    def row(self, i: int) -> np.ndarray:
        """Node weights of the rule for the integral from ``t_0`` to ``t_i``."""
        w = np.zeros(self.left.size + 1)
        w[:i] += self.left[:i]
        w[1 : i + 1] += self.right[:i]
        return w

    def total(self) -> float:
        return float(np.sum(self.left) + np.sum(self.right))


def pair_contributions(g: GridFunction) -> np.ndarray:
    q = QuadratureWeights.for_grid(g.grid)
    return q.left * g.values[:-1] + q.right * g.values[1:]


def delta_integral(g: GridFunction, lo: float, hi: float) -> float:
    """Delta integral of ``g`` over ``[lo, hi)``; both limits must be grid points."""
    i0, i1 = g.grid.index_of(lo), g.grid.index_of(hi)
    if i1 < i0:
        raise PointNotOnGrid(f"lower limit {lo} exceeds upper limit {hi}")
    if i0 == i1:
        return 0.0
    return float(np.sum(pair_contributions(g)[i0:i1]))


def cumulative_integral(g: GridFunction) -> np.ndarray:
    """``int_a^{t_i} g`` for every grid index ``i``."""
    out = np.zeros(len(g))
    out[1:] = np.cumsum(pair_contributions(g))
    return out


def _check_regressive(p: float, mus: np.ndarray, where: np.ndarray):
    factors = 1.0 + mus * p
    bad = np.nonzero(factors <= 0)[0]
    if bad.size:
        j = bad[0]
        raise NonRegressive(p, float(where[j]), float(mus[j]))
    return factors


def ts_exp(ts: TimeScale, p: float, t: float, t0: float, grid: Grid | None = None) -> float:
    """``e_p(t, t0)`` for constant ``p`` and ``t >= t0``.

    Product of ``1 + mu(tau) p`` over right-scattered ``tau`` in ``[t0, t)``
    times ``exp(p * continuous length of [t0, t])``.  Computed from the time
    scale structure, so it is exact up to rounding; a ``grid`` only adds a
    check that both arguments are grid points.
    """
    if grid is not None:
        grid.index_of(t)
        grid.index_of(t0)
    _, t = ts._locate(t)
    _, t0 = ts._locate(t0)
    if t < t0:
        raise InputError(f"ts_exp needs t >= t0, got t={t}, t0={t0}")
    jumps = ts.scattered_points(t0, t)
    prod = 1.0
    if jumps:
        taus = np.array([j[0] for j in jumps])
        mus = np.array([j[1] for j in jumps])
        prod = float(np.prod(_check_regressive(p, mus, taus)))
    return prod * math.exp(p * ts.continuous_length(t0, t))


class GridExponential:
    """``e_p(t_i, t_j)`` for all pairs of grid points, from cumulative factors."""

    def __init__(self, grid: Grid, p: float):
        mus = grid.mu[:-1]
        factors = _check_regressive(p, np.where(grid.scattered, mus, 0.0), grid.points[:-1])
        factors = np.where(grid.scattered, factors, 1.0)
        self.grid = grid
        self.p = p
        self.prod = np.concatenate([[1.0], np.cumprod(factors)])
        cont = np.where(grid.scattered, 0.0, grid.steps)
        self.length = np.concatenate([[0.0], np.cumsum(cont)])

    def between(self, i, j):
        """``e_p(t_i, t_j)`` (indices, broadcastable, ``i >= j``)."""
        return self.prod[i] / self.prod[j] * np.exp(self.p * (self.length[i] - self.length[j]))

    def from_start(self, j: int = 0) -> np.ndarray:
        """``e_p(t_i, t_j)`` for every ``i`` (values for ``i < j`` are not meaningful)."""
        return self.between(np.arange(len(self.grid)), j)


def exp_identity_residual(ts: TimeScale, grid: Grid, M: float, t: float, a: float | None = None) -> float:
    """``|int_a^t M / e_M(sigma(s), a) Ds - (1 - 1/e_M(t, a))|`` on ``grid``."""
    if a is None:
        a = grid.a
    ia, it = grid.index_of(a), grid.index_of(t)
    if it == ia:
        return 0.0
    e = GridExponential(grid, M).from_start(ia)
    # sigma jumps at right-scattered interval ends, so a trapezoid pair takes the
    # left limit M/e(s) at its right node rather than the value M/e(sigma(s))
    h = grid.steps[ia:it]
    lo, hi = e[ia:it], e[ia + 1 : it + 1]
    contrib = np.where(grid.scattered[ia:it], h * M / hi, 0.5 * h * (M / lo + M / hi))
    return abs(float(np.sum(contrib)) - (1.0 - 1.0 / e[it]))


def bernoulli_gap(ts: TimeScale, p: float, t: float) -> float:
    """``e_p(t, a) - (1 + p (t - a))``, nonnegative for ``p > 0``."""
    a = ts.a
    return ts_exp(ts, p, t, a) - (1.0 + p * (ts._locate(t)[1] - a))


def sample_expr(grid: Grid, e) -> GridFunction:
    """Sample an expression in ``t`` on the grid."""
    return GridFunction(grid, evaluate(as_expr(e), grid.points))


__all__ = [
    "GridFunction", "QuadratureWeights", "GridExponential",
    "delta_integral", "cumulative_integral", "ts_exp", "exp_identity_residual",
    "bernoulli_gap", "sample_expr", "fmt", "build_grid",
]
