"""Bounded time scales built from finitely many intervals and isolated points.

A time scale here is an ordered, disjoint union of closed intervals
``[lo, hi]`` and single points.  The structure is enough to evaluate the
forward jump ``sigma``, the graininess ``mu`` and the left/right point
classification exactly, and to lay down a sampling :class:`Grid` whose
adjacent pairs are either interior to one interval or bridge a gap.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence, Union

import numpy as np

from .errors import InvalidStep, InvalidTimeScale, PointNotInTimeScale, PointNotOnGrid

TOL_MEMBER = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise InvalidTimeScale(f"interval bounds must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise InvalidTimeScale(
                f"interval requires lo < hi, got [{self.lo}, {self.hi}]; use a Point instead"
            )

    @property
    def inf(self) -> float:
        return self.lo

    @property
    def sup(self) -> float:
        return self.hi


@dataclass(frozen=True)
class Point:
    t: float

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise InvalidTimeScale(f"point must be finite, got {self.t}")

    @property
    def inf(self) -> float:
        return self.t

    @property
    def sup(self) -> float:
        return self.t


Component = Union[Interval, Point]


@dataclass(frozen=True)
class PointClass:
    right: Literal["scattered", "dense", "max"]
    left: Literal["scattered", "dense", "min"]


class TimeScale:
    """Finite union of closed intervals and isolated points, in increasing order."""

    __slots__ = ("components", "_infs")

    def __init__(self, components: Iterable[Component]):
        comps = tuple(components)
        if not comps:
            raise InvalidTimeScale("a time scale needs at least one component")
        for c in comps:
            if not isinstance(c, (Interval, Point)):
                raise InvalidTimeScale(f"unsupported component {c!r}")
        for prev, nxt in zip(comps, comps[1:]):
            if not prev.sup < nxt.inf:
                raise InvalidTimeScale(
                    f"components must be disjoint and increasing: {prev!r} then {nxt!r}"
                )
        self.components = comps
        self._infs = [c.inf for c in comps]

    # constructors -------------------------------------------------------

    @classmethod
    def interval(cls, lo: float, hi: float) -> "TimeScale":
        return cls([Interval(float(lo), float(hi))])

    @classmethod
    def points(cls, ts: Iterable[float]) -> "TimeScale":
        return cls([Point(float(t)) for t in sorted(ts)])

    @classmethod
    def integers(cls, lo: int, hi: int) -> "TimeScale":
        """The integers in ``[lo, hi]``."""
        return cls.points(range(int(lo), int(hi) + 1))

    @classmethod
    def lattice(cls, h: float, lo: float, hi: float) -> "TimeScale":
        """``h*Z`` intersected with ``[lo, hi]``, anchored at ``lo``."""
        if h <= 0:
            raise InvalidTimeScale("lattice step must be positive")
        n = int(math.floor((hi - lo) / h + 1e-9))
        return cls.points(lo + h * i for i in range(n + 1))

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        out = []
        for c in self.components:
            if isinstance(c, Interval):
                out.append({"type": "interval", "lo": c.lo, "hi": c.hi})
            else:
                out.append({"type": "point", "t": c.t})
        return {"components": out}

    @classmethod
    def from_dict(cls, data: dict) -> "TimeScale":
        try:
            raw = data["components"]
        except (KeyError, TypeError):
            raise InvalidTimeScale("time scale JSON needs a 'components' list") from None
        if not isinstance(raw, list):
            raise InvalidTimeScale("'components' must be a list")
        comps = []
        for item in raw:
            kind = item.get("type") if isinstance(item, dict) else None
            try:
                if kind == "interval":
                    comps.append(Interval(float(item["lo"]), float(item["hi"])))
                elif kind == "point":
                    comps.append(Point(float(item["t"])))
                else:
                    raise InvalidTimeScale(f"unknown component {item!r}")
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidTimeScale(f"bad component {item!r}: {exc}") from None
        return cls(comps)

    def __eq__(self, other):
        return isinstance(other, TimeScale) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"TimeScale({list(self.components)!r})"

    # basic structure ----------------------------------------------------

    @property
    def a(self) -> float:
        return self.components[0].inf

    @property
    def b(self) -> float:
        return self.components[-1].sup

    @property
    def is_discrete(self) -> bool:
        return all(isinstance(c, Point) for c in self.components)

    def _locate(self, t: float) -> tuple[int, float]:
        """Index of the component holding ``t`` and ``t`` snapped onto it."""
        t = float(t)
        i = bisect.bisect_right(self._infs, t + TOL_MEMBER) - 1
        for j in (i, i + 1):
            if 0 <= j < len(self.components):
                c = self.components[j]
                if c.inf - TOL_MEMBER <= t <= c.sup + TOL_MEMBER:
                    if abs(t - c.inf) <= TOL_MEMBER:
                        return j, c.inf
                    if abs(t - c.sup) <= TOL_MEMBER:
                        return j, c.sup
                    return j, t
        raise PointNotInTimeScale(t)

    def __contains__(self, t) -> bool:
        try:
            self._locate(t)
        except PointNotInTimeScale:
            return False
        return True

    def sigma(self, t: float) -> float:
        """Forward jump: the infimum of the time scale strictly above ``t``."""
        i, t = self._locate(t)
        c = self.components[i]
        if t < c.sup:
            return t
        if i + 1 == len(self.components):
            return t
        return self.components[i + 1].inf

    def rho(self, t: float) -> float:
        """Backward jump: the supremum of the time scale strictly below ``t``."""
        i, t = self._locate(t)
        c = self.components[i]
        if t > c.inf:
            return t
        if i == 0:
            return t
        return self.components[i - 1].sup

    def mu(self, t: float) -> float:
        return self.sigma(t) - self._locate(t)[1]

    def classify(self, t: float) -> PointClass:
        _, t = self._locate(t)
        if t == self.b:
            right = "max"
        else:
            right = "scattered" if self.sigma(t) > t else "dense"
        if t == self.a:
            left = "min"
        else:
            left = "scattered" if self.rho(t) < t else "dense"
        return PointClass(right=right, left=left)

    def continuous_length(self, t0: float, t: float) -> float:
        """Lebesgue measure of the interval parts of the time scale inside ``[t0, t]``."""
        total = 0.0
        for c in self.components:
            if isinstance(c, Interval):
                lo, hi = max(c.lo, t0), min(c.hi, t)
                if hi > lo:
                    total += hi - lo
        return total

    def scattered_points(self, t0: float, t: float) -> list[tuple[float, float]]:
        """Right-scattered points ``tau`` in ``[t0, t)`` paired with ``mu(tau)``."""
        out = []
        for i, c in enumerate(self.components[:-1]):
            tau = c.sup
            if t0 <= tau < t:
                out.append((tau, self.components[i + 1].inf - tau))
        return out

    def truncate(self, lo: float, hi: float) -> "TimeScale":
        """Intersection with ``[lo, hi]``; clipped intervals may shrink to points."""
        comps: list[Component] = []
        for c in self.components:
            if isinstance(c, Point):
                if lo - TOL_MEMBER <= c.t <= hi + TOL_MEMBER:
                    comps.append(c)
                continue
            l, h = max(c.lo, lo), min(c.hi, hi)
            if h > l:
                comps.append(Interval(l, h))
            elif abs(h - l) <= TOL_MEMBER and c.lo - TOL_MEMBER <= l <= c.hi + TOL_MEMBER:
                comps.append(Point(l))
        if not comps:
            raise InvalidTimeScale(f"time scale has no points in [{lo}, {hi}]")
        return TimeScale(comps)


class Grid:
    """Sampling points of a time scale.

    ``scattered[j]`` tells whether the pair ``(points[j], points[j+1])``
    bridges a gap of the time scale (so ``points[j+1] == sigma(points[j])``)
    rather than lying inside one interval component.
    """

    __slots__ = ("points", "scattered", "component")

    def __init__(self, points, scattered, component=None):
        pts = np.asarray(points, dtype=float)
        sc = np.asarray(scattered, dtype=bool)
        if pts.ndim != 1 or pts.size == 0:
            raise InvalidStep("grid needs at least one point")
        if sc.shape != (pts.size - 1,):
            raise InvalidStep("scattered flags must have one entry per adjacent pair")
        if np.any(np.diff(pts) <= 0):
            raise InvalidStep("grid points must be strictly increasing")
        pts.setflags(write=False)
        sc.setflags(write=False)
        self.points = pts
        self.scattered = sc
        if component is None:
            component = np.concatenate([[0], np.cumsum(sc)])
        comp = np.asarray(component, dtype=int)
        comp.setflags(write=False)
        self.component = comp

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.scattered, other.scattered)
        )

    def __hash__(self):
        return hash((self.points.tobytes(), self.scattered.tobytes()))

    def __repr__(self):
        return f"Grid(n={len(self)}, a={self.a}, b={self.b})"

    @property
    def a(self) -> float:
        return float(self.points[0])

    @property
    def b(self) -> float:
        return float(self.points[-1])

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.points)

    @property
    def mu(self) -> np.ndarray:
        """Graininess at each grid point (zero inside intervals and at ``b``)."""
        out = np.zeros(len(self))
        out[:-1] = np.where(self.scattered, self.steps, 0.0)
        return out

    def index_of(self, t: float) -> int:
        t = float(t)
        i = int(np.searchsorted(self.points, t - TOL_MEMBER))
        if i < len(self) and abs(self.points[i] - t) <= TOL_MEMBER:
            return i
        raise PointNotOnGrid(t)

    def sigma_index(self) -> np.ndarray:
        """Index of ``sigma(t_i)`` for every grid point."""
        idx = np.arange(len(self))
        idx[:-1] = np.where(self.scattered, idx[:-1] + 1, idx[:-1])
        return idx

    def refined(self) -> "Grid":
        """Bisect every within-interval step; scattered bridges are kept as is."""
        pts = [self.points[0]]
        sc = []
        comp = [self.component[0]]
        for j, bridge in enumerate(self.scattered):
            lo, hi = self.points[j], self.points[j + 1]
            if not bridge:
                pts.append(0.5 * (lo + hi))
                sc.append(False)
                comp.append(self.component[j])
            pts.append(hi)
            sc.append(bool(bridge))
            comp.append(self.component[j + 1])
        return Grid(pts, sc, comp)

    def coarse_indices(self, coarse: "Grid") -> np.ndarray:
        """Positions of the points of ``coarse`` inside this (finer) grid."""
        idx = np.searchsorted(self.points, coarse.points - TOL_MEMBER)
        idx = np.clip(idx, 0, len(self) - 1)
        if np.any(np.abs(self.points[idx] - coarse.points) > TOL_MEMBER):
            raise PointNotOnGrid("coarse grid is not nested in this grid")
        return idx


def sigma(ts: TimeScale, t: float) -> float:
    return ts.sigma(t)


def mu(ts: TimeScale, t: float) -> float:
    return ts.mu(t)


def classify(ts: TimeScale, t: float) -> PointClass:
    return ts.classify(t)


def build_grid(ts: TimeScale, h_max: float) -> Grid:
    """Grid with every endpoint and isolated point, and interval steps of at most ``h_max``."""
    if not (isinstance(h_max, (int, float)) and math.isfinite(h_max) and h_max > 0):
        raise InvalidStep(f"h_max must be a positive finite number, got {h_max!r}")
    pts: list[float] = []
    scattered: list[bool] = []
    comp: list[int] = []
    for ci, c in enumerate(ts.components):
        if pts:
            scattered.append(True)
        if isinstance(c, Point):
            pts.append(c.t)
            comp.append(ci)
            continue
        n = max(1, math.ceil((c.hi - c.lo) / h_max - 1e-12))
        inner = np.linspace(c.lo, c.hi, n + 1)
        inner[0], inner[-1] = c.lo, c.hi
        pts.extend(inner.tolist())
        scattered.extend([False] * n)
        comp.extend([ci] * (n + 1))
    return Grid(pts, scattered, comp)


def grid_from_points(ts: TimeScale, points: Sequence[float]) -> Grid:
    """Rebuild a grid from sampled points, checking that every gap is a true jump."""
    pts = np.asarray(points, dtype=float)
    comp = [ts._locate(t)[0] for t in pts]
    snapped = [ts._locate(t)[1] for t in pts]
    scattered = []
    for j in range(len(pts) - 1):
        if comp[j] == comp[j + 1]:
            if isinstance(ts.components[comp[j]], Point):
                raise InvalidStep("repeated isolated point in grid")
            scattered.append(False)
        else:
            if comp[j + 1] != comp[j] + 1 or ts.sigma(snapped[j]) != snapped[j + 1]:
                raise InvalidStep(f"grid skips part of the time scale after {snapped[j]}")
            scattered.append(True)
    if snapped[0] != ts.a or snapped[-1] != ts.b:
        raise InvalidStep("grid must start at min and end at max of the time scale")
    return Grid(snapped, scattered, comp)
