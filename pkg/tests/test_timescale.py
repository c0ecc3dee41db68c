import json

import numpy as np
import pytest

from tsvolterra.errors import InvalidStep, InvalidTimeScale, PointNotInTimeScale, PointNotOnGrid
from tsvolterra.timescale import (
    Interval,
    Point,
    PointClass,
    TimeScale,
    build_grid,
    classify,
    grid_from_points,
    mu,
    sigma,
)


def test_sigma_examples(mixed):
    z = TimeScale.integers(0, 10)
    assert sigma(z, 3) == 4
    ts = TimeScale([Interval(0, 1), Point(2)])
    assert sigma(ts, 0.5) == 0.5
    assert sigma(ts, 1) == 2
    assert sigma(ts, 2) == 2  # sigma(b) = b


def test_mu_examples():
    ts = TimeScale([Interval(0, 1), Point(2)])
    assert mu(ts, 1) == 1
    assert mu(ts, 0.5) == 0
    assert mu(TimeScale.points([0, 0.5, 1.5]), 0.5) == 1
    assert mu(ts, 2) == 0


def test_classify_examples():
    ts = TimeScale([Interval(0, 1), Point(2)])
    assert classify(ts, 1) == PointClass(right="scattered", left="dense")
    assert classify(TimeScale.integers(0, 10), 5) == PointClass("scattered", "scattered")
    assert classify(TimeScale.interval(0, 1), 0.3) == PointClass("dense", "dense")
    assert classify(ts, 2) == PointClass("max", "scattered")
    assert classify(ts, 0) == PointClass("dense", "min")


def test_membership_tolerance():
    ts = TimeScale([Interval(0, 1), Point(2)])
    assert sigma(ts, 1 + 1e-13) == 2
    assert (1.5 in ts) is False
    with pytest.raises(PointNotInTimeScale):
        sigma(ts, 1.5)
    with pytest.raises(PointNotInTimeScale):
        mu(ts, -1)


@pytest.mark.parametrize(
    "components",
    [
        [],
        [Interval(0, 1), Interval(1, 2)],
        [Point(2), Point(1)],
        [Interval(0, 1), Point(0.5)],
    ],
)
def test_invalid_time_scales(components):
    with pytest.raises(InvalidTimeScale):
        TimeScale(components)


def test_degenerate_interval_rejected():
    with pytest.raises(InvalidTimeScale):
        Interval(1.0, 1.0)


def test_build_grid_examples():
    assert build_grid(TimeScale.interval(0, 1), 0.5).points.tolist() == [0, 0.5, 1]
    assert build_grid(TimeScale.integers(0, 2), 0.01).points.tolist() == [0, 1, 2]
    g = build_grid(TimeScale([Interval(0, 1), Point(2)]), 1)
    assert g.points.tolist() == [0, 1, 2]
    assert g.scattered.tolist() == [False, True]


def test_build_grid_step_rule():
    g = build_grid(TimeScale.interval(0, 1), 0.3)
    # ceil(1/0.3) = 4 uniform steps
    assert np.allclose(np.diff(g.points), 0.25)
    with pytest.raises(InvalidStep):
        build_grid(TimeScale.interval(0, 1), 0)
    with pytest.raises(InvalidStep):
        build_grid(TimeScale.interval(0, 1), -1.0)


def test_grid_keeps_endpoints_exact():
    ts = TimeScale([Interval(0.1, 0.7), Point(1.3), Interval(2.0, 2.9)])
    g = build_grid(ts, 0.07)
    for v in (0.1, 0.7, 1.3, 2.0, 2.9):
        assert v in g.points.tolist()


def test_grid_pair_rule_and_mu(mixed):
    g = build_grid(mixed, 0.1)
    for j, bridge in enumerate(g.scattered):
        lo, hi = g.points[j], g.points[j + 1]
        if bridge:
            assert sigma(mixed, lo) == hi
        else:
            assert mu(mixed, lo) == 0
    assert g.mu[g.index_of(1.0)] == 1.0
    assert g.mu[-1] == 0


def test_index_of_and_refine(mixed):
    g = build_grid(mixed, 0.25)
    assert g.index_of(0.5) == 2
    with pytest.raises(PointNotOnGrid):
        g.index_of(0.3)
    fine = g.refined()
    assert len(fine) == len(g) + 4
    idx = fine.coarse_indices(g)
    assert np.array_equal(fine.points[idx], g.points)
    assert fine.scattered.sum() == g.scattered.sum()


def test_json_round_trip(mixed):
    text = json.dumps(mixed.to_dict())
    assert TimeScale.from_dict(json.loads(text)) == mixed
    assert json.loads(text) == {
        "components": [
            {"type": "interval", "lo": 0.0, "hi": 1.0},
            {"type": "point", "t": 2.0},
            {"type": "point", "t": 3.0},
        ]
    }


def test_from_dict_rejects_garbage():
    with pytest.raises(InvalidTimeScale):
        TimeScale.from_dict({"components": [{"type": "blob"}]})
    with pytest.raises(InvalidTimeScale):
        TimeScale.from_dict({"parts": []})
    with pytest.raises(InvalidTimeScale):
        TimeScale.from_dict({"components": [{"type": "interval", "lo": 1}]})


def test_truncate():
    ts = TimeScale([Interval(0, 1), Point(2), Interval(3, 5)])
    assert ts.truncate(0, 4) == TimeScale([Interval(0, 1), Point(2), Interval(3, 4)])
    assert ts.truncate(0, 0) == TimeScale([Point(0.0)])
    assert ts.truncate(0, 3) == TimeScale([Interval(0, 1), Point(2), Point(3)])
    assert TimeScale.integers(0, 8).truncate(0, 2.5) == TimeScale.integers(0, 2)


def test_lattice():
    ts = TimeScale.lattice(0.5, 0, 5)
    assert len(ts.components) == 11
    assert ts.b == 5.0


def test_grid_from_points_validates(mixed):
    g = build_grid(mixed, 0.5)
    assert grid_from_points(mixed, g.points) == g
    with pytest.raises(InvalidStep):
        grid_from_points(mixed, [0.0, 0.5, 1.0, 3.0])
