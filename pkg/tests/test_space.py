import math

import pytest
from hypothesis import given, strategies as st

from fixpoint.errors import InvalidInputError
from fixpoint.space import BoxDomain, NormKind, Point, contains, convex_combine, distance, norm_of

coord = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
ALL_NORMS = list(NormKind)


def points(dim):
    return st.lists(coord, min_size=dim, max_size=dim).map(Point)


@pytest.mark.parametrize("coords, kind, expected", [
    ([0], NormKind.L2, 0.0),
    ([3, 4], NormKind.L2, 5.0),
    ([3, 4], NormKind.LINF, 4.0),
    ([3, -4], NormKind.L1, 7.0),
])
def test_norm_of(coords, kind, expected):
    assert norm_of(Point(coords), kind) == expected


@pytest.mark.parametrize("x, y, kind, expected", [
    ([0], [1], NormKind.L2, 1.0),
    ([1], [1], NormKind.L1, 0.0),
    ([0, 0], [1, 1], NormKind.L1, 2.0),
])
def test_distance(x, y, kind, expected):
    assert distance(Point(x), Point(y), kind) == expected


def test_point_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        Point([])
    with pytest.raises(InvalidInputError):
        Point([0.0, math.nan])
    with pytest.raises(InvalidInputError):
        Point([math.inf])


def test_distance_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        distance(Point([0]), Point([0, 1]))


def test_convex_combine_endpoints():
    x, y = Point([0.2, -1.0]), Point([3.0, 4.0])
    assert convex_combine(0.0, x, y) == x
    assert convex_combine(1.0, x, y) == y
    assert convex_combine(0.5, Point([0]), Point([1])) == Point([0.5])
    for bad in (-0.1, 1.5):
        with pytest.raises(InvalidInputError):
            convex_combine(bad, x, y)


def test_contains_boundary_inclusive():
    box = BoxDomain.interval(0, 1)
    assert contains(box, Point([0.5]))
    assert contains(box, Point([1]))
    assert not contains(box, Point([1.1]))
    with pytest.raises(InvalidInputError):
        contains(box, Point([0.5, 0.5]))


def test_box_validation_and_corners():
    with pytest.raises(InvalidInputError):
        BoxDomain(Point([1.0]), Point([0.0]))
    with pytest.raises(InvalidInputError):
        BoxDomain(Point([0.0]), Point([0.0, 1.0]))
    box = BoxDomain(Point([0, -1]), Point([1, 1]))
    assert box.corners() == [Point([0, -1]), Point([0, 1]), Point([1, -1]), Point([1, 1])]


@given(points(3), points(3), points(3), st.sampled_from(ALL_NORMS))
def test_triangle_inequality(x, y, z, kind):
    lhs = distance(x, z, kind)
    assert lhs <= distance(x, y, kind) + distance(y, z, kind) + 1e-12 * max(1.0, lhs)


@given(points(4), st.floats(min_value=-1e3, max_value=1e3, allow_nan=False), st.sampled_from(ALL_NORMS))
def test_homogeneity(p, t, kind):
    scaled = Point([t * c for c in p])
    assert norm_of(scaled, kind) == pytest.approx(abs(t) * norm_of(p, kind), rel=1e-12, abs=1e-300)


@given(st.data())
def test_convexity_closure(data):
    lo = data.draw(points(2))
    width = data.draw(st.lists(st.floats(min_value=0, max_value=10), min_size=2, max_size=2))
    box = BoxDomain(lo, Point([a + w for a, w in zip(lo, width)]))
    inside = st.tuples(*[st.floats(min_value=a, max_value=b) for a, b in zip(box.lower, box.upper)]).map(Point)
    x, y = data.draw(inside), data.draw(inside)
    a = data.draw(st.floats(min_value=0, max_value=1))
    # rounding in (1-a)x + a y may overshoot a bound by an ulp
    assert contains(box, convex_combine(a, x, y), tol=1e-9 * (1 + max(map(abs, box.upper))))


def test_norm_parse():
    assert NormKind.parse("linf") is NormKind.LINF
    with pytest.raises(InvalidInputError):
        NormKind.parse("L3")
