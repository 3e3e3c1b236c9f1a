from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinwheel.geometry import (
    IDENTITY,
    MINUS,
    PINWHEEL_ROTATION,
    PLUS,
    I,
    Isometry,
    Point,
    TilePose,
    UnitRotation,
    canonical_key,
    class_key,
    interiors_disjoint,
    mirror_patch,
    on_segment,
    orient,
    point_in_triangle,
    point_strictly_inside,
    side_lengths2,
    signed_area,
    tiles_intersect,
)

small = st.fractions(min_value=-20, max_value=20, max_denominator=30)


@st.composite
def rotations(draw):
    # products of powers of i and (3+4i)/5 stay exact unit rotations
    r = UnitRotation(1, 0)
    for _ in range(draw(st.integers(0, 4))):
        r = r * (PINWHEEL_ROTATION if draw(st.booleans()) else PINWHEEL_ROTATION.conj())
    for _ in range(draw(st.integers(0, 3))):
        r = r * I
    return r


@st.composite
def isometries(draw, direct=False):
    reflect = False if direct else draw(st.booleans())
    return Isometry(reflect, draw(rotations()), Point(draw(small), draw(small)))


@st.composite
def poses(draw):
    return TilePose(draw(st.sampled_from([PLUS, MINUS])), draw(rotations()), Point(draw(small), draw(small)))


def test_point_arithmetic():
    z = Point(2, -1)
    assert z * Point(2, 1) == Point(5, 0)
    assert z / z == Point(1, 0)
    assert z.conj() == Point(2, 1)
    assert z.norm2() == 5
    assert Point(Fraction(2, 4), 0).x.denominator == 2


def test_apply_examples():
    assert IDENTITY.apply(Point(Fraction(3, 2), Fraction(1, 2))) == Point(Fraction(3, 2), Fraction(1, 2))
    assert Isometry(False, I, Point(0, 0)).apply(Point(2, 0)) == Point(0, 2)
    p = Isometry(False, PINWHEEL_ROTATION, Point(0, 0)).apply(Point(5, 0))
    assert p == Point(3, 4) and p.norm2() == 25


def test_unit_rotation_rejects_non_units():
    with pytest.raises(ValueError):
        UnitRotation(1, 1)


def test_tile_vertices_examples():
    assert TilePose(PLUS).vertices() == (Point(0, 0), Point(2, 0), Point(2, 1))
    assert TilePose(MINUS).vertices() == (Point(0, 0), Point(2, 0), Point(2, -1))
    t = TilePose(PLUS, UnitRotation(-1, 0), Point(2, 1))
    assert t.vertices() == (Point(2, 1), Point(0, 1), Point(0, 0))
    assert side_lengths2(t.vertices()) == (5, 4, 1)
    assert signed_area(t.vertices()) == 1


def test_chirality_is_sign_of_area():
    assert signed_area(TilePose(PLUS).vertices()) > 0
    assert signed_area(TilePose(MINUS).vertices()) < 0


def test_tiles_intersect_examples():
    a = TilePose(PLUS)
    assert tiles_intersect(a, a)
    assert not tiles_intersect(a, TilePose(PLUS, trans=Point(10, 10)))
    b = TilePose(MINUS)
    assert tiles_intersect(a, b)
    assert interiors_disjoint(a.vertices(), b.vertices())


def test_vertex_contact_counts_as_intersection():
    a = TilePose(PLUS)
    b = TilePose(PLUS, UnitRotation(-1, 0), Point(0, 0))  # meets a only at the origin
    assert tiles_intersect(a, b)
    assert interiors_disjoint(a.vertices(), b.vertices())


def test_predicates_on_boundary():
    tri = TilePose(PLUS).vertices()
    assert point_in_triangle(Point(1, 0), tri)
    assert not point_strictly_inside(Point(1, 0), tri)
    assert point_strictly_inside(Point(Fraction(3, 2), Fraction(1, 4)), tri)
    assert on_segment(Point(1, Fraction(1, 2)), Point(0, 0), Point(2, 1))
    assert not on_segment(Point(3, Fraction(3, 2)), Point(0, 0), Point(2, 1))
    assert orient(Point(0, 0), Point(1, 0), Point(0, 1)) == 1


@given(isometries(), isometries(), isometries())
@settings(max_examples=60, deadline=None)
def test_group_laws(a, b, c):
    assert a.compose(b).compose(c) == a.compose(b.compose(c))
    assert a.compose(a.inverse()) == IDENTITY
    assert a.inverse().compose(a) == IDENTITY


@given(isometries(), isometries(), st.builds(Point, small, small))
@settings(max_examples=60, deadline=None)
def test_compose_is_function_composition(a, b, p):
    assert a.compose(b).apply(p) == a.apply(b.apply(p))


@given(rotations(), rotations())
@settings(max_examples=40, deadline=None)
def test_rotation_closure(r, s):
    for u in (r * s, r.conj()):
        assert u.c * u.c + u.s * u.s == 1


@given(poses())
@settings(max_examples=40, deadline=None)
def test_single_tile_key_is_reference(t):
    assert canonical_key([t], 0) == canonical_key([TilePose(t.chirality)], 0)


@given(st.lists(poses(), min_size=1, max_size=4), isometries(direct=True), st.data())
@settings(max_examples=60, deadline=None)
def test_key_invariant_under_direct_isometry(tiles, g, data):
    k = data.draw(st.integers(0, len(tiles) - 1))
    moved = [t.moved(g) for t in tiles]
    assert canonical_key(moved, k) == canonical_key(tiles, k)


@given(st.lists(poses(), min_size=1, max_size=4), st.data())
@settings(max_examples=40, deadline=None)
def test_key_reflection_covariance(tiles, data):
    k = data.draw(st.integers(0, len(tiles) - 1))
    flipped = [TilePose(-t.chirality, t.rot.conj(), t.trans.conj()) for t in tiles]
    assert canonical_key(mirror_patch(tiles), k) == canonical_key(flipped, k)


def test_key_examples():
    base = [TilePose(PLUS), TilePose(MINUS)]
    rotated = [t.moved(Isometry(False, PINWHEEL_ROTATION, Point(7, -3))) for t in base]
    assert canonical_key(rotated, 0) == canonical_key(base, 0)
    # the same two tiles anchored at different chiralities are different anchored patches
    assert canonical_key(base, 0) != canonical_key(base, 1)
    assert class_key(base) == min(canonical_key(base, 0), canonical_key(base, 1))
    with pytest.raises(IndexError):
        canonical_key(base, 2)


def test_mirror_never_directly_congruent():
    t = [TilePose(PLUS), TilePose(PLUS, I, Point(2, 0))]
    assert class_key(t) != class_key(mirror_patch(t))
