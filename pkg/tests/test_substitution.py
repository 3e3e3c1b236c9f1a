import json
from fractions import Fraction

import pytest

from pinwheel.geometry import MINUS, PLUS, Point, TilePose, signed_area, tiles_intersect
from pinwheel.patchindex import verify_patch
from pinwheel.substitution import (
    LevelCapExceeded,
    SubstitutionRule,
    chirality_counts,
    expand,
    patch,
    patch_from_json,
    pinwheel_rule,
    region_of,
    split,
    tile_set,
    validate_rule,
)


@pytest.fixture(scope="module")
def rule():
    return pinwheel_rule()


def test_phi_supertile_vertices(rule):
    assert region_of(1, rule) == (Point(-2, 1), Point(2, -1), Point(3, 1))
    assert region_of(2, rule) == (Point(-5, 5), Point(1, -3), Point(5, 0))


def test_rule_validates(rule):
    rep = validate_rule(rule)
    assert rep.ok, str(rep)


def test_shifted_child_detected(rule):
    kids = list(rule.children)
    k = kids[4]
    kids[4] = TilePose(k.chirality, k.rot, k.trans + Point(1, 0))
    rep = validate_rule(SubstitutionRule(rule.name, rule.expansion, rule.offset, tuple(kids)))
    assert not rep.ok
    assert any("inside region" in f for f in rep.failures)


def test_overlapping_child_detected(rule):
    kids = list(rule.children)
    kids[4] = kids[3]
    rep = validate_rule(SubstitutionRule(rule.name, rule.expansion, rule.offset, tuple(kids)))
    assert any("disjoint" in f for f in rep.failures)


def test_missing_child_detected(rule):
    rep = validate_rule(SubstitutionRule(rule.name, rule.expansion, rule.offset, rule.children[:4]))
    assert any("area" in f for f in rep.failures)


def test_minus_table_is_conjugate(rule):
    plus = rule.reference_children(PLUS)
    minus = rule.reference_children(MINUS)
    assert minus == tuple(t.mirrored() for t in plus)


def test_expand_level_zero_gives_table(rule):
    p = expand(patch(0, rule), rule)
    assert p.tiles == rule.reference_children(PLUS)


def test_patch_sizes_and_area(rule):
    for n in range(5):
        p = patch(n, rule)
        assert len(p) == 5**n
        assert sum(abs(signed_area(t.vertices())) for t in p.tiles) == 5**n


def test_patch3_rotations_and_denominators(rule):
    p = patch(3, rule)
    for t in p.tiles:
        assert t.rot.c**2 + t.rot.s**2 == 1
        for q in (t.rot.c, t.rot.s, t.trans.x, t.trans.y):
            assert 125 % q.denominator == 0


def test_nesting(rule):
    for n in range(1, 5):
        assert tile_set(patch(n - 1, rule)) <= tile_set(patch(n, rule))


def test_chirality_balance(rule):
    for n in range(6):
        c = chirality_counts(patch(n, rule))
        assert abs(c[PLUS] - c[MINUS]) == 1
    assert chirality_counts(patch(4, rule)) == {PLUS: 313, MINUS: 312}


def test_split_equivariance(rule):
    from pinwheel.geometry import Isometry, PINWHEEL_ROTATION

    g = Isometry(False, PINWHEEL_ROTATION, Point(Fraction(1, 5), 3))
    for ch in (PLUS, MINUS):
        t = TilePose(ch)
        kids = split(t.moved(g), rule)
        base = split(t, rule)
        # children of a moved tile are congruent copies, moved by one common direct isometry
        a0, b0 = base[0], kids[0]
        h = Isometry(False, b0.rot * a0.rot.conj(), Point(0, 0))
        h = Isometry(False, h.rot, b0.trans - h.rot * a0.trans)
        assert [k.moved(h) for k in base] == kids


def test_verify_patch_levels(rule):
    for n in range(6):
        rep = verify_patch(patch(n, rule))
        assert rep.ok, str(rep)


def test_level2_region(rule):
    p = patch(2, rule)
    assert p.region == (Point(-5, 5), Point(1, -3), Point(5, 0))
    assert len(p) == 25


def test_json_round_trip(rule):
    p = patch(2, rule)
    q = patch_from_json(json.loads(json.dumps(p.to_json())), rule)
    assert q == p and verify_patch(q).ok
    r = SubstitutionRule.from_json(json.loads(json.dumps(rule.to_json())))
    assert r == rule and r.digest() == rule.digest()


def test_level_cap(rule):
    with pytest.raises(LevelCapExceeded):
        patch(4, rule, max_level=3)


def test_central_tile_kept(rule):
    p = patch(3, rule)
    assert p.tiles[0] == TilePose(PLUS)
    assert all(tiles_intersect(p.tiles[0], t) for t in split(p.tiles[0], rule)[:1])
