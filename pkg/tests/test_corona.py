import pytest

from pinwheel.corona import (
    BoundaryUncertain,
    Corona,
    NonStabilized,
    child_coronas,
    classify,
    collared_children,
    enumerate_collared,
    enumerate_uncollared,
    first_corona,
    scan_level,
)
from pinwheel.geometry import MINUS, PLUS, Isometry, PINWHEEL_ROTATION, Point, tiles_intersect
from pinwheel.patchindex import PatchIndex
from pinwheel.substitution import patch


def test_level1_tiles_are_uncertain(rule):
    p = patch(1, rule)
    idx = PatchIndex(p)
    for t in range(len(p)):
        with pytest.raises(BoundaryUncertain):
            first_corona(t, p, idx)


def test_central_tile_neighbour_count(rule):
    p = patch(2, rule)
    n = len(PatchIndex(p).neighbors(0))
    assert 6 <= n <= 14


def test_corona_neighbours_touch_centre(enum):
    for c in enum:
        cor = c.representative
        assert all(tiles_intersect(cor.center, t) for t in cor.neighbors)


def test_corona_key_invariant(enum):
    cor = enum[0].representative
    g = Isometry(False, PINWHEEL_ROTATION, Point(3, -7))
    moved = Corona.from_tiles(cor.center.moved(g), [t.moved(g) for t in cor.neighbors])
    assert moved.key == cor.key


def test_enumeration_certificates(enum):
    assert enum.stable and enum.closed
    assert len(enum) == 108
    assert enum.chirality_counts() == {PLUS: 54, MINUS: 54}
    assert enum.counts[enum.levels[-1]] == enum.counts[enum.levels[-2]] == 108


def test_ids_sorted_by_key(enum):
    keys = [c.key for c in enum]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_mirror_involution(enum):
    for c in enum:
        p = enum[c.chirality_partner]
        assert p.id != c.id
        assert p.chirality_partner == c.id
        assert p.chirality == -c.chirality
        assert c.representative.mirrored().key == p.key


def test_children(enum, rule):
    assert all(len(k) == 5 for k in enum.children)
    assert sum(len(k) for k in enum.children) == 540
    for c in enum[:10]:
        assert [i for _, i in collared_children(c, enum, rule)] == enum.children[c.id]


def test_idempotent_classing(enum):
    ids = enum.by_key()
    for c in enum:
        cor = c.representative
        assert ids[Corona.from_tiles(cor.center, cor.neighbors).key] == c.id


def test_child_chirality_follows_table(enum, rule):
    table = [t.chirality for t in rule.reference_children(PLUS)]
    for c in enum:
        kids = [enum[i].chirality for i in enum.children[c.id]]
        assert kids == [ch * c.chirality for ch in table]


def test_child_coronas_contain_centres(enum, rule):
    cor = enum[5].representative
    kids = child_coronas(cor, rule)
    assert len(kids) == 5
    assert all(k.center.rot.c ** 2 + k.center.rot.s ** 2 == 1 for k in kids)


def test_level_monotone_discovery(enum, rule):
    sets = [set(scan_level(n, rule).signatures.values()) for n in enum.levels[-3:]]
    assert sets[0] <= sets[1] <= sets[2]


def test_classify_covers_certified_tiles(enum, rule):
    scan = scan_level(enum.levels[-1], rule)
    labels = classify(scan, enum)
    assert len(labels) == len(scan.signatures)
    assert set(labels.values()) == set(range(108))


def test_low_level_cap_does_not_stabilise(rule):
    with pytest.raises(NonStabilized):
        enumerate_collared(rule, start=3, max_level=5)


def test_uncollared(rule):
    classes, a = enumerate_uncollared(rule)
    assert classes == [PLUS, MINUS]
    assert a == [[2, 3], [3, 2]]
