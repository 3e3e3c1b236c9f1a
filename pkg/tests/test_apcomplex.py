from fractions import Fraction

import numpy as np
import pytest

from pinwheel.apcomplex import (
    POLYGONAL,
    SIMPLICIAL,
    NonCellular,
    NonSimplicialAdjacency,
    check_boundaries,
    check_contact,
    check_patch_subdivision,
    cohomology,
    cohomology_action,
    configs_closed,
    eventual_ranks,
    face_states,
    forgetful_map,
    inflation_map,
    punctuation,
    pushforward_states,
    refinement_to_tiles,
    state_annihilates_coboundaries,
    subdivide,
    subdivision_ok,
)
from pinwheel.geometry import MINUS, PLUS, PINWHEEL_ROTATION, Point, TilePose, point_strictly_inside
from pinwheel.snf import verify
from pinwheel.substitution import patch


# ----------------------------------------------------------- tile structures


def test_structure_counts():
    assert SIMPLICIAL.counts == (10, 17, 8)
    assert POLYGONAL.counts == (16, 16, 1)
    for s in (SIMPLICIAL, POLYGONAL):
        v, e, f = s.counts
        assert v - e + f == 1


def test_structure_boundary_of_boundary():
    for s in (SIMPLICIAL, POLYGONAL):
        for f in range(s.counts[2]):
            total = {}
            for k, sign in s.face_boundary(f):
                a, b = s.edges[k]
                total[a] = total.get(a, 0) - sign
                total[b] = total.get(b, 0) + sign
            assert all(v == 0 for v in total.values())


@pytest.mark.parametrize("t", [
    TilePose(PLUS),
    TilePose(MINUS),
    TilePose(PLUS, PINWHEEL_ROTATION, Point(Fraction(3, 5), -2)),
    TilePose(MINUS, PINWHEEL_ROTATION, Point(1, 1)),
])
def test_subdivision(t):
    assert subdivision_ok(t)
    s = subdivide(t)
    assert set(t.vertices()) <= set(s.vertices)
    assert point_strictly_inside(punctuation(t), t.vertices())
    assert all(point_strictly_inside(b, t.vertices()) for b in s.barycenters)


def test_misaligned_neighbour_is_rejected():
    a, b = TilePose(PLUS), TilePose(MINUS, trans=Point(Fraction(1, 3), 0))
    with pytest.raises(NonSimplicialAdjacency):
        check_contact(a, subdivide(a).vertices, b, subdivide(b).vertices)


def test_mirror_neighbour_is_accepted():
    a, b = TilePose(PLUS), TilePose(MINUS)
    check_contact(a, subdivide(a).vertices, b, subdivide(b).vertices)


def test_patch_subdivision_level3(rule):
    rep = check_patch_subdivision(patch(3, rule))
    assert rep.ok, rep.problems[:5]
    assert rep.triangles == 8 * 125


# ----------------------------------------------------- adjacency and gluing


def test_adjacency_certified(adjacency, enum, rule):
    assert adjacency.stable and adjacency.closed
    assert configs_closed(set(adjacency.configs), enum, rule) == []


def test_b0_shape(b0):
    assert b0.counts[2] == 864
    assert check_boundaries(b0)
    assert not np.any(b0.d1 @ b0.d2)
    assert b0.connected_components() == 1


def test_incidences_are_signs(b0, k0):
    for cx in (b0, k0):
        for d in (cx.d1, cx.d2):
            assert set(np.unique(d)) <= {-1, 0, 1}
        assert all(np.count_nonzero(col) == 2 for col in cx.d1.T if np.count_nonzero(col))


def test_edge_orientation_runs_upwards(b0):
    for c, col in enumerate(b0.d1.T):
        nz = np.nonzero(col)[0]
        if len(nz) == 2:
            assert col[nz[0]] == -1 and col[nz[1]] == 1


def test_euler_matches_betti(b0, k0):
    for cx in (b0, k0):
        h = cohomology(cx)
        assert sum((-1) ** k * r for k, r in enumerate(h.betti())) == cx.euler


def test_b0_cohomology(b0):
    h = cohomology(b0)
    assert h.betti()[0] == 1
    assert h.degrees[0].torsion == []
    for s, d in zip(h.snfs, h.delta):
        assert verify(d, s)


def test_structures_and_orientations_agree(pipe, b0, k0):
    groups = [str(d) for d in cohomology(b0).degrees]
    assert [str(d) for d in cohomology(k0).degrees] == groups
    chiral = pipe.complex(0, "simplicial", "chiral")
    assert [str(d) for d in cohomology(chiral).degrees] == groups


def test_state_vanishes_on_coboundaries(b0, pd):
    assert state_annihilates_coboundaries(b0, pd.alpha)


def test_level1_complex(b1):
    assert b1.counts[2] == 8 * 5 * 108
    assert check_boundaries(b1)


# --------------------------------------------------------- maps and states


def test_forgetful_refinement(b1, b0, A):
    f = forgetful_map(b1, b0)
    assert f.commutes(b1, b0)
    slots = refinement_to_tiles(f, b1, b0)
    assert len(slots) == 8
    assert all(s == A for s in slots)
    total = [[sum(s[i][j] for s in slots) for j in range(108)] for i in range(108)]
    assert total == [[8 * x for x in row] for row in A]


def test_pushforward_matches_face_states(b1, b0, pd):
    f = forgetful_map(b1, b0)
    assert pushforward_states(f, b1, b0, pd.alpha) == face_states(b0, pd.alpha)


def test_substitution_action(k0, k1, A, rule):
    sigma = inflation_map(k0, k1, rule).then(forgetful_map(k1, k0))
    assert sigma.commutes(k0, k0)
    assert sigma.maps[2].tolist() == A
    h = cohomology(k0)
    m0 = cohomology_action(h, sigma, 0)
    assert m0.matrix == [[1]]
    m2 = cohomology_action(h, sigma, 2)
    assert len(m2.matrix) == h.betti()[2]
    assert m2.eventual_rank <= len(m2.matrix)


def test_eventual_ranks():
    assert eventual_ranks([[0, 1], [0, 0]]) == [1, 0, 0]
    assert eventual_ranks([[2, 0], [0, 3]]) == [2, 2]
    assert eventual_ranks([]) == []


def test_non_cellular_inflation_detected(b0, b1, rule):
    with pytest.raises(NonCellular):
        inflation_map(b0, b1, rule)
