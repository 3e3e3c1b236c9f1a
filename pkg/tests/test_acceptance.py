"""Acceptance criteria 1 to 10, each checked at its stated tolerance.

Every test records a one-line verdict that the terminal summary prints as
``criterion N: PASS/FAIL  detail``.
"""

import random
import time
from collections import Counter
from fractions import Fraction
from math import gcd
from functools import reduce

import numpy as np
import pytest

from conftest import record
from pinwheel.apcomplex import (
    check_boundaries,
    check_patch_subdivision,
    cohomology,
    face_states,
    forgetful_map,
    pushforward_states,
    refinement_to_tiles,
)
from pinwheel.corona import classify, clear_scans, enumerate_collared, enumerate_uncollared, scan_level
from pinwheel.gaplabel import FreqModule, LimitElement, empirical_frequencies, gap_module, state
from pinwheel.geometry import MINUS, PLUS
from pinwheel.patchindex import verify_patch
from pinwheel.perron import column_sums, matmul, mirror_permutation, perron_data, primitivity, rank
from pinwheel.snf import _det, determinantal_invariants, snf, verify
from pinwheel.substitution import chirality_counts, patch, region_of

EXPECTED_ALPHA_PRIME = [
    765, 1185, 360, 255, 735, 1185, 360, 255, 765, 90, 90, 255, 250, 80, 735, 255, 80, 400,
    360, 660, 600, 660, 300, 360, 360, 255, 400, 360, 90, 255, 90, 350, 90, 255, 250, 255,
    80, 80, 163, 18, 237, 72, 90, 360, 237, 72, 204, 204, 163, 300, 51, 18, 50, 51,
]


def test_criterion_01_collared_count(rule):
    clear_scans()
    t0 = time.perf_counter()
    e = enumerate_collared(rule, start=3, max_level=9)
    dt = time.perf_counter() - t0
    counts = e.chirality_counts()
    partners = [c.chirality_partner for c in e]
    involution = all(partners[p] == i and p != i for i, p in enumerate(partners))
    ok = e.stable and e.closed and len(e) == 108 and counts == {PLUS: 54, MINUS: 54} and involution and dt < 300
    record(1, ok, f"{len(e)} classes ({counts[PLUS]}+{counts[MINUS]}), stable at levels "
                  f"{e.levels[-2]},{e.levels[-1]}, closed, {dt:.0f}s")
    assert ok


def test_criterion_02_matrix_invariants(A, enum):
    sums = set(column_sums(A))
    k, _ = primitivity(A, max_power=6)
    defect = rank([[a - 5 * (i == j) for j, a in enumerate(row)] for i, row in enumerate(A)])
    P = mirror_permutation([c.chirality_partner for c in enum])
    sym = matmul(matmul(P, A), P) == A
    ok = sums == {5} and k <= 6 and defect == 107 and sym
    record(2, ok, f"column sums {sorted(sums)}, primitive at k={k}, rank(A-5I)={defect}, PAP=A {sym}")
    assert ok


def test_criterion_03_perron_data(pd):
    expected = Counter(EXPECTED_ALPHA_PRIME * 2)
    got = Counter(pd.alpha_prime)
    g = reduce(gcd, pd.alpha_prime)
    ok = got == expected and max(pd.alpha_prime) == 1185 and min(pd.alpha_prime) == 18 and g == 1
    if pd.denominator != 33000:
        ok = ok and all(
            a * EXPECTED_ALPHA_PRIME[0] == b * pd.alpha_prime[0] for a, b in zip(sorted(pd.alpha_prime), sorted(EXPECTED_ALPHA_PRIME * 2))
        )
    record(3, ok, f"D={pd.denominator}, gcd={g}, max={max(pd.alpha_prime)}, min={min(pd.alpha_prime)}, "
                  f"multiset {'equal' if got == expected else 'differs'}")
    assert ok


def test_criterion_04_gap_label(pd):
    m = gap_module(pd.alpha_prime, pd.denominator, 5)
    ok = m == FreqModule(Fraction(1, 264), 5) and str(m) == "(1/264)·Z[1/5]"
    record(4, ok, str(m))
    assert ok


def test_criterion_05_state_laws(A, pd):
    rng = random.Random(20240501)
    p = lambda e: state(e, pd.alpha_prime, pd.denominator, 5)  # noqa: E731
    unit = p(LimitElement((1,) * 108, 1)) == 1
    invariant = positive = True
    for _ in range(1000):
        n = rng.randint(0, 6)
        k = tuple(rng.randint(-50, 50) for _ in range(108))
        invariant &= p(LimitElement(k, n).advanced(A)) == p(LimitElement(k, n))
        nonneg = tuple(abs(x) for x in k)
        positive &= p(LimitElement(nonneg, n)) >= 0
    ok = unit and invariant and positive
    record(5, ok, f"p(unit)=1 {unit}, invariance on 1000 vectors {invariant}, positivity {positive}")
    assert ok


def test_criterion_06_uncollared(rule):
    classes, a = enumerate_uncollared(rule)
    pd = perron_data(a, 5)
    c4 = chirality_counts(patch(4, rule))
    ok = len(classes) == 2 and a == [[2, 3], [3, 2]] and pd.alpha == (Fraction(1, 2), Fraction(1, 2)) \
        and sorted(c4.values()) == [312, 313]
    record(6, ok, f"matrix {a}, alpha {[str(x) for x in pd.alpha]}, patch(4) chirality {c4[PLUS]}/{c4[MINUS]}")
    assert ok


def test_criterion_07_geometry(rule):
    from pinwheel.geometry import Point

    phi1 = region_of(1, rule) == (Point(-2, 1), Point(2, -1), Point(3, 1))
    phi2 = region_of(2, rule) == (Point(-5, 5), Point(1, -3), Point(5, 0))
    reports, dens = [], True
    for n in range(6):
        p = patch(n, rule)
        reports.append(verify_patch(p).ok)
        dens &= all(5**n % q.denominator == 0 for t in p.tiles for q in (t.rot.c, t.rot.s, t.trans.x, t.trans.y))
    from pinwheel.substitution import tile_set

    nested = all(tile_set(patch(n - 1, rule)) <= tile_set(patch(n, rule)) for n in range(1, 6))
    ok = phi1 and phi2 and all(reports) and dens and nested
    record(7, ok, f"phi {phi1}, phi^2 {phi2}, levels 0-5 valid {all(reports)}, nesting {nested}, 5^n denominators {dens}")
    assert ok


def _snf_checked(m) -> bool:
    res = snf(m)
    if not verify(m, res):
        return False
    return abs(_det(res.U.tolist())) == 1 and abs(_det(res.V.tolist())) == 1


def test_criterion_08_complex_validity(b0, k0, A, rule):
    zero = check_boundaries(b0) and check_boundaries(k0) and not np.any(b0.d1 @ b0.d2)
    faces = b0.counts[2] == 864
    produced = []
    euler = True
    for cx in (b0, k0):
        h = cohomology(cx)
        produced += [verify(d, s) for d, s in zip(h.delta, h.snfs)]
        euler &= sum((-1) ** k * r for k, r in enumerate(h.betti())) == cx.euler
    small = np.array([[a - 5 * (i == j) for j, a in enumerate(row)] for i, row in enumerate(A)], dtype=np.int64)
    produced.append(_snf_checked(small))
    rng = np.random.default_rng(8)
    oracle = True
    for k in range(200):
        m = rng.integers(-9, 10, size=(6, 6))
        if k % 3 == 0:
            m[:, 5] = m[:, 0] + 3 * m[:, 1]
        oracle &= _snf_checked(m) and snf(m).invariant_factors == determinantal_invariants(m)
    sub = check_patch_subdivision(patch(3, rule))
    h = cohomology(b0)
    ok = zero and faces and all(produced) and oracle and euler and sub.ok
    record(8, ok, f"d1d2=0 {zero}, faces {b0.counts[2]}, SNF on {len(produced)} produced + 200 random {all(produced) and oracle}, "
                  f"Euler {euler}, level-3 subdivision {sub.ok}; H*(B0) = {', '.join(map(str, h.degrees))}")
    assert ok


def test_criterion_09_frequencies(rule, enum, pd):
    clear_scans()
    t0 = time.perf_counter()
    scan = scan_level(7, rule)
    labels = classify(scan, enum)
    emp = empirical_frequencies(labels.values(), len(enum))
    err = max(abs(a - b) for a, b in zip(emp, pd.alpha))
    dt = time.perf_counter() - t0
    ok = err <= Fraction(2, 100) and dt < 600
    record(9, ok, f"max |freq - alpha| = {float(err):.5f} over {len(labels)} certified tiles (tol 0.02), {dt:.0f}s")
    assert ok


def test_criterion_10_simplex_measures(b1, b0, A, pd):
    f = forgetful_map(b1, b0)
    slots = refinement_to_tiles(f, b1, b0)
    summed = [[sum(s[i][j] for s in slots) for j in range(len(A))] for i in range(len(A))]
    per_slot = all(s == A for s in slots)
    reproduces = summed == [[len(slots) * x for x in row] for row in A]
    states = pushforward_states(f, b1, b0, pd.alpha) == face_states(b0, pd.alpha)
    tile_level = all(
        face_states(b0, pd.alpha)[b0.face_index(j, 0, s)] == pd.alpha[j] for j in range(len(A)) for s in range(len(slots))
    )
    ok = per_slot and reproduces and states and tile_level
    record(10, ok, f"{len(slots)} slots each equal A {per_slot}, sum = {len(slots)}A {reproduces}, "
                   f"simplex states = tile states {states and tile_level}")
    assert ok
