"""First coronas and the enumeration of collared prototiles.

A collared class is a tile together with every tile meeting it, up to direct
isometry.  Classes are discovered by scanning nested patches and certified
complete by a substitution-closure check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from .geometry import (
    MINUS,
    PLUS,
    Point,
    TilePose,
    UnitRotation,
    anchored_encoding,
    normalize,
)
from .patchindex import PatchIndex, touching
from .substitution import SubstitutionRule, patch, split

log = logging.getLogger(__name__)


class BoundaryUncertain(ValueError):
    """The corona of a tile may be cut off by the patch boundary."""


class NonStabilized(RuntimeError):
    pass


class IncompleteEnumeration(RuntimeError):
    pass


@dataclass(frozen=True)
class Corona:
    center: TilePose
    neighbors: tuple[TilePose, ...]
    key: bytes

    @property
    def tiles(self) -> tuple[TilePose, ...]:
        return (self.center,) + self.neighbors

    @classmethod
    def from_tiles(cls, center: TilePose, neighbors) -> Corona:
        tiles = normalize([center, *neighbors], center)
        ref = TilePose(center.chirality)
        rest = tuple(t for t in tiles if t != ref)
        return cls(ref, rest, anchored_encoding(ref.chirality, tiles))

    def mirrored(self) -> Corona:
        return Corona.from_tiles(self.center.mirrored(), [t.mirrored() for t in self.neighbors])


@dataclass
class CollaredClass:
    id: int
    representative: Corona
    chirality_partner: int = -1

    @property
    def key(self) -> bytes:
        return self.representative.key

    @property
    def chirality(self) -> int:
        return self.representative.center.chirality


# -------------------------------------------------------------- signatures
#
# A signature is the integer form of a canonical key: every normalised tile
# as (chirality, c, s, x, y) with each rational as a reduced (num, den) pair,
# preceded by the anchor chirality.  Equal signatures <=> equal canonical keys.


def _red(n: int, d: int) -> tuple[int, int]:
    g = gcd(n, d)
    return (n // g, d // g)


def _scaled_poses(tiles, scale: int):
    return [
        (
            0 if t.chirality == PLUS else 1,
            int(t.rot.c * scale),
            int(t.rot.s * scale),
            int(t.trans.x * scale),
            int(t.trans.y * scale),
        )
        for t in tiles
    ]


def _signature(poses, anchor: int, members, d2: int) -> tuple:
    _, rc, rs, bx, by = poses[anchor]
    out = []
    for j in members:
        ch, c, s, x, y = poses[j]
        dx, dy = x - bx, y - by
        # conj(R_anchor) * R_j and conj(R_anchor) * (B_j - B_anchor)
        out.append((
            ch,
            _red(rc * c + rs * s, d2),
            _red(rc * s - rs * c, d2),
            _red(rc * dx + rs * dy, d2),
            _red(rc * dy - rs * dx, d2),
        ))
    out.sort()
    return (poses[anchor][0], tuple(out))


def signature_tiles(sig) -> list[TilePose]:
    return [
        TilePose(
            PLUS if ch == 0 else MINUS,
            UnitRotation(Fraction(*c), Fraction(*s), check=False),
            Point(Fraction(*x), Fraction(*y)),
        )
        for ch, c, s, x, y in sig[1]
    ]


def mirror_signature(sig) -> tuple:
    anchor, body = sig
    return (1 - anchor, tuple(sorted(
        (1 - ch, c, (-s[0], s[1]), x, (-y[0], y[1])) for ch, c, s, x, y in body
    )))


def corona_of_signature(sig) -> Corona:
    tiles = signature_tiles(sig)
    ref = TilePose(PLUS if sig[0] == 0 else MINUS)
    center = next(t for t in tiles if t == ref)
    return Corona.from_tiles(center, [t for t in tiles if t is not center])


# ------------------------------------------------------------------ scanning


@dataclass
class LevelScan:
    """Corona signatures of every interior-certified tile of ``patch(level)``."""

    level: int
    index: PatchIndex
    signatures: dict[int, tuple] = field(default_factory=dict)
    scale: int = 1

    def class_counts(self) -> dict[tuple, int]:
        out: dict[tuple, int] = {}
        for sig in self.signatures.values():
            out[sig] = out.get(sig, 0) + 1
        return out


_SCANS: dict[tuple[str, int], LevelScan] = {}


def scan_level(n: int, rule: SubstitutionRule, max_level: int = 9) -> LevelScan:
    key = (rule.digest(), n)
    if key in _SCANS:
        return _SCANS[key]
    p = patch(n, rule, max_level)
    idx = PatchIndex(p)
    scale = lcm(*(c.denominator for t in p.tiles for c in (t.rot.c, t.rot.s, t.trans.x, t.trans.y)))
    poses = _scaled_poses(p.tiles, scale)
    d2 = scale * scale
    scan = LevelScan(n, idx, scale=scale)
    for i in range(len(p.tiles)):
        if idx.certified(i):
            scan.signatures[i] = _signature(poses, i, [i, *idx.neighbors(i)], d2)
    _SCANS[key] = scan
    log.info("level %d: %d certified tiles, %d corona classes",
             n, len(scan.signatures), len(set(scan.signatures.values())))
    return scan


def clear_scans() -> None:
    _SCANS.clear()


def first_corona(t: int, p, index: PatchIndex | None = None) -> Corona:
    """Corona of tile ``t`` of patch ``p``; refuses tiles near the boundary."""
    index = index or PatchIndex(p)
    if not index.certified(t):
        raise BoundaryUncertain(f"tile {t} is too close to the level-{p.level} boundary")
    return Corona.from_tiles(p.tiles[t], [p.tiles[j] for j in index.neighbors(t)])


# ----------------------------------------------------------------- children


def _touch_exact(a: TilePose, b: TilePose) -> bool:
    va, vb = a.vertices(), b.vertices()
    den = lcm(*(c.denominator for v in va + vb for c in v))
    ia = [(int(v.x * den), int(v.y * den)) for v in va]
    ib = [(int(v.x * den), int(v.y * den)) for v in vb]
    return touching(ia, ib)


def child_coronas(c: Corona, rule: SubstitutionRule) -> list[Corona]:
    """Coronas of the children of ``c.center`` inside the inflated corona.

    A tile meeting a child of the centre is a child of a tile meeting the
    centre, so the inflated corona always contains the full child corona.
    """
    center_children = split(c.center, rule)
    others = [k for t in c.neighbors for k in split(t, rule)]
    everything = center_children + others
    out = []
    for k, child in enumerate(center_children):
        nbrs = [u for u in everything if u is not child and _touch_exact(child, u)]
        out.append(Corona.from_tiles(child, nbrs))
    return out


def collared_children(c: CollaredClass, classes, rule: SubstitutionRule) -> list[tuple[int, int]]:
    """``(slot, class id)`` for the five children of ``c``, slots numbered from 1."""
    by_key = {k.key: k.id for k in classes}
    out = []
    for slot, cor in enumerate(child_coronas(c.representative, rule), start=1):
        if cor.key not in by_key:
            raise IncompleteEnumeration(f"child {slot} of class {c.id} has an unknown corona")
        out.append((slot, by_key[cor.key]))
    return out


# -------------------------------------------------------------- enumeration


@dataclass
class Enumeration:
    """Collared classes plus the certificate that produced them."""

    classes: list[CollaredClass]
    levels: list[int]
    counts: dict[int, int]
    stable: bool
    closed: bool
    children: list[list[int]]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, i) -> CollaredClass:
        return self.classes[i]

    def by_key(self) -> dict[bytes, int]:
        return {c.key: c.id for c in self.classes}

    def by_signature(self) -> dict[tuple, int]:
        return self._sig_ids

    def chirality_counts(self) -> dict[int, int]:
        out = {PLUS: 0, MINUS: 0}
        for c in self.classes:
            out[c.chirality] += 1
        return out


def _closure(classes: list[CollaredClass], rule: SubstitutionRule):
    by_key = {c.key: c.id for c in classes}
    table, missing = [], []
    for c in classes:
        row = []
        for cor in child_coronas(c.representative, rule):
            if cor.key in by_key:
                row.append(by_key[cor.key])
            else:
                missing.append(cor)
                row.append(-1)
        table.append(row)
    return table, missing


def _make_classes(sigs) -> tuple[list[CollaredClass], dict[tuple, int]]:
    coronas = {sig: corona_of_signature(sig) for sig in sigs}
    order = sorted(coronas, key=lambda s: coronas[s].key)
    classes = [CollaredClass(i, coronas[s]) for i, s in enumerate(order)]
    sig_ids = {s: i for i, s in enumerate(order)}
    for s, i in sig_ids.items():
        partner = sig_ids.get(mirror_signature(s))
        classes[i].chirality_partner = -1 if partner is None else partner
    return classes, sig_ids


def enumerate_collared(rule: SubstitutionRule, start: int = 3, max_level: int = 8) -> Enumeration:
    """Scan ``patch(start), patch(start+1), ...`` until the class set repeats
    on consecutive levels and is closed under substitution."""
    prev = None
    levels, counts = [], {}
    for n in range(start, max_level + 1):
        scan = scan_level(n, rule, max(max_level, n))
        sigs = frozenset(scan.signatures.values())
        levels.append(n)
        counts[n] = len(sigs)
        if prev is not None and sigs == prev:
            classes, sig_ids = _make_classes(sigs)
            table, missing = _closure(classes, rule)
            if not missing:
                e = Enumeration(classes, levels, counts, True, True, table)
                e._sig_ids = sig_ids
                return e
            log.info("level %d: closure failed (%d unseen child coronas)", n, len(missing))
        prev = sigs
    raise NonStabilized(f"no stable, closed class set up to level {max_level}: {counts}")


def enumerate_uncollared(rule: SubstitutionRule) -> tuple[list[int], list[list[int]]]:
    """Classes of bare tiles (chirality only) and their substitution matrix."""
    chiralities = [PLUS, MINUS]
    mat = [[0, 0], [0, 0]]
    for j, ch in enumerate(chiralities):
        for child in split(TilePose(ch), rule):
            mat[chiralities.index(child.chirality)][j] += 1
    return chiralities, mat


def classify(scan: LevelScan, e: Enumeration) -> dict[int, int]:
    """Class id of every certified tile of a scanned patch."""
    ids = e.by_signature()
    return {i: ids[s] for i, s in scan.signatures.items()}
