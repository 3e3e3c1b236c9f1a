"""The pinwheel inflation rule and the nested patch generator.

Patches are kept at the inflated scale: ``patch(n)`` tiles the triangle
``phi^n(T)`` with unit tiles, so every later combinatorial step works on
exact Gaussian-rational data.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from hashlib import sha256
from itertools import combinations

from .geometry import (
    MINUS,
    ONE,
    PLUS,
    I,
    Isometry,
    Point,
    REFERENCE,
    TilePose,
    UnitRotation,
    encode_patch,
    interiors_disjoint,
    point_in_triangle,
    side_lengths2,
    signed_area,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_LEVEL = 9
# rough per-tile footprint of a TilePose with Fraction coordinates
BYTES_PER_TILE = 700


class LevelCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class SubstitutionRule:
    """Similarity ``z -> expansion*z + offset`` plus the children of ``phi(T)``.

    ``children`` are listed for the positive reference tile only; the table
    for the mirrored reference is the entrywise conjugate.
    """

    name: str
    expansion: Point
    offset: Point
    children: tuple[TilePose, ...]

    def phi(self, z: Point) -> Point:
        return self.expansion * z + self.offset

    def phi_chiral(self, chirality: int) -> tuple[Point, Point]:
        """Multiplier and offset of the similarity carrying ``V^eps`` to its supertile."""
        if chirality == PLUS:
            return self.expansion, self.offset
        return self.expansion.conj(), self.offset.conj()

    def reference_children(self, chirality: int) -> tuple[TilePose, ...]:
        if chirality == PLUS:
            return self.children
        return tuple(c.mirrored() for c in self.children)

    def supertile(self, chirality: int = PLUS) -> tuple[Point, Point, Point]:
        m, o = self.phi_chiral(chirality)
        ref = REFERENCE if chirality == PLUS else tuple(v.conj() for v in REFERENCE)
        return tuple(m * v + o for v in ref)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "expansion": {"re": _rat(self.expansion.x), "im": _rat(self.expansion.y)},
            "offset": {"re": _rat(self.offset.x), "im": _rat(self.offset.y)},
            "children": [pose_to_json(c) for c in self.children],
        }

    @classmethod
    def from_json(cls, d: dict) -> SubstitutionRule:
        e = d["expansion"]
        o = d.get("offset", {"re": [0, 1], "im": [0, 1]})
        return cls(
            name=d.get("name", "unnamed"),
            expansion=Point(_unrat(e["re"]), _unrat(e["im"])),
            offset=Point(_unrat(o["re"]), _unrat(o["im"])),
            children=tuple(pose_from_json(c) for c in d["children"]),
        )

    def digest(self) -> str:
        """Stable hash of the rule, used to key caches and reports."""
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return sha256(blob.encode()).hexdigest()[:16]


def _rat(q: Fraction) -> list[int]:
    return [q.numerator, q.denominator]


def _unrat(v) -> Fraction:
    num, den = v
    return Fraction(int(num), int(den))


def pose_to_json(t: TilePose) -> dict:
    return {
        "chirality": "+" if t.chirality == PLUS else "-",
        "rot": {"c": _rat(t.rot.c), "s": _rat(t.rot.s)},
        "trans": {"x": _rat(t.trans.x), "y": _rat(t.trans.y)},
    }


def pose_from_json(d: dict) -> TilePose:
    chir = {"+": PLUS, "-": MINUS}[d["chirality"]]
    rot = UnitRotation(_unrat(d["rot"]["c"]), _unrat(d["rot"]["s"]))
    return TilePose(chir, rot, Point(_unrat(d["trans"]["x"]), _unrat(d["trans"]["y"])))


def pinwheel_rule() -> SubstitutionRule:
    """The (1,2)-pinwheel substitution with the reference tile at the centre."""
    return SubstitutionRule(
        name="pinwheel(1,2)",
        expansion=Point(2, -1),
        offset=Point(-2, 1),
        children=(
            TilePose(PLUS, ONE, Point(0, 0)),
            TilePose(MINUS, ONE, Point(-2, 1)),
            TilePose(PLUS, UnitRotation(-1, 0), Point(2, 1)),
            TilePose(MINUS, ONE, Point(0, 0)),
            TilePose(MINUS, I, Point(2, -1)),
        ),
    )


# ---------------------------------------------------------------- validation


@dataclass
class RuleReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    @property
    def failures(self) -> list[str]:
        return [name for name, ok, _ in self.checks if not ok]

    def __str__(self) -> str:
        return "\n".join(
            f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
            for name, ok, detail in self.checks
        )


def check_decomposition(region, tiles) -> RuleReport:
    """Exact test that ``tiles`` (vertex triples) tile the triangle ``region``."""
    rep = RuleReport()
    shapes = [side_lengths2(t) for t in tiles]
    distinct = sorted({":".join(map(str, s)) for s in shapes})
    rep.add("congruent", all(s == (5, 4, 1) for s in shapes), "side lengths^2 " + ", ".join(distinct))
    rep.add("right angle", all(_right_angle(t) for t in tiles))
    inside = all(point_in_triangle(p, region) for t in tiles for p in t)
    rep.add("inside region", inside)
    total = sum(abs(signed_area(t)) for t in tiles)
    target = abs(signed_area(region))
    rep.add("area", total == target, f"{total} vs {target}")
    overlaps = [(i, j) for i, j in combinations(range(len(tiles)), 2)
                if not interiors_disjoint(tiles[i], tiles[j])]
    rep.add("disjoint interiors", not overlaps, f"overlapping pairs {overlaps}" if overlaps else "")
    return rep


def _right_angle(t) -> bool:
    a, b, c = t
    u, v = a - b, c - b
    return u.x * v.x + u.y * v.y == 0


def validate_rule(r: SubstitutionRule) -> RuleReport:
    """Check every invariant of a rule exactly; never raises on a bad rule."""
    rep = RuleReport()
    rep.add("expansion |m|^2 = #children", r.expansion.norm2() == len(r.children),
            f"|m|^2={r.expansion.norm2()}, children={len(r.children)}")
    for chir, label in ((PLUS, "+"), (MINUS, "-")):
        region = r.supertile(chir)
        tiles = [c.vertices() for c in r.reference_children(chir)]
        sub = check_decomposition(region, tiles)
        for name, ok, detail in sub.checks:
            rep.add(f"{label} reference: {name}", ok, detail)
    return rep


# ------------------------------------------------------------------ patches


@dataclass(frozen=True)
class LeveledPatch:
    level: int
    tiles: tuple[TilePose, ...]
    region: tuple[Point, Point, Point]

    def __len__(self) -> int:
        return len(self.tiles)

    def to_json(self) -> dict:
        return {"level": self.level, "tiles": [pose_to_json(t) for t in self.tiles]}


def patch_from_json(d: dict, rule: SubstitutionRule | None = None) -> LeveledPatch:
    rule = rule or pinwheel_rule()
    level = int(d["level"])
    return LeveledPatch(level, tuple(pose_from_json(t) for t in d["tiles"]), region_of(level, rule))


def region_of(level: int, rule: SubstitutionRule) -> tuple[Point, Point, Point]:
    pts = REFERENCE
    for _ in range(level):
        pts = tuple(rule.phi(p) for p in pts)
    return pts


def supertile_frame(t: TilePose, rule: SubstitutionRule) -> Isometry:
    """Direct isometry ``h`` with ``phi(t) = h(reference supertile of t's chirality)``."""
    m, o = rule.expansion, rule.offset
    me, oe = rule.phi_chiral(t.chirality)
    ratio = m * t.rot / me
    rot = UnitRotation(ratio.x, ratio.y, check=False)
    trans = m * t.rot * (-oe / me) + m * t.trans + o
    return Isometry(False, rot, trans)


def split(t: TilePose, rule: SubstitutionRule) -> list[TilePose]:
    """The children of the inflated tile ``phi(t)``, in table order."""
    h = supertile_frame(t, rule)
    return [c.moved(h) for c in rule.reference_children(t.chirality)]


def expand(p: LeveledPatch, rule: SubstitutionRule) -> LeveledPatch:
    tiles = []
    for t in p.tiles:
        tiles.extend(split(t, rule))
    return LeveledPatch(p.level + 1, tuple(tiles), tuple(rule.phi(v) for v in p.region))


def memory_estimate(n: int, rule: SubstitutionRule) -> int:
    k = rule.expansion.norm2()
    return int(k ** n) * BYTES_PER_TILE


_PATCH_CACHE: dict[tuple[str, int], LeveledPatch] = {}


def patch(n: int, rule: SubstitutionRule | None = None, max_level: int = DEFAULT_MAX_LEVEL) -> LeveledPatch:
    """Level-``n`` patch: ``|children|^n`` tiles tiling ``phi^n(T)``.

    Results are memoised per rule; the level-``n`` patch is built by
    expanding the memoised level ``n-1`` patch.
    """
    rule = rule or pinwheel_rule()
    if n < 0:
        raise ValueError("level must be non-negative")
    if n > max_level:
        raise LevelCapExceeded(f"level {n} exceeds configured maximum {max_level}")
    key = (rule.digest(), n)
    if key in _PATCH_CACHE:
        return _PATCH_CACHE[key]
    if n == 0:
        p = LeveledPatch(0, (TilePose(PLUS),), REFERENCE)
    else:
        prev = patch(n - 1, rule, max_level)
        if n >= 6:
            log.info("generating level %d patch (~%.0f MB)", n, memory_estimate(n, rule) / 2**20)
        p = expand(prev, rule)
    _PATCH_CACHE[key] = p
    return p


def clear_cache() -> None:
    _PATCH_CACHE.clear()


def tile_set(p: LeveledPatch) -> set[bytes]:
    return {encode_patch([t]) for t in p.tiles}


def chirality_counts(p: LeveledPatch) -> dict[int, int]:
    out = {PLUS: 0, MINUS: 0}
    for t in p.tiles:
        out[t.chirality] += 1
    return out
