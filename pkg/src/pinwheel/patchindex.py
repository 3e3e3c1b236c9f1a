"""Spatial index over a leveled patch, in exact scaled-integer coordinates.

All vertices of ``patch(n)`` have denominators dividing ``5**n``; multiplying
by the common denominator turns every predicate into integer arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .substitution import LeveledPatch


def _orient(ax, ay, bx, by, cx, cy) -> int:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _in_closed(px, py, tri) -> bool:
    (ax, ay), (bx, by), (cx, cy) = tri
    d1 = _orient(ax, ay, bx, by, px, py)
    d2 = _orient(bx, by, cx, cy, px, py)
    d3 = _orient(cx, cy, ax, ay, px, py)
    return not ((d1 < 0 or d2 < 0 or d3 < 0) and (d1 > 0 or d2 > 0 or d3 > 0))


def _on_segment(px, py, a, b) -> bool:
    (ax, ay), (bx, by) = a, b
    if _orient(ax, ay, bx, by, px, py) != 0:
        return False
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def touching(ta, tb) -> bool:
    """Closed contact of two triangles whose interiors are disjoint.

    For interior-disjoint convex polygons the contact set is a face, so it
    always contains a vertex of one of them.
    """
    return any(_in_closed(x, y, tb) for x, y in ta) or any(_in_closed(x, y, ta) for x, y in tb)


def _separated(ta, tb) -> bool:
    """Some edge line of ``ta`` has all of ``tb`` on its closed far side."""
    for k in range(3):
        (px, py), (qx, qy), (rx, ry) = ta[k], ta[(k + 1) % 3], ta[(k + 2) % 3]
        side = _orient(px, py, qx, qy, rx, ry)
        if all(_orient(px, py, qx, qy, x, y) * side <= 0 for x, y in tb):
            return True
    return False


def interiors_overlap(ta, tb) -> bool:
    """Separating-axis test on integer triangles (edge normals suffice)."""
    return not (_separated(ta, tb) or _separated(tb, ta))


class PatchIndex:
    def __init__(self, p: LeveledPatch):
        self.patch = p
        dens = [v.x.denominator for t in p.tiles for v in t.vertices()]
        dens += [v.y.denominator for t in p.tiles for v in t.vertices()]
        self.scale = lcm(*dens, *(c.denominator for v in p.region for c in v))
        s = self.scale
        self.verts = [
            tuple((int(v.x * s), int(v.y * s)) for v in t.vertices()) for t in p.tiles
        ]
        self.region = tuple((int(v.x * s), int(v.y * s)) for v in p.region)
        self.cells: dict[tuple[int, int], list[int]] = {}
        for i, tri in enumerate(self.verts):
            for cell in self._cells_of(tri):
                self.cells.setdefault(cell, []).append(i)
        self._nbrs: list[list[int] | None] = [None] * len(self.verts)

    def _cells_of(self, tri):
        s = self.scale
        xs = [x for x, _ in tri]
        ys = [y for _, y in tri]
        for cx in range(min(xs) // s, max(xs) // s + 1):
            for cy in range(min(ys) // s, max(ys) // s + 1):
                yield (cx, cy)

    def __len__(self) -> int:
        return len(self.verts)

    def neighbors(self, i: int) -> list[int]:
        """Indices of all other tiles of the patch meeting tile ``i``."""
        cached = self._nbrs[i]
        if cached is not None:
            return cached
        tri = self.verts[i]
        seen = set()
        for cell in self._cells_of(tri):
            seen.update(self.cells.get(cell, ()))
        seen.discard(i)
        out = sorted(j for j in seen if touching(tri, self.verts[j]))
        self._nbrs[i] = out
        return out

    def overlapping_pairs(self) -> list[tuple[int, int]]:
        out = []
        for members in self.cells.values():
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    i, j = members[a], members[b]
                    if interiors_overlap(self.verts[i], self.verts[j]):
                        out.append((min(i, j), max(i, j)))
        return sorted(set(out))

    def touches_boundary(self, i: int) -> bool:
        r = self.region
        return any(
            _on_segment(x, y, r[k], r[(k + 1) % 3]) for x, y in self.verts[i] for k in range(3)
        )

    def certified(self, i: int) -> bool:
        """Tile ``i`` and every tile of its corona stay off the region boundary."""
        if self.touches_boundary(i):
            return False
        return not any(self.touches_boundary(j) for j in self.neighbors(i))


def verify_patch(p: LeveledPatch):
    """Exact check that the tiles of ``p`` tile its region: congruent right
    triangles inside the region, areas adding up, no interior overlaps."""
    from .substitution import RuleReport

    idx = PatchIndex(p)
    rep = RuleReport()
    s2 = idx.scale**2
    shapes = set()
    right = True
    for (ax, ay), (bx, by), (cx, cy) in idx.verts:
        d = sorted(((ax - bx) ** 2 + (ay - by) ** 2, (bx - cx) ** 2 + (by - cy) ** 2, (cx - ax) ** 2 + (cy - ay) ** 2))
        shapes.add(tuple(Fraction(x, s2) for x in d))
        right &= (ax - bx) * (cx - bx) + (ay - by) * (cy - by) == 0
    rep.add("congruent", shapes == {(1, 4, 5)}, str(shapes))
    rep.add("right angle at the middle vertex", right)
    rep.add("inside region", all(_in_closed(x, y, idx.region) for tri in idx.verts for x, y in tri))
    area = sum(abs(_orient(*a, *b, *c)) for a, b, c in idx.verts)
    rep.add("area", area == abs(_orient(*idx.region[0], *idx.region[1], *idx.region[2])))
    overlaps = idx.overlapping_pairs()
    rep.add("disjoint interiors", not overlaps, f"{len(overlaps)} overlapping pairs" if overlaps else "")
    return rep
