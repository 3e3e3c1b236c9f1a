"""Approximant cell complexes glued from collared supertiles.

Each collared class contributes one copy of its (level-``l``) supertile, cut
into cells by a fixed tile structure.  Cells are identified whenever they
coincide in some pair of adjacent supertiles that actually occurs, so the
adjacency configurations have to be collected first (and certified complete
by a substitution-closure check, exactly as for coronas).

Two tile structures are provided:

* ``SIMPLICIAL``: the 8-triangle subdivision (10 vertices, 17 edges);
* ``POLYGONAL``: the tile as a single 16-gon with vertices every quarter
  along each leg and along the hypotenuse.  Inflation maps it cellularly
  onto the children's structures, which is what the substitution action on
  cohomology needs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm

import numpy as np

from .corona import Enumeration, LevelScan, _scaled_poses, _signature, _touch_exact, classify, scan_level, signature_tiles
from .geometry import MINUS, PLUS, REFERENCE, Isometry, Point, TilePose, on_segment, orient, point_in_triangle, point_strictly_inside
from .patchindex import PatchIndex
from .perron import rank as int_rank
from .snf import SNFResult, matmul, snf
from .substitution import LeveledPatch, SubstitutionRule, split

log = logging.getLogger(__name__)


class NonSimplicialAdjacency(ValueError):
    """Touching tiles whose cell structures do not match along the contact."""


class NonCellular(ValueError):
    """A cell map fails to commute with the boundary operators."""


class GluingIncomplete(RuntimeError):
    pass


# ----------------------------------------------------------- tile structures


@dataclass(frozen=True)
class TileStructure:
    """A cell structure on the ``+`` reference tile; ``-`` tiles use its mirror image."""

    name: str
    vertices: tuple[Point, ...]
    edges: tuple[tuple[int, int], ...]
    faces: tuple[tuple[int, ...], ...]  # counterclockwise vertex cycles

    def face_boundary(self, f: int) -> list[tuple[int, int]]:
        """``(edge, sign)`` around face ``f``; sign +1 when the edge runs along the cycle."""
        index = {e: k for k, e in enumerate(self.edges)}
        cyc = self.faces[f]
        out = []
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if (a, b) in index:
                out.append((index[(a, b)], 1))
            else:
                out.append((index[(b, a)], -1))
        return out

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edges), len(self.faces)


def _structure(name, vertices, faces) -> TileStructure:
    oriented = []
    for cyc in faces:
        pts = [vertices[k] for k in cyc]
        area = sum(orient(pts[0], pts[k], pts[k + 1]) for k in range(1, len(pts) - 1))
        oriented.append(tuple(cyc) if area > 0 else tuple(reversed(cyc)))
    edges = sorted({tuple(sorted((a, b))) for cyc in oriented for a, b in zip(cyc, cyc[1:] + cyc[:1])})
    return TileStructure(name, tuple(vertices), tuple(edges), tuple(oriented))


_H = Fraction(1, 2)
_Q = Fraction(1, 4)

# corners (long end, right angle, short end); long leg at 1/4, 1/2, 3/4 from the
# long end; short-leg midpoint; hypotenuse at 1/4, 1/2, 3/4 from the long end
_SIMPLEX_VERTS = (
    Point(0, 0), Point(2, 0), Point(2, 1),
    Point(_H, 0), Point(1, 0), Point(3 * _H, 0),
    Point(2, _H),
    Point(_H, _Q), Point(1, _H), Point(3 * _H, 3 * _Q),
)
# swept from the right-angle corner towards the long end
_SIMPLEX_FACES = (
    (1, 6, 5), (6, 2, 5), (2, 9, 5), (5, 9, 4),
    (9, 8, 4), (4, 8, 3), (8, 7, 3), (3, 7, 0),
)
SIMPLICIAL = _structure("simplicial", _SIMPLEX_VERTS, _SIMPLEX_FACES)


def _polygon_boundary() -> list[Point]:
    pts = [Point(Fraction(k, 4), 0) for k in range(8)]        # long leg
    pts += [Point(2, Fraction(k, 4)) for k in range(4)]       # short leg
    pts += [Point(2 - Fraction(k, 2), 1 - Fraction(k, 4)) for k in range(4)]  # hypotenuse
    return pts


_POLY = _polygon_boundary()
POLYGONAL = _structure("polygonal", tuple(_POLY), (tuple(range(len(_POLY))),))

STRUCTURES = {s.name: s for s in (SIMPLICIAL, POLYGONAL)}


@dataclass(frozen=True)
class TileSubdivision:
    vertices: tuple[Point, ...]
    triangles: tuple[tuple[int, int, int], ...]
    barycenters: tuple[Point, ...]


def subdivide(t: TilePose) -> TileSubdivision:
    """The 8-triangle subdivision carried by the tile's pose.

    Vertex triples keep the reference order, so they run counterclockwise on
    ``+`` tiles and clockwise on ``-`` tiles.
    """
    g = t.isometry()
    verts = tuple(g.apply(v) for v in SIMPLICIAL.vertices)
    bary = tuple(
        Point(sum((verts[k].x for k in f), Fraction(0)) / 3, sum((verts[k].y for k in f), Fraction(0)) / 3)
        for f in SIMPLICIAL.faces
    )
    return TileSubdivision(verts, SIMPLICIAL.faces, bary)


def punctuation(t: TilePose) -> Point:
    """Foot of the perpendicular bisector of the hypotenuse on the long leg."""
    return t.isometry().apply(Point(Fraction(3, 2), Fraction(1, 2)))


def subdivision_ok(t: TilePose) -> bool:
    """Exact check that the 8 triangles tile ``t``: positive areas summing to
    the tile area and pairwise disjoint interiors."""
    from .geometry import interiors_disjoint, signed_area

    s = subdivide(t)
    tris = [[s.vertices[k] for k in f] for f in s.triangles]
    areas = [abs(signed_area(tr)) for tr in tris]
    if any(a == 0 for a in areas) or sum(areas) != abs(signed_area(t.vertices())):
        return False
    if not all(all(point_in_triangle(v, t.vertices()) for v in tr) for tr in tris):
        return False
    return all(interiors_disjoint(a, b) for a, b in combinations(tris, 2))


# ------------------------------------------------------- adjacency configs
#
# A configuration (i, j, rel) says: a tile of collared class i at its
# reference pose touches a tile of class j at relative pose rel.


Config = tuple[int, int, tuple]


def adjacency_configs(scan: LevelScan, e: Enumeration) -> set[Config]:
    labels = classify(scan, e)
    p = scan.index.patch
    poses = _scaled_poses(p.tiles, scan.scale)
    d2 = scan.scale**2
    out = set()
    for a, ca in labels.items():
        for b in scan.index.neighbors(a):
            cb = labels.get(b)
            if cb is not None:
                out.add((ca, cb, _signature(poses, a, [b], d2)[1][0]))
    return out


def config_pose(rel) -> TilePose:
    return signature_tiles((0, (rel,)))[0]


def _relative(a: TilePose, b: TilePose) -> tuple:
    g = Isometry(False, a.rot.conj(), -(a.rot.conj() * a.trans))
    t = b.moved(g)
    return (
        0 if t.chirality == PLUS else 1,
        _pair(t.rot.c), _pair(t.rot.s), _pair(t.trans.x), _pair(t.trans.y),
    )


def _pair(q: Fraction) -> tuple[int, int]:
    return (q.numerator, q.denominator)


def configs_closed(configs: set[Config], e: Enumeration, rule: SubstitutionRule) -> list[Config]:
    """Configurations produced by substituting the given ones (and sibling
    pairs) that are missing from the set; empty means the set is closed."""
    missing = set()
    for c in e:
        kids = split(TilePose(c.chirality), rule)
        for (x, a), (y, b) in combinations(enumerate(kids), 2):
            if _touch_exact(a, b):
                for u, v, s, t in ((x, y, a, b), (y, x, b, a)):
                    cfg = (e.children[c.id][u], e.children[c.id][v], _relative(s, t))
                    if cfg not in configs:
                        missing.add(cfg)
    for i, j, rel in configs:
        ka = split(TilePose(e[i].chirality), rule)
        kb = split(config_pose(rel), rule)
        for x, a in enumerate(ka):
            for y, b in enumerate(kb):
                if _touch_exact(a, b):
                    cfg = (e.children[i][x], e.children[j][y], _relative(a, b))
                    if cfg not in configs:
                        missing.add(cfg)
    return sorted(missing)


@dataclass
class Adjacency:
    configs: list[Config]
    levels: list[int]
    stable: bool
    closed: bool


def collect_adjacency(e: Enumeration, rule: SubstitutionRule, start: int | None = None, max_level: int = 8) -> Adjacency:
    """Scan levels until the configuration set repeats, then certify closure."""
    start = start or max(e.levels[-1] - 1, 1)
    prev, levels = None, []
    for n in range(start, max_level + 1):
        cur = adjacency_configs(scan_level(n, rule, max(n, max_level)), e)
        levels.append(n)
        if cur == prev:
            missing = configs_closed(cur, e, rule)
            if not missing:
                return Adjacency(sorted(cur), levels, True, True)
            log.info("adjacency configs at level %d not closed (%d missing)", n, len(missing))
        prev = cur
    raise GluingIncomplete(f"adjacency configurations did not stabilise by level {max_level}")


# ------------------------------------------------------------ union-find


class _UnionFind:
    """Union-find with a parity bit per element (edge orientation)."""

    def __init__(self):
        self.parent: dict = {}
        self.parity: dict = {}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.parity[x] = 0

    def find(self, x):
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        # compress, accumulating parity towards the root
        acc = 0
        for y in reversed(path):
            acc ^= self.parity[y]
            self.parity[y] = acc
            self.parent[y] = x
        return x

    def parity_of(self, x) -> int:
        self.find(x)
        return self.parity[x] if self.parent[x] != x else 0

    def union(self, a, b, rel: int = 0) -> None:
        ra, rb = self.find(a), self.find(b)
        pa, pb = self.parity_of(a), self.parity_of(b)
        if ra == rb:
            if pa ^ pb != rel:
                raise NonSimplicialAdjacency(f"cell {a} is glued to itself with reversed orientation")
            return
        self.parent[rb] = ra
        self.parity[rb] = pa ^ pb ^ rel


# ---------------------------------------------------------------- complex


@dataclass
class CellComplex:
    level: int
    structure: TileStructure
    orientation: str
    supertiles: list[list[TilePose]]
    member_classes: list[list[int]]
    # per dimension: occurrence (class j, member m, local cell) -> (cell, sign)
    cell_of: list[dict] = field(default_factory=list)
    occurrences: list[list[list[tuple]]] = field(default_factory=list)
    d1: np.ndarray | None = None
    d2: np.ndarray | None = None

    @property
    def counts(self) -> tuple[int, int, int]:
        return tuple(len(o) for o in self.occurrences)

    @property
    def euler(self) -> int:
        v, e, f = self.counts
        return v - e + f

    def face_index(self, j: int, m: int, f: int) -> int:
        return self.cell_of[2][(j, m, f)][0]

    def connected_components(self) -> int:
        uf = _UnionFind()
        for v in range(self.counts[0]):
            uf.add(v)
        for col in self.d1.T:
            nz = np.nonzero(col)[0]
            if len(nz) == 2:
                uf.union(int(nz[0]), int(nz[1]))
        return len({uf.find(v) for v in range(self.counts[0])})

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "structure": self.structure.name,
            "orientation": self.orientation,
            "counts": list(self.counts),
            "boundary1": _sparse(self.d1),
            "boundary2": _sparse(self.d2),
        }


def _sparse(m: np.ndarray) -> dict:
    rows, cols = np.nonzero(m)
    return {"shape": list(m.shape), "entries": [[int(r), int(c), int(m[r, c])] for r, c in zip(rows, cols)]}


def supertile_members(chirality: int, level: int, rule: SubstitutionRule, pose: TilePose | None = None) -> list[TilePose]:
    tiles = [pose or TilePose(chirality)]
    for _ in range(level):
        tiles = [k for t in tiles for k in split(t, rule)]
    return tiles


def member_classes(e: Enumeration, level: int) -> list[list[int]]:
    out = []
    for c in e:
        ids = [c.id]
        for _ in range(level):
            ids = [k for i in ids for k in e.children[i]]
        out.append(ids)
    return out


def _cells_of_tile(t: TilePose, s: TileStructure):
    g = t.isometry()
    pts = [g.apply(v) for v in s.vertices]
    return pts


def check_contact(ta: TilePose, pa, tb: TilePose, pb) -> None:
    """Every structure vertex of one tile lying on the other's boundary must be
    a structure vertex of the other, and vice versa."""
    for (t1, p1), (t2, p2) in (((ta, pa), (tb, pb)), ((tb, pb), (ta, pa))):
        verts = t2.vertices()
        own = set(p2)
        for v in p1:
            if v in own:
                continue
            if any(on_segment(v, verts[k], verts[(k + 1) % 3]) for k in range(3)):
                raise NonSimplicialAdjacency(f"vertex {v} of {t1} is not a vertex of touching tile {t2}")
            if point_strictly_inside(v, verts):
                raise NonSimplicialAdjacency(f"tiles {t1} and {t2} overlap")


def build_complex(
    e: Enumeration,
    adjacency: Adjacency,
    rule: SubstitutionRule,
    level: int = 0,
    structure: TileStructure = SIMPLICIAL,
    orientation: str = "plane",
    check: bool | None = None,
) -> CellComplex:
    """Glue one level-``level`` supertile per collared class.

    ``orientation`` is ``"plane"`` (every 2-cell counterclockwise in the
    plane) or ``"chiral"`` (the reference cycle carried by the tile's pose,
    so clockwise on ``-`` tiles).  ``check`` runs the vertex-matching test on
    every touching pair; it defaults to on for level 0, where the touching
    pairs are exactly the adjacency configurations.
    """
    if orientation not in ("plane", "chiral"):
        raise ValueError(f"unknown orientation {orientation!r}")
    check = level == 0 if check is None else check
    members = [supertile_members(c.chirality, level, rule) for c in e]
    mclass = member_classes(e, level)
    nv, ne, nf = structure.counts

    uf_v, uf_e = _UnionFind(), _UnionFind()
    for j, ms in enumerate(members):
        for m in range(len(ms)):
            for v in range(nv):
                uf_v.add((j, m, v))
            for k in range(ne):
                uf_e.add((j, m, k))

    local_pts = {j: [_cells_of_tile(t, structure) for t in ms] for j, ms in enumerate(members)}
    # exact integer coordinates: coincidence tests only ever compare points of one scene
    scale = lcm(*(c.denominator for pts in local_pts.values() for ps in pts for p in ps for c in p))
    int_pts = {j: [[(int(p.x * scale), int(p.y * scale)) for p in ps] for ps in pts] for j, pts in local_pts.items()}

    def placed_points(j, m, g):
        """Integer keys of member ``m`` of class ``j`` moved by ``g`` (``None`` = identity)."""
        if g is None:
            return int_pts[j][m]
        rc, rs, dr = _common(g.rot.c, g.rot.s)
        tx, ty, dt = _common(g.trans.x, g.trans.y)
        ox, oy = tx * scale * dr, ty * scale * dr
        return [((rc * x - rs * y) * dt + ox, (rs * x + rc * y) * dt + oy) for x, y in int_pts[j][m]]

    def glue(scene):
        """``scene``: list of (class j, isometry placing j's supertile), the
        first one at the identity."""
        by_point: dict[tuple, tuple] = {}
        by_edge: dict[frozenset, tuple] = {}
        g = scene[-1][1]
        factor = 1
        if g is not None:
            factor = _common(g.rot.c, g.rot.s)[2] * _common(g.trans.x, g.trans.y)[2]
        for j, g in scene:
            for m in range(len(members[j])):
                pts = placed_points(j, m, g)
                if g is None and factor != 1:
                    pts = [(x * factor, y * factor) for x, y in pts]
                for v, p in enumerate(pts):
                    occ = (j, m, v)
                    if p in by_point:
                        uf_v.union(by_point[p], occ)
                    else:
                        by_point[p] = occ
                for k, (a, b) in enumerate(structure.edges):
                    key = frozenset((pts[a], pts[b]))
                    occ = (j, m, k)
                    if key in by_edge:
                        first, start = by_edge[key]
                        uf_e.union(first, occ, 0 if start == pts[a] else 1)
                    else:
                        by_edge[key] = (occ, pts[a])
        if check:
            placed = []
            for j, g in scene:
                for m, t in enumerate(members[j]):
                    pts = local_pts[j][m]
                    placed.append((t, pts) if g is None else (t.moved(g), [g.apply(p) for p in pts]))
            for (ta, pa), (tb, pb) in combinations(placed, 2):
                if _touch_exact(ta, tb):
                    check_contact(ta, pa, tb, pb)

    for j in range(len(members)):
        glue([(j, None)])
    for i, j, rel in adjacency.configs:
        pose = config_pose(rel)
        # direct isometry taking j's reference tile to the configured pose
        ref = TilePose(pose.chirality)
        g = Isometry(False, pose.rot, pose.trans)
        if ref.moved(g) != pose:
            raise AssertionError("configuration pose is not a direct image of its reference")
        gl = g
        for _ in range(level):
            gl = _conjugate_by_phi(gl, rule)
        glue([(i, None), (j, gl)])

    cx = CellComplex(level, structure, orientation, members, mclass)
    # vertices
    v_occ = sorted(uf_v.parent)
    v_classes = _number(v_occ, uf_v)
    cx.cell_of.append({o: (v_classes[uf_v.find(o)], 1) for o in v_occ})
    # edges: smallest endpoint class first; loops keep the smallest occurrence's direction
    e_occ = sorted(uf_e.parent)
    e_classes = _number(e_occ, uf_e)
    first = {}
    for o in e_occ:
        first.setdefault(uf_e.find(o), o)
    edge_cells = {}
    for o in e_occ:
        root = uf_e.find(o)
        j, m, k = first[root]
        a, b = structure.edges[k]
        ca, cb = cx.cell_of[0][(j, m, a)][0], cx.cell_of[0][(j, m, b)][0]
        base = -1 if ca > cb else 1
        rel = uf_e.parity_of(o) ^ uf_e.parity_of(first[root])
        edge_cells[o] = (e_classes[root], base * (-1 if rel else 1))
    cx.cell_of.append(edge_cells)
    faces = {}
    n = 0
    for j, ms in enumerate(members):
        for m in range(len(ms)):
            for f in range(nf):
                faces[(j, m, f)] = (n, 1)
                n += 1
    cx.cell_of.append(faces)
    cx.occurrences = []
    for d in range(3):
        size = 1 + max(c for c, _ in cx.cell_of[d].values())
        occ = [[] for _ in range(size)]
        for o, (c, _) in sorted(cx.cell_of[d].items()):
            occ[c].append(o)
        cx.occurrences.append(occ)
    cx.d1, cx.d2 = _boundaries(cx)
    return cx


def _common(a: Fraction, b: Fraction) -> tuple[int, int, int]:
    d = lcm(a.denominator, b.denominator)
    return int(a * d), int(b * d), d


def _conjugate_by_phi(g: Isometry, rule: SubstitutionRule) -> Isometry:
    """``phi g phi^-1``: the placement of the inflated supertile."""
    m, o = rule.expansion, rule.offset
    rot = g.rot
    # phi(g(phi^-1 z)) = rot z + m*trans + o - rot*o
    trans = m * g.trans + o - rot * o
    return Isometry(False, rot, trans)


def _number(occ, uf) -> dict:
    out = {}
    for o in occ:
        r = uf.find(o)
        if r not in out:
            out[r] = len(out)
    return out


def _boundaries(cx: CellComplex) -> tuple[np.ndarray, np.ndarray]:
    s = cx.structure
    nv, ne, nf = cx.counts
    d1 = np.zeros((nv, ne), dtype=np.int64)
    for c, occs in enumerate(cx.occurrences[1]):
        j, m, k = occs[0]
        sign = cx.cell_of[1][occs[0]][1]
        a, b = s.edges[k]
        d1[cx.cell_of[0][(j, m, b)][0], c] += sign
        d1[cx.cell_of[0][(j, m, a)][0], c] -= sign
    d2 = np.zeros((ne, nf), dtype=np.int64)
    for (j, m, f), (c, _) in cx.cell_of[2].items():
        chir = cx.supertiles[j][m].chirality
        # the reference cycle is counterclockwise; a reflection reverses it
        flip = chir if cx.orientation == "plane" else 1
        for k, sgn in s.face_boundary(f):
            ec, es = cx.cell_of[1][(j, m, k)]
            d2[ec, c] += flip * sgn * es
    return d1, d2


def check_boundaries(cx: CellComplex) -> bool:
    return not np.any(matmul(cx.d1, cx.d2))


# --------------------------------------------------------- concrete patches


@dataclass
class PatchSubdivisionReport:
    triangles: int
    interior_edges: int
    boundary_edges: int
    ok: bool
    problems: list[str]


def check_patch_subdivision(p: LeveledPatch, index: PatchIndex | None = None) -> PatchSubdivisionReport:
    """Union of all tile subdivisions of a patch: every edge must bound two
    triangles, or one when it lies on the patch boundary, and touching tiles
    must share their contact vertices."""
    index = index or PatchIndex(p)
    subs = [subdivide(t) for t in p.tiles]
    problems = []
    count: dict[frozenset, int] = {}
    for s in subs:
        for tri in s.triangles:
            for a, b in zip(tri, tri[1:] + tri[:1]):
                key = frozenset((s.vertices[a], s.vertices[b]))
                count[key] = count.get(key, 0) + 1
    for i, t in enumerate(p.tiles):
        for j in index.neighbors(i):
            if j > i:
                try:
                    check_contact(t, subs[i].vertices, p.tiles[j], subs[j].vertices)
                except NonSimplicialAdjacency as exc:
                    problems.append(str(exc))
    region = p.region
    interior = boundary = 0
    for key, c in count.items():
        a, b = tuple(key)
        on_bd = any(on_segment(a, region[k], region[(k + 1) % 3]) and on_segment(b, region[k], region[(k + 1) % 3]) for k in range(3))
        if on_bd:
            boundary += 1
            if c != 1:
                problems.append(f"boundary edge {a}-{b} in {c} triangles")
        else:
            interior += 1
            if c != 2:
                problems.append(f"interior edge {a}-{b} in {c} triangles")
    return PatchSubdivisionReport(sum(len(s.triangles) for s in subs), interior, boundary, not problems, problems)


# ------------------------------------------------------------- cohomology


@dataclass
class Degree:
    rank: int
    torsion: list[int]

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": self.torsion}

    def __str__(self) -> str:
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


@dataclass
class Cohomology:
    degrees: list[Degree]
    delta: list[np.ndarray]  # coboundaries delta^0, delta^1
    snfs: list[SNFResult]  # SNF of delta^0, delta^1
    coker_presentation: list[int]  # invariant factors of delta^1 (H^2 = coker)

    def betti(self) -> list[int]:
        return [d.rank for d in self.degrees]

    def to_json(self) -> dict:
        return {
            f"H{k}": d.to_json() for k, d in enumerate(self.degrees)
        } | {
            "H2_relations": {
                "generators": int(self.delta[1].shape[0]),
                "rank": len(self.coker_presentation),
                "factors_above_1": [f for f in self.coker_presentation if f != 1],
            }
        }


def cohomology(cx: CellComplex) -> Cohomology:
    """Integer cohomology of the cochain complex ``C^0 -> C^1 -> C^2``."""
    d0, d1 = cx.d1.T.copy(), cx.d2.T.copy()
    s0, s1 = snf(d0), snf(d1)
    nv, ne, nf = cx.counts
    r0, r1 = s0.rank, s1.rank
    degrees = [
        Degree(nv - r0, []),
        Degree(ne - r1 - r0, s0.torsion),
        Degree(nf - r1, s1.torsion),
    ]
    return Cohomology(degrees, [d0, d1], [s0, s1], s1.invariant_factors)


# ---------------------------------------------------------- cellular maps


@dataclass
class ChainMap:
    """Integer matrices ``F_k: C_k(source) -> C_k(target)`` for ``k = 0, 1, 2``."""

    maps: list[np.ndarray]

    def commutes(self, source: CellComplex, target: CellComplex) -> bool:
        f0, f1, f2 = self.maps
        return (
            np.array_equal(matmul(target.d1, f1), matmul(f0, source.d1))
            and np.array_equal(matmul(target.d2, f2), matmul(f1, source.d2))
        )

    def then(self, other: ChainMap) -> ChainMap:
        """``other`` after ``self``."""
        return ChainMap([matmul(b, a) for a, b in zip(self.maps, other.maps)])


def forgetful_map(b1: CellComplex, b0: CellComplex) -> ChainMap:
    """Each cell of a level-1 supertile goes to the same-shape cell of the
    tile class it sits in."""
    if b1.structure != b0.structure or b1.orientation != b0.orientation:
        raise ValueError("complexes use different tile structures")
    maps = []
    for d in range(3):
        mat = np.zeros((b0.counts[d], b1.counts[d]), dtype=np.int64)
        for c, occs in enumerate(b1.occurrences[d]):
            image = None
            for j, m, k in occs:
                cls = b1.member_classes[j][m]
                s1 = b1.cell_of[d][(j, m, k)][1]
                tgt, s0 = b0.cell_of[d][(cls, 0, k)]
                im = (tgt, s1 * s0)
                if image is None:
                    image = im
                elif image != im:
                    raise NonCellular(f"{d}-cell {c} of the level-1 complex has two different images")
            mat[image[0], c] = image[1]
        maps.append(mat)
    f = ChainMap(maps)
    if not f.commutes(b1, b0):
        raise NonCellular("forgetful map does not commute with the boundaries")
    return f


def inflation_map(k0: CellComplex, k1: CellComplex, rule: SubstitutionRule) -> ChainMap:
    """Inflation ``z -> phi(z)`` as a cellular map from tiles to supertiles.

    Only cellular when ``phi`` sends every structure vertex of a tile to a
    structure vertex of a child (true for ``POLYGONAL``)."""
    s = k0.structure
    nv, ne, nf = s.counts
    f0 = np.zeros((k1.counts[0], k0.counts[0]), dtype=np.int64)
    f1 = np.zeros((k1.counts[1], k0.counts[1]), dtype=np.int64)
    f2 = np.zeros((k1.counts[2], k0.counts[2]), dtype=np.int64)
    done = set()
    for i, ms in enumerate(k1.supertiles):
        tile = k0.supertiles[i][0]
        pts0 = [rule.phi(p) for p in _cells_of_tile(tile, s)]
        kids = [_cells_of_tile(t, s) for t in ms]
        at = {}
        for m, pts in enumerate(kids):
            for v, p in enumerate(pts):
                at.setdefault(p, (i, m, v))
        for v, p in enumerate(pts0):
            if p not in at:
                raise NonCellular(f"inflated vertex {p} of class {i} is not a vertex of a child")
            src = k0.cell_of[0][(i, 0, v)][0]
            tgt = k1.cell_of[0][at[p]][0]
            _set(f0, tgt, src, 1)
        for k, (a, b) in enumerate(s.edges):
            src, ssign = k0.cell_of[1][(i, 0, k)]
            pa, pb = pts0[a], pts0[b]
            col = np.zeros(k1.counts[1], dtype=np.int64)
            for m, pts in enumerate(kids):
                for kk, (x, y) in enumerate(s.edges):
                    px, py = pts[x], pts[y]
                    if on_segment(px, pa, pb) and on_segment(py, pa, pb):
                        c, cs = k1.cell_of[1][(i, m, kk)]
                        d, u = py - px, pb - pa
                        col[c] += (1 if d.x * u.x + d.y * u.y > 0 else -1) * cs
            col *= ssign
            if src in done:
                if not np.array_equal(f1[:, src], col):
                    raise NonCellular(f"edge {src} has two different inflated images")
            else:
                f1[:, src] = col
                done.add(src)
        for f in range(nf):
            src = k0.face_index(i, 0, f)
            for m, t in enumerate(ms):
                sign = 1 if k0.orientation == "plane" else tile.chirality * t.chirality
                f2[k1.face_index(i, m, f), src] = sign
    h = ChainMap([f0, f1, f2])
    if not h.commutes(k0, k1):
        raise NonCellular("inflation map does not commute with the boundaries")
    return h


def _set(mat, r, c, v):
    if mat[r, c] not in (0, v):
        raise NonCellular("conflicting images for a vertex")
    mat[r, c] = v


# ---------------------------------------------------- action on cohomology


@dataclass
class CohomologyAction:
    degree: int
    matrix: list[list[int]]  # on a basis of H^degree / torsion
    rank_sequence: list[int]  # rank of M^k, k = 1, 2, ...

    @property
    def eventual_rank(self) -> int:
        return self.rank_sequence[-1] if self.rank_sequence else 0

    def to_json(self) -> dict:
        return {"degree": self.degree, "matrix": self.matrix, "eventual_rank": self.eventual_rank}


def free_basis(h: Cohomology, degree: int):
    """Integer cocycles whose classes form a basis of ``H^degree`` modulo
    torsion, plus the data needed to read coordinates of any cocycle."""
    n = h.delta[0].shape[1] if degree == 0 else h.delta[degree - 1].shape[0]
    if degree < 2:
        s = h.snfs[degree]
        kernel = s.V[:, s.rank:]
    else:
        kernel = np.eye(n, dtype=np.int64)
    if degree == 0:
        U, r = np.eye(n, dtype=np.int64), 0
    else:
        U, r = h.snfs[degree - 1].U, h.snfs[degree - 1].rank
    proj = matmul(U, kernel)[r:, :]
    sp = snf(proj)
    rk = sp.rank
    reps = matmul(kernel, sp.V[:, :rk])
    return reps, (U, r, sp, rk)


def coordinates(w: np.ndarray, data) -> list[int]:
    U, r, sp, rk = data
    y = matmul(sp.U, matmul(U, w.reshape(-1, 1))[r:, :]).ravel()
    if any(int(x) != 0 for x in y[rk:]):
        raise NonCellular("image is not a cocycle")
    out = []
    for k in range(rk):
        d = int(sp.D[k, k])
        if int(y[k]) % d:
            raise NonCellular("image does not lie in the cocycle lattice")
        out.append(int(y[k]) // d)
    return out


def cohomology_action(h: Cohomology, sigma: ChainMap, degree: int) -> CohomologyAction:
    """Matrix of ``sigma^*`` on ``H^degree`` modulo torsion."""
    reps, data = free_basis(h, degree)
    pull = sigma.maps[degree].T
    cols = [coordinates(matmul(pull, reps[:, k].reshape(-1, 1)).ravel(), data) for k in range(reps.shape[1])]
    m = [list(r) for r in zip(*cols)] if cols else []
    return CohomologyAction(degree, m, eventual_ranks(m))


def eventual_ranks(m: list[list[int]]) -> list[int]:
    if not m:
        return []
    from .perron import matmul as pmul

    ranks = [int_rank(m)]
    power = m
    while True:
        power = pmul(power, m)
        r = int_rank(power)
        ranks.append(r)
        if r == ranks[-2]:
            return ranks


# ------------------------------------------------- refinement and measures


def refinement_to_tiles(f: ChainMap, b1: CellComplex, b0: CellComplex) -> list[list[list[int]]]:
    """For each slot ``s``: the matrix ``A_s[i][j]`` counting level-1 faces
    ``(j, m, s)`` sent to ``(i, s)``."""
    n = len(b0.supertiles)
    nf = b0.structure.counts[2]
    f2 = f.maps[2]
    out = []
    for s in range(nf):
        a = [[0] * n for _ in range(n)]
        for j, ms in enumerate(b1.supertiles):
            for m in range(len(ms)):
                col = f2[:, b1.face_index(j, m, s)]
                row = int(np.nonzero(col)[0][0])
                i, _, s0 = b0.occurrences[2][row][0]
                if s0 != s:
                    raise NonCellular("a face changed its slot under the forgetful map")
                a[i][j] += int(col[row])
        out.append(a)
    return out


def face_states(cx: CellComplex, alpha) -> list[Fraction]:
    """State of each 2-cell indicator: ``alpha_j / 5^level`` for a face of class ``j``'s supertile."""
    out = [Fraction(0)] * cx.counts[2]
    for (j, m, f), (c, _) in cx.cell_of[2].items():
        out[c] = Fraction(alpha[j]) / 5**cx.level
    return out


def pushforward_states(f: ChainMap, b1: CellComplex, b0: CellComplex, alpha) -> list[Fraction]:
    """State at level 1 of the pullback of every level-0 face indicator."""
    s1 = face_states(b1, alpha)
    f2 = f.maps[2]
    return [sum((s1[c] * int(f2[r, c]) for c in np.nonzero(f2[r])[0]), Fraction(0)) for r in range(b0.counts[2])]


def state_annihilates_coboundaries(cx: CellComplex, alpha) -> bool:
    """The face-state functional vanishes on ``delta^1`` of every edge cochain."""
    st = face_states(cx, alpha)
    for row in cx.d2:
        nz = np.nonzero(row)[0]
        if sum((st[c] * int(row[c]) for c in nz), Fraction(0)) != 0:
            return False
    return True
