"""Exact plane geometry over the Gaussian rationals.

Points are pairs of :class:`fractions.Fraction`; there is no floating point
anywhere in this module.  Tiles are right triangles with legs 1 and 2, placed
by a :class:`TilePose` against the reference triangle ``(0, 2, 2+i)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

PLUS = 1
MINUS = -1


def _q(v) -> Fraction:
    return v if type(v) is Fraction else Fraction(v)


class Point:
    """A Gaussian rational ``x + iy``.

    Supports complex multiplication, so the same type doubles as a similarity
    multiplier (e.g. the inflation factor ``2 - i``).
    """

    __slots__ = ("x", "y")

    def __init__(self, x=0, y=0):
        self.x = _q(x)
        self.y = _q(y)

    def __add__(self, o: Point) -> Point:
        return Point(self.x + o.x, self.y + o.y)

    def __sub__(self, o: Point) -> Point:
        return Point(self.x - o.x, self.y - o.y)

    def __neg__(self) -> Point:
        return Point(-self.x, -self.y)

    def __mul__(self, o) -> Point:
        if isinstance(o, (Point, UnitRotation)):
            ox, oy = (o.x, o.y) if isinstance(o, Point) else (o.c, o.s)
            return Point(self.x * ox - self.y * oy, self.x * oy + self.y * ox)
        o = _q(o)
        return Point(self.x * o, self.y * o)

    __rmul__ = __mul__

    def __truediv__(self, o) -> Point:
        if isinstance(o, Point):
            n = o.norm2()
            return self * Point(o.x / n, -o.y / n)
        o = _q(o)
        return Point(self.x / o, self.y / o)

    def conj(self) -> Point:
        return Point(self.x, -self.y)

    def norm2(self) -> Fraction:
        return self.x * self.x + self.y * self.y

    def __eq__(self, o) -> bool:
        return isinstance(o, Point) and self.x == o.x and self.y == o.y

    def __hash__(self) -> int:
        return hash((self.x, self.y))

    def __lt__(self, o: Point) -> bool:
        return (self.x, self.y) < (o.x, o.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self) -> str:
        return f"Point({self.x}, {self.y})"


class UnitRotation:
    """Rotation by the unit complex number ``c + is`` (``c^2 + s^2 = 1``)."""

    __slots__ = ("c", "s")

    def __init__(self, c=1, s=0, *, check: bool = True):
        self.c = _q(c)
        self.s = _q(s)
        if check and self.c * self.c + self.s * self.s != 1:
            raise ValueError(f"not a unit rotation: {self.c} + {self.s}i")

    @classmethod
    def from_point(cls, p: Point) -> UnitRotation:
        return cls(p.x, p.y)

    def __mul__(self, o):
        if isinstance(o, UnitRotation):
            return UnitRotation(
                self.c * o.c - self.s * o.s, self.c * o.s + self.s * o.c, check=False
            )
        if isinstance(o, Point):
            return Point(self.c * o.x - self.s * o.y, self.c * o.y + self.s * o.x)
        return NotImplemented

    def conj(self) -> UnitRotation:
        return UnitRotation(self.c, -self.s, check=False)

    inverse = conj

    def as_point(self) -> Point:
        return Point(self.c, self.s)

    def __eq__(self, o) -> bool:
        return isinstance(o, UnitRotation) and self.c == o.c and self.s == o.s

    def __hash__(self) -> int:
        return hash((self.c, self.s))

    def __repr__(self) -> str:
        return f"UnitRotation({self.c}, {self.s})"


ONE = UnitRotation(1, 0)
I = UnitRotation(0, 1)
ORIGIN = Point(0, 0)
# generator of the irrational rotation subgroup, angle 2*arctan(1/2)
PINWHEEL_ROTATION = UnitRotation(Fraction(3, 5), Fraction(4, 5))


class Isometry:
    """``z -> rot*z + trans``, or ``z -> rot*conj(z) + trans`` when ``reflect``."""

    __slots__ = ("reflect", "rot", "trans")

    def __init__(self, reflect: bool = False, rot: UnitRotation = ONE, trans: Point = ORIGIN):
        self.reflect = bool(reflect)
        self.rot = rot
        self.trans = trans

    def apply(self, p: Point) -> Point:
        return self.rot * (p.conj() if self.reflect else p) + self.trans

    __call__ = apply

    def compose(self, other: Isometry) -> Isometry:
        """``self ∘ other``."""
        rot = self.rot * (other.rot.conj() if self.reflect else other.rot)
        return Isometry(self.reflect != other.reflect, rot, self.apply(other.trans))

    def inverse(self) -> Isometry:
        if self.reflect:
            return Isometry(True, self.rot, -(self.rot * self.trans.conj()))
        inv = self.rot.conj()
        return Isometry(False, inv, -(inv * self.trans))

    def __eq__(self, o) -> bool:
        return (
            isinstance(o, Isometry)
            and self.reflect == o.reflect
            and self.rot == o.rot
            and self.trans == o.trans
        )

    def __hash__(self) -> int:
        return hash((self.reflect, self.rot, self.trans))

    def __repr__(self) -> str:
        return f"Isometry(reflect={self.reflect}, rot={self.rot}, trans={self.trans})"


IDENTITY = Isometry()


def apply(iso: Isometry, p: Point) -> Point:
    return iso.apply(p)


def compose(a: Isometry, b: Isometry) -> Isometry:
    return a.compose(b)


def mirror() -> Isometry:
    """Reflection in the real axis."""
    return Isometry(True, ONE, ORIGIN)


# reference triangle: (long-leg end, right angle, short-leg end)
REFERENCE = (Point(0, 0), Point(2, 0), Point(2, 1))


class TilePose:
    """A tile placed as ``rot * V + trans`` with ``V`` the reference triangle
    of the given chirality (``V-`` is the complex conjugate of ``V+``)."""

    __slots__ = ("chirality", "rot", "trans")

    def __init__(self, chirality: int, rot: UnitRotation = ONE, trans: Point = ORIGIN):
        if chirality not in (PLUS, MINUS):
            raise ValueError(f"chirality must be +1 or -1, got {chirality!r}")
        self.chirality = chirality
        self.rot = rot
        self.trans = trans

    @classmethod
    def from_isometry(cls, g: Isometry) -> TilePose:
        return cls(MINUS if g.reflect else PLUS, g.rot, g.trans)

    def isometry(self) -> Isometry:
        return Isometry(self.chirality == MINUS, self.rot, self.trans)

    def vertices(self) -> tuple[Point, Point, Point]:
        g = self.isometry()
        return tuple(g.apply(v) for v in REFERENCE)

    def moved(self, g: Isometry) -> TilePose:
        """Image of this tile under ``g``."""
        return TilePose.from_isometry(g.compose(self.isometry()))

    def mirrored(self) -> TilePose:
        return self.moved(mirror())

    def sort_key(self) -> tuple:
        return (
            0 if self.chirality == PLUS else 1,
            self.rot.c,
            self.rot.s,
            self.trans.x,
            self.trans.y,
        )

    def __eq__(self, o) -> bool:
        return (
            isinstance(o, TilePose)
            and self.chirality == o.chirality
            and self.rot == o.rot
            and self.trans == o.trans
        )

    def __hash__(self) -> int:
        return hash((self.chirality, self.rot, self.trans))

    def __repr__(self) -> str:
        sign = "+" if self.chirality == PLUS else "-"
        return f"TilePose({sign}, rot=({self.rot.c}, {self.rot.s}), trans=({self.trans.x}, {self.trans.y}))"


Patch = Sequence[TilePose]


def tile_vertices(t: TilePose) -> tuple[Point, Point, Point]:
    return t.vertices()


# ---------------------------------------------------------------- predicates


def orient(a: Point, b: Point, c: Point) -> Fraction:
    """Twice the signed area of ``abc`` (positive when counterclockwise)."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def signed_area(tri: Sequence[Point]) -> Fraction:
    return orient(*tri) / 2


def side_lengths2(tri: Sequence[Point]) -> tuple[Fraction, Fraction, Fraction]:
    """Squared lengths of (hypotenuse, long leg, short leg) for an ordered tile triple."""
    a, b, c = tri
    return ((c - a).norm2(), (b - a).norm2(), (c - b).norm2())


def on_segment(p: Point, a: Point, b: Point) -> bool:
    if orient(a, b, p) != 0:
        return False
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def point_in_triangle(p: Point, tri: Sequence[Point]) -> bool:
    """Closed containment test."""
    a, b, c = tri
    d1, d2, d3 = orient(a, b, p), orient(b, c, p), orient(c, a, p)
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def point_strictly_inside(p: Point, tri: Sequence[Point]) -> bool:
    a, b, c = tri
    d1, d2, d3 = orient(a, b, p), orient(b, c, p), orient(c, a, p)
    return (d1 > 0 and d2 > 0 and d3 > 0) or (d1 < 0 and d2 < 0 and d3 < 0)


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """Closed segment intersection."""
    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    return (
        (d1 == 0 and on_segment(p1, q1, q2))
        or (d2 == 0 and on_segment(p2, q1, q2))
        or (d3 == 0 and on_segment(q1, p1, p2))
        or (d4 == 0 and on_segment(q2, p1, p2))
    )


def triangles_intersect(ta: Sequence[Point], tb: Sequence[Point]) -> bool:
    if any(point_in_triangle(p, tb) for p in ta) or any(point_in_triangle(p, ta) for p in tb):
        return True
    for i in range(3):
        for j in range(3):
            if segments_intersect(ta[i], ta[(i + 1) % 3], tb[j], tb[(j + 1) % 3]):
                return True
    return False


def tiles_intersect(a: TilePose, b: TilePose) -> bool:
    """True iff the closed triangles share at least one point."""
    return triangles_intersect(a.vertices(), b.vertices())


def _separated_by_edges(ta: Sequence[Point], tb: Sequence[Point]) -> bool:
    s = 1 if orient(*ta) > 0 else -1
    for i in range(3):
        a, b = ta[i], ta[(i + 1) % 3]
        if all(s * orient(a, b, p) <= 0 for p in tb):
            return True
    return False


def interiors_disjoint(ta: Sequence[Point], tb: Sequence[Point]) -> bool:
    """Separating-axis test on closed half-planes; touching is allowed."""
    return _separated_by_edges(ta, tb) or _separated_by_edges(tb, ta)


# ------------------------------------------------------------- canonical keys


def _encode_int(n: int) -> bytes:
    body = n.to_bytes(max(1, (n.bit_length() + 7) // 8), "big")
    return len(body).to_bytes(2, "big") + body


def encode_rational(q: Fraction) -> bytes:
    """Sign byte, then length-prefixed big-endian |numerator| and denominator."""
    sign = b"\x01" if q < 0 else (b"\x00" if q == 0 else b"\x02")
    return sign + _encode_int(abs(q.numerator)) + _encode_int(q.denominator)


def encode_pose(t: TilePose) -> bytes:
    return (b"+" if t.chirality == PLUS else b"-") + b"".join(
        encode_rational(v) for v in (t.rot.c, t.rot.s, t.trans.x, t.trans.y)
    )


def anchor_frame(t: TilePose) -> Isometry:
    """Direct isometry sending pose ``t`` to ``(chirality, 1, 0)``."""
    inv = t.rot.conj()
    return Isometry(False, inv, -(inv * t.trans))


def normalize(tiles: Iterable[TilePose], anchor: TilePose) -> list[TilePose]:
    g = anchor_frame(anchor)
    return sorted((t.moved(g) for t in tiles), key=TilePose.sort_key)


def encode_patch(tiles: Iterable[TilePose]) -> bytes:
    tiles = sorted(tiles, key=TilePose.sort_key)
    return len(tiles).to_bytes(4, "big") + b"".join(encode_pose(t) for t in tiles)


def canonical_key(p: Patch, anchor: int) -> bytes:
    """Encoding of ``p`` after moving tile ``anchor`` to its reference pose.

    Two anchored patches get the same key iff a direct isometry maps one onto
    the other, anchor to anchor.
    """
    if not 0 <= anchor < len(p):
        raise IndexError(f"anchor {anchor} out of range for patch of {len(p)} tiles")
    return anchored_encoding(p[anchor].chirality, normalize(p, p[anchor]))


def anchored_encoding(anchor_chirality: int, normalized: Iterable[TilePose]) -> bytes:
    """Anchor chirality byte followed by the sorted tile serialization.

    The anchor always sits at ``(chirality, 1, 0)``, but a patch may also
    contain the opposite-chirality tile at that same pose, so the anchor's
    chirality has to be recorded explicitly.
    """
    return (b"+" if anchor_chirality == PLUS else b"-") + encode_patch(normalized)


def class_key(p: Patch) -> bytes:
    """Isometry-class key of an unanchored patch: minimum over anchors."""
    return min(canonical_key(p, k) for k in range(len(p)))


def mirror_patch(p: Patch) -> list[TilePose]:
    return [t.mirrored() for t in p]
