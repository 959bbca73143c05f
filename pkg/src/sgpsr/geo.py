"""Planar geometry for geographic forwarding.

Positions live on a fixed-point grid of 0.01 m so that orientation tests,
greedy comparisons and the wire encoding are all exact integer operations.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Iterable, Sequence

__all__ = [
    "Position",
    "PlanarGraph",
    "GeometryError",
    "distance",
    "greedy_next",
    "gabriel_planarize",
    "unit_disk_edges",
    "right_hand_next",
    "segments_intersect",
    "crossing_point",
    "orientation",
]

SCALE = 100  # grid units per meter
_I32_MIN = -(2**31)
_I32_MAX = 2**31 - 1
_POS = struct.Struct(">ii")


class GeometryError(ValueError):
    """Degenerate geometry (duplicate positions, out-of-range coordinates)."""


@dataclass(frozen=True, order=True)
class Position:
    """A point in the plane, stored as integer centimeters."""

    x: int = 0
    y: int = 0

    def __post_init__(self):
        for v in (self.x, self.y):
            if not isinstance(v, int):
                raise TypeError("Position coordinates are integer grid units; use Position.from_meters")
            if not _I32_MIN <= v <= _I32_MAX:
                raise GeometryError(f"coordinate {v} outside the 32-bit fixed-point range")

    @classmethod
    def from_meters(cls, x: float, y: float) -> "Position":
        return cls(int(round(x * SCALE)), int(round(y * SCALE)))

    @property
    def x_m(self) -> float:
        return self.x / SCALE

    @property
    def y_m(self) -> float:
        return self.y / SCALE

    def encode64(self) -> bytes:
        return _POS.pack(self.x, self.y)

    @classmethod
    def decode64(cls, raw: bytes) -> "Position":
        if len(raw) != 8:
            raise GeometryError(f"position encoding must be 8 bytes, got {len(raw)}")
        return cls(*_POS.unpack(raw))

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def __repr__(self):
        return f"Position({self.x_m:g}, {self.y_m:g})"


ORIGIN = Position(0, 0)


def distance_sq(a: Position, b: Position) -> int:
    dx = a.x - b.x
    dy = a.y - b.y
    return dx * dx + dy * dy


def distance(a: Position, b: Position) -> float:
    """Euclidean distance in meters."""
    return math.hypot(a.x - b.x, a.y - b.y) / SCALE


def greedy_next(self_pos: Position, dest: Position, neighbors: Iterable[tuple[int, Position]]):
    """Neighbor id strictly closer to ``dest`` than ``self_pos`` and closest overall.

    Returns None at a local maximum. Ties go to the smallest id.
    """
    best = None
    best_key = (distance_sq(self_pos, dest), -1)
    for nid, pos in neighbors:
        d = distance_sq(pos, dest)
        if d < best_key[0] or (best is not None and d == best_key[0] and nid < best):
            best, best_key = nid, (d, nid)
    return best


def _within_range(a: Position, b: Position, radio_range: float) -> bool:
    limit = radio_range * SCALE
    return distance_sq(a, b) <= limit * limit


def unit_disk_edges(nodes: Sequence[tuple[int, Position]], radio_range: float) -> set[tuple[int, int]]:
    edges = set()
    for i, (u, pu) in enumerate(nodes):
        for v, pv in nodes[i + 1:]:
            if _within_range(pu, pv, radio_range):
                edges.add((u, v) if u < v else (v, u))
    return edges


def _in_diameter_circle(w: Position, u: Position, v: Position) -> bool:
    # angle uwv is obtuse <=> w strictly inside the circle on diameter uv
    return (u.x - w.x) * (v.x - w.x) + (u.y - w.y) * (v.y - w.y) < 0


@dataclass
class PlanarGraph:
    nodes: list[tuple[int, Position]]
    edges: set[tuple[int, int]] = field(default_factory=set)

    def positions(self) -> dict[int, Position]:
        return dict(self.nodes)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {nid: [] for nid, _ in self.nodes}
        for u, v in sorted(self.edges):
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def neighbors(self, nid: int) -> list[tuple[int, Position]]:
        pos = self.positions()
        return [(m, pos[m]) for m in self.adjacency()[nid]]


def gabriel_planarize(nodes: Sequence[tuple[int, Position]], radio_range: float) -> PlanarGraph:
    """Gabriel subgraph of the unit-disk graph over ``nodes``."""
    nodes = list(nodes)
    seen: dict[Position, int] = {}
    for nid, pos in nodes:
        if pos in seen:
            raise GeometryError(f"nodes {seen[pos]} and {nid} share position {pos}")
        seen[pos] = nid

    pos = dict(nodes)
    udg = unit_disk_edges(nodes, radio_range)
    adj: dict[int, list[int]] = {nid: [] for nid, _ in nodes}
    for u, v in udg:
        adj[u].append(v)
        adj[v].append(u)

    kept = set()
    for u, v in udg:
        pu, pv = pos[u], pos[v]
        # any witness is closer to u than v is, hence a unit-disk neighbor of u
        if not any(w != v and _in_diameter_circle(pos[w], pu, pv) for w in adj[u]):
            kept.add((u, v))
    return PlanarGraph(nodes, kept)


def local_gabriel_neighbors(self_pos: Position, neighbors: Sequence[tuple[int, Position]]):
    """Gabriel filtering of one node's edges using only its own neighbor list."""
    return [
        (v, pv) for v, pv in neighbors
        if not any(w != v and _in_diameter_circle(pw, self_pos, pv) for w, pw in neighbors)
    ]


def _cross(ax: int, ay: int, bx: int, by: int) -> int:
    return ax * by - ay * bx


def right_hand_next(prev: Position, self_pos: Position, planar_neighbors: Sequence[tuple[int, Position]]) -> int:
    """First neighbor counterclockwise from the ray self_pos -> prev.

    A neighbor lying exactly on the ray is taken last (full turn), so a
    packet only bounces back along its arrival edge when nothing else exists.
    """
    if not planar_neighbors:
        raise ValueError("right_hand_next needs at least one neighbor")
    rx, ry = prev.x - self_pos.x, prev.y - self_pos.y
    if rx == 0 and ry == 0:
        rx = 1  # degenerate reference: sweep from the +x axis

    def half(v):
        c = _cross(rx, ry, v[0], v[1])
        if c > 0:
            return 0
        if c == 0:
            dot = rx * v[0] + ry * v[1]
            return 0 if dot < 0 else 1
        return 1

    def cmp(a, b):
        va, vb = a[0], b[0]
        ha, hb = half(va), half(vb)
        if ha != hb:
            return ha - hb
        c = _cross(va[0], va[1], vb[0], vb[1])
        if c > 0:
            return -1
        if c < 0:
            return 1
        # same direction: nearer first, then smaller id
        da = va[0] * va[0] + va[1] * va[1]
        db = vb[0] * vb[0] + vb[1] * vb[1]
        if da != db:
            return -1 if da < db else 1
        return (a[1] > b[1]) - (a[1] < b[1])

    items = [((p.x - self_pos.x, p.y - self_pos.y), nid) for nid, p in planar_neighbors]
    return min(items, key=cmp_to_key(cmp))[1]


def orientation(a: Position, b: Position, c: Position) -> int:
    """Sign of the turn a -> b -> c: 1 counterclockwise, -1 clockwise, 0 collinear."""
    v = _cross(b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y)
    return (v > 0) - (v < 0)


def _on_segment(a: Position, b: Position, p: Position) -> bool:
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def segments_intersect(a1: Position, a2: Position, b1: Position, b2: Position) -> bool:
    """True iff the closed segments a1a2 and b1b2 share at least one point."""
    o1 = orientation(a1, a2, b1)
    o2 = orientation(a1, a2, b2)
    o3 = orientation(b1, b2, a1)
    o4 = orientation(b1, b2, a2)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and _on_segment(a1, a2, b1))
        or (o2 == 0 and _on_segment(a1, a2, b2))
        or (o3 == 0 and _on_segment(b1, b2, a1))
        or (o4 == 0 and _on_segment(b1, b2, a2))
    )


def crossing_point(a1: Position, a2: Position, b1: Position, b2: Position):
    """Intersection of two properly crossing segments, snapped to the grid.

    Returns None for parallel or collinear segments.
    """
    dax, day = a2.x - a1.x, a2.y - a1.y
    dbx, dby = b2.x - b1.x, b2.y - b1.y
    den = _cross(dax, day, dbx, dby)
    if den == 0:
        return None
    t_num = _cross(b1.x - a1.x, b1.y - a1.y, dbx, dby)
    x = a1.x + dax * t_num / den
    y = a1.y + day * t_num / den
    return Position(int(round(x)), int(round(y)))
