"""Node mobility models."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass


@dataclass
class Walker:
    """Random-waypoint state of one node; ``rng`` is that node's mobility stream."""

    x: float
    y: float
    rng: random.Random
    tx: float | None = None
    ty: float | None = None
    speed: float = 0.0
    pause_left: float = 0.0


@dataclass(frozen=True)
class Mobility:
    kind: str = "static"
    speed_min: float = 0.0
    speed_max: float = 0.0
    pause: float = 0.0
    width: float = 1000.0
    height: float = 1000.0


def _redraw(w: Walker, m: Mobility) -> None:
    w.tx = w.rng.uniform(0.0, m.width)
    w.ty = w.rng.uniform(0.0, m.height)
    w.speed = w.rng.uniform(m.speed_min, m.speed_max)


def _advance(w: Walker, m: Mobility, dt: float) -> None:
    left = dt
    for _ in range(1000):
        if left <= 0:
            return
        if w.pause_left > 0:
            used = min(w.pause_left, left)
            w.pause_left -= used
            left -= used
            continue
        if w.tx is None:
            _redraw(w, m)
        if w.speed <= 0:
            return
        dx, dy = w.tx - w.x, w.ty - w.y
        dist = math.hypot(dx, dy)
        reach = w.speed * left
        if reach < dist:
            w.x += dx * reach / dist
            w.y += dy * reach / dist
            return
        w.x, w.y = w.tx, w.ty
        left -= dist / w.speed
        w.pause_left = m.pause
        _redraw(w, m)


def move_nodes(walkers: list[Walker], mobility: Mobility, dt: float) -> list[tuple[float, float]]:
    """Advance every walker by ``dt`` seconds; returns the new positions."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if mobility.kind == "random_waypoint":
        for w in walkers:
            _advance(w, mobility, dt)
            # waypoints lie inside the area, so this only trims float noise
            w.x = min(max(w.x, 0.0), mobility.width)
            w.y = min(max(w.y, 0.0), mobility.height)
    elif mobility.kind != "static":
        raise ValueError(f"unknown mobility model {mobility.kind!r}")
    return [(w.x, w.y) for w in walkers]
