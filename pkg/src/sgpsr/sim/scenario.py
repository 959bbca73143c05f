"""Scenario description and the flat ``key = value`` scenario file format.

Scalar keys are written as ``key = value``; list items use indexed keys,
``traffic[0].source = 3`` or ``adversaries[1].kind = blackhole``, and
explicit node placement uses ``nodes[i].x`` / ``nodes[i].y``. Blank lines
and ``#`` comments are ignored. Every default below is a choice of this
package, not a published evaluation setting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..adversary import AttackKind, AttackProfile
from ..crypto.dh import GROUPS, DhParams, get_group
from ..wire import MAX_DATA

__all__ = [
    "Scenario",
    "TrafficFlow",
    "AdversarySpec",
    "ScenarioError",
    "parse_scenario",
    "load_scenario",
    "apply_overrides",
    "dump_scenario",
    "SCHEMA",
]


class ScenarioError(ValueError):
    """Scenario file or values rejected; ``problems`` lists every issue."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class TrafficFlow:
    source: int
    dest: int
    start: float = 5.0
    count: int = 10
    interval: float = 0.5
    size: int = 64


@dataclass(frozen=True)
class AdversarySpec:
    node: int
    profile: AttackProfile


@dataclass(frozen=True)
class Scenario:
    seed: int = 1
    area_width: float = 1000.0
    area_height: float = 1000.0
    node_count: int = 2
    radio_range: float = 250.0
    placement: str = "random"
    positions: tuple = ()
    mobility: str = "static"
    speed_min: float = 1.0
    speed_max: float = 20.0
    pause: float = 0.0
    beacon_interval: float = 1.0
    neighbor_timeout: float = 4.5
    duration: float = 30.0
    traffic: tuple = ()
    adversaries: tuple = ()
    security_on: bool = True
    dh_group: str = "modp1536"
    dh_p: int | None = None
    dh_w: int | None = None
    hop_cap: int = 0
    hop_latency: float = 0.002
    mobility_tick: float = 0.1
    bitrate: float = 6e6

    @property
    def effective_hop_cap(self) -> int:
        return self.hop_cap if self.hop_cap > 0 else 4 * self.node_count

    def dh_params(self) -> DhParams:
        if self.dh_p is not None:
            return DhParams(self.dh_p, self.dh_w)
        return get_group(self.dh_group)

    def validate(self) -> "Scenario":
        problems = []
        if self.node_count < 2:
            problems.append(f"node_count must be >= 2 (got {self.node_count})")
        if self.area_width <= 0 or self.area_height <= 0:
            problems.append("area_width and area_height must be positive")
        if self.radio_range <= 0:
            problems.append("radio_range must be positive")
        if self.placement not in ("random", "explicit"):
            problems.append(f"placement must be random or explicit (got {self.placement!r})")
        if self.placement == "explicit":
            if len(self.positions) != self.node_count:
                problems.append(f"explicit placement needs {self.node_count} nodes[i] entries, got {len(self.positions)}")
            elif len(set(self.positions)) != len(self.positions):
                problems.append("explicit placement has duplicate node positions")
        if self.mobility not in ("static", "random_waypoint"):
            problems.append(f"mobility must be static or random_waypoint (got {self.mobility!r})")
        if self.speed_min < 0 or self.speed_max < self.speed_min:
            problems.append("need 0 <= speed_min <= speed_max")
        if self.pause < 0:
            problems.append("pause must be >= 0")
        for name in ("beacon_interval", "neighbor_timeout", "duration", "hop_latency", "mobility_tick", "bitrate"):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be positive")
        if self.hop_cap < 0:
            problems.append("hop_cap must be >= 0 (0 selects 4 x node_count)")
        if self.dh_p is None and self.dh_group not in GROUPS:
            problems.append(f"unknown dh_group {self.dh_group!r}")
        if (self.dh_p is None) != (self.dh_w is None):
            problems.append("dh_p and dh_w must be given together")
        for i, flow in enumerate(self.traffic):
            for end in ("source", "dest"):
                nid = getattr(flow, end)
                if not 0 <= nid < self.node_count:
                    problems.append(f"traffic[{i}].{end} = {nid} is not a node id")
            if flow.source == flow.dest:
                problems.append(f"traffic[{i}] source and dest are the same node")
            if not 0 <= flow.size <= MAX_DATA:
                problems.append(f"traffic[{i}].size = {flow.size} outside 0..{MAX_DATA}")
            if flow.count < 0:
                problems.append(f"traffic[{i}].count must be >= 0")
            if flow.interval <= 0:
                problems.append(f"traffic[{i}].interval must be positive")
            if flow.start < 0:
                problems.append(f"traffic[{i}].start must be >= 0")
        seen = set()
        for i, adv in enumerate(self.adversaries):
            if not 0 <= adv.node < self.node_count:
                problems.append(f"adversaries[{i}].node = {adv.node} is not a node id")
            if adv.node in seen:
                problems.append(f"adversaries[{i}].node = {adv.node} listed twice")
            seen.add(adv.node)
        if problems:
            raise ScenarioError(problems)
        return self


# key -> (parser, description); the single source for docs and validation
def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _hexint(text: str) -> int:
    return int(text.strip().lower().removeprefix("0x"), 16)


SCHEMA = {
    "seed": (int, "64-bit master seed; every node RNG stream derives from it"),
    "area_width": (float, "area width in meters"),
    "area_height": (float, "area height in meters"),
    "node_count": (int, "number of nodes (>= 2)"),
    "radio_range": (float, "unit-disk radio range in meters"),
    "placement": (str, "random | explicit (explicit reads nodes[i].x, nodes[i].y)"),
    "mobility": (str, "static | random_waypoint"),
    "speed_min": (float, "random waypoint minimum speed, m/s"),
    "speed_max": (float, "random waypoint maximum speed, m/s"),
    "pause": (float, "random waypoint pause at each waypoint, s"),
    "beacon_interval": (float, "honest beacon period, s"),
    "neighbor_timeout": (float, "neighbor entry lifetime without beacons, s"),
    "duration": (float, "simulated horizon, s"),
    "security_on": (_bool, "sign and verify data packets hop by hop"),
    "dh_group": (str, f"named DH group: {', '.join(sorted(GROUPS))}"),
    "dh_p": (_hexint, "explicit DH prime, hex (overrides dh_group)"),
    "dh_w": (_hexint, "explicit DH generator, hex"),
    "hop_cap": (int, "per-packet hop budget; 0 means 4 x node_count"),
    "hop_latency": (float, "per-hop transmission latency, s"),
    "mobility_tick": (float, "mobility update period, s"),
    "bitrate": (float, "channel bit rate used for the busy-fraction metric, bit/s"),
}

TRAFFIC_SCHEMA = {
    "source": (int, "source node id"),
    "dest": (int, "destination node id"),
    "start": (float, "first injection time, s"),
    "count": (int, "number of packets"),
    "interval": (float, "spacing between packets, s"),
    "size": (int, "payload bytes (0..250)"),
}

ADVERSARY_SCHEMA = {
    "node": (int, "adversarial node id"),
    "kind": (str, "blackhole | tamper | spoof | flood"),
    "drop_fraction": (float, "blackhole: fraction of relayed data dropped"),
    "tamper_bits": (int, "tamper: data bits flipped per relayed packet"),
    "tamper_auth": (_bool, "tamper: flip bits of the auth field instead of data"),
    "spoof_offset": (float, "spoof: meters the advertised position moves toward the area center"),
    "flood_multiplier": (float, "flood: beacon rate multiplier (>= 1)"),
}

NODE_SCHEMA = {"x": (float, "x in meters"), "y": (float, "y in meters")}

_INDEXED = re.compile(r"^(traffic|adversaries|nodes)\[(\d+)\]\.(\w+)$")
_SUBSCHEMA = {"traffic": TRAFFIC_SCHEMA, "adversaries": ADVERSARY_SCHEMA, "nodes": NODE_SCHEMA}


def _parse_pairs(pairs):
    """``pairs`` is a list of (where, key, raw value); collects every problem."""
    problems = []
    scalars = {}
    items = {"traffic": {}, "adversaries": {}, "nodes": {}}
    for where, key, raw in pairs:
        m = _INDEXED.match(key)
        if m:
            group, idx, sub = m.group(1), int(m.group(2)), m.group(3)
            schema = _SUBSCHEMA[group]
            if sub not in schema:
                problems.append(f"{where}: unknown key {key!r}")
                continue
            try:
                items[group].setdefault(idx, {})[sub] = schema[sub][0](raw)
            except ValueError as exc:
                problems.append(f"{where}: bad value for {key!r}: {exc}")
            continue
        if key not in SCHEMA:
            problems.append(f"{where}: unknown key {key!r}")
            continue
        try:
            scalars[key] = SCHEMA[key][0](raw)
        except ValueError as exc:
            problems.append(f"{where}: bad value for {key!r}: {exc}")
    return scalars, items, problems


def _build(base: Scenario | None, scalars, items, problems) -> Scenario:
    for group, entries in items.items():
        if entries and sorted(entries) != list(range(len(entries))):
            problems.append(f"{group}[] indices must be contiguous from 0, got {sorted(entries)}")

    traffic = list(base.traffic) if base else []
    for idx in sorted(items["traffic"]):
        vals = items["traffic"][idx]
        missing = {"source", "dest"} - vals.keys()
        if missing and idx >= len(traffic):
            problems.append(f"traffic[{idx}] missing {', '.join(sorted(missing))}")
            continue
        if idx < len(traffic):
            traffic[idx] = replace(traffic[idx], **vals)
        else:
            traffic.append(TrafficFlow(**vals))

    adversaries = list(base.adversaries) if base else []
    for idx in sorted(items["adversaries"]):
        vals = dict(items["adversaries"][idx])
        if idx < len(adversaries):
            old = adversaries[idx]
            node = vals.pop("node", old.node)
            prof = {f.name: getattr(old.profile, f.name) for f in fields(AttackProfile)}
            prof.update(vals)
        else:
            if "node" not in vals or "kind" not in vals:
                problems.append(f"adversaries[{idx}] needs node and kind")
                continue
            node = vals.pop("node")
            prof = vals
        try:
            spec = AdversarySpec(node, AttackProfile(**prof))
        except (ValueError, TypeError) as exc:
            problems.append(f"adversaries[{idx}]: {exc}")
            continue
        if idx < len(adversaries):
            adversaries[idx] = spec
        else:
            adversaries.append(spec)

    positions = list(base.positions) if base else []
    for idx in sorted(items["nodes"]):
        vals = items["nodes"][idx]
        if idx < len(positions):
            x, y = positions[idx]
            positions[idx] = (vals.get("x", x), vals.get("y", y))
        elif {"x", "y"} <= vals.keys():
            positions.append((vals["x"], vals["y"]))
        else:
            problems.append(f"nodes[{idx}] needs both x and y")

    if problems:
        raise ScenarioError(problems)
    scn = replace(base or Scenario(), **scalars, traffic=tuple(traffic),
                  adversaries=tuple(adversaries), positions=tuple(positions))
    return scn.validate()


def _split_lines(text: str, origin: str):
    pairs, problems = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{origin}:{lineno}"
        if "=" not in line:
            problems.append(f"{where}: expected 'key = value'")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        pairs.append((where, key, value))
    return pairs, problems


def parse_scenario(text: str, origin: str = "<scenario>") -> Scenario:
    pairs, problems = _split_lines(text, origin)
    scalars, items, more = _parse_pairs(pairs)
    return _build(None, scalars, items, problems + more)


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(), str(path))


def apply_overrides(scn: Scenario, overrides) -> Scenario:
    """Apply ``key=value`` strings (CLI ``--set`` / sweep assignments)."""
    pairs, problems = [], []
    for ov in overrides:
        if "=" not in ov:
            problems.append(f"override {ov!r}: expected key=value")
            continue
        key, value = (s.strip() for s in ov.split("=", 1))
        pairs.append(("override", key, value))
    scalars, items, more = _parse_pairs(pairs)
    return _build(scn, scalars, items, problems + more)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_scenario(scn: Scenario) -> str:
    """Render a scenario back to the file format (round-trips through parse)."""
    lines = []
    for key in SCHEMA:
        val = getattr(scn, key)
        if val is None:
            continue
        if key in ("dh_p", "dh_w"):
            val = f"{val:x}"
        lines.append(f"{key} = {_fmt(val)}")
    for i, (x, y) in enumerate(scn.positions):
        lines.append(f"nodes[{i}].x = {_fmt(float(x))}")
        lines.append(f"nodes[{i}].y = {_fmt(float(y))}")
    for i, flow in enumerate(scn.traffic):
        for f in fields(TrafficFlow):
            lines.append(f"traffic[{i}].{f.name} = {_fmt(getattr(flow, f.name))}")
    for i, adv in enumerate(scn.adversaries):
        lines.append(f"adversaries[{i}].node = {adv.node}")
        for f in fields(AttackProfile):
            val = getattr(adv.profile, f.name)
            lines.append(f"adversaries[{i}].{f.name} = {_fmt(val.value if f.name == 'kind' else val)}")
    return "\n".join(lines) + "\n"


def schema_help() -> str:
    out = ["Scenario keys (key = value):"]
    defaults = Scenario()
    for key, (_, desc) in SCHEMA.items():
        out.append(f"  {key:<18} {desc} [default: {_fmt(getattr(defaults, key))}]")
    for group, schema in (("traffic[i]", TRAFFIC_SCHEMA), ("adversaries[i]", ADVERSARY_SCHEMA), ("nodes[i]", NODE_SCHEMA)):
        for key, (_, desc) in schema.items():
            out.append(f"  {group + '.' + key:<26} {desc}")
    return "\n".join(out)
