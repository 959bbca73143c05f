"""Deterministic discrete-event simulator for secured GPSR.

The radio is idealized: a transmission reaches every node (broadcast) or the
addressed node (unicast) that is within ``radio_range`` at send time, after
a fixed per-hop latency. Nothing is lost except through adversaries or a
unicast receiver having moved out of range. Events are ordered by
``(time, sequence number)``, and every node draws from its own named RNG
streams derived from the scenario seed, so identical scenarios produce
identical metrics and traces.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field

from ..adversary import (
    AttackKind,
    AttackProfile,
    ForwardModified,
    RelayDrop,
    apply_on_beacon,
    apply_on_relay,
    flood_schedule,
)
from ..crypto.dh import DhParams
from ..geo import Position, distance_sq
from ..neighbors import NeighborTable, expire_neighbors, handle_beacon, make_beacon_request
from ..routing import Deliver, Drop, DropReason, Forward, forward_decision
from ..wire import Command, DecodeError, GpsrPacket, decode, encode
from .metrics import FlowStats, RunMetrics
from .mobility import Mobility, Walker, move_nodes
from .scenario import Scenario

__all__ = [
    "NodeState",
    "PacketMeta",
    "BeaconTimer",
    "Receive",
    "Inject",
    "Transmission",
    "Delivered",
    "Dropped",
    "Relayed",
    "step_node",
    "run",
    "node_rng",
    "initial_positions",
]


def node_rng(seed: int, node: int | str, purpose: str) -> random.Random:
    """Independent, reproducible stream for one node and one purpose."""
    return random.Random(f"sgpsr/{seed}/{node}/{purpose}")


@dataclass
class PacketMeta:
    """Out-of-band bookkeeping that travels with a data packet."""

    uid: int
    flow: int
    dest_id: int
    payload: bytes
    hops: int = 0


@dataclass
class NodeState:
    id: int
    walker: Walker
    table: NeighborTable
    security_on: bool
    params: DhParams | None
    radio_range: float
    hop_cap: int
    area_center: Position
    profile: AttackProfile | None = None
    dh_rng: random.Random = field(default_factory=random.Random)
    attack_rng: random.Random = field(default_factory=random.Random)
    beacon_interval: float = 1.0

    @property
    def pos(self) -> Position:
        return Position.from_meters(self.walker.x, self.walker.y)

    @property
    def adversarial(self) -> bool:
        return self.profile is not None


# events handed to step_node
@dataclass(frozen=True)
class BeaconTimer:
    pass


@dataclass(frozen=True)
class Receive:
    sender: int
    raw: bytes
    meta: PacketMeta | None = None


@dataclass(frozen=True)
class Inject:
    meta: PacketMeta
    dest_pos: Position


# outputs of step_node
@dataclass(frozen=True)
class Transmission:
    sender: int
    receiver: int | None  # None = broadcast
    raw: bytes
    meta: PacketMeta | None = None


@dataclass(frozen=True)
class Delivered:
    meta: PacketMeta
    corrupted: bool


@dataclass(frozen=True)
class Dropped:
    meta: PacketMeta
    reason: DropReason


@dataclass(frozen=True)
class Relayed:
    meta: PacketMeta
    adversarial: bool


@dataclass(frozen=True)
class Rearm:
    delay: float


def _beacon(node: NodeState):
    advertised = apply_on_beacon(node.profile, node.pos, None, node.attack_rng, node.area_center)
    params = node.params if node.security_on else None
    pkt, kp = make_beacon_request(node.id, advertised, params, node.dh_rng, node.table.own_dh)
    if kp is not None:
        node.table.own_dh = kp
    interval = node.beacon_interval
    if node.profile is not None and node.profile.kind == AttackKind.FLOOD_BEACONS:
        interval = flood_schedule(node.profile, interval)
    return [Transmission(node.id, None, encode(pkt)), Rearm(interval)]


def _route(node: NodeState, pkt: GpsrPacket, meta: PacketMeta, prev_hop: int | None):
    if prev_hop is not None and meta.hops >= node.hop_cap:
        return [Dropped(meta, DropReason.TTL)]
    self_pos = node.pos
    action = forward_decision(node.id, self_pos, node.table, pkt, node.security_on, prev_hop, node.radio_range)
    if isinstance(action, Deliver):
        if node.id != meta.dest_id:
            # reached the spot the destination was at, but it has moved on
            return [Dropped(meta, DropReason.NO_ROUTE)]
        return [Delivered(meta, action.packet.data != meta.payload)]
    if isinstance(action, Drop):
        return [Dropped(meta, action.reason)]

    out_pkt = action.packet
    if action.command == Command.GREEDY_DATA:
        nxt = node.table.entries[action.next_hop].pos
        assert distance_sq(nxt, pkt.dest_pos) < distance_sq(self_pos, pkt.dest_pos), "greedy hop without progress"

    outputs = []
    if prev_hop is not None:
        outputs.append(Relayed(meta, node.adversarial))
        if node.profile is not None:
            effect = apply_on_relay(node.profile, out_pkt, node.attack_rng)
            if isinstance(effect, RelayDrop):
                return outputs + [Dropped(meta, DropReason.BLACKHOLE)]
            if isinstance(effect, ForwardModified):
                out_pkt = effect.packet
    fwd_meta = PacketMeta(meta.uid, meta.flow, meta.dest_id, meta.payload, meta.hops + 1)
    outputs.append(Transmission(node.id, action.next_hop, encode(out_pkt), fwd_meta))
    return outputs


def step_node(node: NodeState, event, now: float):
    """Advance one node by one event; returns ``(node, outputs)``."""
    expire_neighbors(node.table, now)

    if isinstance(event, BeaconTimer):
        return node, _beacon(node)

    if isinstance(event, Inject):
        meta = event.meta
        pkt = GpsrPacket(
            Command.GREEDY_DATA,
            source_pos=node.pos,
            dest_pos=event.dest_pos,
            port=meta.flow & 0xFFFF,
            data=meta.payload,
        )
        return node, _route(node, pkt, meta, None)

    if isinstance(event, Receive):
        try:
            pkt = decode(event.raw)
        except DecodeError:
            if event.meta is not None:
                return node, [Dropped(event.meta, DropReason.AUTH_FAILURE)]
            return node, []
        if pkt.command.is_beacon:
            params = node.params if node.security_on else None
            _, reply = handle_beacon(node.table, pkt, event.sender, node.id, node.pos, params, node.dh_rng, now)
            if reply is None:
                return node, []
            return node, [Transmission(node.id, event.sender, encode(reply))]
        return node, _route(node, pkt, event.meta, event.sender)

    raise TypeError(f"unknown event {event!r}")


def initial_positions(scn: Scenario) -> list[tuple[float, float]]:
    if scn.placement == "explicit":
        return [tuple(map(float, p)) for p in scn.positions]
    rng = node_rng(scn.seed, "all", "placement")
    taken = set()
    out = []
    while len(out) < scn.node_count:
        x = rng.uniform(0.0, scn.area_width)
        y = rng.uniform(0.0, scn.area_height)
        q = Position.from_meters(x, y)
        if q in taken:
            continue
        taken.add(q)
        out.append((x, y))
    return out


class _Simulator:
    def __init__(self, scn: Scenario, trace: list | None):
        scn.validate()
        self.scn = scn
        self.trace = trace
        self.queue: list = []
        self.seq = 0
        self.now = 0.0
        params = scn.dh_params() if scn.security_on else None
        self.mobility = Mobility(scn.mobility, scn.speed_min, scn.speed_max, scn.pause,
                                 scn.area_width, scn.area_height)
        center = Position.from_meters(scn.area_width / 2, scn.area_height / 2)
        profiles = {a.node: a.profile for a in scn.adversaries}
        self.nodes: list[NodeState] = []
        for nid, (x, y) in enumerate(initial_positions(scn)):
            self.nodes.append(NodeState(
                id=nid,
                walker=Walker(x, y, node_rng(scn.seed, nid, "mobility")),
                table=NeighborTable(beacon_interval=scn.beacon_interval, timeout=scn.neighbor_timeout),
                security_on=scn.security_on,
                params=params,
                radio_range=scn.radio_range,
                hop_cap=scn.effective_hop_cap,
                area_center=center,
                profile=profiles.get(nid),
                dh_rng=node_rng(scn.seed, nid, "dh"),
                attack_rng=node_rng(scn.seed, nid, "attack"),
                beacon_interval=scn.beacon_interval,
            ))
        self.metrics = RunMetrics(seed=scn.seed, security_on=scn.security_on,
                                  duration=scn.duration, node_count=scn.node_count)

    def push(self, t, kind, node, payload=None):
        heapq.heappush(self.queue, (t, self.seq, kind, node, payload))
        self.seq += 1

    def log(self, text):
        if self.trace is not None:
            self.trace.append(f"{self.now:.6f} {text}")

    def in_range(self, a: int, b: int) -> bool:
        wa, wb = self.nodes[a].walker, self.nodes[b].walker
        return math.hypot(wa.x - wb.x, wa.y - wb.y) <= self.scn.radio_range

    def schedule_initial(self):
        scn = self.scn
        for node in self.nodes:
            phase = node_rng(scn.seed, node.id, "beacon").uniform(0.0, scn.beacon_interval)
            self.push(phase, "beacon", node.id)
        if scn.mobility != "static":
            self.push(scn.mobility_tick, "tick", -1)
        uid = 0
        for fid, flow in enumerate(scn.traffic):
            self.metrics.per_flow[fid] = FlowStats()
            rng = node_rng(scn.seed, f"flow{fid}", "payload")
            for k in range(flow.count):
                meta = PacketMeta(uid, fid, flow.dest, bytes(rng.getrandbits(8) for _ in range(flow.size)))
                self.push(flow.start + k * flow.interval, "inject", flow.source, meta)
                uid += 1

    def transmit(self, tx: Transmission):
        m = self.metrics
        m.airtime += len(tx.raw) * 8 / self.scn.bitrate
        at = self.now + self.scn.hop_latency
        if tx.meta is None:
            m.beacons_sent += 1
        else:
            m.data_transmissions += 1
        if tx.receiver is None:
            self.log(f"tx-bcast n={tx.sender} len={len(tx.raw)}")
            for other in self.nodes:
                if other.id != tx.sender and self.in_range(tx.sender, other.id):
                    self.push(at, "rx", other.id, Receive(tx.sender, tx.raw))
            return
        self.log(f"tx n={tx.sender} to={tx.receiver} len={len(tx.raw)}"
                 + (f" uid={tx.meta.uid}" if tx.meta else ""))
        if self.in_range(tx.sender, tx.receiver):
            self.push(at, "rx", tx.receiver, Receive(tx.sender, tx.raw, tx.meta))
        elif tx.meta is not None:
            self.record(Dropped(tx.meta, DropReason.NO_ROUTE))

    def record(self, out):
        m = self.metrics
        if isinstance(out, Delivered):
            m.delivered += 1
            m.hops_delivered += out.meta.hops
            m.per_flow[out.meta.flow].delivered += 1
            if out.corrupted:
                m.corrupted_delivered += 1
                m.per_flow[out.meta.flow].corrupted += 1
            self.log(f"deliver uid={out.meta.uid} hops={out.meta.hops} corrupted={int(out.corrupted)}")
        elif isinstance(out, Dropped):
            m.drops[out.reason] += 1
            self.log(f"drop uid={out.meta.uid} reason={out.reason.value}")
        elif isinstance(out, Relayed):
            m.relays += 1
            if out.adversarial:
                m.adversary_relays += 1

    def dispatch(self, node_id, event):
        node = self.nodes[node_id]
        _, outputs = step_node(node, event, self.now)
        for out in outputs:
            if isinstance(out, Transmission):
                self.transmit(out)
            elif isinstance(out, Rearm):
                self.push(self.now + out.delay, "beacon", node_id)
            else:
                self.record(out)

    def run(self) -> RunMetrics:
        self.schedule_initial()
        scn = self.scn
        while self.queue and self.queue[0][0] <= scn.duration:
            t, _, kind, nid, payload = heapq.heappop(self.queue)
            self.now = t
            if kind == "tick":
                move_nodes([n.walker for n in self.nodes], self.mobility, scn.mobility_tick)
                self.push(t + scn.mobility_tick, "tick", -1)
            elif kind == "beacon":
                self.log(f"beacon n={nid}")
                self.dispatch(nid, BeaconTimer())
            elif kind == "inject":
                self.metrics.generated += 1
                self.metrics.per_flow[payload.flow].generated += 1
                self.log(f"inject n={nid} uid={payload.uid} flow={payload.flow}")
                dest = self.nodes[payload.dest_id].pos
                self.dispatch(nid, Inject(payload, dest))
            elif kind == "rx":
                self.log(f"rx n={nid} from={payload.sender}" + (f" uid={payload.meta.uid}" if payload.meta else ""))
                self.dispatch(nid, payload)
        self.finish()
        return self.metrics

    def finish(self):
        m = self.metrics
        m.in_flight = m.generated - m.delivered - m.dropped
        assert m.in_flight >= 0, "packet accounting broke conservation"
        keys = set()
        for u in self.nodes:
            for v, entry in u.table.entries.items():
                if entry.key is None or v < u.id:
                    continue
                back = self.nodes[v].table.key_for(u.id)
                if back is None:
                    continue
                assert back == entry.key, f"nodes {u.id} and {v} hold different pair keys"
                keys.add((u.id, v, entry.key.key))
        m.keys_established = len(keys)
        self.log(f"end generated={m.generated} delivered={m.delivered} keys={m.keys_established}")


def run(scn: Scenario, trace: list | None = None) -> RunMetrics:
    """Simulate ``scn``; pass a list as ``trace`` to collect one line per event."""
    return _Simulator(scn, trace).run()
