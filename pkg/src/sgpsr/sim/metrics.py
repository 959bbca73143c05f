"""Run metrics and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from ..routing import DropReason

# fixed, documented column order of the metrics CSV
CSV_COLUMNS = [
    "label",
    "seed",
    "security_on",
    "generated",
    "delivered",
    "delivery_ratio",
    "drop_auth_failure",
    "drop_no_route",
    "drop_no_neighbors",
    "drop_ttl",
    "drop_blackhole",
    "in_flight",
    "mean_hops",
    "keys_established",
    "corrupted_delivered",
    "beacons_sent",
    "data_transmissions",
    "relays",
    "adversary_relays",
    "channel_busy_fraction",
]


@dataclass
class FlowStats:
    generated: int = 0
    delivered: int = 0
    corrupted: int = 0

    @property
    def delivery_ratio(self) -> float:
        return self.delivered / self.generated if self.generated else 0.0


@dataclass
class RunMetrics:
    seed: int = 0
    security_on: bool = True
    label: str = ""
    generated: int = 0
    delivered: int = 0
    drops: dict = field(default_factory=lambda: {r: 0 for r in DropReason})
    in_flight: int = 0
    hops_delivered: int = 0
    keys_established: int = 0
    corrupted_delivered: int = 0
    beacons_sent: int = 0
    data_transmissions: int = 0
    relays: int = 0
    adversary_relays: int = 0
    airtime: float = 0.0
    duration: float = 0.0
    node_count: int = 0
    per_flow: dict = field(default_factory=dict)

    @property
    def delivery_ratio(self) -> float:
        return self.delivered / self.generated if self.generated else 0.0

    @property
    def mean_hops(self) -> float:
        return self.hops_delivered / self.delivered if self.delivered else 0.0

    @property
    def dropped(self) -> int:
        return sum(self.drops.values())

    @property
    def channel_busy_fraction(self) -> float:
        """Mean fraction of time each node's transmitter is busy."""
        if not self.duration or not self.node_count:
            return 0.0
        return self.airtime / (self.duration * self.node_count)

    @property
    def adversary_share(self) -> float:
        return self.adversary_relays / self.relays if self.relays else 0.0

    def row(self) -> dict:
        return {
            "label": self.label,
            "seed": self.seed,
            "security_on": "true" if self.security_on else "false",
            "generated": self.generated,
            "delivered": self.delivered,
            "delivery_ratio": f"{self.delivery_ratio:.6f}",
            "drop_auth_failure": self.drops[DropReason.AUTH_FAILURE],
            "drop_no_route": self.drops[DropReason.NO_ROUTE],
            "drop_no_neighbors": self.drops[DropReason.NO_NEIGHBORS],
            "drop_ttl": self.drops[DropReason.TTL],
            "drop_blackhole": self.drops[DropReason.BLACKHOLE],
            "in_flight": self.in_flight,
            "mean_hops": f"{self.mean_hops:.6f}",
            "keys_established": self.keys_established,
            "corrupted_delivered": self.corrupted_delivered,
            "beacons_sent": self.beacons_sent,
            "data_transmissions": self.data_transmissions,
            "relays": self.relays,
            "adversary_relays": self.adversary_relays,
            "channel_busy_fraction": f"{self.channel_busy_fraction:.9f}",
        }


def metrics_csv(runs) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for m in runs:
        writer.writerow(m.row())
    return buf.getvalue()
