"""Hosts, trust domains and stochastic network links.

Robots connect to candidate hosts over single direct links; each direction of
a round trip draws its own latency. Transmission time is the deterministic
bytes / bandwidth term. Topology values are immutable after validation and
safe to share read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import NoRouteError
from .simcore import Dist, RngStream

NODE_KINDS = ("robot", "edge", "cloud")
ACCELERATORS = ("cpu", "gpu", "none")


@dataclass(frozen=True)
class TrustDomain:
    id: int
    name: str


@dataclass(frozen=True)
class NodeSpec:
    id: str
    kind: str  # robot | edge | cloud
    accelerator: str  # cpu | gpu | none
    trust_domain: int
    mem_capacity: int = 0  # abstract units; ~100 MB of weights per unit
    hourly_cost: float = 0.0

    def can_host(self) -> bool:
        return self.kind != "robot"


@dataclass(frozen=True)
class LinkModel:
    from_id: str
    to_id: str
    one_way_latency: Dist  # milliseconds
    bandwidth: float  # megabytes / second


@dataclass(frozen=True)
class Topology:
    nodes: tuple[NodeSpec, ...]
    links: tuple[LinkModel, ...]
    domains: tuple[TrustDomain, ...]
    _node_index: dict = field(default_factory=dict, repr=False, compare=False)
    _link_index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_node_index", {n.id: n for n in self.nodes})
        object.__setattr__(
            self, "_link_index", {(l.from_id, l.to_id): l for l in self.links}
        )

    def node(self, node_id: str) -> NodeSpec:
        return self._node_index[node_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._node_index

    def link(self, from_id: str, to_id: str) -> LinkModel:
        """The link between two nodes, in either declared direction."""
        lk = self._link_index.get((from_id, to_id))
        if lk is None:
            lk = self._link_index.get((to_id, from_id))
        if lk is None:
            raise NoRouteError(f"no link between {from_id} and {to_id}")
        return lk

    def has_link(self, from_id: str, to_id: str) -> bool:
        return (from_id, to_id) in self._link_index or (to_id, from_id) in self._link_index

    def hosts(self) -> list[NodeSpec]:
        return [n for n in self.nodes if n.can_host()]


def sample_one_way_latency(link: LinkModel, stream: RngStream) -> float:
    """One latency draw in ms for a single direction of `link`."""
    return link.one_way_latency.draw(stream)


def transmission_time(payload_bytes: int, link: LinkModel) -> float:
    """Time in ms to push `payload_bytes` through the link's bandwidth."""
    if payload_bytes < 0:
        raise ValueError(f"payload_bytes must be >= 0, got {payload_bytes}")
    return payload_bytes / (link.bandwidth * 1e6) * 1000.0


def validate_topology(t: Topology) -> list[str]:
    """All invariant violations, as human-readable strings; valid iff empty."""
    violations: list[str] = []
    seen_nodes: set[str] = set()
    for n in t.nodes:
        if n.id in seen_nodes:
            violations.append(f"duplicate node id: {n.id}")
        seen_nodes.add(n.id)
        if n.kind not in NODE_KINDS:
            violations.append(f"node {n.id}: unknown kind {n.kind!r}")
        if n.accelerator not in ACCELERATORS:
            violations.append(f"node {n.id}: unknown accelerator {n.accelerator!r}")
        if n.kind == "robot" and n.accelerator != "none":
            violations.append(f"robot {n.id} must have accelerator=none")
        if n.mem_capacity < 0:
            violations.append(f"node {n.id}: mem_capacity < 0")
        if n.hourly_cost < 0:
            violations.append(f"node {n.id}: hourly_cost < 0")

    seen_domains: set[int] = set()
    domain_ids = set()
    for d in t.domains:
        if d.id in seen_domains:
            violations.append(f"duplicate trust domain id: {d.id}")
        seen_domains.add(d.id)
        domain_ids.add(d.id)
    for n in t.nodes:
        if n.trust_domain not in domain_ids:
            violations.append(f"node {n.id}: unknown trust domain {n.trust_domain}")

    for l in t.links:
        for endpoint in (l.from_id, l.to_id):
            if endpoint not in seen_nodes:
                violations.append(f"link {l.from_id}->{l.to_id}: unknown node {endpoint}")
        if l.bandwidth <= 0:
            violations.append(f"link {l.from_id}->{l.to_id}: bandwidth must be > 0")
        if l.one_way_latency.support_min() < 0:
            violations.append(
                f"link {l.from_id}->{l.to_id}: latency support includes negatives"
            )

    hosts = {n.id for n in t.nodes if n.can_host()}
    for n in t.nodes:
        if n.kind != "robot":
            continue
        reachable = any(
            (l.from_id == n.id and l.to_id in hosts)
            or (l.to_id == n.id and l.from_id in hosts)
            for l in t.links
        )
        if not reachable:
            violations.append(f"isolated robot: {n.id} has no link to any host")
    return violations


# --- JSON (scenario section) ------------------------------------------------

def dist_from_json(obj: dict) -> Dist:
    kind = obj.get("dist")
    if kind == "const":
        return Dist.constant(obj["value_ms"])
    if kind == "uniform":
        return Dist.uniform(obj["low_ms"], obj["high_ms"])
    if kind == "tnorm":
        return Dist.tnorm(obj["mean_ms"], obj["std_ms"], obj.get("min_ms", 0.0))
    raise ValueError(f"unknown distribution kind: {kind!r}")


def dist_to_json(d: Dist) -> dict:
    if d.kind == "const":
        return {"dist": "const", "value_ms": d.a}
    if d.kind == "uniform":
        return {"dist": "uniform", "low_ms": d.a, "high_ms": d.b}
    return {"dist": "tnorm", "mean_ms": d.a, "std_ms": d.b, "min_ms": d.low}


def topology_from_json(obj: dict) -> Topology:
    domains = tuple(
        TrustDomain(id=d["id"], name=d.get("name", f"domain-{d['id']}"))
        for d in obj.get("trust_domains", [])
    )
    nodes = tuple(
        NodeSpec(
            id=n["id"],
            kind=n["kind"],
            accelerator=n.get("accelerator", "none"),
            trust_domain=n["trust_domain"],
            mem_capacity=n.get("mem_capacity", 0),
            hourly_cost=n.get("hourly_cost", 0.0),
        )
        for n in obj.get("nodes", [])
    )
    links = tuple(
        LinkModel(
            from_id=l["from"],
            to_id=l["to"],
            one_way_latency=dist_from_json(l["one_way_latency"]),
            bandwidth=l["bandwidth"],
        )
        for l in obj.get("links", [])
    )
    return Topology(nodes=nodes, links=links, domains=domains)


def topology_to_json(t: Topology) -> dict:
    return {
        "trust_domains": [{"id": d.id, "name": d.name} for d in t.domains],
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind,
                "accelerator": n.accelerator,
                "trust_domain": n.trust_domain,
                "mem_capacity": n.mem_capacity,
                "hourly_cost": n.hourly_cost,
            }
            for n in t.nodes
        ],
        "links": [
            {
                "from": l.from_id,
                "to": l.to_id,
                "one_way_latency": dist_to_json(l.one_way_latency),
                "bandwidth": l.bandwidth,
            }
            for l in t.links
        ],
    }
