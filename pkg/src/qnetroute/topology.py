"""Network topology: quantum nodes joined by parameterized optical links.

Graphs are undirected, connected, and immutable once built. Two generators
are supported: Waxman (nodes placed in a square region, edge probability
``beta * exp(-d / (alpha * L))`` with L the region diagonal, link length the
Euclidean distance) and Erdos-Renyi (every pair linked with fixed
probability, link length drawn uniformly from the configured range).

Generation is fully deterministic: all randomness flows from a single
numpy PCG64 generator seeded from the config, and every iteration order is
sorted. If a sampled graph is disconnected it is repaired by joining each
minor component to the giant component over the shortest available link, so
no seed ever fails.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidConfigError, UnknownNodeError
from .seeding import make_rng

NodeId = int

# Speed of light in optical fiber (refractive index ~1.5), km/s.
FIBER_LIGHT_SPEED_KM_S = 2.0e5

# Floor for geometric link lengths, guards against coincident node positions.
_MIN_LENGTH_KM = 1e-6


@dataclass(frozen=True)
class LinkParams:
    """Physical parameters of one optical link.

    length_km         physical fiber length
    p_success         per-attempt entanglement success probability, (0, 1]
    tau_p_s           mean duration of one entanglement attempt, seconds
    tau_d_s           cooling/reset time after a failed attempt, seconds
    base_fidelity     fidelity of a freshly generated pair, (0, 1]
    coherence_time_s  quantum-memory coherence time governing this link
    """

    length_km: float
    p_success: float
    tau_p_s: float
    tau_d_s: float
    base_fidelity: float
    coherence_time_s: float

    def __post_init__(self):
        if not self.length_km > 0:
            raise InvalidConfigError(f"length_km must be > 0, got {self.length_km}")
        if not 0 < self.p_success <= 1:
            raise InvalidConfigError(f"p_success must be in (0, 1], got {self.p_success}")
        if not self.tau_p_s > 0:
            raise InvalidConfigError(f"tau_p_s must be > 0, got {self.tau_p_s}")
        if not self.tau_d_s >= 0:
            raise InvalidConfigError(f"tau_d_s must be >= 0, got {self.tau_d_s}")
        if not 0 < self.base_fidelity <= 1:
            raise InvalidConfigError(f"base_fidelity must be in (0, 1], got {self.base_fidelity}")
        if not self.coherence_time_s > 0:
            raise InvalidConfigError(f"coherence_time_s must be > 0, got {self.coherence_time_s}")


@dataclass(frozen=True)
class Link:
    """Undirected link between nodes u < v."""

    u: NodeId
    v: NodeId
    params: LinkParams

    def __post_init__(self):
        if self.u == self.v:
            raise InvalidConfigError(f"self-loop on node {self.u}")
        if self.u > self.v:
            raise InvalidConfigError(f"link endpoints must satisfy u < v, got ({self.u}, {self.v})")


@dataclass(frozen=True)
class NetworkGraph:
    """Immutable undirected graph; links stored sorted by (u, v)."""

    node_count: int
    links: tuple[Link, ...]

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidConfigError(f"node_count must be >= 1, got {self.node_count}")
        seen = set()
        for link in self.links:
            if link.v >= self.node_count:
                raise InvalidConfigError(
                    f"link ({link.u}, {link.v}) references node >= node_count {self.node_count}"
                )
            key = (link.u, link.v)
            if key in seen:
                raise InvalidConfigError(f"duplicate link ({link.u}, {link.v})")
            seen.add(key)
        object.__setattr__(self, "links", tuple(sorted(self.links, key=lambda l: (l.u, l.v))))

    @cached_property
    def _adjacency(self) -> dict[NodeId, list[tuple[NodeId, LinkParams]]]:
        adj: dict[NodeId, list[tuple[NodeId, LinkParams]]] = {v: [] for v in range(self.node_count)}
        for link in self.links:
            adj[link.u].append((link.v, link.params))
            adj[link.v].append((link.u, link.params))
        for v in adj:
            adj[v].sort(key=lambda pair: pair[0])
        return adj

    @cached_property
    def _link_index(self) -> dict[tuple[NodeId, NodeId], LinkParams]:
        return {(link.u, link.v): link.params for link in self.links}

    def link(self, u: NodeId, v: NodeId) -> LinkParams | None:
        """Params of the link joining u and v, or None if absent."""
        if u > v:
            u, v = v, u
        return self._link_index.get((u, v))


@dataclass(frozen=True)
class ErdosRenyi:
    edge_probability: float

    def __post_init__(self):
        if not 0 < self.edge_probability <= 1:
            raise InvalidConfigError(
                f"edge_probability must be in (0, 1], got {self.edge_probability}"
            )


@dataclass(frozen=True)
class Waxman:
    alpha: float = 0.4
    beta: float = 0.2
    area_km: float = 1000.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidConfigError(f"alpha must be > 0, got {self.alpha}")
        if not 0 < self.beta <= 1:
            raise InvalidConfigError(f"beta must be in (0, 1], got {self.beta}")
        if not self.area_km > 0:
            raise InvalidConfigError(f"area_km must be > 0, got {self.area_km}")


# (min, max) sampling ranges for each LinkParams field. Length applies to
# Erdos-Renyi graphs only; Waxman lengths come from node geometry.
@dataclass(frozen=True)
class ParamRanges:
    p_success: tuple[float, float] = (0.1, 0.9)
    tau_p_s: tuple[float, float] = (1e-6, 1e-5)
    tau_d_s: tuple[float, float] = (1e-5, 1e-4)
    base_fidelity: tuple[float, float] = (0.90, 0.995)
    coherence_time_s: tuple[float, float] = (0.01, 0.1)
    length_km: tuple[float, float] = (1.0, 100.0)

    # field -> (range minimum may be zero, range maximum cap, domain text)
    _DOMAINS = {
        "p_success": (False, 1.0, "(0, 1]"),
        "tau_p_s": (False, math.inf, "(0, inf)"),
        "tau_d_s": (True, math.inf, "[0, inf)"),
        "base_fidelity": (False, 1.0, "(0, 1]"),
        "coherence_time_s": (False, math.inf, "(0, inf)"),
        "length_km": (False, math.inf, "(0, inf)"),
    }

    def __post_init__(self):
        for name, (zero_ok, high, domain) in self._DOMAINS.items():
            lo, hi = getattr(self, name)
            if lo > hi:
                raise InvalidConfigError(f"param_ranges.{name}: min {lo} exceeds max {hi}")
            low_ok = lo >= 0 if zero_ok else lo > 0
            if not low_ok or hi > high:
                raise InvalidConfigError(
                    f"param_ranges.{name}: range ({lo}, {hi}) outside domain {domain}"
                )


@dataclass(frozen=True)
class TopologyConfig:
    node_count: int
    model: ErdosRenyi | Waxman = field(default_factory=Waxman)
    param_ranges: ParamRanges = field(default_factory=ParamRanges)
    seed: int = 0

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidConfigError(f"node_count must be >= 1, got {self.node_count}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def classical_delay(link: LinkParams) -> float:
    """One-way classical signalling delay over the link, seconds.

    Linear in fiber length: length_km / FIBER_LIGHT_SPEED_KM_S.
    """
    return link.length_km / FIBER_LIGHT_SPEED_KM_S


def neighbors(graph: NetworkGraph, node: NodeId) -> list[tuple[NodeId, LinkParams]]:
    """Neighbors of ``node`` with their link params, sorted by ascending id."""
    if not 0 <= node < graph.node_count:
        raise UnknownNodeError(f"node {node} not in graph with {graph.node_count} nodes")
    return list(graph._adjacency[node])


def sample_link_params(
    rng: np.random.Generator, ranges: ParamRanges, length_km: float | None = None
) -> LinkParams:
    """Draw LinkParams uniformly from the ranges; length may be supplied."""
    # Field sampling order is fixed; changing it changes generated graphs.
    return LinkParams(
        length_km=rng.uniform(*ranges.length_km) if length_km is None else length_km,
        p_success=rng.uniform(*ranges.p_success),
        tau_p_s=rng.uniform(*ranges.tau_p_s),
        tau_d_s=rng.uniform(*ranges.tau_d_s),
        base_fidelity=rng.uniform(*ranges.base_fidelity),
        coherence_time_s=rng.uniform(*ranges.coherence_time_s),
    )


def _components(node_count: int, pairs: set[tuple[NodeId, NodeId]]) -> list[list[NodeId]]:
    adj: dict[NodeId, list[NodeId]] = {v: [] for v in range(node_count)}
    for u, v in pairs:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * node_count
    comps = []
    for start in range(node_count):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def generate_network(config: TopologyConfig) -> NetworkGraph:
    """Generate a connected NetworkGraph; identical config gives identical graph.

    Pair iteration is in sorted (u, v) order and every realized link samples
    its parameters immediately, so the output is a pure function of the
    config. Disconnected samples are repaired deterministically: minor
    components are merged into the giant component one minimum-length link
    at a time.
    """
    rng = make_rng(config.seed)
    n = config.node_count
    ranges = config.param_ranges
    model = config.model

    positions: np.ndarray | None = None
    if isinstance(model, Waxman):
        positions = rng.uniform(0.0, model.area_km, size=(n, 2))
        diag = math.sqrt(2.0) * model.area_km

    links: dict[tuple[NodeId, NodeId], LinkParams] = {}
    for u in range(n):
        for v in range(u + 1, n):
            if isinstance(model, ErdosRenyi):
                if rng.random() < model.edge_probability:
                    links[(u, v)] = _sample_params(rng, ranges, rng.uniform(*ranges.length_km))
            else:
                d = float(np.hypot(*(positions[u] - positions[v])))
                if rng.random() < model.beta * math.exp(-d / (model.alpha * diag)):
                    links[(u, v)] = _sample_params(rng, ranges, max(d, _MIN_LENGTH_KM))

    # Connectivity repair: attach each minor component to the giant one.
    comps = _components(n, set(links))
    while len(comps) > 1:
        comps.sort(key=len)
        giant = comps[-1]
        minor = comps[0]
        if positions is not None:
            best = None
            for a in minor:
                for b in giant:
                    d = float(np.hypot(*(positions[a] - positions[b])))
                    key = (d, min(a, b), max(a, b))
                    if best is None or key < best:
                        best = key
            d, u, v = best
            links[(u, v)] = _sample_params(rng, ranges, max(d, _MIN_LENGTH_KM))
        else:
            # No geometry: join lowest ids over a minimum-length link.
            a, b = minor[0], giant[0]
            u, v = min(a, b), max(a, b)
            links[(u, v)] = _sample_params(rng, ranges, ranges.length_km[0])
        comps = _components(n, set(links))

    link_objs = tuple(Link(u, v, p) for (u, v), p in sorted(links.items()))
    return NetworkGraph(node_count=n, links=link_objs)


def is_connected(graph: NetworkGraph) -> bool:
    """BFS reachability of every node from node 0."""
    if graph.node_count == 1:
        return True
    comps = _components(graph.node_count, {(l.u, l.v) for l in graph.links})
    return len(comps) == 1


_LINK_FIELDS = ("length_km", "p_success", "tau_p_s", "tau_d_s", "base_fidelity", "coherence_time_s")


def topology_to_dict(graph: NetworkGraph) -> dict:
    return {
        "node_count": graph.node_count,
        "links": [
            {"u": l.u, "v": l.v, **{f: getattr(l.params, f) for f in _LINK_FIELDS}}
            for l in graph.links
        ],
    }


def topology_from_dict(doc: dict) -> NetworkGraph:
    if not isinstance(doc, dict):
        raise InvalidConfigError("topology document must be a JSON object")
    try:
        node_count = doc["node_count"]
        raw_links = doc["links"]
    except KeyError as exc:
        raise InvalidConfigError(f"topology document missing key {exc}") from None
    if not isinstance(node_count, int) or isinstance(node_count, bool):
        raise InvalidConfigError(f"node_count must be an integer, got {node_count!r}")
    links = []
    for i, entry in enumerate(raw_links):
        try:
            u, v = entry["u"], entry["v"]
            params = LinkParams(**{f: entry[f] for f in _LINK_FIELDS})
        except KeyError as exc:
            raise InvalidConfigError(f"links[{i}] missing key {exc}") from None
        if not (isinstance(u, int) and isinstance(v, int)) or u < 0 or v < 0:
            raise InvalidConfigError(f"links[{i}]: endpoints must be non-negative integers")
        if u > v:
            u, v = v, u
        links.append(Link(u, v, params))
    return NetworkGraph(node_count=node_count, links=tuple(links))


def canonical_topology_json(graph: NetworkGraph) -> str:
    """Compact canonical JSON form; the basis for topology hashing."""
    return json.dumps(topology_to_dict(graph), separators=(",", ":"))


def save_topology(graph: NetworkGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(topology_to_dict(graph), fh, indent=2)
        fh.write("\n")


def load_topology(path: str) -> NetworkGraph:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"topology file {path}: invalid JSON ({exc})") from None
    return topology_from_dict(doc)


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def topology_hash(graph: NetworkGraph) -> str:
    """FNV-1a 64 over the canonical topology JSON, as 16 hex digits."""
    return format(fnv1a_64(canonical_topology_json(graph).encode("utf-8")), "016x")
