"""Link and path fidelity, and the routing weight derived from link rates.

A fresh pair on a link starts at the link's base fidelity and is discounted
by exponential memory decay over the time it takes to generate it:

    F_link = base_fidelity * exp(-T_gen / coherence_time)

Path fidelity composes multiplicatively over the traversed links (the
standard first-order model under entanglement swapping; swapping itself is
treated as deterministic). A walk that traverses a link k times multiplies
its fidelity in k times, so looping routes are penalized naturally.

Deterministic routers minimize the summed link weight, defined as the
reciprocal entanglement rate of a fresh pair, i.e. the expected generation
time. Weight and fidelity are related through the timing model but not
identical, so the weight-optimal and fidelity-optimal paths can differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import NotAPathError
from .entanglement import expected_generation_time
from .topology import LinkParams, NetworkGraph, NodeId


@dataclass(frozen=True)
class PathMetrics:
    """Evaluation of one node sequence: fidelity, weight, length in nodes."""

    node_sequence: tuple[NodeId, ...]
    fidelity: float
    total_weight: float
    path_length: int


def link_fidelity(link: LinkParams) -> float:
    """Fidelity of a pair on this link after its expected generation time."""
    return link.base_fidelity * math.exp(-expected_generation_time(link) / link.coherence_time_s)


def link_weight(link: LinkParams) -> float:
    """Routing weight: reciprocal fresh-pair rate, i.e. the expected
    generation time (returned directly to avoid a double reciprocal)."""
    return expected_generation_time(link)


def _links_along(graph: NetworkGraph, node_sequence: Sequence[NodeId]) -> list[LinkParams]:
    if len(node_sequence) < 1:
        raise NotAPathError("node sequence is empty")
    links = []
    for u, v in zip(node_sequence, node_sequence[1:]):
        params = graph.link(u, v)
        if params is None:
            raise NotAPathError(f"({u}, {v}) is not a link of the graph")
        links.append(params)
    return links


def path_fidelity(graph: NetworkGraph, node_sequence: Sequence[NodeId]) -> float:
    """Product of link fidelities along the sequence; 1.0 for a single node.

    Repeated traversals of a link each contribute another factor.
    """
    fidelity = 1.0
    for params in _links_along(graph, node_sequence):
        fidelity *= link_fidelity(params)
    return fidelity


def path_weight(graph: NetworkGraph, node_sequence: Sequence[NodeId]) -> float:
    """Sum of link weights along the sequence; 0.0 for a single node."""
    return sum(link_weight(params) for params in _links_along(graph, node_sequence))


def path_metrics(graph: NetworkGraph, node_sequence: Sequence[NodeId]) -> PathMetrics:
    """Evaluate a node sequence into PathMetrics."""
    seq = tuple(node_sequence)
    return PathMetrics(
        node_sequence=seq,
        fidelity=path_fidelity(graph, seq),
        total_weight=path_weight(graph, seq),
        path_length=len(seq),
    )
