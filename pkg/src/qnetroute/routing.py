"""The four routing protocols: Dijkstra, Bellman-Ford, genetic, Q-learning.

All four are deterministic functions of (graph, src, dst, config incl.
seed). The deterministic routers minimize total link weight (expected
entanglement generation time) with a fixed tie-break: fewer nodes first,
then lexicographically smallest node sequence. The genetic router maximizes
path fidelity over simple paths. The Q-learning router trains a tabular
policy and returns the literal greedy walk, loops included; it is the only
router whose output may revisit nodes or fail to reach the destination.

Execution time is measured with a monotonic clock around the routing
computation only and is excluded from determinism guarantees.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidConfigError, UnknownNodeError, UnreachableError
from .fidelity import PathMetrics, link_fidelity, link_weight, path_metrics
from .topology import NetworkGraph, NodeId


class Protocol(Enum):
    DIJKSTRA = "dijkstra"
    BELLMAN_FORD = "bellman-ford"
    GENETIC = "genetic"
    Q_LEARNING = "q-learning"


@dataclass(frozen=True)
class RouteResult:
    protocol: Protocol
    metrics: PathMetrics
    exec_time_s: float
    reached_destination: bool


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 50
    generations: int = 100
    crossover_rate: float = 0.8
    mutation_rate: float = 0.2
    elitism_count: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 1:
            raise InvalidConfigError(f"ga.population_size must be >= 1, got {self.population_size}")
        if self.generations < 1:
            raise InvalidConfigError(f"ga.generations must be >= 1, got {self.generations}")
        if not 0 <= self.crossover_rate <= 1:
            raise InvalidConfigError(f"ga.crossover_rate must be in [0, 1], got {self.crossover_rate}")
        if not 0 <= self.mutation_rate <= 1:
            raise InvalidConfigError(f"ga.mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if not 0 <= self.elitism_count < self.population_size:
            raise InvalidConfigError(
                f"ga.elitism_count must be in [0, population_size), got {self.elitism_count}"
            )
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError(f"ga.seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class QlConfig:
    episodes: int = 500
    learning_rate: float = 0.1
    discount: float = 0.9
    epsilon: float = 0.1
    step_penalty: float = 0.01
    goal_reward: float = 1.0
    max_steps_factor: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.episodes < 1:
            raise InvalidConfigError(f"ql.episodes must be >= 1, got {self.episodes}")
        if not 0 < self.learning_rate <= 1:
            raise InvalidConfigError(f"ql.learning_rate must be in (0, 1], got {self.learning_rate}")
        if not 0 <= self.discount < 1:
            raise InvalidConfigError(f"ql.discount must be in [0, 1), got {self.discount}")
        if not 0 <= self.epsilon <= 1:
            raise InvalidConfigError(f"ql.epsilon must be in [0, 1], got {self.epsilon}")
        if not self.step_penalty > 0:
            raise InvalidConfigError(f"ql.step_penalty must be > 0, got {self.step_penalty}")
        if not self.goal_reward > 0:
            raise InvalidConfigError(f"ql.goal_reward must be > 0, got {self.goal_reward}")
        if self.max_steps_factor < 1:
            raise InvalidConfigError(
                f"ql.max_steps_factor must be >= 1, got {self.max_steps_factor}"
            )
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError(f"ql.seed must be an unsigned 64-bit integer, got {self.seed}")


def _check_endpoints(graph: NetworkGraph, src: NodeId, dst: NodeId) -> None:
    for node in (src, dst):
        if not 0 <= node < graph.node_count:
            raise UnknownNodeError(f"node {node} not in graph with {graph.node_count} nodes")
    if src == dst:
        raise InvalidConfigError(f"src and dst must differ, both are {src}")


def _adjacency_ids(graph: NetworkGraph) -> list[list[NodeId]]:
    return [[w for w, _ in graph._adjacency[v]] for v in range(graph.node_count)]


def _weight_map(graph: NetworkGraph) -> dict[tuple[NodeId, NodeId], float]:
    w = {}
    for link in graph.links:
        value = link_weight(link.params)
        w[(link.u, link.v)] = value
        w[(link.v, link.u)] = value
    return w


def _fidelity_map(graph: NetworkGraph) -> dict[tuple[NodeId, NodeId], float]:
    f = {}
    for link in graph.links:
        value = link_fidelity(link.params)
        f[(link.u, link.v)] = value
        f[(link.v, link.u)] = value
    return f


def _dijkstra_path(graph: NetworkGraph, src: NodeId, dst: NodeId) -> tuple[NodeId, ...]:
    """Minimum-weight path; ties by fewer nodes, then lexicographic sequence.

    Heap entries carry (weight, node count, node sequence) so the heap order
    is exactly the path tie-break order.
    """
    weights = _weight_map(graph)
    done: set[NodeId] = set()
    heap: list[tuple[float, int, tuple[NodeId, ...]]] = [(0.0, 1, (src,))]
    while heap:
        dist, length, path = heapq.heappop(heap)
        node = path[-1]
        if node in done:
            continue
        done.add(node)
        if node == dst:
            return path
        for nbr, _ in graph._adjacency[node]:
            if nbr not in done:
                heapq.heappush(heap, (dist + weights[(node, nbr)], length + 1, path + (nbr,)))
    raise UnreachableError(f"no path from {src} to {dst}")


def _bellman_ford_path(graph: NetworkGraph, src: NodeId, dst: NodeId) -> tuple[NodeId, ...]:
    """Same contract and tie-break as _dijkstra_path, by edge relaxation.

    Links are relaxed in sorted (u, v) order, u->v then v->u, until no label
    improves. Weights are strictly positive so labels stay simple paths.
    """
    weights = _weight_map(graph)
    labels: dict[NodeId, tuple[float, int, tuple[NodeId, ...]]] = {src: (0.0, 1, (src,))}
    changed = True
    while changed:
        changed = False
        for link in graph.links:
            for u, v in ((link.u, link.v), (link.v, link.u)):
                label = labels.get(u)
                if label is None:
                    continue
                dist, length, path = label
                candidate = (dist + weights[(u, v)], length + 1, path + (v,))
                if v not in labels or candidate < labels[v]:
                    labels[v] = candidate
                    changed = True
    if dst not in labels:
        raise UnreachableError(f"no path from {src} to {dst}")
    return labels[dst][2]


def _reachable(graph: NetworkGraph, src: NodeId, dst: NodeId) -> bool:
    seen = {src}
    stack = [src]
    while stack:
        v = stack.pop()
        if v == dst:
            return True
        for w, _ in graph._adjacency[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def route_dijkstra(graph: NetworkGraph, src: NodeId, dst: NodeId) -> RouteResult:
    _check_endpoints(graph, src, dst)
    start = time.perf_counter()
    path = _dijkstra_path(graph, src, dst)
    elapsed = time.perf_counter() - start
    return RouteResult(Protocol.DIJKSTRA, path_metrics(graph, path), elapsed, True)


def route_bellman_ford(graph: NetworkGraph, src: NodeId, dst: NodeId) -> RouteResult:
    _check_endpoints(graph, src, dst)
    start = time.perf_counter()
    path = _bellman_ford_path(graph, src, dst)
    elapsed = time.perf_counter() - start
    return RouteResult(Protocol.BELLMAN_FORD, path_metrics(graph, path), elapsed, True)


def _erase_loops(seq: list[NodeId]) -> list[NodeId]:
    path: list[NodeId] = []
    pos: dict[NodeId, int] = {}
    for node in seq:
        if node in pos:
            for dropped in path[pos[node] + 1:]:
                del pos[dropped]
            del path[pos[node] + 1:]
        else:
            pos[node] = len(path)
            path.append(node)
    return path


def _loop_erased_walk(
    adj: list[list[NodeId]],
    src: NodeId,
    dst: NodeId,
    rng: np.random.Generator,
    max_steps: int,
) -> list[NodeId] | None:
    """Random walk from src until dst with on-line loop erasure; None on cap."""
    path = [src]
    pos = {src: 0}
    node = src
    for _ in range(max_steps):
        nbrs = adj[node]
        node = nbrs[int(rng.integers(len(nbrs)))]
        if node in pos:
            for dropped in path[pos[node] + 1:]:
                del pos[dropped]
            del path[pos[node] + 1:]
        else:
            pos[node] = len(path)
            path.append(node)
        if node == dst:
            return path
    return None


class _GeneticSearch:
    """Population search over simple src->dst paths, fitness = path fidelity."""

    _WALK_ATTEMPTS = 3

    def __init__(self, graph: NetworkGraph, src: NodeId, dst: NodeId, config: GaConfig):
        self.src = src
        self.dst = dst
        self.config = config
        self.rng = make_rng(config.seed)
        self.adj = _adjacency_ids(graph)
        self.fidelities = _fidelity_map(graph)
        self.walk_cap = max(20 * graph.node_count, 200)
        self.seed_path = list(_dijkstra_path(graph, src, dst))
        self._fitness_cache: dict[tuple[NodeId, ...], float] = {}

    def fitness(self, path: list[NodeId]) -> float:
        key = tuple(path)
        cached = self._fitness_cache.get(key)
        if cached is None:
            cached = 1.0
            for u, v in zip(path, path[1:]):
                cached *= self.fidelities[(u, v)]
            self._fitness_cache[key] = cached
        return cached

    def _random_path(self) -> list[NodeId]:
        for _ in range(self._WALK_ATTEMPTS):
            walk = _loop_erased_walk(self.adj, self.src, self.dst, self.rng, self.walk_cap)
            if walk is not None:
                return walk
        return list(self.seed_path)

    def _tournament(self, ranked: list[list[NodeId]], k: int = 3) -> list[NodeId]:
        picks = self.rng.integers(0, len(ranked), size=k)
        # ranked is sorted best-first, so the smallest index wins.
        return ranked[int(picks.min())]

    def _crossover(self, p1: list[NodeId], p2: list[NodeId]) -> list[NodeId]:
        common = sorted(set(p1[1:-1]) & set(p2[1:-1]))
        if not common:
            return list(p1)
        pivot = common[int(self.rng.integers(len(common)))]
        spliced = p1[: p1.index(pivot)] + p2[p2.index(pivot):]
        return _erase_loops(spliced)

    def _mutate(self, path: list[NodeId]) -> list[NodeId]:
        idx = int(self.rng.integers(len(path) - 1))
        walk = _loop_erased_walk(self.adj, path[idx], self.dst, self.rng, self.walk_cap)
        if walk is None:
            return path
        return _erase_loops(path[:idx] + walk)

    def run(self) -> tuple[list[NodeId], list[float]]:
        """Returns (best path found, best population fitness per generation)."""
        cfg = self.config
        population = [list(self.seed_path)]
        while len(population) < cfg.population_size:
            population.append(self._random_path())

        best_path = list(self.seed_path)
        best_fit = self.fitness(best_path)
        history = []
        for _ in range(cfg.generations):
            ranked = sorted(population, key=lambda p: (-self.fitness(p), tuple(p)))
            top = ranked[0]
            top_fit = self.fitness(top)
            history.append(top_fit)
            if top_fit > best_fit or (top_fit == best_fit and tuple(top) < tuple(best_path)):
                best_path, best_fit = list(top), top_fit

            next_population = [list(p) for p in ranked[: cfg.elitism_count]]
            while len(next_population) < cfg.population_size:
                parent = self._tournament(ranked)
                if self.rng.random() < cfg.crossover_rate:
                    child = self._crossover(parent, self._tournament(ranked))
                else:
                    child = list(parent)
                if self.rng.random() < cfg.mutation_rate:
                    child = self._mutate(child)
                next_population.append(child)
            population = next_population

        for path in population:
            fit = self.fitness(path)
            if fit > best_fit or (fit == best_fit and tuple(path) < tuple(best_path)):
                best_path, best_fit = list(path), fit
        return best_path, history


def route_genetic(graph: NetworkGraph, src: NodeId, dst: NodeId, config: GaConfig) -> RouteResult:
    """Best simple path found by the population search.

    The weight-optimal path is part of the initial population and the best
    individual ever seen is returned, so the result's fidelity is never
    below the Dijkstra path's.
    """
    _check_endpoints(graph, src, dst)
    start = time.perf_counter()
    search = _GeneticSearch(graph, src, dst, config)
    best_path, _ = search.run()
    elapsed = time.perf_counter() - start
    return RouteResult(Protocol.GENETIC, path_metrics(graph, best_path), elapsed, True)


class _QTrainer:
    """Tabular Q-learning over (node, neighbor index) pairs."""

    def __init__(self, graph: NetworkGraph, src: NodeId, dst: NodeId, config: QlConfig):
        self.src = src
        self.dst = dst
        self.config = config
        self.rng = make_rng(config.seed)
        self.adj = _adjacency_ids(graph)
        weights = _weight_map(graph)
        fidelities = _fidelity_map(graph)
        self.w = [np.array([weights[(v, n)] for n in self.adj[v]]) for v in range(graph.node_count)]
        self.f = [np.array([fidelities[(v, n)] for n in self.adj[v]]) for v in range(graph.node_count)]
        self.q = [np.zeros(len(self.adj[v])) for v in range(graph.node_count)]
        self.max_steps = config.max_steps_factor * graph.node_count

    def train(self) -> None:
        cfg = self.config
        for _ in range(cfg.episodes):
            node = self.src
            fid = 1.0
            for _ in range(self.max_steps):
                if self.rng.random() < cfg.epsilon:
                    action = int(self.rng.integers(len(self.adj[node])))
                else:
                    action = int(np.argmax(self.q[node]))
                nxt = self.adj[node][action]
                fid *= self.f[node][action]
                reward = -cfg.step_penalty * self.w[node][action]
                if nxt == self.dst:
                    target = reward + cfg.goal_reward * fid
                else:
                    target = reward + cfg.discount * float(self.q[nxt].max())
                self.q[node][action] += cfg.learning_rate * (target - self.q[node][action])
                if nxt == self.dst:
                    break
                node = nxt

    def extract_walk(self) -> tuple[list[NodeId], bool]:
        """Greedy walk from src; ties go to the smallest neighbor id."""
        walk = [self.src]
        node = self.src
        for _ in range(self.max_steps):
            action = int(np.argmax(self.q[node]))
            node = self.adj[node][action]
            walk.append(node)
            if node == self.dst:
                return walk, True
        return walk, False


def route_qlearning(graph: NetworkGraph, src: NodeId, dst: NodeId, config: QlConfig) -> RouteResult:
    """Train a tabular policy, then follow it greedily.

    The returned sequence is the literal greedy walk, loops included, capped
    at max_steps_factor * node_count traversals; reached_destination is
    False when the cap is hit first (metrics still describe the truncated
    walk).
    """
    _check_endpoints(graph, src, dst)
    if not _reachable(graph, src, dst):
        raise UnreachableError(f"no path from {src} to {dst}")
    start = time.perf_counter()
    trainer = _QTrainer(graph, src, dst, config)
    trainer.train()
    walk, reached = trainer.extract_walk()
    elapsed = time.perf_counter() - start
    return RouteResult(Protocol.Q_LEARNING, path_metrics(graph, walk), elapsed, reached)


def route(
    graph: NetworkGraph,
    protocol: Protocol,
    src: NodeId,
    dst: NodeId,
    ga: GaConfig | None = None,
    ql: QlConfig | None = None,
) -> RouteResult:
    """Dispatch a routing call to the requested protocol."""
    if protocol is Protocol.DIJKSTRA:
        return route_dijkstra(graph, src, dst)
    if protocol is Protocol.BELLMAN_FORD:
        return route_bellman_ford(graph, src, dst)
    if protocol is Protocol.GENETIC:
        return route_genetic(graph, src, dst, ga if ga is not None else GaConfig())
    return route_qlearning(graph, src, dst, ql if ql is not None else QlConfig())
