"""Graph topologies and per-neighbor gossip rates.

Each node with at least one neighbor pushes updates at total rate ``lam``,
split across its neighbors (uniformly unless a custom edge list carries
explicit weights). Isolated nodes emit nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError


class TopologyKind(str, Enum):
    COMPLETE = "complete"
    RING = "ring"
    GRID = "grid"
    DISCONNECTED = "disconnected"
    CUSTOM = "custom"


@dataclass(frozen=True)
class TopologySpec:
    """Declarative description of one topology (one CTMC state).

    ``edges`` is only used for CUSTOM: a list of undirected (i, j) pairs,
    0-based, no self-loops, no duplicates. ``edge_weights`` optionally
    assigns a positive weight per edge; each node's outgoing rates are then
    proportional to the weights of its incident edges, normalized to ``lam``.
    """

    kind: TopologyKind
    wraparound: bool = True
    edges: tuple[tuple[int, int], ...] = ()
    edge_weights: tuple[float, ...] = ()

    @staticmethod
    def from_dict(d: dict) -> "TopologySpec":
        try:
            kind = TopologyKind(str(d["kind"]).lower())
        except (KeyError, ValueError) as e:
            raise ConfigurationError(f"bad topology spec {d!r}: {e}") from e
        edges = tuple((int(i), int(j)) for i, j in d.get("edges", ()))
        weights = tuple(float(w) for w in d.get("edge_weights", ()))
        return TopologySpec(
            kind=kind,
            wraparound=bool(d.get("wraparound", True)),
            edges=edges,
            edge_weights=weights,
        )

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.kind == TopologyKind.GRID:
            d["wraparound"] = self.wraparound
        if self.kind == TopologyKind.CUSTOM:
            d["edges"] = [list(e) for e in self.edges]
            if self.edge_weights:
                d["edge_weights"] = list(self.edge_weights)
        return d


@dataclass(frozen=True)
class Graph:
    """Realized undirected graph. Gossip runs both ways along each edge."""

    n: int
    neighbors: tuple[tuple[int, ...], ...]

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(nb) for nb in self.neighbors)

    @property
    def edge_count(self) -> int:
        return sum(self.degrees) // 2


@dataclass(frozen=True)
class GossipRateTable:
    """Per-node, per-neighbor push rates for one topology.

    ``rates[i]`` aligns with ``graph.neighbors[i]``; rows of positive-degree
    nodes sum to the total per-node rate ``lam``.
    """

    graph: Graph
    lam: float
    rates: tuple[tuple[float, ...], ...]

    def total_rate(self, i: int) -> float:
        return sum(self.rates[i])


def _ring_neighbors(n: int) -> list[list[int]]:
    return [[(i - 1) % n, (i + 1) % n] for i in range(n)]


def _grid_neighbors(n: int, wraparound: bool) -> list[list[int]]:
    side = math.isqrt(n)
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for r in range(side):
        for c in range(side):
            i = r * side + c
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                rr, cc = r + dr, c + dc
                if wraparound:
                    rr, cc = rr % side, cc % side
                elif not (0 <= rr < side and 0 <= cc < side):
                    continue
                nbrs[i].append(rr * side + cc)
    # n = 1 torus would self-loop; n = 4 torus duplicates (each neighbor
    # twice around the 2-cycle) -- deduplicate and drop self-loops.
    out = []
    for i in range(n):
        seen = sorted({j for j in nbrs[i] if j != i})
        out.append(seen)
    return out


def build_topology(spec: TopologySpec, n: int) -> Graph:
    """Realize ``spec`` at ``n`` nodes. Deterministic in (spec, n)."""
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    if spec.kind == TopologyKind.COMPLETE:
        nbrs = [[j for j in range(n) if j != i] for i in range(n)]
    elif spec.kind == TopologyKind.RING:
        if n < 3:
            raise ConfigurationError(f"ring topology requires n >= 3, got {n}")
        nbrs = _ring_neighbors(n)
    elif spec.kind == TopologyKind.GRID:
        side = math.isqrt(n)
        if side * side != n:
            raise ConfigurationError(f"grid topology requires a perfect-square n, got {n}")
        nbrs = _grid_neighbors(n, spec.wraparound)
    elif spec.kind == TopologyKind.DISCONNECTED:
        nbrs = [[] for _ in range(n)]
    elif spec.kind == TopologyKind.CUSTOM:
        nbrs = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for i, j in spec.edges:
            if i == j:
                raise ConfigurationError(f"custom edge list contains self-loop ({i}, {j})")
            if not (0 <= i < n and 0 <= j < n):
                raise ConfigurationError(
                    f"custom edge ({i}, {j}) references a node outside 0..{n - 1}"
                )
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ConfigurationError(f"duplicate edge ({i}, {j}) in custom edge list")
            seen.add(key)
            nbrs[i].append(j)
            nbrs[j].append(i)
        nbrs = [sorted(nb) for nb in nbrs]
    else:  # pragma: no cover
        raise ConfigurationError(f"unknown topology kind {spec.kind!r}")
    return Graph(n=n, neighbors=tuple(tuple(nb) for nb in nbrs))


def gossip_rates(graph: Graph, lam: float, spec: TopologySpec | None = None) -> GossipRateTable:
    """Assign per-neighbor rates summing to ``lam`` per positive-degree node.

    Default split is uniform (lam / degree). When ``spec`` is a custom
    topology with edge weights, rates are weight-proportional instead.
    """
    if lam <= 0:
        raise ConfigurationError(f"gossip rate lambda must be > 0, got {lam}")
    weight_of: dict[tuple[int, int], float] = {}
    if spec is not None and spec.edge_weights:
        if len(spec.edge_weights) != len(spec.edges):
            raise ConfigurationError(
                f"{len(spec.edge_weights)} edge weights for {len(spec.edges)} edges"
            )
        for (i, j), w in zip(spec.edges, spec.edge_weights):
            if w <= 0:
                raise ConfigurationError(f"edge weight must be positive, got {w} on ({i}, {j})")
            weight_of[(min(i, j), max(i, j))] = w

    rows: list[tuple[float, ...]] = []
    for i, nbrs in enumerate(graph.neighbors):
        if not nbrs:
            rows.append(())
            continue
        if weight_of:
            ws = np.array([weight_of[(min(i, j), max(i, j))] for j in nbrs], dtype=float)
            rows.append(tuple(lam * ws / ws.sum()))
        else:
            rows.append((lam / len(nbrs),) * len(nbrs))
    return GossipRateTable(graph=graph, lam=lam, rates=tuple(rows))


def load_edge_list(path: str) -> tuple[tuple[int, int], ...]:
    """Read an undirected edge list: one "i j" pair per line, 0-based.

    Blank lines and lines starting with '#' are skipped.
    """
    edges: list[tuple[int, int]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ConfigurationError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError as e:
                raise ConfigurationError(f"{path}:{lineno}: {e}") from e
    return tuple(edges)
