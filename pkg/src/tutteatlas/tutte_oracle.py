"""Deletion-contraction Tutte polynomial oracle for small multigraphs."""

from __future__ import annotations

import itertools
import json
import logging
import math
import threading
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Any, NamedTuple

import networkx as nx
import numpy as np

from tutteatlas.errors import DisconnectedGraphError, GraphTooLargeError, ValidationError
from tutteatlas.exact_poly import BiPoly

logger = logging.getLogger(__name__)

DEFAULT_MAX_EDGES = 64

# Tie-breaking inside colour classes enumerates at most this many orderings.
_MAX_TIE_ORDERINGS = 720

CanonicalKey = tuple[int, tuple[tuple[int, int, int], ...]]
EdgeMap = dict[tuple[int, int], int]


class Edge(NamedTuple):
    """Edge class ``u -- v`` with multiplicity; ``u == v`` is a loop."""

    u: int
    v: int
    multiplicity: int = 1


@dataclass(frozen=True)
class Multigraph:
    """Vertex count plus a multiset of edges.

    Parallel entries are merged on construction, endpoints are stored with
    ``u <= v`` and the edge tuple is sorted.
    """

    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.vertex_count < 0:
            raise ValidationError(f"vertex_count must be >= 0, got {self.vertex_count}")
        merged: dict[tuple[int, int], int] = {}
        for raw in self.edges:
            u, v, m = Edge(*raw)
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValidationError(
                    f"edge ({u}, {v}) references a vertex outside 0..{self.vertex_count - 1}"
                )
            if m < 1:
                raise ValidationError(f"edge ({u}, {v}) has multiplicity {m} < 1")
            key = (min(u, v), max(u, v))
            merged[key] = merged.get(key, 0) + m
        object.__setattr__(
            self, "edges", tuple(Edge(u, v, m) for (u, v), m in sorted(merged.items()))
        )

    @classmethod
    def from_edges(
        cls, vertex_count: int, edges: Iterable[tuple[int, int] | tuple[int, int, int]]
    ) -> Multigraph:
        return cls(vertex_count, tuple(Edge(*e) for e in edges))

    @property
    def edge_count(self) -> int:
        """Number of edges counted with multiplicity."""
        return sum(e.multiplicity for e in self.edges)

    @property
    def loop_count(self) -> int:
        return sum(e.multiplicity for e in self.edges if e.u == e.v)

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        for u, v, m in self.edges:
            graph.add_edges_from([(u, v)] * m)
        return graph

    def is_connected(self) -> bool:
        if self.vertex_count <= 1:
            return True
        return bool(nx.is_connected(self.to_networkx()))

    def to_json(self) -> dict[str, Any]:
        return {"vertices": self.vertex_count, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Multigraph:
        try:
            vertex_count = int(data["vertices"])
            edges = [Edge(*(int(part) for part in entry)) for entry in data["edges"]]
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"malformed graph description: {e}") from e
        return cls(vertex_count, tuple(edges))

    @classmethod
    def load(cls, path: str | Path) -> Multigraph:
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def _canonical_form(vertex_count: int, edges: Mapping[tuple[int, int], int]) -> CanonicalKey:
    """Relabel by degree refinement and return the sorted relabelled edge list."""
    adjacency: list[dict[int, int]] = [{} for _ in range(vertex_count)]
    for (u, v), m in edges.items():
        adjacency[u][v] = adjacency[u].get(v, 0) + m
        if u != v:
            adjacency[v][u] = adjacency[v].get(u, 0) + m

    colors = [
        (sum(nbrs.values()) + nbrs.get(w, 0), nbrs.get(w, 0))
        for w, nbrs in enumerate(adjacency)
    ]
    palette = sorted(set(colors))
    color_of = [palette.index(c) for c in colors]
    while True:
        signatures = [
            (color_of[w], tuple(sorted((color_of[n], m) for n, m in nbrs.items() if n != w)))
            for w, nbrs in enumerate(adjacency)
        ]
        palette_sig = sorted(set(signatures))
        refined = [palette_sig.index(s) for s in signatures]
        if len(palette_sig) == len(set(color_of)):
            color_of = refined
            break
        color_of = refined

    classes: dict[int, list[int]] = {}
    for w in range(vertex_count):
        classes.setdefault(color_of[w], []).append(w)
    groups = [classes[c] for c in sorted(classes)]

    orderings_needed = math.prod(math.factorial(len(g)) for g in groups)
    if orderings_needed <= _MAX_TIE_ORDERINGS:
        candidates: Iterable[tuple[tuple[int, ...], ...]] = itertools.product(
            *(itertools.permutations(g) for g in groups)
        )
    else:
        candidates = [tuple(tuple(g) for g in groups)]

    best: tuple[tuple[int, int, int], ...] | None = None
    for choice in candidates:
        order = [w for group in choice for w in group]
        label = {w: position for position, w in enumerate(order)}
        relabelled = tuple(
            sorted(
                (min(label[u], label[v]), max(label[u], label[v]), m)
                for (u, v), m in edges.items()
            )
        )
        if best is None or relabelled < best:
            best = relabelled
    return vertex_count, best or ()


def canonical_key(g: Multigraph) -> CanonicalKey:
    """Memo key: the sorted edge list after deterministic relabelling.

    Equal keys imply equal labelled graphs after relabelling, so the key never
    aliases non-isomorphic graphs.
    """
    return _canonical_form(g.vertex_count, {(e.u, e.v): e.multiplicity for e in g.edges})


class EdgeSelection(StrEnum):
    """Which non-loop, non-bridge edge class to recurse on."""

    MAX_MULTIPLICITY = "max-multiplicity"
    MIN_MULTIPLICITY = "min-multiplicity"
    LAST = "last"


def _connected_without_one(
    vertex_count: int, edges: Mapping[tuple[int, int], int], skip: tuple[int, int]
) -> bool:
    """Union-find connectivity after removing one copy of ``skip``."""
    parent = list(range(vertex_count))

    def find(w: int) -> int:
        while parent[w] != w:
            parent[w] = parent[parent[w]]
            w = parent[w]
        return w

    components = vertex_count
    for (u, v), m in edges.items():
        if (u, v) == skip and m == 1:
            continue
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            components -= 1
    return components == 1


def _contract(
    vertex_count: int, edges: Mapping[tuple[int, int], int], u: int, v: int
) -> tuple[int, EdgeMap, int]:
    """Merge v into u (u < v); returns (vertex_count, edges, loops created)."""

    def relabel(w: int) -> int:
        if w == v:
            w = u
        return w - 1 if w > v else w

    merged: EdgeMap = {}
    loops = 0
    for (a, b), m in edges.items():
        a2, b2 = relabel(a), relabel(b)
        if a2 == b2:
            loops += m
            continue
        key = (min(a2, b2), max(a2, b2))
        merged[key] = merged.get(key, 0) + m
    return vertex_count - 1, merged, loops


class TutteOracle:
    """Memoised deletion-contraction over loopless multigraphs.

    The cache maps canonical keys to polynomials and is guarded by a lock, so
    one oracle can serve several worker threads.
    """

    def __init__(
        self,
        max_edges: int = DEFAULT_MAX_EDGES,
        selection: EdgeSelection = EdgeSelection.MAX_MULTIPLICITY,
    ) -> None:
        self.max_edges = max_edges
        self.selection = EdgeSelection(selection)
        self._cache: dict[CanonicalKey, BiPoly] = {}
        self._lock = threading.Lock()

    @property
    def cache_size(self) -> int:
        with self._lock:
            return len(self._cache)

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()

    def tutte(self, g: Multigraph) -> BiPoly:
        """T(g; x, y) by deletion-contraction."""
        if g.edge_count > self.max_edges:
            raise GraphTooLargeError(
                f"graph has {g.edge_count} edges, oracle bound is {self.max_edges}"
            )
        if not g.is_connected():
            raise DisconnectedGraphError(f"graph with {g.vertex_count} vertices is disconnected")

        loops = g.loop_count
        edges = {(e.u, e.v): e.multiplicity for e in g.edges if e.u != e.v}
        result = self._solve(max(g.vertex_count, 1), edges) * (BiPoly.y() ** loops)
        logger.debug(f"oracle solved {g.edge_count}-edge graph, cache size {self.cache_size}")
        return result

    def _choose(self, edges: Mapping[tuple[int, int], int]) -> tuple[int, int]:
        items = sorted(edges.items())
        if self.selection is EdgeSelection.MAX_MULTIPLICITY:
            return max(items, key=lambda item: item[1])[0]
        if self.selection is EdgeSelection.MIN_MULTIPLICITY:
            return min(items, key=lambda item: item[1])[0]
        return items[-1][0]

    def _solve(self, vertex_count: int, edges: EdgeMap) -> BiPoly:
        if not edges:
            return BiPoly.constant(1)

        key = _canonical_form(vertex_count, edges)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached

        bridges = [
            e for e, m in sorted(edges.items())
            if m == 1 and not _connected_without_one(vertex_count, edges, e)
        ]
        if bridges:
            u, v = bridges[0]
            n2, contracted, _ = _contract(vertex_count, edges, u, v)
            result = BiPoly.x() * self._solve(n2, contracted)
        else:
            u, v = self._choose(edges)
            m = edges[(u, v)]

            deleted = dict(edges)
            if m == 1:
                del deleted[(u, v)]
            else:
                deleted[(u, v)] = m - 1

            n2, contracted, loops = _contract(vertex_count, edges, u, v)
            # the contracted copy disappears; its m - 1 parallel partners become loops
            result = self._solve(vertex_count, deleted) + self._solve(
                n2, contracted
            ) * BiPoly.y() ** (loops - 1)

        with self._lock:
            self._cache[key] = result
        return result


_default_oracle = TutteOracle()


def tutte(g: Multigraph, max_edges: int | None = None) -> BiPoly:
    """Tutte polynomial of a connected multigraph via the shared oracle."""
    if max_edges is not None and max_edges != _default_oracle.max_edges:
        return TutteOracle(max_edges=max_edges).tutte(g)
    return _default_oracle.tutte(g)


def spanning_tree_count(g: Multigraph) -> int:
    """Kirchhoff's theorem: determinant of the Laplacian with one row/column removed."""
    n = g.vertex_count
    if n <= 1:
        return 1
    laplacian = np.zeros((n, n), dtype=float)
    for u, v, m in g.edges:
        if u == v:
            continue
        laplacian[u, v] -= m
        laplacian[v, u] -= m
        laplacian[u, u] += m
        laplacian[v, v] += m
    return int(round(np.linalg.det(laplacian[1:, 1:])))
