"""Inter-agent interaction graphs compatible with the polyhedral symmetries.

Provides the automorphism test A P = P A, the symmetry assumption check
(undirected + connected + every vertex-axis permutation an automorphism),
exhaustive enumeration of symmetric graphs via unions of edge orbits, and
the specific analysis graphs used by the stability algorithm for each
solid.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .polyhedra import (
    SchlafliSolid,
    SymmetrySet,
    permutation_matrix,
    rotation_group,
)

__all__ = [
    "InterAgentGraph",
    "complete_graph",
    "platonic_graph",
    "empty_graph",
    "graph_from_edges",
    "is_automorphism",
    "satisfies_symmetry_assumption",
    "edge_orbits",
    "enumerate_symmetric_graphs",
    "assumption3_graph",
]

# Tetrahedral inner product: four unit vectors with all pairwise dots at
# this value form a regular tetrahedron.
_TETRA_DOT = -1.0 / 3.0


@dataclass(frozen=True)
class InterAgentGraph:
    """Undirected simple graph on the agent set, stored as a 0/1 matrix."""

    adjacency: np.ndarray = field(repr=False)  # (n, n) symmetric, zero diagonal

    def __post_init__(self) -> None:
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric (undirected graph)")
        if np.any(np.diag(a) != 0):
            raise ValueError("self-loops are not allowed")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        a = a.astype(int)
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Sorted 0-based edge list."""
        return [
            (i, j)
            for i, j in itertools.combinations(range(self.n), 2)
            if self.adjacency[i, j]
        ]

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for j in np.flatnonzero(self.adjacency[i]):
                if int(j) not in seen:
                    seen.add(int(j))
                    frontier.append(int(j))
        return len(seen) == self.n

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [[i + 1, j + 1] for i, j in self.edges()],
        }

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g


def graph_from_edges(n: int, edges) -> InterAgentGraph:
    """Build a graph from 0-based unordered vertex pairs."""
    a = np.zeros((n, n), dtype=int)
    for i, j in edges:
        if i == j:
            raise ValueError("self-loops are not allowed")
        a[i, j] = a[j, i] = 1
    return InterAgentGraph(a)


def graph_from_json(text: str) -> InterAgentGraph:
    """Parse the JSON form produced by :meth:`InterAgentGraph.to_json_dict`.

    Edges are 1-based in the JSON document.
    """
    data = json.loads(text)
    n = int(data["n"])
    return graph_from_edges(n, [(int(i) - 1, int(j) - 1) for i, j in data["edges"]])


def complete_graph(n: int) -> InterAgentGraph:
    return InterAgentGraph(np.ones((n, n), dtype=int) - np.eye(n, dtype=int))


def empty_graph(n: int) -> InterAgentGraph:
    return InterAgentGraph(np.zeros((n, n), dtype=int))


def platonic_graph(solid: SchlafliSolid) -> InterAgentGraph:
    """The 1-skeleton of the solid: vertices adjacent along polyhedron edges.

    Polyhedron edges join the vertex pairs at the maximal pairwise inner
    product.
    """
    v = solid.vertices
    n = solid.n_vertices
    edge_dot = max(float(v[i] @ v[j]) for i, j in itertools.combinations(range(n), 2))
    return graph_from_edges(
        n,
        [
            (i, j)
            for i, j in itertools.combinations(range(n), 2)
            if abs(float(v[i] @ v[j]) - edge_dot) < 1e-9
        ],
    )


def is_automorphism(graph: InterAgentGraph, perm: tuple[int, ...]) -> bool:
    """True iff the permutation preserves adjacency: A P = P A exactly."""
    p = permutation_matrix(perm)
    a = graph.adjacency
    return np.array_equal(a @ p, p @ a)


def satisfies_symmetry_assumption(graph: InterAgentGraph, symmetry: SymmetrySet) -> bool:
    """Connected undirected graph with every vertex-axis permutation an
    automorphism (undirectedness is structural to :class:`InterAgentGraph`)."""
    if graph.n != symmetry.solid.n_vertices:
        raise ValueError("graph size does not match the solid")
    if not graph.is_connected():
        return False
    return all(is_automorphism(graph, s.perm) for s in symmetry.symmetries)


def edge_orbits(
    group: frozenset[tuple[int, ...]], n: int
) -> list[frozenset[tuple[int, int]]]:
    """Orbits of unordered vertex pairs under a permutation group.

    The orbits partition the set of all pairs; a graph is invariant under
    the group exactly when its edge set is a union of orbits.
    """
    seen: set[tuple[int, int]] = set()
    orbits = []
    for pair in itertools.combinations(range(n), 2):
        if pair in seen:
            continue
        orbit = {pair}
        frontier = {pair}
        while frontier:
            new = set()
            for a, b in frontier:
                for g in group:
                    image = (g[a], g[b]) if g[a] < g[b] else (g[b], g[a])
                    if image not in orbit:
                        new.add(image)
            orbit |= new
            frontier = new
        seen |= orbit
        orbits.append(frozenset(orbit))
    return orbits


def enumerate_symmetric_graphs(solid: SchlafliSolid) -> list[InterAgentGraph]:
    """All connected graphs invariant under the full rotation group of the
    solid, up to graph isomorphism.

    The edge set of any invariant graph is a union of edge orbits, so the
    enumeration walks all orbit unions, keeps the connected ones, and
    deduplicates isomorphic results.  Counts for the five solids are
    1, 2, 5, 4 and 33.
    """
    group = rotation_group(solid)
    orbits = edge_orbits(group, solid.n_vertices)
    found: list[InterAgentGraph] = []
    # Bucket candidates by cheap complete-in-practice invariants so the
    # expensive VF2 check only runs on plausible collisions; the
    # enumerated graphs are vertex-transitive and regular, a worst case
    # for plain VF2.  Dense candidates are compared via their complements
    # (isomorphism-equivalent and much faster for VF2).
    n = solid.n_vertices
    buckets: dict[tuple, list[nx.Graph]] = {}
    for r in range(1, len(orbits) + 1):
        for combo in itertools.combinations(orbits, r):
            edges = set().union(*combo)
            graph = graph_from_edges(solid.n_vertices, edges)
            if not graph.is_connected():
                continue
            g_nx = graph.to_networkx()
            dense = g_nx.number_of_edges() > n * (n - 1) // 4
            probe = nx.complement(g_nx) if dense else g_nx
            spectrum = tuple(np.round(np.sort(np.linalg.eigvalsh(
                nx.to_numpy_array(probe, nodelist=range(n)))), 6))
            key = (dense, spectrum,
                   nx.weisfeiler_lehman_graph_hash(probe, iterations=4))
            bucket = buckets.setdefault(key, [])
            if any(nx.is_isomorphic(probe, h) for h in bucket):
                continue
            found.append(graph)
            bucket.append(probe)
    return found


def _tetrahedra_partition(vertices: np.ndarray) -> list[tuple[int, ...]]:
    """Partition the vertex set into inscribed regular tetrahedra.

    A tetrahedron is a 4-subset whose pairwise inner products all equal
    -1/3; the partition is found by exact cover with backtracking, taking
    quads in lexicographic order (deterministic).
    """
    n = len(vertices)
    quads = [
        quad
        for quad in itertools.combinations(range(n), 4)
        if all(
            abs(float(vertices[a] @ vertices[b]) - _TETRA_DOT) < 1e-6
            for a, b in itertools.combinations(quad, 2)
        )
    ]
    chosen: list[tuple[int, ...]] = []

    def backtrack(remaining: set[int]) -> bool:
        if not remaining:
            return True
        lead = min(remaining)
        for quad in quads:
            if quad[0] == lead and set(quad) <= remaining:
                chosen.append(quad)
                if backtrack(remaining - set(quad)):
                    return True
                chosen.pop()
        return False

    if not backtrack(set(range(n))):
        raise ValueError("vertex set admits no partition into inscribed tetrahedra")
    return chosen


def _antipodal_pairs(vertices: np.ndarray) -> list[tuple[int, int]]:
    n = len(vertices)
    return [
        (i, j)
        for i, j in itertools.combinations(range(n), 2)
        if abs(float(vertices[i] @ vertices[j]) + 1.0) < 1e-6
    ]


def assumption3_graph(solid: SchlafliSolid) -> InterAgentGraph:
    """The analysis graph the stability algorithm certifies for each solid.

    - {3,3} and {3,4}: the complete graph.
    - {4,3} and {5,3}: the inscribed-tetrahedra compound -- a clique on
      each tetrahedron of the partition -- joined up by the antipodal
      vertex pairing.  The antipodal edges make the compound connected
      (the bare compound is disconnected and has rank-deficient coupling:
      the relative orientation between components is uncontrolled).
    - {3,5}: the second-neighbor graph of the icosahedron -- vertex
      pairs at inner product -1/sqrt(5), i.e. i adjacent to j when the
      antipode of j is a skeleton neighbor of i.  The complete graph K12
      does not stabilize the icosahedral formation (its linearization has
      positive restricted eigenvalues), so the icosahedron deviates from
      the complete-graph rule of the smaller triangular solids.

    All returned graphs are connected and invariant under the solid's
    vertex-axis permutations.
    """
    n = solid.n_vertices
    if (solid.p, solid.q) in ((3, 3), (3, 4)):
        return complete_graph(n)
    v = solid.vertices
    if (solid.p, solid.q) == (3, 5):
        target = -1.0 / np.sqrt(5.0)
        edges = {
            (i, j)
            for i, j in itertools.combinations(range(n), 2)
            if abs(float(v[i] @ v[j]) - target) < 1e-6
        }
        return graph_from_edges(n, edges)
    if (solid.p, solid.q) in ((4, 3), (5, 3)):
        edges: set[tuple[int, int]] = set(_antipodal_pairs(v))
        for quad in _tetrahedra_partition(v):
            edges |= set(itertools.combinations(quad, 2))
        return graph_from_edges(n, edges)
    raise ValueError(f"no analysis graph defined for {solid.symbol}")
