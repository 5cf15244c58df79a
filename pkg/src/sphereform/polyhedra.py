"""Platonic solids: Schlafli combinatorics, canonical vertex coordinates,
numerically derived rotational symmetries, and the formation-manifold
membership test.

A solid {p, q} has p-sided faces with q faces meeting at each vertex; the
five Platonic solids are exactly the integer pairs with 1/p + 1/q > 1/2.
Each vertex axis carries a rotation by 2*pi/q that maps the vertex set to
itself; the induced vertex permutations generate the symmetry group used
throughout the stability analysis.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import hat, normalize, rodrigues

__all__ = [
    "SchlafliSolid",
    "RotationalSymmetry",
    "SymmetrySet",
    "make_solid",
    "derive_symmetries",
    "rotation_group",
    "permutation_matrix",
    "cycle_notation",
    "parse_cycles",
    "compose",
    "formation_membership",
    "SOLIDS",
]

#: The five valid Schlafli symbols in a fixed reporting order.
SOLIDS: tuple[tuple[int, int], ...] = ((3, 3), (3, 4), (4, 3), (3, 5), (5, 3))

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0

# Vertex ordering for the dodecahedron.  The raw coordinate table (cube
# vertices followed by the cyclic permutations of (0, +-1/phi, +-phi)) is
# reindexed so that vertices 1, 2, 3 and the constraint candidates
# {1, 2, 3, i} taken in ascending i are nonsingular in the order the
# stability algorithm needs; see the analysis notes accompanying the
# stability module.
_DODECA_ORDER = (9, 10, 4, 18, 13, 12, 19, 2, 8, 14, 17, 3, 5, 1, 11, 16, 0, 15, 7, 6)

# Match threshold for identifying a rotated vertex with a canonical one.
_MATCH_TOL = 1e-6


def _raw_vertices(p: int, q: int) -> list[tuple[float, float, float]]:
    if (p, q) == (3, 3):
        return [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    if (p, q) == (3, 4):
        return [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0), (0, -1, 0), (0, 0, -1)]
    if (p, q) == (4, 3):
        return list(itertools.product((1, -1), repeat=3))
    if (p, q) == (3, 5):
        return [
            tuple(np.roll((0.0, s1, s2 * _GOLDEN), k))
            for s1 in (1, -1)
            for s2 in (1, -1)
            for k in range(3)
        ]
    if (p, q) == (5, 3):
        raw = list(itertools.product((1, -1), repeat=3)) + [
            tuple(np.roll((0.0, s1 / _GOLDEN, s2 * _GOLDEN), k))
            for s1 in (1, -1)
            for s2 in (1, -1)
            for k in range(3)
        ]
        return [raw[i] for i in _DODECA_ORDER]
    raise ValueError(f"no canonical coordinates for {{{p},{q}}}")


@dataclass(frozen=True)
class SchlafliSolid:
    """A Platonic solid {p, q} with Euler counts and canonical vertices."""

    p: int
    q: int
    n_vertices: int
    n_edges: int
    n_faces: int
    vertices: np.ndarray = field(repr=False)  # (n_vertices, 3), unit rows

    @property
    def symbol(self) -> str:
        return f"{{{self.p},{self.q}}}"

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "n_faces": self.n_faces,
            "vertices": [list(map(float, v)) for v in self.vertices],
        }


@dataclass(frozen=True)
class RotationalSymmetry:
    """A (rotation, permutation) pair for the 2*pi/q turn about one vertex."""

    vertex_index: int  # 0-based vertex the rotation axis passes through
    rotation: np.ndarray = field(repr=False)  # 3x3
    perm: tuple[int, ...] = ()  # perm[i] = image of vertex i, 0-based


@dataclass(frozen=True)
class SymmetrySet:
    """All vertex-axis rotational symmetries of a solid plus their closure."""

    solid: SchlafliSolid
    symmetries: tuple[RotationalSymmetry, ...]
    group: frozenset[tuple[int, ...]]  # closure of the perms under composition

    def to_json_dict(self) -> dict:
        return {
            "solid": self.solid.to_json_dict(),
            "symmetries": [
                {
                    "vertex_index": s.vertex_index + 1,
                    "cycles": cycle_notation(s.perm),
                }
                for s in self.symmetries
            ],
            "group_order": len(self.group),
        }


def make_solid(p: int, q: int) -> SchlafliSolid:
    """Construct the Platonic solid {p, q}.

    Raises ``ValueError`` for symbols violating 1/p + 1/q > 1/2, which
    have no convex regular polyhedron.
    """
    if p < 3 or q < 3:
        raise ValueError(f"{{{p},{q}}} is not a Platonic solid: p, q must be >= 3")
    d = 4 - (p - 2) * (q - 2)
    if d <= 0:
        raise ValueError(f"{{{p},{q}}} is not a Platonic solid: 1/p + 1/q <= 1/2")
    n_vertices = 4 * p // d
    n_edges = 2 * p * q // d
    n_faces = 4 * q // d
    vertices = np.array([normalize(np.array(v, dtype=float)) for v in _raw_vertices(p, q)])
    vertices.setflags(write=False)
    return SchlafliSolid(p, q, n_vertices, n_edges, n_faces, vertices)


def _match_permutation(
    vertices: np.ndarray, rotation: np.ndarray, tol: float = _MATCH_TOL
) -> tuple[int, ...] | None:
    """Permutation sigma with rotation @ vertices[i] == vertices[sigma(i)].

    Returns None when some rotated vertex has no unique match within tol.
    """
    n = len(vertices)
    images = []
    for i in range(n):
        dist = np.linalg.norm(vertices - (rotation @ vertices[i]), axis=1)
        j = int(np.argmin(dist))
        if dist[j] > tol:
            return None
        images.append(j)
    if sorted(images) != list(range(n)):
        return None
    return tuple(images)


def derive_symmetries(solid: SchlafliSolid) -> SymmetrySet:
    """Rotational symmetry (R_i, sigma_i) for every vertex axis of the solid.

    R_i is the rotation by 2*pi/q about vertex i; sigma_i is found by
    nearest-vertex matching of the rotated canonical coordinates.
    """
    symmetries = []
    for i in range(solid.n_vertices):
        rot = rodrigues(solid.vertices[i], 2.0 * np.pi / solid.q)
        perm = _match_permutation(solid.vertices, rot)
        if perm is None:
            raise ValueError(
                f"symmetry match failed for vertex {i + 1} of {solid.symbol}: "
                "rotated vertices do not map onto the canonical set"
            )
        symmetries.append(RotationalSymmetry(i, rot, perm))
    group = _closure([s.perm for s in symmetries], solid.n_vertices)
    return SymmetrySet(solid, tuple(symmetries), frozenset(group))


def rotation_group(solid: SchlafliSolid) -> frozenset[tuple[int, ...]]:
    """Vertex permutations of the full rotation group of the solid.

    Generated by the vertex-axis rotations of 2*pi/q together with the
    half-turns about edge midpoints.  (For the cube the vertex rotations
    alone generate only the order-12 tetrahedral subgroup; the edge
    half-turns complete it to order 24.)
    """
    vertices = solid.vertices
    n = solid.n_vertices
    gens = [s.perm for s in derive_symmetries(solid).symmetries]
    edge_dot = max(
        float(vertices[i] @ vertices[j]) for i, j in itertools.combinations(range(n), 2)
    )
    for i, j in itertools.combinations(range(n), 2):
        if abs(float(vertices[i] @ vertices[j]) - edge_dot) < 1e-6:
            half_turn = rodrigues(normalize(vertices[i] + vertices[j]), np.pi)
            perm = _match_permutation(vertices, half_turn)
            if perm is not None:
                gens.append(perm)
    return frozenset(_closure(gens, n))


def compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Composition a after b: (a o b)(i) = a(b(i))."""
    return tuple(a[b[i]] for i in range(len(b)))


def _closure(generators: list[tuple[int, ...]], n: int) -> set[tuple[int, ...]]:
    group = {tuple(range(n))} | set(generators)
    frontier = set(group)
    while frontier:
        new = set()
        for g in frontier:
            for h in generators:
                c = compose(h, g)
                if c not in group:
                    new.add(c)
        group |= new
        frontier = new
    return group


def permutation_matrix(perm: tuple[int, ...]) -> np.ndarray:
    """0/1 matrix P with row i equal to the standard basis vector e_{perm(i)}.

    Acting on a stacked state, (P x)_i = x_{perm(i)}.  P is orthogonal.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of 0..n-1")
    mat = np.zeros((n, n), dtype=int)
    mat[np.arange(n), list(perm)] = 1
    return mat


def cycle_notation(perm: tuple[int, ...]) -> str:
    """Canonical cycle notation, 1-based, cycles listed by smallest element.

    Singleton cycles are included, e.g. ``(1)(2,3,4)``.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of 0..n-1")
    seen = [False] * n
    parts = []
    for start in range(n):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        k = perm[start]
        while k != start:
            cycle.append(k)
            seen[k] = True
            k = perm[k]
        parts.append("(" + ",".join(str(i + 1) for i in cycle) + ")")
    return "".join(parts)


def parse_cycles(text: str, n: int) -> tuple[int, ...]:
    """Inverse of :func:`cycle_notation` for a permutation of {1..n}."""
    text = text.strip().replace(" ", "")
    if not text or text[0] != "(" or text[-1] != ")":
        raise ValueError(f"malformed cycle notation: {text!r}")
    images = [None] * n
    for chunk in text[1:-1].split(")("):
        if not chunk:
            raise ValueError(f"malformed cycle notation: {text!r}")
        try:
            cycle = [int(tok) - 1 for tok in chunk.split(",")]
        except ValueError as exc:
            raise ValueError(f"malformed cycle notation: {text!r}") from exc
        for idx in cycle:
            if not 0 <= idx < n:
                raise ValueError(f"index {idx + 1} out of range 1..{n}")
            if images[idx] is not None:
                raise ValueError(f"index {idx + 1} appears twice")
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            images[a] = b
    if any(img is None for img in images):
        raise ValueError("cycle notation does not cover all of 1..n")
    return tuple(images)


def formation_membership(
    states: np.ndarray, solid: SchlafliSolid, tol: float = 1e-6
) -> tuple[bool, float]:
    """Test whether a stacked state lies on the formation manifold of the solid.

    A state is a member when (a) it is non-degenerate -- some pair of
    attitudes is neither identical nor antipodal -- and (b) for every
    vertex i the 2*pi/q rotation about the state's own i-th attitude maps
    the state onto a permutation of itself within ``tol``.  The matching
    permutation is re-derived per vertex from the state at hand: the
    manifold is defined up to rigid rotation, so canonical labels do not
    apply.

    Returns ``(member, max_residual)`` where the residual is the largest
    per-vertex matching error over all vertex rotations (infinity when a
    rotation has no matching permutation at all).
    """
    states = np.asarray(states, dtype=float)
    if states.shape != (solid.n_vertices, 3):
        raise ValueError(
            f"expected {solid.n_vertices} attitudes for {solid.symbol}, got {states.shape}"
        )
    # Non-degeneracy: reject consensus/antipodal-only configurations.
    nondegenerate = any(
        np.linalg.norm(np.cross(states[m], states[n_])) > tol
        for m, n_ in itertools.combinations(range(len(states)), 2)
    )
    if not nondegenerate:
        return False, float("inf")
    worst = 0.0
    for i in range(solid.n_vertices):
        rot = rodrigues(states[i], 2.0 * np.pi / solid.q)
        rotated = states @ rot.T
        images = []
        residual = 0.0
        for k in range(len(states)):
            dist = np.linalg.norm(states - rotated[k], axis=1)
            j = int(np.argmin(dist))
            images.append(j)
            residual = max(residual, float(dist[j]))
        if sorted(images) != list(range(len(states))):
            return False, float("inf")
        worst = max(worst, residual)
        if worst > tol:
            return False, worst
    return True, worst


def solid_to_json(solid: SchlafliSolid) -> str:
    return json.dumps(solid.to_json_dict(), indent=2)
