"""Relative-attitude coordinates xi and their reduced dynamics.

The transform maps a stacked state (Gamma_1, ..., Gamma_n) to

    xi_s = [xi_12, xi_13, ..., xi_{n-1,n}],   xi_ij = Gamma_i . Gamma_j,

in lexicographic pair order, plus an absolute component xi_c = (phi_1,
psi_1, gamma) locating the overall rigid rotation.  The xi_s subsystem is
closed: its derivative depends on xi_s only, with gain hbar(xi) acting on
inner products.  Realizability of xi_s by unit vectors in R^3 is cut out
by the Gram determinant constraints g_C = 0 over 4-element index subsets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dynamics import ASSUMPTION2_GAIN, GainFunction
from .geometry import to_rpy
from .graphs import InterAgentGraph
from .polyhedra import SchlafliSolid

__all__ = [
    "XiState",
    "pair_order",
    "xi_transform",
    "xi_s_of_state",
    "xi_s_rhs",
    "xi_s_jacobian",
    "gram_constraint",
    "gram_gradient",
    "equilibrium_xi",
    "redundancy_count",
    "xi_dimension",
]

# Cache of pair orderings keyed by agent count.
_PAIR_CACHE: dict[int, tuple[list[tuple[int, int]], dict[tuple[int, int], int]]] = {}


def pair_order(n: int) -> tuple[list[tuple[int, int]], dict[tuple[int, int], int]]:
    """Lexicographic list of 0-based index pairs and its inverse lookup."""
    if n not in _PAIR_CACHE:
        pairs = list(itertools.combinations(range(n), 2))
        _PAIR_CACHE[n] = (pairs, {p: k for k, p in enumerate(pairs)})
    return _PAIR_CACHE[n]


@dataclass(frozen=True)
class XiState:
    """Relative component xi_s plus absolute component (phi1, psi1, gamma).

    ``degenerate`` flags the case Gamma_2 = +-Gamma_1 where the relative
    azimuth gamma is undefined and set to 0.
    """

    xi_s: np.ndarray
    xi_c: tuple[float, float, float]
    degenerate: bool = False


def xi_s_of_state(states: np.ndarray) -> np.ndarray:
    """Pairwise inner products of a stacked state, in pair order."""
    states = np.asarray(states, dtype=float)
    dots = states @ states.T
    n = len(states)
    pairs, _ = pair_order(n)
    return np.array([dots[i, j] for i, j in pairs])


def xi_transform(states: np.ndarray) -> XiState:
    """Full coordinate transform xi = (xi_s, xi_c) of a stacked state."""
    states = np.asarray(states, dtype=float)
    if states.ndim != 2 or states.shape[0] < 2 or states.shape[1] != 3:
        raise ValueError("need at least two attitudes of dimension 3")
    xi_s = xi_s_of_state(states)
    psi1, phi1 = to_rpy(states[0])
    psi2, phi2 = to_rpy(states[1])
    degenerate = bool(abs(abs(float(states[0] @ states[1])) - 1.0) < 1e-12)
    if degenerate:
        gamma = 0.0
    else:
        gamma = float(
            np.arctan2(
                np.cos(phi2) * np.sin(psi2 - psi1),
                np.sin(phi1) * np.cos(phi2) * np.cos(psi2 - psi1)
                - np.cos(phi1) * np.sin(phi2),
            )
        )
    return XiState(xi_s, (phi1, psi1, gamma), degenerate)


def xi_s_rhs(
    xi_s: np.ndarray, graph: InterAgentGraph, gain: GainFunction = ASSUMPTION2_GAIN
) -> np.ndarray:
    """Closed-form derivative of xi_s under the closed loop.

    For the pair (i, j):

        dxi_ij/dt = sum_{k in N_j} hbar(xi_jk) (xi_ij xi_jk - xi_ik)
                  + sum_{k in N_i} hbar(xi_ik) (xi_ij xi_ik - xi_jk)

    which depends on xi_s alone (the subsystem is closed).
    """
    n = graph.n
    pairs, index = pair_order(n)
    xi = _square_from_pairs(xi_s, n, pairs)
    h = gain.hbar(xi)
    adj = graph.adjacency
    out = np.empty(len(pairs))
    for r, (i, j) in enumerate(pairs):
        total = 0.0
        for a, b in ((i, j), (j, i)):
            # neighbors k of b contribute hbar(xi_bk) (xi_ab xi_bk - xi_ak)
            for k in np.flatnonzero(adj[b]):
                total += h[b, k] * (xi[a, b] * xi[b, k] - xi[a, k])
        out[r] = total
    return out


def _square_from_pairs(
    xi_s: np.ndarray, n: int, pairs: list[tuple[int, int]]
) -> np.ndarray:
    xi = np.eye(n)
    for r, (i, j) in enumerate(pairs):
        xi[i, j] = xi[j, i] = xi_s[r]
    return xi


def xi_s_jacobian(
    xi_s: np.ndarray, graph: InterAgentGraph, gain: GainFunction = ASSUMPTION2_GAIN
) -> np.ndarray:
    """Analytic Jacobian of :func:`xi_s_rhs` with respect to xi_s.

    Differentiates each summand hbar(xi_bk)(xi_ab xi_bk - xi_ak) in the
    three xi entries it touches, including the gain derivative
    hbar'(xi_bk).
    """
    n = graph.n
    pairs, index = pair_order(n)
    xi = _square_from_pairs(xi_s, n, pairs)
    h = gain.hbar(xi)
    hp = gain.hbar_prime(xi)
    adj = graph.adjacency
    m = len(pairs)
    jac = np.zeros((m, m))

    def col(a: int, b: int) -> int | None:
        if a == b:
            return None  # xi_aa = 1 is not a coordinate
        return index[(a, b) if a < b else (b, a)]

    for r, (i, j) in enumerate(pairs):
        for a, b in ((i, j), (j, i)):
            c_ab = col(a, b)
            for k in np.flatnonzero(adj[b]):
                c_bk = col(b, k)
                c_ak = col(a, k)
                # d/dxi_bk: hbar'(xi_bk)(xi_ab xi_bk - xi_ak) + hbar(xi_bk) xi_ab
                if c_bk is not None:
                    jac[r, c_bk] += (
                        hp[b, k] * (xi[a, b] * xi[b, k] - xi[a, k]) + h[b, k] * xi[a, b]
                    )
                # d/dxi_ab: hbar(xi_bk) xi_bk
                if c_ab is not None:
                    jac[r, c_ab] += h[b, k] * xi[b, k]
                # d/dxi_ak: -hbar(xi_bk)
                if c_ak is not None:
                    jac[r, c_ak] -= h[b, k]
    return jac


def gram_constraint(xi_s: np.ndarray, subset: tuple[int, int, int, int], n: int) -> float:
    """Gram determinant g_C of the 4x4 unit-diagonal matrix over subset C.

    Vanishes exactly when the four pairwise inner products are realizable
    by unit vectors in R^3.
    """
    return float(np.linalg.det(_gram_matrix(xi_s, subset, n)))


def _gram_matrix(
    xi_s: np.ndarray, subset: tuple[int, int, int, int], n: int
) -> np.ndarray:
    _, index = pair_order(n)
    g = np.eye(4)
    for a, b in itertools.combinations(range(4), 2):
        i, j = subset[a], subset[b]
        val = xi_s[index[(i, j) if i < j else (j, i)]]
        g[a, b] = g[b, a] = val
    return g


def gram_gradient(
    xi_s: np.ndarray, subset: tuple[int, int, int, int], n: int
) -> np.ndarray:
    """Gradient of g_C with respect to xi_s (a row of length n(n-1)/2).

    d det(G)/d G_ab = 2 * cofactor_ab for the symmetric off-diagonal
    entries; cofactors are computed from 3x3 minors (the Gram matrix is
    singular at realizable points, so adjugate-by-inverse is unusable).
    """
    _, index = pair_order(n)
    g = _gram_matrix(xi_s, subset, n)
    grad = np.zeros(len(xi_s))
    for a, b in itertools.combinations(range(4), 2):
        minor = np.delete(np.delete(g, a, axis=0), b, axis=1)
        cof = (-1.0) ** (a + b) * np.linalg.det(minor)
        i, j = subset[a], subset[b]
        grad[index[(i, j) if i < j else (j, i)]] += 2.0 * cof
    return grad


def equilibrium_xi(solid: SchlafliSolid) -> np.ndarray:
    """xi_s of the canonical vertex configuration of the solid."""
    return xi_s_of_state(solid.vertices)


def redundancy_count(n0: int) -> int:
    """Number of independent Gram constraints m0 = (n0-2)(n0-3)/2."""
    if n0 < 4:
        raise ValueError("need at least 4 agents for a Gram constraint")
    return (n0 - 2) * (n0 - 3) // 2


def xi_dimension(n0: int) -> dict[str, int]:
    """Dimension bookkeeping for n0 agents.

    Returns the length of xi_s, the total coordinate count
    D_xi = n0(n0-1)/2 + 3, the configuration degrees of freedom 2 n0, and
    the redundancy m0.
    """
    return {
        "xi_s": n0 * (n0 - 1) // 2,
        "D_xi": n0 * (n0 - 1) // 2 + 3,
        "degrees_of_freedom": 2 * n0,
        "m0": redundancy_count(n0) if n0 >= 4 else 0,
    }
