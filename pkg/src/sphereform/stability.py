"""Stability restricted to subspaces and manifolds.

Linear side: the maximal A-invariant subspace V* inside ker F, stability
of the flow restricted to V*, observability of the induced block pair,
and the constructive certificate matrix P of the equivalence theorem.

Nonlinear side: the stability test for Platonic formations.  Starting
from the Jacobian of the xi_s dynamics at the target formation, Gram
constraints g_C over subsets {1,2,3,i} are adjoined one at a time (each
must increase the rank of the stacked constraint gradients); after each
addition the spectrum of the Jacobian restricted to the maximal invariant
subspace of the constraint kernel is examined.  The loop declares
exponential stability when that restricted spectrum is entirely in the
open left half plane, instability when fewer than 2 n0 - 3 eigenvalues
are, and keeps adjoining constraints otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dynamics import ASSUMPTION2_GAIN, GainFunction
from .graphs import InterAgentGraph
from .polyhedra import SchlafliSolid
from .xicoords import (
    equilibrium_xi,
    gram_gradient,
    redundancy_count,
    xi_s_jacobian,
)

__all__ = [
    "InvariantSubspaceBasis",
    "StabilityReport",
    "max_invariant_subspace",
    "restricted_stability_linear",
    "observability_check",
    "theorem2_certificate",
    "algorithm1",
    "exponential_stability_lift",
    "HURWITZ_TOL",
    "RANK_TOL",
]

#: Eigenvalues with real part below -HURWITZ_TOL count as stable; the gap
#: separates the structural zero eigenvalues of the rotational symmetry
#: from genuinely stable ones at this problem's scale.
HURWITZ_TOL = 1e-7

#: Relative singular-value threshold for rank and kernel decisions.
RANK_TOL = 1e-8


@dataclass(frozen=True)
class InvariantSubspaceBasis:
    """Orthogonal coordinate blocks adapted to ker F and V*.

    Rows of ``t1`` span the maximal A-invariant subspace V* inside ker F,
    rows of ``t3`` span the row space of F, and rows of ``t2`` complete
    the orthogonal basis.  ``residual`` is the invariance defect
    ||(I - T1' T1) A T1'||.
    """

    t1: np.ndarray
    t2: np.ndarray
    t3: np.ndarray
    residual: float

    @property
    def dim(self) -> int:
        return self.t1.shape[0]


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the formation stability test for one solid."""

    p: int
    q: int
    verdict: str  # exponentially_stable | not_stable | inconclusive
    m_max: int
    constraint_sets: tuple[tuple[int, int, int, int], ...]  # 1-based
    restricted_spectrum: np.ndarray = field(repr=False)  # complex, sorted by real part
    restricted_dim: int = 0
    tangent_spectrum: np.ndarray = field(repr=False, default=None)
    tangent_dim: int = 0
    used_gradient_rank: int = 0  # rank of the adjoined constraint gradients
    gradient_rank: int = 0  # rank of all 4-subset constraint gradients at xi*
    m0: int = 0

    def to_json_dict(self) -> dict:
        return {
            "solid": f"{{{self.p},{self.q}}}",
            "verdict": self.verdict,
            "m_max": self.m_max,
            "constraint_sets": [list(c) for c in self.constraint_sets],
            "restricted_dim": self.restricted_dim,
            "restricted_spectrum": [
                {"re": float(z.real), "im": float(z.imag)} for z in self.restricted_spectrum
            ],
            "tangent_dim": self.tangent_dim,
            "tangent_spectrum": [
                {"re": float(z.real), "im": float(z.imag)} for z in self.tangent_spectrum
            ],
            "used_gradient_rank": self.used_gradient_rank,
            "gradient_rank": self.gradient_rank,
            "m0": self.m0,
        }


def _row_rank(mat: np.ndarray, tol: float = RANK_TOL) -> int:
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int((s > tol * s[0]).sum())


def _kernel_columns(mat: np.ndarray, n: int, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal columns spanning ker(mat) for an m x n matrix."""
    if mat.size == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(mat)
    rank = int((s > tol * s[0]).sum())
    return vt[rank:].T


def max_invariant_subspace(
    a: np.ndarray, f: np.ndarray, tol: float = RANK_TOL
) -> InvariantSubspaceBasis:
    """Maximal A-invariant subspace inside ker F, with completion blocks.

    Uses the fixed-point recursion V_0 = ker F, V_{k+1} = {v in V_k :
    A v in V_k}, realized by intersecting with the kernel of the
    off-subspace component (I - B B') A B at each step.  F must have full
    row rank; a rank-deficient F raises ``ValueError`` naming a set of
    redundant rows.
    """
    a = np.asarray(a, dtype=float)
    f = np.asarray(f, dtype=float).reshape(-1, a.shape[1]) if np.size(f) else np.zeros((0, a.shape[1]))
    n = a.shape[1]
    m = f.shape[0]
    if m > 0:
        rank = _row_rank(f, tol)
        if rank < m:
            # Name rows outside a maximal independent subset.
            _, _, piv = scipy.linalg.qr(f.T, pivoting=True)
            redundant = sorted(int(i) + 1 for i in piv[rank:])
            raise ValueError(f"F is rank deficient: redundant rows {redundant}")
    basis = _kernel_columns(f, n, tol)
    scale = max(float(np.max(np.abs(a))), 1.0)
    while basis.shape[1]:
        defect = (np.eye(n) - basis @ basis.T) @ a @ basis
        _, s, vt = np.linalg.svd(defect)
        rank = int((s > 1e-7 * scale).sum())
        if rank == 0:
            break
        keep = vt[rank:].T
        if keep.shape[1] == basis.shape[1]:
            break
        basis = np.linalg.qr(basis @ keep)[0] if keep.shape[1] else basis[:, :0]
    t1 = basis.T
    if m > 0:
        _, s, vt = np.linalg.svd(f)
        t3 = vt[:m]
    else:
        t3 = np.zeros((0, n))
    t2 = _kernel_columns(np.vstack([t1, t3]), n, tol).T
    residual = 0.0
    if t1.shape[0]:
        residual = float(np.linalg.norm((np.eye(n) - t1.T @ t1) @ a @ t1.T))
    return InvariantSubspaceBasis(t1, t2, t3, residual)


def restricted_stability_linear(
    a: np.ndarray, f: np.ndarray, tol_hurwitz: float = HURWITZ_TOL
) -> tuple[str, np.ndarray]:
    """Stability of dx/dt = A x restricted to {x : F x = 0}.

    The restriction is stable exactly when the flow on the maximal
    invariant subspace V* is; returns the verdict and the spectrum of
    T1 A T1'.  A trivial V* is vacuously stable.
    """
    blocks = max_invariant_subspace(a, f)
    if blocks.dim == 0:
        return "stable", np.array([])
    spectrum = np.linalg.eigvals(blocks.t1 @ a @ blocks.t1.T)
    verdict = "stable" if np.all(spectrum.real < -tol_hurwitz) else "unstable"
    return verdict, spectrum[np.argsort(spectrum.real)]


def observability_check(a: np.ndarray, f: np.ndarray) -> bool:
    """Observability of the block pair (T3 A T2', T2 A T2').

    Vacuously true when the T2 block is empty.  The equivalence theorem's
    construction relies on this pair being observable.
    """
    blocks = max_invariant_subspace(a, f)
    a2 = blocks.t2 @ a @ blocks.t2.T
    c = blocks.t3 @ a @ blocks.t2.T
    dim = a2.shape[0]
    if dim == 0:
        return True
    if c.shape[0] == 0:
        return False
    rows = [c]
    power = np.eye(dim)
    for _ in range(dim - 1):
        power = power @ a2
        rows.append(c @ power)
    return _row_rank(np.vstack(rows)) == dim


def _stabilizing_output_injection(a2: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Gain K making A2 + K C Hurwitz, via a Riccati-based observer gain."""
    dim = a2.shape[0]
    try:
        x = scipy.linalg.solve_continuous_are(
            a2.T, c.T, np.eye(dim), np.eye(c.shape[0])
        )
        return -x @ c.T
    except Exception:
        # Riccati solver can reject near-degenerate instances; fall back
        # to direct pole placement on the dual pair.
        from scipy.signal import place_poles

        poles = -(1.0 + np.arange(dim)) * max(1.0, float(np.max(np.abs(a2))))
        placed = place_poles(a2.T, c.T, poles)
        return -placed.gain_matrix.T


def theorem2_certificate(
    a: np.ndarray, f: np.ndarray, tol: float = RANK_TOL
) -> np.ndarray | None:
    """Certificate matrix P for restricted stability, or None when unstable.

    When the restriction of A to ker F is stable, returns an
    (n-m) x n matrix P = [T1; T2 + K T3] with K a stabilizing output
    injection for the pair (T3 A T2', T2 A T2'), verified to satisfy
    both certificate conditions: (a) [P; F] is invertible, and (b) the
    reduced closed-loop matrix P A [I; -F2^-1 F1] (P [I; -F2^-1 F1])^-1
    is Hurwitz after a column rearrangement making F2 invertible.
    """
    a = np.asarray(a, dtype=float)
    f = np.asarray(f, dtype=float).reshape(-1, a.shape[1]) if np.size(f) else np.zeros((0, a.shape[1]))
    n = a.shape[1]
    m = f.shape[0]
    verdict, _ = restricted_stability_linear(a, f)
    if verdict != "stable":
        return None
    blocks = max_invariant_subspace(a, f, tol)
    if blocks.t2.shape[0] > 0:
        a2 = blocks.t2 @ a @ blocks.t2.T
        c = blocks.t3 @ a @ blocks.t2.T
        k = _stabilizing_output_injection(a2, c)
        p = np.vstack([blocks.t1, blocks.t2 + k @ blocks.t3])
    else:
        p = blocks.t1
    # Condition (a): [P; F] invertible.
    stacked = np.vstack([p, f])
    s = np.linalg.svd(stacked, compute_uv=False)
    if s[-1] <= tol * s[0]:
        raise ArithmeticError("certificate construction failed: [P; F] is singular")
    # Condition (b): Hurwitz reduced matrix, after rearranging variables
    # so the trailing m columns of F are invertible.
    if m > 0:
        _, _, piv = scipy.linalg.qr(f, pivoting=True)
        perm = np.concatenate([piv[m:], piv[:m]]).astype(int)
        fp = f[:, perm]
        f1, f2 = fp[:, : n - m], fp[:, n - m :]
        if _row_rank(f2, tol) < m:
            raise ArithmeticError("no column rearrangement makes F2 invertible")
        lift = np.vstack([np.eye(n - m), -np.linalg.solve(f2, f1)])
        pp = p[:, perm]
        ap = a[np.ix_(perm, perm)]
        reduced = pp @ ap @ lift @ np.linalg.inv(pp @ lift)
    else:
        reduced = p @ a @ np.linalg.inv(p)
    if not np.all(np.linalg.eigvals(reduced).real < -HURWITZ_TOL):
        raise ArithmeticError("certificate construction failed: reduced matrix not Hurwitz")
    return p


def _tangent_restriction(
    jac: np.ndarray, xi_star: np.ndarray, n0: int
) -> tuple[np.ndarray, int, int]:
    """Spectrum of the Jacobian on the realizability tangent space.

    Stacks the gradients of every 4-subset Gram constraint at xi*,
    restricts to the maximal invariant subspace of their joint kernel
    (the tangent space of the realizability manifold, dimension
    2 n0 - 3), and returns (spectrum, dimension, gradient rank).
    """
    rows = [
        gram_gradient(xi_star, subset, n0)
        for subset in itertools.combinations(range(n0), 4)
    ]
    stacked = np.vstack(rows)
    rank = _row_rank(stacked)
    # Reduce to an independent row subset so max_invariant_subspace gets a
    # full-row-rank F.
    _, _, piv = scipy.linalg.qr(stacked.T, pivoting=True)
    independent = stacked[np.sort(piv[:rank])]
    blocks = max_invariant_subspace(jac, independent)
    spectrum = np.linalg.eigvals(blocks.t1 @ jac @ blocks.t1.T)
    return spectrum[np.argsort(spectrum.real)], blocks.dim, rank


def algorithm1(
    solid: SchlafliSolid,
    graph: InterAgentGraph,
    gain: GainFunction = ASSUMPTION2_GAIN,
) -> StabilityReport:
    """Stability test for the formation of ``solid`` under ``graph``.

    Candidate constraints are the subsets {1, 2, 3, i} with i ascending;
    a candidate is adjoined only when its Gram gradient at the target
    increases the rank of the stacked gradients.  After each adjunction
    the Jacobian is restricted to the maximal invariant subspace of the
    constraint kernel:

    - all restricted eigenvalues in the open left half plane ->
      ``exponentially_stable`` with ``m_max`` constraints used;
    - fewer than 2 n0 - 3 stable eigenvalues -> ``not_stable``;
    - candidates exhausted with the spectrum straddling both tests ->
      ``inconclusive``.
    """
    n0 = solid.n_vertices
    if graph.n != n0:
        raise ValueError("graph size does not match the solid")
    xi_star = equilibrium_xi(solid)
    jac = xi_s_jacobian(xi_star, graph, gain)
    dim = len(xi_star)

    stacked = np.zeros((0, dim))
    used: list[tuple[int, int, int, int]] = []
    t1 = np.eye(dim)
    next_i = 3  # 0-based candidate index; constraint sets are {0,1,2,i}
    verdict = None
    spectrum = np.array([])
    while True:
        spectrum = (
            np.linalg.eigvals(t1 @ jac @ t1.T) if t1.shape[0] else np.array([])
        )
        n_stable = int((spectrum.real < -HURWITZ_TOL).sum())
        if t1.shape[0] == 0 or n_stable == len(spectrum):
            verdict = "exponentially_stable"
            break
        if n_stable < 2 * n0 - 3:
            verdict = "not_stable"
            break
        added = False
        while next_i < n0:
            candidate = (0, 1, 2, next_i)
            next_i += 1
            grad = gram_gradient(xi_star, candidate, n0)
            trial = np.vstack([stacked, grad])
            s = np.linalg.svd(trial, compute_uv=False)
            if s[-1] > RANK_TOL * s[0]:
                stacked = trial
                used.append(candidate)
                added = True
                break
        if not added:
            verdict = "inconclusive"
            break
        t1 = max_invariant_subspace(jac, stacked).t1

    tangent_spectrum, tangent_dim, gradient_rank = _tangent_restriction(jac, xi_star, n0)
    return StabilityReport(
        p=solid.p,
        q=solid.q,
        verdict=verdict,
        m_max=len(used),
        constraint_sets=tuple(tuple(i + 1 for i in c) for c in used),
        restricted_spectrum=spectrum[np.argsort(spectrum.real)],
        restricted_dim=t1.shape[0],
        tangent_spectrum=tangent_spectrum,
        tangent_dim=tangent_dim,
        used_gradient_rank=_row_rank(stacked),
        gradient_rank=gradient_rank,
        m0=redundancy_count(n0),
    )


def exponential_stability_lift(report: StabilityReport) -> bool:
    """Bridge from the linear test to nonlinear exponential stability.

    True exactly when (a) the gradients of the adjoined constraints are
    full row rank at the target and (b) the final restricted block is
    Hurwitz with the expected 2 n0 - 3 tangent directions all stable --
    together these lift the linear verdict to exponential stability of
    the formation manifold.
    """
    if report.verdict != "exponentially_stable":
        return False
    if report.used_gradient_rank != report.m_max:
        return False
    if report.tangent_dim == 0 or report.restricted_dim == 0:
        return False
    return bool(
        np.all(report.restricted_spectrum.real < -HURWITZ_TOL)
        and np.all(report.tangent_spectrum.real < -HURWITZ_TOL)
    )
