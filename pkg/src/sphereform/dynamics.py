"""Closed-loop attitude dynamics on the sphere and numerical integration.

The control law for agent i is

    omega_i = - sum_{j in N_i} h(theta_ij) hat(Gamma_i) Gamma_j

with theta_ij the geodesic angle between agents i and j and h a positive
gain.  The induced closed loop is

    dGamma_i/dt = hat(Gamma_i) sum_{j in N_i} h(theta_ij) hat(Gamma_i) Gamma_j,

a tangent vector field on the product of spheres.  The default gain is
h(theta) = exp(2 cos(theta)); in terms of the inner product xi = cos(theta)
this is hbar(xi) = exp(2 xi).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import normalize, rodrigues
from .graphs import InterAgentGraph
from .polyhedra import SchlafliSolid

__all__ = [
    "GainFunction",
    "ASSUMPTION2_GAIN",
    "SimulationConfig",
    "Trajectory",
    "control_omega",
    "closed_loop_rhs",
    "body_frame_control",
    "integrate",
    "random_state",
    "perturbed_state",
    "match_vertices",
]


@dataclass(frozen=True)
class GainFunction:
    """Gain h(theta) together with its inner-product form hbar(xi).

    ``hbar`` must agree with ``h o arccos`` and be Lipschitz on [-1, 1];
    ``hbar_prime`` is its derivative, used by the analytic Jacobian of
    the xi dynamics.
    """

    h: Callable[[float], float]
    hbar: Callable[[np.ndarray], np.ndarray]
    hbar_prime: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"


#: Default gain h(theta) = exp(2 cos theta), i.e. hbar(xi) = exp(2 xi).
ASSUMPTION2_GAIN = GainFunction(
    h=lambda theta: np.exp(2.0 * np.cos(theta)),
    hbar=lambda xi: np.exp(2.0 * xi),
    hbar_prime=lambda xi: 2.0 * np.exp(2.0 * xi),
    name="exp-2-cos",
)


@dataclass(frozen=True)
class SimulationConfig:
    """Fixed-step integration settings."""

    step_size: float = 1e-3
    t_final: float = 50.0
    integrator: str = "rk4"  # "rk4" or "euler"
    renormalize_every: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.renormalize_every < 1:
            raise ValueError("renormalize_every must be >= 1")

    def to_json_dict(self) -> dict:
        return {
            "step_size": self.step_size,
            "t_final": self.t_final,
            "integrator": self.integrator,
            "renormalize_every": self.renormalize_every,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Trajectory:
    """Time series of formation states plus integration diagnostics."""

    times: np.ndarray  # (T,)
    states: np.ndarray  # (T, n, 3)
    #: largest |norm(Gamma_i) - 1| observed before any renormalization
    max_norm_drift: float

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _weighted_neighbor_sum(
    states: np.ndarray, graph: InterAgentGraph, gain: GainFunction
) -> np.ndarray:
    """Row i is sum_{j in N_i} h(theta_ij) Gamma_j."""
    dots = np.clip(states @ states.T, -1.0, 1.0)
    weights = gain.hbar(dots) * graph.adjacency
    return weights @ states


def control_omega(
    i: int, states: np.ndarray, graph: InterAgentGraph, gain: GainFunction = ASSUMPTION2_GAIN
) -> np.ndarray:
    """Angular-velocity command for agent i (world frame)."""
    w = _weighted_neighbor_sum(states, graph, gain)
    return -np.cross(states[i], w[i])


def closed_loop_rhs(
    states: np.ndarray, graph: InterAgentGraph, gain: GainFunction = ASSUMPTION2_GAIN
) -> np.ndarray:
    """Time derivative of all attitudes under the closed loop.

    Each row is tangent to the sphere at the corresponding attitude by
    construction (double cross product with Gamma_i).
    """
    states = np.asarray(states, dtype=float)
    w = _weighted_neighbor_sum(states, graph, gain)
    return np.cross(states, np.cross(states, w))


def body_frame_control(
    i: int,
    states: np.ndarray,
    graph: InterAgentGraph,
    gain: GainFunction,
    rotations: np.ndarray,
    axes: np.ndarray,
) -> np.ndarray:
    """Body-frame command omega_i^b = -sum_j h(theta_ij) b_i x (R_i^T R_j b_j).

    ``rotations`` holds one attitude matrix R_k per agent and ``axes`` the
    body-fixed pointing axes b_k, with Gamma_k = R_k b_k.  The world-frame
    velocity it induces, R_i (omega_i^b x b_i), equals the closed-loop
    derivative of agent i exactly.
    """
    states = np.asarray(states, dtype=float)
    r_i = rotations[i]
    b_i = axes[i]
    out = np.zeros(3)
    dots = np.clip(states @ states.T, -1.0, 1.0)
    for j in graph.neighbors(i):
        hij = gain.hbar(dots[i, j])
        out -= hij * np.cross(b_i, r_i.T @ (rotations[j] @ axes[j]))
    return out


def integrate(
    state0: np.ndarray,
    graph: InterAgentGraph,
    gain: GainFunction = ASSUMPTION2_GAIN,
    config: SimulationConfig = SimulationConfig(),
    record_every: int = 1,
) -> Trajectory:
    """Fixed-step integration of the closed loop with sphere projection.

    Every ``renormalize_every`` steps each attitude is rescaled to unit
    length; the largest norm deviation seen *before* those projections is
    recorded as a drift diagnostic.  ``record_every`` thins the stored
    time series (the final state is always recorded).
    """
    state = np.array(state0, dtype=float)
    n_steps = int(round(config.t_final / config.step_size))
    dt = config.step_size
    times = [0.0]
    states = [state.copy()]
    max_drift = 0.0

    def rhs(s: np.ndarray) -> np.ndarray:
        return closed_loop_rhs(s, graph, gain)

    for step in range(1, n_steps + 1):
        if config.integrator == "rk4":
            k1 = rhs(state)
            k2 = rhs(state + 0.5 * dt * k1)
            k3 = rhs(state + 0.5 * dt * k2)
            k4 = rhs(state + dt * k3)
            state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            state = state + dt * rhs(state)
        norms = np.linalg.norm(state, axis=1)
        max_drift = max(max_drift, float(np.max(np.abs(norms - 1.0))))
        if step % config.renormalize_every == 0:
            state = state / norms[:, None]
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            states.append(state.copy())
    return Trajectory(np.array(times), np.array(states), max_drift)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """n attitudes drawn uniformly on the sphere (normalized Gaussians)."""
    g = rng.normal(size=(n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def perturbed_state(
    solid: SchlafliSolid, radius: float, rng: np.random.Generator
) -> np.ndarray:
    """A randomly rotated canonical formation with each agent displaced by
    a geodesic angle sampled uniformly from [0, radius)."""
    rot = rodrigues(normalize(rng.normal(size=3)), rng.uniform(0.0, np.pi))
    out = np.empty((solid.n_vertices, 3))
    for i in range(solid.n_vertices):
        target = rot @ solid.vertices[i]
        axis = normalize(np.cross(target, rng.normal(size=3)))
        out[i] = rodrigues(axis, rng.uniform(0.0, radius)) @ target
    return out


def match_vertices(states: np.ndarray, reference: np.ndarray) -> tuple[int, ...]:
    """Greedy relabeling of agents onto reference vertices by proximity.

    Returns a permutation ``perm`` with agent i assigned to reference
    vertex perm[i]; used to classify convergence when a simulation settles
    on a relabeled copy of the target formation.
    """
    n = len(states)
    dist = np.linalg.norm(states[:, None, :] - reference[None, :, :], axis=2)
    assignment = [-1] * n
    taken = set()
    # Assign the globally closest pairs first.
    order = np.dstack(np.unravel_index(np.argsort(dist, axis=None), dist.shape))[0]
    for i, j in order:
        if assignment[i] == -1 and j not in taken:
            assignment[int(i)] = int(j)
            taken.add(int(j))
    return tuple(assignment)
