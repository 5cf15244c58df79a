import numpy as np
import pytest

from sphereform import (
    ASSUMPTION2_GAIN,
    SOLIDS,
    SimulationConfig,
    assumption3_graph,
    body_frame_control,
    closed_loop_rhs,
    complete_graph,
    control_omega,
    derive_symmetries,
    formation_membership,
    graph_from_edges,
    integrate,
    make_solid,
    permutation_matrix,
    random_state,
)
from conftest import random_rotation, random_unit

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


class TestGain:
    def test_h_and_hbar_agree(self, rng):
        for theta in rng.uniform(0, np.pi, size=50):
            assert ASSUMPTION2_GAIN.h(theta) == pytest.approx(
                ASSUMPTION2_GAIN.hbar(np.cos(theta))
            )

    def test_hbar_lipschitz_on_interval(self, rng):
        # |hbar(x) - hbar(y)| <= L |x - y| with L = 2 e^2 on [-1, 1]
        lipschitz = 2.0 * np.e**2 + 1e-9
        x = rng.uniform(-1, 1, size=1000)
        y = rng.uniform(-1, 1, size=1000)
        lhs = np.abs(ASSUMPTION2_GAIN.hbar(x) - ASSUMPTION2_GAIN.hbar(y))
        assert np.all(lhs <= lipschitz * np.abs(x - y))


class TestControlOmega:
    def test_coincident_neighbor_gives_zero(self):
        g = graph_from_edges(2, [(0, 1)])
        states = np.array([E3, E3])
        assert np.allclose(control_omega(0, states, g), 0.0)

    def test_orthogonal_neighbor(self):
        # omega_0 = -h(pi/2) e3 x e1 = -e2 since h(pi/2) = exp(0) = 1
        g = graph_from_edges(2, [(0, 1)])
        states = np.array([E3, E1])
        assert np.allclose(control_omega(0, states, g), -E2)

    def test_antipodal_neighbor_gives_zero(self):
        g = graph_from_edges(2, [(0, 1)])
        states = np.array([E3, -E3])
        assert np.allclose(control_omega(0, states, g), 0.0)

    def test_omega_induces_rhs(self, rng):
        s = make_solid(3, 4)
        g = assumption3_graph(s)
        states = random_state(6, rng)
        rhs = closed_loop_rhs(states, g)
        for i in range(6):
            omega = control_omega(i, states, g)
            assert np.allclose(np.cross(omega, states[i]), rhs[i], atol=1e-12)


class TestClosedLoopRhs:
    def test_consensus_is_equilibrium(self):
        g = complete_graph(5)
        states = np.tile(E2, (5, 1))
        assert np.allclose(closed_loop_rhs(states, g), 0.0)

    @pytest.mark.parametrize("p,q", SOLIDS)
    def test_canonical_formation_is_equilibrium(self, p, q):
        s = make_solid(p, q)
        rhs = closed_loop_rhs(s.vertices, assumption3_graph(s))
        assert np.max(np.linalg.norm(rhs, axis=1)) < 1e-9

    def test_tangency_1000_random_states(self, rng):
        g = complete_graph(6)
        worst = 0.0
        for _ in range(1000):
            states = random_state(6, rng)
            rhs = closed_loop_rhs(states, g)
            worst = max(worst, float(np.max(np.abs(np.sum(states * rhs, axis=1)))))
        assert worst < 1e-12

    def test_rotational_equivariance(self, rng):
        s = make_solid(3, 4)
        g = assumption3_graph(s)
        for _ in range(25):
            states = random_state(6, rng)
            rot = random_rotation(rng)
            lhs = closed_loop_rhs(states @ rot.T, g)
            rhs = closed_loop_rhs(states, g) @ rot.T
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_permutation_equivariance(self, rng):
        s = make_solid(3, 4)
        g = assumption3_graph(s)
        perms = [sym.perm for sym in derive_symmetries(s).symmetries]
        for _ in range(10):
            states = random_state(6, rng)
            for perm in perms:
                p = permutation_matrix(perm)
                lhs = closed_loop_rhs(p @ states, g)
                rhs = p @ closed_loop_rhs(states, g)
                assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestBodyFrameControl:
    def test_coincident_frames_match_world_control(self, rng):
        s = make_solid(3, 3)
        g = assumption3_graph(s)
        states = random_state(4, rng)
        rotations = np.array([np.eye(3)] * 4)
        omega_b = body_frame_control(0, states, g, ASSUMPTION2_GAIN, rotations, states)
        assert np.allclose(omega_b, control_omega(0, states, g), atol=1e-12)

    def test_single_antipodal_neighbor(self, rng):
        g = graph_from_edges(2, [(0, 1)])
        rotations = np.array([random_rotation(rng), random_rotation(rng)])
        axes = np.array([random_unit(rng), random_unit(rng)])
        states = np.einsum("nij,nj->ni", rotations, axes)
        # Make agent 1 antipodal to agent 0 by overriding its attitude.
        rotations[1] = random_rotation(rng)
        axes[1] = rotations[1].T @ (-states[0])
        states[1] = -states[0]
        omega_b = body_frame_control(0, states, g, ASSUMPTION2_GAIN, rotations, axes)
        world = rotations[0] @ np.cross(omega_b, axes[0])
        assert np.allclose(world, 0.0, atol=1e-12)

    def test_equivalence_100_random_configurations(self, rng):
        s = make_solid(3, 4)
        g = assumption3_graph(s)
        n = 6
        worst = 0.0
        for _ in range(100):
            rotations = np.array([random_rotation(rng) for _ in range(n)])
            axes = np.array([random_unit(rng) for _ in range(n)])
            states = np.einsum("nij,nj->ni", rotations, axes)
            rhs = closed_loop_rhs(states, g)
            for i in range(n):
                omega_b = body_frame_control(i, states, g, ASSUMPTION2_GAIN, rotations, axes)
                world = rotations[i] @ np.cross(omega_b, axes[i])
                worst = max(worst, float(np.max(np.abs(world - rhs[i]))))
        assert worst < 1e-12


class TestIntegrate:
    def test_consensus_start_is_constant(self):
        g = complete_graph(4)
        state0 = np.tile(E1, (4, 1))
        traj = integrate(state0, g, config=SimulationConfig(step_size=1e-2, t_final=1.0))
        assert np.max(np.abs(traj.final_state - state0)) < 1e-14

    def test_canonical_tetrahedron_stays_put(self):
        s = make_solid(3, 3)
        g = assumption3_graph(s)
        traj = integrate(
            s.vertices, g, config=SimulationConfig(step_size=1e-3, t_final=10.0),
            record_every=1000,
        )
        assert np.max(np.abs(traj.final_state - s.vertices)) < 1e-6
        member, _ = formation_membership(traj.final_state, s)
        assert member

    def test_norm_drift_below_1e7(self, rng):
        s = make_solid(3, 4)
        g = assumption3_graph(s)
        traj = integrate(
            random_state(6, rng), g,
            config=SimulationConfig(step_size=1e-3, t_final=5.0), record_every=100,
        )
        assert traj.max_norm_drift < 1e-7

    def test_rotational_equivariance_of_flow(self, rng):
        s = make_solid(3, 3)
        g = assumption3_graph(s)
        state0 = random_state(4, rng)
        rot = random_rotation(rng)
        cfg = SimulationConfig(step_size=1e-3, t_final=2.0)
        a = integrate(state0 @ rot.T, g, config=cfg, record_every=2000).final_state
        b = integrate(state0, g, config=cfg, record_every=2000).final_state @ rot.T
        assert np.max(np.abs(a - b)) < 1e-6

    def test_euler_integrator_runs(self, rng):
        g = complete_graph(4)
        cfg = SimulationConfig(step_size=1e-3, t_final=0.1, integrator="euler")
        traj = integrate(random_state(4, rng), g, config=cfg)
        assert np.allclose(np.linalg.norm(traj.final_state, axis=1), 1.0, atol=1e-9)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimulationConfig(step_size=-1.0)
        with pytest.raises(ValueError):
            SimulationConfig(t_final=0.0)
        with pytest.raises(ValueError):
            SimulationConfig(integrator="verlet")
