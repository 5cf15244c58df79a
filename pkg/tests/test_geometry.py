import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphereform import (
    from_rpy,
    geodesic_angle,
    hat,
    rodrigues,
    rotation_axis,
    spherical_cosine_residual,
    to_rpy,
)
from conftest import random_unit

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


class TestHat:
    def test_cross_product_axiom(self):
        assert np.allclose(hat(E1) @ E2, E3)

    def test_self_cross_is_zero(self, rng):
        x = rng.normal(size=3)
        assert np.allclose(hat(x) @ x, 0.0)

    def test_cyclic(self):
        assert np.allclose(hat(E3) @ E1, E2)

    def test_skew_structure(self, rng):
        h = hat(rng.normal(size=3))
        assert np.array_equal(h, -h.T)

    def test_matches_numpy_cross(self, rng):
        for _ in range(50):
            x, y = rng.normal(size=3), rng.normal(size=3)
            assert np.allclose(hat(x) @ y, np.cross(x, y))


class TestGeodesicAngle:
    def test_coincident(self, rng):
        a = random_unit(rng)
        assert geodesic_angle(a, a) == pytest.approx(0.0, abs=1e-7)

    def test_antipodal(self, rng):
        a = random_unit(rng)
        assert geodesic_angle(a, -a) == pytest.approx(np.pi, abs=1e-7)

    def test_orthogonal(self):
        assert geodesic_angle(E1, E2) == pytest.approx(np.pi / 2)

    def test_symmetric_and_bounded(self, rng):
        for _ in range(100):
            a, b = random_unit(rng), random_unit(rng)
            t = geodesic_angle(a, b)
            assert 0.0 <= t <= np.pi
            assert t == pytest.approx(geodesic_angle(b, a))


class TestRotationAxis:
    def test_orthogonal_pair(self):
        assert np.allclose(rotation_axis(E1, E2), E3)

    def test_degenerate_deterministic(self, rng):
        a = random_unit(rng)
        k1 = rotation_axis(a, a)
        k2 = rotation_axis(a, a)
        assert np.array_equal(k1, k2)
        assert np.linalg.norm(k1) == pytest.approx(1.0)
        assert abs(np.dot(k1, a)) < 1e-12

    def test_degenerate_near_pole(self):
        # a parallel to e3: tie-break falls back to projecting e1
        k = rotation_axis(E3, E3)
        assert np.allclose(k, E1)

    def test_reconstructs_target_1000_random_pairs(self, rng):
        for _ in range(1000):
            a, b = random_unit(rng), random_unit(rng)
            r = rodrigues(rotation_axis(a, b), geodesic_angle(a, b))
            assert np.linalg.norm(r @ a - b) < 1e-9


class TestRodrigues:
    def test_zero_angle_identity(self, rng):
        assert np.allclose(rodrigues(random_unit(rng), 0.0), np.eye(3))

    def test_quarter_turn_about_z(self):
        assert np.allclose(rodrigues(E3, np.pi / 2) @ E1, E2)

    def test_axis_fixed(self, rng):
        u = random_unit(rng)
        assert np.allclose(rodrigues(u, rng.uniform(0, np.pi)) @ u, u)

    def test_orthogonal_unit_determinant(self, rng):
        for _ in range(100):
            r = rodrigues(random_unit(rng), rng.uniform(-np.pi, np.pi))
            assert np.linalg.norm(r.T @ r - np.eye(3)) < 1e-12
            assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)


class TestSphericalCosine:
    def test_identity_on_10000_random_triples(self, rng):
        worst = 0.0
        for _ in range(10_000):
            a, b, c = (random_unit(rng) for _ in range(3))
            worst = max(worst, abs(spherical_cosine_residual(a, b, c)))
        assert worst < 1e-9

    def test_degenerate_triple(self, rng):
        a = random_unit(rng)
        assert abs(spherical_cosine_residual(a, a, a)) < 1e-12

    def test_orthonormal_frame(self):
        assert abs(spherical_cosine_residual(E1, E2, E3)) < 1e-12


class TestRpy:
    def test_zero_angles(self):
        assert np.allclose(from_rpy(0.0, 0.0), E1)

    def test_quarter_yaw(self):
        assert np.allclose(from_rpy(np.pi / 2, 0.0), E2)

    def test_round_trip_1000_nonpolar(self, rng):
        worst = 0.0
        for _ in range(1000):
            psi = rng.uniform(-np.pi, np.pi)
            phi = rng.uniform(-np.pi / 2 + 1e-3, np.pi / 2 - 1e-3)
            p2, f2 = to_rpy(from_rpy(psi, phi))
            worst = max(worst, abs(p2 - psi), abs(f2 - phi))
        assert worst < 1e-12

    def test_pole_convention(self):
        psi, phi = to_rpy(E3)
        assert psi == 0.0
        assert phi == pytest.approx(np.pi / 2)
        psi, phi = to_rpy(-E3)
        assert psi == 0.0
        assert phi == pytest.approx(-np.pi / 2)

    def test_output_unit(self, rng):
        for _ in range(100):
            v = from_rpy(rng.uniform(-np.pi, np.pi), rng.uniform(-np.pi / 2, np.pi / 2))
            assert np.linalg.norm(v) == pytest.approx(1.0)

    @given(
        psi=st.floats(-np.pi, np.pi - 1e-9),
        phi=st.floats(-np.pi / 2 + 1e-6, np.pi / 2 - 1e-6),
    )
    @settings(max_examples=200, deadline=None)
    def test_round_trip_property(self, psi, phi):
        p2, f2 = to_rpy(from_rpy(psi, phi))
        assert abs(p2 - psi) < 1e-9
        assert abs(f2 - phi) < 1e-9
