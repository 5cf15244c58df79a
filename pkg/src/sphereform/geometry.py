"""Primitive geometry of the unit sphere S2 and SO(3).

Hat map, Rodrigues rotations, geodesic angles and rotation axes between
points on the sphere, the roll-pitch-yaw parametrization of a pointing
direction, and the spherical cosine identity.

All functions are pure and operate on plain numpy arrays: a point on the
sphere is a unit 3-vector, a rotation is a 3x3 orthogonal matrix with
determinant +1.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "hat",
    "normalize",
    "geodesic_angle",
    "rotation_axis",
    "rodrigues",
    "spherical_cosine_residual",
    "from_rpy",
    "to_rpy",
]

# Threshold below which two points are treated as parallel/antipodal when
# computing a rotation axis, and the axis tie-break kicks in.
_PARALLEL_TOL = 1e-8


def hat(x: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of the cross product: hat(x) @ y == cross(x, y)."""
    x = np.asarray(x, dtype=float)
    return np.array(
        [
            [0.0, -x[2], x[1]],
            [x[2], 0.0, -x[0]],
            [-x[1], x[0], 0.0],
        ]
    )


def normalize(v: np.ndarray) -> np.ndarray:
    """Return v scaled to unit length."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def geodesic_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Geodesic angle arccos(a . b) in [0, pi] between two unit vectors.

    The dot product is clamped to [-1, 1] so rounding never produces NaN.
    """
    d = float(np.dot(a, b))
    return float(np.arccos(np.clip(d, -1.0, 1.0)))


def rotation_axis(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unit rotation axis k = (a x b)/sin(theta) taking a to b.

    When a and b are parallel or antipodal the axis is not unique; a
    deterministic tie-break is used: the normalized projection of e3 onto
    the plane orthogonal to a, falling back to the projection of e1 when
    a is within ``1e-8`` of +-e3.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.cross(a, b)
    s = np.linalg.norm(c)
    if s > _PARALLEL_TOL:
        return c / s
    # Degenerate: any unit vector orthogonal to a will do; pick one
    # deterministically by projecting a coordinate axis.
    for basis in (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])):
        proj = basis - np.dot(basis, a) * a
        norm = np.linalg.norm(proj)
        if norm > _PARALLEL_TOL:
            return proj / norm
    raise AssertionError("unreachable: a cannot be parallel to both e1 and e3")


def rodrigues(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotation matrix exp(angle * hat(axis)) by Rodrigues' formula.

    ``axis`` must be a unit vector.
    """
    h = hat(axis)
    return np.eye(3) + np.sin(angle) * h + (1.0 - np.cos(angle)) * (h @ h)


def spherical_cosine_residual(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """Residual of the spherical law of cosines for the triangle (a, b, c).

    Returns ``cos(t_ab) - [cos(t_ac) cos(t_bc) + sin(t_ac) sin(t_bc) (k_ac . k_bc)]``
    where t_xy is the geodesic angle and k_xy the rotation axis between x
    and y.  The identity holds on the sphere, so the residual is zero up
    to rounding for any unit triple.
    """
    t_ab = geodesic_angle(a, b)
    t_ac = geodesic_angle(a, c)
    t_bc = geodesic_angle(b, c)
    k_ac = rotation_axis(a, c)
    k_bc = rotation_axis(b, c)
    return float(
        np.cos(t_ab)
        - (np.cos(t_ac) * np.cos(t_bc) + np.sin(t_ac) * np.sin(t_bc) * np.dot(k_ac, k_bc))
    )


def from_rpy(psi: float, phi: float) -> np.ndarray:
    """Unit vector [cos(psi)cos(phi), sin(psi)cos(phi), sin(phi)].

    ``psi`` is the yaw angle in [-pi, pi), ``phi`` the pitch angle in
    [-pi/2, pi/2].
    """
    cphi = np.cos(phi)
    return np.array([np.cos(psi) * cphi, np.sin(psi) * cphi, np.sin(phi)])


def to_rpy(g: np.ndarray) -> tuple[float, float]:
    """Inverse of :func:`from_rpy`; returns (psi, phi).

    At the poles (phi = +-pi/2) the yaw angle is undefined and is set to
    0 by convention.
    """
    g = np.asarray(g, dtype=float)
    phi = float(np.arcsin(np.clip(g[2], -1.0, 1.0)))
    if abs(g[0]) < 1e-15 and abs(g[1]) < 1e-15:
        return 0.0, phi
    psi = float(np.arctan2(g[1], g[0]))
    if psi >= np.pi:  # fold the seam so psi stays in [-pi, pi)
        psi -= 2.0 * np.pi
    return psi, phi
