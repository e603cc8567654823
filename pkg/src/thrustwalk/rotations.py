"""SO(3) helpers: elementary rotations, exponential map, projection."""

import numpy as np


def skew(w):
    """3x3 skew-symmetric matrix such that skew(w) @ v == cross(w, v)."""
    x, y, z = w
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rot_x(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def drot_x(a):
    """d/da rot_x(a)."""
    c, s = np.cos(a), np.sin(a)
    return np.array([[0.0, 0.0, 0.0], [0.0, -s, -c], [0.0, c, -s]])


def ddrot_x(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[0.0, 0.0, 0.0], [0.0, -c, s], [0.0, -s, -c]])


def drot_y(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[-s, 0.0, c], [0.0, 0.0, 0.0], [-c, 0.0, -s]])


def ddrot_y(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[-c, 0.0, -s], [0.0, 0.0, 0.0], [s, 0.0, -c]])


def so3_exp(w):
    """Matrix exponential of skew(w) via the Rodrigues formula."""
    w = np.asarray(w, dtype=float)
    th = np.linalg.norm(w)
    K = skew(w)
    if th < 1e-12:
        # second-order series; exact to machine precision at this scale
        return np.eye(3) + K + 0.5 * (K @ K)
    A = np.sin(th) / th
    B = (1.0 - np.cos(th)) / (th * th)
    return np.eye(3) + A * K + B * (K @ K)


def _cross3(a, b):
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def dexpinv(theta, omega):
    """Inverse right-trivialized tangent of exp on SO(3).

    Maps body angular velocity to the rate of the exponential coordinate
    theta, so that R(t) = R0 @ exp(skew(theta(t))) integrates correctly.
    Series through the fourth-order Bernoulli term; more than enough for
    the per-step increments (|theta| ~ |omega| * dt) seen here.
    """
    c1 = _cross3(theta, omega)
    c2 = _cross3(theta, c1)
    c4 = _cross3(theta, _cross3(theta, c2))
    return omega - 0.5 * c1 + (1.0 / 12.0) * c2 - (1.0 / 720.0) * c4


def project_so3(R):
    """Nearest rotation matrix (polar decomposition via SVD)."""
    U, _, Vt = np.linalg.svd(R)
    D = np.eye(3)
    D[2, 2] = np.sign(np.linalg.det(U @ Vt))
    return U @ D @ Vt


def rpy_zyx(R):
    """Roll, pitch, yaw of R = Rz(yaw) @ Ry(pitch) @ Rx(roll).

    Display/control extraction only; the dynamics never touch Euler angles.
    """
    pitch = -np.arcsin(np.clip(R[2, 0], -1.0, 1.0))
    roll = np.arctan2(R[2, 1], R[2, 2])
    yaw = np.arctan2(R[1, 0], R[0, 0])
    return roll, pitch, yaw


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    return np.pi - np.mod(np.pi - a, 2.0 * np.pi)
