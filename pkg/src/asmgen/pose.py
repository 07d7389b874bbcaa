"""Rigid 4x4 homogeneous transforms.

Translations are in meters, angles in radians.  A :class:`Pose` is
immutable; every operation returns a new one.
"""
import math

import numpy as np

ORTHO_TOL = 1e-9

_BOTTOM = np.array([0.0, 0.0, 0.0, 1.0])


class PoseError(ValueError):
    pass


class Pose:
    """A rigid transform stored as a read-only 4x4 float array."""

    __slots__ = ("_m",)

    def __init__(self, matrix, validate=True):
        m = np.array(matrix, dtype=float).reshape(4, 4)
        if validate:
            check_rigid(m)
        m.setflags(write=False)
        self._m = m

    # -- constructors ---------------------------------------------------------

    @classmethod
    def identity(cls):
        return cls(np.eye(4), validate=False)

    @classmethod
    def from_translation(cls, x, y, z):
        m = np.eye(4)
        m[:3, 3] = (x, y, z)
        return cls(m, validate=False)

    @classmethod
    def from_xyz_rpy(cls, x, y, z, roll=0.0, pitch=0.0, yaw=0.0):
        """Translation plus fixed-axis roll/pitch/yaw (R = Rz @ Ry @ Rx)."""
        cr, sr = math.cos(roll), math.sin(roll)
        cp, sp = math.cos(pitch), math.sin(pitch)
        cy, sy = math.cos(yaw), math.sin(yaw)
        m = np.eye(4)
        m[:3, :3] = [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
        m[:3, 3] = (x, y, z)
        return cls(m, validate=False)

    @classmethod
    def from_list(cls, values):
        """Build from a flat 16-element row-major sequence."""
        values = list(values)
        if len(values) != 16:
            raise PoseError(f"expected 16 values, got {len(values)}")
        return cls(np.array(values, dtype=float).reshape(4, 4))

    # -- accessors ------------------------------------------------------------

    @property
    def matrix(self):
        return self._m

    @property
    def rotation(self):
        return self._m[:3, :3]

    @property
    def translation(self):
        return self._m[:3, 3]

    @property
    def x(self):
        return float(self._m[0, 3])

    @property
    def y(self):
        return float(self._m[1, 3])

    @property
    def z(self):
        return float(self._m[2, 3])

    def to_list(self):
        return [float(v) for v in self._m.ravel()]

    def translated(self, dx, dy, dz):
        """Same orientation, translation shifted in the parent frame."""
        m = self._m.copy()
        m[:3, 3] += (dx, dy, dz)
        return Pose(m, validate=False)

    def __matmul__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return bool(np.array_equal(self._m, other._m))

    def __hash__(self):
        return hash(self._m.tobytes())

    def __repr__(self):
        t = ", ".join(f"{v:.6g}" for v in self.translation)
        return f"Pose(t=[{t}])"

    def __reduce__(self):
        return (Pose, (self._m.copy(), False))

    def __deepcopy__(self, memo):
        return self


def check_rigid(m, tol=ORTHO_TOL):
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise PoseError(f"pose must be 4x4, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise PoseError("pose contains non-finite values")
    if not np.array_equal(m[3], _BOTTOM):
        raise PoseError("bottom row must be exactly (0, 0, 0, 1)")
    r = m[:3, :3]
    if np.max(np.abs(r.T @ r - np.eye(3))) > tol:
        raise PoseError("rotation block is not orthonormal")
    if abs(np.linalg.det(r) - 1.0) > tol:
        raise PoseError("rotation determinant is not +1")


def compose(a, b):
    """Return ``a @ b``: apply ``b`` in the frame of ``a``."""
    return Pose(a.matrix @ b.matrix, validate=False)


def invert(a):
    r = a.rotation
    m = np.eye(4)
    m[:3, :3] = r.T
    m[:3, 3] = -r.T @ a.translation
    return Pose(m, validate=False)


def translation_error(a, b):
    """Euclidean distance between the translations of two poses."""
    return float(np.linalg.norm(a.translation - b.translation))


def max_abs_diff(a, b):
    return float(np.max(np.abs(a.matrix - b.matrix)))


def to_rpy(a):
    """Inverse of :meth:`Pose.from_xyz_rpy` for the rotation block."""
    r = a.rotation
    pitch = math.atan2(-r[2, 0], math.hypot(r[0, 0], r[1, 0]))
    if abs(math.cos(pitch)) < 1e-12:
        # gimbal lock: fold yaw into roll
        roll = math.atan2(-r[1, 2], r[1, 1])
        return roll, pitch, 0.0
    roll = math.atan2(r[2, 1], r[2, 2])
    yaw = math.atan2(r[1, 0], r[0, 0])
    return roll, pitch, yaw
