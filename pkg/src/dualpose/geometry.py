"""Rotation representations, pose transforms, and similarity alignment.

Quaternions are numpy arrays in (w, x, y, z) order. Point sets are (N, 3)
arrays in meters. All angles returned by this module are degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlignmentUnderdetermined,
    DegenerateInput,
    DegenerateScale,
    InvalidRotation,
)

_QUAT_EPS = 1e-12


@dataclass
class Pose:
    """Rigid pose plus size: rotation R, translation t, per-axis size s."""

    R: np.ndarray
    t: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=np.float64).reshape(3, 3)
        self.t = np.asarray(self.t, dtype=np.float64).reshape(3)
        self.s = np.asarray(self.s, dtype=np.float64).reshape(3)

    def copy(self) -> "Pose":
        return Pose(self.R.copy(), self.t.copy(), self.s.copy())

    def validate(self, *, require_positive_size: bool = False) -> None:
        """Check rotation orthogonality/determinant; optionally s > 0."""
        if not np.allclose(self.R.T @ self.R, np.eye(3), atol=1e-6):
            raise InvalidRotation("R is not orthogonal")
        if np.linalg.det(self.R) < 0:
            raise InvalidRotation("R is a reflection")
        if require_positive_size and not np.all(self.s > 0):
            raise DegenerateScale(f"size must be positive, got {self.s}")


@dataclass
class SymmetrySpec:
    """Rotational symmetry of an object category: none, or one free axis."""

    kind: str = "none"  # "none" | "axial"
    axis: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("none", "axial"):
            raise ValueError(f"unknown symmetry kind {self.kind!r}")
        if self.kind == "axial":
            a = np.asarray(self.axis, dtype=np.float64).reshape(3)
            n = np.linalg.norm(a)
            if n < _QUAT_EPS:
                raise DegenerateInput("symmetry axis has zero norm")
            self.axis = a / n


NO_SYMMETRY = SymmetrySpec("none")


def normalize_quat(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64).reshape(4)
    n = np.linalg.norm(q)
    if n < _QUAT_EPS:
        raise DegenerateInput("zero-norm quaternion")
    return q / n


def canonicalize_quat(q: np.ndarray) -> np.ndarray:
    """Flip sign so w >= 0; on w == 0, first nonzero of (x, y, z) >= 0."""
    q = np.asarray(q, dtype=np.float64).reshape(4)
    return q * canonical_sign(q)


def canonical_sign(q: np.ndarray) -> float:
    """Sign that maps q onto the canonical hemisphere (+1 or -1)."""
    for v in q:
        if v != 0.0:
            return 1.0 if v > 0 else -1.0
    return 1.0


def quat_to_rot(q: np.ndarray) -> np.ndarray:
    """Unit-normalize q and convert to a 3x3 rotation matrix."""
    w, x, y, z = normalize_quat(q)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def rot_to_quat(R: np.ndarray) -> np.ndarray:
    """Convert a rotation matrix to its canonical-hemisphere quaternion."""
    R = np.asarray(R, dtype=np.float64).reshape(3, 3)
    if np.abs(R.T @ R - np.eye(3)).max() > 1e-6:
        raise InvalidRotation("matrix is not orthogonal within 1e-6")
    if np.linalg.det(R) < 0:
        raise InvalidRotation("matrix is a reflection")
    trace = R[0, 0] + R[1, 1] + R[2, 2]
    if trace > 0:
        s = 2.0 * np.sqrt(trace + 1.0)
        q = np.array([0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s])
    elif R[0, 0] > R[1, 1] and R[0, 0] > R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
        q = np.array([(R[2, 1] - R[1, 2]) / s, 0.25 * s, (R[0, 1] + R[1, 0]) / s, (R[0, 2] + R[2, 0]) / s])
    elif R[1, 1] > R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2])
        q = np.array([(R[0, 2] - R[2, 0]) / s, (R[0, 1] + R[1, 0]) / s, 0.25 * s, (R[1, 2] + R[2, 1]) / s])
    else:
        s = 2.0 * np.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1])
        q = np.array([(R[1, 0] - R[0, 1]) / s, (R[0, 2] + R[2, 0]) / s, (R[1, 2] + R[2, 1]) / s, 0.25 * s])
    return canonicalize_quat(q / np.linalg.norm(q))


def to_canonical(p: np.ndarray, pose: Pose) -> np.ndarray:
    """Map observed point(s) into the scale-free canonical frame.

    Computes R^T (p - t) / ||s||. Accepts a single point (3,) or a point
    set (N, 3); the inverse is `from_canonical`.
    """
    sn = np.linalg.norm(pose.s)
    if sn <= 1e-9:
        raise DegenerateScale("size norm too small to invert")
    p = np.asarray(p, dtype=np.float64)
    return (p - pose.t) @ pose.R / sn


def from_canonical(q: np.ndarray, pose: Pose) -> np.ndarray:
    """Inverse of `to_canonical`: p = ||s|| R q + t."""
    sn = np.linalg.norm(pose.s)
    if sn <= 1e-9:
        raise DegenerateScale("size norm too small")
    q = np.asarray(q, dtype=np.float64)
    return sn * (q @ pose.R.T) + pose.t


def umeyama(src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares similarity transform so that dst ~ c * R @ src + t.

    Returns (R, t, c) minimizing sum ||dst_i - (c R src_i + t)||^2, with
    det(R) = +1 enforced via the reflection-correcting sign matrix.
    """
    src = np.asarray(src, dtype=np.float64).reshape(-1, 3)
    dst = np.asarray(dst, dtype=np.float64).reshape(-1, 3)
    if src.shape != dst.shape:
        raise AlignmentUnderdetermined(f"point counts differ: {src.shape[0]} vs {dst.shape[0]}")
    n = src.shape[0]
    if n < 3:
        raise AlignmentUnderdetermined(f"need at least 3 correspondences, got {n}")
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    ds = src - mu_s
    dd = dst - mu_d
    cov = dd.T @ ds / n
    U, D, Vt = np.linalg.svd(cov)
    if D[0] < _QUAT_EPS or D[1] <= 1e-9 * D[0]:
        raise AlignmentUnderdetermined("covariance rank below 2")
    S = np.ones(3)
    if np.linalg.det(U) * np.linalg.det(Vt) < 0:
        S[2] = -1.0
    R = U @ np.diag(S) @ Vt
    var_src = (ds ** 2).sum() / n
    c = float((D * S).sum() / var_src)
    if c <= 0:
        raise DegenerateScale(f"recovered scale {c} is not positive")
    t = mu_d - c * R @ mu_s
    return R, t, c


def size_from_canonical(canonical: np.ndarray, scale: float) -> np.ndarray:
    """Size vector from canonical-frame extents and a recovered scalar scale.

    s = scale * (max - min per axis); ||s|| = scale * ||extent||.
    """
    canonical = np.asarray(canonical, dtype=np.float64).reshape(-1, 3)
    if canonical.shape[0] < 1:
        raise DegenerateInput("empty canonical point set")
    if scale <= 0:
        raise DegenerateScale(f"scale must be positive, got {scale}")
    extent = canonical.max(axis=0) - canonical.min(axis=0)
    return scale * extent


def rotation_error(R1: np.ndarray, R2: np.ndarray, sym: SymmetrySpec = NO_SYMMETRY) -> float:
    """Rotation error in degrees, minimized over the symmetry group.

    Without symmetry this is the geodesic angle on SO(3); with an axial
    symmetry it is the angle between the two rotated axes (yaw about the
    axis is free).
    """
    R1 = np.asarray(R1, dtype=np.float64)
    R2 = np.asarray(R2, dtype=np.float64)
    if sym.kind == "axial":
        cosang = float(np.clip((R1 @ sym.axis) @ (R2 @ sym.axis), -1.0, 1.0))
    else:
        cosang = float(np.clip((np.trace(R1.T @ R2) - 1.0) / 2.0, -1.0, 1.0))
    return float(np.degrees(np.arccos(cosang)))


def canonical_axial_rotation(R: np.ndarray, axis: np.ndarray) -> np.ndarray:
    """Canonical representative of the equivalence class {R @ Rot(axis, theta)}.

    The world direction of the symmetry axis is preserved; the free spin
    about it is fixed by aligning the first orthogonal frame vector with a
    fixed world reference. Used to build single-valued regression targets
    for axially symmetric objects.
    """
    R = np.asarray(R, dtype=np.float64)
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    a_world = R @ axis
    ref = np.array([1.0, 0.0, 0.0])
    if abs(a_world @ ref) > 0.999:
        ref = np.array([0.0, 1.0, 0.0])
    u = ref - (ref @ a_world) * a_world
    u /= np.linalg.norm(u)
    v = np.cross(a_world, u)
    # columns map object axes (b1, b2, axis) -> world (u, v, a_world)
    b1 = _any_orthogonal(axis)
    b2 = np.cross(axis, b1)
    B_obj = np.stack([b1, b2, axis], axis=1)
    B_world = np.stack([u, v, a_world], axis=1)
    return B_world @ B_obj.T


def _any_orthogonal(a: np.ndarray) -> np.ndarray:
    ref = np.array([1.0, 0.0, 0.0]) if abs(a[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    u = ref - (ref @ a) * a
    return u / np.linalg.norm(u)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation via a normalized Gaussian quaternion."""
    q = rng.normal(size=4)
    while np.linalg.norm(q) < 1e-6:
        q = rng.normal(size=4)
    return quat_to_rot(q)


def rot_z(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_x(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
