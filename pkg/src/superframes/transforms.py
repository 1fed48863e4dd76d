"""Rigid Euclidean motions x = R x' + b and rotation constructors.

A transform maps coordinates of a primed frame into an unprimed one, so
``t(x_prime)`` returns the unprimed coordinates of the same point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

ORTHOGONALITY_TOL = 1e-12
# transforms closer than this (rotation Frobenius / translation Euclidean) are one support point
EQUALITY_TOL = 1e-9
_KEY_QUANTUM = 1e-9


@dataclass(frozen=True, eq=False)
class EuclideanTransform:
    """Proper rigid motion ``x -> rotation @ x + translation``.

    Instances are immutable; the arrays are copied and marked read-only.
    Dimensions 1, 2 and 3 are accepted (1-D transforms are pure
    translations, used for particles on a line).
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.array(self.rotation, dtype=float)
        if rot.ndim == 0:
            rot = rot.reshape(1, 1)
        if rot.ndim != 2 or rot.shape[0] != rot.shape[1] or rot.shape[0] not in (1, 2, 3):
            raise ValidationError(f"rotation must be a square 1x1, 2x2 or 3x3 matrix, got shape {rot.shape}")
        trans = np.array(self.translation, dtype=float).reshape(-1)
        if trans.shape != (rot.shape[0],):
            raise ValidationError(
                f"translation has length {trans.size}, rotation is {rot.shape[0]}-dimensional")
        if not (np.all(np.isfinite(rot)) and np.all(np.isfinite(trans))):
            raise ValidationError("transform entries must be finite")
        ortho = np.linalg.norm(rot.T @ rot - np.eye(rot.shape[0]))
        if ortho >= ORTHOGONALITY_TOL:
            raise ValidationError(f"rotation is not orthogonal (|R^T R - I|_F = {ortho:.3e})")
        det = np.linalg.det(rot)
        if abs(det - 1.0) >= ORTHOGONALITY_TOL:
            raise ValidationError(f"rotation must be proper, det = {det:.15g}")
        rot.setflags(write=False)
        trans.setflags(write=False)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)

    @classmethod
    def identity(cls, dim: int = 2) -> EuclideanTransform:
        return cls(np.eye(dim), np.zeros(dim))

    @classmethod
    def translation_only(cls, vector: Sequence[float]) -> EuclideanTransform:
        vec = np.asarray(vector, dtype=float).reshape(-1)
        return cls(np.eye(vec.size), vec)

    @property
    def dim(self) -> int:
        return self.rotation.shape[0]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Apply to points stacked along the first axis, shape ``(dim, ...)``."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(self.dim, -1)
        out = self.rotation @ flat + self.translation[:, None]
        return out.reshape(pts.shape)

    def then(self, inner: EuclideanTransform) -> EuclideanTransform:
        """Composite ``self o inner``: apply ``inner`` first."""
        if inner.dim != self.dim:
            raise ValidationError(f"cannot compose {self.dim}-D with {inner.dim}-D transform")
        return EuclideanTransform(self.rotation @ inner.rotation,
                                  self.rotation @ inner.translation + self.translation)

    def __matmul__(self, inner: EuclideanTransform) -> EuclideanTransform:
        return self.then(inner)

    def inverse(self) -> EuclideanTransform:
        rt = self.rotation.T
        return EuclideanTransform(rt, -(rt @ self.translation))

    def distance(self, other: EuclideanTransform) -> tuple[float, float]:
        """(Frobenius distance of rotations, Euclidean distance of translations)."""
        if other.dim != self.dim:
            return math.inf, math.inf
        return (float(np.linalg.norm(self.rotation - other.rotation)),
                float(np.linalg.norm(self.translation - other.translation)))

    def isclose(self, other: EuclideanTransform, tol: float = EQUALITY_TOL) -> bool:
        dr, dt = self.distance(other)
        return dr < tol and dt < tol

    def sort_key(self) -> tuple:
        """Total order used to canonicalize superpositions."""
        entries = np.concatenate([self.rotation.ravel(), self.translation])
        return (self.dim,) + tuple(int(v) for v in np.rint(entries / _KEY_QUANTUM))

    def is_identity(self, tol: float = EQUALITY_TOL) -> bool:
        return self.isclose(EuclideanTransform.identity(self.dim), tol)

    @property
    def angle(self) -> float:
        """Signed rotation angle in radians (2-D) or canonical angle in [0, pi] (3-D)."""
        if self.dim == 1:
            return 0.0
        if self.dim == 2:
            return math.atan2(self.rotation[1, 0], self.rotation[0, 0])
        return axis_angle(self.rotation)[0]

    def __repr__(self) -> str:
        rot = np.array2string(self.rotation, precision=6, suppress_small=True, separator=", ")
        tr = np.array2string(self.translation, precision=6, suppress_small=True, separator=", ")
        return f"EuclideanTransform(rotation={rot}, translation={tr})"


def rotation_2d(angle: float) -> np.ndarray:
    """Counter-clockwise planar rotation matrix.

    Quarter-turn angles return exact integer matrices so that lattice
    rotations stay exact.
    """
    quarter = angle / (math.pi / 2)
    k = round(quarter)
    if abs(quarter - k) < 1e-13:
        c, s = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][k % 4]
    else:
        c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def rotation_axis_angle(angle: float, axis: Sequence[float]) -> np.ndarray:
    """Rodrigues rotation by ``angle`` about ``axis`` (normalized here)."""
    n = np.asarray(axis, dtype=float).reshape(3)
    norm = np.linalg.norm(n)
    if norm == 0:
        raise ValidationError("rotation axis must be nonzero")
    n = n / norm
    k = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def axis_angle(rotation: np.ndarray) -> tuple[float, np.ndarray]:
    """Canonical (angle, unit axis) of a 3-D rotation, angle in [0, pi].

    A negative angle about n is reported as the positive angle about -n.
    For the identity the axis is arbitrarily +z.
    """
    r = np.asarray(rotation, dtype=float)
    cos_t = np.clip((np.trace(r) - 1.0) / 2.0, -1.0, 1.0)
    theta = math.acos(cos_t)
    if theta < 1e-12:
        return 0.0, np.array([0.0, 0.0, 1.0])
    if math.pi - theta > 1e-6:
        axis = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
        return theta, axis / np.linalg.norm(axis)
    # near pi the antisymmetric part vanishes; read the axis off R + I
    m = (r + np.eye(3)) / 2.0
    col = int(np.argmax(np.diag(m)))
    axis = m[:, col] / math.sqrt(m[col, col])
    return theta, axis / np.linalg.norm(axis)


def canonical_axis_angle(angle: float, axis: Sequence[float]) -> tuple[float, np.ndarray]:
    """Fold (angle, axis) into angle in [0, pi] with the axis sign absorbing negatives."""
    return axis_angle(rotation_axis_angle(angle, axis))


def planar(angle: float, translation: Sequence[float] = (0.0, 0.0)) -> EuclideanTransform:
    return EuclideanTransform(rotation_2d(angle), translation)


def spatial(angle: float, axis: Sequence[float],
            translation: Sequence[float] = (0.0, 0.0, 0.0)) -> EuclideanTransform:
    return EuclideanTransform(rotation_axis_angle(angle, axis), translation)


def random_transform(rng: np.random.Generator, dim: int = 2, max_shift: float = 1.0) -> EuclideanTransform:
    """Uniformly random rotation plus a translation in the cube [-max_shift, max_shift]^dim."""
    shift = rng.uniform(-max_shift, max_shift, size=dim)
    if dim == 1:
        return EuclideanTransform.translation_only(shift)
    if dim == 2:
        return planar(rng.uniform(-math.pi, math.pi), shift)
    # uniform on SO(3) via a random unit quaternion
    q = rng.normal(size=4)
    w, x, y, z = q / np.linalg.norm(q)
    rot = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])
    # re-orthonormalize so the 1e-12 invariant holds after rounding
    u, _, vt = np.linalg.svd(rot)
    return EuclideanTransform(u @ vt, shift)
