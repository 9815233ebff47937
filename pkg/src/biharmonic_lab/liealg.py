"""Small dense matrix Lie algebra kernel.

Algebra elements are plain complex ``numpy`` arrays (real algebras simply
carry a zero imaginary part).  Group elements are wrapped in
:class:`GroupElement`, which remembers which defining constraint applies so
that drift can be monitored.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg


class GroupKind(str, enum.Enum):
    ORTHOGONAL = "orthogonal"
    SPECIAL_UNITARY = "special-unitary"
    SYMPLECTIC = "symplectic-unitary"
    AFFINE = "affine-euclidean"
    GENERAL = "general"


def as_element(X) -> np.ndarray:
    """Validate and return ``X`` as a square complex matrix."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix has non-finite entries")
    return X


def bracket(X, Y) -> np.ndarray:
    """Matrix commutator ``XY - YX``."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if X.shape != Y.shape or X.ndim != 2:
        raise ValueError(f"dimension mismatch: {X.shape} vs {Y.shape}")
    return X @ Y - Y @ X


def norm(X) -> float:
    """Frobenius norm, used for every residual and drift magnitude."""
    return float(np.linalg.norm(X))


def symplectic_form(N: int) -> np.ndarray:
    if N % 2:
        raise ValueError(f"symplectic form needs even dimension, got {N}")
    m = N // 2
    J = np.zeros((N, N))
    J[:m, m:] = np.eye(m)
    J[m:, :m] = -np.eye(m)
    return J


def algebra_residual(X, kind: GroupKind) -> float:
    """Norm of the violation of the linear constraints defining the algebra."""
    X = np.asarray(X, dtype=complex)
    kind = GroupKind(kind)
    if kind is GroupKind.ORTHOGONAL:
        return norm(X + X.T) + norm(X.imag)
    if kind is GroupKind.SPECIAL_UNITARY:
        return norm(X + X.conj().T) + abs(np.trace(X))
    if kind is GroupKind.SYMPLECTIC:
        J = symplectic_form(X.shape[0])
        return norm(X + X.conj().T) + norm(X.T @ J + J @ X)
    if kind is GroupKind.AFFINE:
        R = X[:-1, :-1]
        return norm(X[-1, :]) + norm(R + R.T) + norm(X.imag)
    return 0.0


def constraint_residual(g, kind: GroupKind) -> float:
    """Norm of the violation of the defining constraint of the group."""
    g = np.asarray(g, dtype=complex)
    kind = GroupKind(kind)
    eye = np.eye(g.shape[0])
    if kind is GroupKind.ORTHOGONAL:
        return norm(g.T @ g - eye) + norm(g.imag)
    if kind is GroupKind.SPECIAL_UNITARY:
        return norm(g.conj().T @ g - eye) + abs(np.linalg.det(g) - 1.0)
    if kind is GroupKind.SYMPLECTIC:
        J = symplectic_form(g.shape[0])
        return norm(g.T @ J @ g - J) + norm(g.conj().T @ g - eye)
    if kind is GroupKind.AFFINE:
        bottom = np.zeros(g.shape[0])
        bottom[-1] = 1.0
        R = g[:-1, :-1]
        return norm(g[-1, :] - bottom) + norm(R.T @ R - eye[:-1, :-1]) + norm(g.imag)
    return 0.0


def infer_kind(X, tol: float = 1e-10) -> GroupKind:
    """Guess the ambient group family of an algebra element.

    Real skew matrices are reported as orthogonal even when they also sit in
    another family; callers that know their model should pass the kind.
    """
    X = np.asarray(X, dtype=complex)
    scale = max(1.0, norm(X))
    for kind in (GroupKind.ORTHOGONAL, GroupKind.AFFINE):
        if algebra_residual(X, kind) <= tol * scale:
            return kind
    if X.shape[0] % 2 == 0 and algebra_residual(X, GroupKind.SYMPLECTIC) <= tol * scale:
        return GroupKind.SYMPLECTIC
    if algebra_residual(X, GroupKind.SPECIAL_UNITARY) <= tol * scale:
        return GroupKind.SPECIAL_UNITARY
    return GroupKind.GENERAL


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    kind: GroupKind = GroupKind.GENERAL

    def __post_init__(self):
        m = as_element(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "kind", GroupKind(self.kind))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, GroupElement):
            return GroupElement(self.matrix @ other.matrix, self.kind)
        return self.matrix @ other

    def inv(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.matrix), self.kind)

    def drift(self) -> float:
        return constraint_residual(self.matrix, self.kind)

    @classmethod
    def identity(cls, N: int, kind: GroupKind = GroupKind.GENERAL) -> "GroupElement":
        return cls(np.eye(N, dtype=complex), kind)


def expm(X, kind: GroupKind | None = None) -> GroupElement:
    """Matrix exponential (scaling and squaring with a Pade approximant)."""
    X = as_element(X)
    if kind is None:
        kind = infer_kind(X)
    return GroupElement(scipy.linalg.expm(X), kind)


def expm_rank_one(X, tol: float = 1e-12) -> np.ndarray:
    """Closed-form exponential for elements with ``X^3 = -theta^2 X``.

    Every tangent vector of a rank-one symmetric space model (sphere,
    complex and quaternionic projective space) satisfies this identity, so
    ``exp X = I + sin(theta)/theta X + (1 - cos(theta))/theta^2 X^2``.
    Raises ``ValueError`` when the cubic identity does not hold.
    """
    X = as_element(X)
    eye = np.eye(X.shape[0], dtype=complex)
    nx = np.vdot(X, X).real
    if nx == 0.0:
        return eye
    X2 = X @ X
    X3 = X2 @ X
    theta2 = -np.vdot(X, X3).real / nx
    if theta2 < 0 or norm(X3 + theta2 * X) > tol * max(1.0, nx ** 1.5):
        raise ValueError("element does not satisfy X^3 = -theta^2 X")
    theta = np.sqrt(theta2)
    if theta < 1e-8:
        s, c = 1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0
    else:
        s, c = np.sin(theta) / theta, (1.0 - np.cos(theta)) / theta2
    return eye + s * X + c * X2


# --- quaternions -----------------------------------------------------------
# Components are ordered (1, i, j, k).  A quaternion a + bi + cj + dk is
# written z + w j with z = a + bi and w = c + di.


def qmul(p, q) -> np.ndarray:
    """Hamilton product of quaternion arrays with trailing axis of length 4."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(q) -> np.ndarray:
    q = np.array(q, dtype=float)
    q[..., 1:] *= -1.0
    return q


@dataclass(frozen=True)
class Quaternion:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(v) for v in self.components):
            raise ValueError("quaternion has non-finite components")

    @property
    def components(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        return cls(*(float(v) for v in arr))

    @classmethod
    def from_complex_pair(cls, z: complex, w: complex) -> "Quaternion":
        return cls(z.real, z.imag, w.real, w.imag)

    def complex_pair(self) -> tuple[complex, complex]:
        return complex(self.a, self.b), complex(self.c, self.d)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self.components, other.components))
        return Quaternion(*(other * v for v in self.components))

    __rmul__ = __mul__

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(*(u + v for u, v in zip(self.components, other.components)))

    def __neg__(self) -> "Quaternion":
        return Quaternion(*(-v for v in self.components))

    def __abs__(self) -> float:
        return float(np.sqrt(sum(v * v for v in self.components)))

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d)


QUAT_ONE = Quaternion(1.0)
QUAT_I = Quaternion(0.0, 1.0)
QUAT_J = Quaternion(0.0, 0.0, 1.0)
QUAT_K = Quaternion(0.0, 0.0, 0.0, 1.0)


def quat_embed(q: Quaternion) -> np.ndarray:
    """``z + w j  ->  [[z, w], [-conj(w), conj(z)]]``; a multiplicative embedding."""
    z, w = q.complex_pair()
    return np.array([[z, w], [-w.conjugate(), z.conjugate()]], dtype=complex)
