"""Concrete symmetric-space models G/K with their Cartan splittings.

Each model fixes a matrix realisation of the Lie algebra of G, a boolean mask
selecting the entries belonging to the tangent part ``m`` (the isotropy part
``k`` is the complement), a coordinate chart on ``m`` and the projection of
G onto G/K through the base point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liealg import GroupElement, GroupKind, algebra_residual, constraint_residual, qmul, qconj

ALGEBRA_TOL = 1e-10
POINT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HomogeneousPoint:
    """A point of G/K stored through one representative.

    ``coords`` is a real vector (sphere, Euclidean), a complex vector
    (complex projective space) or an ``(n+1, 4)`` array of quaternion
    components (quaternionic projective space).
    """

    space: str
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def flat(self) -> np.ndarray:
        """Real vector suitable for tabular export."""
        c = self.coords
        if np.iscomplexobj(c):
            return np.column_stack([c.real, c.imag]).ravel()
        return np.asarray(c, dtype=float).ravel()


class SymmetricSpace:
    """Base class; subclasses fill in the block pattern and the chart."""

    name: str = ""
    kind: GroupKind = GroupKind.GENERAL

    def __init__(self, n: int):
        if int(n) != n or n < 1:
            raise ValueError(f"dimension parameter must be a positive integer, got {n}")
        self.n = int(n)
        self._m_mask = self._build_m_mask()
        self._m_mask.setflags(write=False)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.n})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.n == other.n

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.n))

    # -- structure ---------------------------------------------------------
    @property
    def N(self) -> int:
        raise NotImplementedError

    @property
    def m_dim(self) -> int:
        """Number of coordinates of the m-chart."""
        raise NotImplementedError

    def _build_m_mask(self) -> np.ndarray:
        raise NotImplementedError

    def identity(self) -> GroupElement:
        return GroupElement.identity(self.N, self.kind)

    def check_algebra(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.N, self.N):
            raise ValueError(f"{self!r} expects {self.N}x{self.N} matrices, got {X.shape}")
        res = algebra_residual(X, self.kind)
        if res > ALGEBRA_TOL * max(1.0, float(np.linalg.norm(X))):
            raise ValueError(f"matrix is not in the Lie algebra of {self!r} (residual {res:.3e})")
        return X

    def proj_m(self, X) -> np.ndarray:
        return np.where(self._m_mask, np.asarray(X, dtype=complex), 0.0)

    def proj_k(self, X) -> np.ndarray:
        return np.where(self._m_mask, 0.0, np.asarray(X, dtype=complex))

    def project(self, X, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Split an algebra element into its ``(k, m)`` parts."""
        if check:
            X = self.check_algebra(X)
        return self.proj_k(X), self.proj_m(X)

    # -- m chart -----------------------------------------------------------
    def m_from_coords(self, coords) -> np.ndarray:
        raise NotImplementedError

    def m_coords(self, X) -> np.ndarray:
        raise NotImplementedError

    # -- points ------------------------------------------------------------
    def base_point(self) -> HomogeneousPoint:
        return self.project_point(self.identity())

    def project_point(self, g, tol: float = 1e-8) -> HomogeneousPoint:
        g = g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=complex)
        res = constraint_residual(g, self.kind)
        if res > tol * max(1.0, float(np.linalg.norm(g))):
            raise ValueError(f"group element violates the {self.kind.value} constraint ({res:.3e})")
        return self._point_from_matrix(g)

    def _point_from_matrix(self, g: np.ndarray) -> HomogeneousPoint:
        raise NotImplementedError

    def point_from_column(self, v) -> HomogeneousPoint:
        """Point represented by a column vector in the defining representation."""
        g = np.zeros((self.N, self.N), dtype=complex)
        g[:, 0] = v
        return self._point_from_matrix(g)

    def align(self, p: HomogeneousPoint) -> HomogeneousPoint:
        """Canonical representative (identity for non-projective models)."""
        return p

    def distance(self, p: HomogeneousPoint, q: HomogeneousPoint) -> float:
        return float(np.linalg.norm(np.asarray(p.coords) - np.asarray(q.coords)))

    # -- random sampling (tests, property checks) --------------------------
    def random_algebra(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        raise NotImplementedError

    def random_m(self, rng, scale: float = 1.0) -> np.ndarray:
        return self.proj_m(self.random_algebra(rng, scale))

    def random_k(self, rng, scale: float = 1.0) -> np.ndarray:
        return self.proj_k(self.random_algebra(rng, scale))

    def random_group(self, rng, scale: float = 1.0) -> GroupElement:
        from .liealg import expm

        return expm(self.random_algebra(rng, scale), self.kind)

    def random_isotropy(self, rng, scale: float = 1.0) -> GroupElement:
        from .liealg import expm

        return expm(self.random_k(rng, scale), self.kind)

    def random_m_coords(self, rng, scale: float = 1.0) -> np.ndarray:
        return self.m_coords(self.random_m(rng, scale))


def _skew(rng, n, scale, complex_=False):
    A = rng.normal(size=(n, n))
    if complex_:
        A = A + 1j * rng.normal(size=(n, n))
    return scale * (A - A.conj().T) / 2.0


class Sphere(SymmetricSpace):
    """S^n = SO(n+1)/SO(n) with base point e_0."""

    name = "sphere"
    kind = GroupKind.ORTHOGONAL

    @property
    def N(self) -> int:
        return self.n + 1

    @property
    def m_dim(self) -> int:
        return self.n

    def _build_m_mask(self):
        mask = np.zeros((self.N, self.N), dtype=bool)
        mask[0, 1:] = mask[1:, 0] = True
        return mask

    def m_from_coords(self, coords) -> np.ndarray:
        u = np.asarray(coords)
        if u.shape != (self.n,):
            raise ValueError(f"sphere chart expects shape ({self.n},), got {u.shape}")
        if np.iscomplexobj(u) and np.any(u.imag != 0):
            raise ValueError("sphere chart coordinates must be real")
        u = u.real.astype(float)
        X = np.zeros((self.N, self.N), dtype=complex)
        X[1:, 0] = u
        X[0, 1:] = -u
        return X

    def m_coords(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.shape != (self.N, self.N):
            raise ValueError(f"expected {self.N}x{self.N} matrix, got {X.shape}")
        return np.asarray(X[1:, 0].real, dtype=float)

    def _point_from_matrix(self, g):
        return HomogeneousPoint(self.name, g[:, 0].real.copy())

    def random_algebra(self, rng, scale=1.0):
        return _skew(rng, self.N, scale).astype(complex)


class ComplexProjective(SymmetricSpace):
    """CP^n = SU(n+1)/S(U(1) x U(n)); points are complex lines, compared up to phase."""

    name = "cpn"
    kind = GroupKind.SPECIAL_UNITARY

    @property
    def N(self) -> int:
        return self.n + 1

    @property
    def m_dim(self) -> int:
        return self.n

    def _build_m_mask(self):
        mask = np.zeros((self.N, self.N), dtype=bool)
        mask[0, 1:] = mask[1:, 0] = True
        return mask

    def m_from_coords(self, coords) -> np.ndarray:
        z = np.asarray(coords, dtype=complex)
        if z.shape != (self.n,):
            raise ValueError(f"CP^n chart expects shape ({self.n},), got {z.shape}")
        X = np.zeros((self.N, self.N), dtype=complex)
        X[1:, 0] = z
        X[0, 1:] = -z.conj()
        return X

    def m_coords(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.N, self.N):
            raise ValueError(f"expected {self.N}x{self.N} matrix, got {X.shape}")
        return X[1:, 0].copy()

    def _point_from_matrix(self, g):
        return HomogeneousPoint(self.name, g[:, 0].copy())

    def align(self, p):
        v = np.asarray(p.coords, dtype=complex)
        idx = np.flatnonzero(np.abs(v) > POINT_TOL)
        if idx.size == 0:
            return p
        phase = v[idx[0]] / abs(v[idx[0]])
        return HomogeneousPoint(self.name, v / phase)

    def distance(self, p, q):
        # align both on the largest coordinate of p so the gauge choice is stable
        v = np.asarray(p.coords, dtype=complex)
        w = np.asarray(q.coords, dtype=complex)
        m = int(np.argmax(np.abs(v)))
        pv = v[m] / abs(v[m])
        pw = w[m] / abs(w[m]) if abs(w[m]) > 0 else 1.0
        return float(np.linalg.norm(v / pv - w / pw))

    def random_algebra(self, rng, scale=1.0):
        X = _skew(rng, self.N, scale, complex_=True)
        return X - np.trace(X) / self.N * np.eye(self.N)


class QuaternionProjective(SymmetricSpace):
    """HP^n = Sp(n+1)/(Sp(1) x Sp(n)) realised inside U(2n+2).

    Algebra elements have the block form ``[[A, B], [-conj(B), conj(A)]]``
    with ``A`` skew-Hermitian and ``B`` symmetric.  The first column
    ``(p, r)`` of a group element gives the quaternionic representative
    ``q = p + r j`` of its image point; quaternionic scalars act on the left.
    """

    name = "hpn"
    kind = GroupKind.SYMPLECTIC

    @property
    def N(self) -> int:
        return 2 * self.n + 2

    @property
    def m_dim(self) -> int:
        return 2 * self.n

    def _build_m_mask(self):
        n = self.n
        head = np.zeros(self.N, dtype=bool)
        head[[0, n + 1]] = True
        return head[:, None] ^ head[None, :]

    def m_from_coords(self, coords) -> np.ndarray:
        """``coords`` is ``(Z, W)``, two complex row vectors of length n."""
        ZW = np.asarray(coords, dtype=complex)
        n = self.n
        if ZW.shape != (2, n):
            raise ValueError(f"HP^n chart expects shape (2, {n}), got {ZW.shape}")
        Z, W = ZW
        X = np.zeros((self.N, self.N), dtype=complex)
        X[0, 1 : n + 1] = Z
        X[0, n + 2 :] = W
        X[1 : n + 1, 0] = -Z.conj()
        X[1 : n + 1, n + 1] = W
        X[n + 1, 1 : n + 1] = -W.conj()
        X[n + 1, n + 2 :] = Z.conj()
        X[n + 2 :, 0] = -W.conj()
        X[n + 2 :, n + 1] = -Z
        return X

    def m_coords(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.N, self.N):
            raise ValueError(f"expected {self.N}x{self.N} matrix, got {X.shape}")
        n = self.n
        return np.array([X[0, 1 : n + 1], X[0, n + 2 :]])

    def _point_from_matrix(self, g):
        n = self.n
        p, r = g[: n + 1, 0], g[n + 1 :, 0]
        return HomogeneousPoint(self.name, np.column_stack([p.real, p.imag, r.real, r.imag]))

    def align(self, p):
        q = np.asarray(p.coords, dtype=float)
        mags = np.linalg.norm(q, axis=1)
        idx = np.flatnonzero(mags > POINT_TOL)
        if idx.size == 0:
            return p
        lam = qconj(q[idx[0]]) / mags[idx[0]]
        return HomogeneousPoint(self.name, qmul(lam, q))

    def distance(self, p, q):
        v = np.asarray(p.coords, dtype=float)
        w = np.asarray(q.coords, dtype=float)
        m = int(np.argmax(np.linalg.norm(v, axis=1)))
        lv = qconj(v[m]) / np.linalg.norm(v[m])
        nw = np.linalg.norm(w[m])
        lw = qconj(w[m]) / nw if nw > 0 else np.array([1.0, 0, 0, 0])
        return float(np.linalg.norm(qmul(lv, v) - qmul(lw, w)))

    def random_algebra(self, rng, scale=1.0):
        m = self.n + 1
        A = _skew(rng, m, scale, complex_=True)
        B = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        B = scale * (B + B.T) / 2.0
        return np.block([[A, B], [-B.conj(), A.conj()]])


class EuclideanType(SymmetricSpace):
    """R^n = SE(n)/SO(n) as (n+1)x(n+1) affine matrices ``[[R, v], [0, 1]]``.

    The tangent part ``m`` is the translation column, an abelian ideal on
    which ``k = so(n)`` acts by matrix multiplication.
    """

    name = "euclidean"
    kind = GroupKind.AFFINE

    @property
    def N(self) -> int:
        return self.n + 1

    @property
    def m_dim(self) -> int:
        return self.n

    def _build_m_mask(self):
        mask = np.zeros((self.N, self.N), dtype=bool)
        mask[:-1, -1] = True
        return mask

    def m_from_coords(self, coords) -> np.ndarray:
        v = np.asarray(coords)
        if v.shape != (self.n,):
            raise ValueError(f"Euclidean chart expects shape ({self.n},), got {v.shape}")
        if np.iscomplexobj(v) and np.any(v.imag != 0):
            raise ValueError("Euclidean chart coordinates must be real")
        X = np.zeros((self.N, self.N), dtype=complex)
        X[:-1, -1] = v.real
        return X

    def m_coords(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.shape != (self.N, self.N):
            raise ValueError(f"expected {self.N}x{self.N} matrix, got {X.shape}")
        return np.asarray(X[:-1, -1].real, dtype=float)

    def _point_from_matrix(self, g):
        return HomogeneousPoint(self.name, g[:-1, -1].real.copy())

    def random_algebra(self, rng, scale=1.0):
        X = np.zeros((self.N, self.N), dtype=complex)
        X[:-1, :-1] = _skew(rng, self.n, scale)
        X[:-1, -1] = scale * rng.normal(size=self.n)
        return X


SPACES = {
    "sphere": Sphere,
    "cpn": ComplexProjective,
    "hpn": QuaternionProjective,
    "euclidean": EuclideanType,
}


def make_space(name: str, n: int) -> SymmetricSpace:
    try:
        cls = SPACES[name]
    except KeyError:
        raise KeyError(f"unknown space {name!r}; choose from {sorted(SPACES)}") from None
    return cls(n)
