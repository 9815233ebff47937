"""Frenet-Serret data for unit-speed plane and space curves, and the
classification of biharmonic tangent curves in S^1 and S^2.

A unit-speed curve ``p`` has tangent curve ``u = p'``.  Its horizontal lift
into the sphere model is biharmonic exactly when the curvature is constant
and either vanishes or satisfies ``kappa^2 + tau^2 = 1`` (``kappa = +-1`` in
the plane).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curves import ANALYTIC, FINITE_DIFFERENCE, local_polynomial_derivatives

SPEED_TOL = 1e-8
SAMPLED_SPEED_TOL = 1e-4
CURVATURE_FLOOR = 1e-10
CONSTANCY_TOL = {ANALYTIC: 1e-7, FINITE_DIFFERENCE: 1e-4}


class Verdict(str, enum.Enum):
    HARMONIC_LINE = "harmonic-line"
    BIHARMONIC = "biharmonic"
    NOT_BIHARMONIC = "not-biharmonic"


class SpeedError(ValueError):
    """Input curve is not parametrised by arc length."""

    def __init__(self, speed_min: float, speed_max: float, tol: float):
        self.speed_min, self.speed_max = speed_min, speed_max
        super().__init__(
            f"curve is not unit speed: |p'| in [{speed_min:.9g}, {speed_max:.9g}] (tolerance {tol:g})"
        )


@dataclass(frozen=True, eq=False)
class FrenetData:
    s: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray | None
    frames: np.ndarray  # (samples, k, ambient): rows e_1, e_2(, e_3)
    provenance: str = ANALYTIC

    @property
    def ambient(self) -> int:
        return self.frames.shape[-1]

    def orthonormality_defect(self) -> float:
        E = self.frames
        G = np.einsum("sik,sjk->sij", E, E)
        return float(np.abs(G - np.eye(E.shape[1])).max())


def _rot90(v):
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def _speed_check(d1, tol):
    speed = np.linalg.norm(d1, axis=-1)
    if np.abs(speed - 1.0).max() > tol:
        raise SpeedError(float(speed.min()), float(speed.max()), tol)


def _jets(p: Callable, s: Sequence[float], order: int):
    cols = [[] for _ in range(order + 1)]
    for si in s:
        J = p(si)
        for k in range(order + 1):
            cols[k].append(np.asarray(J[k], dtype=float))
    return [np.array(c) for c in cols]


def _plane(d1, d2, s, provenance, tol):
    _speed_check(d1, tol)
    e1 = d1
    e2 = _rot90(e1)
    kappa = np.einsum("si,si->s", d2, e2)
    return FrenetData(np.asarray(s, dtype=float), kappa, None, np.stack([e1, e2], axis=1), provenance)


def _space(d1, d2, d3, s, provenance, tol):
    _speed_check(d1, tol)
    e1 = d1
    kappa = np.linalg.norm(d2, axis=-1)
    if kappa.min() <= CURVATURE_FLOOR:
        raise ValueError(f"curvature vanishes (min {kappa.min():.3e}); torsion is undefined")
    e2 = d2 / kappa[:, None]
    e3 = np.cross(e1, e2)
    # e3' = (e1 x p''')/kappa - (kappa'/kappa) e3, and tau = -<e3', e2>
    kappa1 = np.einsum("si,si->s", d2, d3) / kappa
    e3p = np.cross(e1, d3) / kappa[:, None] - (kappa1 / kappa)[:, None] * e3
    tau = -np.einsum("si,si->s", e3p, e2)
    return FrenetData(np.asarray(s, dtype=float), kappa, tau, np.stack([e1, e2, e3], axis=1), provenance)


def frenet_plane(p: Callable, s: Sequence[float], tol: float = SPEED_TOL) -> FrenetData:
    """Signed curvature ``<e_1', e_2>`` with ``e_2`` the +90 degree rotation of ``e_1``.

    ``p`` maps arc length to the jet ``(p, p', p'')``.
    """
    _, d1, d2 = _jets(p, s, 2)
    return _plane(d1, d2, s, ANALYTIC, tol)


def frenet_space(p: Callable, s: Sequence[float], tol: float = SPEED_TOL) -> FrenetData:
    """Curvature ``|e_1'|`` and torsion ``-<e_3', e_2>``; ``p`` returns ``(p, p', p'', p''')``."""
    _, d1, d2, d3 = _jets(p, s, 3)
    return _space(d1, d2, d3, s, ANALYTIC, tol)


def frenet_from_tangent(u: Callable, s: Sequence[float], tol: float = SPEED_TOL) -> FrenetData:
    """Frenet data from the tangent curve jet ``(u, u', u'')`` alone."""
    u0, u1, u2 = _jets(u, s, 2)
    if u0.shape[1] == 2:
        return _plane(u0, u1, s, ANALYTIC, tol)
    return _space(u0, u1, u2, s, ANALYTIC, tol)


def frenet_sampled(s, P, tangent: bool = False, tol: float = SAMPLED_SPEED_TOL) -> FrenetData:
    """Frenet data from samples ``P[i]`` taken at arc lengths ``s[i]``.

    Derivatives come from 7-point local polynomial fits.  With
    ``tangent=True`` the samples are the unit tangent ``u = p'`` itself.
    """
    s = np.asarray(s, dtype=float)
    P = np.asarray(P, dtype=float)
    if s.size < 7:
        raise ValueError(f"need at least 7 samples, got {s.size}")
    if np.any(np.diff(s) <= 0):
        raise ValueError("arc-length column must be strictly increasing")
    if P.ndim != 2 or P.shape[1] not in (2, 3):
        raise ValueError("samples must be plane or space points")
    ders = [local_polynomial_derivatives(s, P, si) for si in s]
    d = [np.array([row[k] for row in ders]) for k in range(4)]
    if tangent:
        d1, d2, d3 = d[0], d[1], d[2]
    else:
        d1, d2, d3 = d[1], d[2], d[3]
    if P.shape[1] == 2:
        return _plane(d1, d2, s, FINITE_DIFFERENCE, tol)
    return _space(d1, d2, d3, s, FINITE_DIFFERENCE, tol)


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    kappa_mean: float
    kappa_deviation: float
    tau_mean: float | None = None
    tau_deviation: float | None = None
    failed: str | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "kappa_mean": self.kappa_mean,
            "kappa_deviation": self.kappa_deviation,
            "tau_mean": self.tau_mean,
            "tau_deviation": self.tau_deviation,
            "failed": self.failed,
        }


def classify_biharmonic_tangent(data: FrenetData, ambient: int | None = None, tol: float | None = None) -> Classification:
    ambient = data.ambient if ambient is None else ambient
    if ambient not in (2, 3):
        raise ValueError(f"ambient dimension must be 2 or 3, got {ambient}")
    tol = CONSTANCY_TOL[data.provenance] if tol is None else tol
    k = np.asarray(data.kappa, dtype=float)
    km = float(k.mean())
    kdev = float(np.abs(k - km).max())
    result = dict(kappa_mean=km, kappa_deviation=kdev)
    if ambient == 3 and data.tau is not None:
        tt = np.asarray(data.tau, dtype=float)
        result.update(tau_mean=float(tt.mean()), tau_deviation=float(np.abs(tt - tt.mean()).max()))

    if kdev > tol:
        return Classification(Verdict.NOT_BIHARMONIC, failed="curvature is not constant", **result)
    if abs(km) <= tol:
        return Classification(Verdict.HARMONIC_LINE, **result)
    if ambient == 2:
        if abs(abs(km) - 1.0) <= tol:
            return Classification(Verdict.BIHARMONIC, **result)
        return Classification(Verdict.NOT_BIHARMONIC, failed="curvature is not 0, 1 or -1", **result)
    if data.tau is None:
        raise ValueError("space classification needs torsion")
    if result["tau_deviation"] > tol:
        return Classification(Verdict.NOT_BIHARMONIC, failed="torsion is not constant", **result)
    if abs(km**2 + result["tau_mean"] ** 2 - 1.0) > tol:
        return Classification(Verdict.NOT_BIHARMONIC, failed="kappa^2 + tau^2 != 1", **result)
    return Classification(Verdict.BIHARMONIC, **result)
