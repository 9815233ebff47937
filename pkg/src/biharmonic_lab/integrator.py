"""Lie-group integrators for the lift equation ``psi' = psi F(t)``.

Every step multiplies on the right by the exponential of an algebra-valued
increment, so the trajectory stays on the group up to round-off in the
exponential.  Drift from the group is monitored, and only corrected when
explicitly requested.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .curves import CurveFamily, SampledCurve
from .liealg import GroupElement, bracket, constraint_residual
from .spaces import HomogeneousPoint


class Method(str, enum.Enum):
    LIE_EULER = "lie-euler"
    LIE_MIDPOINT = "lie-midpoint"
    RKMK4 = "rk-mk4"


NOMINAL_ORDER = {Method.LIE_EULER: 1, Method.LIE_MIDPOINT: 2, Method.RKMK4: 4}


class DriftError(RuntimeError):
    def __init__(self, step: int, t: float, drift: float, tol: float, partial=None):
        self.step, self.t, self.drift, self.tol = step, t, drift, tol
        self.partial = partial
        super().__init__(f"group drift {drift:.3e} exceeds {tol:.1e} at step {step} (t = {t:.9g})")


@dataclass(frozen=True)
class IntegratorConfig:
    method: Method = Method.RKMK4
    steps: int = 1000
    drift_every: int = 1
    drift_tol: float = 1e-8
    repair: bool = False

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.steps < 1:
            raise ValueError("step count must be at least 1")
        if self.drift_every < 1:
            raise ValueError("drift-check cadence must be at least 1")
        if not self.drift_tol > 0:
            raise ValueError("drift tolerance must be positive")


@dataclass(frozen=True, eq=False)
class LiftTrajectory:
    times: np.ndarray
    psi: np.ndarray  # (samples, N, N)
    points: list[HomogeneousPoint]
    drift: np.ndarray  # NaN at unchecked samples
    family: CurveFamily | None = None

    def element(self, i: int) -> GroupElement:
        return GroupElement(self.psi[i], self.family.model.kind)

    def __len__(self) -> int:
        return self.times.size


def drift(g, kind=None) -> float:
    """Norm of the defining-constraint residual of a group element."""
    if isinstance(g, GroupElement):
        return g.drift()
    if kind is None:
        raise ValueError("a raw matrix needs an explicit group kind")
    return constraint_residual(g, kind)


def _dexpinv(theta, A):
    # right-trivialised inverse differential, truncated after ad^2
    c = bracket(theta, A)
    return A + 0.5 * c + bracket(theta, c) / 12.0


def increment(fam: CurveFamily, t: float, h: float, method: Method) -> np.ndarray:
    """Algebra element ``Theta`` with ``psi(t + h) ~ psi(t) exp(Theta)``."""
    F = fam.value
    if method is Method.LIE_EULER:
        return h * F(t)
    if method is Method.LIE_MIDPOINT:
        return h * F(t + h / 2)
    Fh = F(t + h / 2)
    u1 = h * F(t)
    u2 = h * _dexpinv(u1 / 2, Fh)
    u3 = h * _dexpinv(u2 / 2, Fh)
    u4 = h * _dexpinv(u3, F(t + h))
    return (u1 + 2 * u2 + 2 * u3 + u4) / 6.0


def _polar(g):
    U, _, Vh = np.linalg.svd(g)
    return U @ Vh


def solve_lift(
    fam: CurveFamily,
    x=None,
    t_range: tuple[float, float] = (0.0, 1.0),
    cfg: IntegratorConfig | None = None,
) -> LiftTrajectory:
    """Integrate ``psi^{-1} psi' = F(t)``, ``psi(t0) = x``, over ``t_range``.

    ``t1 < t0`` integrates backwards.  Raises :class:`DriftError` when a
    checked sample leaves the group by more than ``cfg.drift_tol``; the
    partial trajectory is attached to the exception.
    """
    cfg = cfg or IntegratorConfig()
    model = fam.model
    kind = model.kind
    if x is None:
        x = model.identity()
    g = x.matrix if isinstance(x, GroupElement) else np.asarray(x, dtype=complex)
    d0 = constraint_residual(g, kind)
    if d0 > cfg.drift_tol:
        raise ValueError(f"initial value violates the {kind.value} constraint ({d0:.3e})")
    t0, t1 = map(float, t_range)
    h = (t1 - t0) / cfg.steps
    times = t0 + h * np.arange(cfg.steps + 1)
    times[-1] = t1
    psi = np.empty((cfg.steps + 1, model.N, model.N), dtype=complex)
    drifts = np.full(cfg.steps + 1, np.nan)
    psi[0] = g
    drifts[0] = d0
    repairable = kind.value in ("orthogonal", "special-unitary", "symplectic-unitary")
    for i in range(cfg.steps):
        g = g @ scipy.linalg.expm(increment(fam, times[i], h, cfg.method))
        if cfg.repair and repairable:
            g = _polar(g)
        psi[i + 1] = g
        if (i + 1) % cfg.drift_every == 0 or i + 1 == cfg.steps:
            d = constraint_residual(g, kind)
            drifts[i + 1] = d
            if d > cfg.drift_tol:
                partial = _trajectory(fam, times[: i + 2], psi[: i + 2], drifts[: i + 2])
                raise DriftError(i + 1, times[i + 1], d, cfg.drift_tol, partial)
    return _trajectory(fam, times, psi, drifts)


def _trajectory(fam, times, psi, drifts):
    model = fam.model
    points = [model._point_from_matrix(g) for g in psi]
    return LiftTrajectory(times.copy(), psi.copy(), points, drifts.copy(), fam)


def solve_lift_two_sided(
    fam, x, t_range, h, method=Method.RKMK4, drift_tol=1e-8, drift_every: int = 1
) -> LiftTrajectory:
    """Integrate outwards from ``t = 0`` (clamped into ``t_range``) in both
    directions with step close to ``h`` and stitch the two halves."""
    t0, t1 = map(float, t_range)
    mid = min(max(0.0, t0), t1)
    parts = []
    for end in (t0, t1):
        steps = max(1, int(round(abs(end - mid) / h)))
        if end == mid:
            parts.append(None)
            continue
        parts.append(solve_lift(fam, x, (mid, end), IntegratorConfig(method, steps, drift_every, drift_tol)))
    back, fwd = parts
    if back is None:
        return fwd
    if fwd is None:
        return LiftTrajectory(back.times[::-1], back.psi[::-1], back.points[::-1], back.drift[::-1], fam)
    return LiftTrajectory(
        np.concatenate([back.times[::-1], fwd.times[1:]]),
        np.concatenate([back.psi[::-1], fwd.psi[1:]]),
        back.points[::-1] + fwd.points[1:],
        np.concatenate([back.drift[::-1], fwd.drift[1:]]),
        fam,
    )


def pullback(traj: LiftTrajectory, derivative_spacing: float = 0.02) -> SampledCurve:
    """Recover ``F = psi^{-1} psi'`` from a trajectory on a uniform grid.

    ``psi'`` uses fourth-order central differences, so the two samples at
    each end are dropped.  Derivatives of the recovered family are taken
    over samples roughly ``derivative_spacing`` apart.
    """
    t = np.asarray(traj.times)
    if t.size < 5:
        raise ValueError(f"pullback needs at least 5 samples, got {t.size}")
    h = np.diff(t)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("pullback needs a uniform time grid")
    h = h[0]
    P = traj.psi
    dpsi = (P[:-4] - 8 * P[1:-3] + 8 * P[3:-1] - P[4:]) / (12 * h)
    inner = P[2:-2]
    F = np.linalg.solve(inner, dpsi)
    tt = t[2:-2]
    if h < 0:
        tt, F = tt[::-1], F[::-1]
    stride = max(1, int(round(derivative_spacing / abs(h))))
    stride = min(stride, max(1, (tt.size - 1) // 6))
    return SampledCurve(traj.family.model, tt, F, stride, label="pullback")
