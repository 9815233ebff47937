"""Harmonic and biharmonic residuals of curves t -> F(t) in a Lie algebra.

``F = psi^{-1} dpsi/dt`` is the pulled-back Maurer-Cartan form of a lift
``psi`` of a curve into G/K.  With ``F = F_k + F_m`` the curve is harmonic
when ``H = F_m' + [F_k, F_m]`` vanishes and biharmonic when
``-H'' + [[H, F_m], F_m]`` vanishes.

The reduced residuals express the horizontal biharmonic equation in the
m-chart coordinates of the three rank-one models.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .liealg import bracket
from .spaces import SymmetricSpace

Jet = tuple  # (F, F', F'', F''')

ANALYTIC = "analytic"
FINITE_DIFFERENCE = "finite-difference"

# Relative step for finite-difference jets.  Third derivatives dominate the
# round-off budget: eps/h^3 with h = 5e-3 stays near 1e-9.
FD_STEP = 5e-3
FD_TOL = 1e-5


# --- vector-valued polynomial jets ----------------------------------------


@dataclass(frozen=True, eq=False)
class PolynomialJet:
    """``t -> sum_k coeffs[k] t^k`` with derivatives through order 3.

    ``coeffs`` has shape ``(degree + 1, *value_shape)``, lowest degree first.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs)
        if c.ndim < 1 or c.shape[0] == 0:
            raise ValueError("need at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, t: float) -> Jet:
        c = self.coeffs
        out = []
        for k in range(4):
            acc = np.zeros(c.shape[1:], dtype=c.dtype)
            for m in range(k, c.shape[0]):
                acc = acc + c[m] * (math.perm(m, k) * t ** (m - k))
            out.append(acc)
        return tuple(out)


def cubic_phase_jet(a: float, b: float, c: float, direction) -> Callable[[float], Jet]:
    """Jet of ``(a t^2 + b t + c) * direction``."""
    v = np.asarray(direction)
    return PolynomialJet(np.array([c * v, b * v, a * v]))


# --- curve families ---------------------------------------------------------


class CurveFamily:
    """A curve in the Lie algebra of ``model`` with derivatives through order 3."""

    model: SymmetricSpace
    provenance: str = ANALYTIC
    label: str = ""

    def jet(self, t: float) -> Jet:
        raise NotImplementedError

    def value(self, t: float) -> np.ndarray:
        return self.jet(t)[0]

    def shifted(self, s0: float) -> "CurveFamily":
        return ShiftedCurve(self, s0)

    def split_jet(self, t: float) -> tuple[Jet, Jet]:
        """``(k-part jet, m-part jet)``."""
        J = self.jet(t)
        return tuple(self.model.proj_k(d) for d in J), tuple(self.model.proj_m(d) for d in J)


@dataclass(frozen=True, eq=False)
class AnalyticCurve(CurveFamily):
    model: SymmetricSpace
    jet_fn: Callable[[float], Jet]
    label: str = ""
    provenance: str = field(default=ANALYTIC, init=False)

    def jet(self, t):
        return tuple(np.asarray(d, dtype=complex) for d in self.jet_fn(t))

    @classmethod
    def from_m_coords(cls, model: SymmetricSpace, coords_jet, label: str = "") -> "AnalyticCurve":
        """Horizontal family whose m-chart coordinates follow ``coords_jet``."""

        def jet(t):
            return tuple(model.m_from_coords(d) for d in coords_jet(t))

        return cls(model, jet, label)


@dataclass(frozen=True, eq=False)
class FiniteDifferenceCurve(CurveFamily):
    """Family known only through its values; derivatives by central differences.

    The step is ``FD_STEP * max(1, |t|)`` with one level of Richardson
    extrapolation on every stencil.
    """

    model: SymmetricSpace
    value_fn: Callable[[float], np.ndarray]
    step: float = FD_STEP
    label: str = ""
    provenance: str = field(default=FINITE_DIFFERENCE, init=False)

    def value(self, t):
        return np.asarray(self.value_fn(t), dtype=complex)

    def jet(self, t):
        f = self.value
        h0 = self.step * max(1.0, abs(t))

        def stencils(h):
            fp1, fm1 = f(t + h), f(t - h)
            fp2, fm2 = f(t + 2 * h), f(t - 2 * h)
            f0 = f(t)
            d1 = (fp1 - fm1) / (2 * h)
            d2 = (fp1 - 2 * f0 + fm1) / h**2
            d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h**3)
            return f0, d1, d2, d3

        f0, *coarse = stencils(h0)
        _, *fine = stencils(h0 / 2)
        return (f0, *[(4 * b - a) / 3 for a, b in zip(coarse, fine)])


def local_polynomial_derivatives(times, values, t, stride=1, npts=7, order=3):
    """Derivatives at ``t`` of the interpolating polynomial through ``npts``
    samples taken every ``stride`` indices around the sample nearest ``t``.

    The window is shifted inwards near the ends of the sample range.
    Returns a list of ``order + 1`` arrays.
    """
    times = np.asarray(times, dtype=float)
    M = times.size
    span = stride * (npts - 1)
    if span >= M:
        raise ValueError(f"need more than {span} samples for a {npts}-point stencil with stride {stride}")
    i = int(np.argmin(np.abs(times - t)))
    start = min(max(i - span // 2, 0), M - 1 - span)
    idx = start + stride * np.arange(npts)
    H = times[idx[-1]] - times[idx[0]]
    x = (times[idx] - t) / H
    V = np.vander(x, npts, increasing=True)
    vals = np.asarray(values)[idx]
    coef = np.linalg.solve(V, vals.reshape(npts, -1)).reshape((npts,) + vals.shape[1:])
    return [coef[k] * math.factorial(k) / H**k for k in range(order + 1)]


@dataclass(frozen=True, eq=False)
class SampledCurve(CurveFamily):
    """Family given by samples on a grid (e.g. a pulled-back trajectory).

    Values between samples come from 7-point local interpolation; derivatives
    from 7-point fits over every ``stride``-th sample, which keeps round-off
    amplification of the third derivative in check.
    """

    model: SymmetricSpace
    times: np.ndarray
    values: np.ndarray
    stride: int = 1
    label: str = ""
    provenance: str = field(default=FINITE_DIFFERENCE, init=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or v.shape[0] != t.size:
            raise ValueError("times and values must have matching first dimension")
        if t.size < 7:
            raise ValueError("a sampled family needs at least 7 samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def interior(self) -> tuple[float, float]:
        """Range where every derivative stencil is centred."""
        k = 3 * self.stride
        return self.times[k], self.times[-1 - k]

    def value(self, t):
        return local_polynomial_derivatives(self.times, self.values, t, 1, order=0)[0]

    def jet(self, t):
        d = local_polynomial_derivatives(self.times, self.values, t, self.stride)
        return (self.value(t), d[1], d[2], d[3])


@dataclass(frozen=True, eq=False)
class ShiftedCurve(CurveFamily):
    base: CurveFamily
    s0: float

    @property
    def model(self):
        return self.base.model

    @property
    def provenance(self):
        return self.base.provenance

    @property
    def label(self):
        return self.base.label

    def jet(self, t):
        return self.base.jet(t + self.s0)

    def value(self, t):
        return self.base.value(t + self.s0)


def jet_consistency(fam: CurveFamily, t: float, h: float = 1e-5) -> float:
    """Gap between the supplied F' and a central difference of F."""
    J = fam.jet(t)
    fd = (fam.value(t + h) - fam.value(t - h)) / (2 * h)
    return float(np.linalg.norm(J[1] - fd))


# --- residuals ---------------------------------------------------------------


def _require_derivatives(fam: CurveFamily, allow_fd: bool):
    if fam.provenance != ANALYTIC and not allow_fd:
        raise ValueError(
            f"family {fam.label or fam!r} has {fam.provenance} derivatives and the "
            "finite-difference fallback is disabled"
        )


def harmonic_expression(fam: CurveFamily, t: float) -> np.ndarray:
    (Fk, Fk1, *_), (Fm, Fm1, *_) = fam.split_jet(t)
    return Fm1 + bracket(Fk, Fm)


def harmonic_residual(fam: CurveFamily, t: float) -> np.ndarray:
    """``F_m' + [F_k, F_m]`` projected to m."""
    return fam.model.proj_m(harmonic_expression(fam, t))


def horizontal_biharmonic(Fm, Fm1, Fm3) -> np.ndarray:
    """``-F_m''' + [[F_m', F_m], F_m]`` for a horizontal lift."""
    return -Fm3 + bracket(bracket(Fm1, Fm), Fm)


def biharmonic_residual(
    fam: CurveFamily,
    t: float,
    allow_fd: bool = True,
    composite: str = "product",
) -> np.ndarray:
    """``-H'' + [[H, F_m], F_m]`` with ``H`` the harmonic expression.

    ``composite`` selects how ``H''`` is formed for families with a
    non-vanishing k-part: ``"product"`` expands it with the Leibniz rule
    from the jet of F, ``"difference"`` takes central differences of H.
    Horizontal families use the closed form directly.
    """
    _require_derivatives(fam, allow_fd)
    (Fk, Fk1, Fk2, _), (Fm, Fm1, Fm2, Fm3) = fam.split_jet(t)
    if not (Fk.any() or Fk1.any() or Fk2.any()):
        return horizontal_biharmonic(Fm, Fm1, Fm3)
    H = Fm1 + bracket(Fk, Fm)
    if composite == "product":
        H2 = Fm3 + bracket(Fk2, Fm) + 2 * bracket(Fk1, Fm1) + bracket(Fk, Fm2)
    elif composite == "difference":
        h = FD_STEP * max(1.0, abs(t))

        def d2(hh):
            return (
                harmonic_expression(fam, t + hh) - 2 * H + harmonic_expression(fam, t - hh)
            ) / hh**2

        H2 = (4 * d2(h / 2) - d2(h)) / 3
    else:
        raise ValueError(f"unknown composite mode {composite!r}")
    return -H2 + bracket(bracket(H, Fm), Fm)


def residual_norms(fam: CurveFamily, ts: Sequence[float], kind: str, allow_fd: bool = True) -> np.ndarray:
    """Frobenius norms of the harmonic or biharmonic residual over ``ts``."""
    if kind == "harmonic":
        f = harmonic_residual
    elif kind == "biharmonic":

        def f(fam_, t):
            return biharmonic_residual(fam_, t, allow_fd=allow_fd)

    else:
        raise ValueError(f"unknown residual kind {kind!r}")
    return np.array([np.linalg.norm(f(fam, t)) for t in ts])


# --- reduced residuals -------------------------------------------------------


def reduced_residual_sphere(u, t: float) -> np.ndarray:
    """``-u''' + <u', u> u - <u, u> u'`` for a tangent curve ``u`` in R^n.

    ``u`` maps ``t`` to the jet ``(u, u', u'', u''')``.
    """
    u0, u1, _, u3 = (np.asarray(d, dtype=float) for d in u(t))
    return -u3 + np.dot(u1, u0) * u0 - np.dot(u0, u0) * u1


def _herm(a, b):
    """``<a, b> = sum a_i conj(b_i)``."""
    return np.sum(a * np.conj(b))


def reduced_residual_cpn(z, t: float) -> np.ndarray:
    """Horizontal biharmonic residual in the chart of CP^n:
    ``-z''' + 2<z, z'> z - <z', z> z - <z, z> z'``.
    """
    z0, z1, _, z3 = (np.asarray(d, dtype=complex) for d in z(t))
    return -z3 + (2 * _herm(z0, z1) - _herm(z1, z0)) * z0 - _herm(z0, z0) * z1


def reduced_residual_cpn_components(z, t: float) -> np.ndarray:
    """Same residual written as explicit sums over components."""
    z0, z1, _, z3 = (np.asarray(d, dtype=complex) for d in z(t))
    zb, zb1 = z0.conj(), z1.conj()
    out = np.empty_like(z0)
    for i in range(z0.size):
        acc = -z3[i]
        for j in range(z0.size):
            acc += (z0[i] * zb1[j] - z1[i] * zb[j]) * z0[j] - z0[i] * (zb[j] * z1[j] - zb1[j] * z0[j])
        out[i] = acc
    return out


def reduced_residual_hpn(zw, t: float) -> np.ndarray:
    """Horizontal biharmonic residual in the ``(Z, W)`` chart of HP^n.

    ``zw`` maps ``t`` to jets of shape ``(2, n)``; the result has the same
    shape.  With ``s = 2<Z,Z'> + 2<W,W'> - <Z',Z> - <W',W>`` and
    ``e = <Z', conj W> - <W', conj Z>``::

        R_Z = -Z''' - (|Z|^2 + |W|^2) Z' + s Z - 3 e conj(W)
        R_W = -W''' - (|Z|^2 + |W|^2) W' + s W + 3 e conj(Z)
    """
    J = [np.asarray(d, dtype=complex) for d in zw(t)]
    (Z, W), (Z1, W1), (Z3, W3) = J[0], J[1], J[3]
    r2 = _herm(Z, Z).real + _herm(W, W).real
    s = 2 * _herm(Z, Z1) + 2 * _herm(W, W1) - _herm(Z1, Z) - _herm(W1, W)
    e = _herm(Z1, W.conj()) - _herm(W1, Z.conj())
    RZ = -Z3 - r2 * Z1 + s * Z - 3 * e * W.conj()
    RW = -W3 - r2 * W1 + s * W + 3 * e * Z.conj()
    return np.array([RZ, RW])
