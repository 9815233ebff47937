"""Harmonic, biharmonic and integrability residuals for maps of plane domains.

A lift ``psi`` of a map from ``(Omega, mu^2 g_0)`` into G/K gives
``psi^{-1} dpsi = A_x dx + A_y dy``.  Fields are supplied as callables
returning dictionaries of partial derivatives keyed by ``""``, ``"x"``,
``"y"``, ``"xx"``, ``"xy"``, ``"yy"``, ``"xxx"``, ``"xxy"``, ``"xyy"`` and
``"yyy"``; the conformal factor ``mu`` returns the keys through order 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from collections.abc import Mapping
from typing import Callable

import numpy as np

from .curves import ANALYTIC, FINITE_DIFFERENCE, CurveFamily
from .integrator import Method, solve_lift_two_sided
from .liealg import GroupElement, bracket, expm, norm
from .spaces import HomogeneousPoint, SymmetricSpace

PARTIALS = ("", "x", "y", "xx", "xy", "yy", "xxx", "xxy", "xyy", "yyy")
MU_PARTIALS = ("", "x", "y", "xx", "xy", "yy")
PLANAR_FD_STEP = 1e-2
SEPARABLE_TOL = 1e-10

# 1-D stencils on offsets -2..2: fourth order for first and second
# derivatives, second order for the third derivative.
_STENCILS = {
    0: np.array([0.0, 0.0, 1.0, 0.0, 0.0]),
    1: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    2: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    3: np.array([-0.5, 1.0, 0.0, -1.0, 0.5]),
}
_OFFSETS = np.arange(-2, 3)


def fd_partials(f: Callable, x: float, y: float, h: float = PLANAR_FD_STEP, keys=PARTIALS) -> dict:
    """Tensor-product finite-difference partials of ``f(x, y)``."""
    cache = {}

    def val(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = np.asarray(f(x + i * h, y + j * h), dtype=complex)
        return cache[(i, j)]

    out = {}
    for key in keys:
        nx, ny = key.count("x"), key.count("y")
        wx, wy = _STENCILS[nx], _STENCILS[ny]
        acc = 0
        for a, i in zip(wx, _OFFSETS):
            if a == 0:
                continue
            for b, j in zip(wy, _OFFSETS):
                if b == 0:
                    continue
                acc = acc + (a * b) * val(i, j)
        out[key] = acc / h ** (nx + ny)
    return out


def unit_mu(x, y) -> dict:
    return {"": 1.0, "x": 0.0, "y": 0.0, "xx": 0.0, "xy": 0.0, "yy": 0.0}


@dataclass(frozen=True, eq=False)
class PlanarFieldPair:
    model: SymmetricSpace
    Ax: Callable[[float, float], dict]
    Ay: Callable[[float, float], dict]
    mu: Callable[[float, float], dict] = unit_mu
    horizontal: bool = False
    separable: bool = False
    provenance: str = ANALYTIC
    label: str = ""

    @classmethod
    def from_values(cls, model, ax, ay, mu=None, step: float = PLANAR_FD_STEP, **kw) -> "PlanarFieldPair":
        """Fields known only by value; partials by finite differences."""

        def wrap(f):
            return lambda x, y: fd_partials(f, x, y, step)

        mu_fn = unit_mu if mu is None else (lambda x, y: fd_partials(mu, x, y, step, MU_PARTIALS))
        return cls(model, wrap(ax), wrap(ay), mu_fn, provenance=FINITE_DIFFERENCE, **kw)

    def split(self, x: float, y: float):
        """Partials of ``(A_x,k, A_x,m, A_y,k, A_y,m)``."""
        P = self.model
        ax, ay = self.Ax(x, y), self.Ay(x, y)
        return (
            {k: P.proj_k(v) for k, v in ax.items()},
            {k: P.proj_m(v) for k, v in ax.items()},
            {k: P.proj_k(v) for k, v in ay.items()},
            {k: P.proj_m(v) for k, v in ay.items()},
        )

    def horizontality_defect(self, x: float, y: float) -> float:
        xk, _, yk, _ = self.split(x, y)
        return norm(xk[""]) + norm(yk[""])


def _bk(A, B, d):
    """Partial ``d`` (``""``, one or two letters) of ``[A, B]``."""
    if d == "":
        return bracket(A[""], B[""])
    if len(d) == 1:
        return bracket(A[d], B[""]) + bracket(A[""], B[d])
    a, b = d
    key = "".join(sorted(d))
    return (
        bracket(A[key], B[""])
        + bracket(A[a], B[b])
        + bracket(A[b], B[a])
        + bracket(A[""], B[key])
    )


def _require(fields: PlanarFieldPair, allow_fd: bool):
    if fields.provenance != ANALYTIC and not allow_fd:
        raise ValueError("fields have finite-difference partials and the fallback is disabled")


def harmonic_residual_planar(fields: PlanarFieldPair, point) -> np.ndarray:
    """``dA_x,m/dx + dA_y,m/dy + [A_x,k, A_x,m] + [A_y,k, A_y,m]`` (without the ``mu^-2`` factor)."""
    x, y = point
    xk, xm, yk, ym = fields.split(x, y)
    return xm["x"] + ym["y"] + _bk(xk, xm, "") + _bk(yk, ym, "")


def tension_planar(fields: PlanarFieldPair, point) -> np.ndarray:
    """Harmonic residual including the conformal prefactor ``mu^-2``."""
    mu = fields.mu(*point)[""]
    return harmonic_residual_planar(fields, point) / mu**2


def _check_separable(fields, xm, ym):
    if not fields.separable:
        return
    P, Q = xm, ym
    cross = norm(bracket(bracket(Q["y"], P[""]), P[""])) + norm(bracket(bracket(P["x"], Q[""]), Q[""]))
    scale = max(1.0, norm(P[""]) * norm(Q[""])) * max(1.0, norm(P["x"]) + norm(Q["y"]))
    if cross > SEPARABLE_TOL * scale:
        raise ValueError(f"separable fields have non-vanishing cross terms ({cross:.3e}); are P and Q commuting?")


def biharmonic_residual_planar(fields: PlanarFieldPair, point, allow_fd: bool = True) -> np.ndarray:
    """Full bitension expression including the conformal factor ``mu``.

    ``-mu^-2 Lap(mu^-2 h) + mu^-4 ([[h, A_x,m], A_x,m] + [[h, A_y,m], A_y,m])``
    where ``h`` is the unscaled harmonic residual.
    """
    _require(fields, allow_fd)
    x, y = point
    xk, xm, yk, ym = fields.split(x, y)
    _check_separable(fields, xm, ym)
    h = {
        "": xm["x"] + ym["y"] + _bk(xk, xm, "") + _bk(yk, ym, ""),
        "x": xm["xx"] + ym["xy"] + _bk(xk, xm, "x") + _bk(yk, ym, "x"),
        "y": xm["xy"] + ym["yy"] + _bk(xk, xm, "y") + _bk(yk, ym, "y"),
        "xx": xm["xxx"] + ym["xxy"] + _bk(xk, xm, "xx") + _bk(yk, ym, "xx"),
        "yy": xm["xyy"] + ym["yyy"] + _bk(xk, xm, "yy") + _bk(yk, ym, "yy"),
    }
    m = fields.mu(x, y)
    mu = m[""]
    g = mu**-2
    gx, gy = -2 * mu**-3 * m["x"], -2 * mu**-3 * m["y"]
    gxx = 6 * mu**-4 * m["x"] ** 2 - 2 * mu**-3 * m["xx"]
    gyy = 6 * mu**-4 * m["y"] ** 2 - 2 * mu**-3 * m["yy"]
    lap_gh = (gxx + gyy) * h[""] + 2 * (gx * h["x"] + gy * h["y"]) + g * (h["xx"] + h["yy"])
    curv = bracket(bracket(h[""], xm[""]), xm[""]) + bracket(bracket(h[""], ym[""]), ym[""])
    return -g * lap_gh + g**2 * curv


def biharmonic_residual_planar_horizontal(fields: PlanarFieldPair, point, allow_fd: bool = True) -> np.ndarray:
    """Closed form for horizontal lifts written in ``P = A_x,m``, ``Q = A_y,m``:

    ``-Lap(mu^-2 (P_x + Q_y)) + [[mu^-2 (P_x + Q_y), P], P] + [[.., Q], Q]``,

    which for ``mu = 1`` reads
    ``-P_xxx - P_xyy - Q_xxy - Q_yyy + [[P_x + Q_y, P], P] + [[P_x + Q_y, Q], Q]``.
    The k-parts of the fields are ignored.
    """
    _require(fields, allow_fd)
    x, y = point
    _, P, _, Q = fields.split(x, y)
    _check_separable(fields, P, Q)
    m = fields.mu(x, y)
    mu = m[""]
    d = P["x"] + Q["y"]
    if all(m[k] == 0 for k in ("x", "y", "xx", "yy")) and mu == 1:
        lap = P["xxx"] + P["xyy"] + Q["xxy"] + Q["yyy"]
        return -lap + bracket(bracket(d, P[""]), P[""]) + bracket(bracket(d, Q[""]), Q[""])
    dx, dy = P["xx"] + Q["xy"], P["xy"] + Q["yy"]
    dlap = P["xxx"] + Q["xxy"] + P["xyy"] + Q["yyy"]
    g = mu**-2
    gx, gy = -2 * mu**-3 * m["x"], -2 * mu**-3 * m["y"]
    gxx = 6 * mu**-4 * m["x"] ** 2 - 2 * mu**-3 * m["xx"]
    gyy = 6 * mu**-4 * m["y"] ** 2 - 2 * mu**-3 * m["yy"]
    lap_gd = (gxx + gyy) * d + 2 * (gx * dx + gy * dy) + g * dlap
    gd = g * d
    return -lap_gd + bracket(bracket(gd, P[""]), P[""]) + bracket(bracket(gd, Q[""]), Q[""])


def integrability_residuals(fields: PlanarFieldPair, point) -> tuple[np.ndarray, np.ndarray]:
    """k- and m-components of ``d alpha + 1/2 [alpha ^ alpha]`` (coefficient of ``dx ^ dy``)."""
    x, y = point
    xk, xm, yk, ym = fields.split(x, y)
    Rk = -xk["y"] + yk["x"] + bracket(xk[""], yk[""]) + bracket(xm[""], ym[""])
    Rm = -xm["y"] + ym["x"] + bracket(xk[""], ym[""]) + bracket(xm[""], yk[""])
    return Rk, Rm


# --- grids -------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    x0: float = -1.0
    x1: float = 1.0
    nx: int = 21
    y0: float = -1.0
    y1: float = 1.0
    ny: int = 21

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grids need at least 3 samples per axis")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("grid rectangle must have positive extent")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y0, self.y1, self.ny)

    def points(self, interior: bool = False):
        xs, ys = self.xs, self.ys
        if interior:
            xs, ys = xs[1:-1], ys[1:-1]
        return [(float(x), float(y)) for x in xs for y in ys]


def grid_norms(fields: PlanarFieldPair, grid: GridSpec, kind: str, allow_fd: bool = True) -> np.ndarray:
    """Residual norms over the grid; boundary rows are dropped for
    finite-difference fields."""
    pts = grid.points(interior=fields.provenance != ANALYTIC)
    if kind == "harmonic":
        vals = [norm(harmonic_residual_planar(fields, p)) for p in pts]
    elif kind == "biharmonic":
        vals = [norm(biharmonic_residual_planar(fields, p, allow_fd)) for p in pts]
    elif kind == "integrability-k":
        vals = [norm(integrability_residuals(fields, p)[0]) for p in pts]
    elif kind == "integrability-m":
        vals = [norm(integrability_residuals(fields, p)[1]) for p in pts]
    else:
        raise ValueError(f"unknown residual kind {kind!r}")
    return np.array(vals)


# --- separable solutions ----------------------------------------------------


def cubic_phase(a: float, b: float, c: float, s: float) -> float:
    """``(a/3) s^3 + (b/2) s^2 + c s``."""
    return a / 3 * s**3 + b / 2 * s**2 + c * s


class _ScaledPartials(Mapping):
    """Partials of ``(a s^2 + b s + c) X`` in the variable ``var``, built on demand."""

    def __init__(self, a, b, c, s, X, var):
        self._vals = (a * s * s + b * s + c, 2 * a * s + b, 2 * a, 0.0)
        self._X, self._other = X, "y" if var == "x" else "x"

    def __getitem__(self, key):
        if key not in PARTIALS:
            raise KeyError(key)
        return (0.0 if self._other in key else self._vals[len(key)]) * self._X

    def __iter__(self):
        return iter(PARTIALS)

    def __len__(self):
        return len(PARTIALS)


@dataclass(frozen=True, eq=False)
class SeparableMap:
    model: SymmetricSpace
    X: np.ndarray
    Y: np.ndarray
    coeffs: tuple
    x0: GroupElement
    fields: PlanarFieldPair = field(repr=False)

    def exponent(self, x: float, y: float) -> np.ndarray:
        a1, b1, c1, a2, b2, c2 = self.coeffs
        return cubic_phase(a1, b1, c1, x) * self.X + cubic_phase(a2, b2, c2, y) * self.Y

    def psi(self, x: float, y: float) -> GroupElement:
        return self.x0 @ expm(self.exponent(x, y), self.model.kind)

    def phi(self, x: float, y: float) -> HomogeneousPoint:
        return self.model.project_point(self.psi(x, y))


def build_separable_map(model: SymmetricSpace, X, Y, coeffs, x0=None) -> SeparableMap:
    """``psi(x, y) = x0 exp(d_x X + d_y Y)`` for a commuting pair ``X, Y`` in m.

    The fields are ``P = (a1 x^2 + b1 x + c1) X`` and
    ``Q = (a2 y^2 + b2 y + c2) Y``; the caller supplies the commuting pair.
    """
    X = model.check_algebra(X)
    Y = model.check_algebra(Y)
    for name, Z in (("X", X), ("Y", Y)):
        if norm(model.proj_k(Z)) > 1e-12 * max(1.0, norm(Z)):
            raise ValueError(f"{name} does not lie in m")
    if norm(bracket(X, Y)) > 1e-12 * max(1.0, norm(X) * norm(Y)):
        raise ValueError("X and Y do not commute")
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) != 6:
        raise ValueError("expected six coefficients (a1, b1, c1, a2, b2, c2)")
    a1, b1, c1, a2, b2, c2 = coeffs
    if x0 is None:
        x0 = model.identity()
    elif not isinstance(x0, GroupElement):
        x0 = GroupElement(x0, model.kind)

    fields = PlanarFieldPair(
        model,
        lambda x, y: _ScaledPartials(a1, b1, c1, x, X, "x"),
        lambda x, y: _ScaledPartials(a2, b2, c2, y, Y, "y"),
        horizontal=True,
        separable=True,
        label="separable",
    )
    return SeparableMap(model, X, Y, coeffs, x0, fields)


def pullback_fields(model: SymmetricSpace, psi: Callable, h: float = 1e-3, step: float = PLANAR_FD_STEP) -> PlanarFieldPair:
    """Fields ``A_x = psi^{-1} dpsi/dx``, ``A_y = psi^{-1} dpsi/dy`` of a lift
    known only by value, by fourth-order central differences."""

    def mat(x, y):
        g = psi(x, y)
        return g.matrix if isinstance(g, GroupElement) else np.asarray(g, dtype=complex)

    def ax(x, y):
        d = (mat(x - 2 * h, y) - 8 * mat(x - h, y) + 8 * mat(x + h, y) - mat(x + 2 * h, y)) / (12 * h)
        return np.linalg.solve(mat(x, y), d)

    def ay(x, y):
        d = (mat(x, y - 2 * h) - 8 * mat(x, y - h) + 8 * mat(x, y + h) - mat(x, y + 2 * h)) / (12 * h)
        return np.linalg.solve(mat(x, y), d)

    return PlanarFieldPair.from_values(model, ax, ay, step=step, label="pullback")


def integrate_planar_lift(
    fields: PlanarFieldPair, grid: GridSpec, x0=None, h: float = 1e-3, method=Method.RKMK4, drift_every: int = 10
):
    """Reconstruct ``psi`` on the grid from its fields by integrating along
    the x-axis from the origin, then along vertical lines.

    The origin must lie in the grid rectangle.  Returns an array of group
    matrices of shape ``(nx, ny, N, N)``.
    """
    model = fields.model
    x0 = model.identity() if x0 is None else x0

    def along_x(y):
        return _LineFamily(model, lambda t: fields.Ax(t, y)[""])

    def along_y(x):
        return _LineFamily(model, lambda t: fields.Ay(x, t)[""])

    base = solve_lift_two_sided(along_x(0.0), x0, (grid.x0, grid.x1), h, method, drift_every=drift_every)
    out = np.empty((grid.nx, grid.ny, model.N, model.N), dtype=complex)
    for i, x in enumerate(grid.xs):
        g = base.psi[int(np.argmin(np.abs(base.times - x)))]
        col = solve_lift_two_sided(
            along_y(float(x)), GroupElement(g, model.kind), (grid.y0, grid.y1), h, method, drift_every=drift_every
        )
        for j, y in enumerate(grid.ys):
            out[i, j] = col.psi[int(np.argmin(np.abs(col.times - y)))]
    return out


@dataclass(frozen=True, eq=False)
class _LineFamily(CurveFamily):
    """Restriction of a field to a coordinate line; values only."""

    model: SymmetricSpace
    fn: Callable[[float], np.ndarray]

    def value(self, t):
        return np.asarray(self.fn(t), dtype=complex)
