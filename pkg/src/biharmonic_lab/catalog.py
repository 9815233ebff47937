"""Explicit harmonic and biharmonic families with their closed forms.

Each family is addressed by an identifier ``"<space>/<case>"``; planar
separable maps use ``"planar/separable"`` together with a target space.
Cubic-phase families share the phase ``d_t = (a/3) t^3 + (b/2) t^2 + c t``
and are harmonic exactly when ``a = b = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .curves import AnalyticCurve, CurveFamily, cubic_phase_jet, harmonic_residual, biharmonic_residual
from .integrator import Method, solve_lift_two_sided
from .liealg import GroupElement, norm
from .planar import (
    GridSpec,
    PlanarFieldPair,
    SeparableMap,
    build_separable_map,
    cubic_phase,
    integrate_planar_lift,
    grid_norms,
)
from .report import ResidualReport, ResidualSeries
from .spaces import HomogeneousPoint, SymmetricSpace, make_space

HARMONIC = "harmonic"
BIHARMONIC = "biharmonic"
NOT_BIHARMONIC = "not-biharmonic"

DEFAULT_TOLERANCES = {"harmonic": 1e-10, "biharmonic": 1e-8, "closed-form": 1e-7, "integrability": 1e-12}
DEFAULT_WINDOW = (-2.0, 2.0, 401)
DEFAULT_GRID = GridSpec()
CLOSED_FORM_STEP = 1e-3

_CUBIC = ("a", "b", "c")
_PLANAR = ("a1", "b1", "c1", "a2", "b2", "c2")


@dataclass(frozen=True)
class CaseInfo:
    params: tuple[str, ...]
    defaults: tuple[float, ...]
    n: int | None  # fixed dimension, or None when free
    default_n: int
    closed_form: bool
    planar: bool = False


CASES: dict[str, CaseInfo] = {
    "sphere/axis": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 3, True),
    "sphere/helix": CaseInfo(("a", "b"), (0.6, 0.8), 3, 3, False),
    "sphere/great-circle": CaseInfo(("a", "b"), (0.6, 0.8), 2, 2, True),
    "sphere/trig-ii": CaseInfo((), (), 2, 2, False),
    "sphere/trig-iii": CaseInfo((), (), 2, 2, False),
    "cpn/case-i": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 2, True),
    "cpn/case-ii": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 2, True),
    "cpn/case-iii": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 2, True),
    "hpn/case-i": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 2, True),
    "hpn/case-ii": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 2, True),
    "hpn/case-iii": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 2, True),
    "hpn/case-iv": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 2, True),
    "euclidean/poly": CaseInfo(_CUBIC, (0.5, -0.3, 1.0), None, 3, True),
    "planar/separable": CaseInfo(_PLANAR, (0.5, -0.3, 1.0, 0.2, 0.4, -0.7), None, 2, True, planar=True),
}

PLANAR_TARGETS = ("sphere", "cpn", "hpn", "euclidean")

# chart direction of the rank-one cases, as a function of n
_CPN_DIRECTIONS = {"case-i": 1.0, "case-ii": 1j, "case-iii": 1 + 1j}
_HPN_DIRECTIONS = {"case-i": (0, 1.0), "case-ii": (0, 1j), "case-iii": (1, 1.0), "case-iv": (1, 1j)}
# displayed quaternion factor (components 1, i, j, k) multiplying sin in the point formulas
_HPN_FACTORS = {
    "case-i": (-1.0, 0, 0, 0),
    "case-ii": (0, 1.0, 0, 0),
    "case-iii": (0, 0, -1.0, 0),
    "case-iv": (0, 0, 0, 1.0),
}


class UnknownFamilyError(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """A catalogued family with its parameters.

    ``family`` is an identifier such as ``"cpn/case-ii"``; for
    ``"planar/separable"`` the ``target`` space selects the model.
    ``index`` is the 1-based chart direction of ``sphere/axis``.
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)
    n: int | None = None
    index: int = 1
    x0: GroupElement | None = None
    target: str = "sphere"

    def __post_init__(self):
        if self.family not in CASES:
            raise UnknownFamilyError(f"unknown family {self.family!r}; choose from {sorted(CASES)}")
        info = CASES[self.family]
        unknown = set(self.params) - set(info.params)
        if unknown:
            raise ValueError(f"{self.family} has no parameter(s) {sorted(unknown)}; expected {list(info.params)}")
        full = dict(zip(info.params, info.defaults))
        for k, v in self.params.items():
            v = float(v)
            if not math.isfinite(v):
                raise ValueError(f"parameter {k} must be finite, got {v}")
            full[k] = v
        object.__setattr__(self, "params", full)
        n = info.default_n if self.n is None else int(self.n)
        if info.n is not None and n != info.n:
            raise ValueError(f"{self.family} is defined for n = {info.n} only")
        if n < 1:
            raise ValueError("n must be positive")
        if info.planar:
            if self.target not in PLANAR_TARGETS:
                raise UnknownFamilyError(f"unknown planar target {self.target!r}; choose from {list(PLANAR_TARGETS)}")
            if self.target == "euclidean" and n < 2:
                raise ValueError("planar maps into Euclidean space need n >= 2")
        object.__setattr__(self, "n", n)
        if not 1 <= self.index <= n:
            raise ValueError(f"direction index {self.index} outside 1..{n}")

    @property
    def space(self) -> str:
        return self.target if self.info.planar else self.family.split("/")[0]

    @property
    def case(self) -> str:
        return self.family.split("/")[1]

    @property
    def info(self) -> CaseInfo:
        return CASES[self.family]

    def model(self) -> SymmetricSpace:
        return make_space(self.space, self.n)

    def initial(self) -> GroupElement:
        return self.model().identity() if self.x0 is None else self.x0

    def coefficients(self) -> tuple[float, ...]:
        return tuple(self.params[k] for k in self.info.params)

    def label(self) -> str:
        base = f"{self.family}[{self.target}]" if self.info.planar else self.family
        args = ",".join(f"{k}={self.params[k]!r}" for k in self.info.params)
        return f"{base}(n={self.n}{',' + args if args else ''})"


def expected_verdict(spec: FamilySpec) -> str:
    p = spec.params
    if spec.family in ("sphere/trig-ii", "sphere/trig-iii"):
        return BIHARMONIC
    if spec.family == "sphere/great-circle":
        return HARMONIC
    if spec.family == "sphere/helix":
        if p["a"] == 0:
            return HARMONIC
        return BIHARMONIC if abs(p["a"] ** 2 + p["b"] ** 2 - 1) <= 1e-12 else NOT_BIHARMONIC
    if spec.info.planar:
        return HARMONIC if all(p[k] == 0 for k in ("a1", "b1", "a2", "b2")) else BIHARMONIC
    return HARMONIC if p["a"] == 0 and p["b"] == 0 else BIHARMONIC


# --- directions ---------------------------------------------------------------


def rank_one_direction(spec: FamilySpec) -> np.ndarray:
    """Unit-free chart direction ``v`` with ``F_m = D_t v``."""
    n, case = spec.n, spec.case
    if spec.space == "sphere":
        if spec.info.planar:
            return np.ones(n)
        v = np.zeros(n)
        v[spec.index - 1] = 1.0
        return v
    if spec.space == "cpn":
        return np.full(n, 1j if spec.info.planar else _CPN_DIRECTIONS[case], dtype=complex)
    if spec.space == "hpn":
        row, val = (1, 1j) if spec.info.planar else _HPN_DIRECTIONS[case]
        v = np.zeros((2, n), dtype=complex)
        v[row] = val
        return v
    raise ValueError(f"no rank-one direction for {spec.family}")


def _euclidean_vectors(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    E = np.eye(n)
    return E[0], E[min(1, n - 1)], E[n - 1]


def _euclidean_jet(a, b, c, n):
    A, B, C = _euclidean_vectors(n)

    def jet(t):
        return (a * t * t * A + b * t * B + c * C, 2 * a * t * A + b * B, 2 * a * A, 0 * A)

    return jet


# --- constructors -------------------------------------------------------------


def make_family(spec: FamilySpec) -> CurveFamily | SeparableMap:
    """Curve family (or planar separable map) of a catalogued case."""
    model = spec.model()
    p = spec.params
    fam = spec.family
    if spec.info.planar:
        X, Y = planar_directions(spec, model)
        return build_separable_map(model, X, Y, spec.coefficients(), spec.initial())
    if fam == "sphere/helix":
        a, b = p["a"], p["b"]

        def u(t):
            s, c = math.sin(t), math.cos(t)
            return (
                np.array([-a * s, a * c, b]),
                np.array([-a * c, -a * s, 0.0]),
                np.array([a * s, -a * c, 0.0]),
                np.array([a * c, a * s, 0.0]),
            )

        return AnalyticCurve.from_m_coords(model, u, spec.label())
    if fam == "sphere/great-circle":
        v = np.array([p["a"], p["b"]])
        z = np.zeros(2)
        return AnalyticCurve.from_m_coords(model, lambda t: (v, z, z, z), spec.label())
    if fam in ("sphere/trig-ii", "sphere/trig-iii"):
        sg = 1.0 if fam == "sphere/trig-ii" else -1.0

        def u(t):
            s, c = math.sin(t), math.cos(t)
            return (
                np.array([-s, sg * c]),
                np.array([-c, -sg * s]),
                np.array([s, -sg * c]),
                np.array([c, sg * s]),
            )

        return AnalyticCurve.from_m_coords(model, u, spec.label())
    if fam == "euclidean/poly":
        return AnalyticCurve.from_m_coords(model, _euclidean_jet(p["a"], p["b"], p["c"], spec.n), spec.label())
    return AnalyticCurve.from_m_coords(
        model, cubic_phase_jet(p["a"], p["b"], p["c"], rank_one_direction(spec)), spec.label()
    )


def planar_directions(spec: FamilySpec, model: SymmetricSpace | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Commuting pair ``(X, Y)`` in m for the separable maps.

    Rank-one targets admit no linearly independent commuting pair, so the
    maps use ``X = Y``; the Euclidean target uses two coordinate axes.
    """
    model = model or spec.model()
    if spec.space == "euclidean":
        E = np.eye(spec.n)
        return model.m_from_coords(E[0]), model.m_from_coords(E[1])
    X = model.m_from_coords(rank_one_direction(spec))
    return X, X.copy()


# --- closed forms -------------------------------------------------------------


def _phase(spec: FamilySpec, arg) -> float:
    p = spec.params
    if spec.info.planar:
        x, y = arg
        return cubic_phase(p["a1"], p["b1"], p["c1"], x) + cubic_phase(p["a2"], p["b2"], p["c2"], y)
    return cubic_phase(p["a"], p["b"], p["c"], arg)


def _apply(model: SymmetricSpace, x0: GroupElement, col: np.ndarray) -> HomogeneousPoint:
    return model.align(model.point_from_column(x0.matrix @ col))


def closed_form_point(spec: FamilySpec, arg) -> HomogeneousPoint:
    """Point formula of a catalogued family at ``t`` (or ``(x, y)`` for planar maps)."""
    if not spec.info.closed_form:
        raise ValueError(f"{spec.family} has no closed-form point formula")
    model = spec.model()
    x0 = spec.initial()
    n = spec.n
    p = spec.params
    space, case = spec.space, spec.case

    if space == "euclidean":
        if spec.info.planar:
            x, y = arg
            E = np.eye(n)
            v = cubic_phase(p["a1"], p["b1"], p["c1"], x) * E[0] + cubic_phase(p["a2"], p["b2"], p["c2"], y) * E[1]
        else:
            A, B, C = _euclidean_vectors(n)
            t = arg
            v = p["a"] / 3 * t**3 * A + p["b"] / 2 * t**2 * B + p["c"] * t * C
        g = x0.matrix
        return HomogeneousPoint(model.name, (g[:-1, :-1] @ v + g[:-1, -1]).real)

    if spec.family == "sphere/great-circle":
        a, b = p["a"], p["b"]
        r = math.hypot(a, b)
        col = np.zeros(3, dtype=complex)
        col[0] = math.cos(arg * r)
        if r > 0:
            col[1] = a / r * math.sin(arg * r)
            col[2] = b / r * math.sin(arg * r)
        return _apply(model, x0, col)

    d = _phase(spec, arg)
    if space == "sphere":
        col = np.zeros(n + 1, dtype=complex)
        col[0] = math.cos(d)
        if spec.info.planar:
            col[1:] = math.sin(math.sqrt(n) * d) / math.sqrt(n)
            col[0] = math.cos(math.sqrt(n) * d)
        else:
            col[spec.index] = math.sin(d)
        return _apply(model, x0, col)
    if space == "cpn":
        if spec.info.planar or case == "case-ii":
            amp, r = 1j / math.sqrt(n), math.sqrt(n)
        elif case == "case-i":
            amp, r = 1 / math.sqrt(n), math.sqrt(n)
        else:
            amp, r = (1 + 1j) / math.sqrt(2 * n), math.sqrt(2 * n)
        col = np.empty(n + 1, dtype=complex)
        col[0] = math.cos(r * d)
        col[1:] = amp * math.sin(r * d)
        return _apply(model, x0, col)
    # quaternionic: q_0 = cos, q_j = factor * sin / sqrt(n), split as p + r j
    r = math.sqrt(n)
    q1 = np.array((0, 0, 0, 1.0) if spec.info.planar else _HPN_FACTORS[case]) * math.sin(r * d) / r
    col = np.zeros(2 * n + 2, dtype=complex)
    col[0] = math.cos(r * d)
    col[1 : n + 1] = q1[0] + 1j * q1[1]
    col[n + 2 :] = q1[2] + 1j * q1[3]
    return _apply(model, x0, col)


# --- verification -------------------------------------------------------------


def _classify(h_max: float, b_max: float, tol: Mapping[str, float]) -> str:
    if h_max <= tol["harmonic"]:
        return HARMONIC
    if b_max <= tol["biharmonic"]:
        return BIHARMONIC
    return NOT_BIHARMONIC


def curve_residual_series(fam: CurveFamily, ts, tol: Mapping[str, float]) -> dict[str, ResidualSeries]:
    h = np.array([norm(harmonic_residual(fam, t)) for t in ts])
    b = np.array([norm(biharmonic_residual(fam, t)) for t in ts])
    return {
        "harmonic": ResidualSeries("harmonic", h, tol["harmonic"]),
        "biharmonic": ResidualSeries("biharmonic", b, tol["biharmonic"]),
    }


def planar_residual_series(fields: PlanarFieldPair, grid: GridSpec, tol: Mapping[str, float]) -> dict[str, ResidualSeries]:
    out = {}
    for kind in ("harmonic", "biharmonic", "integrability-k", "integrability-m"):
        key = "integrability" if kind.startswith("integrability") else kind
        out[kind] = ResidualSeries(kind, grid_norms(fields, grid, kind), tol[key])
    return out


def closed_form_errors(spec: FamilySpec, window=DEFAULT_WINDOW, grid: GridSpec = DEFAULT_GRID, h: float = CLOSED_FORM_STEP) -> np.ndarray:
    """Gauge-aligned distances between integrated points and the closed form."""
    fam = make_family(spec)
    model = spec.model()
    if spec.info.planar:
        psi = integrate_planar_lift(fam.fields, grid, spec.initial(), h)
        return np.array(
            [
                model.distance(closed_form_point(spec, (float(x), float(y))), model.project_point(psi[i, j]))
                for i, x in enumerate(grid.xs)
                for j, y in enumerate(grid.ys)
            ]
        )
    t0, t1 = window[0], window[1]
    traj = solve_lift_two_sided(fam, spec.initial(), (t0, t1), h, Method.RKMK4)
    return np.array([model.distance(closed_form_point(spec, t), pt) for t, pt in zip(traj.times, traj.points)])


def verify_family(
    spec: FamilySpec,
    window=DEFAULT_WINDOW,
    grid: GridSpec = DEFAULT_GRID,
    tolerances: Mapping[str, float] | None = None,
    closed_form: bool = True,
) -> ResidualReport:
    """Residuals over the window (curves) or grid (planar maps), the
    resulting verdict, and optionally the closed-form agreement."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    fam = make_family(spec)
    if spec.info.planar:
        series = planar_residual_series(fam.fields, grid, tol)
    else:
        ts = np.linspace(window[0], window[1], int(window[2]))
        series = curve_residual_series(fam, ts, tol)
    observed = _classify(series["harmonic"].max, series["biharmonic"].max, tol)
    report = ResidualReport(spec.label(), expected_verdict(spec), observed, series)
    if closed_form and spec.info.closed_form:
        errs = closed_form_errors(spec, window, grid)
        report.series["closed-form"] = ResidualSeries("closed-form", errs, tol["closed-form"])
        if errs.max() > tol["closed-form"]:
            report.findings.append(
                f"integrated points deviate from the closed form by {errs.max():.3e}"
            )
    return report
