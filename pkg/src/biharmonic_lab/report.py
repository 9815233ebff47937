"""Residual reports shared by the catalog and the command line."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ResidualSeries:
    kind: str
    norms: np.ndarray
    tol: float | None = None

    @property
    def max(self) -> float:
        return float(np.max(self.norms)) if self.norms.size else 0.0

    @property
    def mean(self) -> float:
        return float(np.mean(self.norms)) if self.norms.size else 0.0

    @property
    def within(self) -> bool:
        return self.tol is None or self.max <= self.tol

    def to_dict(self) -> dict:
        return {"max": self.max, "mean": self.mean, "samples": int(self.norms.size), "tol": self.tol}


@dataclass
class ResidualReport:
    family: str
    expected: str
    observed: str
    series: dict[str, ResidualSeries] = field(default_factory=dict)
    findings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        checks_ok = all(s.within for k, s in self.series.items() if k not in ("harmonic", "biharmonic"))
        return self.observed == self.expected and checks_ok

    def max(self, kind: str) -> float:
        return self.series[kind].max

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "expected": self.expected,
            "verdict": self.observed,
            "passed": self.passed,
            "residuals": {k: s.to_dict() for k, s in sorted(self.series.items())},
            "findings": list(self.findings),
        }
