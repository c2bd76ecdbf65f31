"""Fits, extrapolation and the machine-readable verification report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

CRITERIA_VERSION = "1"

# Single source of every expected value and tolerance used by the checks.
CRITERIA: dict[str, dict] = {
    "constants": {
        "title": "model constants",
        "expected": {"A": 1.0750, "a0": 0.2845, "a1": 0.1241, "xi0": 1.4252},
        "tolerance": {"value": 5e-4, "residual": 1e-12, "runtime": 0.1},
    },
    "circle_minimum": {
        "title": "minimum and curvature of mu1",
        "expected": {"location": "xi0", "value": "-2 a0", "curvature": "8 a1^2"},
        "tolerance": {"location": 1e-3, "value": 1e-6, "curvature_rel": 0.01, "fd_step": 1e-3, "runtime": 5.0},
    },
    "tail_law": {
        "title": "tail remainder exponent of mu1",
        "expected": {"radii": [10.0, 20.0, 40.0, 80.0], "band": [-4.5, -3.5]},
        "tolerance": {"runtime": 1.0},
    },
    "second_state": {
        "title": "second circle eigenvalue",
        "expected": {"absent_beta_R": [0.5, 1.0, 2.0], "present_beta_R": [3.0, 5.0, 10.0], "floor": "-beta^2/4"},
        "tolerance": {"runtime": 1.0},
    },
    "harmonic": {
        "title": "harmonic approximation of T_h",
        "expected": {"h_fit": [0.02, 0.01, 0.005], "h_resid": [0.04, 0.02, 0.01, 0.005], "n": [1, 2, 3],
                     "intercept": "-2 a0", "slope": "2 (2n-1) a1", "exponent_band": [1.3, 1.7]},
        "tolerance": {"intercept": 1e-3, "slope_rel": 0.05, "runtime": 120.0},
    },
    "sandwich": {
        "title": "Neumann/Dirichlet sandwich",
        "expected": {"h": [0.04, 0.02, 0.01], "n": [1, 2, 3], "min_gap_exponent": 1.0},
        "tolerance": {"runtime": 120.0},
    },
    "oscillation_count": {
        "title": "model oscillation count vs matrix inertia",
        "expected": {"h": [0.05, 0.02, 0.01]},
        "tolerance": {"count": 2, "runtime": 60.0},
    },
    "counting_law": {
        "title": "counting law trend",
        "expected": {"params": [[1.0, 1.0], [0.5, 1.0]], "h": [0.05, 0.02, 0.01, 0.005], "ratio_band": [0.6, 1.4]},
        "tolerance": {"runtime": 600.0},
    },
    "direct": {
        "title": "direct axisymmetric cross-check",
        "expected": {"h": 0.25, "spacings": [0.04, 0.02], "energy": "-2 a0 + 2 a1 h", "centroid": "xi0"},
        "tolerance": {"energy_rel": 0.15, "centroid": 0.3, "runtime": 600.0},
    },
    "identities": {
        "title": "identity suite",
        "expected": {"wronskian_range": [1e-3, 1e3], "pairs": 20, "seed": 20240611},
        "tolerance": {"wronskian": 1e-11, "scaling_rel": 1e-10, "round_trip": 1e-10, "runtime": 5.0},
    },
}

QUICK_SUITE = ("constants", "circle_minimum", "tail_law", "second_state", "oscillation_count", "identities")
FULL_SUITE = tuple(CRITERIA)


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float
    points: tuple[tuple[float, float], ...]
    exponent: float | None = None


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise FitError("points must be a sequence of (x, y) pairs")
    if pts.shape[0] < 3:
        raise FitError(f"need at least 3 points, got {pts.shape[0]}")
    if np.unique(pts[:, 0]).size != pts.shape[0]:
        raise FitError("abscissae must be distinct")
    return pts


def _ols(x, y):
    X = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - (slope * x + icpt)
    return float(slope), float(icpt), float(np.sqrt(np.mean(resid**2)))


def linear_fit(points) -> FitResult:
    """Ordinary least squares y = slope x + intercept."""
    pts = _as_points(points)
    slope, icpt, rms = _ols(pts[:, 0], pts[:, 1])
    return FitResult(slope, icpt, rms, tuple(map(tuple, pts.tolist())))


def loglog_exponent(points) -> FitResult:
    """OLS in log-log coordinates; ``exponent`` is the fitted slope."""
    pts = _as_points(points)
    if np.any(pts <= 0):
        raise FitError("log-log fit needs positive data")
    slope, icpt, rms = _ols(np.log(pts[:, 0]), np.log(pts[:, 1]))
    return FitResult(slope, icpt, rms, tuple(map(tuple, pts.tolist())), exponent=slope)


def richardson(values, order: int) -> float:
    """Extrapolate to zero spacing, removing the O(spacing^order) term.

    ``values`` is a sequence of (spacing, value) with a common ratio between
    consecutive spacings; the last two entries are combined.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    v = sorted(((float(s), float(x)) for s, x in values), reverse=True)
    if len(v) < 2:
        raise ValueError("need at least two spacings")
    ratios = [a[0] / b[0] for a, b in zip(v[:-1], v[1:])]
    if min(ratios) <= 1.0 or max(ratios) - min(ratios) > 1e-9 * max(ratios):
        raise ValueError(f"spacings must be distinct with a fixed ratio, got ratios {ratios}")
    q = ratios[0] ** order
    (_, coarse), (_, fine) = v[-2], v[-1]
    return fine + (fine - coarse) / (q - 1.0)


def _round(x, digits=17):
    if isinstance(x, float):
        return float(f"{x:.{digits}g}") if math.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {k: _round(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v, digits) for v in x]
    if isinstance(x, (np.floating,)):
        return _round(float(x), digits)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class ReportEntry:
    check_id: str
    measured: dict
    expected: dict
    tolerance: dict
    passed: bool
    runtime: float
    notes: str = ""

    def as_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
            "runtime": self.runtime,
            "notes": self.notes,
        }


@dataclass
class VerificationReport:
    entries: list[ReportEntry] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def add(self, entry: ReportEntry):
        if any(e.check_id == entry.check_id for e in self.entries):
            raise ValueError(f"duplicate check id {entry.check_id!r}")
        self.entries.append(entry)

    @property
    def overall(self) -> bool:
        return bool(self.entries) and all(e.passed for e in self.entries)

    def as_dict(self, include_runtime: bool = True) -> dict:
        entries = []
        for e in self.entries:
            d = e.as_dict()
            if not include_runtime:
                d.pop("runtime")
            entries.append(d)
        return {
            "criteria_version": CRITERIA_VERSION,
            "overall": self.overall,
            "entries": entries,
            "provenance": self.provenance,
        }

    def to_json(self, include_runtime: bool = True) -> str:
        """JSON with 17 significant digits and insertion-ordered keys."""
        return json.dumps(_round(self.as_dict(include_runtime)), indent=2, ensure_ascii=False) + "\n"

    def summary_lines(self) -> list[str]:
        return [f"{'PASS' if e.passed else 'FAIL'}  {e.check_id:<18} {CRITERIA[e.check_id]['title']}"
                if e.check_id in CRITERIA else f"{'PASS' if e.passed else 'FAIL'}  {e.check_id}"
                for e in self.entries]
