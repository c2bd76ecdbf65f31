"""Semiclassical 1D Schrodinger operators -h^2 u'' + U u on an interval.

Discretisation is the three-point central difference on a uniform grid.
Dirichlet ends sit one step outside the first/last node; Neumann ends sit
half a step outside, with the ghost value mirrored across the face, so the
matrix stays symmetric tridiagonal and a Sturm inertia count gives exact
eigenvalue counts for the discrete operator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np

# ln(1e10): WKB decay factor required past the last turning point
WKB_DECADES = 10.0
DEFAULT_X_CAP = 400.0


class BC(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    n: int
    bc_left: BC = BC.DIRICHLET
    bc_right: BC = BC.DIRICHLET

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got a={self.a}, b={self.b}")
        if self.n < 3:
            raise ValueError(f"need at least 3 nodes, got {self.n}")
        object.__setattr__(self, "bc_left", BC(self.bc_left))
        object.__setattr__(self, "bc_right", BC(self.bc_right))

    @staticmethod
    def _offset(bc: BC) -> float:
        return 1.0 if bc is BC.DIRICHLET else 0.5

    @property
    def step(self) -> float:
        span = self.n - 1 + self._offset(self.bc_left) + self._offset(self.bc_right)
        return (self.b - self.a) / span

    @property
    def nodes(self) -> np.ndarray:
        s = self.step
        return self.a + (self._offset(self.bc_left) + np.arange(self.n)) * s

    @classmethod
    def with_step(cls, a: float, b: float, max_step: float, bc_left=BC.DIRICHLET, bc_right=BC.DIRICHLET):
        """Smallest node count whose spacing does not exceed ``max_step``."""
        extra = cls._offset(BC(bc_left)) + cls._offset(BC(bc_right)) - 1.0
        n = max(3, int(math.ceil((b - a) / max_step - extra)))
        return cls(a, b, n, bc_left, bc_right)


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    grid: Grid1D
    h: float
    diag: np.ndarray
    offdiag: np.ndarray
    potential_id: str = ""

    @property
    def size(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def discretize(grid: Grid1D, U: Callable | np.ndarray, h: float, potential_id: str = "") -> TridiagonalOperator:
    """Assemble -h^2 d^2/dx^2 + U on ``grid``.

    ``U`` is either a vectorised callable or an array of values at
    ``grid.nodes``.
    """
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    x = grid.nodes
    vals = np.asarray(U(x) if callable(U) else U, dtype=float)
    if vals.shape != x.shape:
        raise AssemblyError(f"potential has shape {vals.shape}, expected {x.shape}")
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        i = int(bad[0])
        raise AssemblyError(f"potential is not finite at node {i} (x={x[i]!r}): {vals[i]!r}")
    kin = h * h / grid.step**2
    diag = 2.0 * kin + vals
    if grid.bc_left is BC.NEUMANN:
        diag[0] -= kin
    if grid.bc_right is BC.NEUMANN:
        diag[-1] -= kin
    off = np.full(x.size - 1, -kin)
    diag.flags.writeable = False
    off.flags.writeable = False
    return TridiagonalOperator(grid=grid, h=float(h), diag=diag, offdiag=off, potential_id=potential_id)


@numba.njit(cache=True)
def _sturm_count(diag, off2, E, pivmin):
    # negative pivots of LDL^T of (T - E)
    count = 0
    d = diag[0] - E
    if abs(d) < pivmin:
        d = -pivmin
    if d < 0:
        count += 1
    for i in range(1, diag.size):
        d = diag[i] - E - off2[i - 1] / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect_lowest(diag, off2, m, lo0, hi0, atol, rtol, pivmin):
    out = np.empty(m)
    lo_prev = lo0
    for j in range(1, m + 1):
        lo = lo_prev
        hi = hi0
        while True:
            width = hi - lo
            tol = max(atol, rtol * max(abs(lo), abs(hi)))
            if width <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _sturm_count(diag, off2, mid, pivmin) >= j:
                hi = mid
            else:
                lo = mid
        out[j - 1] = hi
        lo_prev = lo
    return out


def _pivmin(op: TridiagonalOperator) -> float:
    big = float(np.max(op.offdiag**2)) if op.offdiag.size else 1.0
    return np.finfo(float).tiny * max(1.0, big)


def gershgorin(op: TridiagonalOperator) -> tuple[float, float]:
    r = np.zeros_like(op.diag)
    r[:-1] += np.abs(op.offdiag)
    r[1:] += np.abs(op.offdiag)
    return float(np.min(op.diag - r)), float(np.max(op.diag + r))


def count_below(op: TridiagonalOperator, E: float) -> int:
    """Number of eigenvalues of the matrix strictly below ``E``."""
    return int(_sturm_count(op.diag, op.offdiag**2, float(E), _pivmin(op)))


def default_tolerance(E: float) -> float:
    return 1e-9 * max(1.0, abs(E))


def eigenvalues_lowest(op: TridiagonalOperator, m: int, tol: float | None = None) -> np.ndarray:
    """The ``m`` smallest eigenvalues by Sturm bisection.

    Each value is the upper end of a bracket of width at most ``tol``
    (default ``1e-9 * max(1, |E|)``) that contains it.
    """
    if not 1 <= m <= op.size:
        raise ValueError(f"m must lie in [1, {op.size}], got {m}")
    lo, hi = gershgorin(op)
    pad = 1e-12 * max(1.0, abs(lo), abs(hi))
    atol = tol if tol is not None else 1e-9
    rtol = 0.0 if tol is not None else 1e-9
    return _bisect_lowest(op.diag, op.offdiag**2, int(m), lo - pad, hi + pad, atol, rtol, _pivmin(op))


def harmonic_predict(U_min: float, U_curv: float, n: int, h: float) -> float:
    """U_min + (2n - 1) sqrt(U_curv / 2) h."""
    if not U_curv > 0:
        raise ValueError(f"curvature must be positive, got {U_curv}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return U_min + (2 * n - 1) * math.sqrt(U_curv / 2.0) * h


def model_phase(x: float, h: float) -> float:
    """Phase of sqrt(x) sin(sqrt(1 - h^2)/(2h) log x), which solves -u'' = u/(4 h^2 x^2)."""
    return math.sqrt(1.0 - h * h) / (2.0 * h) * math.log(x)


def model_count_exact(A_end: float, B_end: float, h: float) -> int:
    """Interior zeros on (A_end, B_end) of the explicit solution of -u'' - u/(4h^2x^2) = 0.

    Counts integers k with phase(A_end) < pi k < phase(B_end).
    """
    if not 0 < A_end < B_end:
        raise ValueError(f"need 0 < A_end < B_end, got {A_end}, {B_end}")
    if not 0 < h < 1:
        raise ValueError(f"h must lie in (0, 1), got {h}")
    lo = model_phase(A_end, h) / math.pi
    hi = model_phase(B_end, h) / math.pi
    k_min = math.floor(lo) + 1
    k_max = math.ceil(hi) - 1
    return max(0, k_max - k_min + 1)


def weyl_predict(gamma: float, h: float) -> float:
    """(gamma / 4 pi) |log h| / h."""
    if not 0 < gamma < 2:
        raise ValueError(f"gamma must lie in (0, 2), got {gamma}")
    if not 0 < h < 1:
        raise ValueError(f"h must lie in (0, 1), got {h}")
    return gamma / (4.0 * math.pi) * abs(math.log(h)) / h


def counting_step(h: float, E_thr: float, U_min: float) -> float:
    """Largest grid step resolving each oscillation below ``E_thr`` by >= 40 nodes."""
    return math.pi / 20.0 * h / math.sqrt(max(E_thr - U_min, 1.0))


def truncation_end(U: Callable, E_thr: float, h: float, start: float,
                   x_cap: float = DEFAULT_X_CAP, decades: float = WKB_DECADES) -> float:
    """Right end past which states below ``E_thr`` have decayed by 10^-decades.

    Walks outward accumulating the WKB action int sqrt(U - E_thr)/h dx
    beyond the last classically allowed point; returns ``x_cap`` if the
    target is not reached.
    """
    target = decades * math.log(10.0)
    x = np.linspace(start, x_cap, 40001)
    u = np.asarray(U(x), dtype=float)
    allowed = np.flatnonzero(u < E_thr)
    i0 = int(allowed[-1]) if allowed.size else 0
    gap = np.sqrt(np.clip(u[i0:] - E_thr, 0.0, None)) / h
    action = np.concatenate([[0.0], np.cumsum(0.5 * (gap[1:] + gap[:-1]) * np.diff(x[i0:]))])
    hit = np.flatnonzero(action >= target)
    return float(x[i0 + hit[0]]) if hit.size else float(x_cap)
