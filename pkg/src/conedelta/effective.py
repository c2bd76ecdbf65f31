"""Reduced one-dimensional model of the sharp-cone operator.

With h = tan(theta) the cone operator is unitarily equivalent to
(1 + h^2)/2 times Q_h, and Q_h is squeezed between

    T_h  = -h^2 d^2/dx^2 + mu1(x; sqrt 2)     Dirichlet at rho,
    S_hb = -hb^2 d^2/dx^2 + mu1(x; sqrt 2)    Neumann at rho,

on (rho, inf), with hb = h (1 + h^{1/2})^{1/2}. The cutoff rho < xi0 is
chosen so that mu1 > -1/4 on (0, rho].
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import circle, constants, schrod1d

BETA = math.sqrt(2.0)
RHO_GRID_POINTS = 1000
RHO_SAFETY = 0.9
RHO_LEVEL = -0.25


def potential(x):
    """The effective potential mu1(x; sqrt 2), memoised."""
    return circle.mu1_values(x, BETA)


@functools.lru_cache(maxsize=1)
def model_constants() -> constants.ModelConstants:
    return constants.solve_model_constants()


@functools.lru_cache(maxsize=1)
def choose_rho() -> float:
    """Largest point of a uniform grid on (0, xi0) below which mu1 > -1/4, times 0.9."""
    xi0 = model_constants().xi0
    grid = xi0 * np.arange(1, RHO_GRID_POINTS + 1) / (RHO_GRID_POINTS + 1)
    mu = potential(grid)
    bad = np.flatnonzero(mu <= RHO_LEVEL)
    last = (bad[0] if bad.size else grid.size) - 1
    if last < 0:
        raise constants.ConsistencyError("mu1 <= -1/4 already at the first grid point; circle layer is broken")
    return RHO_SAFETY * float(grid[last])


def ess_threshold(h: float) -> float:
    """Bottom of the essential spectrum of Q_h."""
    return -1.0 / (2.0 * (1.0 + h * h))


def harmonic_value(n: int, h: float) -> float:
    c = model_constants()
    return schrod1d.harmonic_predict(-2.0 * c.a0, 8.0 * c.a1**2, n, h)


def cone_harmonic_value(n: int, theta: float) -> float:
    """Small-aperture law -a0 + a1 (2n - 1) theta."""
    c = model_constants()
    return -c.a0 + c.a1 * (2 * n - 1) * theta


@dataclass(frozen=True)
class ReducedProblem:
    theta: float
    h: float
    scale: float
    hbar: float
    rho: float
    X_max: float
    step: float

    @property
    def ess_threshold(self) -> float:
        return ess_threshold(self.h)


def _check_theta(theta: float):
    if not (0.0 < theta < 0.5 * math.pi):
        raise ValueError(f"theta must lie in (0, pi/2), got {theta}")


def _planned_threshold(h: float, n_max: int) -> float:
    # highest harmonic level plus one more level spacing
    return harmonic_value(n_max + 1, h)


def from_h(h: float, n_max: int = 5, x_cap: float = schrod1d.DEFAULT_X_CAP) -> ReducedProblem:
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    return build_problem(math.atan(h), n_max=n_max, x_cap=x_cap)


def build_problem(theta: float, n_max: int = 5, x_cap: float = schrod1d.DEFAULT_X_CAP) -> ReducedProblem:
    _check_theta(theta)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    h = math.tan(theta)
    rho = choose_rho()
    e_thr = _planned_threshold(h, n_max)
    x_max = schrod1d.truncation_end(potential, e_thr, h, rho, x_cap=x_cap)
    step = schrod1d.counting_step(h, e_thr, -2.0 * model_constants().a0)
    return ReducedProblem(
        theta=theta,
        h=h,
        scale=0.5 * (1.0 + h * h),
        hbar=h * math.sqrt(1.0 + math.sqrt(h)),
        rho=rho,
        X_max=x_max,
        step=step,
    )


def map_to_cone(value: float, prob: ReducedProblem) -> float:
    """Q_h energy to cone energy."""
    return prob.scale * value


@dataclass(frozen=True)
class EffectivePrediction:
    n: int
    h: float
    theta: float
    upper: float
    lower: float
    harmonic: float
    cone_upper: float
    cone_lower: float
    cone_harmonic: float

    @property
    def slack(self) -> float:
        """max(0, lower - upper): by how much the Neumann value overshoots."""
        return max(0.0, self.lower - self.upper)

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def dirichlet_operator(prob: ReducedProblem) -> schrod1d.TridiagonalOperator:
    grid = schrod1d.Grid1D.with_step(prob.rho, prob.X_max, prob.step)
    return schrod1d.discretize(grid, potential, prob.h, potential_id="mu1")


def neumann_operator(prob: ReducedProblem) -> schrod1d.TridiagonalOperator:
    grid = schrod1d.Grid1D.with_step(prob.rho, prob.X_max, prob.step, bc_left=schrod1d.BC.NEUMANN)
    return schrod1d.discretize(grid, potential, prob.hbar, potential_id="mu1")


def eigen_bounds(prob: ReducedProblem, n_max: int) -> list[EffectivePrediction]:
    """Dirichlet (upper) and Neumann (lower) eigenvalues for n = 1..n_max."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    upper = schrod1d.eigenvalues_lowest(dirichlet_operator(prob), n_max)
    lower = schrod1d.eigenvalues_lowest(neumann_operator(prob), n_max)
    out = []
    for n in range(1, n_max + 1):
        up, lo = float(upper[n - 1]), float(lower[n - 1])
        out.append(EffectivePrediction(
            n=n, h=prob.h, theta=prob.theta,
            upper=up, lower=lo, harmonic=harmonic_value(n, prob.h),
            cone_upper=map_to_cone(up, prob), cone_lower=map_to_cone(lo, prob),
            cone_harmonic=cone_harmonic_value(n, prob.theta),
        ))
    return out


def _count_at(h: float, energy: float, x_cap: float) -> int:
    rho = choose_rho()
    x_max = schrod1d.truncation_end(potential, energy, h, rho, x_cap=x_cap)
    step = schrod1d.counting_step(h, energy, -2.0 * model_constants().a0)
    grid = schrod1d.Grid1D.with_step(rho, x_max, step)
    op = schrod1d.discretize(grid, potential, h, potential_id="mu1")
    return schrod1d.count_below(op, energy)


def counting_Q(prob: ReducedProblem, C: float, gamma: float,
               x_cap: float = schrod1d.DEFAULT_X_CAP) -> tuple[int, float]:
    """Eigenvalues of T_h below -1/2 - C h^gamma, with the Weyl-type prediction."""
    if not 0 < gamma < 1.5:
        raise ValueError(f"gamma must lie in (0, 3/2), got {gamma}")
    return count_reduced(prob.h, C, gamma, x_cap)


def count_reduced(h: float, C: float, gamma: float,
                  x_cap: float = schrod1d.DEFAULT_X_CAP) -> tuple[int, float]:
    """Same count for the bare 1D operator, where gamma may range over (0, 2)."""
    if not 0 < h < 1:
        raise ValueError(f"h must lie in (0, 1), got {h}")
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    if not 0 < gamma < 2:
        raise ValueError(f"gamma must lie in (0, 2), got {gamma}")
    return _count_at(h, -0.5 - C * h**gamma, x_cap), schrod1d.weyl_predict(gamma, h)


def counting_cone(theta: float, C: float, gamma: float,
                  x_cap: float = schrod1d.DEFAULT_X_CAP) -> tuple[int, float]:
    """Cone eigenvalues below -1/4 - C theta^gamma, with the prediction in theta."""
    _check_theta(theta)
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    if not 0 < gamma < 1.5:
        raise ValueError(f"gamma must lie in (0, 3/2), got {gamma}")
    h = math.tan(theta)
    energy = (-0.25 - C * theta**gamma) / (0.5 * (1.0 + h * h))
    return _count_at(h, energy, x_cap), schrod1d.weyl_predict(gamma, theta)


@dataclass(frozen=True)
class PotentialTailCheck:
    x: tuple[float, ...]
    v: tuple[float, ...]
    weighted: tuple[float, ...]
    sup_abs_v: float
    decreasing: bool

    @property
    def ok(self) -> bool:
        return self.decreasing and math.isfinite(self.sup_abs_v)


def tail_remainder(x):
    """v(x) = mu1(x) + 1/2 + 1/(4 x^2)."""
    x = np.asarray(x, dtype=float)
    return potential(x) + 0.5 + 0.25 / x**2


def potential_v_check(grid=(10.0, 20.0, 40.0, 80.0)) -> PotentialTailCheck:
    """x^2 |v(x)| must decrease along ``grid``; v is sampled on (rho, 80] for boundedness."""
    x = np.asarray(grid, dtype=float)
    v = tail_remainder(x)
    weighted = x**2 * np.abs(v)
    dense = np.geomspace(choose_rho(), 80.0, 400)
    return PotentialTailCheck(
        x=tuple(x.tolist()),
        v=tuple(v.tolist()),
        weighted=tuple(weighted.tolist()),
        sup_abs_v=float(np.max(np.abs(tail_remainder(dense)))),
        decreasing=bool(np.all(np.diff(weighted) < 0)),
    )
