r"""Spectral data of the 2D operator with a delta-interaction on a circle.

For radius R and strength beta the bound states with angular momentum m have
energy -k^2 where k solves the dispersion relation H_m(kR) = 1/(beta R).
The ground state (m = 0) always exists; the m = 1 state exists iff
beta R > 2.

The unnormalised ground-state profile is

.. math::
    f_R(r) = \sqrt{R}\begin{cases} K_0(k_1R)\,I_0(k_1r), & r\le R,\\
                                   I_0(k_1R)\,K_0(k_1r), & r\ge R,\end{cases}

with :math:`c_R = \int_0^\infty f_R(r)^2 r\,dr` and normalised
eigenfunction :math:`\Phi_R = f_R / \sqrt{2\pi c_R}`.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import specfun

TAIL_DECADES = 16.0
_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-13, limit=400)


def _check_positive(**kw):
    for name, val in kw.items():
        if not (np.isfinite(val) and val > 0):
            raise ValueError(f"{name} must be positive and finite, got {val!r}")


def _scaled_i0(s):
    return specfun.scaled_bessel(np.maximum(s, 1e-300))[0]


def _scaled_k0(s):
    return specfun.scaled_bessel(s)[2]


def radial_profile(r, R: float, k1: float):
    """Unnormalised f_R(r), evaluated from scaled Bessel values (no overflow)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    t = k1 * R
    s = k1 * r
    i0_t, _, k0_t, _ = (float(v[0]) for v in specfun.scaled_bessel(t))
    out = np.empty_like(r)
    inner = r <= R
    if inner.any():
        out[inner] = k0_t * _scaled_i0(s[inner]) * np.exp(s[inner] - t)
    if (~inner).any():
        out[~inner] = i0_t * _scaled_k0(s[~inner]) * np.exp(t - s[~inner])
    return math.sqrt(R) * out


@dataclass(frozen=True)
class CircleGroundState:
    R: float
    beta: float
    k1: float
    mu1: float
    cR: float
    _tail: float = field(repr=False, default=0.0)

    def profile(self, r):
        """f_R(r); scalar in, scalar out."""
        out = radial_profile(r, self.R, self.k1)
        return float(out[0]) if np.ndim(r) == 0 else out

    def phi(self, r):
        """Normalised radial eigenfunction Phi_R(|x| = r)."""
        return self.profile(r) / math.sqrt(2.0 * math.pi * self.cR)

    @property
    def tail_radius(self) -> float:
        """Radius beyond which f_R^2 r is below 1e-16 of its peak."""
        return self._tail

    def dispersion_residual(self) -> float:
        return abs(specfun.h_product(0, self.k1 * self.R) - 1.0 / (self.beta * self.R))


@dataclass(frozen=True)
class CircleSecondState:
    R: float
    beta: float
    k2: float | None
    mu2: float | None

    @property
    def present(self) -> bool:
        return self.k2 is not None


def k1_values(R, beta: float):
    """k1(R) = H0^{-1}(1/(beta R)) / R, vectorised over R."""
    Ra = np.asarray(R, dtype=float)
    return specfun.h0_inverse(1.0 / (beta * Ra)) / Ra


def _tail_radius(R: float, k1: float) -> float:
    # f^2 r ~ exp(-2 k1 (r - R)) past the circle
    return R + TAIL_DECADES * math.log(10.0) / (2.0 * k1) + 5.0 / k1


def _norm_integral(R: float, k1: float, tail: float) -> float:
    def integrand(r):
        return float(radial_profile(r, R, k1)[0]) ** 2 * r

    inner, _ = quad(integrand, 0.0, R, **_QUAD_OPTS)
    outer, _ = quad(integrand, R, tail, **_QUAD_OPTS)
    return inner + outer


@functools.lru_cache(maxsize=4096)
def ground_state(R: float, beta: float) -> CircleGroundState:
    """First eigenvalue and eigenfunction data of the circle operator."""
    _check_positive(R=R, beta=beta)
    R = float(R)
    beta = float(beta)
    k1 = float(k1_values(R, beta))
    tail = _tail_radius(R, k1)
    cR = _norm_integral(R, k1, tail)
    return CircleGroundState(R=R, beta=beta, k1=k1, mu1=-k1 * k1, cR=cR, _tail=tail)


def _h1_inverse(y: float, hi: float) -> float:
    """Bisection for H1(t) = y on (0, hi]; H1 decreases from 1/2 to 0."""
    lo = 1e-300
    if specfun.h_product(1, hi) > y:
        raise RuntimeError("H1 bracket does not contain the root")
    for _ in range(2000):
        mid = math.sqrt(lo * hi) if hi / lo > 4.0 else 0.5 * (lo + hi)
        if specfun.h_product(1, mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    return 0.5 * (lo + hi)


def second_eigenvalue(R: float, beta: float) -> CircleSecondState:
    """The m = 1 eigenvalue; absent unless beta R > 2."""
    _check_positive(R=R, beta=beta)
    if beta * R <= 2.0:
        return CircleSecondState(R=R, beta=beta, k2=None, mu2=None)
    # k2 = beta F(R k2) with F = t H1(t) < 1/2, so R k2 < beta R / 2
    t2 = _h1_inverse(1.0 / (beta * R), 0.5 * beta * R)
    k2 = t2 / R
    return CircleSecondState(R=R, beta=beta, k2=k2, mu2=-k2 * k2)


class Mu1Cache:
    """Thread-safe memo of mu1(R; beta) keyed on exact float values."""

    def __init__(self):
        self._data: dict[tuple[float, float], float] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._data)

    def values(self, R, beta: float) -> np.ndarray:
        Ra = np.atleast_1d(np.asarray(R, dtype=float))
        _check_positive(beta=beta)
        if np.any(~np.isfinite(Ra)) or np.any(Ra <= 0):
            raise ValueError("radii must be positive and finite")
        beta = float(beta)
        out = np.empty_like(Ra)
        with self._lock:
            missing = []
            for i, r in enumerate(Ra.tolist()):
                v = self._data.get((r, beta))
                if v is None:
                    missing.append(i)
                else:
                    out[i] = v
        if missing:
            idx = np.asarray(missing)
            k1 = k1_values(Ra[idx], beta)
            vals = -k1 * k1
            out[idx] = vals
            with self._lock:
                self._data.update(zip(zip(Ra[idx].tolist(), [beta] * idx.size), vals.tolist()))
        return out

    def clear(self):
        with self._lock:
            self._data.clear()


MU1_CACHE = Mu1Cache()


def mu1_values(R, beta: float = math.sqrt(2.0), cache: Mu1Cache | None = MU1_CACHE):
    """Vectorised mu1(R; beta) = -k1(R)^2."""
    if cache is None:
        k1 = k1_values(np.atleast_1d(np.asarray(R, dtype=float)), beta)
        out = -k1 * k1
    else:
        out = cache.values(R, beta)
    return float(out[0]) if np.ndim(R) == 0 else out.reshape(np.shape(R))


def mu1_curve(beta: float, grid) -> list[tuple[float, float]]:
    """Pairs (R, mu1(R; beta)) over a strictly increasing grid of radii."""
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be a non-empty, strictly increasing sequence of positive radii")
    vals = mu1_values(g, beta)
    return list(zip(g.tolist(), vals.tolist()))


def g_function(t: float) -> float:
    r"""G(t) = K0(t)^2 \int_0^t I0^2 s ds + I0(t)^2 \int_t^\infty K0^2 s ds."""
    i0_t, _, k0_t, _ = (float(v[0]) for v in specfun.scaled_bessel(t))

    def inner(s):
        return (k0_t * _scaled_i0(s)[0]) ** 2 * math.exp(2.0 * (s - t)) * s

    def outer(s):
        return (i0_t * _scaled_k0(s)[0]) ** 2 * math.exp(2.0 * (t - s)) * s

    a, _ = quad(inner, 0.0, t, **_QUAD_OPTS)
    b, _ = quad(outer, t, t + 40.0, **_QUAD_OPTS)
    return a + b


def phi_derivative_norm(R: float, beta: float, step: float | None = None) -> float:
    """||d Phi_R / dR||_{L^2(R^2)} by a centred difference in R.

    ``step`` defaults to 1e-4 R.
    """
    _check_positive(R=R, beta=beta)
    if step is None:
        step = 1e-4 * R
    if not (0 < step < R):
        raise ValueError(f"step must lie in (0, R), got step={step}, R={R}")
    plus = ground_state(R + step, beta)
    minus = ground_state(R - step, beta)
    norm_p = 1.0 / math.sqrt(2.0 * math.pi * plus.cR)
    norm_m = 1.0 / math.sqrt(2.0 * math.pi * minus.cR)

    def integrand(r):
        d = norm_p * radial_profile(r, plus.R, plus.k1)[0] - norm_m * radial_profile(r, minus.R, minus.k1)[0]
        return d * d * r

    tail = max(plus.tail_radius, minus.tail_radius)
    pts = [0.0, R - step, R + step, tail]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v, _ = quad(integrand, a, b, epsabs=0.0, epsrel=1e-10, limit=400)
        total += v
    return math.sqrt(2.0 * math.pi * total) / (2.0 * step)
