r"""Modified Bessel functions of orders 0 and 1 and the products H_m = I_m K_m.

All evaluations go through exponentially scaled values

.. math::
    \tilde I_m(x) = e^{-x} I_m(x), \qquad \tilde K_m(x) = e^{x} K_m(x),

so that products I_m K_m never overflow. Three regimes are used:

* ``x <= 2``: ascending power series for I and the log-coupled series for K.
* ``2 < x < 20``: power series for I, trapezoidal rule on
  :math:`e^{x}K_m(x) = \int_0^\infty e^{-x(\cosh t - 1)}\cosh(mt)\,dt`
  for K (the integrand is even and entire, so the rule converges
  geometrically).
* ``x >= 20``: Hankel asymptotic expansions with coefficients
  :math:`a_k(m) = \prod_{j=1}^k (4m^2 - (2j-1)^2) / (k!\,8^k)`.

Every function accepts scalars or numpy arrays and returns the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286061

SMALL_X = 2.0
LARGE_X = 20.0
MAX_H0 = 600.0

_I_SERIES_TERMS = 64
_K_SERIES_TERMS = 30
_ASYMPTOTIC_TERMS = 30
_TRAPZ_STEP = 0.125
_TRAPZ_NODES = np.arange(0, 49) * _TRAPZ_STEP
_TRAPZ_WEIGHTS = np.full(_TRAPZ_NODES.size, _TRAPZ_STEP)
_TRAPZ_WEIGHTS[0] *= 0.5


class BesselDomainError(ValueError):
    """Raised for non-positive or non-finite arguments."""


@dataclass(frozen=True)
class BesselQuartet:
    """Values of I0, I1, K0, K1 at one argument.

    When ``scaled`` is true the fields hold ``exp(-x) I_m(x)`` and
    ``exp(x) K_m(x)``.
    """

    x: float
    i0: float
    i1: float
    k0: float
    k1: float
    scaled: bool

    def wronskian_residual(self) -> float:
        """|I0 K1 + I1 K0 - 1/x|; scale factors cancel in the products."""
        return abs(self.i0 * self.k1 + self.i1 * self.k0 - 1.0 / self.x)


def _check_domain(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise BesselDomainError(f"argument must be positive and finite, got {x!r}")
    return arr


def _i_series(x):
    """Unscaled (I0, I1) by the ascending series."""
    q = 0.25 * x * x
    t0 = np.ones_like(x)
    t1 = 0.5 * x
    s0 = t0.copy()
    s1 = t1.copy()
    for k in range(1, _I_SERIES_TERMS):
        t0 = t0 * q / (k * k)
        t1 = t1 * q / (k * (k + 1))
        s0 += t0
        s1 += t1
    return s0, s1


def _k_series(x, i0, i1):
    """Unscaled (K0, K1) for small x from the log-coupled series."""
    q = 0.25 * x * x
    log_half = np.log(0.5 * x)
    # K0 = -(log(x/2) + gamma) I0 + sum_{k>=1} H_k q^k / (k!)^2
    term = np.ones_like(x)
    harmonic = 0.0
    s0 = np.zeros_like(x)
    for k in range(1, _K_SERIES_TERMS):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        s0 += harmonic * term
    k0 = -(log_half + EULER_GAMMA) * i0 + s0
    # K1 = 1/x + log(x/2) I1 - (x/4) sum_{k>=0} (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
    term = np.ones_like(x)
    h_k = 0.0
    s1 = (-2.0 * EULER_GAMMA + 1.0) * term
    for k in range(1, _K_SERIES_TERMS):
        term = term * q / (k * (k + 1))
        h_k += 1.0 / k
        s1 = s1 + (-2.0 * EULER_GAMMA + 2.0 * h_k + 1.0 / (k + 1)) * term
    k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1
    return k0, k1


def _k_trapezoid(x):
    """Scaled (K0, K1) from the integral representation."""
    t = _TRAPZ_NODES[None, :]
    expo = np.exp(-x[:, None] * (np.cosh(t) - 1.0))
    k0 = expo @ _TRAPZ_WEIGHTS
    k1 = (expo * np.cosh(t)) @ _TRAPZ_WEIGHTS
    return k0, k1


def _asymptotic(x, m):
    """Scaled (I_m, K_m) from the Hankel expansions."""
    term = np.ones_like(x)
    si = term.copy()
    sk = term.copy()
    mu = 4.0 * m * m
    for k in range(1, _ASYMPTOTIC_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        sk += term
        si += term if k % 2 == 0 else -term
    return si / np.sqrt(2.0 * np.pi * x), sk * np.sqrt(0.5 * np.pi / x)


def scaled_bessel(x):
    """Return scaled (I0, I1, K0, K1) arrays for positive ``x``."""
    x = np.atleast_1d(_check_domain(x)).astype(float)
    i0 = np.empty_like(x)
    i1 = np.empty_like(x)
    k0 = np.empty_like(x)
    k1 = np.empty_like(x)

    small = x <= SMALL_X
    mid = (x > SMALL_X) & (x < LARGE_X)
    large = x >= LARGE_X

    if small.any():
        xs = x[small]
        a0, a1 = _i_series(xs)
        b0, b1 = _k_series(xs, a0, a1)
        e = np.exp(-xs)
        i0[small], i1[small] = a0 * e, a1 * e
        k0[small], k1[small] = b0 / e, b1 / e
    if mid.any():
        xm = x[mid]
        a0, a1 = _i_series(xm)
        e = np.exp(-xm)
        i0[mid], i1[mid] = a0 * e, a1 * e
        k0[mid], k1[mid] = _k_trapezoid(xm)
    if large.any():
        xl = x[large]
        i0[large], k0[large] = _asymptotic(xl, 0)
        i1[large], k1[large] = _asymptotic(xl, 1)
    return i0, i1, k0, k1


def _unwrap(value, like):
    if np.ndim(like) == 0:
        return float(value[0])
    return value.reshape(np.shape(like))


def bessel_eval(x: float, scaled: bool = False) -> BesselQuartet:
    """Evaluate I0, I1, K0, K1 at a single positive ``x``.

    Unscaled values overflow to ``inf`` (I) or underflow to 0 (K) beyond
    x ~ 700; use ``scaled=True`` there.
    """
    if np.ndim(x) != 0:
        raise BesselDomainError("bessel_eval takes a scalar; use scaled_bessel for arrays")
    i0, i1, k0, k1 = (float(v[0]) for v in scaled_bessel(x))
    if not scaled:
        with np.errstate(over="ignore"):
            e = float(np.exp(x)) if x < 709.0 else np.inf
        i0, i1 = i0 * e, i1 * e
        k0, k1 = (k0 / e, k1 / e) if np.isfinite(e) else (0.0, 0.0)
    return BesselQuartet(float(x), i0, i1, k0, k1, scaled)


def h_product(m: int, x):
    """H_m(x) = I_m(x) K_m(x) for m in {0, 1}."""
    if m not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {m}")
    i0, i1, k0, k1 = scaled_bessel(x)
    out = i0 * k0 if m == 0 else i1 * k1
    return _unwrap(out, x)


def h0_derivatives(x):
    """Return (H0, H0', H0'') using I0' = I1, K0' = -K1 and the order-1 recurrences."""
    i0, i1, k0, k1 = scaled_bessel(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    h0 = i0 * k0
    d1 = i1 * k0 - i0 * k1
    d2 = 2.0 * h0 - 2.0 * i1 * k1 - d1 / xa
    return _unwrap(h0, x), _unwrap(d1, x), _unwrap(d2, x)


def h1_derivatives(x):
    """Return (H1, H1', H1'')."""
    i0, i1, k0, k1 = scaled_bessel(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    h1 = i1 * k1
    cross = i0 * k1 - i1 * k0
    d1 = cross - 2.0 * h1 / xa
    d2 = 2.0 * h1 - 2.0 * i0 * k0 - cross / xa - 2.0 * d1 / xa + 2.0 * h1 / xa**2
    return _unwrap(h1, x), _unwrap(d1, x), _unwrap(d2, x)


def f_and_derivatives(t, order: int = 0):
    """F(t) = t H_m(t) with its first two derivatives.

    ``order=0`` gives the function whose maximiser defines the constant A;
    ``order=1`` is the analogue used for the second circle eigenvalue.
    """
    if order == 0:
        h, d1, d2 = h0_derivatives(t)
    elif order == 1:
        h, d1, d2 = h1_derivatives(t)
    else:
        raise ValueError(f"order must be 0 or 1, got {order}")
    t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    return t * h, h + t * d1, 2.0 * d1 + t * d2


def _initial_h0_inverse(y):
    # H0(t) ~ 1/(2t) (1 + 1/(8t^2)) for large t; H0(t) ~ -(log(t/2) + gamma) near 0.
    large_t = 0.5 / y * (1.0 + 0.5 * y * y)
    small_t = 2.0 * np.exp(-y - EULER_GAMMA)
    return np.where(y < 0.6, large_t, small_t)


def h0_inverse(y, rtol: float = 1e-13, max_iter: int = 200):
    """Solve H0(t) = y for t > 0.

    Bracket by halving/doubling from an asymptotic guess, then iterate
    Newton steps in log t with a bisection fallback whenever a step leaves
    the bracket.
    """
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    if not np.all(np.isfinite(ya)) or np.any(ya <= 0):
        raise BesselDomainError(f"h0_inverse needs y > 0, got {y!r}")
    if np.any(ya > MAX_H0):
        # the root 2 exp(-y - gamma) underflows double precision
        raise BesselDomainError(f"h0_inverse needs y <= {MAX_H0}, got {y!r}")

    t = _initial_h0_inverse(ya)
    h = np.atleast_1d(h_product(0, t))
    # H0 is decreasing, so the bracket is H0(lo) >= y >= H0(hi)
    lo = np.where(h >= ya, t, 0.0)
    hi = np.where(h <= ya, t, np.inf)
    for idx, factor in ((np.flatnonzero(lo == 0.0), 0.5), (np.flatnonzero(np.isinf(hi)), 2.0)):
        probe = t[idx]
        while idx.size:
            probe = probe * factor
            hp = np.atleast_1d(h_product(0, probe))
            ok = hp >= ya[idx] if factor < 1 else hp <= ya[idx]
            if factor < 1:
                lo[idx[ok]] = probe[ok]
                hi[idx] = np.minimum(hi[idx], probe / factor)
            else:
                hi[idx[ok]] = probe[ok]
                lo[idx] = np.maximum(lo[idx], probe / factor)
            idx, probe = idx[~ok], probe[~ok]

    log_y = np.log(ya)
    active = np.arange(ya.size)
    for _ in range(max_iter):
        ta = t[active]
        i0, i1, k0, k1 = scaled_bessel(ta)
        h = i0 * k0
        d1 = i1 * k0 - i0 * k1
        yv = ya[active]
        resid = h - yv
        keep = (np.abs(resid) > rtol * yv) & (hi[active] / lo[active] - 1.0 > 4e-16)
        active, ta, h, d1, resid = active[keep], ta[keep], h[keep], d1[keep], resid[keep]
        if not active.size:
            break
        above = resid > 0
        lo[active[above]] = ta[above]
        hi[active[~above]] = ta[~above]
        g = np.log(h) - log_y[active]
        slope = ta * d1 / h
        with np.errstate(over="ignore", invalid="ignore"):
            newton = ta * np.exp(-g / slope)
        la, ha = lo[active], hi[active]
        inside = np.isfinite(newton) & (newton > la) & (newton < ha)
        t[active] = np.where(inside, newton, la * np.sqrt(ha / la))
    return _unwrap(t, y)
