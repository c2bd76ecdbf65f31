"""The constants A, a0, a1, xi0 governing the sharp-cone eigenvalue asymptotics.

A is the unique critical point of F(t) = t I0(t) K0(t) on (0, inf), i.e. the
root of

    I0 K0 + t (I1 K0 - I0 K1) = 0,

and the rest follow algebraically:

    a0  = A^2 I0(A)^2 K0(A)^2
    a1  = a0 sqrt(1/(2 A^2) + 1/(2 a0) - 2)
    xi0 = 1 / (sqrt(2) I0(A) K0(A)) = A / sqrt(2 a0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from . import specfun

ROOT_BRACKET = (0.5, 2.0)


class ConsistencyError(RuntimeError):
    """A numerical invariant that should hold by construction did not."""


@dataclass(frozen=True)
class ModelConstants:
    A: float
    a0: float
    a1: float
    xi0: float
    residual: float

    def as_dict(self) -> dict[str, float]:
        return {"A": self.A, "a0": self.a0, "a1": self.a1, "xi0": self.xi0, "residual": self.residual}


def _f_prime(t: float) -> float:
    return specfun.f_and_derivatives(t)[1]


def solve_model_constants() -> ModelConstants:
    lo, hi = ROOT_BRACKET
    f_lo, f_hi = _f_prime(lo), _f_prime(hi)
    if not (f_lo > 0 > f_hi):
        raise ConsistencyError(
            f"F' does not change sign on {ROOT_BRACKET}: F'({lo})={f_lo}, F'({hi})={f_hi}"
        )
    A = brentq(_f_prime, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    h0 = specfun.h_product(0, A)
    a0 = (A * h0) ** 2
    radicand = 1.0 / (2.0 * A * A) + 1.0 / (2.0 * a0) - 2.0
    if radicand <= 0:
        raise ConsistencyError(f"a1 radicand is not positive: {radicand}")
    a1 = a0 * math.sqrt(radicand)
    xi0 = 1.0 / (math.sqrt(2.0) * h0)
    return ModelConstants(A=A, a0=a0, a1=a1, xi0=xi0, residual=abs(_f_prime(A)))


def curvature_identity(beta: float, consts: ModelConstants | None = None) -> tuple[float, float, float]:
    """Closed-form minimiser, minimum and curvature of R -> mu1(R; beta).

    Returns ``(sqrt(2) xi0 / beta, -beta^2 a0, 2 beta^4 a1^2)``.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    c = consts or solve_model_constants()
    return math.sqrt(2.0) * c.xi0 / beta, -beta * beta * c.a0, 2.0 * beta**4 * c.a1**2
