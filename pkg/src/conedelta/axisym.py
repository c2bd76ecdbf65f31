r"""Direct discretisation of the rotation-invariant reduced cone form.

For u = u(r, z), with the angular factor 2 pi divided out, the form is

.. math::
    q_h(u) = \iint (h^2 |\partial_z u|^2 + |\partial_r u|^2)\, r\,dr\,dz
             - \sqrt{2}\int_0^\infty z\,|u(z, z)|^2\,dz,

with the delta-interaction on the 45 degree cone line r = z. The grid is a
uniform square (r, z) lattice, so the cone line runs through nodes.

Cell-centred (edge) finite volumes: an r-edge between columns i and i+1
carries weight r_{i+1/2}; a z-edge in column i carries weight r_i, or s/8 on
the axis (the dual cell [0, s/2]). Mass is lumped on dual cells: r_i s^2,
and s^3/8 on the axis, so it is positive definite. The artificial outer
boundary is Dirichlet; the axis carries the natural condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

DELTA_STRENGTH = math.sqrt(2.0)
DEFAULT_SHIFT = -0.6
MAX_ITER = 5000


class AssemblyError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


def _steps(length: float, spacing: float, name: str) -> int:
    q = length / spacing
    n = int(round(q))
    if n < 2 or abs(q - n) > 1e-9 * max(1.0, q):
        raise AssemblyError(f"spacing {spacing} does not divide {name} = {length}")
    return n


@dataclass(frozen=True)
class AxiGrid:
    r_max: float = 8.0
    z_min: float = -2.0
    z_max: float = 8.0
    spacing: float = 0.02

    def __post_init__(self):
        if not (self.r_max > 0 and self.z_max > 0 and self.z_min < 0 and self.spacing > 0):
            raise AssemblyError(f"invalid box r_max={self.r_max}, z=[{self.z_min}, {self.z_max}], spacing={self.spacing}")
        _steps(self.r_max, self.spacing, "r_max")
        _steps(self.z_max, self.spacing, "z_max")
        _steps(-self.z_min, self.spacing, "|z_min|")

    @property
    def nr(self) -> int:
        # columns i = 0 .. nr-1; column nr (r = r_max) is Dirichlet
        return _steps(self.r_max, self.spacing, "r_max")

    @property
    def nz(self) -> int:
        # interior rows j = 1 .. nz; both z ends are Dirichlet
        return _steps(-self.z_min, self.spacing, "|z_min|") + _steps(self.z_max, self.spacing, "z_max") - 1

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.nr) * self.spacing

    @property
    def z(self) -> np.ndarray:
        return -_steps(-self.z_min, self.spacing, "|z_min|") * self.spacing + np.arange(1, self.nz + 1) * self.spacing

    @property
    def size(self) -> int:
        return self.nr * self.nz

    def index(self, i, j):
        """Flat index of column i (r), row j (z, zero-based interior row)."""
        return np.asarray(j) * self.nr + np.asarray(i)


@dataclass(frozen=True, eq=False)
class AxiOperator:
    grid: AxiGrid
    h: float
    stiffness: sp.csr_matrix
    mass: np.ndarray
    delta_nodes: np.ndarray
    delta_weights: np.ndarray


def _diagonal_nodes(grid: AxiGrid):
    s = grid.spacing
    z0 = _steps(-grid.z_min, s, "|z_min|")
    # cone-line nodes (j s, j s) with j >= 1 strictly inside the box
    jmax = min(grid.nr - 1, z0 + grid.nz - z0)
    js = np.arange(1, jmax + 1)
    rows = z0 + js - 1
    keep = (js < grid.nr) & (rows < grid.nz)
    js, rows = js[keep], rows[keep]
    if js.size == 0:
        raise AssemblyError("cone line misses every interior node")
    zc = js * s
    if np.max(np.abs(grid.r[js] - grid.z[rows])) > 1e-9 * s:
        raise AssemblyError("cone line does not pass through grid nodes")
    return grid.index(js, rows), DELTA_STRENGTH * zc * s


def assemble(h: float, grid: AxiGrid, delta_weight: float = 1.0) -> AxiOperator:
    """Stiffness and lumped mass of the reduced form at parameter ``h``.

    ``delta_weight`` scales the cone-line term (0 gives the free form).
    """
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    s = grid.spacing
    nr, nz = grid.nr, grid.nz
    r = grid.r
    idx = np.arange(grid.size).reshape(nz, nr)

    # r-edges, including the edge to the Dirichlet column at r_max
    wr = (r + 0.5 * s)
    w_r = np.broadcast_to(wr, (nz, nr))
    # z-edges, including those to the Dirichlet rows
    wz = h * h * np.where(r > 0, r, s / 8.0)
    diag = np.zeros((nz, nr))
    diag += w_r
    diag[:, 1:] += w_r[:, :-1]
    diag += 2.0 * wz[None, :]

    rows = [idx[:, :-1].ravel(), idx[:-1, :].ravel()]
    cols = [idx[:, 1:].ravel(), idx[1:, :].ravel()]
    vals = [-w_r[:, :-1].ravel(), -np.broadcast_to(wz, (nz - 1, nr)).ravel()]
    dnodes, dweights = _diagonal_nodes(grid)
    d = diag.ravel()
    d[dnodes] -= delta_weight * dweights

    upper = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(grid.size, grid.size))
    K = (upper + upper.T + sp.diags(d)).tocsr()
    K.sort_indices()
    mass = np.broadcast_to(np.where(r > 0, r * s * s, s**3 / 8.0), (nz, nr)).ravel().copy()
    return AxiOperator(grid=grid, h=float(h), stiffness=K, mass=mass,
                       delta_nodes=dnodes, delta_weights=delta_weight * dweights)


def rayleigh(op: AxiOperator, u: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    return float(u @ (op.stiffness @ u)) / float(u @ (op.mass * u))


def lowest_eigs(op: AxiOperator, k: int = 1, tol: float = 1e-8, seed: int = 0,
                shift: float = DEFAULT_SHIFT, return_vectors: bool = False):
    """The k lowest generalised eigenvalues of (stiffness, mass).

    Shift-invert Lanczos about ``shift`` (below the lowest eigenvalue) with a
    seeded start vector. Residuals are ``||(K - lam M) v|| / ||M v||``.
    """
    if not 1 <= k <= 10:
        raise ValueError(f"k must lie in [1, 10], got {k}")
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(op.grid.size)
    M = sp.diags(op.mass).tocsc()
    try:
        vals, vecs = eigsh(op.stiffness.tocsc(), k=k, M=M, sigma=shift, which="LM",
                           v0=v0, maxiter=MAX_ITER, tol=1e-12)
    except Exception as exc:  # ARPACK reports non-convergence as its own exception type
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    res = np.array([
        np.linalg.norm(op.stiffness @ v - lam * op.mass * v) / np.linalg.norm(op.mass * v)
        for lam, v in zip(vals, vecs.T)
    ])
    if np.any(res > tol):
        raise ConvergenceError(f"residuals above tol={tol}: {res.tolist()}", residuals=res)
    if return_vectors:
        return vals, vecs, res
    return vals


def localization_profile(op: AxiOperator, eigvec) -> tuple[float, float, float]:
    """Mass-weighted z centroid and the z and r standard deviations."""
    v = np.asarray(eigvec, dtype=float)
    w = op.mass * v * v
    tot = w.sum()
    if not tot > 0:
        raise ValueError("eigenvector has zero mass")
    g = op.grid
    zz = np.repeat(g.z, g.nr)
    rr = np.tile(g.r, g.nz)
    zc = float((w * zz).sum() / tot)
    rc = float((w * rr).sum() / tot)
    zs = math.sqrt(float((w * (zz - zc) ** 2).sum() / tot))
    rs = math.sqrt(float((w * (rr - rc) ** 2).sum() / tot))
    return zc, zs, rs


def boundary_mass_fraction(op: AxiOperator, eigvec) -> float:
    """Share of the eigenvector's mass on nodes next to the Dirichlet boundary."""
    v = np.asarray(eigvec, dtype=float)
    w = (op.mass * v * v).reshape(op.grid.nz, op.grid.nr)
    edge = w[0, :].sum() + w[-1, :].sum() + w[1:-1, -1].sum()
    return float(edge / w.sum())
