import math

import numpy as np
import pytest

from conedelta import axisym as ax
from conedelta import effective


@pytest.fixture(scope="module")
def coarse():
    grid = ax.AxiGrid(spacing=0.08)
    op = ax.assemble(0.25, grid)
    vals, vecs, res = ax.lowest_eigs(op, 2, return_vectors=True)
    return op, vals, vecs, res


def test_grid_layout():
    g = ax.AxiGrid(r_max=1.0, z_min=-0.5, z_max=1.0, spacing=0.25)
    assert g.nr == 4 and g.nz == 5
    np.testing.assert_allclose(g.r, [0, 0.25, 0.5, 0.75])
    np.testing.assert_allclose(g.z, [-0.25, 0, 0.25, 0.5, 0.75])
    with pytest.raises(ax.AssemblyError):
        ax.AxiGrid(spacing=0.03)
    with pytest.raises(ax.AssemblyError):
        ax.AxiGrid(z_min=1.0)


def test_stiffness_symmetric_and_mass_positive():
    op = ax.assemble(0.3, ax.AxiGrid(r_max=2, z_min=-1, z_max=2, spacing=0.1))
    K = op.stiffness
    assert (K != K.T).nnz == 0
    assert np.all(op.mass > 0)


def test_free_form_nonnegative():
    op = ax.assemble(0.3, ax.AxiGrid(r_max=2, z_min=-1, z_max=2, spacing=0.1), delta_weight=0.0)
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert ax.rayleigh(op, rng.normal(size=op.grid.size)) >= 0
    assert np.min(np.linalg.eigvalsh(op.stiffness.toarray())) > -1e-12


def test_delta_term_single_node():
    grid = ax.AxiGrid(r_max=2, z_min=-1, z_max=2, spacing=0.1)
    with_d = ax.assemble(0.3, grid)
    free = ax.assemble(0.3, grid, delta_weight=0.0)
    node = with_d.delta_nodes[4]
    u = np.zeros(grid.size)
    u[node] = 1.0
    z = 5 * 0.1
    assert u @ (with_d.stiffness @ u) - u @ (free.stiffness @ u) == pytest.approx(-math.sqrt(2) * z * 0.1)


def test_total_delta_weight():
    grid = ax.AxiGrid(spacing=0.02)
    op = ax.assemble(0.25, grid)
    zmax = grid.spacing * op.delta_nodes.size
    assert abs(op.delta_weights.sum() - math.sqrt(2) * zmax**2 / 2) <= 2 * grid.spacing * zmax


def test_away_from_cone_is_nonnegative():
    grid = ax.AxiGrid(r_max=2, z_min=-1, z_max=2, spacing=0.1)
    op = ax.assemble(0.3, grid)
    rng = np.random.default_rng(1)
    u = rng.normal(size=grid.size)
    u[op.delta_nodes] = 0.0
    assert ax.rayleigh(op, u) >= 0


def test_ground_state(coarse):
    op, vals, vecs, res = coarse
    assert np.all(res < 1e-8)
    assert vals[0] < effective.ess_threshold(0.25)
    assert vals[0] == pytest.approx(-0.5070, rel=0.15)
    assert ax.boundary_mass_fraction(op, vecs[:, 0]) < 1e-4


def test_deterministic(coarse):
    op, vals, _, _ = coarse
    again = ax.lowest_eigs(op, 2)
    np.testing.assert_array_equal(vals, again)


def test_stronger_delta_lowers_energy(coarse):
    op, vals, _, _ = coarse
    strong = ax.assemble(0.25, op.grid, delta_weight=2.0)
    assert ax.lowest_eigs(strong, 1, shift=-3.0)[0] < vals[0]


def test_refinement_and_richardson():
    from conedelta import report
    e = {s: ax.lowest_eigs(ax.assemble(0.25, ax.AxiGrid(spacing=s)), 1)[0] for s in (0.2, 0.1, 0.05)}
    # the limit from the two finer grids must explain the coarse-grid error with second order
    limit = report.richardson([(0.1, e[0.1]), (0.05, e[0.05])], 2)
    assert abs(e[0.2] - limit) / abs(e[0.1] - limit) >= 3


def test_tracks_reduced_model_at_small_h():
    op = ax.assemble(0.05, ax.AxiGrid(spacing=0.04))
    vals, vecs, _ = ax.lowest_eigs(op, 1, return_vectors=True)
    zc, _, _ = ax.localization_profile(op, vecs[:, 0])
    p = effective.eigen_bounds(effective.from_h(0.05, n_max=1), 1)[0]
    assert vals[0] == pytest.approx(p.upper, abs=5e-3)
    assert abs(zc - 1.62) < 0.05


def test_spread_shrinks_with_h():
    spreads = []
    for h in (0.35, 0.25):
        op = ax.assemble(h, ax.AxiGrid(spacing=0.08))
        _, vecs, _ = ax.lowest_eigs(op, 1, return_vectors=True)
        spreads.append(ax.localization_profile(op, vecs[:, 0])[1])
    assert spreads[1] < spreads[0]


def test_errors():
    op = ax.assemble(0.3, ax.AxiGrid(r_max=2, z_min=-1, z_max=2, spacing=0.1))
    with pytest.raises(ValueError):
        ax.localization_profile(op, np.zeros(op.grid.size))
    with pytest.raises(ValueError):
        ax.lowest_eigs(op, 11)
    with pytest.raises(ValueError):
        ax.assemble(0.0, op.grid)
    with pytest.raises(ax.ConvergenceError):
        ax.lowest_eigs(op, 1, tol=1e-30)
