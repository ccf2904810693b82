import numpy as np
import pytest

from blendsem.errors import InadmissibleStateError
from blendsem.fluxes import flux_kernel
from blendsem.lgl import build_operators
from blendsem.physics import _physical_flux, entropy_variables, state
from blendsem.spatial import (
    Mesh2D,
    SpatialOperator,
    blended_rhs,
    dg_rhs,
    fv_rhs,
)


def smooth_field(mesh, ops, gas, rng=None):
    xy = mesh.node_coordinates(ops)
    x, y = xy[..., 0], xy[..., 1]
    rho = 1.0 + 0.3 * np.sin(2 * np.pi * x) * np.cos(np.pi * y)
    if rng is not None:
        rho = rho + 0.05 * rng.random(rho.shape)
    p = 1.0 + 0.2 * np.cos(2 * np.pi * x + 0.3)
    return state(rho, 0.3 * np.sin(np.pi * y), 0.2 + 0.1 * x, p, gas)


def weighted_sum(mesh, ops, rhs):
    return np.einsum("ij,kijv->v", mesh.quadrature_weights(ops), rhs)


def test_mesh_geometry():
    mesh = Mesh2D(4, 3, 0.0, 2.0, -1.0, 2.0)
    assert mesh.num_elements == 12
    assert mesh.dx == 0.5 and mesh.dy == 1.0
    assert mesh.jacobian == pytest.approx(0.125)
    assert mesh.neighbors(0) == (3, 1, 8, 4)
    ops = build_operators(2)
    xy = mesh.node_coordinates(ops)
    assert xy[..., 0].min() == 0.0 and xy[..., 0].max() == 2.0
    assert xy[..., 1].min() == -1.0 and xy[..., 1].max() == 2.0
    assert mesh.quadrature_weights(ops).sum() * mesh.num_elements == pytest.approx(mesh.area)


@pytest.mark.parametrize("n", [1, 3, 6])
@pytest.mark.parametrize("form", ["standard", "split"])
@pytest.mark.parametrize("surface", ["rusanov", "hlle"])
def test_free_stream(n, form, surface, gas):
    ops = build_operators(n)
    mesh = Mesh2D(3, 4, 0.0, 1.0, 0.0, 2.0)
    u = state(np.ones((mesh.num_elements, n + 1, n + 1)), 0.1, 0.2, 1.0, gas)
    dg, fv = SpatialOperator(ops, mesh, gas, surface, form).evaluate(u)
    assert np.abs(dg).max() <= 1e-12
    assert np.abs(fv).max() <= 1e-12
    for a in (0.0, 0.3, 1.0):
        total = blended_rhs(dg, fv, np.full(mesh.num_elements, a)).total
        assert np.abs(total).max() <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 7])
@pytest.mark.parametrize("form", ["standard", "split"])
@pytest.mark.parametrize("surface", ["rusanov", "hlle"])
def test_conservation(n, form, surface, gas, rng):
    ops = build_operators(n)
    mesh = Mesh2D(4, 3, 0.0, 1.0, 0.0, 2.0)
    u = smooth_field(mesh, ops, gas, rng)
    dg, fv = SpatialOperator(ops, mesh, gas, surface, form).evaluate(u)
    assert np.abs(weighted_sum(mesh, ops, dg)).max() <= 1e-11
    assert np.abs(weighted_sum(mesh, ops, fv)).max() <= 1e-12
    alpha = rng.uniform(0, 1, mesh.num_elements)
    total = blended_rhs(dg, fv, alpha).total
    assert np.abs(weighted_sum(mesh, ops, total)).max() <= 1e-11


def _advection_field(ops, mesh, gas, v=(0.7, 0.0), p=1.0, amp=0.2):
    xy = mesh.node_coordinates(ops)
    xi = 2 * (xy[..., 0] - mesh.x0) / mesh.dx - 1.0
    rho = 1.0 + amp * (1.0 - xi**2)
    drho = amp * (-2.0 * xi) * 2.0 / mesh.dx
    return state(rho, v[0], v[1], p, gas), drho


def test_standard_form_matches_analytic_advection(gas):
    ops = build_operators(3)
    mesh = Mesh2D(1, 1, 0.0, 1.0, 0.0, 1.0)
    u, drho = _advection_field(ops, mesh, gas)
    v = 0.7
    dg = dg_rhs(u, ops, mesh, gas, "rusanov", "standard")
    expected = np.stack([-v * drho, -v * v * drho, 0 * drho, -0.5 * v**3 * drho], axis=-1)
    np.testing.assert_allclose(dg, expected, atol=1e-10)


def test_flux_differencing_with_central_flux_is_standard_form(gas, rng):
    ops = build_operators(4)
    mesh = Mesh2D(3, 2)
    u = smooth_field(mesh, ops, gas, rng)

    def central(ul, ur, gamma, axis):
        return 0.5 * (_physical_flux(ul, gamma, axis) + _physical_flux(ur, gamma, axis))

    std = dg_rhs(u, ops, mesh, gas, "rusanov", "standard")
    split = dg_rhs(u, ops, mesh, gas, "rusanov", "split", volume_flux=central)
    np.testing.assert_allclose(split, std, atol=1e-10)


def test_ec_split_form_approximates_advection(gas):
    ops = build_operators(3)
    mesh = Mesh2D(1, 1, 0.0, 1.0, 0.0, 1.0)
    gaps = []
    for amp in (0.04, 0.02, 0.01):
        u, _ = _advection_field(ops, mesh, gas, amp=amp)
        split = dg_rhs(u, ops, mesh, gas, "rusanov", "split")
        std = dg_rhs(u, ops, mesh, gas, "rusanov", "standard")
        gaps.append(np.abs(split - std).max())
    # log means differ from arithmetic means at second order in the jump
    rates = np.log2(np.array(gaps[:-1]) / np.array(gaps[1:]))
    assert np.all(rates > 1.9)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_split_form_conserves_entropy(n, gas, rng):
    ops = build_operators(n)
    mesh = Mesh2D(3, 4, 0.0, 1.0, 0.0, 2.0)
    u = smooth_field(mesh, ops, gas, rng)
    dg = dg_rhs(u, ops, mesh, gas, "ec_kep", "split")
    w = entropy_variables(u, gas)
    production = np.einsum("ij,kijv,kijv->", mesh.quadrature_weights(ops), w, dg)
    assert abs(production) <= 1e-10


def test_dissipative_surfaces_produce_no_entropy(gas, rng):
    ops = build_operators(3)
    mesh = Mesh2D(3, 3)
    u = smooth_field(mesh, ops, gas, rng)
    w = entropy_variables(u, gas)
    wq = mesh.quadrature_weights(ops)
    for surface in ("rusanov", "hlle"):
        dg, fv = SpatialOperator(ops, mesh, gas, surface, "split").evaluate(u)
        assert np.einsum("ij,kijv,kijv->", wq, w, dg) <= 1e-12
        assert np.einsum("ij,kijv,kijv->", wq, w, fv) <= 1e-12


def two_cell_fv_oracle(ua, ub, h0, h1, gas, surface):
    """Two periodic finite-volume cells of widths h0, h1 along x."""
    f = flux_kernel(surface)
    f_ab = f(ua, ub, gas.gamma, 0)
    f_ba = f(ub, ua, gas.gamma, 0)
    return (f_ba - f_ab) / h0, (f_ab - f_ba) / h1


@pytest.mark.parametrize("surface", ["rusanov", "hlle"])
def test_fv_two_cell_reduction(surface, gas):
    ops = build_operators(1)
    mesh = Mesh2D(1, 1, 0.0, 2.0, 0.0, 2.0)
    ua = state(1.0, 0.3, 0.0, 1.0, gas)
    ub = state(0.6, -0.2, 0.0, 0.5, gas)
    u = np.empty((1, 2, 2, 4))
    u[0, 0, :], u[0, 1, :] = ua, ub
    rhs = fv_rhs(u, ops, mesh, gas, surface)
    jx = mesh.metric[0]
    ra, rb = two_cell_fv_oracle(ua, ub, ops.weights[0] * jx, ops.weights[1] * jx, gas, surface)
    # the y-sweep sees a constant state along each node column
    np.testing.assert_allclose(rhs[0, 0, 0], ra, atol=1e-14)
    np.testing.assert_allclose(rhs[0, 1, 1], rb, atol=1e-14)


def test_face_flux_shared_between_dg_and_fv(gas, rng):
    ops = build_operators(3)
    mesh = Mesh2D(3, 3)
    u = smooth_field(mesh, ops, gas, rng)
    op = SpatialOperator(ops, mesh, gas, "hlle", "standard")
    dg, fv = op.evaluate(u)
    # element-wise totals of both operators equal the same face-flux balance
    wq = mesh.quadrature_weights(ops)
    np.testing.assert_allclose(np.einsum("ij,kijv->kv", wq, dg),
                               np.einsum("ij,kijv->kv", wq, fv), atol=1e-12)


def test_inadmissible_input_located(gas):
    ops = build_operators(2)
    mesh = Mesh2D(2, 2)
    u = state(np.ones((4, 3, 3)), 0.0, 0.0, 1.0, gas)
    u[2, 1, 0, 3] = -1.0
    with pytest.raises(InadmissibleStateError) as info:
        SpatialOperator(ops, mesh, gas).evaluate(u)
    assert info.value.element == 2 and info.value.node == (1, 0)
    assert info.value.quantity == "pressure"


def test_blend_endpoints(rng):
    dg, fv = rng.normal(size=(5, 3, 3, 4)), rng.normal(size=(5, 3, 3, 4))
    np.testing.assert_array_equal(blended_rhs(dg, fv, np.zeros(5)).total, dg)
    np.testing.assert_array_equal(blended_rhs(dg, fv, np.ones(5)).total, fv)
    np.testing.assert_allclose(blended_rhs(dg, fv, np.full(5, 0.5)).total, 0.5 * (dg + fv),
                               rtol=0, atol=0)
    with pytest.raises(ValueError):
        blended_rhs(dg, fv, np.full(5, 1.2))
    with pytest.raises(ValueError):
        blended_rhs(dg, fv, np.full(5, -0.1))
