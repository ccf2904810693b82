"""Hybrid DGSEM / subcell-FV semi-discretization on a periodic Cartesian mesh.

Solution arrays have shape (K, N+1, N+1, 4): element k = ey * Ex + ex,
node (i, j) with i along x and j along y, conserved variable last.
Both the DG and FV operators use the same element-face fluxes, so any
element-wise convex blend of the two stays conservative.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from blendsem.fluxes import FluxKind, flux_kernel
from blendsem.physics import NVARS, _physical_flux, check_admissible


class VolumeForm(enum.Enum):
    STANDARD = "standard"
    SPLIT = "split"

    @classmethod
    def parse(cls, name):
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown volume form {name!r}; expected standard or split") from None


@dataclass(frozen=True)
class Mesh2D:
    elements_x: int
    elements_y: int
    x0: float = -1.0
    x1: float = 1.0
    y0: float = -1.0
    y1: float = 1.0

    def __post_init__(self):
        if self.elements_x < 1 or self.elements_y < 1:
            raise ValueError("mesh needs at least one element per axis")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("domain bounds must be increasing")

    @property
    def num_elements(self):
        return self.elements_x * self.elements_y

    @property
    def dx(self):
        return (self.x1 - self.x0) / self.elements_x

    @property
    def dy(self):
        return (self.y1 - self.y0) / self.elements_y

    @property
    def metric(self):
        """Per-axis reference-to-physical scaling (dx/2, dy/2)."""
        return 0.5 * self.dx, 0.5 * self.dy

    @property
    def jacobian(self):
        return 0.25 * self.dx * self.dy

    @property
    def area(self):
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def element_index(self, ex, ey):
        return (ey % self.elements_y) * self.elements_x + (ex % self.elements_x)

    def element_position(self, k):
        return k % self.elements_x, k // self.elements_x

    def neighbors(self, k):
        """Periodic face neighbours (left, right, bottom, top)."""
        ex, ey = self.element_position(k)
        return (self.element_index(ex - 1, ey), self.element_index(ex + 1, ey),
                self.element_index(ex, ey - 1), self.element_index(ex, ey + 1))

    def node_coordinates(self, ops):
        """Physical (x, y) of every node, shape (K, N+1, N+1, 2)."""
        ex = np.arange(self.elements_x)
        ey = np.arange(self.elements_y)
        xi = ops.nodes
        x = self.x0 + (ex[:, None] + 0.5 * (xi[None, :] + 1.0)) * self.dx
        y = self.y0 + (ey[:, None] + 0.5 * (xi[None, :] + 1.0)) * self.dy
        n = ops.num_nodes
        xy = np.empty((self.elements_y, self.elements_x, n, n, 2))
        xy[..., 0] = x[None, :, :, None]
        xy[..., 1] = y[:, None, None, :]
        return xy.reshape(self.num_elements, n, n, 2)

    def quadrature_weights(self, ops):
        """omega_i omega_j J per node, shape (N+1, N+1)."""
        w = ops.weights
        return np.outer(w, w) * self.jacobian


@dataclass
class RhsField:
    """Blended time derivative together with the parts it was built from."""

    total: np.ndarray
    dg: np.ndarray
    fv: np.ndarray
    alpha: np.ndarray = field(default=None)


def _as_blocks(u, mesh, n):
    return u.reshape(mesh.elements_y, mesh.elements_x, n, n, NVARS)


class SpatialOperator:
    """Evaluates the DG and FV time derivatives of a solution field.

    ``volume_flux`` only matters for the split form; any unchecked two-point
    kernel ``f(ul, ur, gamma, axis)`` may be supplied.
    """

    def __init__(self, ops, mesh, gas, surface_flux=FluxKind.RUSANOV,
                 volume_form=VolumeForm.STANDARD, volume_flux=FluxKind.EC_KEP):
        self.ops = ops
        self.mesh = mesh
        self.gas = gas
        self.surface_flux = FluxKind.parse(surface_flux.value if isinstance(surface_flux, FluxKind)
                                           else surface_flux)
        self.volume_form = VolumeForm.parse(volume_form.value if isinstance(volume_form, VolumeForm)
                                            else volume_form)
        self._surface = flux_kernel(self.surface_flux)
        self._volume = volume_flux if callable(volume_flux) else flux_kernel(volume_flux)
        self.n = ops.num_nodes
        self._d = np.array(ops.deriv_matrix)
        self._w = np.array(ops.weights)

    def face_fluxes(self, u5):
        """Surface fluxes at the left (x) and bottom (y) face of every element.

        Returns ``fx`` of shape (Ey, Ex, N+1, 4) indexed by the y-node j and
        ``fy`` of shape (Ey, Ex, N+1, 4) indexed by the x-node i.
        """
        g = self.gas.gamma
        left = np.roll(u5[:, :, -1, :, :], 1, axis=1)
        fx = self._surface(left, u5[:, :, 0, :, :], g, 0)
        below = np.roll(u5[:, :, :, -1, :], 1, axis=0)
        fy = self._surface(below, u5[:, :, :, 0, :], g, 1)
        return fx, fy

    def _dg(self, u5, fx, fy):
        g = self.gas.gamma
        jx, jy = self.mesh.metric
        d, w, n = self._d, self._w, self.n
        fx_right = np.roll(fx, -1, axis=1)
        fy_top = np.roll(fy, -1, axis=0)

        f1 = _physical_flux(u5, g, 0)
        f2 = _physical_flux(u5, g, 1)
        if self.volume_form is VolumeForm.STANDARD:
            rhs = -np.einsum("im,yxmjv->yxijv", d, f1) / jx
            rhs -= np.einsum("jm,yximv->yxijv", d, f2) / jy
        else:
            fs = self._volume(u5[:, :, :, None, :, :], u5[:, :, None, :, :, :], g, 0)
            rhs = -2.0 / jx * np.einsum("im,yximjv->yxijv", d, fs)
            fs = self._volume(u5[:, :, :, :, None, :], u5[:, :, :, None, :, :], g, 1)
            rhs -= 2.0 / jy * np.einsum("jm,yxijmv->yxijv", d, fs)

        rhs[:, :, n - 1, :, :] += (f1[:, :, n - 1, :, :] - fx_right) / (jx * w[-1])
        rhs[:, :, 0, :, :] -= (f1[:, :, 0, :, :] - fx) / (jx * w[0])
        rhs[:, :, :, n - 1, :] += (f2[:, :, :, n - 1, :] - fy_top) / (jy * w[-1])
        rhs[:, :, :, 0, :] -= (f2[:, :, :, 0, :] - fy) / (jy * w[0])
        return rhs

    def _fv(self, u5, fx, fy):
        g = self.gas.gamma
        jx, jy = self.mesh.metric
        w = self._w
        ey, ex, n = u5.shape[0], u5.shape[1], self.n

        gx = np.empty((ey, ex, n + 1, n, NVARS))
        gx[:, :, 0] = fx
        gx[:, :, n] = np.roll(fx, -1, axis=1)
        gx[:, :, 1:n] = self._surface(u5[:, :, :-1], u5[:, :, 1:], g, 0)
        rhs = (gx[:, :, :-1] - gx[:, :, 1:]) / (jx * w[None, None, :, None, None])

        gy = np.empty((ey, ex, n, n + 1, NVARS))
        gy[:, :, :, 0] = fy
        gy[:, :, :, n] = np.roll(fy, -1, axis=0)
        gy[:, :, :, 1:n] = self._surface(u5[:, :, :, :-1], u5[:, :, :, 1:], g, 1)
        rhs += (gy[:, :, :, :-1] - gy[:, :, :, 1:]) / (jy * w[None, None, None, :, None])
        return rhs

    def evaluate(self, u, stage=None):
        """Return (dg_rhs, fv_rhs), both shaped like ``u``."""
        u = np.asarray(u, dtype=float)
        check_admissible(u, self.gas, stage=stage)
        u5 = _as_blocks(u, self.mesh, self.n)
        fx, fy = self.face_fluxes(u5)
        shape = u.shape
        return (self._dg(u5, fx, fy).reshape(shape),
                self._fv(u5, fx, fy).reshape(shape))


def dg_rhs(u, ops, mesh, gas, surface_flux=FluxKind.RUSANOV,
           volume_form=VolumeForm.STANDARD, volume_flux=FluxKind.EC_KEP):
    """High-order DGSEM time derivative (standard or flux-differencing volume term)."""
    op = SpatialOperator(ops, mesh, gas, surface_flux, volume_form, volume_flux)
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    u5 = _as_blocks(u, mesh, op.n)
    fx, fy = op.face_fluxes(u5)
    return op._dg(u5, fx, fy).reshape(u.shape)


def fv_rhs(u, ops, mesh, gas, surface_flux=FluxKind.RUSANOV):
    """First-order finite-volume time derivative on the LGL subcells."""
    op = SpatialOperator(ops, mesh, gas, surface_flux)
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    u5 = _as_blocks(u, mesh, op.n)
    fx, fy = op.face_fluxes(u5)
    return op._fv(u5, fx, fy).reshape(u.shape)


def blended_rhs(dg, fv, alpha):
    """Element-wise convex blend (1 - alpha) * dg + alpha * fv."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (dg.shape[0],):
        raise ValueError(f"alpha must have shape ({dg.shape[0]},), got {alpha.shape}")
    if np.any(alpha < 0.0) or np.any(alpha > 1.0) or not np.all(np.isfinite(alpha)):
        raise ValueError("blending coefficients must lie in [0, 1]")
    a = alpha[:, None, None, None]
    total = (1.0 - a) * dg + a * fv
    return RhsField(total=total, dg=dg, fv=fv, alpha=alpha.copy())
