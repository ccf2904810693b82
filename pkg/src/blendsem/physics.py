"""Compressible Euler physics for a calorically perfect gas.

States are arrays whose last axis holds (rho, rho*v1, rho*v2, rho*E).
Every function broadcasts over the leading axes.
"""

from dataclasses import dataclass

import numpy as np

from blendsem.errors import InadmissibleStateError, NonPositiveDensityError

NVARS = 4


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")


def state(rho, v1, v2, p, gas):
    """Conservative state from primitive variables."""
    rho, v1, v2, p = np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                           for a in (rho, v1, v2, p)))
    u = np.empty(rho.shape + (NVARS,))
    u[..., 0] = rho
    u[..., 1] = rho * v1
    u[..., 2] = rho * v2
    u[..., 3] = p / (gas.gamma - 1.0) + 0.5 * rho * (v1**2 + v2**2)
    return u


def _pressure(u, gamma):
    return (gamma - 1.0) * (u[..., 3] - 0.5 * (u[..., 1]**2 + u[..., 2]**2) / u[..., 0])


def pressure(u, gas):
    """p = (gamma - 1) (rho E - |m|^2 / (2 rho)); may be <= 0."""
    u = np.asarray(u, dtype=float)
    if np.any(u[..., 0] <= 0.0):
        raise NonPositiveDensityError("pressure undefined for non-positive density")
    return _pressure(u, gas.gamma)


def primitives(u, gas):
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    return rho, u[..., 1] / rho, u[..., 2] / rho, _pressure(u, gas.gamma)


def is_admissible(u, gas):
    """Elementwise predicate rho > 0 and p > 0."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    ok = rho > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        p = _pressure(u, gas.gamma)
    return ok & (p > 0.0)


def check_admissible(u, gas, error=InadmissibleStateError, stage=None):
    """Raise ``error`` locating the first inadmissible point of ``u``.

    For arrays laid out as (K, N+1, N+1, 4) the location is reported as an
    element index and an (i, j) node pair.
    """
    u = np.asarray(u, dtype=float)
    ok = is_admissible(u, gas) & np.all(np.isfinite(u), axis=-1)
    if ok.all():
        return
    idx = np.unravel_index(np.flatnonzero(~ok)[0], ok.shape)
    rho = float(u[idx + (0,)])
    if rho <= 0.0 or not np.isfinite(rho):
        quantity, value = "density", rho
    else:
        quantity, value = "pressure", float(_pressure(u[idx], gas.gamma))
    element = int(idx[0]) if u.ndim == 4 else None
    node = tuple(int(i) for i in idx[1:]) if u.ndim == 4 else tuple(int(i) for i in idx)
    where = f"element {element}, node {node}" if element is not None else f"index {node}"
    raise error(f"inadmissible state ({quantity} = {value:.6g}) at {where}",
                element=element, node=node, quantity=quantity, value=value,
                stage=stage)


def _physical_flux(u, gamma, axis):
    rho = u[..., 0]
    vn = u[..., 1 + axis] / rho
    p = _pressure(u, gamma)
    f = u * vn[..., None]
    f[..., 1 + axis] += p
    f[..., 3] += p * vn
    return f


def physical_flux(u, gas, axis):
    """Euler flux along ``axis`` (0 = x, 1 = y)."""
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    return _physical_flux(u, gas.gamma, axis)


def _sound_speed(u, gamma):
    return np.sqrt(gamma * _pressure(u, gamma) / u[..., 0])


def sound_speed(u, gas):
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    return _sound_speed(u, gas.gamma)


def _max_wave_speed(u, gamma, axis):
    return np.abs(u[..., 1 + axis] / u[..., 0]) + _sound_speed(u, gamma)


def max_wave_speed(u, gas, axis):
    """|v_axis| + c."""
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    return _max_wave_speed(u, gas.gamma, axis)


def _entropy_density(u, gamma):
    rho = u[..., 0]
    s = np.log(_pressure(u, gamma)) - gamma * np.log(rho)
    return -rho * s / (gamma - 1.0)


def entropy_density(u, gas):
    """Mathematical entropy -rho s / (gamma - 1) with s = ln(p rho^-gamma)."""
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    return _entropy_density(u, gas.gamma)


def entropy_variables(u, gas):
    """Derivative of the entropy density with respect to the conserved state."""
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    g = gas.gamma
    rho, v1, v2, p = primitives(u, gas)
    s = np.log(p) - g * np.log(rho)
    w = np.empty_like(u)
    w[..., 0] = (g - s) / (g - 1.0) - 0.5 * rho * (v1**2 + v2**2) / p
    w[..., 1] = rho * v1 / p
    w[..., 2] = rho * v2 / p
    w[..., 3] = -rho / p
    return w


def entropy_flux_potential(u, gas, axis):
    u = np.asarray(u, dtype=float)
    return u[..., 1 + axis].copy()
