"""Two-point numerical fluxes: Rusanov, HLLE and Chandrashekar's EC/KEP flux.

All fluxes take left and right states of shape (..., 4) and return the
flux along ``axis`` with the same shape. The public functions validate
admissibility; the leading-underscore kernels are the unchecked hot paths
used by the spatial operator, which validates the whole field once.
"""

import enum

import numpy as np

from blendsem.physics import (
    _max_wave_speed,
    _physical_flux,
    _pressure,
    check_admissible,
)


class FluxKind(enum.Enum):
    RUSANOV = "rusanov"
    HLLE = "hlle"
    EC_KEP = "ec_kep"

    @classmethod
    def parse(cls, name):
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown flux {name!r}; expected one of {choices}") from None


def ln_mean(a, b):
    """Logarithmic mean (a - b) / (ln a - ln b), stable for a close to b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    f = (a - b) / (a + b)
    u = f * f
    close = np.abs(a - b) < 1e-4 * b
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(close, 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0,
                         np.log1p(2.0 * f / (1.0 - f)) / (2.0 * f))
    return 0.5 * (a + b) / ratio


def _rusanov(ul, ur, gamma, axis):
    lam = np.maximum(_max_wave_speed(ul, gamma, axis), _max_wave_speed(ur, gamma, axis))
    return 0.5 * (_physical_flux(ul, gamma, axis) + _physical_flux(ur, gamma, axis)) \
        - 0.5 * lam[..., None] * (ur - ul)


def hlle_wave_speeds(ul, ur, gamma, axis):
    """Einfeldt bounds (SL, SR) using Roe averages."""
    rho_l, rho_r = ul[..., 0], ur[..., 0]
    p_l, p_r = _pressure(ul, gamma), _pressure(ur, gamma)
    vl = ul[..., 1:3] / rho_l[..., None]
    vr = ur[..., 1:3] / rho_r[..., None]
    h_l = (ul[..., 3] + p_l) / rho_l
    h_r = (ur[..., 3] + p_r) / rho_r
    sl, sr = np.sqrt(rho_l), np.sqrt(rho_r)
    wl = (sl / (sl + sr))[..., None]
    v_roe = wl * vl + (1.0 - wl) * vr
    h_roe = wl[..., 0] * h_l + (1.0 - wl[..., 0]) * h_r
    c_roe = np.sqrt(np.maximum((gamma - 1.0) * (h_roe - 0.5 * np.sum(v_roe**2, axis=-1)), 0.0))
    c_l = np.sqrt(gamma * p_l / rho_l)
    c_r = np.sqrt(gamma * p_r / rho_r)
    vn_roe = v_roe[..., axis]
    s_left = np.minimum(vl[..., axis] - c_l, vn_roe - c_roe)
    s_right = np.maximum(vr[..., axis] + c_r, vn_roe + c_roe)
    return s_left, s_right


def _hlle(ul, ur, gamma, axis):
    s_left, s_right = hlle_wave_speeds(ul, ur, gamma, axis)
    fl = _physical_flux(ul, gamma, axis)
    fr = _physical_flux(ur, gamma, axis)
    width = s_right - s_left
    degenerate = width < 1e-14
    safe_width = np.where(degenerate, 1.0, width)[..., None]
    sl, sr = s_left[..., None], s_right[..., None]
    mid = (sr * fl - sl * fr + sl * sr * (ur - ul)) / safe_width
    mid = np.where(degenerate[..., None], 0.5 * (fl + fr), mid)
    out = np.where(sl >= 0.0, fl, np.where(sr <= 0.0, fr, mid))
    return out


def _ec_kep(ul, ur, gamma, axis):
    rho_l, rho_r = ul[..., 0], ur[..., 0]
    v1l, v2l = ul[..., 1] / rho_l, ul[..., 2] / rho_l
    v1r, v2r = ur[..., 1] / rho_r, ur[..., 2] / rho_r
    beta_l = 0.5 * rho_l / _pressure(ul, gamma)
    beta_r = 0.5 * rho_r / _pressure(ur, gamma)

    rho_ln = ln_mean(rho_l, rho_r)
    beta_ln = ln_mean(beta_l, beta_r)
    rho_avg = 0.5 * (rho_l + rho_r)
    beta_avg = 0.5 * (beta_l + beta_r)
    v1_avg = 0.5 * (v1l + v1r)
    v2_avg = 0.5 * (v2l + v2r)
    p_mean = 0.5 * rho_avg / beta_avg
    vel_sq_avg = 0.5 * (v1l**2 + v1r**2 + v2l**2 + v2r**2)

    f = np.empty(np.broadcast_shapes(ul.shape, ur.shape))
    vn_avg = v1_avg if axis == 0 else v2_avg
    mass = rho_ln * vn_avg
    f[..., 0] = mass
    f[..., 1] = mass * v1_avg
    f[..., 2] = mass * v2_avg
    f[..., 1 + axis] += p_mean
    f[..., 3] = mass * 0.5 * (1.0 / ((gamma - 1.0) * beta_ln) - vel_sq_avg) \
        + f[..., 1] * v1_avg + f[..., 2] * v2_avg
    return f


_KERNELS = {
    FluxKind.RUSANOV: _rusanov,
    FluxKind.HLLE: _hlle,
    FluxKind.EC_KEP: _ec_kep,
}


def flux_kernel(kind):
    """Unchecked kernel ``f(ul, ur, gamma, axis)`` for a FluxKind."""
    return _KERNELS[FluxKind.parse(kind.value if isinstance(kind, FluxKind) else kind)]


def _checked(kernel, ul, ur, gas, axis):
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    check_admissible(ul, gas)
    check_admissible(ur, gas)
    return kernel(ul, ur, gas.gamma, axis)


def rusanov_flux(ul, ur, gas, axis):
    """Local Lax-Friedrichs flux with the larger of the two |v_n| + c."""
    return _checked(_rusanov, ul, ur, gas, axis)


def hlle_flux(ul, ur, gas, axis):
    """HLL flux with Einfeldt's Roe-averaged wave-speed bounds."""
    return _checked(_hlle, ul, ur, gas, axis)


def ec_kep_flux(ul, ur, gas, axis):
    """Chandrashekar's entropy-conserving, kinetic-energy-preserving flux."""
    return _checked(_ec_kep, ul, ur, gas, axis)


def hlle_intermediate_state(ul, ur, gas, axis):
    """The HLL average state between the Einfeldt wave bounds."""
    ul = np.asarray(ul, dtype=float)
    ur = np.asarray(ur, dtype=float)
    check_admissible(ul, gas)
    check_admissible(ur, gas)
    g = gas.gamma
    s_left, s_right = hlle_wave_speeds(ul, ur, g, axis)
    fl = _physical_flux(ul, g, axis)
    fr = _physical_flux(ur, g, axis)
    sl, sr = s_left[..., None], s_right[..., None]
    return (sr * ur - sl * ul - (fr - fl)) / (sr - sl)
