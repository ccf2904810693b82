"""Modal-energy shock indicator on pressure and the neighbour propagation sweep."""

from dataclasses import dataclass, field

import numpy as np

from blendsem.physics import _pressure, check_admissible

SHARPNESS = 9.21024


@dataclass
class BlendField:
    """Per-element blending coefficients.

    ``alpha`` is the value used to assemble the time derivative and
    ``alpha_correction`` the increment added by the positivity limiter.
    """

    alpha: np.ndarray
    alpha_correction: np.ndarray = field(default=None)

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.alpha_correction is None:
            self.alpha_correction = np.zeros_like(self.alpha)
        else:
            self.alpha_correction = np.asarray(self.alpha_correction, dtype=float)

    @classmethod
    def zeros(cls, num_elements):
        return cls(np.zeros(num_elements))

    @property
    def effective(self):
        return self.alpha + self.alpha_correction

    def copy(self):
        return BlendField(self.alpha.copy(), self.alpha_correction.copy())


def threshold(degree):
    return 0.5 * 10.0 ** (-1.8 * (degree + 1) ** 0.25)


def shell_energy(p, ops):
    """max(E_N, E_{N-1}) of nodal values ``p`` (shape (K, N+1, N+1)).

    Mode shells are grouped by max(i, j) of the tensor Legendre indices.
    """
    v = ops.modal_transform
    m = np.einsum("ai,bj,kij->kab", v, v, np.asarray(p, dtype=float))
    e = m**2
    n = ops.degree
    shell = np.maximum.outer(np.arange(n + 1), np.arange(n + 1))
    total = e.sum(axis=(1, 2))
    top = e[:, shell == n].sum(axis=1)
    below_top = e[:, shell <= n - 1].sum(axis=1)
    second = e[:, shell == n - 1].sum(axis=1)
    tiny = total < 1e-28
    with np.errstate(divide="ignore", invalid="ignore"):
        e_n = np.where(tiny, 0.0, top / np.where(tiny, 1.0, total))
        e_nm1 = np.where(below_top > 0.0, second / np.where(below_top > 0.0, below_top, 1.0), 0.0)
    return np.where(tiny, 0.0, np.maximum(e_n, e_nm1))


def modal_energies(u, ops, gas):
    """Indicator value for every element of ``u`` (shape (K, N+1, N+1, 4))."""
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    return shell_energy(_pressure(u, gas.gamma), ops)


def modal_energy_indicator(u, ops, gas, element):
    """Relative energy of the two highest pressure mode shells of one element."""
    u = np.asarray(u, dtype=float)
    return float(modal_energies(u[element:element + 1], ops, gas)[0])


def indicator_alpha(energy, degree, alpha_min=1e-3, alpha_max=0.5):
    """Logistic map from modal energy to a blending coefficient."""
    energy = np.asarray(energy, dtype=float)
    if np.any(energy < 0.0):
        raise ValueError("modal energy must be non-negative")
    t = threshold(degree)
    alpha = 1.0 / (1.0 + np.exp(-SHARPNESS / t * (energy - t)))
    alpha = np.where(alpha < alpha_min, 0.0, alpha)
    alpha = np.minimum(alpha, alpha_max)
    return alpha if alpha.ndim else float(alpha)


def propagation_sweep(alpha, mesh):
    """One Jacobi sweep alpha_k <- max(alpha_k, 0.5 * alpha_E) over face neighbours."""
    if isinstance(alpha, BlendField):
        return BlendField(propagation_sweep(alpha.alpha, mesh), alpha.alpha_correction.copy())
    a = np.asarray(alpha, dtype=float).reshape(mesh.elements_y, mesh.elements_x)
    out = a.copy()
    for shift, axis in ((1, 0), (-1, 0), (1, 1), (-1, 1)):
        out = np.maximum(out, 0.5 * np.roll(a, shift, axis=axis))
    return out.reshape(-1)


def compute_alpha(u, ops, mesh, gas, alpha_min=1e-3, alpha_max=0.5, sweep=True):
    """Indicator blending coefficients for all elements, optionally swept."""
    alpha = indicator_alpha(modal_energies(u, ops, gas), ops.degree, alpha_min, alpha_max)
    alpha = np.atleast_1d(alpha)
    if sweep:
        alpha = propagation_sweep(alpha, mesh)
    return alpha
