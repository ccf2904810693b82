"""Legendre-Gauss-Lobatto nodes, weights, differentiation and modal transform."""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from blendsem.errors import InvalidDegreeError


@dataclass(frozen=True)
class ElementOperators:
    """1D reference-element operators for polynomial degree ``degree``.

    ``deriv_matrix[j, i]`` is the derivative of the i-th Lagrange polynomial
    at node j. ``modal_transform`` maps nodal values to Legendre
    coefficients, ``vandermonde`` maps them back.
    """

    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    deriv_matrix: np.ndarray
    modal_transform: np.ndarray
    vandermonde: np.ndarray

    @property
    def num_nodes(self):
        return self.degree + 1

    @property
    def boundary_matrix(self):
        b = np.zeros((self.num_nodes, self.num_nodes))
        b[0, 0] = -1.0
        b[-1, -1] = 1.0
        return b


def legendre_values(n, x):
    """Return (P_n(x), P_{n-1}(x)) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    return p, p_prev


def lgl_nodes(degree, tol=1e-15, max_iter=100):
    # Newton on x P_N - P_{N-1}, which is (1 - x^2) P_N' / N; its derivative
    # is (N + 1) P_N.
    n = degree
    x = -np.cos(np.pi * np.arange(n + 1) / n)
    for _ in range(max_iter):
        p_n, p_nm1 = legendre_values(n, x)
        step = (x * p_n - p_nm1) / ((n + 1) * p_n)
        step[0] = step[-1] = 0.0
        x = x - step
        if np.max(np.abs(step)) < tol:
            break
    x[0], x[-1] = -1.0, 1.0
    x = 0.5 * (x - x[::-1])
    if n % 2 == 0:
        x[n // 2] = 0.0
    return x


def barycentric_derivative_matrix(nodes):
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    d = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


def build_operators(degree):
    """Construct the LGL operators for polynomial degree ``degree`` >= 1."""
    if int(degree) != degree or degree < 1:
        raise InvalidDegreeError(f"polynomial degree must be >= 1, got {degree!r}")
    degree = int(degree)
    nodes = lgl_nodes(degree)
    p_n, _ = legendre_values(degree, nodes)
    weights = 2.0 / (degree * (degree + 1) * p_n**2)
    vander = legendre.legvander(nodes, degree)
    modal = np.linalg.solve(vander, np.eye(degree + 1))
    for arr in (nodes, weights, vander, modal):
        arr.flags.writeable = False
    deriv = barycentric_derivative_matrix(nodes)
    deriv.flags.writeable = False
    return ElementOperators(degree, nodes, weights, deriv, modal, vander)


def nodal_to_modal(op, nodal):
    """Legendre coefficients of the interpolant through ``nodal``.

    The last axis of ``nodal`` must have length N+1.
    """
    nodal = np.asarray(nodal, dtype=float)
    if nodal.shape[-1] != op.num_nodes:
        raise ValueError(
            f"expected {op.num_nodes} nodal values, got {nodal.shape[-1]}")
    return nodal @ op.modal_transform.T


def modal_to_nodal(op, modal):
    modal = np.asarray(modal, dtype=float)
    if modal.shape[-1] != op.num_nodes:
        raise ValueError(
            f"expected {op.num_nodes} modal values, got {modal.shape[-1]}")
    return modal @ op.vandermonde.T
