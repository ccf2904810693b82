"""A-posteriori positivity limiter acting on the element blending coefficient.

Each Runge-Kutta stage produces a candidate built with the blended time
derivative and a safe solution built with the pure FV derivative. Where the
candidate drops below ``beta`` times the safe density or pressure, the
element's blending coefficient is raised just enough to restore the floor,
density first (closed form, density is linear in alpha) and pressure second
(Newton, pressure is concave along the correction direction).
"""

from dataclasses import dataclass

import numpy as np

from blendsem.errors import LimiterContractError, SafeStateViolation
from blendsem.indicator import BlendField
from blendsem.physics import _pressure, check_admissible

DENOMINATOR_GUARD = 1e-14


@dataclass
class StageContext:
    """Everything the limiter needs about one Runge-Kutta stage.

    ``candidate`` and ``rhs`` are modified in place by the corrections;
    ``blend.alpha`` is the coefficient used to build ``rhs`` and
    ``blend.alpha_correction`` accumulates the increments.
    """

    stage_dt: float
    candidate: np.ndarray
    safe: np.ndarray
    rhs: np.ndarray
    dg_rhs: np.ndarray
    fv_rhs: np.ndarray
    blend: BlendField
    gas: object
    beta: float = 0.1
    newton_max_iter: int = 10
    newton_tol: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")
        self._direction = None
        self._rho_safe = self.safe[..., 0]
        self._p_safe = _pressure(self.safe, self.gas.gamma)

    @property
    def direction(self):
        """d(candidate)/d(alpha) = stage_dt * (fv - dg), cached."""
        if self._direction is None:
            self._direction = self.stage_dt * (self.fv_rhs - self.dg_rhs)
        return self._direction

    @property
    def alpha(self):
        return self.blend.effective

    @property
    def rho_safe(self):
        return self._rho_safe

    @property
    def p_safe(self):
        return self._p_safe


def compute_safe_candidate(base, stage_dt, fv_rhs, gas, stage=None):
    """All-FV stage solution ``base + stage_dt * fv_rhs``.

    ``base`` is the stage's accumulated register (the Runge-Kutta
    combination without the current stage derivative). Raises
    :class:`SafeStateViolation` if any node is inadmissible.
    """
    safe = base + stage_dt * fv_rhs
    check_admissible(safe, gas, error=SafeStateViolation, stage=stage)
    return safe


def _density_alpha(ctx, elements):
    rho = ctx.candidate[elements, ..., 0]
    a_rho = ctx.beta * ctx.rho_safe[elements] - rho
    denom = ctx.direction[elements, ..., 0]
    alpha = ctx.alpha[elements][:, None, None]
    violated = a_rho > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        node_alpha = alpha + a_rho / denom
    fallback = violated & ((np.abs(denom) <= DENOMINATOR_GUARD) | ~(node_alpha <= 1.0))
    node_alpha = np.where(fallback, 1.0, node_alpha)
    node_alpha = np.where(violated, node_alpha, alpha)
    out = node_alpha.max(axis=(1, 2))
    return np.clip(out, ctx.alpha[elements], 1.0)


def density_correction(ctx, element):
    """Smallest alpha lifting every node of ``element`` to rho >= beta * rho_safe."""
    return float(_density_alpha(ctx, np.array([element]))[0])


def _pressure_alpha(ctx, elements, alpha_start):
    g = ctx.gas.gamma
    u0 = ctx.candidate[elements]
    du = ctx.direction[elements]
    target = ctx.beta * ctx.p_safe[elements]
    tol = ctx.newton_tol * ctx.p_safe[elements]
    start = np.asarray(alpha_start, dtype=float)[:, None, None]

    g0 = _pressure(u0, g) - target
    violated = g0 < 0.0
    node_alpha = np.broadcast_to(start, g0.shape).copy()
    if not violated.any():
        return np.clip(node_alpha.max(axis=(1, 2)), alpha_start, 1.0)

    idx = np.nonzero(violated)
    u0v, duv = u0[idx], du[idx]
    tgt, tolv = target[idx], tol[idx]
    a0 = start[idx[0], 0, 0]
    a = a0.copy()
    done = np.zeros(a.shape, dtype=bool)
    failed = np.zeros(a.shape, dtype=bool)
    for _ in range(ctx.newton_max_iter):
        u = u0v + (a - a0)[:, None] * duv
        rho = u[:, 0]
        v = u[:, 1:3] / rho[:, None]
        resid = _pressure(u, g) - tgt
        done |= np.abs(resid) <= tolv
        active = ~done & ~failed
        if not active.any():
            break
        dpdu = np.empty_like(u)
        dpdu[:, 0] = 0.5 * np.sum(v**2, axis=1)
        dpdu[:, 1:3] = -v
        dpdu[:, 3] = 1.0
        slope = (g - 1.0) * np.sum(dpdu * duv, axis=1)
        bad_slope = active & (np.abs(slope) < DENOMINATOR_GUARD)
        failed |= bad_slope
        step_ok = active & ~bad_slope
        with np.errstate(divide="ignore", invalid="ignore"):
            a = np.where(step_ok, a - resid / slope, a)
        failed |= step_ok & ~((a >= 0.0) & (a <= 1.0))
    else:
        u = u0v + (a - a0)[:, None] * duv
        done |= np.abs(_pressure(u, g) - tgt) <= tolv

    a = np.where(done & ~failed, a, 1.0)
    node_alpha[idx] = a
    return np.clip(node_alpha.max(axis=(1, 2)), alpha_start, 1.0)


def pressure_correction(ctx, element, alpha_start):
    """Newton solve for the alpha bringing every node to p >= beta * p_safe.

    Must run after the density pass has been applied to ``element``;
    ``alpha_start`` is the element's alpha after that pass. Returns 1 (pure
    FV) when Newton fails to converge or leaves [0, 1].
    """
    return float(_pressure_alpha(ctx, np.array([element]), np.array([alpha_start]))[0])


def _apply(ctx, elements, alpha_new):
    current = ctx.alpha[elements]
    if np.any(alpha_new < current):
        raise LimiterContractError("corrected alpha must not be lower than the current alpha")
    delta = alpha_new - current
    touched = delta > 0.0
    if not touched.any():
        return
    el = elements[touched]
    d = delta[touched]
    ctx.candidate[el] += d[:, None, None, None] * ctx.direction[el]
    ctx.rhs[el] += d[:, None, None, None] * (ctx.fv_rhs[el] - ctx.dg_rhs[el])
    ctx.blend.alpha_correction[el] += d


def apply_correction(ctx, element, alpha_new):
    """Move ``element`` to ``alpha_new``, updating candidate, derivative and blend."""
    _apply(ctx, np.array([element]), np.array([float(alpha_new)]))


def limit_stage(ctx):
    """Density pass then pressure pass over all elements.

    Returns the corrected candidate, the corrected time derivative and the
    blend field; all three are the (mutated) objects held by ``ctx``.
    """
    elements = np.arange(ctx.candidate.shape[0])
    alpha_rho = _density_alpha(ctx, elements)
    _apply(ctx, elements, alpha_rho)
    alpha_now = ctx.alpha
    alpha_p = _pressure_alpha(ctx, elements, alpha_now)
    _apply(ctx, elements, np.maximum(alpha_p, alpha_now))
    return ctx.candidate, ctx.rhs, ctx.blend


def floor_margins(ctx):
    """(min rho - beta rho_safe, min p - beta p_safe) over all nodes."""
    u = ctx.candidate
    rho_margin = float(np.min(u[..., 0] - ctx.beta * ctx.rho_safe))
    with np.errstate(divide="ignore", invalid="ignore"):
        p = _pressure(u, ctx.gas.gamma)
    p_margin = float(np.min(p - ctx.beta * ctx.p_safe))
    return rho_margin, p_margin
