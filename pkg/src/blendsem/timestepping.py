"""Five-stage, fourth-order SSP Runge-Kutta stepping with stage-wise limiting.

Stage ``s`` (1-based) maps its input ``u^s`` to

    u^{s+1} = a_ss u^s + dt_s udot^s + sum_{i<s} (a_si u^i + dt b_si udot^i),

with ``dt_s = b_ss dt``. Only two history registers are kept: the step's
initial state and one accumulator for the single stage whose history
reaches back past the initial state.
"""

from dataclasses import dataclass, field

import numpy as np

from blendsem.errors import SafeStateViolation
from blendsem.indicator import BlendField, compute_alpha
from blendsem.limiter import StageContext, compute_safe_candidate, floor_margins, limit_stage
from blendsem.physics import _max_wave_speed, check_admissible
from blendsem.spatial import blended_rhs


@dataclass(frozen=True)
class RkScheme:
    a: np.ndarray
    b: np.ndarray
    order: int

    @property
    def stages(self):
        return self.a.shape[0]

    def stage_dt(self, s, dt):
        return self.b[s, s] * dt


# Spiteri & Ruuth SSPRK(5,4), Shu-Osher coefficients; row s holds stage s+1.
SSPRK54 = RkScheme(
    a=np.array([
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.444370493651235, 0.555629506348765, 0.0, 0.0, 0.0],
        [0.620101851488403, 0.0, 0.379898148511597, 0.0, 0.0],
        [0.178079954393132, 0.0, 0.0, 0.821920045606868, 0.0],
        [0.0, 0.0, 0.517231671970585, 0.096059710526147, 0.386708617503269],
    ]),
    b=np.array([
        [0.391752226571890, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.368410593050371, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.251891774271694, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.544974750228521, 0.0],
        [0.0, 0.0, 0.0, 0.063692468666290, 0.226007483236906],
    ]),
    order=4,
)


def rk_step(u, dt, stage_update, scheme=SSPRK54):
    """Advance ``u`` by one step.

    ``stage_update(s, u_s, base, stage_dt)`` must return ``(u_next, udot)``
    where ``u_next`` normally equals ``base + stage_dt * udot``; a limiter may
    alter both as long as that relation is kept. ``s`` is 0-based.

    Since every row of ``a`` sums to one, stages are combined as deviations
    from the step's initial state, u^{s+1} = u^1 + sum a_si (u^i - u^1) + ...,
    which leaves a quiescent state bitwise unchanged.
    """
    a, b = scheme.a, scheme.b
    nst = scheme.stages
    # Stages whose history only involves the step's initial state read it
    # directly; every other history term is accumulated in one register each.
    accumulated = [s for s in range(nst)
                   if np.any(a[s, 1:s] != 0.0) or np.any(b[s, :s] != 0.0)]
    registers = {s: None for s in accumulated}
    u_first = u
    u_s = u
    for s in range(nst):
        stage_dt = scheme.stage_dt(s, dt)
        delta = u_s - u_first if s > 0 else None
        base = u_first if s == 0 else u_first + a[s, s] * delta
        if registers.get(s) is not None:
            base = base + registers[s]
        u_next, udot = stage_update(s, u_s, base, stage_dt)
        for later in accumulated:
            if later <= s:
                continue
            ca, cb = a[later, s], b[later, s]
            if s == 0:
                ca = 0.0  # the initial state carries no deviation
            if ca == 0.0 and cb == 0.0:
                continue
            term = 0.0
            if ca != 0.0:
                term = ca * delta
            if cb != 0.0:
                term = term + dt * cb * udot
            registers[later] = term if registers[later] is None else registers[later] + term
        u_s = u_next
    return u_s


def compute_dt(u, mesh, gas, cfl, degree):
    """CFL time step min(dx, dy) / ((2N + 1)(|v1| + |v2| + 2c)) scaled by cfl."""
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    g = gas.gamma
    speed = (_max_wave_speed(u, g, 0) + _max_wave_speed(u, g, 1))
    h = min(mesh.dx, mesh.dy)
    return float(cfl * np.min(h / ((2 * degree + 1) * speed)))


@dataclass
class StageRecord:
    """Blend state and floor margins of one completed stage."""

    blend: BlendField
    rho_margin: float = float("inf")
    p_margin: float = float("inf")


@dataclass
class StepResult:
    u: np.ndarray
    dt: float
    stages: list = field(default_factory=list)
    halvings: int = 0


class BlendedStepper:
    """Runs SSP-RK steps of the blended DG/FV scheme with optional limiting.

    ``indicator`` is a dict with keys ``enabled``, ``alpha_min``,
    ``alpha_max``, ``sweep`` and ``per_stage``; ``limiter`` holds
    ``enabled``, ``beta``, ``newton_max_iter`` and ``newton_tol``.
    """

    def __init__(self, spatial, indicator=None, limiter=None, scheme=SSPRK54,
                 dt_halving_max=5):
        self.spatial = spatial
        self.indicator = {"enabled": False, "alpha_min": 1e-3, "alpha_max": 0.5,
                          "sweep": True, "per_stage": False, **(indicator or {})}
        self.limiter = {"enabled": True, "beta": 0.1, "newton_max_iter": 10,
                        "newton_tol": 1e-12, **(limiter or {})}
        self.scheme = scheme
        self.dt_halving_max = dt_halving_max

    @property
    def gas(self):
        return self.spatial.gas

    def base_alpha(self, u):
        ind = self.indicator
        sp = self.spatial
        if not ind["enabled"]:
            return np.zeros(sp.mesh.num_elements)
        return compute_alpha(u, sp.ops, sp.mesh, sp.gas, ind["alpha_min"],
                             ind["alpha_max"], ind["sweep"])

    def advance_step(self, u, dt):
        """One step; halves dt and restarts when a safe state is inadmissible."""
        alpha0 = self.base_alpha(u)
        halvings = 0
        while True:
            records = []
            try:
                out = rk_step(u, dt, self._stage_update(alpha0, records), self.scheme)
                return StepResult(out, dt, records, halvings)
            except SafeStateViolation:
                if halvings >= self.dt_halving_max:
                    raise
                halvings += 1
                dt *= 0.5

    def _stage_update(self, alpha0, records):
        lim = self.limiter

        def update(s, u_s, base, stage_dt):
            alpha = self.base_alpha(u_s) if (s > 0 and self.indicator["per_stage"]) else alpha0
            dg, fv = self.spatial.evaluate(u_s, stage=s + 1)
            rhs = blended_rhs(dg, fv, alpha)
            blend = BlendField(alpha.copy())
            candidate = base + stage_dt * rhs.total
            if not lim["enabled"]:
                records.append(StageRecord(blend))
                return candidate, rhs.total
            safe = compute_safe_candidate(base, stage_dt, fv, self.gas, stage=s + 1)
            ctx = StageContext(stage_dt, candidate, safe, rhs.total, dg, fv, blend,
                               self.gas, lim["beta"], lim["newton_max_iter"],
                               lim["newton_tol"])
            limit_stage(ctx)
            records.append(StageRecord(blend, *floor_margins(ctx)))
            return ctx.candidate, ctx.rhs

        return update
