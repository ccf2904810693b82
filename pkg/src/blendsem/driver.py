"""Initial conditions, solver assembly and the top-level run loop."""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from blendsem.config import RunConfig
from blendsem.diagnostics import DiagnosticsSeries, sample_row, snapshot_name, write_snapshot
from blendsem.errors import InadmissibleStateError
from blendsem.indicator import BlendField
from blendsem.lgl import build_operators
from blendsem.physics import GasModel, state
from blendsem.spatial import Mesh2D, SpatialOperator
from blendsem.timestepping import BlendedStepper, compute_dt

log = logging.getLogger(__name__)

SEDOV_RHO0 = 1.0
SEDOV_P0 = 1e-5
SEDOV_SIGMA_RHO = 0.25
SEDOV_SIGMA_P = 0.15


def khi_primitives(x, y):
    b = np.tanh(15.0 * y + 7.5) - np.tanh(15.0 * y - 7.5)
    rho = 0.5 + 0.75 * b
    v1 = 0.5 * (b - 1.0)
    v2 = 0.1 * np.sin(2.0 * np.pi * x)
    return rho, v1, v2, np.ones_like(rho)


def sedov_primitives(x, y, gamma):
    r2 = x**2 + y**2
    rho = SEDOV_RHO0 + np.exp(-0.5 * r2 / SEDOV_SIGMA_RHO**2) / (4.0 * np.pi * SEDOV_SIGMA_RHO**2)
    p = SEDOV_P0 + (gamma - 1.0) * np.exp(-0.5 * r2 / SEDOV_SIGMA_P**2) \
        / (4.0 * np.pi * SEDOV_SIGMA_P**2)
    zero = np.zeros_like(rho)
    return rho, zero, zero, p


def init_khi(mesh, ops, gas):
    """Kelvin-Helmholtz shear layer on [-1, 1]^2."""
    xy = mesh.node_coordinates(ops)
    return state(*khi_primitives(xy[..., 0], xy[..., 1]), gas)


def init_sedov(mesh, ops, gas):
    """Gas at rest with Gaussian bumps of density and pressure at the origin."""
    xy = mesh.node_coordinates(ops)
    return state(*sedov_primitives(xy[..., 0], xy[..., 1], gas.gamma), gas)


def init_uniform(mesh, ops, gas):
    shape = (mesh.num_elements, ops.num_nodes, ops.num_nodes)
    return state(np.ones(shape), 0.0, 0.0, 1.0, gas)


INITIAL_CONDITIONS = {"khi": init_khi, "sedov": init_sedov, "custom": init_uniform}


@dataclass
class Simulation:
    config: RunConfig
    ops: object
    mesh: Mesh2D
    gas: GasModel
    spatial: SpatialOperator
    stepper: BlendedStepper

    @classmethod
    def from_config(cls, config):
        c = config
        ops = build_operators(c["solver.degree"])
        x0, x1, y0, y1 = c.domain
        mesh = Mesh2D(c["mesh.elements_x"], c["mesh.elements_y"], x0, x1, y0, y1)
        gas = GasModel(c["gas.gamma"])
        spatial = SpatialOperator(ops, mesh, gas, c["solver.surface_flux"],
                                  c["solver.volume_form"], c["solver.volume_flux"])
        ind = c.section("indicator")
        indicator = {"enabled": ind["enabled"], "alpha_min": ind["alpha_min"],
                     "alpha_max": ind["alpha_max"], "sweep": ind["propagation_sweep"],
                     "per_stage": ind["per_stage"]}
        stepper = BlendedStepper(spatial, indicator, c.section("limiter"),
                                 dt_halving_max=c["time.dt_halving_max"])
        return cls(c, ops, mesh, gas, spatial, stepper)

    def initial_state(self):
        return INITIAL_CONDITIONS[self.config["run.experiment"]](self.mesh, self.ops, self.gas)


@dataclass
class RunResult:
    status: str
    t: float
    steps: int
    u: np.ndarray
    series: DiagnosticsSeries
    stages: int = 0
    rho_margin_min: float = math.inf
    p_margin_min: float = math.inf
    alpha_max: float = 0.0
    dt_halvings: int = 0
    final_alpha: np.ndarray = None
    failure: dict = None
    out_dir: Path = None

    @property
    def ok(self):
        return self.status == "success"


def run(config, out_dir=None, initial=None, stage_callback=None, step_callback=None):
    """Run a simulation described by ``config``.

    ``initial`` overrides the experiment's initial condition. Callbacks
    receive each StageRecord and each (step, t, u, StepResult).
    Solver aborts are reported in the result, never raised.
    """
    sim = Simulation.from_config(config)
    c = config
    write_files = c["output.write_files"]
    out = Path(out_dir if out_dir is not None else c["output.dir"])
    ops, mesh, gas = sim.ops, sim.mesh, sim.gas

    u = sim.initial_state() if initial is None else np.array(initial, dtype=float)
    t_end = c["time.t_end"]
    max_steps = c["time.max_steps"]
    dtau = c["output.sample_interval"]
    snap_every = c["output.snapshot_interval"]
    series = DiagnosticsSeries(dtau)
    result = RunResult("success", 0.0, 0, u, series, out_dir=out if write_files else None)

    try:
        alpha0 = sim.stepper.base_alpha(u)
    except InadmissibleStateError as exc:
        return _abort(result, exc, out, write_files, c)
    window = [BlendField(alpha0)]
    window_alpha = alpha0.copy()
    series.add(**sample_row(0.0, u, ops, mesh, gas, window))
    last_window_alpha = window_alpha
    window, window_alpha = [], np.zeros_like(alpha0)
    if write_files:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.cfg").write_text(c.to_text())
        if snap_every is not None and snap_every > 0:
            _snapshot(out, 0, 0.0, u, BlendField(alpha0), last_window_alpha, sim)
    next_sample = dtau
    next_snap = snap_every if snap_every else math.inf

    t, step = 0.0, 0
    try:
        while t < t_end * (1.0 - 1e-14) and step < max_steps:
            dt = compute_dt(u, mesh, gas, c["time.cfl"], ops.degree)
            if dt <= 0.0:
                raise RuntimeError("time step is zero; check time.cfl")
            dt = min(dt, t_end - t)
            res = sim.stepper.advance_step(u, dt)
            u, t, step = res.u, t + res.dt, step + 1
            result.dt_halvings += res.halvings
            for rec in res.stages:
                result.stages += 1
                result.rho_margin_min = min(result.rho_margin_min, rec.rho_margin)
                result.p_margin_min = min(result.p_margin_min, rec.p_margin)
                eff = rec.blend.effective
                result.alpha_max = max(result.alpha_max, float(eff.max()))
                window.append(rec.blend)
                np.maximum(window_alpha, eff, out=window_alpha)
                if stage_callback is not None:
                    stage_callback(rec)
            if step_callback is not None:
                step_callback(step, t, u, res)
            result.t, result.steps, result.u = t, step, u
            finished = not (t < t_end * (1.0 - 1e-14) and step < max_steps)
            if t >= next_sample * (1.0 - 1e-12) or finished:
                series.add(**sample_row(t, u, ops, mesh, gas, window))
                last_window_alpha = window_alpha
                window, window_alpha = [], np.zeros_like(alpha0)
                next_sample = (math.floor(t / dtau + 1e-9) + 1) * dtau
            if write_files and (t >= next_snap * (1.0 - 1e-12) or (finished and snap_every)):
                last = res.stages[-1].blend if res.stages else BlendField(alpha0)
                _snapshot(out, step, t, u, last, last_window_alpha, sim)
                next_snap = (math.floor(t / snap_every + 1e-9) + 1) * snap_every
            if step % 100 == 0:
                log.info("step %d t=%.5f dt=%.3e", step, t, res.dt)
    except InadmissibleStateError as exc:
        return _abort(result, exc, out, write_files, c)

    result.final_alpha = sim.stepper.base_alpha(u)
    if write_files:
        series.write_csv(out / "series.csv")
    return result


def _snapshot(out, step, t, u, blend, window_alpha, sim):
    write_snapshot(u, blend, t, out / "snapshots" / snapshot_name(step, t),
                   sim.ops, sim.mesh, sim.gas, window_alpha)


def _abort(result, exc, out, write_files, config):
    result.status = "abort"
    result.failure = {**exc.report(), "t": result.t, "step": result.steps + 1}
    log.error("solver abort at t=%.6g: %s", result.t, exc)
    if write_files:
        out.mkdir(parents=True, exist_ok=True)
        result.series.write_csv(out / "series.csv")
        (out / "failure.json").write_text(json.dumps(result.failure, indent=2))
    return result
