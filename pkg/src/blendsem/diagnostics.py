"""Time-series diagnostics and field snapshots (CSV and legacy-VTK text)."""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from blendsem.physics import _entropy_density, _pressure, check_admissible, primitives

SERIES_COLUMNS = (
    "t", "entropy", "alpha_max", "alpha_mean", "dalpha_max", "dalpha_mean",
    "fv_percent", "mass", "momentum_x", "momentum_y", "energy", "rho_min", "p_min",
)

SNAPSHOT_COLUMNS = (
    "element", "i", "j", "x", "y", "rho", "v1", "v2", "p", "log10_rho",
    "alpha", "alpha_window_max",
)


def _fmt(x):
    return f"{float(x):.17g}"


def total_entropy(u, ops, mesh, gas):
    """Quadrature of -rho s / (gamma - 1) over the domain."""
    u = np.asarray(u, dtype=float)
    check_admissible(u, gas)
    w = mesh.quadrature_weights(ops)
    return float(np.einsum("ij,kij->", w, _entropy_density(u, gas.gamma)))


def conserved_totals(u, ops, mesh):
    """Quadrature totals of (mass, momentum_x, momentum_y, energy)."""
    w = mesh.quadrature_weights(ops)
    return np.einsum("ij,kijv->v", w, np.asarray(u, dtype=float))


def alpha_statistics(history, use_correction=False):
    """(max, mean) of the blending coefficient over a window of stages.

    ``history`` is a sequence of :class:`BlendField` (one per stage). With
    ``use_correction`` the limiter increments are used instead of the
    effective coefficient.
    """
    if len(history) == 0:
        raise ValueError("alpha statistics need at least one stage in the window")
    values = np.array([b.alpha_correction if use_correction else b.effective
                       for b in history])
    return float(values.max()), float(values.mean(axis=1).mean())


@dataclass
class DiagnosticsSeries:
    sample_interval: float = 0.01
    rows: list = field(default_factory=list)

    def add(self, **values):
        row = {c: float(values[c]) for c in SERIES_COLUMNS}
        if self.rows and not row["t"] > self.rows[-1]["t"]:
            raise ValueError("diagnostic times must be strictly increasing")
        self.rows.append(row)
        return row

    def column(self, name):
        return np.array([r[name] for r in self.rows])

    def write_csv(self, path):
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", newline="") as fh:
                fh.write(",".join(SERIES_COLUMNS) + "\n")
                for r in self.rows:
                    fh.write(",".join(_fmt(r[c]) for c in SERIES_COLUMNS) + "\n")
        except OSError as exc:
            raise OSError(f"cannot write diagnostics series to {path}: {exc}") from exc
        return path


def read_series_csv(path):
    with Path(path).open() as fh:
        reader = csv.DictReader(fh)
        return [{k: float(v) for k, v in row.items()} for row in reader]


def sample_row(t, u, ops, mesh, gas, window):
    """Diagnostics row at time ``t`` for the stages recorded in ``window``."""
    amax, amean = alpha_statistics(window)
    dmax, dmean = alpha_statistics(window, use_correction=True)
    totals = conserved_totals(u, ops, mesh)
    p = _pressure(u, gas.gamma)
    return dict(
        t=t, entropy=total_entropy(u, ops, mesh, gas), alpha_max=amax, alpha_mean=amean,
        dalpha_max=dmax, dalpha_mean=dmean, fv_percent=100.0 * amean,
        mass=totals[0], momentum_x=totals[1], momentum_y=totals[2], energy=totals[3],
        rho_min=float(u[..., 0].min()), p_min=float(p.min()),
    )


def _grid_layout(mesh, ops):
    """Map (K, N+1, N+1) node arrays onto a (ny, nx) tensor grid."""
    n = ops.num_nodes
    ex, ey = mesh.elements_x, mesh.elements_y

    def to_grid(a):
        a = np.asarray(a).reshape(ey, ex, n, n)
        return a.transpose(0, 3, 1, 2).reshape(ey * n, ex * n)

    return to_grid


def write_snapshot(u, blend, t, path, ops, mesh, gas, window_alpha_max=None):
    """Write ``path`` (.vtk rectilinear grid) and a sibling .csv of the same nodes.

    ``blend`` may be a BlendField or a per-element array of alpha values.
    Returns the pair of paths written.
    """
    u = np.asarray(u, dtype=float)
    path = Path(path)
    alpha = getattr(blend, "effective", blend)
    alpha = np.asarray(alpha, dtype=float)
    if window_alpha_max is None:
        window_alpha_max = alpha
    k, n = u.shape[0], ops.num_nodes
    rho, v1, v2, p = primitives(u, gas)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_rho = np.log10(rho)
    a_node = np.broadcast_to(alpha[:, None, None], (k, n, n))
    aw_node = np.broadcast_to(np.asarray(window_alpha_max, dtype=float)[:, None, None], (k, n, n))
    xy = mesh.node_coordinates(ops)

    fields = {"rho": rho, "v1": v1, "v2": v2, "p": p, "log10_rho": log_rho,
              "alpha": a_node, "alpha_window_max": aw_node}
    to_grid = _grid_layout(mesh, ops)
    xs = np.repeat(np.arange(mesh.elements_x), n) * mesh.dx + mesh.x0 \
        + 0.5 * (np.tile(ops.nodes, mesh.elements_x) + 1.0) * mesh.dx
    ys = np.repeat(np.arange(mesh.elements_y), n) * mesh.dy + mesh.y0 \
        + 0.5 * (np.tile(ops.nodes, mesh.elements_y) + 1.0) * mesh.dy
    csv_path = path.with_suffix(".csv")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            fh.write("# vtk DataFile Version 3.0\n")
            fh.write(f"blended DG/FV snapshot t={_fmt(t)}\nASCII\nDATASET RECTILINEAR_GRID\n")
            fh.write(f"DIMENSIONS {xs.size} {ys.size} 1\n")
            fh.write(f"X_COORDINATES {xs.size} double\n" + " ".join(map(_fmt, xs)) + "\n")
            fh.write(f"Y_COORDINATES {ys.size} double\n" + " ".join(map(_fmt, ys)) + "\n")
            fh.write("Z_COORDINATES 1 double\n0.0\n")
            fh.write(f"FIELD FieldData 1\nTIME 1 1 double\n{_fmt(t)}\n")
            fh.write(f"POINT_DATA {xs.size * ys.size}\n")
            for name, values in fields.items():
                fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                fh.write("\n".join(" ".join(map(_fmt, row)) for row in to_grid(values)))
                fh.write("\n")
        with csv_path.open("w", newline="") as fh:
            fh.write(",".join(SNAPSHOT_COLUMNS) + "\n")
            kk, ii, jj = np.meshgrid(np.arange(k), np.arange(n), np.arange(n), indexing="ij")
            cols = [kk, ii, jj, xy[..., 0], xy[..., 1]] + list(fields.values())
            flat = [np.asarray(c).reshape(-1) for c in cols]
            for r in range(flat[0].size):
                head = f"{flat[0][r]},{flat[1][r]},{flat[2][r]},"
                fh.write(head + ",".join(_fmt(c[r]) for c in flat[3:]) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write snapshot {path}: {exc}") from exc
    return path, csv_path


def snapshot_name(step, t):
    return f"snap_{step:06d}_{t:.6f}.vtk"
