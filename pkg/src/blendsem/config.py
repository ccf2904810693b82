"""Run configuration: flat ``section.key = value`` files with ``#`` comments.

Values are layered: built-in defaults, then the config file, then
``BLENDSEM_<SECTION>_<KEY>`` environment variables, then explicit overrides.
"""

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from blendsem.errors import ConfigError

ENV_PREFIX = "BLENDSEM_"

EXPERIMENTS = ("khi", "sedov", "custom")
SURFACE_FLUXES = ("rusanov", "hlle")
VOLUME_FORMS = ("standard", "split")
VOLUME_FLUXES = ("ec_kep",)

DOMAINS = {
    "khi": (-1.0, 1.0, -1.0, 1.0),
    "sedov": (-1.5, 1.5, -1.5, 1.5),
    "custom": (-1.0, 1.0, -1.0, 1.0),
}


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(options):
    def parse(text):
        t = str(text).strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return t
    return parse


def _optional_float(text):
    t = str(text).strip().lower()
    return None if t in ("", "none") else float(t)


# key -> (parser, default)
SCHEMA = {
    "run.experiment": (_choice(EXPERIMENTS), "khi"),
    "run.seed": (int, 0),
    "mesh.elements_x": (int, 16),
    "mesh.elements_y": (int, 16),
    "mesh.x0": (_optional_float, None),
    "mesh.x1": (_optional_float, None),
    "mesh.y0": (_optional_float, None),
    "mesh.y1": (_optional_float, None),
    "solver.degree": (int, 3),
    "solver.surface_flux": (_choice(SURFACE_FLUXES), "rusanov"),
    "solver.volume_form": (_choice(VOLUME_FORMS), "standard"),
    "solver.volume_flux": (_choice(VOLUME_FLUXES), "ec_kep"),
    "gas.gamma": (float, 1.4),
    "indicator.enabled": (_bool, False),
    "indicator.alpha_min": (float, 1e-3),
    "indicator.alpha_max": (float, 0.5),
    "indicator.variable": (_choice(("pressure",)), "pressure"),
    "indicator.propagation_sweep": (_bool, True),
    "indicator.per_stage": (_bool, False),
    "limiter.enabled": (_bool, True),
    "limiter.beta": (float, 0.1),
    "limiter.newton_max_iter": (int, 10),
    "limiter.newton_tol": (float, 1e-12),
    "time.cfl": (float, 0.5),
    "time.t_end": (float, 5.0),
    "time.max_steps": (int, 10**9),
    "time.dt_halving_max": (int, 5),
    "output.dir": (str, "output"),
    "output.sample_interval": (float, 0.01),
    "output.snapshot_interval": (_optional_float, None),
    "output.write_files": (_bool, True),
}


def parse_text(text, source="<string>"):
    """Parse config text into a dict of raw string values."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}", key=key)
        raw[key] = value
    return raw


def env_overrides(environ=None):
    environ = os.environ if environ is None else environ
    out = {}
    for key in SCHEMA:
        for name in (ENV_PREFIX + key.upper(), ENV_PREFIX + key.upper().replace(".", "_")):
            if name in environ:
                out[key] = environ[name]
    return out


def parse_assignments(items):
    """Parse ``section.key=value`` strings from the command line."""
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        key, value = (s.strip() for s in item.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", key=key)
        out[key] = value
    return out


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def section(self, name):
        prefix = name + "."
        return {k[len(prefix):]: v for k, v in self.values.items() if k.startswith(prefix)}

    @property
    def domain(self):
        x0, x1, y0, y1 = DOMAINS[self["run.experiment"]]
        v = self.values
        return (x0 if v["mesh.x0"] is None else v["mesh.x0"],
                x1 if v["mesh.x1"] is None else v["mesh.x1"],
                y0 if v["mesh.y0"] is None else v["mesh.y0"],
                y1 if v["mesh.y1"] is None else v["mesh.y1"])

    def to_text(self):
        return "".join(f"{k} = {'none' if v is None else v}\n" for k, v in self.values.items())


def build_config(*layers):
    """Typed, validated RunConfig from raw string layers (later layers win)."""
    raw = {}
    for layer in layers:
        raw.update(layer or {})
    values = {}
    for key, (parse, default) in SCHEMA.items():
        if key not in raw:
            values[key] = default
            continue
        try:
            values[key] = parse(raw[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {key}: {exc}", key=key) from None
    _validate(values)
    return RunConfig(values)


def _validate(v):
    def fail(key, msg):
        raise ConfigError(f"invalid value for {key}: {msg}", key=key)

    if v["solver.degree"] < 1:
        fail("solver.degree", "must be >= 1")
    for key in ("mesh.elements_x", "mesh.elements_y"):
        if v[key] < 2:
            fail(key, "must be >= 2")
    if not v["gas.gamma"] > 1.0:
        fail("gas.gamma", "must exceed 1")
    if not 0.0 < v["limiter.beta"] <= 1.0:
        fail("limiter.beta", "must lie in (0, 1]")
    if not 0.0 <= v["indicator.alpha_min"] <= v["indicator.alpha_max"] <= 1.0:
        fail("indicator.alpha_max", "need 0 <= alpha_min <= alpha_max <= 1")
    if v["time.cfl"] < 0.0:
        fail("time.cfl", "must be non-negative")
    if v["time.t_end"] < 0.0:
        fail("time.t_end", "must be non-negative")
    if v["time.dt_halving_max"] < 0:
        fail("time.dt_halving_max", "must be non-negative")
    if not v["output.sample_interval"] > 0.0:
        fail("output.sample_interval", "must be positive")


def preset_path(name):
    return resources.files("blendsem") / "presets" / f"{name}.cfg"


def preset_names():
    folder = resources.files("blendsem") / "presets"
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".cfg"))


def load_config(path, overrides=None, environ=None):
    """Read a config file (or a shipped preset name) and apply overrides."""
    p = Path(path)
    if p.is_file():
        text, source = p.read_text(), str(p)
    elif str(path) in preset_names():
        text, source = preset_path(str(path)).read_text(), f"preset:{path}"
    else:
        raise ConfigError(f"config file not found: {path}")
    return build_config(parse_text(text, source), env_overrides(environ), overrides)
