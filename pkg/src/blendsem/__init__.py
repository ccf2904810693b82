"""Hybrid DGSEM/subcell-FV solver for the 2D Euler equations with an
a-posteriori positivity limiter on the element blending coefficient."""

from blendsem.config import build_config, load_config
from blendsem.driver import RunResult, init_khi, init_sedov, run
from blendsem.fluxes import FluxKind, ec_kep_flux, hlle_flux, rusanov_flux
from blendsem.indicator import BlendField
from blendsem.lgl import ElementOperators, build_operators
from blendsem.physics import GasModel
from blendsem.spatial import Mesh2D, SpatialOperator, VolumeForm

__version__ = "0.1.0"

__all__ = [
    "BlendField", "ElementOperators", "FluxKind", "GasModel", "Mesh2D", "RunResult",
    "SpatialOperator", "VolumeForm", "build_config", "build_operators", "ec_kep_flux",
    "hlle_flux", "init_khi", "init_sedov", "load_config", "run", "rusanov_flux",
]
