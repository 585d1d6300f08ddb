"""Benchmark systems and the catalog that builds them by name."""
from .arch import make_arch_quadrotor, make_laub_loomis, make_vdp
from .catalog import CATALOG, ModelCatalogEntry, build_model, get_entry
from .heat import make_heat3d
from .quadrotor import make_quadrotor_apf, make_quadrotor_swarm
from .single_track import make_single_track
from .testing import make_linear_scalar, make_zero
from .traffic import make_traffic

__all__ = [
    "CATALOG", "ModelCatalogEntry", "build_model", "get_entry",
    "make_arch_quadrotor", "make_laub_loomis", "make_vdp", "make_heat3d",
    "make_quadrotor_apf", "make_quadrotor_swarm", "make_single_track",
    "make_linear_scalar", "make_zero", "make_traffic",
]
