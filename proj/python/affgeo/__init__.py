"""Chart-based affine manifolds: geodesics, frame bundles, Killing fields."""

from ._core import (
    AffgeoError,
    catalog_version,
    charts,
    checks,
    connections,
    exp_map,
    fields,
    geodesic,
    killing_residual,
    manifolds,
    run_scenario,
    run_scenario_file,
    sphere_embed,
)

__all__ = [
    "AffgeoError",
    "catalog_version",
    "charts",
    "checks",
    "connections",
    "exp_map",
    "fields",
    "geodesic",
    "killing_residual",
    "manifolds",
    "run_scenario",
    "run_scenario_file",
    "sphere_embed",
]
