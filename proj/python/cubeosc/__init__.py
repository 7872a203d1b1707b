"""Cube-oscillation functionals of sets and integer rasters.

Shapes are plain dicts in the same JSON form the command-line tool reads,
for example ``{"type": "disk", "center": [0.5, 0.5], "radius": 0.3}``.
Cubes are ``(cx, cy, side, angle)`` tuples.
"""

import json

from . import _core
from ._core import (
    Error,
    check_suite_names,
    feasibility_audit,
    gauss_iso,
    k_function,
    normal_cdf,
    normal_quantile,
    parse_ladder,
    preset_names,
)

__all__ = [
    "Error",
    "check_suite_names",
    "cubes_disjoint",
    "evaluate",
    "evaluate_1d_exact",
    "feasibility_audit",
    "gauss_iso",
    "hadwiger_check",
    "k_function",
    "normal_cdf",
    "normal_quantile",
    "oracle_compare",
    "parse_ladder",
    "perimeter",
    "preset_names",
    "rasterize",
    "relative_iso_check",
    "run_checks",
    "sweep",
    "volume_fraction",
]


def _shape(shape):
    return shape if isinstance(shape, str) else json.dumps(shape)


def evaluate(target, eps, kind="i", region=None, *, M=None, perimeter=None, orientations=16, offsets=4,
             boundary_samples=400, seed=1, exact_1d=False):
    """Evaluate one functional. ``target`` is a preset name, a file path, or a shape dict.

    Returns the estimate document: value, upper bounds, cap, family, and ``bracket_ok``.
    """
    is_json = isinstance(target, dict)
    doc = _core.evaluate(json.dumps(target) if is_json else target, is_json, kind, eps, region, orientations, offsets,
                         boundary_samples, seed, M, perimeter, exact_1d)
    return json.loads(doc)


def sweep(target, epsilons, kind="i", region=None, *, M=None, orientations=16, offsets=4, boundary_samples=400,
          seed=1, timing=True):
    """Run an epsilon sweep. Returns (json document, csv text, svg text)."""
    if isinstance(epsilons, str):
        epsilons = parse_ladder(epsilons)
    doc, csv, svg = _core.sweep(target, kind, list(epsilons), region, orientations, offsets, boundary_samples, seed, M,
                                timing)
    return json.loads(doc), csv, svg


def evaluate_1d_exact(shape, eps):
    return _core.evaluate_1d_exact(_shape(shape), eps)


def volume_fraction(shape, cube):
    return _core.volume_fraction(_shape(shape), *cube)


def perimeter(shape, region="all"):
    return _core.perimeter(_shape(shape), region)


def cubes_disjoint(a, b):
    return _core.cubes_disjoint(tuple(a), tuple(b))


def rasterize(shape, region="unit", cell=0.01):
    """Cell-center rasterization; rows are y, columns are x."""
    return _core.rasterize(_shape(shape), region, cell)


def hadwiger_check(shape):
    return _core.hadwiger_check(_shape(shape))


def relative_iso_check(shape, cube):
    return _core.relative_iso_check(_shape(shape), *cube)


def run_checks(suite):
    return _core.run_checks(suite)


def oracle_compare(count=20, max_size=25, cap=5, seed=7):
    return json.loads(_core.oracle_compare(count, max_size, cap, seed))
