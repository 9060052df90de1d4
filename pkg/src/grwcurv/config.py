"""Scenario configuration: TOML loading, schema validation and snapshot construction.

Every section has a fixed set of keys; unknown keys are rejected so that a typo cannot
silently change a run.  See README.md for the schema.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .chartgeo import (
    CurvatureSnapshot,
    flat_field,
    flat_snapshot,
    product_of_spheres,
    random_curvature_snapshot,
    random_metric_field,
    sample_points,
    snapshot_from_field,
    space_form_snapshot,
    sphere_field,
)
from .conditionlab import CONDITION_IDS, DEFAULT_TOL, MEMBERSHIP_TOL, h1_snapshot, planted_roter
from .gaussfiber import catalog_gauss, gauss_snapshot
from .warpedlab import FAMILIES, WarpedSpec, catalog_warp, warped_snapshot, warping_jet


class ConfigError(ValueError):
    pass


TOP_KEYS = {"seed", "conditions", "tolerances", "output", "manifold", "sweep"}
TOL_KEYS = {"fit", "membership"}
OUTPUT_KEYS = {"path", "format"}
MANIFOLD_KEYS = {
    "warped": {"kind", "epsilon", "x1", "samples", "range", "warping", "fiber", "ea2"},
    "field": {"kind", "id", "dim", "negatives", "radius", "points", "samples", "seed"},
    "gauss": {"kind", "fixture", "params", "ea2"},
    "synthetic": {"kind", "generator", "params", "count", "ea2"},
}
FIBER_KEYS = {
    "product_of_spheres": {"kind", "dims"},
    "space_form": {"kind", "dim", "kappa", "negatives"},
    "flat": {"kind", "dim", "negatives"},
    "gauss": {"kind", "fixture", "params"},
    "random": {"kind", "dim", "negatives", "seed"},
}
WARPING_KEYS = {"family", "params"}
SWEEP_KEYS = {"grid", "x1"}
FORMATS = ("json", "csv", "table")


@dataclass
class ScenarioConfig:
    manifold: dict
    conditions: list
    fit_tol: float = DEFAULT_TOL
    membership_tol: float = MEMBERSHIP_TOL
    seed: int = 0
    out_path: Optional[str] = None
    out_format: str = "json"
    sweep: Optional[dict] = None
    raw: dict = field(default_factory=dict)


def _check_keys(section: dict, allowed: set, where: str):
    if not isinstance(section, dict):
        raise ConfigError(f"[{where}] must be a table")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in [{where}]")


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path!r}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> ScenarioConfig:
    _check_keys(raw, TOP_KEYS, "top level")
    if "manifold" not in raw:
        raise ConfigError("missing [manifold] section")
    man = raw["manifold"]
    kind = man.get("kind") if isinstance(man, dict) else None
    if kind not in MANIFOLD_KEYS:
        raise ConfigError(f"unknown manifold kind {kind!r}; expected one of {sorted(MANIFOLD_KEYS)}")
    _check_keys(man, MANIFOLD_KEYS[kind], "manifold")
    conds = [str(c).upper() for c in raw.get("conditions", ["GE"])]
    bad = [c for c in conds if c not in CONDITION_IDS]
    if bad:
        raise ConfigError(f"unknown condition id(s) {bad}")
    if len(set(conds)) != len(conds):
        raise ConfigError("duplicate condition ids")
    tols = raw.get("tolerances", {})
    _check_keys(tols, TOL_KEYS, "tolerances")
    fit_tol = float(tols.get("fit", DEFAULT_TOL))
    mem_tol = float(tols.get("membership", MEMBERSHIP_TOL))
    if not (fit_tol > 0 and mem_tol > 0):
        raise ConfigError("tolerances must be positive")
    out = raw.get("output", {})
    _check_keys(out, OUTPUT_KEYS, "output")
    fmt = out.get("format", "json")
    if fmt not in FORMATS:
        raise ConfigError(f"unknown output format {fmt!r}")
    sweep = raw.get("sweep")
    if sweep is not None:
        _check_keys(sweep, SWEEP_KEYS, "sweep")
        if kind != "warped":
            raise ConfigError("[sweep] needs a warped manifold")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    cfg = ScenarioConfig(manifold=man, conditions=conds, fit_tol=fit_tol,
                         membership_tol=mem_tol, seed=seed, out_path=out.get("path"),
                         out_format=fmt, sweep=sweep, raw=raw)
    # resolve catalog references now so that bad ids fail before any work is done
    if sweep is None:
        point_specs(cfg)
    else:
        grid = sweep_grid(cfg)
        if not grid:
            raise ConfigError("empty sweep grid")
        point_specs(cfg, grid[0])
    return cfg


# --- building snapshots --------------------------------------------------------------


@dataclass(frozen=True)
class PointSpec:
    """Everything needed to rebuild one snapshot in a worker process."""

    label: str
    manifold: dict
    index: int
    seed: int
    params: dict = field(default_factory=dict)


def _fiber(spec: dict) -> CurvatureSnapshot:
    kind = spec.get("kind")
    if kind not in FIBER_KEYS:
        raise ConfigError(f"unknown fiber kind {kind!r}; expected one of {sorted(FIBER_KEYS)}")
    _check_keys(spec, FIBER_KEYS[kind], "manifold.fiber")
    try:
        if kind == "product_of_spheres":
            return product_of_spheres(*[int(d) for d in spec.get("dims", [2, 2])])
        if kind == "space_form":
            return space_form_snapshot(int(spec["dim"]), float(spec.get("kappa", 1.0)),
                                       signature=int(spec.get("negatives", 0)))
        if kind == "flat":
            return flat_snapshot(int(spec["dim"]), signature=int(spec.get("negatives", 0)))
        if kind == "gauss":
            return gauss_snapshot(catalog_gauss(spec["fixture"], spec.get("params", {})))
        rng = np.random.default_rng(int(spec.get("seed", 0)))
        return random_curvature_snapshot(int(spec["dim"]), rng, int(spec.get("negatives", 0)))
    except KeyError as exc:
        raise ConfigError(f"fiber {kind!r} is missing key {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"fiber {kind!r}: {exc}") from exc


def _warp(man: dict, override: Optional[dict] = None):
    w = man.get("warping")
    if not isinstance(w, dict):
        raise ConfigError("warped manifold needs a [manifold.warping] table")
    _check_keys(w, WARPING_KEYS, "manifold.warping")
    family = w.get("family")
    if family not in FAMILIES or family == "custom":
        raise ConfigError(f"unknown warping id {family!r}; expected quadratic, exponential "
                          "or sinusoidal")
    params = dict(w.get("params", {}))
    params.update(override or {})
    try:
        return catalog_warp(family, params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for warping {family!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"warping {family!r}: {exc}") from exc


def _x1_values(man: dict, fn) -> list:
    if "x1" in man:
        xs = man["x1"]
        xs = [float(v) for v in (xs if isinstance(xs, list) else [xs])]
    else:
        from .warpedlab import admissible_points

        lo, hi = man.get("range", [-1.0, 1.0])
        try:
            xs = [float(v) for v in admissible_points(fn, int(man.get("samples", 5)), lo, hi)]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    for x in xs:
        try:
            warping_jet(fn, x)
        except ValueError as exc:
            raise ConfigError(f"x1={x}: {exc}") from exc
    return xs


def point_specs(cfg: ScenarioConfig, warp_override: Optional[dict] = None) -> list:
    man = cfg.manifold
    kind = man["kind"]
    specs = []
    if kind == "warped":
        fn = _warp(man, warp_override)
        _fiber(man.get("fiber", {}))
        eps = man.get("epsilon", -1)
        if eps not in (1, -1):
            raise ConfigError("epsilon must be +1 or -1")
        for i, x in enumerate(_x1_values(man, fn)):
            params = {"x1": x, **(warp_override or {})}
            specs.append(PointSpec(f"x1={x:.6g}", man, i, cfg.seed, params))
    elif kind == "field":
        fld = _field(man)
        if "points" in man:
            pts = [list(map(float, p)) for p in man["points"]]
        else:
            pts = [p.tolist() for p in sample_points(fld, int(man.get("samples", 3)),
                                                     seed=int(man.get("seed", cfg.seed)),
                                                     radius=float(man.get("radius", 0.5)))]
        for i, p in enumerate(pts):
            specs.append(PointSpec(f"x={np.round(p, 6).tolist()}", man, i, cfg.seed, {"x": p}))
    elif kind == "gauss":
        catalog_gauss_checked(man)
        specs.append(PointSpec(f"gauss:{man['fixture']}", man, 0, cfg.seed))
    else:
        gen = man.get("generator")
        if gen not in ("random", "roter", "h1", "space_form", "flat"):
            raise ConfigError(f"unknown synthetic generator {gen!r}")
        for i in range(int(man.get("count", 1))):
            specs.append(PointSpec(f"{gen}#{i}", man, i, cfg.seed))
    if not specs:
        raise ConfigError("scenario produces no points")
    return specs


def catalog_gauss_checked(man: dict):
    try:
        return catalog_gauss(str(man.get("fixture")), man.get("params", {}))
    except KeyError as exc:
        raise ConfigError(f"gauss fixture is missing key {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _field(man: dict):
    fid = man.get("id")
    dim = int(man.get("dim", 4))
    neg = int(man.get("negatives", 0))
    if fid == "flat":
        return flat_field(dim, neg)
    if fid == "sphere":
        return sphere_field(dim)
    if fid == "random":
        return random_metric_field(dim, neg, seed=int(man.get("seed", 0)))
    raise ConfigError(f"unknown metric-field id {fid!r}; expected flat, sphere or random")


def build_point(ps: PointSpec):
    """(snapshot, fiber snapshot or None, ea2 or None, extra scalars) for one point."""
    man = ps.manifold
    kind = man["kind"]
    extra: dict[str, Any] = {}
    if kind == "warped":
        override = {k: v for k, v in ps.params.items() if k != "x1"}
        fn = _warp(man, override)
        fiber = _fiber(man.get("fiber", {}))
        eps = int(man.get("epsilon", -1))
        spec = WarpedSpec(eps, fn, float(ps.params["x1"]), fiber)
        from .warpedlab import warp_scalars

        sc = warp_scalars(spec.jet(), eps)
        extra = {"trT": sc.trT, "Delta1F_over_4F": sc.Delta1F_over_4F, "F": spec.jet().F}
        ea2 = man.get("ea2")
        if ea2 is None and fn.family == "quadratic":
            ea2 = eps * fn.params["a"] ** 2
        return warped_snapshot(spec), fiber, ea2, extra
    if kind == "field":
        return snapshot_from_field(_field(man), ps.params["x"]), None, man.get("ea2"), extra
    if kind == "gauss":
        data = catalog_gauss_checked(man)
        return gauss_snapshot(data), None, man.get("ea2", data.c), extra
    gen = man["generator"]
    params = dict(man.get("params", {}))
    rng = np.random.default_rng([ps.seed, ps.index])
    if gen == "random":
        snap = random_curvature_snapshot(int(params.get("dim", 4)), rng,
                                         int(params.get("negatives", 0)))
    elif gen == "roter":
        snap, planted = planted_roter(float(params.get("phi", 0.7)), float(params.get("mu", -0.3)),
                                      float(params.get("eta", 0.2)), int(params.get("dim", 4)),
                                      int(params.get("negatives", 0)),
                                      seed=int(rng.integers(2**31)))
        extra = dict(zip(("phi", "mu", "eta"), planted))
    elif gen == "h1":
        snap = h1_snapshot(int(params.get("negatives", 0)), seed=int(rng.integers(2**31)))
    elif gen == "space_form":
        snap = space_form_snapshot(int(params.get("dim", 4)), float(params.get("kappa", 1.0)))
    else:
        snap = flat_snapshot(int(params.get("dim", 4)))
    return snap, None, man.get("ea2"), extra


def sweep_grid(cfg: ScenarioConfig) -> list:
    """Ordered list of warping-parameter overrides from [sweep].grid (cartesian product)."""
    grid = (cfg.sweep or {}).get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("[sweep].grid must be a table of lists")
    keys = sorted(grid)
    values = [grid[k] if isinstance(grid[k], list) else [grid[k]] for k in keys]
    combos = [dict(zip(keys, combo)) for combo in itertools.product(*values)] if keys else [{}]
    if any(len(v) == 0 for v in values):
        combos = []
    return combos
