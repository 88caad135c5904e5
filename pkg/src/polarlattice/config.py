"""Experiment configuration: JSON schema, validation, sweep expansion.

A config is a JSON document (``config_version`` 1).  Minimal example::

    {
      "config_version": 1,
      "lattice":   {"nx": 51, "ny": 51, "a_nm": 0.5},
      "molecular": {"omega_mol_meV": 100.0, "omega0_meV": 1.0},
      "cavity":    {"omega_cav_meV": "resonant_W1",
                    "sigma_L_over_a": "homogeneous",
                    "g_tot_meV": 2.0},
      "losses":    {"gamma_meV": 1.0}
    }

``molecular`` takes exactly one of ``omega0_meV`` or ``material`` (a
material definition or a built-in name, from which the coupling is
estimated).  ``cavity.omega_cav_meV`` may be the string "resonant_W1"
to pin the cavity to the highest collective mode; ``sigma_L_over_a``
may be "homogeneous" for a flat field.  Optional sections: ``losses``
(``kappa_meV``/``Gamma_meV`` for the complex-Hamiltonian method),
``spectrum`` (method, grid), ``modes`` (map_indices, solver), ``sweep``
(axes with either explicit ``values`` or ``from``/``to``/``steps``),
``output_dir``.  Errors name the offending field path.
"""

from __future__ import annotations

import itertools
import json
import math
from copy import deepcopy
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .materials import (
    BUILTIN_MATERIALS,
    LorentzOscillator,
    PolarMaterial,
    material_omega0_mev,
)

CONFIG_VERSION = 1
DEFAULT_MAP_INDICES = (1, 50, 300, 1500)


@dataclass(frozen=True)
class SweepAxis:
    field: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment parameters plus the raw document."""

    raw: dict
    nx: int
    ny: int
    a: float
    omega_mol: float
    omega0: float
    material: PolarMaterial | LorentzOscillator | None
    omega_cav: float | str
    sigma_L_over_a: float | str
    g_tot: float
    center: tuple[float, float] | None
    diamagnetic: bool
    gamma: float
    kappa: float | None
    Gamma: float | None
    method: str
    grid_points: int
    grid_min: float | None
    grid_max: float | None
    normalized: bool
    map_indices: tuple[int, ...]
    solver: str
    sweep_axes: tuple[SweepAxis, ...]
    output_dir: str

    @property
    def sigma_L(self) -> float:
        """Field width in nm (inf for a homogeneous field)."""
        if self.sigma_L_over_a == "homogeneous":
            return math.inf
        return float(self.sigma_L_over_a) * self.a


def _need(d: dict, key: str, path: str):
    if key not in d:
        raise ConfigError(f"{path}.{key}: required field missing")
    return d[key]


def _num(value, path: str, positive=False, nonneg=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"{path}: must be finite, got {v}")
    if positive and v <= 0.0:
        raise ConfigError(f"{path}: must be > 0, got {v}")
    if nonneg and v < 0.0:
        raise ConfigError(f"{path}: must be >= 0, got {v}")
    return v


def _int(value, path: str, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {value}")
    return value


def parse_material(d, path: str) -> PolarMaterial | LorentzOscillator:
    if isinstance(d, str):
        if d not in BUILTIN_MATERIALS:
            raise ConfigError(
                f"{path}: unknown built-in material {d!r} "
                f"(available: {', '.join(sorted(BUILTIN_MATERIALS))})"
            )
        return BUILTIN_MATERIALS[d]
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a material name or object")
    if set(d) == {"name"} or ("name" in d and "model" not in d):
        return parse_material(d["name"], path)
    model = _need(d, "model", path)
    unit = d.get("unit", "cm-1")
    if unit not in ("cm-1", "meV"):
        raise ConfigError(f"{path}.unit: must be 'cm-1' or 'meV', got {unit!r}")
    name = d.get("name", "")
    try:
        if model == "polar":
            return PolarMaterial(
                omega_L=_num(_need(d, "omega_L", path), f"{path}.omega_L", positive=True),
                omega_T=_num(_need(d, "omega_T", path), f"{path}.omega_T", positive=True),
                eps_inf=_num(_need(d, "eps_inf", path), f"{path}.eps_inf", positive=True),
                V_cell=(
                    _num(d["V_cell_nm3"], f"{path}.V_cell_nm3", positive=True)
                    if "V_cell_nm3" in d
                    else None
                ),
                unit=unit,
                name=name,
            )
        if model == "lorentz":
            return LorentzOscillator(
                S=_num(_need(d, "S", path), f"{path}.S", nonneg=True),
                omega_mol=_num(
                    _need(d, "omega_mol", path), f"{path}.omega_mol", positive=True
                ),
                eps_inf=_num(_need(d, "eps_inf", path), f"{path}.eps_inf", positive=True),
                unit=unit,
                name=name,
            )
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.model: must be 'polar' or 'lorentz', got {model!r}")


def _parse_axis(d: dict, idx: int, raw: dict) -> SweepAxis:
    path = f"sweep.axes[{idx}]"
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object")
    field = _need(d, "field", path)
    node = raw
    for part in field.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"{path}.field: {field!r} does not exist in the config")
        node = node[part]
    if "values" in d:
        vals = d["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"{path}.values: must be a non-empty list")
        values = tuple(_num(v, f"{path}.values[{i}]") for i, v in enumerate(vals))
    else:
        lo = _num(_need(d, "from", path), f"{path}.from")
        hi = _num(_need(d, "to", path), f"{path}.to")
        steps = _int(_need(d, "steps", path), f"{path}.steps", minimum=1)
        if steps == 1:
            values = (lo,)
        else:
            values = tuple(lo + (hi - lo) * i / (steps - 1) for i in range(steps))
    return SweepAxis(field=field, values=values)


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    version = raw.get("config_version")
    if version != CONFIG_VERSION:
        raise ConfigError(
            f"config_version: expected {CONFIG_VERSION}, got {version!r}"
        )

    lat = _need(raw, "lattice", "config")
    nx = _int(_need(lat, "nx", "lattice"), "lattice.nx", minimum=1)
    ny = _int(_need(lat, "ny", "lattice"), "lattice.ny", minimum=1)
    a = _num(_need(lat, "a_nm", "lattice"), "lattice.a_nm", positive=True)

    mol = _need(raw, "molecular", "config")
    omega_mol = _num(
        _need(mol, "omega_mol_meV", "molecular"), "molecular.omega_mol_meV",
        positive=True,
    )
    has_omega0 = "omega0_meV" in mol
    has_material = "material" in mol
    if has_omega0 == has_material:
        raise ConfigError(
            "molecular: give exactly one of omega0_meV or material"
        )
    material = None
    if has_material:
        material = parse_material(mol["material"], "molecular.material")
        omega0 = material_omega0_mev(material)
    else:
        omega0 = _num(mol["omega0_meV"], "molecular.omega0_meV")

    cav = _need(raw, "cavity", "config")
    omega_cav = _need(cav, "omega_cav_meV", "cavity")
    if omega_cav != "resonant_W1":
        omega_cav = _num(omega_cav, "cavity.omega_cav_meV", positive=True)
    sigma = _need(cav, "sigma_L_over_a", "cavity")
    if sigma != "homogeneous":
        sigma = _num(sigma, "cavity.sigma_L_over_a", positive=True)
    g_tot = _num(_need(cav, "g_tot_meV", "cavity"), "cavity.g_tot_meV", nonneg=True)
    center = None
    if "center_nm" in cav:
        c = cav["center_nm"]
        if not (isinstance(c, list) and len(c) == 2):
            raise ConfigError("cavity.center_nm: expected [x_nm, y_nm]")
        center = (_num(c[0], "cavity.center_nm[0]"), _num(c[1], "cavity.center_nm[1]"))
    diamagnetic = cav.get("diamagnetic_shift", False)
    if not isinstance(diamagnetic, bool):
        raise ConfigError("cavity.diamagnetic_shift: expected true/false")

    losses = _need(raw, "losses", "config")
    gamma = _num(_need(losses, "gamma_meV", "losses"), "losses.gamma_meV", positive=True)
    kappa = (
        _num(losses["kappa_meV"], "losses.kappa_meV", nonneg=True)
        if "kappa_meV" in losses
        else None
    )
    big_gamma = (
        _num(losses["Gamma_meV"], "losses.Gamma_meV", nonneg=True)
        if "Gamma_meV" in losses
        else None
    )

    spec = raw.get("spectrum", {})
    if not isinstance(spec, dict):
        raise ConfigError("spectrum: expected an object")
    method = spec.get("method", "lorentzian_adhoc")
    if method not in ("lorentzian_adhoc", "complex_hamiltonian"):
        raise ConfigError(
            f"spectrum.method: must be 'lorentzian_adhoc' or "
            f"'complex_hamiltonian', got {method!r}"
        )
    if method == "complex_hamiltonian" and (kappa is None or big_gamma is None):
        raise ConfigError(
            "losses: kappa_meV and Gamma_meV are required for the "
            "complex_hamiltonian method"
        )
    points = _int(spec.get("points", 2001), "spectrum.points", minimum=2)
    grid_min = (
        _num(spec["omega_min_meV"], "spectrum.omega_min_meV")
        if "omega_min_meV" in spec
        else None
    )
    grid_max = (
        _num(spec["omega_max_meV"], "spectrum.omega_max_meV")
        if "omega_max_meV" in spec
        else None
    )
    if (grid_min is None) != (grid_max is None):
        raise ConfigError("spectrum: give both omega_min_meV and omega_max_meV or neither")
    if grid_min is not None and grid_min >= grid_max:
        raise ConfigError("spectrum.omega_min_meV: must be < omega_max_meV")
    normalized = spec.get("normalized", True)
    if not isinstance(normalized, bool):
        raise ConfigError("spectrum.normalized: expected true/false")

    modes_sec = raw.get("modes", {})
    if not isinstance(modes_sec, dict):
        raise ConfigError("modes: expected an object")
    map_idx = modes_sec.get("map_indices", list(DEFAULT_MAP_INDICES))
    if not isinstance(map_idx, list):
        raise ConfigError("modes.map_indices: expected a list of 1-based indices")
    n_sites = nx * ny
    indices = []
    for i, v in enumerate(map_idx):
        v = _int(v, f"modes.map_indices[{i}]", minimum=1)
        if v > n_sites:
            raise ConfigError(
                f"modes.map_indices[{i}]: index {v} exceeds the number of "
                f"modes N = {n_sites}"
            )
        indices.append(v)
    solver = modes_sec.get("solver", "reduced")
    if solver not in ("reduced", "full"):
        raise ConfigError(f"modes.solver: must be 'reduced' or 'full', got {solver!r}")

    sweep = raw.get("sweep", {})
    if not isinstance(sweep, dict):
        raise ConfigError("sweep: expected an object")
    axes = tuple(
        _parse_axis(ax, i, raw) for i, ax in enumerate(sweep.get("axes", []))
    )

    output_dir = raw.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("output_dir: expected a string")

    return ExperimentConfig(
        raw=raw,
        nx=nx,
        ny=ny,
        a=a,
        omega_mol=omega_mol,
        omega0=omega0,
        material=material,
        omega_cav=omega_cav,
        sigma_L_over_a=sigma,
        g_tot=g_tot,
        center=center,
        diamagnetic=diamagnetic,
        gamma=gamma,
        kappa=kappa,
        Gamma=big_gamma,
        method=method,
        grid_points=points,
        grid_min=grid_min,
        grid_max=grid_max,
        normalized=normalized,
        map_indices=tuple(indices),
        solver=solver,
        sweep_axes=axes,
        output_dir=output_dir,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    return parse_config(raw)


def override_field(raw: dict, field: str, value) -> dict:
    """New raw config with the dotted ``field`` replaced by ``value``."""
    out = deepcopy(raw)
    node = out
    parts = field.split(".")
    for part in parts[:-1]:
        node = node[part]
    node[parts[-1]] = value
    return out


def expand_sweep(cfg: ExperimentConfig) -> list[tuple[dict, dict]]:
    """Cartesian product of the sweep axes.

    Returns (axis-values mapping, overridden raw config) per point.
    """
    if not cfg.sweep_axes:
        raise ConfigError("sweep.axes: at least one axis is required")
    combos = itertools.product(*(ax.values for ax in cfg.sweep_axes))
    points = []
    for combo in combos:
        raw = cfg.raw
        values = {}
        for ax, v in zip(cfg.sweep_axes, combo):
            raw = override_field(raw, ax.field, v)
            values[ax.field] = v
        raw = dict(raw)
        raw.pop("sweep", None)
        points.append((values, raw))
    return points
