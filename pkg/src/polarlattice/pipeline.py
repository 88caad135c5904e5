"""Pipeline orchestration: configs in, CSV datasets and manifests out.

Stages are composed from the physics modules; results for a given
(lattice, molecular) combination are memoized so sweeps over cavity or
loss parameters diagonalize the lattice once.  Sweep points run on a
thread pool (the eigensolvers release the GIL) and write into separate
per-point directories with atomic renames.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import DispersionParams, dispersion_curves, interaction_criterion
from .cavity import (
    CavityMode,
    PolaritonModes,
    diamagnetic_shift,
    gaussian_coupling,
    polariton_modes_fast,
)
from .collective import CollectiveModes, solve_collective
from .config import ExperimentConfig, expand_sweep, parse_config
from .errors import ConfigError
from .lattice import CouplingMatrix, Lattice, build_lattice, coupling_matrix
from .materials import material_omega0, material_omega0_mev
from .outputs import RunRecorder, config_checksum, fmt, write_csv, write_json
from .spectra import (
    Spectrum,
    default_grid,
    find_spectrum_peaks,
    peak_contrast,
    spectral_function,
    spectral_function_lossy,
)

_collective_cache: dict[tuple, tuple[Lattice, CouplingMatrix, CollectiveModes]] = {}
_cache_lock = threading.Lock()
_CACHE_MAX = 4


def collective_system(
    cfg: ExperimentConfig,
) -> tuple[Lattice, CouplingMatrix, CollectiveModes]:
    """Lattice, coupling matrix and solved collective modes (memoized)."""
    key = (cfg.nx, cfg.ny, cfg.a, cfg.omega_mol, cfg.omega0, cfg.solver)
    with _cache_lock:
        if key in _collective_cache:
            return _collective_cache[key]
    lat = build_lattice(cfg.nx, cfg.ny, cfg.a)
    coup = coupling_matrix(lat, cfg.omega0)
    modes = solve_collective(lat, cfg.omega_mol, coup, method=cfg.solver)
    with _cache_lock:
        if len(_collective_cache) >= _CACHE_MAX:
            _collective_cache.pop(next(iter(_collective_cache)))
        _collective_cache[key] = (lat, coup, modes)
    return lat, coup, modes


@dataclass(frozen=True)
class SpectrumPoint:
    """Everything computed for one spectrum: inputs, modes, spectrum."""

    cfg: ExperimentConfig
    lattice: Lattice
    coupling: CouplingMatrix
    modes: CollectiveModes
    cavity: CavityMode
    polaritons: PolaritonModes
    spectrum: Spectrum
    omega_cav_resolved: float
    diamagnetic_shift_meV: float


def resolve_cavity(
    cfg: ExperimentConfig, lat: Lattice, modes: CollectiveModes
) -> tuple[CavityMode, float, float]:
    """Cavity mode with resolved frequency and optional diamagnetic shift."""
    omega_cav = modes.W[0] if cfg.omega_cav == "resonant_W1" else float(cfg.omega_cav)
    cav = gaussian_coupling(
        lat, omega_cav=omega_cav, sigma_L=cfg.sigma_L, center=cfg.center,
        g_tot=cfg.g_tot,
    )
    shift = 0.0
    if cfg.diamagnetic:
        shift = diamagnetic_shift(cav, cfg.omega_mol)
        cav = gaussian_coupling(
            lat, omega_cav=omega_cav + shift, sigma_L=cfg.sigma_L,
            center=cfg.center, g_tot=cfg.g_tot,
        )
    return cav, omega_cav, shift


def compute_spectrum_point(cfg: ExperimentConfig) -> SpectrumPoint:
    """Run the full pipeline for a single parameter point."""
    lat, coup, modes = collective_system(cfg)
    cav, omega_resolved, shift = resolve_cavity(cfg, lat, modes)
    pm = polariton_modes_fast(cav, modes)
    if cfg.grid_min is not None:
        grid = np.linspace(cfg.grid_min, cfg.grid_max, cfg.grid_points)
    else:
        grid = default_grid(pm, cfg.gamma, cfg.grid_points)
    if cfg.method == "complex_hamiltonian":
        spec = spectral_function_lossy(
            cav, cfg.omega_mol, coup, cfg.kappa, cfg.Gamma, grid,
            normalized=cfg.normalized,
        )
    else:
        spec = spectral_function(pm, cfg.gamma, grid, normalized=cfg.normalized)
    return SpectrumPoint(
        cfg=cfg,
        lattice=lat,
        coupling=coup,
        modes=modes,
        cavity=cav,
        polaritons=pm,
        spectrum=spec,
        omega_cav_resolved=omega_resolved,
        diamagnetic_shift_meV=shift,
    )


def _sidecar(point: SpectrumPoint) -> dict:
    cfg = point.cfg
    return {
        "config": cfg.raw,
        "config_sha256": config_checksum(cfg.raw),
        "method": point.spectrum.method,
        "loss_params_meV": point.spectrum.loss_params,
        "omega_cav_resolved_meV": point.omega_cav_resolved,
        "diamagnetic_shift_meV": point.diamagnetic_shift_meV,
        "sigma_L_nm": None if math.isinf(cfg.sigma_L) else cfg.sigma_L,
        "g0_meV": point.cavity.g0,
        "g_tot_meV": point.cavity.g_tot,
        "W1_meV": float(point.modes.W[0]),
        "n_modes": int(point.modes.n_modes),
        "peak_raw_scale": point.spectrum.peak_value,
        "grid_points": int(point.spectrum.omega.size),
    }


def write_spectrum_outputs(point: SpectrumPoint, outdir: Path) -> None:
    sha = config_checksum(point.cfg.raw)
    spec = point.spectrum
    peak = spec.peak_value
    norm = spec.S_raw / peak if peak > 0.0 else spec.S_raw
    rows = zip(spec.omega.tolist(), norm.tolist(), spec.S_raw.tolist())
    write_csv(
        outdir / "spectrum.csv", ["omega_meV", "S_normalized", "S_raw"], rows, sha
    )
    pm = point.polaritons
    pf = pm.photon_fraction
    dark = pm.dark
    rows = (
        (m + 1, float(pm.Wm[m]), float(pf[m]), int(dark[m]))
        for m in range(pm.n_modes)
    )
    write_csv(
        outdir / "polaritons.csv",
        ["m", "W_meV", "photon_fraction", "dark_flag"],
        rows,
        sha,
    )
    write_json(outdir / "spectrum_params.json", _sidecar(point))


def run_spectrum(cfg: ExperimentConfig, outdir: Path) -> Path:
    """Single-point spectrum command; returns the manifest path."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rec = RunRecorder(outdir, cfg.raw, __version__)
    with rec.stage("collective"):
        collective_system(cfg)
    with rec.stage("spectrum"):
        point = compute_spectrum_point(cfg)
    with rec.stage("write"):
        write_spectrum_outputs(point, outdir)
        _write_plot_stub(outdir, "spectrum")
    return rec.write()


def run_modes(cfg: ExperimentConfig, outdir: Path) -> Path:
    """Collective-mode analysis command; returns the manifest path."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rec = RunRecorder(outdir, cfg.raw, __version__)
    sha = config_checksum(cfg.raw)
    with rec.stage("collective"):
        lat, _, modes = collective_system(cfg)
    with rec.stage("write"):
        kmag = np.hypot(modes.k[:, 0], modes.k[:, 1])
        rows = (
            (n + 1, float(modes.W[n]), float(modes.k[n, 0]), float(modes.k[n, 1]),
             float(modes.D[n]))
            for n in range(modes.n_modes)
        )
        write_csv(
            outdir / "modes.csv",
            ["n", "W_meV", "kx_invnm", "ky_invnm", "D_over_dmol"],
            rows,
            sha,
        )
        for idx in cfg.map_indices:
            grid = modes.alpha[idx - 1].reshape(cfg.ny, cfg.nx)
            lines = [
                f"# config_sha256={sha} mode n={idx} "
                f"W_meV={fmt(float(modes.W[idx - 1]))} "
                f"D_over_dmol={fmt(float(modes.D[idx - 1]))}"
            ]
            for row in grid:
                lines.append(",".join(fmt(float(v)) for v in row))
            from .outputs import write_text_atomic

            write_text_atomic(
                outdir / f"alpha_map_n{idx:04d}.csv", "\n".join(lines) + "\n"
            )
    with rec.stage("dispersion"):
        p = DispersionParams(cfg.omega_mol, cfg.omega0, cfg.a)
        order = np.lexsort((-modes.W, kmag))
        if cfg.omega0 != 0.0:
            curves = dispersion_curves(modes.k[order], p)
            top = math.sqrt(
                p.omega_mol**2
                + 2.0 * p.omega_mol * p.omega0 * _lattice_sum(p.cutoff)
            )
            slope = 2.0 * math.pi * p.omega0 * p.a
            linear = top - slope * kmag[order]
        else:  # degenerate flat band
            curves = {
                "rwa": np.full(modes.n_modes, cfg.omega_mol),
                "full": np.full(modes.n_modes, cfg.omega_mol),
            }
            linear = np.full(modes.n_modes, cfg.omega_mol)
        rows = zip(
            kmag[order].tolist(),
            modes.W[order].tolist(),
            curves["rwa"].tolist(),
            curves["full"].tolist(),
            linear.tolist(),
        )
        write_csv(
            outdir / "dispersion.csv",
            [
                "kmag_invnm",
                "omega_numeric_meV",
                "omega_rwa_meV",
                "omega_full_meV",
                "omega_linear_meV",
            ],
            rows,
            sha,
        )
        _write_plot_stub(outdir, "modes")
    return rec.write()


def _lattice_sum(cutoff: int) -> float:
    from .analytic import lattice_sum_s3

    return lattice_sum_s3(cutoff)


def run_sweep(cfg: ExperimentConfig, outdir: Path, threads: int = 1) -> Path:
    """Cartesian-product sweep; one spectrum per point, plus summaries."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rec = RunRecorder(outdir, cfg.raw, __version__)
    points = expand_sweep(cfg)
    sha = config_checksum(cfg.raw)
    axis_fields = [ax.field for ax in cfg.sweep_axes]

    results: list[SpectrumPoint | None] = [None] * len(points)

    def _one(i: int) -> None:
        _, raw = points[i]
        pcfg = parse_config(raw)
        point = compute_spectrum_point(pcfg)
        pdir = outdir / f"point_{i:04d}"
        pdir.mkdir(parents=True, exist_ok=True)
        write_spectrum_outputs(point, pdir)
        results[i] = point

    with rec.stage("points"):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(_one, range(len(points))))
        else:
            for i in range(len(points)):
                _one(i)

    with rec.stage("summary"):
        rows = []
        for i, (values, _) in enumerate(points):
            rows.append([i] + [values[f] for f in axis_fields])
        write_csv(
            outdir / "sweep_points.csv", ["point"] + axis_fields, rows, sha
        )
        peak_rows = []
        for i, point in enumerate(results):
            pos, height = find_spectrum_peaks(point.spectrum)
            lo, hi = peak_contrast(point.spectrum, point.omega_cav_resolved)
            p1 = (pos[0], height[0]) if len(pos) > 0 else (math.nan, math.nan)
            p2 = (pos[1], height[1]) if len(pos) > 1 else (math.nan, math.nan)
            peak_rows.append(
                [
                    i,
                    float(p1[0]),
                    float(p1[1]),
                    float(p2[0]),
                    float(p2[1]),
                    float(lo / hi) if hi > 0.0 else math.nan,
                ]
            )
        write_csv(
            outdir / "peaks.csv",
            [
                "point",
                "peak1_omega_meV",
                "peak1_S_raw",
                "peak2_omega_meV",
                "peak2_S_raw",
                "below_over_above",
            ],
            peak_rows,
            sha,
        )
    return rec.write()


def criterion_report(cfg: ExperimentConfig) -> str:
    """Human-readable interaction-relevance verdict for the config."""
    sigma = cfg.sigma_L
    res = interaction_criterion(cfg.omega0, cfg.a, sigma, cfg.gamma)
    kmax = 0.0 if math.isinf(sigma) else 1.0 / sigma
    dw = 2.0 * math.pi * cfg.omega0 * kmax * cfg.a
    lines = [
        f"dipole coupling omega0 = {fmt(cfg.omega0)} meV, a = {fmt(cfg.a)} nm",
        f"field width sigma_L = "
        + ("homogeneous (infinite)" if math.isinf(sigma) else f"{fmt(sigma)} nm"),
        f"sampled wavevector range |k| <= {fmt(kmax)} 1/nm",
        f"collective-band spectral width dOmega = 2 pi omega0 |k_max| a "
        f"= {fmt(dw)} meV",
        f"threshold linewidth: {fmt(res.threshold_gamma)} meV; "
        f"actual gamma = {fmt(cfg.gamma)} meV",
        (
            "VERDICT: direct dipole-dipole interactions MUST be modeled "
            "explicitly (bandwidth >= gamma)"
            if res.holds
            else "VERDICT: a single renormalized bright mode suffices "
            "(bandwidth < gamma)"
        ),
    ]
    return "\n".join(lines)


def material_report(cfg: ExperimentConfig) -> str:
    """Coupling estimate for the config's material definition."""
    if cfg.material is None:
        raise ConfigError(
            "molecular.material: the material command needs a material "
            "definition (built-in name or parameters)"
        )
    m = cfg.material
    native = material_omega0(m)
    mev = material_omega0_mev(m)
    kind = type(m).__name__
    ref = getattr(m, "omega_T", getattr(m, "omega_mol", None))
    lines = [
        f"material: {m.name or '(unnamed)'} ({kind}, frequencies in {m.unit})",
        f"omega0 = {fmt(native)} {m.unit} = {fmt(mev)} meV",
        f"omega0 / reference frequency = {fmt(native / ref)}",
    ]
    from .materials import PolarMaterial, dipole_per_cell

    if isinstance(m, PolarMaterial) and m.V_cell is not None:
        lines.append(f"dipole per unit cell d_u = {fmt(dipole_per_cell(m))} e nm")
    return "\n".join(lines)


_PLOT_STUBS = {
    "spectrum": """\
#!/usr/bin/env python3
# Minimal plotting stub for spectrum.csv (no plotting deps in the core).
import csv
import matplotlib.pyplot as plt

omega, s = [], []
with open("spectrum.csv") as fh:
    for row in csv.reader(r for r in fh if not r.startswith("#")):
        if row[0] == "omega_meV":
            continue
        omega.append(float(row[0]))
        s.append(float(row[1]))
plt.plot(omega, s)
plt.xlabel("energy (meV)")
plt.ylabel("S (normalized)")
plt.tight_layout()
plt.savefig("spectrum.png", dpi=160)
""",
    "modes": """\
#!/usr/bin/env python3
# Minimal plotting stub for modes.csv / dispersion.csv.
import csv
import matplotlib.pyplot as plt

k, w = [], []
with open("dispersion.csv") as fh:
    for row in csv.reader(r for r in fh if not r.startswith("#")):
        if row[0] == "kmag_invnm":
            continue
        k.append(float(row[0]))
        w.append(float(row[1]))
plt.plot(k, w, "s", ms=2)
plt.xlabel("|k| (1/nm)")
plt.ylabel("mode energy (meV)")
plt.tight_layout()
plt.savefig("dispersion.png", dpi=160)
""",
}


def _write_plot_stub(outdir: Path, kind: str) -> None:
    from .outputs import write_text_atomic

    write_text_atomic(outdir / f"plot_{kind}.py", _PLOT_STUBS[kind])
