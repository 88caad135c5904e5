"""Built-in oracle suite: cross-checks fast paths against brute force.

Every check is small and self-contained (largest problem: a 4 x 4
lattice), so the whole suite runs in seconds.  ``run_all`` prints one
PASS/FAIL line per check and returns False if anything failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.spatial.distance import pdist

from .analytic import interaction_criterion, lattice_sum_s3
from .cavity import (
    diagonalize_polaritons,
    gaussian_coupling,
    polariton_matrix,
    polariton_modes_fast,
    two_mode_energies,
)
from .collective import (
    build_hopfield,
    diagonalize_collective,
    reduced_symmetric_solve,
    solve_collective,
    total_dipoles,
)
from .lattice import build_lattice, coupling_matrix
from .materials import (
    BUILTIN_MATERIALS,
    material_omega0,
)
from .spectra import default_grid, spectral_function, spectrum_area


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def symmetry_report(values: np.ndarray) -> tuple[bool, str]:
    """Bitwise symmetry check naming the first offending index pair."""
    bad = np.argwhere(values != values.T)
    if bad.size:
        j, l = (int(v) for v in bad[0])
        return False, (
            f"asymmetric at (j, l) = ({j}, {l}): "
            f"{values[j, l]!r} vs {values[l, j]!r}"
        )
    if np.count_nonzero(values.diagonal()):
        j = int(np.nonzero(values.diagonal())[0][0])
        return False, f"nonzero diagonal at j = {j}"
    return True, "symmetric, zero diagonal"


def _check_pair_geometry() -> CheckResult:
    lat = build_lattice(2, 2, 0.5)
    d = np.sort(pdist(lat.positions))
    want = np.sort([0.5] * 4 + [0.5 * math.sqrt(2)] * 2)
    ok = d.shape == (6,) and np.allclose(d, want, rtol=0, atol=1e-12)
    return CheckResult("pair-geometry-2x2", ok, f"distances {np.round(d, 6)}")


def _check_coupling_values() -> CheckResult:
    lat = build_lattice(6, 1, 0.5)
    cm = coupling_matrix(lat, 1.3)
    ok, detail = symmetry_report(cm.values)
    if ok:
        j, l = np.meshgrid(np.arange(6), np.arange(6), indexing="ij")
        sep = np.abs(j - l).astype(float)
        np.fill_diagonal(sep, np.inf)
        expected = 1.3 / sep**3
        err = np.abs(cm.values - expected).max()
        ok = err < 1e-14
        detail = f"1xK chain inverse-cube error {err:.2e}"
    return CheckResult("coupling-chain-closed-form", ok, detail)


def _check_hopfield_two_site() -> CheckResult:
    lat = build_lattice(2, 1, 1.0)
    cm = coupling_matrix(lat, 1.0)
    h = build_hopfield([100.0, 100.0], cm)
    evals = np.sort(scipy.linalg.eigvals(h.entries).real)
    want = np.sort(
        [
            math.sqrt(100.0**2 + 2 * 100.0),
            -math.sqrt(100.0**2 + 2 * 100.0),
            math.sqrt(100.0**2 - 2 * 100.0),
            -math.sqrt(100.0**2 - 2 * 100.0),
        ]
    )
    err = np.abs(evals - want).max()
    return CheckResult("hopfield-2site-spectrum", err < 1e-9, f"max error {err:.2e}")


def _check_pairing_symmetry() -> CheckResult:
    lat = build_lattice(3, 2, 0.7)
    cm = coupling_matrix(lat, 0.9)
    h = build_hopfield(np.full(6, 80.0), cm)
    evals = np.sort(scipy.linalg.eigvals(h.entries).real)
    err = np.abs(evals + evals[::-1]).max()
    return CheckResult("eigenvalue-pairing", err < 1e-9, f"max |W + (-W)| = {err:.2e}")


def _check_oracle_equivalence() -> CheckResult:
    worst_w, worst_d = 0.0, 0.0
    for nx, ny in ((1, 2), (2, 2), (3, 3), (4, 3), (4, 4)):
        lat = build_lattice(nx, ny, 0.5)
        for ratio in (0.0, 1e-3, 1e-2):
            cm = coupling_matrix(lat, 100.0 * ratio)
            mr = solve_collective(lat, 100.0, cm, method="reduced")
            mf = solve_collective(lat, 100.0, cm, method="full")
            worst_w = max(worst_w, float(np.abs(mr.W / mf.W - 1).max()))
            worst_d = max(worst_d, float(np.abs(np.abs(mr.D) - np.abs(mf.D)).max()))
    ok = worst_w < 1e-8 and worst_d < 1e-6
    return CheckResult(
        "oracle-reduced-vs-full",
        ok,
        f"max rel dW = {worst_w:.2e}, max d|D| = {worst_d:.2e}",
    )


def _check_bosonicity() -> CheckResult:
    lat = build_lattice(3, 3, 0.5)
    cm = coupling_matrix(lat, 1.0)
    worst = 0.0
    for modes in (
        reduced_symmetric_solve(100.0, cm),
        diagonalize_collective(build_hopfield(np.full(9, 100.0), cm)),
    ):
        norm = np.sum(modes.alpha**2 - modes.beta**2, axis=1)
        worst = max(worst, float(np.abs(norm - 1).max()))
    return CheckResult("bosonicity", worst < 1e-9, f"max |norm - 1| = {worst:.2e}")


def _check_inverse_map() -> CheckResult:
    lat = build_lattice(4, 4, 0.5)
    cm = coupling_matrix(lat, 1.0)
    modes = reduced_symmetric_solve(100.0, cm)
    err = np.abs(modes.X @ (modes.alpha + modes.beta) - np.eye(16)).max()
    return CheckResult("inverse-map-identity", err < 1e-8, f"max residual {err:.2e}")


def _check_two_mode_formula() -> CheckResult:
    lat = build_lattice(3, 3, 0.5)
    cm = coupling_matrix(lat, 1.0)
    modes = solve_collective(lat, 100.0, cm)
    cav = gaussian_coupling(lat, omega_cav=modes.W[0], g_tot=2.0)
    g = np.zeros(9)
    g[0] = 2.0
    pm = diagonalize_polaritons(polariton_matrix(cav, modes, couplings=g))
    wp, wm = two_mode_energies(cav.omega_cav, modes.W[0], 2.0)
    want = np.sort(np.concatenate([[wp, wm], modes.W[1:]]))[::-1]
    err = float(np.abs(pm.Wm / want - 1).max())
    return CheckResult("two-mode-closed-form", err < 1e-10, f"max rel error {err:.2e}")


def _check_photon_fraction_sum() -> CheckResult:
    worst = 0.0
    for nx, ny in ((1, 2), (2, 2)):
        lat = build_lattice(nx, ny, 0.5)
        cm = coupling_matrix(lat, 1.0)
        modes = solve_collective(lat, 100.0, cm)
        cav = gaussian_coupling(lat, omega_cav=101.0, sigma_L=0.7, g_tot=1.5)
        pm = diagonalize_polaritons(polariton_matrix(cav, modes))
        worst = max(worst, abs(float(pm.photon_fraction.sum()) - 1.0))
    return CheckResult(
        "photon-fraction-sum-rule", worst < 1e-6, f"max |sum - 1| = {worst:.2e}"
    )


def _check_lorentzian_area() -> CheckResult:
    lat = build_lattice(2, 2, 0.5)
    cm = coupling_matrix(lat, 1.0)
    modes = solve_collective(lat, 100.0, cm)
    cav = gaussian_coupling(lat, omega_cav=modes.W[0], g_tot=2.0)
    pm = polariton_modes_fast(cav, modes)
    gamma = 1.0
    grid = default_grid(pm, gamma)
    lo = grid[0] - 15.0 * gamma
    hi = grid[-1] + 15.0 * gamma
    wide = np.linspace(lo, hi, 20001)
    spec = spectral_function(pm, gamma, wide, normalized=False)
    area = spectrum_area(spec)
    want = math.pi * float(pm.photon_fraction.sum())
    err = abs(area / want - 1)
    return CheckResult("lorentzian-area-rule", err < 0.02, f"area/pi sum = {1 + err:.4f}")


def _check_homogeneous_reduction() -> CheckResult:
    lat = build_lattice(3, 3, 0.5)
    cm = coupling_matrix(lat, 0.0)
    modes = solve_collective(lat, 100.0, cm)
    cav = gaussian_coupling(lat, omega_cav=100.0, g_tot=2.0)
    pm = polariton_modes_fast(cav, modes)
    wp, wm = two_mode_energies(100.0, 100.0, 2.0)
    want = np.sort(np.concatenate([[wp, wm], np.full(8, 100.0)]))[::-1]
    err = float(np.abs(pm.Wm - want).max())
    return CheckResult(
        "homogeneous-field-reduction", err < 1e-9, f"max |dW| = {err:.2e} meV"
    )


def _check_materials() -> CheckResult:
    rows = [
        ("SiC", 0.0196),
        ("hBN-inplane", 0.016),
        ("hBN-outofplane", 0.008),
        ("CBP", 1.7e-4),
    ]
    worst = 0.0
    for name, want in rows:
        m = BUILTIN_MATERIALS[name]
        ref = getattr(m, "omega_T", getattr(m, "omega_mol", None))
        ratio = material_omega0(m) / ref
        worst = max(worst, abs(ratio / want - 1))
    return CheckResult(
        "material-coupling-ratios", worst < 0.02, f"max rel dev {worst:.3%}"
    )


def _check_lattice_sum() -> CheckResult:
    v1 = lattice_sum_s3(1)
    want = 4.0 + 4.0 * 2.0**-1.5
    vals = [lattice_sum_s3(c) for c in (1, 2, 4, 8, 600)]
    monotone = all(b > a for a, b in zip(vals, vals[1:]))
    ok = abs(v1 - want) < 1e-12 and monotone and abs(vals[-1] - 9.03) < 0.01
    return CheckResult(
        "lattice-sum", ok, f"cutoff1 = {v1:.5f}, cutoff600 = {vals[-1]:.5f}"
    )


def _check_criterion_formula() -> CheckResult:
    t1 = interaction_criterion(1.0, 0.5, 2.5 * 0.5, 1.0).threshold_gamma
    t2 = interaction_criterion(0.1, 0.5, 2.5 * 0.5, 1.0).threshold_gamma
    boundary = interaction_criterion(1.0, 0.5, 2.0 * math.pi * 0.5, 1.0)
    ok = (
        abs(t1 - 2.0 * math.pi / 2.5) < 1e-12
        and abs(t2 - 0.2 * math.pi / 2.5) < 1e-12
        and boundary.holds
    )
    return CheckResult(
        "criterion-formula", ok, f"thresholds {t1:.4f}, {t2:.5f} meV"
    )


ALL_CHECKS: tuple[Callable[[], CheckResult], ...] = (
    _check_pair_geometry,
    _check_coupling_values,
    _check_hopfield_two_site,
    _check_pairing_symmetry,
    _check_oracle_equivalence,
    _check_bosonicity,
    _check_inverse_map,
    _check_two_mode_formula,
    _check_photon_fraction_sum,
    _check_lorentzian_area,
    _check_homogeneous_reduction,
    _check_materials,
    _check_lattice_sum,
    _check_criterion_formula,
)


def run_all(printer=print) -> bool:
    ok = True
    for check in ALL_CHECKS:
        try:
            res = check()
        except Exception as exc:  # a crashed check is a failed check
            res = CheckResult(check.__name__.lstrip("_"), False, f"raised {exc!r}")
        ok &= res.ok
        printer(f"{'PASS' if res.ok else 'FAIL'}  {res.name}: {res.detail}")
    return ok
