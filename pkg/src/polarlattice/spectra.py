"""Loss-broadened optical spectra of the coupled system.

Two routes are implemented:

* ``spectral_function`` -- solve the lossless polariton problem and
  broaden each mode ad hoc into a Lorentzian of full width gamma,
  weighted by its photonic fraction.
* ``spectral_function_lossy`` -- insert the losses directly into the
  Hamiltonian as complex frequencies (cavity: + i kappa / 2, molecules:
  + i Gamma / 2), diagonalize the resulting complex 2(N+1) eigenproblem
  in the molecular basis, and sum Lorentzians whose width is each
  mode's imaginary part.

For comparable loss values the two give nearly identical normalized
spectra; the second is the reference when mode-dependent broadening
matters.  Interference (Fano) terms between modes are not included.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.signal

from .cavity import CavityMode, PolaritonModes
from .collective import hopfield_entries
from .errors import InvalidArgumentError, NumericalError
from .lattice import CouplingMatrix

DEFAULT_GRID_POINTS = 2001
DEFAULT_GRID_PAD = 5.0  # in units of gamma, on each side


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Spectrum:
    """Sampled spectral function with provenance.

    ``S`` is peak-normalized when ``normalized`` is true; ``S_raw``
    always holds the unnormalized values.
    """

    omega: np.ndarray
    S: np.ndarray
    S_raw: np.ndarray
    normalized: bool
    method: str
    loss_params: dict

    @property
    def peak_value(self) -> float:
        return float(self.S_raw.max())


def default_grid(
    pm: PolaritonModes, gamma: float, points: int = DEFAULT_GRID_POINTS
) -> np.ndarray:
    """Uniform grid spanning all mode energies, padded by 5 gamma."""
    if pm.n_modes == 0:
        raise InvalidArgumentError("no polariton modes")
    if points < 2:
        raise InvalidArgumentError(f"need at least 2 grid points, got {points}")
    lo = float(pm.Wm.min()) - DEFAULT_GRID_PAD * gamma
    hi = float(pm.Wm.max()) + DEFAULT_GRID_PAD * gamma
    return np.linspace(lo, hi, points)


def _pack(omega, s_raw, normalized, method, loss_params) -> Spectrum:
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 1 or np.any(np.diff(omega) <= 0.0):
        raise InvalidArgumentError("frequency grid must be strictly increasing")
    s = s_raw / s_raw.max() if normalized and s_raw.max() > 0.0 else s_raw.copy()
    return Spectrum(
        omega=_frozen(omega.copy()),
        S=_frozen(s),
        S_raw=_frozen(s_raw),
        normalized=normalized,
        method=method,
        loss_params=dict(loss_params),
    )


def spectral_function(
    pm: PolaritonModes,
    gamma: float,
    grid: np.ndarray | None = None,
    normalized: bool = True,
) -> Spectrum:
    """Ad-hoc Lorentzian spectrum of the lossless polariton modes.

    S(omega) = sum_m pf_m * (gamma/2) / ((omega - W_m)^2 + (gamma/2)^2),
    with pf_m the photonic fraction.  Each mode integrates to pi * pf_m.
    """
    if not gamma > 0.0:
        raise InvalidArgumentError(f"gamma must be positive, got {gamma}")
    if grid is None:
        grid = default_grid(pm, gamma)
    omega = np.asarray(grid, dtype=float)
    half = gamma / 2.0
    diff = omega[:, None] - pm.Wm[None, :]
    s_raw = (pm.photon_fraction[None, :] * half / (diff**2 + half**2)).sum(axis=1)
    return _pack(omega, s_raw, normalized, "lorentzian_adhoc", {"gamma_meV": gamma})


def lossy_polariton_eigensystem(
    cav: CavityMode,
    omega_mol: float,
    coupling: CouplingMatrix,
    kappa: float,
    Gamma: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Complex polariton eigenvalues and photonic weights, molecular basis.

    Builds the 2(N+1) Bogoliubov matrix with cavity frequency
    ``omega_cav + i kappa/2`` and molecular frequencies
    ``omega_mol + i Gamma/2``, keeps the modes with positive real part
    and normalizes each eigenvector v to ``v^T G v = 1`` (the complex
    continuation of the bosonic normalization).  Returns the complex
    energies and the weights |zeta_m1|^2 - |eta_m1|^2.
    """
    if kappa < 0.0 or Gamma < 0.0:
        raise InvalidArgumentError("kappa and Gamma must be >= 0")
    n = coupling.n_sites
    if cav.g.shape[0] != n:
        raise InvalidArgumentError(
            f"cavity profile has {cav.g.shape[0]} sites, coupling {n}"
        )
    freqs = np.empty(n + 1, dtype=complex)
    freqs[0] = cav.omega_cav + 0.5j * kappa
    freqs[1:] = omega_mol + 0.5j * Gamma
    c = np.zeros((n + 1, n + 1))
    c[0, 1:] = cav.g
    c[1:, 0] = cav.g
    c[1:, 1:] = coupling.values
    m = hopfield_entries(freqs, c)
    try:
        evals, evecs = scipy.linalg.eig(m)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise NumericalError(
            f"complex eigensolver failed on dim {m.shape[0]} "
            f"(matrix norm {np.linalg.norm(m):.3e}): {exc}"
        ) from exc
    keep = evals.real > 0.0
    if keep.sum() != n + 1:
        raise NumericalError(
            f"expected {n + 1} positive-real-part modes, found {int(keep.sum())} "
            f"(matrix norm {np.linalg.norm(m):.3e})"
        )
    w = evals[keep]
    v = evecs[:, keep]
    zeta = v[0::2, :]
    eta = v[1::2, :]
    pseudo = np.sum(zeta**2 - eta**2, axis=0)
    if np.any(np.abs(pseudo) < 1e-12):
        raise NumericalError(
            "near-defective eigenvector (vanishing pseudo-norm); eigenvector "
            f"matrix condition {np.linalg.cond(evecs):.3e}"
        )
    scale = 1.0 / np.sqrt(pseudo)
    zeta = zeta * scale
    eta = eta * scale
    weights = np.abs(zeta[0, :]) ** 2 - np.abs(eta[0, :]) ** 2
    order = np.argsort(-w.real, kind="stable")
    return w[order], weights[order]


def spectral_function_lossy(
    cav: CavityMode,
    omega_mol: float,
    coupling: CouplingMatrix,
    kappa: float,
    Gamma: float,
    grid: np.ndarray,
    normalized: bool = True,
) -> Spectrum:
    """Spectrum from the complex-frequency Hamiltonian.

    S(omega) = sum_m pf_m * Im[W_m] / ((omega - Re[W_m])^2 + Im[W_m]^2)
    over the positive-real-part modes.  Tiny negative excursions from
    roundoff in the weights are clipped to keep S >= 0.
    """
    w, weights = lossy_polariton_eigensystem(cav, omega_mol, coupling, kappa, Gamma)
    omega = np.asarray(grid, dtype=float)
    diff = omega[:, None] - w.real[None, :]
    s_raw = (weights[None, :] * w.imag[None, :] / (diff**2 + w.imag[None, :] ** 2)).sum(
        axis=1
    )
    s_raw = np.maximum(s_raw, 0.0)
    return _pack(
        omega,
        s_raw,
        normalized,
        "complex_hamiltonian",
        {"kappa_meV": kappa, "Gamma_meV": Gamma},
    )


def spectrum_area(spec: Spectrum) -> float:
    """Trapezoidal integral of the raw spectrum over its grid."""
    return float(np.trapezoid(spec.S_raw, spec.omega))


def find_spectrum_peaks(
    spec: Spectrum, height_frac: float = 0.05
) -> tuple[np.ndarray, np.ndarray]:
    """Local maxima above ``height_frac`` of the global peak.

    Returns (positions, heights) in descending height order.
    """
    s = spec.S_raw
    idx, _ = scipy.signal.find_peaks(s, height=height_frac * s.max())
    order = np.argsort(-s[idx], kind="stable")
    idx = idx[order]
    return spec.omega[idx], s[idx]


def peak_contrast(spec: Spectrum, omega_split: float) -> tuple[float, float]:
    """Maximum S on each side of ``omega_split`` (below, above)."""
    below = spec.omega < omega_split
    lo = float(spec.S_raw[below].max()) if below.any() else 0.0
    hi = float(spec.S_raw[~below].max()) if (~below).any() else 0.0
    return lo, hi
