"""Gaussian nanocavity mode and its coupling to the collective modes.

The cavity field follows a Gaussian profile of width sigma_L centered on
the patch, so molecule j couples with strength

    g_j = g0 * exp(-((x_j - x0)^2 + (y_j - y0)^2) / (2 sigma_L^2)),

and an infinite sigma_L means a spatially homogeneous field.  Projected
onto the collective basis the cavity couples to mode n with strength
``G_n = sum_j g_j X_jn``; a homogeneous field therefore couples in
proportion to each mode's total dipole and is dominated by the bright
k = 0 mode, while a confined field spreads its weight over many modes.

The coupled cavity + N-mode problem is again a quadratic Bogoliubov
eigenproblem of dimension 2(N+1).  ``diagonalize_polaritons`` solves it
directly; ``polariton_modes_fast`` uses the equivalent symmetric
(N+1) x (N+1) reduction (exact because the matter block is diagonal in
the collective basis) and is the cheap default for large lattices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .collective import (
    EIG_IMAG_RTOL,
    CollectiveModes,
    HopfieldMatrix,
    _degenerate_clusters,
    _frozen,
    hopfield_entries,
)
from .errors import InstabilityError, InvalidArgumentError
from .lattice import Lattice

DARK_FRACTION_TOL = 1e-12


@dataclass(frozen=True)
class CavityMode:
    """Single nanocavity mode with a (possibly inhomogeneous) profile.

    ``g`` holds the per-molecule couplings in meV; ``g_tot**2`` equals
    ``sum(g**2)``.  ``sigma_L`` is in nm and may be ``math.inf`` for a
    homogeneous field.
    """

    omega_cav: float
    sigma_L: float
    center: tuple[float, float]
    g: np.ndarray
    g_tot: float
    g0: float


@dataclass(frozen=True)
class PolaritonModes:
    """Positive-frequency polariton modes of cavity + collective modes.

    Row m of ``zeta`` / ``eta`` holds the Bogoliubov coefficients of
    polariton m; column 0 is the photonic component, columns 1.. the
    matter (collective-mode) components.  Normalization per mode:
    ``sum(zeta^2) - sum(eta^2) = 1``.
    """

    Wm: np.ndarray
    zeta: np.ndarray
    eta: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.Wm.shape[0]

    @property
    def zeta1(self) -> np.ndarray:
        return self.zeta[:, 0]

    @property
    def eta1(self) -> np.ndarray:
        return self.eta[:, 0]

    @property
    def photon_fraction(self) -> np.ndarray:
        """Photonic weight |zeta_m1|^2 - |eta_m1|^2 of each mode."""
        return np.abs(self.zeta[:, 0]) ** 2 - np.abs(self.eta[:, 0]) ** 2

    @property
    def dark(self) -> np.ndarray:
        return self.photon_fraction < DARK_FRACTION_TOL


def gaussian_coupling(
    lat: Lattice,
    omega_cav: float,
    sigma_L: float = math.inf,
    center: tuple[float, float] | None = None,
    g0: float | None = None,
    g_tot: float | None = None,
) -> CavityMode:
    """Build the cavity mode profile over the lattice.

    Exactly one of ``g0`` (peak coupling at the Gaussian center) or
    ``g_tot`` (total coupling; the profile is rescaled so that
    ``sum(g_j^2) = g_tot^2``) must be given.  ``center`` defaults to the
    patch centroid.
    """
    if (g0 is None) == (g_tot is None):
        raise InvalidArgumentError("give exactly one of g0 or g_tot")
    if not (sigma_L > 0.0):
        raise InvalidArgumentError(f"sigma_L must be positive (or inf), got {sigma_L}")
    if center is None:
        center = lat.centroid()
    x0, y0 = float(center[0]), float(center[1])
    if math.isinf(sigma_L):
        profile = np.ones(lat.n_sites)
    else:
        d2 = (lat.positions[:, 0] - x0) ** 2 + (lat.positions[:, 1] - y0) ** 2
        profile = np.exp(-d2 / (2.0 * sigma_L**2))
    norm = float(np.linalg.norm(profile))
    if g_tot is not None:
        g = g_tot * profile / norm
        g0_val = g_tot / norm
    else:
        g = g0 * profile
        g0_val = g0
    return CavityMode(
        omega_cav=float(omega_cav),
        sigma_L=float(sigma_L),
        center=(x0, y0),
        g=_frozen(g),
        g_tot=float(np.linalg.norm(g)),
        g0=float(g0_val),
    )


def collective_couplings(cav: CavityMode, modes: CollectiveModes) -> np.ndarray:
    """Cavity coupling to each collective mode, ``G_n = sum_j g_j X_jn``."""
    if cav.g.shape[0] != modes.X.shape[0]:
        raise InvalidArgumentError(
            f"cavity profile has {cav.g.shape[0]} sites, modes {modes.X.shape[0]}"
        )
    return cav.g @ modes.X


def diamagnetic_shift(cav: CavityMode, omega_mol: float) -> float:
    """Cavity frequency shift 2 * sum_j g_j^2 / omega_mol.

    Equivalent, for the eigenproblem, to including the squared-field
    self-interaction term that this model otherwise omits.  Opt-in.
    """
    return 2.0 * float(np.sum(cav.g**2)) / omega_mol


def two_mode_energies(omega_cav: float, W1: float, G1: float) -> tuple[float, float]:
    """Upper/lower polariton energies of one cavity + one matter mode.

    Closed form (no rotating-wave approximation):

        W_pm^2 = ((wc^2 + W1^2) +- sqrt((wc^2 - W1^2)^2
                  + 16 G1^2 wc W1)) / 2
    """
    if not (omega_cav > 0.0 and W1 > 0.0):
        raise InvalidArgumentError("omega_cav and W1 must be positive")
    s = omega_cav**2 + W1**2
    r = math.sqrt((omega_cav**2 - W1**2) ** 2 + 16.0 * G1**2 * omega_cav * W1)
    w_plus2 = 0.5 * (s + r)
    w_minus2 = 0.5 * (s - r)
    if w_minus2 <= 0.0:
        raise InstabilityError(
            f"lower polariton squared energy {w_minus2:.6g} <= 0 "
            f"(coupling G1 = {G1} beyond the stability bound)"
        )
    return math.sqrt(w_plus2), math.sqrt(w_minus2)


def polariton_matrix(
    cav: CavityMode,
    modes: CollectiveModes,
    couplings: np.ndarray | None = None,
) -> HopfieldMatrix:
    """Hopfield matrix of the cavity + N collective modes, dim 2(N+1).

    Unit 0 is the cavity; there are no mode-mode blocks because the
    collective basis is diagonal.  ``couplings`` overrides the computed
    ``G_n`` (useful for controlled tests).
    """
    g = collective_couplings(cav, modes) if couplings is None else np.asarray(couplings)
    n = modes.n_modes
    if g.shape != (n,):
        raise InvalidArgumentError(f"couplings shape {g.shape}, expected ({n},)")
    freqs = np.concatenate([[cav.omega_cav], modes.W])
    c = np.zeros((n + 1, n + 1))
    c[0, 1:] = g
    c[1:, 0] = g
    return HopfieldMatrix(_frozen(hopfield_entries(freqs, c)))


def _finish_polaritons(w, zeta, eta) -> PolaritonModes:
    # Deterministic sign: sum(zeta + eta) > 0, falling back to the
    # largest-magnitude component for dark combinations.  Exactly
    # degenerate clusters are ordered by photonic weight.
    ab = zeta + eta
    sums = ab.sum(axis=1)
    tol = 1e-9 * np.sqrt(w.shape[0])
    signs = np.where(sums > tol, 1.0, np.where(sums < -tol, -1.0, 0.0))
    for m in np.nonzero(signs == 0.0)[0]:
        lead = ab[m, np.argmax(np.abs(ab[m]))]
        signs[m] = 1.0 if lead >= 0.0 else -1.0
    zeta *= signs[:, None]
    eta *= signs[:, None]
    pf = np.abs(zeta[:, 0]) ** 2 - np.abs(eta[:, 0]) ** 2
    perm = np.arange(w.shape[0])
    for sl in _degenerate_clusters(w):
        if sl.stop - sl.start > 1:
            perm[sl] = perm[sl][np.argsort(-pf[sl], kind="stable")]
    if not np.array_equal(perm, np.arange(w.shape[0])):
        w, zeta, eta = w[perm].copy(), zeta[perm].copy(), eta[perm].copy()
    return PolaritonModes(_frozen(w), _frozen(zeta), _frozen(eta))


def diagonalize_polaritons(matrix: HopfieldMatrix) -> PolaritonModes:
    """Solve the full 2(N+1) polariton eigenproblem (real-frequency path).

    Returns the N+1 positive-frequency modes, normalized and sorted by
    descending energy (ties: photonic weight descending).
    """
    m = matrix.entries
    nm = matrix.n_modes
    evals, evecs = scipy.linalg.eig(m)
    scale = np.abs(evals.real).max()
    bad = np.abs(evals.imag) > EIG_IMAG_RTOL * np.maximum(
        np.abs(evals.real), 1e-12 * scale
    )
    if bad.any():
        i = int(np.argmax(np.abs(evals.imag)))
        raise InstabilityError(
            f"complex polariton eigenvalue {evals[i]:.6g}: outside the "
            "stable real-frequency regime"
        )
    w = evals.real
    order = np.argsort(-w, kind="stable")[:nm]
    if w[order[-1]] <= 0.0:
        raise InstabilityError("fewer than N+1 positive polariton energies")
    vecs = evecs[:, order]
    if np.abs(vecs.imag).max() > EIG_IMAG_RTOL:
        raise InstabilityError("polariton eigenvectors are not real within tolerance")
    vecs = vecs.real
    zeta = vecs[0::2, :].T.copy()
    eta = vecs[1::2, :].T.copy()
    snorm = np.sum(zeta**2 - eta**2, axis=1)
    if np.any(snorm <= 0.0):
        i = int(np.argmin(snorm))
        raise InstabilityError(
            f"polariton mode {i + 1} has non-positive symplectic norm"
        )
    rescale = 1.0 / np.sqrt(snorm)
    zeta *= rescale[:, None]
    eta *= rescale[:, None]
    return _finish_polaritons(w[order].copy(), zeta, eta)


def polariton_modes_fast(
    cav: CavityMode,
    modes: CollectiveModes,
    couplings: np.ndarray | None = None,
) -> PolaritonModes:
    """Symmetric-reduction solver for the polariton eigenproblem.

    The quadrature form of the cavity + diagonal matter problem gives
    squared energies as eigenvalues of the real symmetric matrix

        C[0, 0] = wc^2,  C[n, n] = W_n^2,
        C[0, n] = C[n, 0] = 2 G_n sqrt(wc W_n),

    with Bogoliubov coefficients reconstructed from its orthonormal
    eigenvectors.  Agrees with :func:`diagonalize_polaritons` to
    rounding error; preferred at large N.
    """
    g = collective_couplings(cav, modes) if couplings is None else np.asarray(couplings)
    freqs = np.concatenate([[cav.omega_cav], modes.W])
    if np.any(freqs <= 0.0):
        raise InvalidArgumentError("all bare frequencies must be positive")
    c = np.diag(freqs**2)
    c[0, 1:] = c[1:, 0] = 2.0 * g * np.sqrt(cav.omega_cav * modes.W)
    w2, s = scipy.linalg.eigh(c)
    if w2[0] <= 0.0:
        raise InstabilityError(
            f"squared polariton energy {w2[0]:.6g} <= 0 (beyond stability bound)"
        )
    order = np.argsort(-w2, kind="stable")
    w = np.sqrt(w2[order])
    s = s[:, order]
    r = np.sqrt(w[None, :] / freqs[:, None])  # r[i, m]
    zeta = (s * (r + 1.0 / r) / 2.0).T.copy()
    eta = (s * (r - 1.0 / r) / 2.0).T.copy()
    return _finish_polaritons(w, zeta, eta)
