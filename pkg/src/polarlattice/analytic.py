"""Closed-form dispersion of the infinite dipole monolayer.

Plane-wave solutions of the coupled dipole equations of motion give the
dispersion either with the rotating-wave approximation,

    omega(k) = omega_mol + Omega0 * sum' cos(a k.(m, n)) / (m^2+n^2)^(3/2),

or exactly (no RWA),

    omega(k) = sqrt(omega_mol^2 + 2 omega_mol Omega0
                    * sum' cos(a k.(m, n)) / (m^2+n^2)^(3/2)),

where the primed sum runs over integer offsets (m, n) in the square
[-cutoff, cutoff]^2 excluding the origin (the self term).  The default
cutoff of 25 matches the neighbor range of a 51 x 51 patch, so the
truncated curves carry the same finite-range rolloff as the numerical
finite-lattice dispersion.

For small |k| the no-RWA branch is linear; converting the slope sum to
an integral gives d(omega^2)/d|k| = -4 pi omega_mol Omega0 a, hence

    omega(k) ~= omega(0) - 2 pi Omega0 |k| a          (leading form)

or, keeping the omega_mol / omega(0) prefactor, the first-order
expansion of the square root ("exact" linear form).  The same slope
sets the bandwidth a cavity field of width sigma_L can sample, which
yields the relevance criterion 2 pi Omega0 a / sigma_L >= gamma for
when the direct dipole-dipole coupling must be modeled explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError, InvalidArgumentError

DEFAULT_CUTOFF = 25


@dataclass(frozen=True)
class DispersionParams:
    """Parameters of the infinite-monolayer dispersion (meV, nm)."""

    omega_mol: float
    omega0: float
    a: float
    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if self.cutoff < 1:
            raise InvalidArgumentError(f"cutoff must be >= 1, got {self.cutoff}")
        if not self.omega_mol > 0.0:
            raise InvalidArgumentError("omega_mol must be positive")
        if not self.a > 0.0:
            raise InvalidArgumentError("lattice constant must be positive")


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of the interaction-relevance test."""

    threshold_gamma: float
    holds: bool


def _offsets(cutoff: int):
    r = np.arange(-cutoff, cutoff + 1)
    m, n = np.meshgrid(r, r, indexing="ij")
    mask = (m != 0) | (n != 0)
    return m[mask].astype(float), n[mask].astype(float)


def lattice_sum_s3(cutoff: int) -> float:
    """Truncated square-lattice inverse-cube sum.

    sum over (m, n) in [-cutoff, cutoff]^2, excluding the origin, of
    (m^2 + n^2)^(-3/2).  Converges to about 9.0336 as cutoff grows.
    """
    if cutoff < 1:
        raise InvalidArgumentError(f"cutoff must be >= 1, got {cutoff}")
    m, n = _offsets(cutoff)
    return float(np.sum((m**2 + n**2) ** -1.5))


def _coupling_sum(kx: float, ky: float, p: DispersionParams) -> float:
    # sum' cos(a (kx m + ky n)) / (m^2 + n^2)^(3/2)
    m, n = _offsets(p.cutoff)
    return float(
        np.sum(np.cos(p.a * (kx * m + ky * n)) * (m**2 + n**2) ** -1.5)
    )


def dispersion_rwa(k: tuple[float, float], p: DispersionParams) -> float:
    """RWA dispersion at wavevector ``k = (kx, ky)`` in 1/nm."""
    return p.omega_mol + p.omega0 * _coupling_sum(k[0], k[1], p)


def dispersion_full(k: tuple[float, float], p: DispersionParams) -> float:
    """No-RWA dispersion at wavevector ``k = (kx, ky)`` in 1/nm."""
    radicand = p.omega_mol**2 + 2.0 * p.omega_mol * p.omega0 * _coupling_sum(
        k[0], k[1], p
    )
    if radicand < 0.0:
        raise InstabilityError(
            f"negative squared frequency {radicand:.6g} at k = {k}: coupling "
            "too strong for a stable monolayer"
        )
    return math.sqrt(radicand)


def dispersion_rwa_chain_nn(kmag: float, p: DispersionParams) -> float:
    """1D nearest-neighbor chain, RWA: omega_mol + 2 Omega0 cos(k a)."""
    return p.omega_mol + 2.0 * p.omega0 * math.cos(kmag * p.a)


def dispersion_full_chain_nn(kmag: float, p: DispersionParams) -> float:
    """1D nearest-neighbor chain, no RWA."""
    radicand = p.omega_mol**2 + 4.0 * p.omega_mol * p.omega0 * math.cos(kmag * p.a)
    if radicand < 0.0:
        raise InstabilityError(f"negative squared frequency {radicand:.6g}")
    return math.sqrt(radicand)


def band_top(p: DispersionParams) -> float:
    """No-RWA band maximum omega(k = 0)."""
    return math.sqrt(
        p.omega_mol**2 + 2.0 * p.omega_mol * p.omega0 * lattice_sum_s3(p.cutoff)
    )


def dispersion_linear(kmag: float, p: DispersionParams, form: str = "main") -> float:
    """Small-|k| linear approximation of the no-RWA dispersion.

    ``form="main"`` uses slope -2 pi Omega0 a; ``form="exact"`` keeps
    the omega_mol / omega(0) prefactor from the first-order expansion.
    Valid for |k| a << 1.
    """
    if kmag < 0.0:
        raise InvalidArgumentError("kmag must be >= 0")
    w0 = band_top(p)
    slope = 2.0 * math.pi * p.omega0 * p.a
    if form == "main":
        return w0 - slope * kmag
    if form == "exact":
        return w0 - slope * kmag * p.omega_mol / w0
    raise InvalidArgumentError(f"unknown form {form!r} (use 'main' or 'exact')")


def dispersion_curves(kpoints: np.ndarray, p: DispersionParams) -> dict[str, np.ndarray]:
    """Vectorized RWA / no-RWA dispersion over an array of wavevectors.

    ``kpoints`` has shape (K, 2) in 1/nm.  Returns arrays under keys
    "rwa" and "full"; entries of "full" are NaN where the squared
    frequency is negative.
    """
    kpoints = np.asarray(kpoints, dtype=float)
    m, n = _offsets(p.cutoff)
    w3 = (m**2 + n**2) ** -1.5
    out_rwa = np.empty(kpoints.shape[0])
    out_full2 = np.empty(kpoints.shape[0])
    chunk = max(1, int(2e7) // m.size)
    for i in range(0, kpoints.shape[0], chunk):
        kx = kpoints[i : i + chunk, 0, None]
        ky = kpoints[i : i + chunk, 1, None]
        s = (np.cos(p.a * (kx * m + ky * n)) * w3).sum(axis=1)
        out_rwa[i : i + chunk] = p.omega_mol + p.omega0 * s
        out_full2[i : i + chunk] = p.omega_mol**2 + 2.0 * p.omega_mol * p.omega0 * s
    full = np.sqrt(np.where(out_full2 >= 0.0, out_full2, np.nan))
    return {"rwa": out_rwa, "full": full}


def _ring_sum(r: int) -> float:
    # Inverse-cube sum over the L-infinity ring max(|m|, |n|) = r.
    n = np.arange(-r, r + 1, dtype=float)
    edge = np.sum((r**2 + n**2) ** -1.5)
    m = np.arange(-r + 1, r, dtype=float)
    side = np.sum((m**2 + r**2) ** -1.5)
    return float(2.0 * edge + 2.0 * side)


def converge_cutoff(
    p: DispersionParams, tol_mev: float = 1e-4, max_cutoff: int = 100000
) -> int:
    """Grow the cutoff until the band maximum stops moving.

    Starting from ``p.cutoff``, rings of neighbors are added one at a
    time until a single ring changes the k = 0 frequency by less than
    ``tol_mev``.  Returns the first converged cutoff.
    """
    cutoff = p.cutoff
    s = lattice_sum_s3(cutoff)
    w = math.sqrt(p.omega_mol**2 + 2.0 * p.omega_mol * p.omega0 * s)
    while cutoff < max_cutoff:
        cutoff += 1
        s += _ring_sum(cutoff)
        w_new = math.sqrt(p.omega_mol**2 + 2.0 * p.omega_mol * p.omega0 * s)
        if abs(w_new - w) < tol_mev:
            return cutoff
        w = w_new
    return cutoff


def interaction_criterion(
    omega0: float, a: float, sigma_L: float, gamma: float
) -> CriterionResult:
    """Must the direct dipole-dipole coupling be modeled explicitly?

    A cavity field of width sigma_L samples wavevectors up to about
    1 / sigma_L, i.e. a band of width 2 pi Omega0 a / sigma_L.  When
    that bandwidth reaches the linewidth gamma, single-mode treatments
    break down.  ``threshold_gamma`` is the bandwidth; ``holds`` is
    bandwidth >= gamma.  An infinite sigma_L never triggers it.
    """
    if not (omega0 > 0.0 and a > 0.0 and sigma_L > 0.0 and gamma > 0.0):
        raise InvalidArgumentError("all criterion inputs must be positive")
    threshold = 0.0 if math.isinf(sigma_L) else 2.0 * math.pi * omega0 * a / sigma_L
    return CriterionResult(threshold_gamma=threshold, holds=threshold >= gamma)
