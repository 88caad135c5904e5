"""Estimating the nearest-neighbor coupling from permittivity models.

A polar crystal near a phonon resonance,

    eps(w) = eps_inf * (1 + (wL^2 - wT^2) / (wT^2 - w^2)),

corresponds to a transition dipole per unit cell of

    d_u = sqrt(hbar V_cell eps0 eps_inf (wL^2 - wT^2) / (2 wT)),

which for a cubic cell of side a gives a nearest-neighbor coupling

    Omega0 = d_u^2 / (4 pi eps0 eps_inf hbar a^3)
           = (wL^2 - wT^2) / (8 pi wT),

independent of eps_inf.  The molecular (Lorentz) form
``eps = eps_inf + S^2 / (w0^2 - w^2)`` gives
``Omega0 = S^2 / (8 pi w0 eps_inf)``.  Results are in the same unit as
the input frequencies.  These are bulk estimates; treating a monolayer
this way ignores the missing third dimension and non-cubic cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import EPS0_E2_PER_MEV_NM, to_mev
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class PolarMaterial:
    """Reststrahlen-type two-frequency permittivity parameters."""

    omega_L: float
    omega_T: float
    eps_inf: float
    V_cell: float | None = None  # nm^3
    unit: str = "cm-1"
    name: str = ""

    def __post_init__(self):
        if not self.omega_T > 0.0 or self.omega_L < self.omega_T:
            raise InvalidArgumentError(
                f"need omega_L >= omega_T > 0, got ({self.omega_L}, {self.omega_T})"
            )
        if not self.eps_inf > 0.0:
            raise InvalidArgumentError(f"eps_inf must be positive, got {self.eps_inf}")


@dataclass(frozen=True)
class LorentzOscillator:
    """Single Lorentz resonance of strength S at omega_mol."""

    S: float
    omega_mol: float
    eps_inf: float
    unit: str = "cm-1"
    name: str = ""

    def __post_init__(self):
        if self.S < 0.0:
            raise InvalidArgumentError(f"S must be >= 0, got {self.S}")
        if not self.omega_mol > 0.0:
            raise InvalidArgumentError("omega_mol must be positive")
        if not self.eps_inf > 0.0:
            raise InvalidArgumentError(f"eps_inf must be positive, got {self.eps_inf}")


def omega0_polar(m: PolarMaterial) -> float:
    """(wL^2 - wT^2) / (8 pi wT), in the material's frequency unit."""
    return (m.omega_L**2 - m.omega_T**2) / (8.0 * math.pi * m.omega_T)


def omega0_lorentz(m: LorentzOscillator) -> float:
    """S^2 / (8 pi omega_mol eps_inf), in the material's frequency unit."""
    return m.S**2 / (8.0 * math.pi * m.omega_mol * m.eps_inf)


def dipole_per_cell(m: PolarMaterial) -> float:
    """Transition dipole per unit cell in e nm.

    Requires ``V_cell`` (nm^3).  Frequencies are converted to meV
    internally (hbar = 1 units).
    """
    if m.V_cell is None:
        raise InvalidArgumentError(f"material {m.name or '?'} has no V_cell")
    if not m.V_cell > 0.0:
        raise InvalidArgumentError(f"V_cell must be positive, got {m.V_cell}")
    w_l = to_mev(m.omega_L, m.unit)
    w_t = to_mev(m.omega_T, m.unit)
    d2 = m.V_cell * EPS0_E2_PER_MEV_NM * m.eps_inf * (w_l**2 - w_t**2) / (2.0 * w_t)
    return math.sqrt(d2)


# Representative literature parameters (frequencies in cm^-1); used by
# the regression checks and available from the CLI by name.
BUILTIN_MATERIALS: dict[str, PolarMaterial | LorentzOscillator] = {
    "SiC": PolarMaterial(
        omega_L=972.7, omega_T=796.1, eps_inf=6.52, V_cell=0.0207, name="SiC"
    ),
    "hBN-inplane": PolarMaterial(
        omega_L=1610.0, omega_T=1360.0, eps_inf=4.9, V_cell=0.0363, name="hBN-inplane"
    ),
    "hBN-outofplane": PolarMaterial(
        omega_L=818.0, omega_T=746.0, eps_inf=2.95, V_cell=0.0363,
        name="hBN-outofplane",
    ),
    "CBP": LorentzOscillator(S=164.0, omega_mol=1504.0, eps_inf=2.8, name="CBP"),
}


def material_omega0(m: PolarMaterial | LorentzOscillator) -> float:
    """Coupling estimate in the material's own frequency unit."""
    if isinstance(m, PolarMaterial):
        return omega0_polar(m)
    return omega0_lorentz(m)


def material_omega0_mev(m: PolarMaterial | LorentzOscillator) -> float:
    """Coupling estimate converted to meV."""
    return to_mev(material_omega0(m), m.unit)
