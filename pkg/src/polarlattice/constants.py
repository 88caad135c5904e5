"""Physical constants and unit conversions.

Internal unit system: energies in meV with hbar = 1, so every frequency
is stored as an energy in meV.  Lengths are in nm, dipole moments in
units of the elementary charge times nm (e nm).
"""

import math

# Coulomb constant e^2 / (4 pi eps0) in meV nm, for dipoles measured in
# e nm and distances in nm.  From e = 1.602176634e-19 C (exact) and
# eps0 = 8.8541878128e-12 F/m (CODATA 2018).
COULOMB_MEV_NM = 1439.9645478425668

# Vacuum permittivity expressed in e^2 / (meV nm), i.e. the value for
# which d^2 / (4 pi EPS0 r^3) gives meV with d in e nm and r in nm.
EPS0_E2_PER_MEV_NM = 1.0 / (4.0 * math.pi * COULOMB_MEV_NM)

# 1 Debye = 3.33564095198152e-30 C m.
DEBYE_E_NM = 0.020819433270935595

# Fixed spectroscopic conversion used everywhere in this package.
MEV_TO_INVCM = 8.06554
INVCM_TO_MEV = 1.0 / MEV_TO_INVCM


def to_mev(value: float, unit: str) -> float:
    """Convert an energy from ``unit`` ("meV" or "cm-1") to meV."""
    if unit == "meV":
        return value
    if unit in ("cm-1", "cm^-1", "1/cm"):
        return value * INVCM_TO_MEV
    raise ValueError(f"unknown energy unit {unit!r} (use 'meV' or 'cm-1')")
