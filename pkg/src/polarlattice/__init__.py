"""Collective vibrational modes and polariton spectra of 2D dipole lattices."""

from .analytic import (
    CriterionResult,
    DispersionParams,
    dispersion_full,
    dispersion_linear,
    dispersion_rwa,
    interaction_criterion,
    lattice_sum_s3,
)
from .cavity import (
    CavityMode,
    PolaritonModes,
    collective_couplings,
    diagonalize_polaritons,
    gaussian_coupling,
    polariton_matrix,
    polariton_modes_fast,
    two_mode_energies,
)
from .collective import (
    CollectiveModes,
    HopfieldMatrix,
    build_hopfield,
    diagonalize_collective,
    dispersion_numeric,
    mode_wavevectors,
    reduced_symmetric_solve,
    solve_collective,
    total_dipoles,
)
from .errors import (
    ConfigError,
    InstabilityError,
    InvalidArgumentError,
    NumericalError,
    PolarLatticeError,
)
from .lattice import (
    CouplingMatrix,
    Lattice,
    build_lattice,
    coupling_matrix,
    omega0_from_dipole,
)
from .materials import (
    BUILTIN_MATERIALS,
    LorentzOscillator,
    PolarMaterial,
    dipole_per_cell,
    omega0_lorentz,
    omega0_polar,
)
from .spectra import (
    Spectrum,
    default_grid,
    spectral_function,
    spectral_function_lossy,
)

__version__ = "0.1.0"
