"""Shared fixtures: the reference 51 x 51 lattice is solved once per session."""

from __future__ import annotations

import time
from types import SimpleNamespace

import pytest

from polarlattice import build_lattice, coupling_matrix, solve_collective
from polarlattice import pipeline

PAPER_RAW = {
    "config_version": 1,
    "lattice": {"nx": 51, "ny": 51, "a_nm": 0.5},
    "molecular": {"omega_mol_meV": 100.0, "omega0_meV": 1.0},
    "cavity": {
        "omega_cav_meV": "resonant_W1",
        "sigma_L_over_a": "homogeneous",
        "g_tot_meV": 2.0,
    },
    "losses": {"gamma_meV": 1.0, "kappa_meV": 1.0, "Gamma_meV": 1.0},
}


def _solve(omega0: float) -> SimpleNamespace:
    t0 = time.perf_counter()
    lat = build_lattice(51, 51, 0.5)
    coup = coupling_matrix(lat, omega0)
    modes = solve_collective(lat, 100.0, coup, method="reduced")
    elapsed = time.perf_counter() - t0
    key = (51, 51, 0.5, 100.0, omega0, "reduced")
    with pipeline._cache_lock:
        pipeline._collective_cache[key] = (lat, coup, modes)
    return SimpleNamespace(
        lattice=lat, coupling=coup, modes=modes, elapsed_s=elapsed, omega0=omega0
    )


@pytest.fixture(scope="session")
def paper_system():
    """51 x 51, a = 0.5 nm, omega0 = 1 meV, omega_mol = 100 meV."""
    return _solve(1.0)


@pytest.fixture(scope="session")
def paper_system_08():
    """Same lattice with omega0 = 0.8 meV (dispersion comparisons)."""
    return _solve(0.8)
