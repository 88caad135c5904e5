"""Finite 2D square lattices of identical dipoles and their Coulomb couplings.

A lattice is a rectangular nx x ny grid of molecules in the xy-plane with
lattice constant ``a`` (nm).  Sites are indexed row-major: molecule
``j = row * nx + col`` sits at ``(x, y) = (a * col, a * row)``.  All
transition dipoles point along +z (perpendicular to the plane), in which
case the pair coupling reduces to an inverse-cube law,

    Omega_jl = Omega0 * (a / r_jl)**3,

with ``Omega0`` the nearest-neighbor value.  The general orientation
factor ``1 - 3 (d . e_jl)^2`` is implemented for verification purposes
but perpendicular dipoles are the only supported configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .constants import COULOMB_MEV_NM, DEBYE_E_NM
from .errors import InvalidArgumentError

PERPENDICULAR_AXIS = (0.0, 0.0, 1.0)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Lattice:
    """Square-grid molecular patch.

    Attributes
    ----------
    nx, ny : int
        Molecules per row / per column.
    a : float
        Lattice constant in nm.
    positions : ndarray, shape (N, 2)
        Site coordinates in nm, row-major (j = row * nx + col).
    """

    nx: int
    ny: int
    a: float
    positions: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    def site_index(self, row: int, col: int) -> int:
        """Flat index of the molecule at (row, col)."""
        if not (0 <= row < self.ny and 0 <= col < self.nx):
            raise InvalidArgumentError(
                f"site (row={row}, col={col}) outside {self.ny} x {self.nx} grid"
            )
        return row * self.nx + col

    def centroid(self) -> tuple[float, float]:
        """Geometric center of the patch in nm."""
        return (self.a * (self.nx - 1) / 2.0, self.a * (self.ny - 1) / 2.0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "nx": self.nx,
                "ny": self.ny,
                "a_nm": self.a,
                "positions": self.positions.tolist(),
            }
        )

    @staticmethod
    def from_json(text: str) -> "Lattice":
        data = json.loads(text)
        lat = build_lattice(data["nx"], data["ny"], data["a_nm"])
        pos = np.asarray(data["positions"], dtype=float)
        if pos.shape != lat.positions.shape or not np.allclose(pos, lat.positions):
            raise InvalidArgumentError("positions do not form the declared grid")
        return lat


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric N x N dipole-dipole coupling matrix (meV), zero diagonal."""

    omega0: float
    values: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.values.shape[0]


def build_lattice(nx: int, ny: int, a: float) -> Lattice:
    """Build an nx x ny square-grid patch with lattice constant ``a`` nm."""
    if not (isinstance(nx, (int, np.integer)) and isinstance(ny, (int, np.integer))):
        raise InvalidArgumentError("nx and ny must be integers")
    if nx < 1 or ny < 1:
        raise InvalidArgumentError(f"lattice dimensions must be >= 1, got {nx} x {ny}")
    if not (a > 0.0 and math.isfinite(a)):
        raise InvalidArgumentError(f"lattice constant must be positive, got {a}")
    cols = np.arange(nx, dtype=float)
    rows = np.arange(ny, dtype=float)
    x = np.tile(cols, ny) * a
    y = np.repeat(rows, nx) * a
    return Lattice(int(nx), int(ny), float(a), _frozen(np.column_stack([x, y])))


def coupling_matrix(
    lat: Lattice,
    omega0: float,
    dipole_axis: tuple[float, float, float] = PERPENDICULAR_AXIS,
) -> CouplingMatrix:
    """Dipole-dipole couplings for every molecule pair of ``lat``.

    ``values[j, l] = omega0 * (a / r_jl)**3 * (1 - 3 (d . e_jl)^2)``
    with ``d`` the common unit dipole axis and ``e_jl`` the in-plane unit
    vector from j to l.  For the default perpendicular axis the angular
    factor is identically 1.  No edge correction is applied: edge sites
    simply have fewer close neighbors.

    The matrix is filled on the upper triangle and mirrored, so it is
    bitwise symmetric.
    """
    if not math.isfinite(omega0):
        raise InvalidArgumentError(f"omega0 must be finite, got {omega0}")
    d = np.asarray(dipole_axis, dtype=float)
    if d.shape != (3,) or not np.isfinite(d).all() or np.linalg.norm(d) == 0.0:
        raise InvalidArgumentError("dipole_axis must be a nonzero 3-vector")
    d = d / np.linalg.norm(d)

    pos = lat.positions
    dx = pos[:, None, 0] - pos[None, :, 0]
    dy = pos[:, None, 1] - pos[None, :, 1]
    r = np.hypot(dx, dy)
    np.fill_diagonal(r, np.inf)
    q = lat.a / r
    values = omega0 * q * q * q
    if d[0] != 0.0 or d[1] != 0.0:
        cos = (d[0] * dx + d[1] * dy) / r
        values *= 1.0 - 3.0 * cos**2
    values = np.triu(values, k=1)
    values += values.T
    return CouplingMatrix(float(omega0), _frozen(values))


def omega0_from_dipole(d_mol: float, a: float, unit: str = "enm") -> float:
    """Nearest-neighbor coupling hbar*Omega0 in meV from a transition dipole.

    Evaluates d^2 / (4 pi eps0 a^3) in vacuum.  ``unit`` selects the
    dipole unit: "enm" (e nm) or "debye".
    """
    if not (a > 0.0 and math.isfinite(a)):
        raise InvalidArgumentError(f"lattice constant must be positive, got {a}")
    if d_mol < 0.0:
        raise InvalidArgumentError(f"dipole moment must be >= 0, got {d_mol}")
    if unit == "enm":
        d_enm = d_mol
    elif unit == "debye":
        d_enm = d_mol * DEBYE_E_NM
    else:
        raise InvalidArgumentError(f"unknown dipole unit {unit!r} (use 'enm' or 'debye')")
    return COULOMB_MEV_NM * d_enm**2 / a**3
