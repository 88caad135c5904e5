import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from polarlattice import (
    InvalidArgumentError,
    Lattice,
    build_lattice,
    coupling_matrix,
    omega0_from_dipole,
)
from polarlattice.constants import COULOMB_MEV_NM, DEBYE_E_NM


class TestBuildLattice:
    def test_reference_patch(self):
        lat = build_lattice(51, 51, 0.5)
        assert lat.n_sites == 2601
        span = lat.positions.max(axis=0) - lat.positions.min(axis=0)
        assert span == pytest.approx([25.0, 25.0])

    def test_single_molecule(self):
        lat = build_lattice(1, 1, 0.5)
        assert lat.n_sites == 1
        assert pdist(lat.positions).size == 0

    def test_2x2_pairs(self):
        lat = build_lattice(2, 2, 0.5)
        d = np.sort(pdist(lat.positions))
        assert d.shape == (6,)
        assert d[:4] == pytest.approx([0.5] * 4)
        assert d[4:] == pytest.approx([0.5 * math.sqrt(2)] * 2)

    def test_row_major_indexing(self):
        lat = build_lattice(3, 2, 1.5)
        assert lat.site_index(1, 2) == 5
        assert lat.positions[5] == pytest.approx([3.0, 1.5])
        with pytest.raises(InvalidArgumentError):
            lat.site_index(2, 0)

    @pytest.mark.parametrize("nx,ny,a", [(0, 3, 1.0), (3, 0, 1.0), (3, 3, 0.0), (3, 3, -1.0)])
    def test_invalid_arguments(self, nx, ny, a):
        with pytest.raises(InvalidArgumentError):
            build_lattice(nx, ny, a)

    @given(
        nx=st.integers(1, 8),
        ny=st.integers(1, 8),
        a=st.floats(0.1, 10.0, allow_nan=False),
    )
    @settings(max_examples=30, deadline=None)
    def test_minimum_distance_is_a(self, nx, ny, a):
        lat = build_lattice(nx, ny, a)
        d = pdist(lat.positions)
        if d.size:
            assert d.min() == pytest.approx(a)
            assert np.all(d >= a * (1 - 1e-12))

    def test_json_round_trip(self):
        lat = build_lattice(4, 3, 0.7)
        again = Lattice.from_json(lat.to_json())
        assert again.nx == 4 and again.ny == 3 and again.a == 0.7
        assert np.array_equal(again.positions, lat.positions)
        tampered = json.loads(lat.to_json())
        tampered["positions"][0] = [9.0, 9.0]
        with pytest.raises(InvalidArgumentError):
            Lattice.from_json(json.dumps(tampered))


class TestCouplingMatrix:
    def test_inverse_cube_values(self):
        lat = build_lattice(3, 1, 0.5)
        cm = coupling_matrix(lat, 2.0)
        assert cm.values[0, 1] == pytest.approx(2.0)  # r = a
        assert cm.values[0, 2] == pytest.approx(2.0 / 8.0)  # r = 2a

    def test_diagonal_neighbor(self):
        lat = build_lattice(2, 2, 0.5)
        cm = coupling_matrix(lat, 1.0)
        assert cm.values[0, 3] == pytest.approx(2.0**-1.5)

    def test_bitwise_symmetry_zero_diagonal(self):
        lat = build_lattice(5, 4, 0.37)
        cm = coupling_matrix(lat, 1.7)
        assert np.array_equal(cm.values, cm.values.T)
        assert not cm.values.diagonal().any()

    def test_decreases_with_distance_max_is_omega0(self):
        lat = build_lattice(6, 6, 0.5)
        cm = coupling_matrix(lat, 3.0)
        d = np.linalg.norm(
            lat.positions[:, None, :] - lat.positions[None, :, :], axis=-1
        )
        iu = np.triu_indices(lat.n_sites, 1)
        order = np.argsort(d[iu])
        v = cm.values[iu][order]
        dd = d[iu][order]
        # strictly smaller coupling whenever the distance is strictly larger
        strict = np.diff(dd) > 1e-12
        assert np.all(np.diff(v)[strict] < 0)
        assert cm.values.max() == pytest.approx(3.0)

    def test_chain_closed_form(self):
        lat = build_lattice(7, 1, 0.9)
        cm = coupling_matrix(lat, 1.3)
        for j in range(7):
            for l in range(7):
                if j != l:
                    assert cm.values[j, l] == pytest.approx(1.3 / abs(j - l) ** 3)

    def test_general_dipole_axis(self):
        # in-plane dipoles along x: head-to-tail pair (along x) flips sign
        # and doubles, side-by-side pair (along y) is unchanged
        lat = build_lattice(2, 2, 0.5)
        cm = coupling_matrix(lat, 1.0, dipole_axis=(1.0, 0.0, 0.0))
        assert cm.values[0, 1] == pytest.approx(-2.0)  # along x
        assert cm.values[0, 2] == pytest.approx(1.0)  # along y
        # diagonal pair: cos^2 = 1/2 -> factor -1/2
        assert cm.values[0, 3] == pytest.approx(2.0**-1.5 * (1 - 1.5))

    def test_non_finite_omega0_rejected(self):
        lat = build_lattice(2, 1, 0.5)
        with pytest.raises(InvalidArgumentError):
            coupling_matrix(lat, math.inf)


class TestOmega0FromDipole:
    def test_zero_dipole(self):
        assert omega0_from_dipole(0.0, 0.5) == 0.0

    def test_quadratic_in_dipole(self):
        assert omega0_from_dipole(0.2, 0.5) == pytest.approx(
            4.0 * omega0_from_dipole(0.1, 0.5)
        )

    def test_inverse_cube_in_spacing(self):
        assert omega0_from_dipole(0.1, 0.25) == pytest.approx(
            8.0 * omega0_from_dipole(0.1, 0.5)
        )

    def test_absolute_value(self):
        # d = 0.1 e nm at a = 1 nm: Coulomb constant times d^2
        assert omega0_from_dipole(0.1, 1.0) == pytest.approx(
            COULOMB_MEV_NM * 0.01
        )

    def test_debye_unit(self):
        d_debye = 1.7
        assert omega0_from_dipole(d_debye, 0.5, unit="debye") == pytest.approx(
            omega0_from_dipole(d_debye * DEBYE_E_NM, 0.5)
        )

    def test_errors(self):
        with pytest.raises(InvalidArgumentError):
            omega0_from_dipole(0.1, 0.0)
        with pytest.raises(InvalidArgumentError):
            omega0_from_dipole(-0.1, 0.5)
        with pytest.raises(InvalidArgumentError):
            omega0_from_dipole(0.1, 0.5, unit="C m")
