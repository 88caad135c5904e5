"""Collective vibrational modes of the coupled dipole lattice.

The cavity-free Hamiltonian (site oscillators plus pair couplings) is
quadratic and is diagonalized by a Bogoliubov transformation

    P_n = sum_j (alpha_nj b_j + beta_nj b_j^dagger),

whose coefficients come from the eigenvectors of a 2N x 2N Hopfield
matrix.  Two solver routes are provided:

* ``diagonalize_collective`` -- the full non-symmetric 2N x 2N solve.
  Reference path; also works for site-dependent frequencies.
* ``reduced_symmetric_solve`` -- for a uniform molecular frequency the
  problem collapses to the real symmetric N x N eigenproblem
  ``W^2 = eig(omega^2 I + 2 omega Omega)``, roughly an order of
  magnitude cheaper at N ~ 2600.  Coefficients are reconstructed so the
  two routes agree mode by mode.

Both routes return the N positive-frequency modes, normalized to the
bosonic condition ``sum_j (alpha^2 - beta^2) = 1``, with a deterministic
sign and ordering convention (see ``solve_collective``).

Mode indexing is 1-based in exports (n = 1 is the highest frequency);
arrays in this module are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import InstabilityError, InvalidArgumentError, NumericalError
from .lattice import CouplingMatrix, Lattice

# Relative gap below which neighboring eigenvalues are treated as one
# degenerate cluster, and relative imaginary part above which an
# eigenvalue counts as complex (instability).
DEGENERACY_RTOL = 1e-10
EIG_IMAG_RTOL = 1e-9


@dataclass(frozen=True)
class HopfieldMatrix:
    """2N x 2N Bogoliubov eigenproblem matrix, interleaved (alpha, beta)."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 2


@dataclass(frozen=True)
class CollectiveModes:
    """Positive-frequency collective modes.

    Attributes
    ----------
    W : ndarray, shape (N,)
        Eigenfrequencies in meV, descending (index 0 <-> mode n = 1).
    alpha, beta : ndarray, shape (N, N)
        Bogoliubov coefficients; row n holds alpha_nj / beta_nj.
    X : ndarray, shape (N, N)
        Inverse map, ``X[j, n]``; satisfies X @ (alpha + beta) = I.
    D : ndarray or None, shape (N,)
        Total dipole of each mode in units of the molecular dipole,
        ``D_n = sum_j X[j, n]`` (signed).
    k : ndarray or None, shape (N, 2)
        Characteristic (kx, ky) of each mode in 1/nm, both >= 0.
    """

    W: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    X: np.ndarray
    D: np.ndarray | None = None
    k: np.ndarray | None = None

    @property
    def n_modes(self) -> int:
        return self.W.shape[0]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def hopfield_entries(freqs: np.ndarray, couplings: np.ndarray) -> np.ndarray:
    """Assemble Bogoliubov eigenproblem entries for any oscillator set.

    ``freqs`` holds the K bare frequencies, ``couplings`` the symmetric,
    zero-diagonal K x K bilinear couplings.  Layout for 0-based unit i:
    diagonal 2x2 blocks ``[[f_i, 0], [0, -f_i]]``; off-diagonal blocks
    ``[[c_il, -c_il], [c_il, -c_il]]``.  Supports complex dtype.
    """
    freqs = np.atleast_1d(np.asarray(freqs))
    n = freqs.shape[0]
    dtype = np.result_type(freqs.dtype, couplings.dtype)
    m = np.empty((2 * n, 2 * n), dtype=dtype)
    m[0::2, 0::2] = couplings
    m[0::2, 1::2] = -couplings
    m[1::2, 0::2] = couplings
    m[1::2, 1::2] = -couplings
    idx = np.arange(n)
    m[2 * idx, 2 * idx] = freqs
    m[2 * idx + 1, 2 * idx + 1] = -freqs
    m[2 * idx, 2 * idx + 1] = 0.0
    m[2 * idx + 1, 2 * idx] = 0.0
    return m


def build_hopfield(omega, coupling: CouplingMatrix) -> HopfieldMatrix:
    """Assemble the 2N x 2N Hopfield matrix of the coupled lattice.

    Layout for 0-based site index j: diagonal 2x2 blocks
    ``[[omega_j, 0], [0, -omega_j]]``; off-diagonal blocks
    ``[[Omega_jl, -Omega_jl], [Omega_jl, -Omega_jl]]``.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n = omega.shape[0]
    if coupling.values.shape != (n, n):
        raise InvalidArgumentError(
            f"coupling is {coupling.values.shape}, expected ({n}, {n})"
        )
    if not np.all(omega > 0.0):
        raise InvalidArgumentError("all molecular frequencies must be positive")
    return HopfieldMatrix(_frozen(hopfield_entries(omega, coupling.values)))


def _identity_assignment(omega: np.ndarray) -> CollectiveModes:
    # Decoupled oscillators: alpha + beta is only defined up to an
    # orthogonal transformation, so fix mode n = molecule n (sorted by
    # frequency, stable for the uniform case).
    order = np.argsort(-omega, kind="stable")
    n = omega.shape[0]
    alpha = np.eye(n)[order]
    return CollectiveModes(
        W=_frozen(omega[order].copy()),
        alpha=_frozen(alpha),
        beta=_frozen(np.zeros((n, n))),
        X=_frozen(alpha.T.copy()),
    )


def _degenerate_clusters(w: np.ndarray) -> list[slice]:
    """Consecutive index ranges of ``w`` (descending) within DEGENERACY_RTOL."""
    clusters = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or (w[i - 1] - w[i]) > DEGENERACY_RTOL * abs(w[i - 1]):
            clusters.append(slice(start, i))
            start = i
    return clusters


def _orthonormalize_cluster(alpha, beta, x, sl: slice) -> None:
    # Symmetric (Loewdin) orthonormalization in the symplectic metric,
    # sum_j (alpha_a alpha_b - beta_a beta_b) -> delta_ab.  A no-op when
    # the cluster is already orthonormal (reduced path).
    a, b = alpha[sl], beta[sl]
    gram = a @ a.T - b @ b.T
    if np.allclose(gram, np.eye(gram.shape[0]), atol=1e-12):
        return
    evals, evecs = np.linalg.eigh(gram)
    if evals.min() < 1e-8:
        raise NumericalError(
            f"degenerate cluster {sl} is symplectically ill-conditioned "
            f"(Gram eigenvalue {evals.min():.3e})"
        )
    ghalf = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    ginvhalf = evecs @ np.diag(1.0 / np.sqrt(evals)) @ evecs.T
    alpha[sl] = ginvhalf @ a
    beta[sl] = ginvhalf @ b
    x[:, sl] = x[:, sl] @ ghalf


def _rotate_cluster_dipole(alpha, beta, x, sl: slice, dark_tol: float) -> None:
    # Concentrate the cluster's total dipole in a single mode.  The
    # remaining members become exactly dark, which makes per-mode |D|
    # independent of the eigensolver's arbitrary basis choice inside a
    # degenerate cluster.
    size = sl.stop - sl.start
    if size < 2:
        return
    d = x[:, sl].sum(axis=0)
    norm = np.linalg.norm(d)
    if norm <= dark_tol:
        return
    basis = np.eye(size)
    basis[:, 0] = d / norm
    q, _ = np.linalg.qr(basis)
    if np.dot(q[:, 0], d) < 0.0:
        q[:, 0] = -q[:, 0]
    rot = q.T  # first row = normalized dipole direction
    alpha[sl] = rot @ alpha[sl]
    beta[sl] = rot @ beta[sl]
    x[:, sl] = x[:, sl] @ rot.T


def _fix_signs(alpha, beta, x, dark_tol: float) -> None:
    # Deterministic overall sign per mode: make sum_j (alpha + beta)
    # positive; for (numerically) dark modes make the largest-magnitude
    # component of alpha + beta positive.
    ab = alpha + beta
    sums = ab.sum(axis=1)
    signs = np.where(sums > dark_tol, 1.0, np.where(sums < -dark_tol, -1.0, 0.0))
    undecided = np.nonzero(signs == 0.0)[0]
    for n in undecided:
        lead = ab[n, np.argmax(np.abs(ab[n]))]
        signs[n] = 1.0 if lead >= 0.0 else -1.0
    alpha *= signs[:, None]
    beta *= signs[:, None]
    x *= signs[None, :]


def _canonicalize(w, alpha, beta, x) -> CollectiveModes:
    dark_tol = 1e-9 * np.sqrt(w.shape[0])
    for sl in _degenerate_clusters(w):
        if sl.stop - sl.start > 1:
            _orthonormalize_cluster(alpha, beta, x, sl)
            _rotate_cluster_dipole(alpha, beta, x, sl, dark_tol)
    _fix_signs(alpha, beta, x, dark_tol)
    return CollectiveModes(_frozen(w), _frozen(alpha), _frozen(beta), _frozen(x))


def diagonalize_collective(h: HopfieldMatrix) -> CollectiveModes:
    """Solve the full 2N x 2N Bogoliubov eigenproblem.

    Returns the N positive-frequency modes, bosonicity-normalized, sign
    fixed, sorted by descending frequency.  Raises
    :class:`InstabilityError` if eigenvalues acquire imaginary parts
    beyond roundoff, i.e. outside the stable-lattice regime.
    """
    m = h.entries
    n = h.n_modes
    off = m[0::2, 0::2].copy()
    np.fill_diagonal(off, 0.0)
    if not off.any():
        return _identity_assignment(np.diag(m)[0::2].copy())

    evals, evecs = scipy.linalg.eig(m)
    scale = np.abs(evals.real).max()
    bad = np.abs(evals.imag) > EIG_IMAG_RTOL * np.maximum(
        np.abs(evals.real), 1e-12 * scale
    )
    if bad.any():
        i = int(np.argmax(np.abs(evals.imag)))
        raise InstabilityError(
            f"complex eigenvalue {evals[i]:.6g} (pair index {i}): the "
            "coupled lattice is outside the stable real-frequency regime"
        )
    w = evals.real
    order = np.argsort(-w, kind="stable")[:n]
    if w[order[-1]] <= 0.0:
        raise InstabilityError("fewer than N positive eigenfrequencies found")
    vecs = evecs[:, order]
    if np.abs(vecs.imag).max() > EIG_IMAG_RTOL:
        raise InstabilityError("eigenvectors are not real within tolerance")
    vecs = vecs.real
    alpha = vecs[0::2, :].T.copy()
    beta = vecs[1::2, :].T.copy()
    snorm = np.sum(alpha**2 - beta**2, axis=1)
    if np.any(snorm <= 0.0):
        i = int(np.argmin(snorm))
        raise InstabilityError(
            f"mode {i + 1} has non-positive symplectic norm {snorm[i]:.3e}"
        )
    rescale = 1.0 / np.sqrt(snorm)
    alpha *= rescale[:, None]
    beta *= rescale[:, None]
    x = np.linalg.inv(alpha + beta)
    return _canonicalize(w[order].copy(), alpha, beta, x)


def reduced_symmetric_solve(omega_mol: float, coupling: CouplingMatrix) -> CollectiveModes:
    """Fast solver for a uniform molecular frequency.

    Diagonalizes the real symmetric matrix ``omega^2 I + 2 omega Omega``
    whose eigenvalues are the squared collective frequencies, then
    reconstructs the Bogoliubov coefficients:  with ``s_n =
    sqrt(W_n / omega)`` and orthonormal eigenvectors ``u``,

        alpha_nj = u_jn (s_n + 1/s_n) / 2,
        beta_nj  = u_jn (s_n - 1/s_n) / 2,
        X_jn     = u_jn / s_n.

    Algebraically equivalent to :func:`diagonalize_collective` on the
    same problem.
    """
    if not omega_mol > 0.0:
        raise InvalidArgumentError(f"omega_mol must be positive, got {omega_mol}")
    om = coupling.values
    n = om.shape[0]
    if not om.any():
        return _identity_assignment(np.full(n, float(omega_mol)))

    k = 2.0 * omega_mol * om
    idx = np.arange(n)
    k[idx, idx] += omega_mol**2
    w2, u = scipy.linalg.eigh(k)
    if w2[0] <= 0.0:
        raise InstabilityError(
            f"squared frequency {w2[0]:.6g} <= 0: couplings too strong for "
            "a stable lattice"
        )
    order = np.argsort(-w2, kind="stable")
    w = np.sqrt(w2[order])
    u = u[:, order]
    s = np.sqrt(w / omega_mol)
    alpha = (u * ((s + 1.0 / s) / 2.0)).T.copy()
    beta = (u * ((s - 1.0 / s) / 2.0)).T.copy()
    x = u / s
    return _canonicalize(w, alpha, beta, x.copy())


def total_dipoles(modes: CollectiveModes, d_mol: float = 1.0) -> np.ndarray:
    """Signed total dipole of each mode in units of ``d_mol``.

    Column sums of the inverse map, expressed in the unit-Euclidean
    mode-vector convention (each eigenvector scaled to
    ``sum_j (alpha^2 + beta^2) = 1``) rather than the Bogoliubov one;
    the per-mode conversion factor ``sqrt(sum(alpha^2 + beta^2))``
    deviates from 1 only at second order in Omega0 / omega_mol.
    """
    c = np.sum(modes.alpha**2 + modes.beta**2, axis=1)
    return d_mol * modes.X.sum(axis=0) * np.sqrt(c)


def _fft_axis_k(n: int, a: float) -> np.ndarray:
    # Discrete spatial frequencies as k = 2 pi (cycles / length); the
    # Nyquist bin of an even-length axis is mapped to +pi/a.
    m = np.arange(n)
    m = np.where(m <= n // 2, m, m - n)
    return 2.0 * np.pi * m / (n * a)


def mode_wavevectors(modes: CollectiveModes, lat: Lattice) -> np.ndarray:
    """Characteristic (kx, ky) >= 0 of each mode from its spatial pattern.

    Reshapes each alpha row to the ny x nx grid, takes the 2D FFT
    (no zero padding) and returns the non-negative-quadrant frequency
    maximizing |FT|^2.  Ties are broken by smallest |k|, then smallest
    kx.  The band edge along an axis is pi/a.
    """
    n = modes.n_modes
    if lat.n_sites != n:
        raise InvalidArgumentError(
            f"lattice has {lat.n_sites} sites, modes have {n}"
        )
    kx = _fft_axis_k(lat.nx, lat.a)
    ky = _fft_axis_k(lat.ny, lat.a)
    quadrant = (ky[:, None] >= 0.0) & (kx[None, :] >= 0.0)
    grids = modes.alpha.reshape(n, lat.ny, lat.nx)
    power = np.abs(np.fft.fft2(grids, axes=(-2, -1))) ** 2
    kmag = np.hypot(ky[:, None], kx[None, :])
    out = np.empty((n, 2))
    for i in range(n):
        p = np.where(quadrant, power[i], -1.0)
        top = p.max()
        tie = p >= top * (1.0 - 1e-12)
        cand_mag = np.where(tie, kmag, np.inf)
        best_mag = cand_mag.min()
        on_ring = tie & (cand_mag <= best_mag * (1.0 + 1e-12))
        cand_kx = np.where(on_ring, np.broadcast_to(kx[None, :], p.shape), np.inf)
        iy, ix = np.unravel_index(np.argmin(cand_kx), p.shape)
        out[i] = (kx[ix], ky[iy])
    return _frozen(out)


def dispersion_numeric(modes: CollectiveModes) -> np.ndarray:
    """(|k|, W) table over all modes, sorted by |k| then descending W."""
    if modes.k is None:
        raise InvalidArgumentError("wavevectors not populated; run mode_wavevectors")
    kmag = np.hypot(modes.k[:, 0], modes.k[:, 1])
    order = np.lexsort((-modes.W, kmag))
    return _frozen(np.column_stack([kmag[order], modes.W[order]]))


def solve_collective(
    lat: Lattice,
    omega_mol: float,
    coupling: CouplingMatrix,
    method: str = "auto",
) -> CollectiveModes:
    """Full collective-mode analysis of a lattice.

    Runs the selected solver ("reduced", "full", or "auto" = reduced),
    extracts wavevectors and total dipoles, and applies the final
    ordering: descending W, with degenerate clusters sorted by (kx, ky)
    lexicographically.
    """
    if method not in ("auto", "reduced", "full"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    if lat.n_sites != coupling.n_sites:
        raise InvalidArgumentError(
            f"lattice has {lat.n_sites} sites, coupling {coupling.n_sites}"
        )
    if method == "full":
        modes = diagonalize_collective(
            build_hopfield(np.full(lat.n_sites, omega_mol), coupling)
        )
    else:
        modes = reduced_symmetric_solve(omega_mol, coupling)

    k = np.asarray(mode_wavevectors(modes, lat))
    perm = np.arange(modes.n_modes)
    for sl in _degenerate_clusters(modes.W):
        if sl.stop - sl.start > 1:
            sub = np.lexsort((k[sl, 1], k[sl, 0]))
            perm[sl] = perm[sl][sub]
    if not np.array_equal(perm, np.arange(modes.n_modes)):
        modes = CollectiveModes(
            W=_frozen(modes.W[perm].copy()),
            alpha=_frozen(modes.alpha[perm].copy()),
            beta=_frozen(modes.beta[perm].copy()),
            X=_frozen(modes.X[:, perm].copy()),
        )
        k = k[perm]
    return replace(
        modes, D=_frozen(total_dipoles(modes)), k=_frozen(k.copy())
    )
