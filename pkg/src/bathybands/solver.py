"""Galerkin discretization of the straightened-domain resolvent problem.

The fluid cell over the bottom z = -1 + epsilon*b(x) is straightened onto the
fixed strip S = T_{2pi} x [-1, 0] by (x, z) -> (x, z - epsilon*z*b(x)).  The
resolvent of (1 + G_theta) then solves a variable-coefficient elliptic system
on S whose sesquilinear form is Hermitian and coercive:

    a(u, v) = int_S [ P grad(u).grad(conj v)
                      + i*theta (e1 + eps*(-b, z b')) . (u grad(conj v) - conj(v) grad u) ]
              + theta^2 int_S (1 - eps*b) u conj(v)
              + int_gamma u conj(v)

with the symmetric matrix P = I + Q, where

    Q11 = -eps*b,   Q12 = Q21 = eps*z*b',   Q22 = eps*(b + eps*(z b')^2)/(1 - eps*b).

We expand in the tensor basis e^{ikx} T_j(2z+1) (Fourier in x, Chebyshev in
z), assemble the Hermitian stiffness matrix A, and compress the resolvent to
the surface: with E the per-mode trace map, R = 2*pi * E^H A^{-1} E is an
n_x x n_x Hermitian positive definite matrix whose eigenvalues are exactly
tau_n = 1/(1 + lambda_n) for the discrete eigenvalue problem
a(u, v) = (1 + lambda) int_gamma u conj(v).

Every coefficient above is a product of a function of x and 1, z or z^2, so
the assembly is a short sum of Kronecker-type products: Toeplitz matrices of
Fourier coefficients (FFT on an oversampled x grid) times fixed z-moment
matrices (Gauss-Legendre, exact for the polynomial integrands).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev as ncheb
from scipy.linalg import cho_factor, cho_solve, eigh, eigvalsh, LinAlgError

from .bathymetry import BathymetryProfile
from .errors import DomainDegeneracyError, NumericalBreakdownError


@dataclass(frozen=True)
class SpectralGrid:
    """Resolution parameters: trace modes, vertical degree, oversampling."""

    n_x: int = 64
    n_z: int = 32
    oversample: int = 4

    def __post_init__(self):
        if self.n_x < 2 or self.n_x % 2:
            raise ValueError("n_x must be a positive even integer")
        if self.n_z < 8:
            raise ValueError("n_z must be >= 8")
        if self.oversample < 2:
            raise ValueError("oversample must be >= 2")

    @property
    def modes(self) -> np.ndarray:
        """Trace Fourier modes k = -n_x/2 + 1 .. n_x/2, ascending."""
        return np.arange(-self.n_x // 2 + 1, self.n_x // 2 + 1)

    def mode_index(self, k: int) -> int:
        i = int(k) + self.n_x // 2 - 1
        if not 0 <= i < self.n_x:
            raise ValueError(f"mode {k} outside the trace grid")
        return i

    def check_profile(self, profile: BathymetryProfile):
        if self.n_x < 2 * profile.max_mode + 2:
            raise ValueError(
                f"n_x={self.n_x} too small for profile with max mode {profile.max_mode}"
            )


def gauss_legendre_unit_interval(n: int):
    """Nodes and weights on [-1, 0]."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * (nodes - 1.0), 0.5 * weights


@dataclass(frozen=True)
class TransformCoefficients:
    """Coefficients of the straightened system sampled on the tensor grid.

    ``x_nodes`` is the oversampled uniform grid used for the horizontal FFTs,
    ``z_nodes``/``z_weights`` the Gauss-Legendre rule of the assembly.  The
    2-D arrays are indexed [x, z].  ``p12`` stores the common off-diagonal
    entry of the symmetric matrix P; ``drift_x``/``drift_z`` the first-order
    transport vector (e1 + eps*(-b, z b')); ``weight`` the factor 1 - eps*b
    multiplying theta^2.
    """

    epsilon: float
    x_nodes: np.ndarray
    z_nodes: np.ndarray
    z_weights: np.ndarray
    b: np.ndarray
    db: np.ndarray
    p11: np.ndarray
    p12: np.ndarray
    p22: np.ndarray
    drift_x: np.ndarray
    drift_z: np.ndarray
    weight: np.ndarray

    def p_matrix(self, ix: int, iz: int) -> np.ndarray:
        return np.array(
            [
                [self.p11[ix, iz], self.p12[ix, iz]],
                [self.p12[ix, iz], self.p22[ix, iz]],
            ]
        )

    def min_det(self) -> float:
        return float(np.min(self.p11 * self.p22 - self.p12**2))


def check_domain(profile: BathymetryProfile, epsilon: float):
    bmax = profile.max_abs()
    if abs(epsilon) * bmax >= 1.0:
        raise DomainDegeneracyError(
            f"epsilon*max|b| = {abs(epsilon) * bmax:.3f} >= 1: bottom reaches the surface"
        )


def build_coefficients(
    profile: BathymetryProfile, epsilon: float, grid: SpectralGrid
) -> TransformCoefficients:
    """Sample every coefficient of the straightened system exactly.

    Requires epsilon*max|b| < 1 so the straightening stays a diffeomorphism.
    """
    check_domain(profile, epsilon)
    m = grid.oversample * grid.n_x
    x = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    z, wz = gauss_legendre_unit_interval(grid.n_z + 4)
    b = np.atleast_1d(profile.evaluate(x))
    db = np.atleast_1d(profile.evaluate(x, derivative=1))
    one = 1.0 - epsilon * b
    dbx = db[:, None]
    zz = z[None, :]
    p11 = np.broadcast_to(one[:, None], (m, z.size)).copy()
    p12 = epsilon * zz * dbx
    p22 = 1.0 / one[:, None] + (epsilon * zz * dbx) ** 2 / one[:, None]
    drift_x = np.broadcast_to(one[:, None], (m, z.size)).copy()
    drift_z = epsilon * zz * dbx
    weight = np.broadcast_to(one[:, None], (m, z.size)).copy()
    return TransformCoefficients(
        epsilon=float(epsilon),
        x_nodes=x,
        z_nodes=z,
        z_weights=wz,
        b=b,
        db=db,
        p11=p11,
        p12=p12,
        p22=p22,
        drift_x=drift_x,
        drift_z=drift_z,
        weight=weight,
    )


def q_series_term(profile: BathymetryProfile, order: int, x: float, z: float) -> np.ndarray:
    """Taylor coefficient matrix of P in powers of epsilon, evaluated pointwise.

    Order 1 is [[-b, z b'], [z b', b]]; order k >= 2 only carries the 22 entry
    b^k + (z b')^2 b^{k-2}.
    """
    if order < 1:
        raise ValueError("series order must be >= 1")
    b = profile.evaluate(x)
    zdb = z * profile.evaluate(x, derivative=1)
    if order == 1:
        return np.array([[-b, zdb], [zdb, b]])
    return np.array([[0.0, 0.0], [0.0, b**order + zdb**2 * b ** (order - 2)]])


@dataclass(frozen=True)
class DnoSpectrum:
    """Surface compression of the resolvent at one (theta, epsilon).

    ``resolvent_matrix`` is Hermitian positive definite; its eigenvalues are
    tau_n = 1/(1 + lambda_n) in (0, 1].  ``eigenvalues`` are the lambda_n in
    ascending order with orthonormal trace-mode ``eigenvectors`` (columns,
    phase fixed so the largest entry is real positive).  The pre-symmetrization
    Hermiticity defects of the stiffness matrix and of the compression are
    recorded for diagnostics.
    """

    theta: float
    epsilon: float
    grid: SpectralGrid
    modes: np.ndarray
    resolvent_matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    form_herm_defect: float
    herm_defect: float
    profile_digest: str = ""

    @property
    def taus(self) -> np.ndarray:
        return 1.0 / (1.0 + self.eigenvalues)


def _cheb_tables(n_z: int, z: np.ndarray):
    """Values and z-derivatives of T_j(2z+1) at the quadrature nodes."""
    s = 2.0 * z + 1.0
    b0 = ncheb.chebvander(s, n_z)
    b1 = np.empty_like(b0)
    for j in range(n_z + 1):
        cj = np.zeros(j + 1)
        cj[j] = 1.0
        b1[:, j] = 2.0 * ncheb.chebval(s, ncheb.chebder(cj)) if j else 0.0
    return b0, b1


class _Assembler:
    """Builds the stiffness matrix A and trace solves for one profile/grid.

    The quasi-momentum enters the form as a quadratic polynomial, so the
    matrix splits as A(theta) = A0 + theta*A1 + theta^2*A2 with constant
    Hermitian pieces; they are precomputed once and reused across a sweep.
    """

    def __init__(self, profile: BathymetryProfile, epsilon: float, grid: SpectralGrid):
        grid.check_profile(profile)
        self.profile = profile
        self.epsilon = float(epsilon)
        self.grid = grid
        self.tc = build_coefficients(profile, epsilon, grid)
        self.modes = grid.modes
        z, wz = self.tc.z_nodes, self.tc.z_weights
        b0, b1 = _cheb_tables(grid.n_z, z)
        # z-moment matrices; index [test_j, trial_l].
        z_mass = _zmat(wz, np.ones_like(z), b0, b0)
        z_stiff = _zmat(wz, np.ones_like(z), b1, b1)
        z_zsq_stiff = _zmat(wz, z**2, b1, b1)
        z_tv = _zmat(wz, z, b1, b0)  # test derivative, trial value
        z_vt = z_tv.T.copy()  # test value, trial derivative
        one = 1.0 - epsilon * self.tc.b
        c_one = _toeplitz(one, self.modes)
        c_bp = _toeplitz(epsilon * self.tc.db, self.modes)
        c_g0 = _toeplitz(1.0 / one, self.modes)
        c_g2 = _toeplitz(epsilon**2 * self.tc.db**2 / one, self.modes)
        k = self.modes.astype(float)
        kk = np.outer(k, k)
        self._a0 = _combine(
            [
                (kk * c_one, z_mass),  # P11 d_x d_x
                (1j * k[None, :] * c_bp, z_tv),  # P12, trial d_x, test d_z
                (-1j * k[:, None] * c_bp, z_vt),  # P12, trial d_z, test d_x
                (c_g0, z_stiff),  # P22 d_z d_z, z-independent part
                (c_g2, z_zsq_stiff),  # P22 d_z d_z, z^2 part
            ]
        )
        # Surface term: every Chebyshev polynomial has trace 1 at z = 0.
        nz1 = grid.n_z + 1
        surf = 2.0 * np.pi * np.ones((nz1, nz1))
        for i in range(grid.n_x):
            sl = slice(i * nz1, (i + 1) * nz1)
            self._a0[sl, sl] += surf
        self._a1 = _combine(
            [
                ((k[:, None] + k[None, :]) * c_one, z_mass),  # transport, e1 part
                (1j * c_bp, z_tv - z_vt),  # transport, vertical part
            ]
        )
        self._a2 = _combine([(c_one, z_mass)])  # weighted theta^2 mass

    def stiffness(self, theta: float) -> np.ndarray:
        """A(theta); Hermitian up to rounding (no explicit symmetrization)."""
        if theta == 0.0:
            return self._a0.copy()
        return self._a0 + theta * self._a1 + theta**2 * self._a2

    def hermiticity_defect(self, a: np.ndarray) -> float:
        norm = np.linalg.norm(a)
        return float(np.linalg.norm(a - a.conj().T) / norm) if norm else 0.0

    def factorize(self, theta: float):
        a = self.stiffness(theta)
        try:
            # potrf reads only the lower triangle, which symmetrizes implicitly.
            factor = cho_factor(a, lower=True, check_finite=False)
        except LinAlgError as exc:
            raise NumericalBreakdownError(
                f"stiffness matrix not positive definite at theta={theta}, "
                f"epsilon={self.epsilon}",
                min_rayleigh=float(eigvalsh(self.stiffness(theta)).min()),
            ) from exc
        return factor

    def trace_solve(self, factor, load_modes: np.ndarray) -> np.ndarray:
        """Apply the surface compression: coefficients -> resolvent trace."""
        n_x, nz1 = self.grid.n_x, self.grid.n_z + 1
        load_modes = np.atleast_2d(load_modes.T).T  # (n_x, n_rhs)
        rhs = np.zeros((n_x, nz1, load_modes.shape[1]), dtype=complex)
        rhs += load_modes[:, None, :]
        sol = cho_solve(factor, rhs.reshape(n_x * nz1, -1), check_finite=False)
        out = 2.0 * np.pi * sol.reshape(n_x, nz1, -1).sum(axis=1)
        return out


def _zmat(wz, weight, b_test, b_trial):
    return (b_test * (wz * weight)[:, None]).T @ b_trial


def _combine(terms) -> np.ndarray:
    """Sum of Kronecker-type products sum_t X_t (x) Z_t as one dense matrix.

    Contracting the stacked factors over t is a single GEMM; the result is
    reordered to the (mode, chebyshev) x (mode, chebyshev) layout.
    """
    xs = np.stack([np.ascontiguousarray(x, dtype=complex) for x, _ in terms])
    zs = np.stack([np.asarray(z, dtype=float) for _, z in terms])
    a4 = np.tensordot(xs, zs.astype(complex), axes=([0], [0]))  # [k, m, j, l]
    n_x, nz1 = xs.shape[1], zs.shape[1]
    return np.ascontiguousarray(a4.transpose(0, 2, 1, 3)).reshape(n_x * nz1, n_x * nz1)


def _toeplitz(samples: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Coupling matrix C[k, m] = 2*pi * c_hat(k - m) from grid samples of c."""
    m = samples.size
    chat = np.fft.fft(samples) / m
    diff = np.subtract.outer(modes, modes) % m
    return 2.0 * np.pi * chat[diff]


def assemble_dno(
    profile: BathymetryProfile,
    epsilon: float,
    theta: float,
    grid: SpectralGrid,
    assembler: Optional[_Assembler] = None,
    record_form_defect: bool = False,
) -> DnoSpectrum:
    """Spectrum of the surface operator at one (theta, epsilon).

    Builds the Hermitian resolvent compression R, diagonalizes it and returns
    the eigenvalues lambda_n = 1/tau_n - 1 sorted ascending.  Passing a
    pre-built ``assembler`` (same profile/epsilon/grid) skips re-assembling
    the theta-independent matrix blocks across a theta sweep;
    ``record_form_defect`` additionally measures the (rounding-level)
    Hermiticity defect of the full stiffness matrix.
    """
    asm = assembler or _Assembler(profile, epsilon, grid)
    form_defect = (
        asm.hermiticity_defect(asm.stiffness(theta)) if record_form_defect else float("nan")
    )
    factor = asm.factorize(theta)
    resolvent = asm.trace_solve(factor, np.eye(grid.n_x, dtype=complex))
    norm = np.linalg.norm(resolvent)
    herm_defect = float(np.linalg.norm(resolvent - resolvent.conj().T) / norm)
    resolvent = 0.5 * (resolvent + resolvent.conj().T)
    taus, vecs = eigh(resolvent, check_finite=False)
    lams = 1.0 / taus - 1.0
    order = np.argsort(lams, kind="stable")
    lams = lams[order]
    vecs = vecs[:, order]
    for col in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, col])))
        pivot = vecs[i, col]
        if abs(pivot) > 0.0:
            vecs[:, col] *= np.conj(pivot) / abs(pivot)
    return DnoSpectrum(
        theta=float(theta),
        epsilon=float(epsilon),
        grid=grid,
        modes=asm.modes.copy(),
        resolvent_matrix=resolvent,
        eigenvalues=lams,
        eigenvectors=vecs,
        form_herm_defect=form_defect,
        herm_defect=herm_defect,
        profile_digest=profile.digest(),
    )


def apply_resolvent(
    profile: BathymetryProfile,
    epsilon: float,
    theta: float,
    grid: SpectralGrid,
    xi: np.ndarray,
) -> np.ndarray:
    """Resolvent applied to trace data given as mode coefficients.

    ``xi[i]`` multiplies e^{i k x} for k = grid.modes[i]; the result uses the
    same convention and agrees with ``resolvent_matrix @ xi``.
    """
    xi = np.asarray(xi, dtype=complex)
    if xi.shape != (grid.n_x,):
        raise ValueError(f"expected trace vector of length {grid.n_x}")
    asm = _Assembler(profile, epsilon, grid)
    factor = asm.factorize(theta)
    return asm.trace_solve(factor, xi.reshape(-1, 1))[:, 0]
