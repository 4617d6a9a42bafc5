"""Collective spin operators, coherent spin states and covariance machinery.

Everything here lives in the Dicke basis of N two-mode bosons: the
(N+1)-dimensional joint eigenbasis of J^2 and Jz, with amplitudes stored
in ascending order of the population imbalance m = -N/2 ... +N/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, xlogy

HERMITICITY_TOL = 1e-12
NORM_TOL = 1e-12
# First moments in the y-z plane must vanish (relative to N) for the
# covariance normalization used here; see covariance_yz.
FIRST_MOMENT_TOL = 1e-8


def _validate_even_n(n_particles) -> int:
    if not isinstance(n_particles, (int, np.integer)):
        raise TypeError(f"particle number must be an integer, got {type(n_particles).__name__}")
    n = int(n_particles)
    if n < 2 or n % 2 != 0:
        raise ValueError(f"particle number must be even and >= 2, got {n}")
    return n


def m_values(n_particles: int) -> np.ndarray:
    """Imbalance quantum numbers m = -N/2 ... +N/2, ascending."""
    j = n_particles / 2.0
    return np.arange(-j, j + 1.0)


def raising_coefficients(n_particles: int) -> np.ndarray:
    """Ladder factors <m+1|J+|m> = sqrt(j(j+1) - m(m+1)) for m = -j ... j-1."""
    j = n_particles / 2.0
    m = np.arange(-j, j)
    return np.sqrt(j * (j + 1.0) - m * (m + 1.0))


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the two-mode Hamiltonian H = chi*Jz^2 - omega*Jx (hbar = 1).

    The dimensionless interaction-over-tunneling ratio N*chi/omega is exposed
    as ``lam`` whenever omega > 0.  Attractive interaction (chi < 0) is not
    supported.
    """

    n_particles: int
    chi: float
    omega: float

    def __post_init__(self):
        _validate_even_n(self.n_particles)
        if not np.isfinite(self.chi) or not np.isfinite(self.omega):
            raise ValueError("chi and omega must be finite")
        if self.omega < 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if self.chi < 0:
            raise ValueError("attractive interaction (chi < 0) is out of scope")
        if self.omega == 0 and self.chi == 0:
            raise ValueError("chi and omega cannot both vanish")

    @property
    def lam(self) -> float | None:
        """N*chi/omega, or None in the pure-twisting limit omega = 0."""
        if self.omega == 0:
            return None
        return self.n_particles * self.chi / self.omega

    @classmethod
    def coupled(cls, n_particles: int, lam: float, omega: float = 1.0) -> "ModelParams":
        """Coupled junction at a given interaction ratio; time in units 1/omega."""
        if omega <= 0:
            raise ValueError("coupled parameters require omega > 0")
        if lam < 0:
            raise ValueError("attractive branch (lam < 0) is out of scope")
        return cls(n_particles=n_particles, chi=lam * omega / n_particles, omega=omega)

    @classmethod
    def twisting(cls, n_particles: int, chi: float = 1.0) -> "ModelParams":
        """Pure one-axis twisting (omega = 0); time in units 1/chi."""
        return cls(n_particles=n_particles, chi=chi, omega=0.0)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over the Dicke basis."""

    n_particles: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = _validate_even_n(self.n_particles)
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.shape != (n + 1,):
            raise ValueError(f"amplitudes must have shape ({n + 1},), got {amp.shape}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi| = {norm!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.n_particles + 1


@dataclass(frozen=True)
class CollectiveOperator:
    """Hermitian operator on the Dicke basis, with a tridiagonal-structure flag."""

    n_particles: int
    matrix: np.ndarray
    is_tridiagonal: bool = False

    def __post_init__(self):
        n = _validate_even_n(self.n_particles)
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (n + 1, n + 1):
            raise ValueError(f"matrix must be ({n + 1},{n + 1}), got {mat.shape}")
        dev = np.abs(mat - mat.conj().T).max()
        if dev > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: max |A - A^dag| = {dev:.3e}")
        if self.is_tridiagonal:
            off = mat.copy()
            for k in (-1, 0, 1):
                np.fill_diagonal(off[max(0, -k):, max(0, k):], 0.0)
            if np.any(off != 0):
                raise ValueError("is_tridiagonal set but entries exist outside the three central diagonals")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.n_particles + 1


@dataclass(frozen=True)
class CovarianceYZ:
    """Covariance data in the y-z plane, normalized as 2<{Ji, Jj}>/N."""

    gzz: float
    gyy: float
    gyz: float

    def __post_init__(self):
        if self.gzz < -1e-10 or self.gyy < -1e-10:
            raise ValueError(f"diagonal covariance entries must be nonnegative: {self}")

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.gzz, self.gyz], [self.gyz, self.gyy]])


@lru_cache(maxsize=None)
def build_spin_operators(n_particles: int) -> tuple[CollectiveOperator, CollectiveOperator, CollectiveOperator]:
    """Return (Jx, Jy, Jz) for N particles.

    Jz is diagonal with entries m; Jx and Jy are the tridiagonal ladder
    combinations (J+ +- J-)/2, (J+ - J-)/2i with
    <m+1|J+|m> = sqrt(j(j+1) - m(m+1)), j = N/2.
    """
    n = _validate_even_n(n_particles)
    dim = n + 1
    f = raising_coefficients(n)
    lower = np.arange(1, dim), np.arange(dim - 1)
    upper = np.arange(dim - 1), np.arange(1, dim)

    jx = np.zeros((dim, dim), dtype=complex)
    jx[lower] = f / 2.0
    jx[upper] = f / 2.0

    jy = np.zeros((dim, dim), dtype=complex)
    jy[lower] = -0.5j * f
    jy[upper] = 0.5j * f

    jz = np.diag(m_values(n).astype(complex))

    return (
        CollectiveOperator(n, jx, is_tridiagonal=True),
        CollectiveOperator(n, jy, is_tridiagonal=True),
        CollectiveOperator(n, jz, is_tridiagonal=True),
    )


def coherent_state(n_particles: int, theta: float, phi: float) -> StateVector:
    """Coherent spin state with mean spin along (sin t cos p, sin t sin p, cos t).

    Amplitudes follow the binomial expansion of the product state in which
    every particle points along the same Bloch direction; computed in log
    space so that large N does not overflow the binomial coefficients.
    """
    n = _validate_even_n(n_particles)
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    if not -np.pi <= phi <= np.pi:
        raise ValueError(f"phi must lie in [-pi, pi], got {phi}")

    m = m_values(n)
    ka = n / 2.0 + m  # mode-a occupation
    kb = n / 2.0 - m
    log_binom = 0.5 * (gammaln(n + 1.0) - gammaln(ka + 1.0) - gammaln(kb + 1.0))
    # xlogy(0, 0) = 0 keeps the theta = 0, pi edge states exact
    log_mag = log_binom + xlogy(ka, np.cos(theta / 2.0)) + xlogy(kb, np.sin(theta / 2.0))
    amp = np.exp(log_mag) * np.exp(1j * phi * kb)
    amp /= np.linalg.norm(amp)
    return StateVector(n, amp)


def expectation(op: CollectiveOperator, psi: StateVector) -> float:
    """<psi|op|psi> for a Hermitian operator; the imaginary residue is checked
    and discarded."""
    if op.n_particles != psi.n_particles:
        raise ValueError(f"dimension mismatch: operator N={op.n_particles}, state N={psi.n_particles}")
    val = np.vdot(psi.amplitudes, op.matrix @ psi.amplitudes)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"imaginary residue {val.imag:.3e} signals a non-Hermitian operator")
    return float(val.real)


def covariance_yz(psi: StateVector) -> CovarianceYZ:
    """Raw second moments 2<{Ji, Jj}>/N in the y-z plane.

    No first-moment subtraction is applied: the states in scope satisfy
    <Jy> = <Jz> = 0 at all times, and this is asserted rather than silently
    generalized.
    """
    _, jy_op, jz_op = build_spin_operators(psi.n_particles)
    n = psi.n_particles
    amp = psi.amplitudes
    jy_psi = jy_op.matrix @ amp
    jz_psi = jz_op.matrix @ amp

    jy_mean = np.vdot(amp, jy_psi).real
    jz_mean = np.vdot(amp, jz_psi).real
    if abs(jy_mean) >= FIRST_MOMENT_TOL * n or abs(jz_mean) >= FIRST_MOMENT_TOL * n:
        raise ValueError(
            "state outside the supported symmetry class: "
            f"<Jy> = {jy_mean:.3e}, <Jz> = {jz_mean:.3e} must vanish"
        )

    gzz = 4.0 * np.vdot(jz_psi, jz_psi).real / n
    gyy = 4.0 * np.vdot(jy_psi, jy_psi).real / n
    # <{Jy,Jz}> = 2 Re <Jy psi|Jz psi> for Hermitian Jy, Jz
    gyz = 4.0 * np.vdot(jy_psi, jz_psi).real / n
    return CovarianceYZ(gzz=gzz, gyy=gyy, gyz=gyz)


def lambda_pm(gamma: CovarianceYZ) -> tuple[float, float]:
    """Eigenvalues (lambda_plus, lambda_minus) of the 2x2 covariance matrix."""
    s = gamma.gzz + gamma.gyy
    r = np.hypot(gamma.gzz - gamma.gyy, 2.0 * gamma.gyz)
    return 0.5 * (s + r), 0.5 * (s - r)
