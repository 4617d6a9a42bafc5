"""Exact diagonalization of the two-mode Hamiltonian and spectral time evolution.

This is the ground-truth path against which every analytic result in the
package is measured.  The Hamiltonian chi*Jz^2 - omega*Jx is real symmetric
tridiagonal in the Dicke basis, so the full spectrum costs O(N^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .spin_core import (
    CollectiveOperator,
    ModelParams,
    StateVector,
    build_spin_operators,
    covariance_yz,
    expectation,
    m_values,
    raising_coefficients,
)
from .witnesses import WitnessRecord, make_record


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition: ascending eigenvalues and orthonormal columns."""

    n_particles: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=float)
        v = np.asarray(self.eigenvectors)
        if w.ndim != 1 or v.shape != (w.size, w.size):
            raise ValueError("eigenvalues and eigenvectors have inconsistent shapes")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", v)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


def hamiltonian(params: ModelParams) -> CollectiveOperator:
    """H = chi*Jz^2 - omega*Jx in units hbar = 1; real symmetric tridiagonal."""
    n = params.n_particles
    dim = n + 1
    m = m_values(n)
    mat = np.zeros((dim, dim), dtype=complex)
    np.fill_diagonal(mat, params.chi * m * m)
    if params.omega != 0.0:
        f = raising_coefficients(n)
        mat[np.arange(1, dim), np.arange(dim - 1)] = -params.omega * f / 2.0
        mat[np.arange(dim - 1), np.arange(1, dim)] = -params.omega * f / 2.0
    return CollectiveOperator(n, mat, is_tridiagonal=True)


def eigendecompose(op: CollectiveOperator) -> Spectrum:
    """Full spectrum of a collective operator.

    Real symmetric tridiagonal matrices (the Hamiltonian structure) go through
    the O(N^2) tridiagonal solver; anything else falls back to a dense
    Hermitian solve.
    """
    mat = op.matrix
    try:
        if op.is_tridiagonal and np.abs(mat.imag).max() == 0.0:
            d = mat.diagonal().real.copy()
            e = mat.diagonal(1).real.copy()
            w, v = scipy.linalg.eigh_tridiagonal(d, e)
        else:
            w, v = scipy.linalg.eigh(mat)
    except scipy.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"eigendecomposition failed to converge for N={op.n_particles}: {exc}"
        ) from exc
    return Spectrum(op.n_particles, w, v)


def evolve(spec: Spectrum, psi0: StateVector, t: float) -> StateVector:
    """Spectral propagation |psi(t)> = sum_k e^{-i E_k t} <v_k|psi0> |v_k>."""
    if spec.dim != psi0.dim:
        raise ValueError(f"dimension mismatch: spectrum dim={spec.dim}, state dim={psi0.dim}")
    coeffs = spec.eigenvectors.conj().T @ psi0.amplitudes
    amp = spec.eigenvectors @ (np.exp(-1j * spec.eigenvalues * t) * coeffs)
    return StateVector(psi0.n_particles, amp)


def trajectory(params: ModelParams, psi0: StateVector, times) -> list[WitnessRecord]:
    """Witness records along an exactly propagated trajectory.

    The time grid is caller-supplied; spectral propagation is exact at any t,
    so no internal stepping is needed.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-D sequence")
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending")

    spec = eigendecompose(hamiltonian(params))
    jx_op = build_spin_operators(params.n_particles)[0]
    records = []
    for t in times:
        psi_t = evolve(spec, psi0, float(t))
        gamma = covariance_yz(psi_t)
        jx = expectation(jx_op, psi_t)
        records.append(make_record(float(t), jx, gamma, params.n_particles))
    return records


def zeta2_of_time(params: ModelParams, psi0: StateVector):
    """Callable t -> optimized QFI witness along the exact trajectory.

    Used by minimum searches; diagonalizes once and reuses the spectrum.
    """
    spec = eigendecompose(hamiltonian(params))
    jx_op = build_spin_operators(params.n_particles)[0]

    def zeta2(t: float) -> float:
        psi_t = evolve(spec, psi0, t)
        gamma = covariance_yz(psi_t)
        rec = make_record(t, expectation(jx_op, psi_t), gamma, params.n_particles)
        return rec.zeta2_opt

    return zeta2
