"""Entanglement witnesses: spin squeezing and the QFI criterion.

Both witnesses are optimized over the y-z plane via the covariance
eigenvalues.  Also provides the short-time power-series coefficients of the
QFI witness for the three dynamical models, the third-order ratio between
the coupled and twisting-only models, and polynomial-fit extraction of those
coefficients from numerical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spin_core import CovarianceYZ, lambda_pm

#: Fit protocol defaults: two guard orders above the highest reported
#: coefficient; window keeps the series remainder below 1/N at N ~ 200.
FIT_DEGREE = 6
FIT_WINDOW = 0.2
FIT_SAMPLES = 64
CONDITION_LIMIT = 1e12

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class WitnessRecord:
    """One time sample of the witness trajectory."""

    t: float
    jx_mean: float
    gamma: CovarianceYZ
    lambda_plus: float
    lambda_minus: float
    xi2_opt: float
    zeta2_opt: float


@dataclass(frozen=True)
class TaylorCoeffs:
    """Coefficients p_k of (N chi t)^k in zeta^2(t) = 1 + sum_k p_k (N chi t)^k."""

    p1: float
    p2: float
    p3: float
    p4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p1, self.p2, self.p3, self.p4)

    def in_omega_time(self, lam: float) -> "TaylorCoeffs":
        """Rescale to powers of (omega t) using N chi = lam * omega."""
        return TaylorCoeffs(
            self.p1 * lam, self.p2 * lam**2, self.p3 * lam**3, self.p4 * lam**4
        )


@dataclass(frozen=True)
class TaylorFit:
    """Fitted coefficients plus least-squares diagnostics."""

    coeffs: TaylorCoeffs
    residual_norm: float
    condition_number: float


def xi2_opt(jx_mean: float, lambda_minus: float, n_particles: int) -> float:
    """Optimal spin-squeezing witness N^2 lambda_- / (4 <Jx>^2)."""
    if jx_mean == 0.0:
        raise ValueError("mean spin fully depolarized (<Jx> = 0): squeezing witness undefined")
    return n_particles**2 * lambda_minus / (4.0 * jx_mean**2)


def zeta2_opt(lambda_plus: float) -> float:
    """Optimal QFI witness 1/lambda_+; values below 1 witness entanglement."""
    if lambda_plus <= 0.0:
        raise ValueError(f"lambda_plus must be positive, got {lambda_plus}")
    return 1.0 / lambda_plus


def make_record(t: float, jx_mean: float, gamma: CovarianceYZ, n_particles: int) -> WitnessRecord:
    """Assemble a full witness record from the raw moments."""
    lp, lm = lambda_pm(gamma)
    return WitnessRecord(
        t=t,
        jx_mean=jx_mean,
        gamma=gamma,
        lambda_plus=lp,
        lambda_minus=lm,
        xi2_opt=xi2_opt(jx_mean, lm, n_particles),
        zeta2_opt=zeta2_opt(lp),
    )


def taylor_zeta2(model: str, lam: float | None = None) -> TaylorCoeffs:
    """Short-time series coefficients of zeta^2 in powers of (N chi t).

    Models: "oat" (twisting only), "pi_unstable" (coupled, state on the
    negative x axis, lam > 1), "zero" (coupled, state on the positive x axis).
    The coupled models require lam.  The linear term is -1 universally; the
    models first differ at third order.
    """
    if model == "oat":
        return TaylorCoeffs(-1.0, 0.5, -0.125, 0.0)
    if lam is None or lam <= 0:
        raise ValueError(f"model {model!r} requires a positive lam")
    if model == "pi_unstable":
        return TaylorCoeffs(
            -1.0,
            0.5,
            -0.125 - (1.0 / lam - 1.0 / lam**2) / 6.0,
            (1.0 / lam - 1.0 / lam**2) / 6.0,
        )
    if model == "zero":
        # Fourth order carries -(1/lam + 1/lam^2)/6: the series of the
        # closed-form covariance, confirmed against exact dynamics.
        return TaylorCoeffs(
            -1.0,
            0.5,
            -0.125 + (1.0 / lam + 1.0 / lam**2) / 6.0,
            -(1.0 / lam + 1.0 / lam**2) / 6.0,
        )
    raise ValueError(f"unknown model {model!r}")


def ratio_R(lam: float) -> float:
    """Third-order coefficient ratio between the coupled (pi) and twisting models."""
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    return 1.0 + (4.0 / 3.0) * (1.0 / lam - 1.0 / lam**2)


def zeta2_min(regime: str, lam: float) -> float:
    """Depth of the periodic witness minima in the two stable regimes."""
    if regime == "stable_pi":
        if not 0.0 < lam < 1.0:
            raise ValueError(f"stable_pi requires 0 < lam < 1, got {lam}")
        return 1.0 - lam
    if regime == "zero":
        if lam < 0.0:
            raise ValueError(f"zero regime requires lam >= 0, got {lam}")
        return 1.0 / (1.0 + lam)
    raise ValueError(f"unknown regime {regime!r}")


def fit_taylor_coeffs(
    records,
    n_particles: int,
    chi: float,
    degree: int = FIT_DEGREE,
    window: float = FIT_WINDOW,
) -> TaylorFit:
    """Least-squares polynomial in x = N chi t with the constant pinned to 1.

    Fits zeta^2(x) - 1 on the samples with 0 < x <= window; the fit is done
    in the rescaled variable u = x/window to keep the design matrix well
    conditioned, then mapped back.  Requires records starting at t = 0 (the
    shot-noise reference pinning the constant term).
    """
    records = list(records)
    if not records or records[0].t != 0.0:
        raise ValueError("records must start at t = 0")
    x = np.array([r.t * n_particles * chi for r in records])
    z = np.array([r.zeta2_opt for r in records])
    inside = (x > 0.0) & (x <= window)
    if inside.sum() < degree + 2:
        raise ValueError(
            f"need at least {degree + 2} samples in (0, {window}], found {inside.sum()}"
        )
    u = x[inside] / window
    design = np.vander(u, degree + 1, increasing=True)[:, 1:]
    cond = np.linalg.cond(design)
    if cond > CONDITION_LIMIT:
        raise RuntimeError(f"ill-conditioned design matrix: cond = {cond:.3e}")
    sol, res, *_ = np.linalg.lstsq(design, z[inside] - 1.0, rcond=None)
    coeff = sol / window ** np.arange(1, degree + 1)
    residual = float(np.sqrt(res[0])) if res.size else float(
        np.linalg.norm(design @ sol - (z[inside] - 1.0))
    )
    p = np.zeros(4)
    p[: min(4, degree)] = coeff[:4]
    return TaylorFit(TaylorCoeffs(*p), residual, cond)


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-4) -> tuple[float, float]:
    """Golden-section refinement of a unimodal minimum on [lo, hi]."""
    if hi <= lo:
        raise ValueError("need lo < hi")
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    t = c if fc < fd else d
    return t, min(fc, fd)


def minimize_zeta2(zeta2, t_hi: float, n_grid: int = 600, tol: float = 1e-4) -> tuple[float, float]:
    """Coarse grid scan followed by golden-section refinement of min zeta^2."""
    ts = np.linspace(0.0, t_hi, n_grid + 1)[1:]
    vals = np.array([zeta2(t) for t in ts])
    i = int(np.argmin(vals))
    lo = ts[i - 1] if i > 0 else ts[0] / 2.0
    hi = ts[i + 1] if i + 1 < ts.size else ts[-1]
    t_min, f_min = golden_section_min(zeta2, lo, hi, tol=tol)
    if vals[i] < f_min:
        return float(ts[i]), float(vals[i])
    return float(t_min), float(f_min)
