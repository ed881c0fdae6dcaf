"""Reference receivers: ideal heterodyne (SQL) and the Helstrom limit."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .receiver import ChannelMatrix


class QuadratureError(ArithmeticError):
    def __init__(self, message: str, estimate: float, abserr: float):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class NumericalError(ArithmeticError):
    pass


@dataclass(frozen=True)
class HeterodyneSpec:
    M: int
    alpha_sq: float
    quadrature_abs_tol: float = 1e-10

    def __post_init__(self):
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")
        if not self.alpha_sq >= 0:
            raise ValueError(f"alpha_sq must be >= 0, got {self.alpha_sq}")
        if not self.quadrature_abs_tol > 0:
            raise ValueError("quadrature_abs_tol must be positive")


def _angular_density(theta: float, alpha: float) -> float:
    """Heterodyne outcome density integrated over the radius at angle ``theta``.

    For the density exp(-|beta - alpha|^2)/pi in polar coordinates the radial
    integral is closed form; exp(-a^2 sin^2) keeps it finite for large alpha.
    """
    a = alpha * math.cos(theta)
    radial = 0.5 * math.exp(-alpha * alpha) + 0.5 * math.sqrt(math.pi) * a * math.exp(
        -(alpha * math.sin(theta)) ** 2
    ) * special.erfc(-a)
    return radial / math.pi


def sector_probability(M: int, alpha_sq: float, offset: int, abs_tol: float = 1e-10) -> float:
    """P(decide sector ``offset`` steps away from the transmitted phase)."""
    alpha = math.sqrt(alpha_sq)
    centre = 2 * math.pi * (offset % M) / M
    lo, hi = centre - math.pi / M, centre + math.pi / M
    with warnings.catch_warnings():
        # the returned error estimate is checked below; the warning adds nothing
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            _angular_density, lo, hi, args=(alpha,), epsabs=abs_tol, epsrel=0.0, limit=200,
            points=[math.pi] if lo < math.pi < hi else None,
        )
    if abserr > abs_tol:
        raise QuadratureError(
            f"sector integral error {abserr:.2e} exceeds tolerance {abs_tol:.1e}", value, abserr
        )
    return value


def heterodyne_channel_matrix(spec: HeterodyneSpec) -> ChannelMatrix:
    """Nearest-phase decisions on ideal heterodyne outcomes.

    The matrix is circulant, so one sector integral per offset suffices.
    """
    M = spec.M
    row = np.array([sector_probability(M, spec.alpha_sq, k, spec.quadrature_abs_tol) for k in range(M)])
    if abs(row.sum() - 1.0) > 10 * M * spec.quadrature_abs_tol:
        raise QuadratureError(f"sector probabilities sum to {row.sum()!r}", float(row.sum()), abs(row.sum() - 1))
    row = row / row.sum()
    p = np.array([np.roll(row, i) for i in range(M)])
    return ChannelMatrix(p)


def psk_gram_eigenvalues(M: int, alpha_sq: float) -> np.ndarray:
    """Eigenvalues of the circulant Gram matrix <alpha_m|alpha_n> of M-PSK states."""
    m = np.arange(M)
    first_row = np.exp(-alpha_sq + alpha_sq * np.exp(2j * np.pi * m / M))
    lam = np.fft.fft(first_row)
    if np.max(np.abs(lam.imag)) > 1e-9 or np.min(lam.real) < -1e-9:
        raise NumericalError(f"Gram eigenvalues not real nonnegative: {lam}")
    return np.clip(lam.real, 0.0, None)


def helstrom_error_psk(M: int, alpha_sq: float) -> float:
    """Minimum error probability for equiprobable M-PSK (square-root measurement)."""
    if M not in (2, 3, 4):
        raise ValueError(f"M must be 2, 3 or 4, got {M}")
    if not alpha_sq >= 0:
        raise ValueError(f"alpha_sq must be >= 0, got {alpha_sq}")
    lam = psk_gram_eigenvalues(M, alpha_sq)
    err = 1.0 - np.sum(np.sqrt(lam)) ** 2 / M**2
    return float(min(max(err, 0.0), 1.0 - 1.0 / M))
