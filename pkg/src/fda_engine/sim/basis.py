"""Orthonormal eigenfunction systems and eigenvalue decays for simulation.

All systems are defined on [0, 1] in s = (t - a) / (b - a) and scaled by
(b - a)^(-1/2), so they are orthonormal in L2([a, b]):
  - fourier:     1, sqrt(2) sin(2 pi k s), sqrt(2) cos(2 pi k s), ...
  - fourier_lin: the first M-1 Fourier functions plus the linear function,
                 orthonormalized against them (closed-form coefficients)
  - legendre:    sqrt(2n + 1) P_n(2s - 1), n = 0, ..., M-1
  - wiener:      sqrt(2) sin((2m - 1) pi s / 2)
"""

from __future__ import annotations

import logging
from enum import StrEnum
from typing import Any

import numpy as np
from scipy.special import eval_legendre

from fda_engine.config import get_default
from fda_engine.core.models import DenseFunData, as_axis
from fda_engine.errors import ValidationError

logger = logging.getLogger(__name__)


class BasisKind(StrEnum):
    FOURIER = "fourier"
    FOURIER_LIN = "fourier_lin"
    LEGENDRE = "legendre"
    WIENER = "wiener"


class DecayKind(StrEnum):
    LINEAR = "linear"           # (M - m + 1) / M
    EXPONENTIAL = "exponential"  # exp(-(m + 1) / 2)
    WIENER = "wiener"           # 4 / ((2m - 1)^2 pi^2)


def _as_kind(kind: BasisKind | str) -> BasisKind:
    try:
        return BasisKind(kind)
    except ValueError as e:
        raise ValidationError(f"Unknown basis kind: {kind!r}") from e


def _fourier_unit(M: int, s: np.ndarray) -> np.ndarray:
    out = np.empty((M, s.size))
    out[0] = 1.0
    for m in range(2, M + 1):
        k = m // 2
        trig = np.sin if m % 2 == 0 else np.cos
        out[m - 1] = np.sqrt(2.0) * trig(2 * np.pi * k * s)
    return out


def _fourier_lin_unit(M: int, s: np.ndarray) -> np.ndarray:
    fourier = _fourier_unit(M - 1, s) if M > 1 else np.empty((0, s.size))
    # <s, phi_m> on [0, 1]: 1/2 for the constant, -sqrt(2)/(2 pi k) for sines, 0 for cosines
    coef = np.zeros(M - 1)
    if M > 1:
        coef[0] = 0.5
    for m in range(2, M):
        if m % 2 == 0:
            coef[m - 1] = -np.sqrt(2.0) / (2 * np.pi * (m // 2))
    linear = s - coef @ fourier
    norm_sq = 1.0 / 3.0 - float(coef @ coef)
    return np.vstack([fourier, linear / np.sqrt(norm_sq)])


def _legendre_unit(M: int, s: np.ndarray) -> np.ndarray:
    cap = get_default("basis", "legendre_max_m")
    if M > cap:
        raise ValidationError(f"Legendre systems are limited to M <= {cap}, got {M}")
    x = 2.0 * s - 1.0
    return np.stack([np.sqrt(2 * n + 1) * eval_legendre(n, x) for n in range(M)])


def _wiener_unit(M: int, s: np.ndarray) -> np.ndarray:
    m = np.arange(1, M + 1)[:, None]
    return np.sqrt(2.0) * np.sin((2 * m - 1) * np.pi * s[None, :] / 2)


_UNIT_SYSTEMS = {
    BasisKind.FOURIER: _fourier_unit,
    BasisKind.FOURIER_LIN: _fourier_lin_unit,
    BasisKind.LEGENDRE: _legendre_unit,
    BasisKind.WIENER: _wiener_unit,
}


def eval_basis_on(
    kind: BasisKind | str, M: int, points: Any, domain: tuple[float, float]
) -> np.ndarray:
    """Values (M, len(points)) of the system orthonormal on ``domain``.

    ``points`` may be any subset of the domain; this is what the split
    multivariate construction uses to cut one system into pieces.
    """
    kind = _as_kind(kind)
    if int(M) < 1:
        raise ValidationError(f"M must be at least 1, got {M}")
    a, b = float(domain[0]), float(domain[1])
    if not b > a:
        raise ValidationError(f"Basis domain [{a}, {b}] is empty")
    t = np.asarray(points, dtype=np.float64)
    s = (t - a) / (b - a)
    return _UNIT_SYSTEMS[kind](int(M), s) / np.sqrt(b - a)


def eval_basis(kind: BasisKind | str, M: int, axis: Any) -> DenseFunData:
    """M orthonormal functions on [axis[0], axis[-1]] evaluated on the axis.

    Raises:
        ValidationError: Unknown kind, M < 1, a singleton axis or a Legendre
            system beyond the configured size cap.
    """
    t = as_axis(axis)
    if t.size < 2:
        raise ValidationError("Basis evaluation needs an axis with at least two points")
    values = eval_basis_on(kind, M, t, (t[0], t[-1]))
    return DenseFunData(argvals=(t,), X=values)


def eigenvalues(decay: DecayKind | str | Any, M: int) -> np.ndarray:
    """Eigenvalue sequence of length M.

    ``decay`` is a DecayKind or an explicit non-negative, non-increasing vector.
    """
    if int(M) < 1:
        raise ValidationError(f"M must be at least 1, got {M}")
    M = int(M)
    if not isinstance(decay, str):
        values = np.array(decay, dtype=np.float64).ravel()
        if values.size != M:
            raise ValidationError(f"Explicit eigenvalues have length {values.size}, need {M}")
        if not np.all(np.isfinite(values)) or np.any(values < 0) or np.any(np.diff(values) > 0):
            raise ValidationError("Explicit eigenvalues must be finite, >= 0 and non-increasing")
        return values
    try:
        decay = DecayKind(decay)
    except ValueError as e:
        raise ValidationError(f"Unknown eigenvalue decay: {decay!r}") from e
    m = np.arange(1, M + 1, dtype=np.float64)
    if decay == DecayKind.LINEAR:
        return (M - m + 1) / M
    if decay == DecayKind.EXPONENTIAL:
        return np.exp(-(m + 1) / 2)
    return 4.0 / ((2 * m - 1) ** 2 * np.pi**2)
