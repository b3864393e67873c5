"""Quadrature weights and integration over the full observation domain.

Rules:
  - trapezoidal: w_1 = (t_2 - t_1)/2, w_S = (t_S - t_{S-1})/2,
    w_i = (t_{i+1} - t_{i-1})/2 otherwise.
  - midpoint: left-rectangle rule w_i = t_{i+1} - t_i for i < S, w_S = 0.
Both sum to t_S - t_1. Multi-dimensional grids use tensor products of the
1-D weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from fda_engine.config import get_default
from fda_engine.core.models import DenseFunData, FunData, IrregFunData, MultiFunData, as_axis
from fda_engine.errors import ValidationError


class QuadRule(Enum):
    MIDPOINT = "midpoint"
    TRAPEZOIDAL = "trapezoidal"


def as_rule(rule: QuadRule | str | None) -> QuadRule:
    """Resolve a rule name; None means the configured default."""
    if rule is None:
        rule = get_default("quadrature", "rule")
    try:
        return QuadRule(rule)
    except ValueError as e:
        raise ValidationError(f"Unknown quadrature rule: {rule!r}") from e


@dataclass(frozen=True)
class IrregIntegrationPolicy:
    """How irregular curves are integrated.

    With ``full_domain`` unset each curve is integrated over its own observed
    range. With ``full_domain = (a, b)`` the boundary values are extended as
    constants out to a and b, so a single-point curve contributes value * (b - a).
    """

    full_domain: tuple[float, float] | None = None

    @classmethod
    def observed_domain(cls) -> IrregIntegrationPolicy:
        return cls()

    @classmethod
    def extrapolate_full_domain(cls, a: float, b: float) -> IrregIntegrationPolicy:
        if not b > a:
            raise ValidationError(f"Full domain [{a}, {b}] is empty")
        return cls(full_domain=(float(a), float(b)))


def quad_weights(axis: np.ndarray, rule: QuadRule | str | None = None) -> np.ndarray:
    """Per-point weights for integrating over [t_1, t_S].

    Raises:
        ValidationError: For a singleton axis.
    """
    t = as_axis(axis)
    rule = as_rule(rule)
    if t.size < 2:
        raise ValidationError("Quadrature needs at least two observation points")
    dt = np.diff(t)
    w = np.zeros(t.size)
    if rule == QuadRule.TRAPEZOIDAL:
        w[0] = dt[0] / 2
        w[-1] = dt[-1] / 2
        w[1:-1] = (t[2:] - t[:-2]) / 2
    else:
        w[:-1] = dt
    return w


def _integrate_dense(data: DenseFunData, rule: QuadRule) -> np.ndarray:
    if data.has_missing:
        bad = [data.names[i] for i in np.flatnonzero(np.isnan(data.X).reshape(data.n_obs, -1)
                                                      .any(axis=1))]
        raise ValidationError(f"Cannot integrate curves with missing values: {bad[:5]}")
    values = data.X
    # contract the last grid axis repeatedly
    for axis in reversed(data.argvals):
        values = values @ quad_weights(axis, rule)
    return np.asarray(values, dtype=np.float64)


def _integrate_irreg(
    data: IrregFunData, rule: QuadRule, policy: IrregIntegrationPolicy
) -> np.ndarray:
    out = np.zeros(data.n_obs)
    domain = policy.full_domain
    for i, (t, x) in enumerate(zip(data.argvals, data.X, strict=True)):
        if domain is not None and (t[0] < domain[0] or t[-1] > domain[1]):
            raise ValidationError(
                f"Curve {data.names[i]} has points outside the domain {list(domain)}"
            )
        total = 0.0 if t.size == 1 else float(x @ quad_weights(t, rule))
        if domain is not None:
            total += x[0] * (t[0] - domain[0]) + x[-1] * (domain[1] - t[-1])
        out[i] = total
    return out


def integrate(
    data: FunData,
    rule: QuadRule | str | None = None,
    policy: IrregIntegrationPolicy | None = None,
) -> np.ndarray:
    """Integrate every observation over its domain.

    Multivariate integrals are the sums of the element integrals.

    Returns:
        Array of N integrals.

    Raises:
        ValidationError: If a dense curve contains missing values.
    """
    rule = as_rule(rule)
    if isinstance(data, DenseFunData):
        return _integrate_dense(data, rule)
    if isinstance(data, IrregFunData):
        return _integrate_irreg(data, rule, policy or IrregIntegrationPolicy())
    if isinstance(data, MultiFunData):
        total = _integrate_dense(data.elements[0], rule)
        for element in data.elements[1:]:
            total = total + _integrate_dense(element, rule)
        return total
    raise ValidationError(f"Not a functional data object: {type(data).__name__}")
