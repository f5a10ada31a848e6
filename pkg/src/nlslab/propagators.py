"""Free Schrodinger flow, quadratic gauge factor, power nonlinearity, and its exact pointwise flow."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import ComplexField, Space, apply_multiplier, _require_space


class PointwiseBlowUp(Exception):
    """The exact nonlinear substep ran past a pointwise denominator zero.

    `earliest` is the smallest pointwise blow-up horizon among the offending
    samples, measured from the start of the substep.
    """

    def __init__(self, earliest: float):
        self.earliest = float(earliest)
        super().__init__(f"nonlinear flow blows up after {earliest!r} time units")


@dataclass(frozen=True)
class NonlinearityParams:
    """Power nonlinearity lam * |u|^(2*theta/d) u.

    p = 1 + 2*theta/d and b = p - 1 are derived exactly from (theta, d).
    theta in (0, 1) is the long-range subcritical range; theta = 1 is the
    critical case.
    """

    lam: complex
    theta: float
    d: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if not (0.0 < self.theta <= 1.0):
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")

    @property
    def b(self) -> float:
        return 2.0 * self.theta / self.d

    @property
    def p(self) -> float:
        return 1.0 + self.b

    @property
    def mu(self) -> float:
        return float(np.imag(self.lam))


def free_propagate(f: ComplexField, t: float) -> ComplexField:
    """Free flow U(t) = exp(i t Lap / 2); t < 0 gives the inverse flow."""
    _require_space(f, Space.PHYSICAL, "free_propagate")
    if t == 0.0:
        return f.copy()
    return apply_multiplier(f, np.exp(-0.5j * t * f.grid.abs_xi_sq))


def gauge_multiply(f: ComplexField, t: float, inverse: bool = False) -> ComplexField:
    """Pointwise multiply by exp(+-i |x|^2 / (2t)); requires t > 0."""
    _require_space(f, Space.PHYSICAL, "gauge_multiply")
    if not (t > 0):
        raise ValueError(f"gauge factor requires t > 0, got {t}")
    phase = f.grid.abs_x_sq / (2.0 * t)
    factor = np.exp(-1j * phase) if inverse else np.exp(1j * phase)
    return ComplexField(f.grid, Space.PHYSICAL, factor * f.values, f.blown_up)


def g_p(z, p: float):
    """Power map |z|^(p-1) z, continuously extended by 0 at z = 0."""
    if p <= 1.0:
        raise ValueError(f"power must satisfy p > 1, got {p}")
    z = np.asarray(z, dtype=np.complex128)
    out = np.abs(z) ** (p - 1.0) * z
    if out.ndim == 0:
        return complex(out)
    return out


def blowup_horizon(z, params: NonlinearityParams):
    """Pointwise blow-up horizon of i w' = lam |w|^b w starting from w(0) = z.

    Returns 1 / (b * Im(lam) * |z|^b) where Im(lam) > 0, +inf otherwise.
    """
    b, mu = params.b, params.mu
    az_b = np.abs(np.asarray(z, dtype=np.complex128)) ** b
    with np.errstate(divide="ignore"):
        hor = np.where(
            (mu > 0.0) & (az_b > 0.0),
            1.0 / np.maximum(b * mu * az_b, np.finfo(float).tiny),
            np.inf,
        )
    if hor.ndim == 0:
        return float(hor)
    return hor


def nonlinear_flow_exact(z, dt: float, params: NonlinearityParams):
    """Exact flow of i w' = lam |w|^b w over time dt, applied pointwise.

    The modulus obeys |w(dt)|^b = |z|^b / (1 - b mu |z|^b dt) with mu = Im(lam);
    the phase advances by -Re(lam) * integral of |w|^b.  Raises
    :class:`PointwiseBlowUp` if any denominator reaches zero within dt.
    """
    if dt < 0:
        raise ValueError(f"substep length must be >= 0, got {dt}")
    b, mu = params.b, params.mu
    alpha = float(np.real(params.lam))
    z = np.asarray(z, dtype=np.complex128)
    scalar = z.ndim == 0
    az_b = np.abs(z) ** b
    denom = 1.0 - b * mu * az_b * dt
    if np.any(denom <= 0.0):
        raise PointwiseBlowUp(np.min(blowup_horizon(z, params)))
    if mu == 0.0:
        w = z * np.exp(-1j * alpha * az_b * dt)
    else:
        # phase integral: -(alpha / (b mu)) * log(1 / denom)
        w = z * denom ** (-1.0 / b) * np.exp(1j * (alpha / (b * mu)) * np.log(denom))
    if scalar:
        return complex(w)
    return w
