"""Phenomenological bath constants (omega, a, b, d) and their gates.

The constants fully determine the qubit dynamics. They can be set
directly or computed from a numeric bath correlation function G(s) by
composite trapezoidal quadrature of

    a = lambda^2 integral_0^T cos(omega s) [G(s) + G(-s)] ds
    b = lambda^2 integral_0^T sin(omega s) [G(s) + G(-s)] ds
    d = i lambda^2 integral_0^T sin(omega s) [G(s) - G(-s)] ds

with an explicit cutoff T. Thermal consistency ties d to a through an
inverse temperature beta via a - d = exp(-beta omega) (a + d), so
0 <= d <= a is enforced at construction and beta is always derived,
never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class InvalidA(ValueError):
    """Dissipation constant a must be positive."""


class KmsViolation(ValueError):
    """d outside [0, a]; no non-negative inverse temperature exists."""


class ImaginaryRabi(ValueError):
    """omega^2 + 2 b omega - a^2 <= 0; the oscillatory closed forms need a real Omega."""


class CutoffTooSmall(ValueError):
    """|G| has not decayed enough at the quadrature cutoff."""


class NegativeA(ValueError):
    """Quadrature produced a <= 0."""


@dataclass(frozen=True)
class BathParameters:
    """Validated constants (omega, a, b, d); theta and Omega are derived."""

    omega: float
    a: float
    b: float
    d: float

    def __post_init__(self):
        if self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.a <= 0.0:
            raise InvalidA(f"a must be positive, got {self.a}")
        if self.d < 0.0 or self.d > self.a:
            raise KmsViolation(f"d must lie in [0, a] = [0, {self.a}], got {self.d}")
        if self.omega ** 2 + 2.0 * self.b * self.omega - self.a ** 2 <= 0.0:
            raise ImaginaryRabi(
                f"omega^2 + 2 b omega - a^2 = "
                f"{self.omega ** 2 + 2.0 * self.b * self.omega - self.a ** 2:.3e} <= 0")

    @property
    def theta(self) -> float:
        return self.d / self.a

    @property
    def Omega(self) -> float:
        return math.sqrt(self.omega ** 2 + 2.0 * self.b * self.omega - self.a ** 2)


def new_bath_parameters(omega: float, a: float, b: float, d: float) -> BathParameters:
    """Validated constructor, see BathParameters for the gates."""
    return BathParameters(float(omega), float(a), float(b), float(d))


def kms_beta(params: BathParameters) -> float:
    """Inverse temperature from the detailed-balance relation,
    beta = (2/omega) atanh(d/a). Returns math.inf when d = a."""
    if params.d == params.a:
        return math.inf
    return 2.0 / params.omega * math.atanh(params.d / params.a)


@dataclass(frozen=True)
class CorrelationFunction:
    """Numeric two-point function G(s) with quadrature controls.

    evaluator must accept a float array of times and return complex
    values; physical kernels satisfy G(-s) = conj(G(s)).
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    cutoff_T: float
    steps: int


def _trapezoid_coefficients(G: CorrelationFunction, omega: float, lam: float,
                            steps: int):
    s = np.linspace(0.0, G.cutoff_T, steps + 1)
    plus = np.asarray(G.evaluator(s), dtype=complex)
    minus = np.asarray(G.evaluator(-s), dtype=complex)
    lam2 = lam * lam
    a_val = lam2 * np.trapezoid(np.cos(omega * s) * (plus + minus), s)
    b_val = lam2 * np.trapezoid(np.sin(omega * s) * (plus + minus), s)
    d_val = 1j * lam2 * np.trapezoid(np.sin(omega * s) * (plus - minus), s)
    return a_val, b_val, d_val


def coefficients_from_correlation(G: CorrelationFunction, omega: float, lam: float):
    """(a, b, d) by composite trapezoidal quadrature on [0, cutoff_T].

    Returns ((a, b, d), error_estimate). The error estimate per
    coefficient is the Richardson difference |fine - coarse| / 3 plus any
    imaginary leakage, and halving the step changes each coefficient by
    less than it. Raises CutoffTooSmall when |G(+-T)| has not decayed
    below 1e-10 |G(0)|, NegativeA when the a integral is non-positive.
    """
    g0 = abs(complex(np.asarray(G.evaluator(np.array([0.0])), dtype=complex)[0]))
    tails = np.asarray(G.evaluator(np.array([G.cutoff_T, -G.cutoff_T])), dtype=complex)
    if np.abs(tails).max() >= 1e-10 * g0:
        raise CutoffTooSmall(
            f"|G(+-{G.cutoff_T})| = {np.abs(tails).max():.3e} "
            f">= 1e-10 |G(0)| = {1e-10 * g0:.3e}")
    steps = int(G.steps)
    if steps < 2 or steps % 2:
        raise ValueError(f"steps must be even and >= 2, got {steps}")
    fine = _trapezoid_coefficients(G, omega, lam, steps)
    coarse = _trapezoid_coefficients(G, omega, lam, steps // 2)
    estimates = tuple(abs(f - c) / 3.0 + abs(f.imag) for f, c in zip(fine, coarse))
    a_val, b_val, d_val = (f.real for f in fine)
    if a_val <= 0.0:
        raise NegativeA(f"quadrature gave a = {a_val:.3e} <= 0")
    return (a_val, b_val, d_val), estimates
