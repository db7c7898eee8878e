"""Single-qubit dissipative semigroup in the (omega, a, b, d) parametrization.

States are stored as (rho1, rho3) with rho2 = 1 - rho1 implied, i.e.

    rho = [[rho1, rho3], [conj(rho3), 1 - rho1]].

The closed-form propagator is

    rho1(t) = (1 - theta)/2 (1 - exp(-2 a t)) + rho1(0) exp(-2 a t)
    rho3(t) = exp(-a t) [ (cos(Omega t) - i (omega + b)/Omega sin(Omega t)) rho3(0)
                          + (a + i b)/Omega sin(Omega t) conj(rho3(0)) ]

and the generator below is its t = 0 derivative. The map is trace and
Hermiticity preserving but not positive: a witness state sitting on the
pure-state boundary is pushed to negative determinant immediately, which
is why the admissibility scan over initial conditions exists at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import BathParameters


class StepTooLarge(ValueError):
    """RK4 step exceeds the integration horizon."""


@dataclass(frozen=True)
class QubitState:
    rho1: float
    rho3: complex

    def matrix(self) -> np.ndarray:
        return np.array([[self.rho1, self.rho3],
                         [np.conj(self.rho3), 1.0 - self.rho1]], dtype=complex)

    def det(self) -> float:
        return self.rho1 * (1.0 - self.rho1) - abs(self.rho3) ** 2

    def min_eigenvalue(self) -> float:
        # unit trace makes the 2x2 spectrum 1/2 +- r
        return 0.5 - math.hypot(self.rho1 - 0.5, abs(self.rho3))

    def is_positive(self, tol: float = 1e-12) -> bool:
        # det >= 0 alone implies rho1 in [0, 1] for a unit-trace 2x2
        return self.det() >= -tol

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> "QubitState":
        return cls((1.0 + z) / 2.0, (x - 1j * y) / 2.0)

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-12) -> "QubitState":
        m = np.asarray(m, dtype=complex)
        if abs(np.trace(m) - 1.0) > tol or abs(m[0, 1] - np.conj(m[1, 0])) > tol \
                or abs(m[0, 0].imag) > tol:
            raise ValueError("matrix is not a Hermitian unit-trace 2x2")
        return cls(m[0, 0].real, complex(m[0, 1]))


def generator_rhs(rho: QubitState, params: BathParameters) -> np.ndarray:
    """Time derivative of the density matrix, as a 2x2 matrix.

    Entry form (the t = 0 derivative of the closed-form propagator):
    rho1' = (a - d) - 2 a rho1, rho3' = -(a + i(omega+b)) rho3 + (a + ib) conj(rho3).
    """
    a, b, d, w = params.a, params.b, params.d, params.omega
    drho1 = (a - d) - 2.0 * a * rho.rho1
    drho3 = -(a + 1j * (w + b)) * rho.rho3 + (a + 1j * b) * np.conj(rho.rho3)
    return np.array([[drho1, drho3], [np.conj(drho3), -drho1]], dtype=complex)


def propagate_entries(rho1, rho3, t, params: BathParameters):
    """Closed-form propagation of entry arrays; broadcasts over states and times."""
    a, b, w = params.a, params.b, params.omega
    Om = params.Omega
    t = np.asarray(t, dtype=float)
    e2 = np.exp(-2.0 * a * t)
    c_eq = 0.5 * (1.0 - params.theta)
    cf = np.exp(-a * t) * (np.cos(Om * t) - 1j * ((w + b) / Om) * np.sin(Om * t))
    sf = np.exp(-a * t) * ((a + 1j * b) / Om) * np.sin(Om * t)
    rho1_t = c_eq * (1.0 - e2) + np.asarray(rho1) * e2
    rho3_t = cf * np.asarray(rho3) + sf * np.conj(np.asarray(rho3))
    return rho1_t, rho3_t


def propagate_closed(rho0: QubitState, t: float, params: BathParameters) -> QubitState:
    """Closed-form propagation of a single state.

    Trace and Hermiticity are exact by construction; positivity is not
    guaranteed. The closed form defines a group, so negative t is
    accepted (it makes centered finite differences at t = 0 honest).
    """
    r1, r3 = propagate_entries(rho0.rho1, rho0.rho3, float(t), params)
    return QubitState(float(r1), complex(r3))


def _bloch_rhs(y: np.ndarray, params: BathParameters) -> np.ndarray:
    # y rows: rho1, Re rho3, Im rho3
    a, b, d, w = params.a, params.b, params.d, params.omega
    out = np.empty_like(y)
    out[0] = (a - d) - 2.0 * a * y[0]
    out[1] = (w + 2.0 * b) * y[2]
    out[2] = -w * y[1] - 2.0 * a * y[2]
    return out


def rk4_entries(rho1, rho3, t: float, dt: float, params: BathParameters):
    """Classical RK4 on the generator, batched over state arrays.

    The actual step is t / ceil(t / dt) so the horizon is hit exactly.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t < 0.0:
        raise ValueError(f"rk4 horizon must be non-negative, got {t}")
    if t > 0.0 and dt > t:
        raise StepTooLarge(f"dt = {dt} exceeds t = {t}")
    rho1 = np.atleast_1d(np.asarray(rho1, dtype=float))
    rho3 = np.atleast_1d(np.asarray(rho3, dtype=complex))
    y = np.stack([rho1, rho3.real, rho3.imag])
    if t == 0.0:
        return y[0], y[1] + 1j * y[2]
    n = int(math.ceil(t / dt - 1e-9))
    h = t / n
    for _ in range(n):
        k1 = _bloch_rhs(y, params)
        k2 = _bloch_rhs(y + 0.5 * h * k1, params)
        k3 = _bloch_rhs(y + 0.5 * h * k2, params)
        k4 = _bloch_rhs(y + h * k3, params)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y[0], y[1] + 1j * y[2]


def propagate_rk4(rho0: QubitState, t: float, dt: float,
                  params: BathParameters) -> QubitState:
    """RK4 integration of the generator; cross-check for the closed form."""
    r1, r3 = rk4_entries(rho0.rho1, rho0.rho3, t, dt, params)
    return QubitState(float(r1[0]), complex(r3[0]))


def equilibrium_state(params: BathParameters) -> QubitState:
    """The unique fixed point, diag((1 - theta)/2, (1 + theta)/2)."""
    return QubitState((1.0 - params.theta) / 2.0, 0.0 + 0.0j)


def witness_state(params: BathParameters) -> QubitState:
    """Pure state (det = 0) whose determinant is driven negative immediately."""
    a, b, d = params.a, params.b, params.d
    rho1 = 0.5 * (1.0 - d / (2.0 * a))
    rho3 = 0.25 * (1.0 + 1j * b / a) * math.sqrt((4.0 * a * a - d * d) / (a * a + b * b))
    return QubitState(rho1, rho3)


def det_derivative_at_zero(rho0: QubitState, params: BathParameters) -> float:
    """d/dt det(rho(t)) at t = 0 via the generator and Jacobi's formula."""
    a, b, d, w = params.a, params.b, params.d, params.omega
    drho1 = (a - d) - 2.0 * a * rho0.rho1
    drho3 = -(a + 1j * (w + b)) * rho0.rho3 + (a + 1j * b) * np.conj(rho0.rho3)
    return float(drho1 * (1.0 - 2.0 * rho0.rho1)
                 - 2.0 * np.real(np.conj(rho0.rho3) * drho3))


def witness_det_slope_closed_form(params: BathParameters) -> float:
    """Closed-form expression -a (4b^2 + d^2) / (4 (a^2 + b^2)) for the
    initial determinant slope at the witness state.

    For b != 0 this expression disagrees with what the propagator itself
    produces; det_derivative_at_zero(witness_state(params), params) and a
    finite difference of the propagated determinant both give
    -d^2 / (4 a) instead. Both numbers are reported side by side by the
    witness report so the discrepancy stays visible.
    """
    a, b, d = params.a, params.b, params.d
    return -a * (4.0 * b * b + d * d) / (4.0 * (a * a + b * b))


def admissibility_grid(rho1s, rho3s, params: BathParameters, t_max: float,
                       n_steps: int, tol: float = 1e-12):
    """Minimum-eigenvalue screen for many states on a shared time grid.

    Returns (admissible, first_violation_time) arrays; the time is nan
    for states that stay positive. The grid has n_steps intervals on
    [0, t_max], endpoints included.
    """
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2, got {n_steps}")
    rho1s = np.atleast_1d(np.asarray(rho1s, dtype=float))
    rho3s = np.atleast_1d(np.asarray(rho3s, dtype=complex))
    times = np.linspace(0.0, float(t_max), n_steps + 1)
    admissible = np.ones(rho1s.shape[0], dtype=bool)
    first_t = np.full(rho1s.shape[0], np.nan)
    chunk = 128
    for lo in range(0, rho1s.shape[0], chunk):
        r1 = rho1s[lo:lo + chunk][None, :]
        r3 = rho3s[lo:lo + chunk][None, :]
        r1t, r3t = propagate_entries(r1, r3, times[:, None], params)
        min_eig = 0.5 - np.sqrt((r1t - 0.5) ** 2 + np.abs(r3t) ** 2)
        bad = min_eig < -tol
        any_bad = bad.any(axis=0)
        admissible[lo:lo + chunk] = ~any_bad
        idx = np.argmax(bad, axis=0)
        first_t[lo:lo + chunk] = np.where(any_bad, times[idx], np.nan)
    return admissible, first_t


def is_admissible_single(rho0: QubitState, params: BathParameters, t_max: float,
                         n_steps: int, tol: float = 1e-12):
    """(admissible, first_violation_time or None) for one initial state."""
    ok, first_t = admissibility_grid([rho0.rho1], [rho0.rho3], params,
                                     t_max, n_steps, tol)
    return bool(ok[0]), (None if math.isnan(first_t[0]) else float(first_t[0]))


def default_admissibility_steps(params: BathParameters, t_max: float) -> int:
    """Grid resolution giving 40 samples per oscillation period."""
    spacing = (2.0 * math.pi / params.Omega) / 40.0
    return max(2, int(math.ceil(float(t_max) / spacing)))
