"""Extension of the qubit semigroup to a qubit-ancilla pair.

Basis convention, fixed once for the whole package: the four-dimensional
basis is |1> = |00>, |2> = |01>, |3> = |10>, |4> = |11> with the inert
ancilla as the FIRST tensor factor and the bath-coupled qubit as the
SECOND, so the extended map acts block-wise on the four 2x2 qubit blocks
of the density matrix. This is the labelling under which the closed-form
trajectory entries implemented in family_trajectory_zero_T come out
entry-identical to the generic extension (the opposite ordering pairs
the wrong populations). Reduced states of the dissipative qubit are
therefore obtained with matrices.partial_trace_first.

X-shaped states (nonzero entries on the two diagonals only) are closed
under the extended map, which keeps everything here in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bath import BathParameters
from .matrices import hermitian_eigenvalues

X_SHAPE_ZEROS = ((0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2))


class ConstraintViolation(ValueError):
    """A family-state positivity constraint failed; the message names it."""


class RegimeError(ValueError):
    """Parameters outside the regime the family construction assumes."""


class NotZeroTemperature(ValueError):
    """Operation requires d = a."""


@dataclass(frozen=True)
class XState:
    """Two-diagonal 4x4 state: diagonal plus the (1,4) and (2,3) coherences."""

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex
    rho23: complex

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = (self.rho11, self.rho22,
                                              self.rho33, self.rho44)
        m[0, 3], m[3, 0] = self.rho14, np.conj(self.rho14)
        m[1, 2], m[2, 1] = self.rho23, np.conj(self.rho23)
        return m

    def subdeterminants(self):
        d1 = self.rho11 * self.rho44 - abs(self.rho14) ** 2
        d2 = self.rho22 * self.rho33 - abs(self.rho23) ** 2
        return d1, d2

    def min_eigenvalue(self) -> float:
        # the two checkerboard 2x2 blocks carry the whole spectrum
        half14 = 0.5 * (self.rho11 + self.rho44)
        half23 = 0.5 * (self.rho22 + self.rho33)
        low14 = half14 - math.hypot(0.5 * (self.rho11 - self.rho44), abs(self.rho14))
        low23 = half23 - math.hypot(0.5 * (self.rho22 - self.rho33), abs(self.rho23))
        return min(low14, low23)

    def is_positive(self, tol: float = 1e-12) -> bool:
        return self.min_eigenvalue() >= -tol

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-12) -> "XState":
        m = np.asarray(m, dtype=complex)
        defect = x_shape_defect(m)
        if defect > tol:
            raise ValueError(f"matrix is not X-shaped, off-pattern entry {defect:.3e}")
        if abs(np.trace(m) - 1.0) > tol:
            raise ValueError(f"trace = {np.trace(m):.12g}, expected 1")
        if np.abs(m - m.conj().T).max() > tol:
            raise ValueError("matrix is not Hermitian")
        return cls(m[0, 0].real, m[1, 1].real, m[2, 2].real, m[3, 3].real,
                   complex(m[0, 3]), complex(m[1, 2]))


def x_shape_defect(m) -> float:
    """Largest modulus among the entries an X-state requires to vanish."""
    m = np.asarray(m, dtype=complex)
    return max(abs(m[i, j]) for i, j in X_SHAPE_ZEROS)


@dataclass(frozen=True)
class PairState:
    """General two-qubit state: Hermitian with unit trace. Positivity is
    deliberately not enforced here; tracking where it fails is the point."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        if np.abs(m - m.conj().T).max() > 1e-12:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise ValueError(f"trace = {np.trace(m).real:.12g}, expected 1")
        object.__setattr__(self, "matrix", m)

    def min_eigenvalue(self) -> float:
        return float(hermitian_eigenvalues(self.matrix).values[-1])

    def is_positive(self, tol: float = 1e-12) -> bool:
        return self.min_eigenvalue() >= -tol


def _map_coefficients(t, params: BathParameters):
    """The four independent entries of the linearized qubit map at time t.

    e11 and e10 propagate populations (coefficients of X11 and X22 in
    X11(t)); cf and sf propagate the coherence pair. Broadcasts over t.
    """
    a, b, w = params.a, params.b, params.omega
    Om = params.Omega
    t = np.asarray(t, dtype=float)
    e2 = np.exp(-2.0 * a * t)
    c_eq = 0.5 * (1.0 - params.theta)
    e11 = e2 + c_eq * (1.0 - e2)
    e10 = c_eq * (1.0 - e2)
    cf = np.exp(-a * t) * (np.cos(Om * t) - 1j * ((w + b) / Om) * np.sin(Om * t))
    sf = np.exp(-a * t) * ((a + 1j * b) / Om) * np.sin(Om * t)
    return e11, e10, cf, sf


def _apply_linearized(X: np.ndarray, coeffs) -> np.ndarray:
    # action on an arbitrary (not necessarily Hermitian, not unit-trace) 2x2
    e11, e10, cf, sf = coeffs
    x11, x12, x21, x22 = X[0, 0], X[0, 1], X[1, 0], X[1, 1]
    return np.array([
        [e11 * x11 + e10 * x22, cf * x12 + sf * x21],
        [np.conj(sf) * x12 + np.conj(cf) * x21,
         (1.0 - e11) * x11 + (1.0 - e10) * x22],
    ], dtype=complex)


@dataclass(frozen=True)
class QubitMap:
    """Linearized action of the qubit propagator on 2x2 matrices.

    matrix acts on column-stacked vectorizations,
    vec(X) = (X11, X21, X12, X22).
    """

    matrix: np.ndarray
    t: float
    params: BathParameters

    def apply(self, X) -> np.ndarray:
        vec = np.asarray(X, dtype=complex).flatten(order="F")
        return (self.matrix @ vec).reshape(2, 2, order="F")


def qubit_map_at(t: float, params: BathParameters) -> QubitMap:
    """Assemble the map column by column from its action on matrix units."""
    coeffs = _map_coefficients(float(t), params)
    m = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        for l in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[k, l] = 1.0
            m[:, k + 2 * l] = _apply_linearized(unit, coeffs).flatten(order="F")
    return QubitMap(m, float(t), params)


def apply_extended_with_map(rho, qmap: QubitMap) -> np.ndarray:
    """Apply (id on the ancilla) x (qubit map) block-wise."""
    r = np.asarray(rho, dtype=complex)
    out = np.empty((4, 4), dtype=complex)
    coeffs = _map_coefficients(qmap.t, qmap.params)
    for i in (0, 1):
        for j in (0, 1):
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = _apply_linearized(
                r[2 * i:2 * i + 2, 2 * j:2 * j + 2], coeffs)
    return out


def apply_extended(rho, t: float, params: BathParameters):
    """Extended dynamics on a two-qubit state; trace, Hermiticity and
    X-shape are preserved, positivity is not. PairState in, PairState
    out; XState and plain 4x4 arrays come back as arrays."""
    if isinstance(rho, PairState):
        return PairState(apply_extended_with_map(rho.matrix,
                                                 qubit_map_at(t, params)))
    if isinstance(rho, XState):
        rho = rho.matrix()
    return apply_extended_with_map(rho, qubit_map_at(t, params))


def xstate_trajectory_entries(x: XState, t, params: BathParameters):
    """Closed-form evolution of an X-state's six independent entries.

    Broadcasts over a time array; valid at any temperature.
    """
    e11, e10, cf, sf = _map_coefficients(t, params)
    r11 = e11 * x.rho11 + e10 * x.rho22
    r22 = (1.0 - e11) * x.rho11 + (1.0 - e10) * x.rho22
    r33 = e11 * x.rho33 + e10 * x.rho44
    r44 = (1.0 - e11) * x.rho33 + (1.0 - e10) * x.rho44
    r14 = cf * x.rho14 + sf * x.rho23
    r23 = np.conj(sf) * x.rho14 + np.conj(cf) * x.rho23
    return r11, r22, r33, r44, r14, r23


def xstate_spectrum_entries(r11, r22, r33, r44, r14, r23):
    """All four X-state eigenvalues from the two checkerboard blocks,
    vectorized over entry arrays. Returns (high14, low14, high23, low23)."""
    mean14 = 0.5 * (r11 + r44)
    rad14 = np.sqrt((0.5 * (r11 - r44)) ** 2 + np.abs(r14) ** 2)
    mean23 = 0.5 * (r22 + r33)
    rad23 = np.sqrt((0.5 * (r22 - r33)) ** 2 + np.abs(r23) ** 2)
    return mean14 + rad14, mean14 - rad14, mean23 + rad23, mean23 - rad23


def _check_family_constraints_zero_T(mu: float, nu: float, a: float, b: float):
    if not 0.0 < a < b:
        raise RegimeError(f"construction assumes 0 < a < b, got a = {a}, b = {b}")
    if not 0.0 < mu < 2.0 / 9.0:
        raise ConstraintViolation(f"0 < mu < 2/9 fails for mu = {mu}")
    if not nu > mu:
        raise ConstraintViolation(f"nu > mu fails for nu = {nu}, mu = {mu}")
    if not mu > (a / b) * nu:
        raise ConstraintViolation(f"mu > (a/b) nu fails for mu = {mu}, "
                                  f"(a/b) nu = {(a / b) * nu}")
    bound = 0.5 * math.sqrt(2.0 * mu - 5.0 * mu * mu)
    if not bound > nu:
        raise ConstraintViolation(f"sqrt(2 mu - 5 mu^2)/2 > nu fails for nu = {nu}, "
                                  f"bound = {bound}")


def family_state_zero_T(mu: float, nu: float, a: float, b: float) -> XState:
    """The d = a family member diag(mu, 1 - 5mu/2, mu/2, mu) with
    rho14 = -(a/b) nu and rho23 = i nu, constraints enforced."""
    _check_family_constraints_zero_T(mu, nu, a, b)
    return XState(mu, 1.0 - 2.5 * mu, 0.5 * mu, mu,
                  complex(-(a / b) * nu), 1j * nu)


def family_state(mu: float, nu: float, params: BathParameters) -> XState:
    """The finite-temperature two-parameter family with its three
    positivity constraint groups enforced."""
    a, b, th = params.a, params.b, params.theta
    if not 0.0 < a < b:
        raise RegimeError(f"construction assumes 0 < a < b, got a = {a}, b = {b}")
    if not math.sqrt(3.0) / 2.0 <= th <= 1.0:
        raise RegimeError(f"construction assumes sqrt(3)/2 <= theta <= 1, "
                          f"got theta = {th}")
    lo1 = (1.0 - th) / (3.0 - 2.0 * th)
    hi1 = (1.0 + th) / (3.0 + 2.0 * th)
    if not lo1 < mu < hi1:
        raise ConstraintViolation(
            f"(1-theta)/(3-2theta) < mu < (1+theta)/(3+2theta) fails for "
            f"mu = {mu}, bounds ({lo1}, {hi1})")
    root = math.sqrt(4.0 - 3.0 * th * th)
    lo2 = (-2.0 + 3.0 * th * th - root) / (9.0 * th * th)
    hi2 = (-2.0 + 3.0 * th * th + root) / (9.0 * th * th)
    if not lo2 < mu < hi2:
        raise ConstraintViolation(
            f"(-2+3theta^2 -+ sqrt(4-3theta^2))/(9theta^2) bounds fail for "
            f"mu = {mu}, bounds ({lo2}, {hi2})")
    if not nu > mu:
        raise ConstraintViolation(f"nu > mu fails for nu = {nu}, mu = {mu}")
    if not mu > (a / b) * nu:
        raise ConstraintViolation(f"mu > (a/b) nu fails for mu = {mu}, "
                                  f"(a/b) nu = {(a / b) * nu}")
    expr = (1.0 - 2.0 * mu) ** 2 - th * th * (3.0 * mu - 1.0) ** 2
    if expr < 0.0:
        raise ConstraintViolation(
            f"(1-2mu)^2 - theta^2 (3mu-1)^2 = {expr} < 0, no valid nu exists")
    bound = 0.5 * math.sqrt(expr)
    if not bound > nu:
        raise ConstraintViolation(
            f"sqrt((1-2mu)^2 - theta^2 (3mu-1)^2)/2 > nu fails for nu = {nu}, "
            f"bound = {bound}")
    r22 = 0.5 * th * (1.0 - 3.0 * mu) + 0.5 * (1.0 - 2.0 * mu)
    r33 = 0.5 * th * (3.0 * mu - 1.0) + 0.5 * (1.0 - 2.0 * mu)
    return XState(mu, r22, r33, mu, complex(-(a / b) * nu), 1j * nu)


def family_trajectory_entries_zero_T(mu: float, nu: float, t,
                                     params: BathParameters):
    """Verbatim closed-form trajectory entries of the zero-temperature
    family, independent of the generic map machinery; broadcasts over t."""
    a, b, w = params.a, params.b, params.omega
    Om = params.Omega
    t = np.asarray(t, dtype=float)
    e1 = np.exp(-a * t)
    e2 = np.exp(-2.0 * a * t)
    co = np.cos(Om * t)
    si = np.sin(Om * t)
    r11 = e2 * mu
    r22 = 1.0 - 1.5 * mu - mu * e2
    r33 = 0.5 * mu * e2
    r44 = 1.5 * mu - 0.5 * mu * e2
    r14 = e1 * (-(a * nu / b) * co - (b * nu / Om) * si
                + 1j * (a * nu / (b * Om)) * si * (w + 2.0 * b))
    r23 = e1 * ((nu / Om) * si * (-(a * a) / b - w - b)
                + 1j * nu * (co + (a / Om) * si))
    return r11, r22, r33, r44, r14, r23


def family_trajectory_zero_T(mu: float, nu: float, t: float,
                             params: BathParameters) -> XState:
    """Closed-form family trajectory at time t (requires d = a)."""
    if params.d != params.a:
        raise NotZeroTemperature(f"requires d = a, got d = {params.d}, a = {params.a}")
    _check_family_constraints_zero_T(mu, nu, params.a, params.b)
    r11, r22, r33, r44, r14, r23 = family_trajectory_entries_zero_T(
        mu, nu, float(t), params)
    return XState(float(r11), float(r22), float(r33), float(r44),
                  complex(r14), complex(r23))


def subdeterminants(x: XState):
    """(rho11 rho44 - |rho14|^2, rho22 rho33 - |rho23|^2)."""
    return x.subdeterminants()


def positivity_weak_coupling(mu: float, nu: float, t, params: BathParameters):
    """Both sides of the weak-coupling positivity inequalities.

    Returns (lhs1, rhs1, lhs2, rhs2, both_hold) where the inequalities are
    mu^2 (3 - exp(-2at)) >= 2 (a/b)^2 nu^2 and
    mu (1 - 3mu/2 - mu exp(-2at)) >= 2 nu^2; broadcasts over t.
    """
    a, b = params.a, params.b
    t = np.asarray(t, dtype=float)
    e2 = np.exp(-2.0 * a * t)
    lhs1 = mu * mu * (3.0 - e2)
    rhs1 = 2.0 * (a / b) ** 2 * nu * nu
    lhs2 = mu * (1.0 - 1.5 * mu - mu * e2)
    rhs2 = 2.0 * nu * nu
    both = bool(np.all(lhs1 >= rhs1) and np.all(lhs2 >= rhs2))
    return lhs1, rhs1, lhs2, rhs2, both


def bell_state() -> np.ndarray:
    """Projector onto (|00> + |11>)/sqrt(2)."""
    psi = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2.0)
    return np.outer(psi, psi.conj())


def choi_matrix(t: float, params: BathParameters):
    """Extended map applied to the maximally entangled state, plus its
    minimum eigenvalue; a negative value certifies the qubit map is not
    completely positive."""
    rho = apply_extended(bell_state(), t, params)
    spectrum = hermitian_eigenvalues(rho)
    return PairState(rho), float(spectrum.values[-1])
