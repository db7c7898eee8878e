"""Concurrence of two-qubit states and its closed forms for X-states.

Normalization: the maximally entangled state has concurrence one. For a
positive X-state the spin-flip spectrum comes in the two pairs
sqrt(rho11 rho44) +- |rho14| and sqrt(rho22 rho33) +- |rho23|, which
collapses the general formula to

    C = 2 max{0, |rho23| - sqrt(rho11 rho44), |rho14| - sqrt(rho22 rho33)}.

The factor 2 is what makes this agree with the general spin-flip route
on every positive X-state (Bell states included), and the closed-form
trajectory expressions below carry the same normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import BathParameters
from .matrices import (SIGMA_2, NotHermitian, general_eigenvalues_4x4,
                       hermitian_eigenvalues, tensor_product)
from .pair import NotZeroTemperature, XState, family_state_zero_T
from .records import TrajectoryRecord

_SPIN_FLIP = tensor_product(SIGMA_2, SIGMA_2).real

_PSD_TOL = 1e-10


class InvalidState(ValueError):
    """Input is not a positive unit-trace state within tolerance."""


@dataclass(frozen=True)
class ConcurrenceReport:
    """Concurrence value, the winning branch of the X-state formula
    ("rho23", "rho14", "none", or "general" for the spin-flip route),
    and the four spin-flip spectrum roots in decreasing order."""

    value: float
    branch: str
    lambdas: np.ndarray


def concurrence_wootters(rho) -> ConcurrenceReport:
    """Concurrence of a general two-qubit state via the spin-flip spectrum.

    R = rho (sigma2 x sigma2) conj(rho) (sigma2 x sigma2) is evaluated in
    the computational basis; its eigenvalue square roots R1 >= ... >= R4
    give C = max(0, R1 - R2 - R3 - R4).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 state, got shape {rho.shape}")
    if abs(np.trace(rho) - 1.0) > _PSD_TOL:
        raise InvalidState(f"trace = {np.trace(rho):.12g}, expected 1")
    try:
        spectrum = hermitian_eigenvalues(rho, tol=_PSD_TOL)
    except NotHermitian as exc:
        raise InvalidState(f"not Hermitian: {exc}") from exc
    if spectrum.values[-1] < -_PSD_TOL:
        raise InvalidState(f"minimum eigenvalue {spectrum.values[-1]:.3e} < -1e-10")
    flipped = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    roots = general_eigenvalues_4x4(rho @ flipped, tol=1e-9)
    values = roots.values
    if values[-1] < -1e-9:
        raise InvalidState(
            f"spin-flip spectrum has eigenvalue {values[-1]:.3e} < -1e-9")
    lambdas = np.sqrt(np.clip(values, 0.0, None))
    value = max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3])
    return ConcurrenceReport(float(value), "general", lambdas)


def concurrence_xstate(x: XState) -> ConcurrenceReport:
    """Closed-form concurrence of a positive X-state, branch recorded."""
    trace = x.rho11 + x.rho22 + x.rho33 + x.rho44
    if abs(trace - 1.0) > _PSD_TOL:
        raise InvalidState(f"trace = {trace:.12g}, expected 1")
    if not x.is_positive(_PSD_TOL):
        raise InvalidState(f"minimum eigenvalue {x.min_eigenvalue():.3e} < -1e-10")
    s14 = np.sqrt(max(x.rho11 * x.rho44, 0.0))
    s23 = np.sqrt(max(x.rho22 * x.rho33, 0.0))
    q23 = abs(x.rho23) - s14
    q14 = abs(x.rho14) - s23
    value = 2.0 * max(0.0, q23, q14)
    if value <= 0.0:
        branch = "none"
    else:
        branch = "rho23" if q23 >= q14 else "rho14"
    lambdas = np.sort(np.array([s14 + abs(x.rho14), abs(s14 - abs(x.rho14)),
                                s23 + abs(x.rho23), abs(s23 - abs(x.rho23))]))[::-1]
    return ConcurrenceReport(float(value), branch, lambdas)


def concurrence_xstate_entries(r11, r22, r33, r44, r14, r23):
    """Vectorized X-state concurrence over entry arrays.

    Returns (values, branches) where branches is a string array with the
    same codes as ConcurrenceReport.branch. No positivity gating here: the
    caller screens the trajectory, and products under the square roots are
    clipped at zero so roundoff-negative diagonals stay finite.
    """
    s14 = np.sqrt(np.clip(np.asarray(r11) * np.asarray(r44), 0.0, None))
    s23 = np.sqrt(np.clip(np.asarray(r22) * np.asarray(r33), 0.0, None))
    q23 = np.abs(r23) - s14
    q14 = np.abs(r14) - s23
    values = 2.0 * np.maximum(0.0, np.maximum(q23, q14))
    branches = np.where(values <= 0.0, "none",
                        np.where(q23 >= q14, "rho23", "rho14"))
    return values, branches


def concurrence_zero_T_closed(mu: float, nu: float, t, params: BathParameters):
    """Closed-form concurrence along the zero-temperature family
    trajectory, floored at zero; broadcasts over t.

    Twice the difference of the rho23 coherence modulus and the matching
    subdeterminant root, both in closed form, so it equals the X-state
    formula on the trajectory while the rho23 branch is the active one.
    """
    if params.d != params.a:
        raise NotZeroTemperature(f"requires d = a, got d = {params.d}, "
                                 f"a = {params.a}")
    family_state_zero_T(mu, nu, params.a, params.b)  # constraint gate
    a, b, w = params.a, params.b, params.omega
    Om = params.Omega
    t_arr = np.asarray(t, dtype=float)
    e1 = np.exp(-a * t_arr)
    e2 = np.exp(-2.0 * a * t_arr)
    co = np.cos(Om * t_arr)
    si = np.sin(Om * t_arr)
    first = nu * e1 * np.sqrt(((a * a / b + w + b) * si / Om) ** 2
                              + (co + (a / Om) * si) ** 2)
    second = 0.5 * mu * e1 * np.sqrt(6.0 - 2.0 * e2)
    values = 2.0 * np.maximum(0.0, first - second)
    return float(values) if np.isscalar(t) else values


def small_time_slope(mu: float, nu: float, params: BathParameters):
    """Leading Taylor coefficients (c0, c1) of the zero-temperature
    closed-form concurrence at t = 0: c0 = 2 (nu - mu), c1 = a mu."""
    if params.d != params.a:
        raise NotZeroTemperature(f"requires d = a, got d = {params.d}, "
                                 f"a = {params.a}")
    family_state_zero_T(mu, nu, params.a, params.b)  # constraint gate
    return 2.0 * (nu - mu), params.a * mu


def detect_entanglement_increase(trajectory: TrajectoryRecord, tol: float = 1e-10):
    """Earliest concurrence increase along a trajectory.

    Flags the first sample that exceeds the running minimum by more than
    tol; the report carries the interval, its magnitude, and whether the
    generating dynamics was factorized (in which case any increase is
    unphysical).
    """
    t = np.asarray(trajectory.t, dtype=float)
    c = np.asarray(trajectory.columns["concurrence"], dtype=float)
    if t.size < 2:
        raise ValueError("need at least two concurrence samples")
    factorized = bool(trajectory.meta.get("factorized", True))
    running_min = np.minimum.accumulate(c)
    rising = c[1:] > running_min[:-1] + tol
    if not rising.any():
        return {"found": False, "factorized_dynamics": factorized}
    j = int(np.argmax(rising)) + 1
    i = int(np.argmin(c[:j]))
    return {
        "found": True,
        "t_start": float(t[i]),
        "t_end": float(t[j]),
        "increase": float(c[j] - c[i]),
        "factorized_dynamics": factorized,
    }
