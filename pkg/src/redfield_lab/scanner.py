"""Initial-state explorer for the extended dynamics.

classify_pair_state applies three screens in a fixed order: the reduced
state of the bath-coupled qubit must stay positive under the single-qubit
propagator, the extended state must keep a nonnegative spectrum along the
time grid, and the concurrence must never rise above its running minimum.
The first failed screen names the class; passing all three is CONSISTENT.
The order matters: a state whose reduction already goes negative is
excluded at the single-qubit level and is not double-counted as a
two-qubit anomaly.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bath import BathParameters
from .concurrence import (InvalidState, concurrence_wootters,
                          concurrence_xstate_entries,
                          detect_entanglement_increase)
from .matrices import hermitian_eigenvalues_batch, partial_trace_first
from .pair import (ConstraintViolation, PairState, RegimeError, XState,
                   _map_coefficients, family_state, x_shape_defect,
                   xstate_spectrum_entries, xstate_trajectory_entries)
from .qubit import (QubitState, admissibility_grid, is_admissible_single,
                    propagate_entries)
from .records import TrajectoryRecord

REDUCED_INADMISSIBLE = "REDUCED_INADMISSIBLE"
NEGATIVE_EVOLVING = "NEGATIVE_EVOLVING"
ENTANGLEMENT_INCREASING = "ENTANGLEMENT_INCREASING"
CONSISTENT = "CONSISTENT"

LABELS = (REDUCED_INADMISSIBLE, NEGATIVE_EVOLVING,
          ENTANGLEMENT_INCREASING, CONSISTENT)

_X_SHAPE_TOL = 1e-13


@dataclass(frozen=True)
class ClassificationResult:
    state_id: str
    label: str
    evidence: dict
    grid: dict

    def as_row(self) -> dict:
        return {"state_id": self.state_id, "label": self.label,
                "evidence": self.evidence, "grid": self.grid}


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, XState):
        return rho.matrix()
    if isinstance(rho, PairState):
        return rho.matrix
    if isinstance(rho, QubitState):
        raise InvalidState("classify_pair_state takes a two-qubit state")
    m = np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 state, got shape {m.shape}")
    return m


def _validate_initial(m: np.ndarray, tol: float = 1e-10):
    if np.abs(m - m.conj().T).max() > tol:
        raise InvalidState("initial state is not Hermitian")
    if abs(np.trace(m).real - 1.0) > tol:
        raise InvalidState(f"initial trace is {np.trace(m).real!r}, not 1")
    values, _ = hermitian_eigenvalues_batch(m[None])
    if values[0, -1] < -tol:
        raise InvalidState(f"initial state has eigenvalue {values[0, -1]}")


def _extended_trajectory(m: np.ndarray, times: np.ndarray,
                         params: BathParameters) -> np.ndarray:
    """Evolved (T, 4, 4) stack; the map acts block-wise on the four 2x2
    blocks of the ancilla-first layout, so each entry is one broadcast."""
    e11, e10, cf, sf = _map_coefficients(times, params)
    out = np.empty(times.shape + (4, 4), dtype=complex)
    for i in (0, 1):
        for j in (0, 1):
            b = m[2 * i:2 * i + 2, 2 * j:2 * j + 2]
            out[..., 2 * i, 2 * j] = e11 * b[0, 0] + e10 * b[1, 1]
            out[..., 2 * i, 2 * j + 1] = cf * b[0, 1] + sf * b[1, 0]
            out[..., 2 * i + 1, 2 * j] = (np.conj(sf) * b[0, 1]
                                          + np.conj(cf) * b[1, 0])
            out[..., 2 * i + 1, 2 * j + 1] = ((1.0 - e11) * b[0, 0]
                                              + (1.0 - e10) * b[1, 1])
    return out


def classify_pair_state(rho, params: BathParameters, t_max: float,
                        n_steps: int, tol: float = 1e-12,
                        increase_tol: float = 1e-10,
                        state_id: str = "state") -> ClassificationResult:
    """Classify one two-qubit initial state on a shared time grid."""
    m = _as_matrix(rho)
    _validate_initial(m)
    grid = {"t_max": float(t_max), "n_steps": int(n_steps),
            "tol": float(tol), "increase_tol": float(increase_tol)}
    times = np.linspace(0.0, float(t_max), int(n_steps) + 1)

    reduced = QubitState.from_matrix(partial_trace_first(m))
    ok, first_t = is_admissible_single(reduced, params, t_max, n_steps, tol)
    if not ok:
        r1, r3 = propagate_entries(reduced.rho1, reduced.rho3, first_t, params)
        magnitude = 0.5 - math.hypot(float(np.real(r1)) - 0.5, abs(complex(r3)))
        return ClassificationResult(state_id, REDUCED_INADMISSIBLE, {
            "check": "reduced", "first_violation_time": first_t,
            "min_eigenvalue": magnitude}, grid)

    if x_shape_defect(m) <= _X_SHAPE_TOL:
        x = XState.from_matrix(m)
        entries = xstate_trajectory_entries(x, times, params)
        reals = [np.real(e) for e in entries[:4]] + list(entries[4:])
        _, low14, _, low23 = xstate_spectrum_entries(*reals)
        min_eigs = np.minimum(low14, low23)
        conc, _ = concurrence_xstate_entries(*reals)
    else:
        evolved = _extended_trajectory(m, times, params)
        values, _ = hermitian_eigenvalues_batch(evolved)
        min_eigs = values[:, -1]
        conc = None

    bad = min_eigs < -tol
    if bad.any():
        k = int(np.argmax(bad))
        return ClassificationResult(state_id, NEGATIVE_EVOLVING, {
            "check": "extended", "first_violation_time": float(times[k]),
            "min_eigenvalue": float(min_eigs[k])}, grid)

    if conc is None:
        conc = np.array([concurrence_wootters(evolved[k]).value
                         for k in range(times.size)])
    record = TrajectoryRecord(times, {"concurrence": np.asarray(conc, float)},
                              {"factorized": True})
    hit = detect_entanglement_increase(record, increase_tol)
    if hit["found"]:
        return ClassificationResult(state_id, ENTANGLEMENT_INCREASING, {
            "check": "concurrence", "t_start": hit["t_start"],
            "t_end": hit["t_end"], "increase": hit["increase"]}, grid)

    c = np.asarray(conc, dtype=float)
    return ClassificationResult(state_id, CONSISTENT, {
        "min_eigenvalue": float(min_eigs.min()),
        "max_concurrence_rise": float((c - np.minimum.accumulate(c)).max()),
    }, grid)


def scan_family(mu_grid, nu_grid, params: BathParameters, t_max: float,
                n_steps: int, tol: float = 1e-12,
                increase_tol: float = 1e-10, workers: int | None = None):
    """Classify the one-parameter family over a (mu, nu) grid.

    Infeasible points are recorded as skipped with the violated
    constraint, never raised. Returns (results, skipped, summary); the
    results list is ordered by grid index whatever the execution order.
    """
    mu_grid = np.atleast_1d(np.asarray(mu_grid, dtype=float))
    nu_grid = np.atleast_1d(np.asarray(nu_grid, dtype=float))
    points = [(float(mu), float(nu)) for mu in mu_grid for nu in nu_grid]

    def one(point):
        mu, nu = point
        state_id = f"family mu={mu:.12g} nu={nu:.12g}"
        try:
            x = family_state(mu, nu, params)
        except (ConstraintViolation, RegimeError) as exc:
            return {"state_id": state_id, "skipped": True,
                    "mu": mu, "nu": nu, "reason": str(exc)}
        result = classify_pair_state(x, params, t_max, n_steps, tol,
                                     increase_tol, state_id)
        return ClassificationResult(result.state_id, result.label,
                                    result.evidence,
                                    {**result.grid, "mu": mu, "nu": nu})

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, points))
    else:
        outcomes = [one(p) for p in points]

    results = [o for o in outcomes if isinstance(o, ClassificationResult)]
    skipped = [o for o in outcomes if not isinstance(o, ClassificationResult)]
    counts = {label: 0 for label in LABELS}
    for r in results:
        counts[r.label] += 1
    summary = {
        "counts": counts,
        "n_feasible": len(results),
        "n_skipped": len(skipped),
        "fractions": {label: (counts[label] / len(results) if results else 0.0)
                      for label in LABELS},
    }
    return results, skipped, summary


def _bloch_shells(resolution: int):
    """Deterministic Bloch-ball lattice: radial shells r_j = j/R carrying
    golden-angle point sets that grow with the shell area. Shell j owns
    the radial band ((j-1)/R, j/R], so its volume weight is
    (j^3 - (j-1)^3) / R^3."""
    if resolution < 2:
        raise ValueError(f"grid_resolution must be >= 2, got {resolution}")
    golden = math.pi * (3.0 - math.sqrt(5.0))
    shells = []
    for j in range(1, resolution + 1):
        r = j / resolution
        n = max(6, int(round(4.0 * resolution ** 2 * r ** 2)))
        i = np.arange(n)
        z = 1.0 - 2.0 * (i + 0.5) / n
        phi = i * golden
        s = np.sqrt(1.0 - z ** 2)
        x, y = s * np.cos(phi), s * np.sin(phi)
        weight = (j ** 3 - (j - 1) ** 3) / resolution ** 3
        shells.append((r, weight, x * r, y * r, z * r))
    return shells


def scan_single_bloch(grid_resolution: int, params: BathParameters,
                      t_max: float, n_steps: int, tol: float = 1e-12):
    """Admissible volume fraction of the Bloch ball plus the inadmissible
    samples closest to the surface (at most ten, largest radius first)."""
    shells = _bloch_shells(int(grid_resolution))
    fraction = 0.0
    n_points = 0
    n_admissible = 0
    boundary = []
    for r, weight, x, y, z in shells:
        rho1 = 0.5 * (1.0 + z)
        rho3 = 0.5 * (x - 1j * y)
        admissible, first_times = admissibility_grid(rho1, rho3, params,
                                                     t_max, n_steps, tol)
        fraction += weight * admissible.mean()
        n_points += admissible.size
        n_admissible += int(admissible.sum())
        for k in np.flatnonzero(~admissible):
            boundary.append({
                "x": float(x[k]), "y": float(y[k]), "z": float(z[k]),
                "radius": r,
                "first_violation_time": float(first_times[k]),
            })
    boundary.sort(key=lambda s: (-s["radius"], s["first_violation_time"],
                                 s["x"], s["y"], s["z"]))
    return {
        "admissible_fraction": float(fraction),
        "n_points": int(n_points),
        "n_admissible": int(n_admissible),
        "grid_resolution": int(grid_resolution),
        "t_max": float(t_max),
        "n_steps": int(n_steps),
        "tol": float(tol),
        "boundary_samples": boundary[:10],
    }
