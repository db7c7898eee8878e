"""Dense complex matrix algebra for 2x2 and 4x4 problems.

Pauli constants, Kronecker products, partial traces and two eigenvalue
routines: a cyclic Jacobi iteration for Hermitian matrices and a
shifted QR iteration on Hessenberg form for general 4x4 matrices. The
QR route is chosen over characteristic-polynomial root finding because
the spin-flip products fed to it routinely carry multiple eigenvalues
(every product state gives a quadruple root), which polynomial solvers
split into spurious complex clusters. Both routines are small enough to
audit line by line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

DEFAULT_HERMITIAN_TOL = 1e-12
DEFAULT_GENERAL_TOL = 1e-9

_MAX_SWEEPS = 60


class NotHermitian(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class NoConvergence(RuntimeError):
    """Jacobi sweeps did not reach the target off-diagonal residual."""


class ComplexSpectrum(ValueError):
    """Eigenvalues have imaginary parts above tolerance (invalid input)."""


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending plus a solver residual.

    For the Jacobi route the residual is the largest off-diagonal modulus
    at termination; for the general QR route it is the largest imaginary
    part clamped away.
    """

    values: np.ndarray
    residual: float


def tensor_product(A, B) -> np.ndarray:
    """Kronecker product, (A x B)[2i+k, 2j+l] = A[i,j] B[k,l]."""
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def partial_trace_second(rho: np.ndarray) -> np.ndarray:
    """Trace out the second tensor factor of a 4x4 matrix."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("ikjk->ij", r)


def partial_trace_first(rho: np.ndarray) -> np.ndarray:
    """Trace out the first tensor factor of a 4x4 matrix."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("kikj->ij", r)


def _offdiag_max(h: np.ndarray) -> float:
    n = h.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return float(np.abs(h[..., mask]).max())


def _jacobi_rotate_pair(h: np.ndarray, p: int, q: int) -> None:
    # One batched complex Jacobi rotation zeroing h[..., p, q].
    apq = h[..., p, q]
    mag = np.abs(apq)
    active = mag > 1e-300
    safe_mag = np.where(active, mag, 1.0)
    phase = np.where(active, apq / safe_mag, 1.0 + 0.0j)
    app = h[..., p, p].real
    aqq = h[..., q, q].real
    tau = np.where(active, (aqq - app) / (2.0 * safe_mag), 0.0)
    sign = np.where(tau >= 0.0, 1.0, -1.0)
    t = np.where(active, sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # H <- U^H H U with the plane rotation
    # U[p,p]=c, U[p,q]=s*phase, U[q,p]=-s*conj(phase), U[q,q]=c
    colp = h[..., :, p].copy()
    colq = h[..., :, q].copy()
    h[..., :, p] = c[..., None] * colp - (s * np.conj(phase))[..., None] * colq
    h[..., :, q] = (s * phase)[..., None] * colp + c[..., None] * colq
    rowp = h[..., p, :].copy()
    rowq = h[..., q, :].copy()
    h[..., p, :] = c[..., None] * rowp - (s * phase)[..., None] * rowq
    h[..., q, :] = (s * np.conj(phase))[..., None] * rowp + c[..., None] * rowq


def hermitian_eigenvalues_batch(H, tol: float = DEFAULT_HERMITIAN_TOL,
                                max_sweeps: int = _MAX_SWEEPS):
    """Cyclic Jacobi eigenvalues of Hermitian matrices, batched over
    leading axes.

    Returns (values, residual) with values of shape H.shape[:-1] sorted
    descending along the last axis. Raises NotHermitian or NoConvergence.
    """
    h = np.array(H, dtype=complex)
    n = h.shape[-1]
    herm_defect = float(np.abs(h - np.conj(np.swapaxes(h, -1, -2))).max())
    if herm_defect > tol:
        raise NotHermitian(f"max |H - H^dagger| = {herm_defect:.3e} > {tol:.1e}")
    scale = max(1.0, float(np.abs(h).max()))
    residual = _offdiag_max(h)
    sweeps = 0
    while residual > tol * scale:
        if sweeps >= max_sweeps:
            raise NoConvergence(
                f"off-diagonal residual {residual:.3e} after {sweeps} sweeps")
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate_pair(h, p, q)
        residual = _offdiag_max(h)
        sweeps += 1
    values = np.sort(np.diagonal(h, axis1=-2, axis2=-1).real, axis=-1)[..., ::-1]
    return values, residual


def hermitian_eigenvalues(H, tol: float = DEFAULT_HERMITIAN_TOL) -> Spectrum:
    """Eigenvalues of a single Hermitian 2x2 or 4x4 matrix."""
    h = np.asarray(H)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    values, residual = hermitian_eigenvalues_batch(h, tol)
    return Spectrum(values, residual)


def _hessenberg(m: np.ndarray) -> np.ndarray:
    """Householder reduction to upper Hessenberg form (complex)."""
    h = m.copy()
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        norm = float(np.sqrt((np.abs(x) ** 2).sum()))
        if norm < 1e-300:
            continue
        phase = x[0] / abs(x[0]) if abs(x[0]) > 1e-300 else 1.0
        v = x.copy()
        v[0] += phase * norm
        vnorm2 = float((np.abs(v) ** 2).sum())
        if vnorm2 < 1e-300:
            continue
        h[k + 1:, k:] -= (2.0 / vnorm2) * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= (2.0 / vnorm2) * np.outer(h[:, k + 1:] @ v, v.conj())
    return h


def _eig2(a, b, c, d):
    # eigenvalues of [[a, b], [c, d]]
    tr = a + d
    disc = np.sqrt((a - d) * (a - d) + 4.0 * b * c + 0.0j)
    return 0.5 * (tr + disc), 0.5 * (tr - disc)


def _givens(a, b):
    """c real, s complex with [[c, s], [-conj(s), c]] @ (a, b) = (r, 0)."""
    na, nb = abs(a), abs(b)
    if nb < 1e-300:
        return 1.0, 0.0j
    r = np.hypot(na, nb)
    if na < 1e-300:
        return 0.0, np.conj(b) / nb
    return na / r, (a / na) * np.conj(b) / r


def _qr_step(h: np.ndarray, lo: int, hi: int, sigma: complex) -> None:
    # one explicit single-shift QR sweep on the active window
    for k in range(lo, hi + 1):
        h[k, k] -= sigma
    rotations = []
    for k in range(lo, hi):
        c, s = _givens(h[k, k], h[k + 1, k])
        rk = h[k, k:hi + 1].copy()
        rk1 = h[k + 1, k:hi + 1].copy()
        h[k, k:hi + 1] = c * rk + s * rk1
        h[k + 1, k:hi + 1] = -np.conj(s) * rk + c * rk1
        rotations.append((c, s))
    for k, (c, s) in enumerate(rotations, start=lo):
        ck = h[lo:hi + 1, k].copy()
        ck1 = h[lo:hi + 1, k + 1].copy()
        h[lo:hi + 1, k] = c * ck + np.conj(s) * ck1
        h[lo:hi + 1, k + 1] = -s * ck + c * ck1
    for k in range(lo, hi + 1):
        h[k, k] += sigma


def _qr_eigenvalues(m: np.ndarray, max_iter: int = 160) -> np.ndarray:
    """All eigenvalues of a small complex matrix by shifted Hessenberg QR.

    Multiple eigenvalues deflate cleanly here, unlike polynomial root
    finding where an m-fold root smears into a cluster of radius
    eps**(1/m).
    """
    h = _hessenberg(np.asarray(m, dtype=complex))
    n = h.shape[0]
    norm = max(float(np.abs(h).sum()), 1e-300)
    eps = float(np.finfo(float).eps)
    eigs = []
    hi = n - 1
    iters = 0
    while hi >= 0:
        for k in range(hi):
            if abs(h[k + 1, k]) <= eps * max(abs(h[k, k]) + abs(h[k + 1, k + 1]),
                                             norm):
                h[k + 1, k] = 0.0
        if hi == 0:
            eigs.append(h[0, 0])
            break
        if h[hi, hi - 1] == 0.0:
            eigs.append(h[hi, hi])
            hi -= 1
            continue
        if hi == 1 or h[hi - 1, hi - 2] == 0.0:
            eigs.extend(_eig2(h[hi - 1, hi - 1], h[hi - 1, hi],
                              h[hi, hi - 1], h[hi, hi]))
            hi -= 2
            continue
        lo = hi - 1
        while lo > 0 and h[lo, lo - 1] != 0.0:
            lo -= 1
        l1, l2 = _eig2(h[hi - 1, hi - 1], h[hi - 1, hi],
                       h[hi, hi - 1], h[hi, hi])
        sigma = l1 if abs(l1 - h[hi, hi]) <= abs(l2 - h[hi, hi]) else l2
        _qr_step(h, lo, hi, sigma)
        iters += 1
        if iters > max_iter:
            raise NoConvergence(
                f"QR failed to deflate after {iters} iterations")
    return np.array(eigs, dtype=complex)


def general_eigenvalues_4x4(M, tol: float = DEFAULT_GENERAL_TOL) -> Spectrum:
    """Eigenvalues of a general (possibly non-Hermitian) 4x4 matrix.

    Shifted QR iteration on the Hessenberg form. Imaginary parts below
    tol are clamped to zero, as are negatives in [-tol, 0); larger
    imaginary parts raise ComplexSpectrum since valid concurrence inputs
    have a real non-negative spectrum.
    """
    m = np.asarray(M, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    roots = _qr_eigenvalues(m)
    residual = float(np.abs(roots.imag).max())
    if residual > tol:
        raise ComplexSpectrum(f"max |Im eigenvalue| = {residual:.3e} > {tol:.1e}")
    values = roots.real.copy()
    values[(values < 0.0) & (values >= -tol)] = 0.0
    values = np.sort(values)[::-1]
    return Spectrum(values, residual)
