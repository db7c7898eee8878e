"""Shared test fixtures: seeded random state generators and the two
parameter sets used throughout (the finite-temperature set behind most
numbers here, and its zero-temperature variant d = a)."""
import numpy as np

from redfield_lab.bath import BathParameters
from redfield_lab.pair import XState

FINITE_T_PARAMS = BathParameters(1.0, 0.007, 0.01, 0.0065)
ZERO_T_PARAMS = BathParameters(1.0, 0.007, 0.01, 0.007)


def rng(seed: int = 0) -> np.random.RandomState:
    return np.random.RandomState(seed)


def random_complex(r, shape):
    return r.standard_normal(shape) + 1j * r.standard_normal(shape)


def random_hermitian(r, n: int = 2) -> np.ndarray:
    m = random_complex(r, (n, n))
    return 0.5 * (m + m.conj().T)


def random_density(r, n: int = 2) -> np.ndarray:
    m = random_complex(r, (n, n))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_qubit_entries(r):
    """(rho1, rho3) of a random strictly positive qubit state."""
    rho = random_density(r, 2)
    return rho[1, 1].real, rho[0, 1]


def random_params(r) -> BathParameters:
    """Random valid bath parameters in the weak-coupling regime."""
    omega = 0.5 + r.rand()
    a = 0.002 + 0.02 * r.rand()
    b = a * (1.1 + r.rand())
    d = a * r.rand()
    return BathParameters(omega, a, b, d)


def random_xstate(r, strict: bool = True) -> XState:
    """Random PSD X-state; strict keeps both subdeterminants positive."""
    p = r.rand(4) + 0.05
    p = p / p.sum()
    cap = 0.95 if strict else 1.0
    m14 = cap * r.rand() * np.sqrt(p[0] * p[3])
    m23 = cap * r.rand() * np.sqrt(p[1] * p[2])
    ph14, ph23 = np.exp(2j * np.pi * r.rand(2))
    return XState(p[0], p[1], p[2], p[3], m14 * ph14, m23 * ph23)


def random_pair_density(r) -> np.ndarray:
    return random_density(r, 4)
