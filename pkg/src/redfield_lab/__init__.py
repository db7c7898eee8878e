"""Numerical laboratory for the reduced dynamics of a qubit in a thermal
bath, the map's extension to a qubit plus an inert ancilla, and the
positivity and entanglement anomalies both can develop.

Conventions used throughout:
- the system Hamiltonian is (omega/2) sigma_3 and time is in units 1/omega;
- two-qubit states put the inert ancilla first, the bath-coupled qubit
  second, in the product basis |00>, |01>, |10>, |11>;
- concurrence is normalized so a Bell state scores 1.
"""

from .bath import BathParameters, CorrelationFunction, kms_beta, \
    new_bath_parameters, coefficients_from_correlation
from .matrices import Spectrum, general_eigenvalues_4x4, \
    hermitian_eigenvalues, partial_trace_first, partial_trace_second, \
    tensor_product
from .qubit import QubitState, equilibrium_state, propagate_closed, \
    propagate_rk4, witness_state
from .pair import PairState, QubitMap, XState, apply_extended, choi_matrix, \
    family_state, family_state_zero_T, family_trajectory_zero_T, \
    qubit_map_at
from .concurrence import ConcurrenceReport, concurrence_wootters, \
    concurrence_xstate, concurrence_zero_T_closed, \
    detect_entanglement_increase, small_time_slope
from .scanner import ClassificationResult, classify_pair_state, \
    scan_family, scan_single_bloch

__version__ = "0.1.0"
