"""Constructive parts of the theory: perturbation of block bases, gliding-hump
extraction, Walsh blocks and the counterexample they produce."""

from .counterexample import (
    BlockLayout,
    WeakConvergenceCertificate,
    build_block_counterexample,
    d_max,
    validate_weak_bound,
    walsh_counterexample_from_json,
)
from .extraction import (
    ClaimCertificate,
    ExtractionCertificate,
    extract_basic_subsequence,
    extract_fd_claim,
    tail_cut,
    triangular_columns,
)
from .oscillation import OscillationReport, alternating_rows, oscillation_functional
from .perturbation import PerturbationReport, coefficient_samples, perturbation_check
from .records import Ineq, failing
from .schedule import DeltaSchedule
from .walsh import MAX_DIM, WalshSystem, ell1_of_combination, walsh_system

__all__ = [
    "BlockLayout", "WeakConvergenceCertificate", "build_block_counterexample", "d_max", "validate_weak_bound",
    "walsh_counterexample_from_json", "ClaimCertificate", "ExtractionCertificate", "extract_basic_subsequence",
    "extract_fd_claim", "tail_cut", "triangular_columns", "OscillationReport", "alternating_rows",
    "oscillation_functional", "PerturbationReport", "coefficient_samples", "perturbation_check", "Ineq", "failing",
    "DeltaSchedule", "MAX_DIM", "WalshSystem", "ell1_of_combination", "walsh_system",
]
