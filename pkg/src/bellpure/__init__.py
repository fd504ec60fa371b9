"""Exact evolution and correctability analysis of Bell-diagonal states under B_n / P_n purification."""
from .correctability import (CorrectabilityReport, SequenceKind, Verdict, asymcss,
                             asymcss_lower_bound, binary_entropy, decide_correctability,
                             estimate_r_sup, smallest_correcting_n)
from .errors import BellPureError, DegenerateInput, DomainError, ResourceLimit
from .exponents import (ExponentReport, binomial_tail, chernoff_ratio, chernoff_z, exponent_r,
                        exponent_report, exponent_rp, region_f, separability_after_pn,
                        stirling_lower_bound_check)
from .extended import UNDEFINED, ExtendedReal, exceeds, is_defined
from .oracle import monte_carlo_step, oracle_bn, oracle_pn
from .states import (BellDiagonalState, BellLabel, ErrorRates, arc_k, bb84_state, error_rates,
                     in_closure_sv, independent_state, is_bit_phase_independent,
                     is_entangled_wrt_phi_plus, make_state, parse_state, werner, z_param)
from .steps import (StepKind, StepResult, StepSequence, StepSpec, apply_bn, apply_pn,
                    apply_sequence, apply_step, b2_pair, bn_label_transform, pn_error_rates,
                    pn_label_transform)
from .thresholds import (Method, Protocol, ThresholdResult, bb84_threshold, six_state_threshold,
                         threshold)
from .verification import (ScanRecord, ScanResult, region_figure_data, scan_conjecture,
                           verify_delta_inequality, verify_h_inequality, verify_lemma_diag,
                           verify_oracle_equivalence, verify_reductions, verify_theorem_chain)

__version__ = "0.1.0"
