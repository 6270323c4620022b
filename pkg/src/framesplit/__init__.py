"""Finite frames, operator splittings, and Loewner-order verification of frame inequalities."""

from .frame import (DualPair, Frame, FrameBounds, canonical_dual, frame_bounds,
                    frame_from_json, frame_to_json, random_alternate_dual, to_parseval)
from .gen import (GenConfig, named_frame, random_frame, random_parseval, random_split_pair,
                  random_subset, random_unit_vector)
from .inequalities import (Family, lambda_coefficients, scalar_breakdown, verify_dual_energy_sum,
                           verify_dual_split, verify_general_identity, verify_mixed_energy,
                           verify_mixed_energy_scalar, verify_parseval_identity,
                           verify_part_defect, verify_weighted_dual_split)
from .linalg import (EIG_TOL, PSD_TOL, HermitianOperator, MarginReport, conjugate, eig_hermitian,
                     loewner_leq, spectral_apply)
from .splitting import (IndexSubset, QuadraticCertificate, ResidualPair, SplitPair,
                        certificate_nonneg, check_lemma_part, partial_frame_operator, residuals,
                        split_from_subset)

__version__ = "0.1.0"
