"""Exact threshold analysis for monotone families of subsets."""

from .errors import (CapacityError, DecompositionError, DomainError, MalformedInputError,
                     MintermError, PreconditionError, UndefinedThresholdError)
from .family import (MintermFamily, contains, dumps_family, is_antichain, load_family,
                     loads_family, minimalize, save_family, supplements)
from .generators import (GraphSpec, gen_all_k_subsets, gen_graph, gen_random, gen_random_mixed,
                         gen_single, gen_singletons, gen_star)
from .lp import (dual_value, expectation_threshold_inverse, fractional_expectation,
                 kahn_kalai_check, lp_measure_bracket, ratio_bounds_check,
                 weighted_witness_moments, width_upper_check)
from .measure import (delta_eps, estimate_measure, layer_counts, measure, measure_derivative,
                      monotone_ratio_check, pivotal_expectation, threshold_point)
from .moments import first_moment, paley_zygmund_bound, second_moment
from .structure import (decompose, halving_check, is_tame, tame_lower_bound,
                        tame_transfer_check, verify_tame_approximation)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
