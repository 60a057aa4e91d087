"""Executable measure-theoretic machinery for finite stochastic models.

The package constructs sigma-algebras and filtrations over finite outcome
spaces, checks measurability of variables and decision policies, evaluates
adapted against prescient trading policies on an additive binomial lattice,
and provides exact flagged-interval algebra with a bounded-increment walk
for the continuous picture.
"""

from ._kernels import BACKEND as kernel_backend
from .errors import (CapacityError, DegenerateInputError, FiltraError,
                     PolicyDomainError, SpaceMismatchError, ValidationError)
from .filtration import (Filtration, NestingVerdict, filtration_of_process,
                         is_adapted, natural_filtration, prefix_cylinder,
                         verify_nesting)
from .interval_continuum import (ContinuousWalkModel, FigureData, IntervalSet,
                                 Piece, cone_bounds, emit_cone_figure_data,
                                 estimate_event_probability,
                                 interval_complement, interval_contains,
                                 interval_intersect, interval_union,
                                 limit_union_witness, parse_interval_set,
                                 parse_piece)
from .lattice_mdp import (ACTIONS, FLAT, LONG, LatticeModel, LeakVerdict,
                          MarkovVerdict, Policy, PriceLattice, TradingMDP,
                          action_indicator, build_price_process,
                          evaluate_policy_exact, leak_detect,
                          monte_carlo_value, optimal_adapted_value,
                          path_reward, policy_action, price_variable,
                          replay_state, verify_markov_property)
from .outcome_space import (Event, OutcomeSpace, ProbabilityMeasure,
                            build_space, complement, event_from_prefix,
                            intersect, probability, sample_path,
                            sample_paths, union)
from .random_variable import (RandomVariable, StochasticProcess,
                              conditional_expectation, expectation,
                              find_measurability_violation, is_measurable,
                              level_sets, sigma_of)
from .sigma_algebra import (AxiomVerdict, SigmaAlgebra, contains,
                            enumerate_members, generate, is_sub_algebra,
                            verify_axioms)

__version__ = "0.1.0"
