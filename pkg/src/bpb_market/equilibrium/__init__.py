"""Equilibrium construction, verification and quality measurement."""
from .construct import (EquilibriumOutput, Snapshot, additive_equilibrium, construct_eq_unweighted,
                        construct_eq_weighted, cpv_feasible, cpv_star, perturb_distinct_ratios,
                        ratios_distinct)
from .invariants import InvariantReport, check_alg5_invariants
from .quality import (additive_poa_bound, approx_ratio, at_cost_bound, budget_or_bpb_tight,
                      equal_bpb_holds, opt_with_costs, simplified_additive_ratio,
                      simplified_matroid_ratio, spend_lower_bound_holds, unit_matroid_poa_bound,
                      weighted_matroid_poa_bound)
from .verify import (DeviationReport, ModuleDeviation, canonicalize_worst_additive,
                     lower_rejected_prefix_to_cost, selection_profile, verify_eps_equilibrium)
