"""Hedge price learners, the distorted payment rule and the repeated game."""
from ._backend import NAME as BACKEND
from .dynamics import (C0_DEFAULT, DynamicsTrace, check_convergence, desk_t0, market_args,
                       module_uniforms, theory_t0, run_dynamics)
from .mwu import (BidGrid, LearnerState, PaymentRule, counterfactual_rewards, critical_index,
                  distorted_reward, grid_reward, mwu_update, selection_vector)
from .structural import (StructuralReport, check_structural_lemmas, dominance_holds,
                         stability_holds, worst_rejected_holds)
