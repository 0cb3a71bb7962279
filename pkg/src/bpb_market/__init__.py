"""Price competition among modules sold to a budgeted buyer: selection rules,
equilibrium construction and verification, and learning dynamics."""
from .matroids import Free, Graphic, Matroid, Partition, Uniform
from .model import (Instance, InstanceError, SelectionResult, as_scalar, lambda_max, load_instance,
                    load_prices, save_instance, save_prices, utility)
from .selection import (BY_COST_RATIO, BY_INDEX, ByCostRatio, ByIndex, Explicit, bpb_order,
                        critical_price, greedy_bpb, greedy_knapsack, greedy_skip, optimal_select)

__version__ = "0.1.0"
