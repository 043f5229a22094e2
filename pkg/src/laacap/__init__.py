"""Effective capacity of LAA links contending with WiFi: analysis,
power-allocation optimization, and slot-level simulation."""

from .capacity import (DelayMapping, EcSolution, build_transforms,
                       ec_four_state, ec_two_state, ec_zero_theta_limit,
                       mean_service_rate, spectral_check, theta_of_delay,
                       transition_matrix)
from .contention import (ContentionPoint, FixedPointError, SLOT_KINDS,
                         SlotDistribution, slot_distribution, slot_mean,
                         slot_pgf, solve_fixed_point,
                         solve_fixed_point_hidden)
from .genfun import (GenFun, GenFunDomainError, big_f, eta_hat, t1_hat,
                     t2_hat, t3_hat)
from .optimizer import (CapacityPowerMap, PowerAllocation, PowerModel,
                        average_power, channel_inversion, maximize_ec,
                        maximize_eee, power_model, power_of_capacity,
                        power_slope_of_capacity, water_filling)
from .scenario import (ChannelSet, FCW, SystemParams, VCW, dbm_to_watts,
                       generate_scenario, pathloss_gain, rate_of_power,
                       watts_to_dbm)
from .simulator import (EcEstimate, InstabilityError, NodeState, NodeStats,
                        ServiceTrace, empirical_stats, estimate_ec,
                        estimate_theta_from_queue, run, summary_to_json,
                        throughput, trace_summary, trace_to_csv)

__all__ = [
    "ChannelSet", "ContentionPoint", "CapacityPowerMap", "DelayMapping",
    "EcEstimate", "EcSolution", "FCW", "FixedPointError", "GenFun",
    "GenFunDomainError", "InstabilityError", "NodeState", "NodeStats",
    "PowerAllocation", "PowerModel", "SLOT_KINDS", "ServiceTrace",
    "SlotDistribution", "SystemParams", "VCW", "average_power", "big_f",
    "build_transforms", "channel_inversion", "dbm_to_watts", "ec_four_state",
    "ec_two_state", "ec_zero_theta_limit", "empirical_stats", "estimate_ec",
    "estimate_theta_from_queue", "eta_hat", "generate_scenario",
    "maximize_ec", "maximize_eee", "mean_service_rate", "pathloss_gain",
    "power_model", "power_of_capacity", "power_slope_of_capacity",
    "rate_of_power", "run", "slot_distribution", "slot_mean", "slot_pgf",
    "solve_fixed_point", "solve_fixed_point_hidden", "spectral_check",
    "summary_to_json", "t1_hat", "t2_hat", "t3_hat", "theta_of_delay",
    "throughput", "trace_summary", "trace_to_csv", "transition_matrix",
    "water_filling",
]

__version__ = "0.1.0"
