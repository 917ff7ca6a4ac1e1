"""Online JRP: event engine, policies, Algorithm G's charging scheme and the
single-phase lower-bound adversaries."""
from ..pace import solve_lower_bound_constants
from .adversary import AdversaryD, AdversaryL, adversary_single_phase_d, adversary_single_phase_l, extrapolated_ratio_l
from .charging import (
    ChargingError,
    ChargingReport,
    charging_ratio,
    normalize_to_deadlines,
    phase_decomposition,
    trigger_structure_violations,
)
from .engine import Decision, Event, GameTranscript, OnlinePolicy, ProtocolError, View, run_online, simulate
from .measure import CompetitiveStats, measure_competitive, offline_optimum
from .policies import (
    BATTERY,
    AlgorithmG,
    Immediate,
    Replay,
    ThresholdBalance,
    WaitingThreshold,
    algorithm_g,
    policy_by_name,
    replay_optimal,
    solo,
    time_to_reach,
    waiting_threshold,
)

__all__ = [
    "AdversaryD", "AdversaryL", "AlgorithmG", "BATTERY", "ChargingError", "ChargingReport", "CompetitiveStats",
    "Decision", "Event", "GameTranscript", "Immediate", "OnlinePolicy", "ProtocolError", "Replay",
    "ThresholdBalance", "View", "WaitingThreshold", "adversary_single_phase_d", "adversary_single_phase_l",
    "algorithm_g", "charging_ratio", "extrapolated_ratio_l", "measure_competitive", "normalize_to_deadlines",
    "offline_optimum", "phase_decomposition", "policy_by_name", "replay_optimal", "run_online", "simulate",
    "solo", "solve_lower_bound_constants", "time_to_reach", "trigger_structure_violations", "waiting_threshold",
]
