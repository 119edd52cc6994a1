"""Bandit agents learning through a lossy channel and a served feedback queue."""

__version__ = "0.1.0"

from .bandits import BanditEnv, TsState, UcbState, make_algorithm
from .controllers import (
    RunTrace,
    SlotRecord,
    run_base_update_from_queue,
    run_base_update_from_replay_buffer,
    run_full_feedback,
    run_qr_mab,
    run_random,
)
from .metrics import (
    EnergyCounters,
    EnergyModel,
    ReferenceAggregates,
    SummaryRow,
    esi,
    expected_observations,
    pseudo_regret,
    rli,
    summarize,
)
from .queueing import GeoGeoQueue, Packet, SamplingPolicy, draw_position, sampling_pmf

__all__ = [
    "BanditEnv",
    "EnergyCounters",
    "EnergyModel",
    "GeoGeoQueue",
    "Packet",
    "ReferenceAggregates",
    "RunTrace",
    "SamplingPolicy",
    "SlotRecord",
    "SummaryRow",
    "TsState",
    "UcbState",
    "draw_position",
    "esi",
    "expected_observations",
    "make_algorithm",
    "pseudo_regret",
    "rli",
    "run_base_update_from_queue",
    "run_base_update_from_replay_buffer",
    "run_full_feedback",
    "run_qr_mab",
    "run_random",
    "sampling_pmf",
    "summarize",
]
