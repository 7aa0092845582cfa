"""reachout: peer-led outreach planning over uncertain social networks.

Selects peer change agents by sampled-network influence maximization and
runs the multi-round recruitment workflow around them: uncertain-graph
ingestion, cascade simulation with exact verification oracles, belief-aware
greedy selection, an event-sourced campaign state machine, and survey
outcome tabulation.
"""

from .campaign import (Campaign, CampaignConfig, CampaignTrajectory,
                       CandidateStatus, RecruitBehavior, Round,
                       SurveyWaveTable, load_campaign, save_campaign,
                       simulate_campaign, tabulate_outcomes)
from .cascade import (EnsembleCascades, ExactOracle, SpreadEstimate,
                      estimate_spread, exact_spread, simulate_cascade)
from .errors import (OracleBoundError, ReachoutError, StateMachineError,
                     ValidationError)
from .graphs import (Provenance, SampledNetwork, UncertainEdge,
                     UncertainNetwork, build_network, sample_ensemble,
                     sample_network)
from .ingest import (FieldObservationRecord, PlatformEdgeRecord,
                     ProvenancePriors, SurveyRecord, SurveyWave,
                     merge_sources, parse_field_log, parse_platform_edges,
                     parse_roster, parse_survey, read_network_file,
                     write_network_file)
from .selector import (BeliefState, RankedCandidates, SelectionParams,
                       coverage_objective, exhaustive_select, greedy_select,
                       update_belief, zero_belief)

__version__ = "0.1.0"

__all__ = [
    "BeliefState", "Campaign", "CampaignConfig", "CampaignTrajectory",
    "CandidateStatus", "EnsembleCascades", "ExactOracle",
    "FieldObservationRecord", "OracleBoundError", "PlatformEdgeRecord",
    "Provenance", "ProvenancePriors", "RankedCandidates", "ReachoutError",
    "RecruitBehavior", "Round", "SampledNetwork", "SelectionParams",
    "SpreadEstimate", "StateMachineError", "SurveyRecord", "SurveyWave",
    "SurveyWaveTable", "UncertainEdge", "UncertainNetwork",
    "ValidationError", "build_network", "coverage_objective",
    "estimate_spread", "exact_spread", "exhaustive_select", "greedy_select",
    "load_campaign", "merge_sources", "parse_field_log",
    "parse_platform_edges", "parse_roster", "parse_survey",
    "read_network_file", "sample_ensemble", "sample_network",
    "save_campaign", "simulate_cascade", "simulate_campaign",
    "tabulate_outcomes", "update_belief", "write_network_file",
    "zero_belief",
]
