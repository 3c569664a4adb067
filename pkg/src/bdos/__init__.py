"""Analysis, simulation and economics of incentive-based blockchain denial of service."""

from .markov import (
    AnalysisContext,
    StateDistribution,
    TwoCoinContext,
    complete_shutdown_threshold,
    partial_shutdown,
    state_distribution,
    stop_bound_Q,
    two_coin_r_star,
    utility_mine,
    utility_spv,
    utility_stop,
)
from .model import ADVERSARY, ActionProfile, Block, GameParams, LedgerView, Miner, Strategy, main_chain, validate

__version__ = "0.1.0"
