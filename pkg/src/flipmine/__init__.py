"""Mining flipping correlation patterns from transactions with an item taxonomy."""
from .baseline import OracleResult, mine_basic, oracle_enumerate
from .dataset import Dataset, Itemset, LevelView, count_supports, level_view, load_transactions, read_transactions
from .measures import CorrLabel, MeasureKind, Thresholds, classify, corr, lift_demo
from .miner import (
    CellResult,
    FlippingPattern,
    MineStats,
    PruneConfig,
    assemble_patterns,
    evaluate_cell,
    flip_filter,
    generate_candidates,
    mine_flipping,
    sibp_ban,
    sibp_update,
    tpg_check,
)
from .datagen import GenParams, generate, threshold_profile
from .estimator import FlippingCorrelationMiner
from .report import format_patterns, format_stats
from .taxonomy import TaxonomyTree, ancestor_at_level, build_taxonomy, level_nodes, read_taxonomy, rebalance

__version__ = "0.1.0"

__all__ = [
    "CellResult",
    "CorrLabel",
    "Dataset",
    "FlippingCorrelationMiner",
    "FlippingPattern",
    "GenParams",
    "Itemset",
    "LevelView",
    "MeasureKind",
    "MineStats",
    "OracleResult",
    "PruneConfig",
    "TaxonomyTree",
    "Thresholds",
    "ancestor_at_level",
    "assemble_patterns",
    "build_taxonomy",
    "classify",
    "corr",
    "count_supports",
    "evaluate_cell",
    "flip_filter",
    "format_patterns",
    "format_stats",
    "generate",
    "generate_candidates",
    "level_nodes",
    "level_view",
    "lift_demo",
    "load_transactions",
    "mine_basic",
    "mine_flipping",
    "oracle_enumerate",
    "read_taxonomy",
    "read_transactions",
    "rebalance",
    "sibp_ban",
    "sibp_update",
    "threshold_profile",
    "tpg_check",
]
