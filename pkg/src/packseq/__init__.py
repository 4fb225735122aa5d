"""Packing-order prediction from human demonstrations.

Pipeline: mine adjacent object pairs from packed-scene demonstrations,
normalize them into a first-order chain, expand the chain into a per-state
level table, and sample packing plans with a level-wise beam search.
A blinded judgment service plus exact two-proportion statistics evaluate
how human-like the sampled plans are.
"""

from .catalog import (
    CatalogObject,
    ContainerSpec,
    DatasetError,
    Demonstration,
    ObjectCatalog,
    PlacementRecord,
    SceneSamplingError,
    dataset_stats,
    default_catalog,
    default_container,
    load_catalog,
    load_dataset,
    placement_stats,
    sample_scene,
    write_catalog,
    write_dataset,
)
from .levels import LevelEntry, LevelTable, build_level_table, transitions_at
from .markov import (
    START,
    DegenerateChainError,
    MarkovChain,
    MiningConfig,
    PairSupport,
    build_chain,
    extract_pairs,
    load_chain,
    mine,
    save_chain,
    validate_chain,
)
from .planner import (
    PackingPlan,
    PlanStep,
    SearchConfig,
    oracle_best_sequence,
    predict,
    predict_full,
    random_sequence,
)
from .stats import (
    Contingency2x2,
    LinregResult,
    TestResult,
    boschloo_one_sided,
    cohens_h,
    fisher_one_sided,
    linreg,
    normal_cdf,
    normal_quantile,
    power_two_prop,
)
from .synthetic import synth_demos

__version__ = "0.1.0"
