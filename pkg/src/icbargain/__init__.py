"""Cooperative (Nash bargaining) and competitive spectrum allocation for
Gaussian interference games."""

from .errors import (
    DomainError,
    InvalidGameError,
    IterationLimit,
    NonPositiveSurplus,
    NoRoot,
    ZeroCompetitiveRate,
)
from .flat import (
    ExistenceReport,
    UtilityMode,
    f_share,
    h_share,
    nbs_exists_flat,
    solve_nbs_flat,
    two_player_sufficient,
)
from .game import (
    Allocation,
    BargainOutcome,
    FlatGame,
    PoaReport,
    RateProblem,
    SelectiveGame,
    Status,
    competitive_rate_flat,
    competitive_rate_selective,
    db_to_linear,
    fdm_rate_flat,
    nash_product_log,
    per_bin_rate,
    per_bin_rates,
    tdm_fdm_rate_selective,
)
from .selective import (
    FadingSpec,
    KktReport,
    SolverSettings,
    count_shared_bins,
    expected_rates_statistical,
    kkt_verify,
    ratio_matrix,
    solve_nbs_selective,
    statistical_rate_problem,
)
from .sim import (
    SweepKind,
    SweepSpec,
    TrialRecord,
    gen_rayleigh_selective,
    poa_metrics,
    read_csv,
    run_sweep,
)
from .twoplayer import PrefixTables, build_prefix_tables, solve_two_player, validate_outcome

__version__ = "0.1.0"
