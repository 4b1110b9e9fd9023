"""Exact Goldbach-pair counts and their analytic estimates."""

from .errors import CacheFormatError, DomainError, GoldbachError, ResourceLimitError
from .estimator import (
    EstimateConfig,
    NdfValue,
    UnbalanceValue,
    dusart_pi_upper,
    estimate,
    g_tot,
    g_tot_prime,
    ndf,
    ndf_average,
    round_half_away,
    unbalance,
)
from .harness import EstimateRow, TotalsRow, build_table, build_totals, emit_report, render_report
from .pairs import RangeKind, count_pairs, oracle_count_pairs, total_pairs
from .prime_engine import (
    PiIndex,
    PrimeEngine,
    SievedSegment,
    is_prime,
    load_pi_cache,
    pi,
    save_pi_cache,
    sieve_segment,
)

__version__ = "0.1.0"
