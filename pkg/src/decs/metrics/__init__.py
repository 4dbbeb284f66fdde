"""Enrichment, filtering and scoring of incoming/outgoing comparisons."""

from .chains import ARBITRUM, BSC, ETHEREUM, POLYGON, ChainConfig, check_freshness, default_chains, load_chains
from .core import (
    BUCKET_SCHEMES,
    MetricsError,
    Mode,
    NoLosses,
    RevertedInput,
    Winner,
    ZeroVolume,
    assign_bucket,
    bucket_labels,
    count_winners,
    determine_winner,
    effective_amount,
    parity_threshold,
    render_ratio,
    uplift,
    win_loss_ratio,
    win_share,
    winrate,
)
from .prices import MissingPrice, MixedPriceSources, PriceBook, PriceQuote, PriceSource, load_prices, write_prices
from .records import (
    CSV_COLUMNS,
    DROP_REASONS,
    SCHEMA_VERSION,
    Candidate,
    ComparisonRecord,
    apply_filters,
    attach_prices,
    drop_reason,
    score,
    summarize_drops,
)
