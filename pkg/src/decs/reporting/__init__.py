"""Record persistence, benchmark marts and histogram data."""

from .histogram import DEFAULT_BINS, DEFAULT_WINDOW, emit_histogram, histogram
from .mart import (
    BenchTable,
    EmptyScope,
    MartFooter,
    MartRow,
    Scope,
    bucket_csv,
    build_bucket_table,
    build_mart,
    fmt_pct,
    fmt_usd,
    mart_csv,
    select,
)
from .store import (
    RecordStore,
    SchemaVersionMismatch,
    StoreCorrupted,
    StoreError,
    append_records,
    decode_line,
    encode_line,
)
