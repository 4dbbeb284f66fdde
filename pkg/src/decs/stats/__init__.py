"""Statistics over uplift distributions."""

from .inference import (
    DIRECTIONS,
    DegenerateVariance,
    SampleGroup,
    TestResult,
    advantage_test,
    cohens_d,
    groups_from_records,
    indirect_compare,
    mann_whitney_u,
    mean_ci,
    paired_t_test,
    proportion_z,
    proportion_z_test,
    t_test_one_tailed,
    welch_t_test,
)
from .summary import (
    DEFAULT_MIN_N,
    PERCENTILES,
    TOTAL_LABEL,
    BucketStats,
    EmptySample,
    bucket_summary,
    clip_outliers,
    percentile,
)
