"""Two-group tests on uplift distributions.

Every test reports a one-tailed p-value by default. ``direction`` names the
alternative: ``g1_less`` (group 1 has the smaller location), ``g1_greater``,
or ``two_sided``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..errors import DecsError, EmptyResultError
from .special import normal_cdf, normal_ppf, normal_sf, t_cdf, t_ppf, t_sf
from .summary import EmptySample, clip_outliers

DIRECTIONS = ("g1_less", "g1_greater", "two_sided")
P_DISPLAY_FLOOR = 1e-6
EXACT_MWU_MAX_N = 20


class DegenerateVariance(DecsError):
    reason = "DegenerateVariance"


@dataclass(frozen=True)
class SampleGroup:
    label: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("sample values must be one-dimensional")
        if not np.isfinite(arr).all():
            raise ValueError(f"group {self.label}: non-finite values")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def clipped(self, bound_pct: float) -> SampleGroup:
        return SampleGroup(self.label, clip_outliers(self.values, bound_pct))


Interval = tuple[float, float]


@dataclass(frozen=True)
class TestResult:
    test: str
    statistic: float
    p_value: float
    alpha: float
    direction: str = "g1_less"
    df: float | None = None
    cohens_d: float | None = None
    ci_g1: Interval | None = None
    ci_g2: Interval | None = None
    ci_diff: Interval | None = None
    n1: int | None = None
    n2: int | None = None
    mean1: float | None = None
    mean2: float | None = None
    label1: str | None = None
    label2: str | None = None
    method: str | None = None
    proportion: float | None = None

    __test__ = False  # keep pytest from collecting this class

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha

    @property
    def p_display(self) -> str:
        return "< 1e-6" if self.p_value < P_DISPLAY_FLOOR else f"{self.p_value:.3f}"

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        for k in ("ci_g1", "ci_g2", "ci_diff"):
            if out[k] is not None:
                out[k] = list(out[k])
        out["significant"] = self.significant
        out["p_display"] = self.p_display
        return out


def _check_direction(direction: str) -> None:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")


def _t_pvalue(t: float, df: float, direction: str) -> float:
    if direction == "g1_less":
        return t_cdf(t, df)
    if direction == "g1_greater":
        return t_sf(t, df)
    return min(1.0, 2.0 * t_sf(abs(t), df))


def mean_ci(values: np.ndarray, confidence: float = 0.95) -> Interval:
    """t-based confidence interval for the mean."""
    n = len(values)
    if n < 2:
        raise EmptySample("need at least two values for a confidence interval")
    m = float(np.mean(values))
    half = t_ppf(0.5 + confidence / 2, n - 1) * float(np.std(values, ddof=1)) / math.sqrt(n)
    return (m - half, m + half)


def cohens_d(g1: np.ndarray, g2: np.ndarray) -> float:
    """Mean difference over the pooled standard deviation."""
    n1, n2 = len(g1), len(g2)
    pooled = ((n1 - 1) * np.var(g1, ddof=1) + (n2 - 1) * np.var(g2, ddof=1)) / (n1 + n2 - 2)
    if pooled == 0:
        raise DegenerateVariance("pooled variance is zero")
    return float((np.mean(g1) - np.mean(g2)) / math.sqrt(pooled))


def welch_t_test(
    g1: SampleGroup,
    g2: SampleGroup,
    direction: str = "g1_less",
    *,
    alpha: float = 0.05,
    confidence: float = 0.95,
) -> TestResult:
    """Unequal-variance two-sample t test (Welch-Satterthwaite df)."""
    _check_direction(direction)
    if g1.n < 2 or g2.n < 2:
        raise EmptySample("each group needs at least two observations")
    x, y = g1.values, g2.values
    n1, n2 = g1.n, g2.n
    m1, m2 = float(x.mean()), float(y.mean())
    v1, v2 = float(np.var(x, ddof=1)), float(np.var(y, ddof=1))
    if v1 == 0 and v2 == 0:
        raise DegenerateVariance("both sample variances are zero")
    a1, a2 = v1 / n1, v2 / n2
    se = math.sqrt(a1 + a2)
    t = (m1 - m2) / se
    df = (a1 + a2) ** 2 / (a1 * a1 / (n1 - 1) + a2 * a2 / (n2 - 1))
    half = t_ppf(0.5 + confidence / 2, df) * se
    return TestResult(
        test="t_one_tailed" if direction != "two_sided" else "t_two_sided",
        statistic=t,
        p_value=_t_pvalue(t, df, direction),
        alpha=alpha,
        direction=direction,
        df=df,
        cohens_d=cohens_d(x, y),
        ci_g1=mean_ci(x, confidence),
        ci_g2=mean_ci(y, confidence),
        ci_diff=(m1 - m2 - half, m1 - m2 + half),
        n1=n1,
        n2=n2,
        mean1=m1,
        mean2=m2,
        label1=g1.label,
        label2=g2.label,
        method="welch",
    )


t_test_one_tailed = welch_t_test


def paired_t_test(
    g1: Mapping[object, float],
    g2: Mapping[object, float],
    direction: str = "g1_less",
    *,
    alpha: float = 0.05,
    confidence: float = 0.95,
    labels: tuple[str, str] = ("g1", "g2"),
) -> TestResult:
    """One-sample t test on differences of observations matched by key."""
    _check_direction(direction)
    keys = sorted(set(g1) & set(g2), key=repr)
    if len(keys) < 2:
        raise EmptySample("need at least two matched pairs")
    a = np.array([g1[k] for k in keys], dtype=np.float64)
    b = np.array([g2[k] for k in keys], dtype=np.float64)
    d = a - b
    n = len(d)
    sd = float(np.std(d, ddof=1))
    if sd == 0:
        raise DegenerateVariance("paired differences have zero variance")
    md = float(d.mean())
    se = sd / math.sqrt(n)
    t = md / se
    half = t_ppf(0.5 + confidence / 2, n - 1) * se
    return TestResult(
        test="t_paired",
        statistic=t,
        p_value=_t_pvalue(t, n - 1, direction),
        alpha=alpha,
        direction=direction,
        df=float(n - 1),
        cohens_d=md / sd,
        ci_g1=mean_ci(a, confidence),
        ci_g2=mean_ci(b, confidence),
        ci_diff=(md - half, md + half),
        n1=n,
        n2=n,
        mean1=float(a.mean()),
        mean2=float(b.mean()),
        label1=labels[0],
        label2=labels[1],
        method="paired",
    )


def mann_whitney_u(
    g1: SampleGroup,
    g2: SampleGroup,
    direction: str = "g1_less",
    *,
    alpha: float = 0.05,
    method: str = "auto",
) -> TestResult:
    """Rank-sum test with midranks for ties.

    ``method="auto"`` enumerates the exact permutation distribution (ties
    included) when ``n1 + n2 <= 20`` and otherwise uses the normal
    approximation with tie and continuity corrections. The statistic is
    ``U1``: pairs where group 1 exceeds group 2, ties counting one half.
    """
    _check_direction(direction)
    if g1.n < 1 or g2.n < 1:
        raise EmptySample("each group needs at least one observation")
    n1, n2 = g1.n, g2.n
    n = n1 + n2
    pooled = np.concatenate([g1.values, g2.values])
    ranks = kernels.midranks(pooled)
    r1 = float(ranks[:n1].sum())
    u1 = r1 - n1 * (n1 + 1) / 2.0
    if method == "auto":
        method = "exact" if n <= EXACT_MWU_MAX_N else "asymptotic"
    if method == "exact":
        p = _mwu_exact_p(ranks, n1, direction)
    elif method == "asymptotic":
        p = _mwu_normal_p(u1, n1, n2, kernels.tie_sizes(pooled), direction)
    else:
        raise ValueError(f"unknown method {method!r}")
    return TestResult(
        test="mann_whitney",
        statistic=u1,
        p_value=p,
        alpha=alpha,
        direction=direction,
        n1=n1,
        n2=n2,
        mean1=g1.mean,
        mean2=g2.mean,
        label1=g1.label,
        label2=g2.label,
        method=method,
    )


def _mwu_exact_p(ranks: np.ndarray, n1: int, direction: str) -> float:
    # Doubled midranks are integers, so group-1 rank sums can be tallied exactly.
    doubled = np.rint(2 * ranks).astype(np.int64)
    counts = kernels.subset_sum_counts(doubled, n1).astype(np.float64)
    observed = int(doubled[:n1].sum())
    total = counts.sum()
    lower = counts[: observed + 1].sum() / total
    upper = counts[observed:].sum() / total
    if direction == "g1_less":
        return float(min(1.0, lower))
    if direction == "g1_greater":
        return float(min(1.0, upper))
    return float(min(1.0, 2 * min(lower, upper)))


def _mwu_normal_p(u1: float, n1: int, n2: int, ties: np.ndarray, direction: str) -> float:
    n = n1 + n2
    tie_term = float(np.sum(ties.astype(np.float64) ** 3 - ties)) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    sigma = math.sqrt(var)
    mu = n1 * n2 / 2.0
    if direction == "g1_less":
        return normal_cdf((u1 - mu + 0.5) / sigma)
    if direction == "g1_greater":
        return normal_sf((u1 - mu - 0.5) / sigma)
    z = (abs(u1 - mu) - 0.5) / sigma
    return min(1.0, 2 * normal_sf(z))


def proportion_z(p_hat: float, n: int, p0: float = 0.5) -> float:
    return (p_hat - p0) / math.sqrt(p0 * (1 - p0) / n)


def proportion_z_test(
    successes: int, n: int, p0: float = 0.5, *, alpha: float = 0.05, confidence: float = 0.95
) -> TestResult:
    """One-tailed test that the success share exceeds ``p0``."""
    if n <= 0:
        raise EmptyResultError("proportion test needs n > 0")
    p_hat = successes / n
    z = proportion_z(p_hat, n, p0)
    half = normal_ppf(0.5 + confidence / 2) * math.sqrt(p_hat * (1 - p_hat) / n)
    return TestResult(
        test="proportion_z",
        statistic=z,
        p_value=normal_sf(z),
        alpha=alpha,
        direction="g1_greater",
        ci_g1=(p_hat - half, p_hat + half),
        n1=n,
        mean1=p_hat,
        method="wald",
        proportion=p_hat,
    )


def advantage_test(group: SampleGroup, *, alpha: float = 0.05, confidence: float = 0.95) -> TestResult:
    """Mean uplift with its CI, plus the z test that the positive share exceeds one half."""
    if group.n < 2:
        raise EmptySample("need at least two values")
    positive = int(np.count_nonzero(group.values > 0))
    prop = proportion_z_test(positive, group.n, 0.5, alpha=alpha)
    return TestResult(
        test="proportion_z",
        statistic=prop.statistic,
        p_value=prop.p_value,
        alpha=alpha,
        direction="g1_greater",
        ci_g1=mean_ci(group.values, confidence),
        n1=group.n,
        mean1=group.mean,
        label1=group.label,
        method="wald",
        proportion=prop.proportion,
    )


def indirect_compare(
    g1: SampleGroup,
    g2: SampleGroup,
    alpha: float = 0.05,
    *,
    clip_pct: float = 5.0,
    confidence: float = 0.95,
) -> TestResult:
    """Compare two protocols through their uplift against a shared baseline.

    Uplift is baseline minus protocol, so a smaller mean means the protocol
    came closer to (or beat) the baseline. The alternative is that group 1's
    mean is below group 2's.
    """
    a, b = g1.clipped(clip_pct), g2.clipped(clip_pct)
    return welch_t_test(a, b, "g1_less", alpha=alpha, confidence=confidence)


def groups_from_records(records: Sequence, label: str, field_name: str = "uplift_pct") -> SampleGroup:
    return SampleGroup(label, np.array([getattr(r, field_name) for r in records if r.competitor == label]))
