"""Two-sample t-procedures, the sign test, and descriptive summaries.

The pooled procedure assumes equal variances and uses

    t = (X1bar - X2bar) / (s_p sqrt(1/n1 + 1/n2)),
    s_p^2 = ((n1-1) s1^2 + (n2-1) s2^2) / (n1 + n2 - 2),

with n1 + n2 - 2 degrees of freedom.  The unpooled procedure drops the
equal-variance assumption:

    t = (X1bar - X2bar) / sqrt(s1^2/n1 + s2^2/n2)

with the Welch degrees of freedom written in the product form

    (n1-1)(n2-1)(n2 s1^2 + n1 s2^2)^2
    ---------------------------------- .
    (n2-1) n2^2 s1^4 + (n1-1) n1^2 s2^4

Both procedures also accept summary statistics (n, mean, sd) directly,
since published tables often provide nothing else.
"""

import math
from dataclasses import dataclass
from statistics import median as _median

from scipy.special import betainc

__all__ = [
    "SampleSummary",
    "TestResult",
    "descriptive",
    "pooled_t",
    "unpooled_t",
    "pooled_t_summary",
    "unpooled_t_summary",
    "sign_test",
    "normal_tail",
    "t_tail",
    "spacing_differences",
]


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    median: float
    stdev: float  # sample standard deviation, denominator n - 1
    degenerate: bool = False


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: float
    p_value: float
    kind: str  # pooled-t | unpooled-t | sign | z


class DegenerateVarianceError(ValueError):
    """Raised when a t-statistic would divide by a zero spread."""


def descriptive(data) -> SampleSummary:
    data = [float(v) for v in data]
    if not data:
        raise ValueError("empty sample")
    n = len(data)
    mean = sum(data) / n
    if n == 1:
        return SampleSummary(n=1, mean=mean, median=mean, stdev=0.0, degenerate=True)
    var = sum((v - mean) ** 2 for v in data) / (n - 1)
    return SampleSummary(n=n, mean=mean, median=float(_median(data)),
                         stdev=math.sqrt(var))


def t_tail(t: float, df: float, two_sided: bool = True) -> float:
    """Student-t tail probability via the regularized incomplete beta
    function; fractional df supported."""
    if df <= 0:
        raise ValueError("df must be positive")
    if t == 0.0:
        return 1.0 if two_sided else 0.5
    x = df / (df + t * t)
    both = float(betainc(df / 2.0, 0.5, x))  # P(|T| >= |t|)
    if two_sided:
        return both
    one = 0.5 * both
    return one if t > 0 else 1.0 - one


def normal_tail(z: float, two_sided: bool = True) -> float:
    """Standard normal tail: 2(1 - Phi(|z|)) (or the one-sided P(Z >= z))."""
    both = math.erfc(abs(z) / math.sqrt(2.0))
    if two_sided:
        return both
    one = 0.5 * both
    return one if z > 0 else 1.0 - one


def pooled_t_summary(n1: int, mean1: float, sd1: float,
                     n2: int, mean2: float, sd2: float,
                     two_sided: bool = True) -> TestResult:
    if n1 < 2 or n2 < 2:
        raise ValueError("need at least two observations per sample")
    df = n1 + n2 - 2
    sp2 = ((n1 - 1) * sd1 ** 2 + (n2 - 1) * sd2 ** 2) / df
    if sp2 <= 0:
        raise DegenerateVarianceError("pooled variance is zero")
    t = (mean1 - mean2) / math.sqrt(sp2 * (1.0 / n1 + 1.0 / n2))
    return TestResult(statistic=t, df=float(df),
                      p_value=t_tail(t, df, two_sided), kind="pooled-t")


def unpooled_t_summary(n1: int, mean1: float, sd1: float,
                       n2: int, mean2: float, sd2: float,
                       two_sided: bool = True) -> TestResult:
    if n1 < 2 or n2 < 2:
        raise ValueError("need at least two observations per sample")
    v1, v2 = sd1 ** 2, sd2 ** 2
    if v1 + v2 <= 0:
        raise DegenerateVarianceError("both sample variances are zero")
    t = (mean1 - mean2) / math.sqrt(v1 / n1 + v2 / n2)
    df = ((n1 - 1) * (n2 - 1) * (n2 * v1 + n1 * v2) ** 2
          / ((n2 - 1) * n2 ** 2 * v1 ** 2 + (n1 - 1) * n1 ** 2 * v2 ** 2))
    return TestResult(statistic=t, df=df,
                      p_value=t_tail(t, df, two_sided), kind="unpooled-t")


def pooled_t(x1, x2, two_sided: bool = True) -> TestResult:
    s1, s2 = descriptive(x1), descriptive(x2)
    return pooled_t_summary(s1.n, s1.mean, s1.stdev, s2.n, s2.mean, s2.stdev,
                            two_sided)


def unpooled_t(x1, x2, two_sided: bool = True) -> TestResult:
    s1, s2 = descriptive(x1), descriptive(x2)
    return unpooled_t_summary(s1.n, s1.mean, s1.stdev, s2.n, s2.mean, s2.stdev,
                              two_sided)


def sign_test(n_minus: int, n: int) -> TestResult:
    """Lower binomial tail P(X <= n_minus) for X ~ Binomial(n, 1/2), summed
    exactly with big-integer binomial coefficients."""
    if not (0 <= n_minus <= n):
        raise ValueError("need 0 <= n_minus <= n")
    total = sum(math.comb(n, k) for k in range(n_minus + 1))
    p = total / 2 ** n
    return TestResult(statistic=float(n_minus), df=float(n), p_value=float(p),
                      kind="sign")


def spacing_differences(zeros, normalizer: float = 1.0):
    """Differences (z2-z1, z3-z2, z3-z1) of the first three normalized
    zeros, where z_j = gamma_j * normalizer."""
    zs = [float(g) * normalizer for g in zeros]
    if len(zs) < 3:
        raise ValueError("need at least three zeros")
    z1, z2, z3 = zs[0], zs[1], zs[2]
    return (z2 - z1, z3 - z2, z3 - z1)
