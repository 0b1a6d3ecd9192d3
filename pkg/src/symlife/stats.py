"""Statistical tests and aggregation used by the experiment reports.

Self-contained: tail probabilities of the Student t distribution come
from the regularized incomplete beta function, evaluated with a Lentz
continued fraction (absolute accuracy around 1e-14, far inside the
documented 1e-9 budget). Sample variance uses the unbiased n-1
convention throughout. Significance is fixed at alpha = 0.05.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .evolution import FusionClass, FusionEvent

ALPHA = 0.05

_CF_MAX_ITER = 300
_CF_EPS = 3e-16
_CF_TINY = 1e-300


class ConstantSample(ValueError):
    """Correlation is undefined when a sample never varies."""


class LengthMismatch(ValueError):
    """Paired series must have equal lengths."""


@dataclass(frozen=True)
class TestResult:
    statistic: float
    degrees_of_freedom: float
    p_value: float
    significant: bool
    degenerate: bool = False


def _betacf(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta failed to converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed_p(t: float, dof: float) -> float:
    """P(|T| >= |t|) for T ~ Student-t with ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {dof}")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t))


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _sample_variance(values: Sequence[float], mean: float) -> float:
    return math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-tailed Welch t-test for samples with unequal variance.

    Degrees of freedom follow Welch-Satterthwaite. When both samples have
    zero variance the test is degenerate: p is 1 for equal means and 0
    otherwise, flagged so callers can tell it apart from a real result.
    """
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least two values")
    mean_a, mean_b = _mean(a), _mean(b)
    var_a, var_b = _sample_variance(a, mean_a), _sample_variance(b, mean_b)
    if var_a == 0.0 and var_b == 0.0:
        if mean_a == mean_b:
            return TestResult(0.0, 0.0, 1.0, significant=False, degenerate=True)
        statistic = math.inf if mean_a > mean_b else -math.inf
        return TestResult(statistic, 0.0, 0.0, significant=True, degenerate=True)
    sa, sb = var_a / len(a), var_b / len(b)
    statistic = (mean_a - mean_b) / math.sqrt(sa + sb)
    dof = (sa + sb) ** 2 / (sa ** 2 / (len(a) - 1) + sb ** 2 / (len(b) - 1))
    p = student_t_two_tailed_p(statistic, dof)
    return TestResult(statistic, dof, p, significant=p < ALPHA)


def pearson_significance(x: Sequence[float], y: Sequence[float]) -> tuple[float, TestResult]:
    """Pearson correlation with a two-tailed Student-t significance test.

    t = r * sqrt((n - 2) / (1 - r^2)) on n - 2 degrees of freedom. A
    correlation of exactly +/-1 reports p = 0.
    """
    if len(x) != len(y):
        raise LengthMismatch(f"samples differ in length: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ValueError("need at least three paired values")
    mean_x, mean_y = _mean(x), _mean(y)
    sxx = math.fsum((v - mean_x) ** 2 for v in x)
    syy = math.fsum((v - mean_y) ** 2 for v in y)
    if sxx == 0.0 or syy == 0.0:
        raise ConstantSample("correlation is undefined for a constant sample")
    sxy = math.fsum((vx - mean_x) * (vy - mean_y) for vx, vy in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    dof = float(n - 2)
    if 1.0 - r * r <= 0.0:
        statistic = math.inf if r > 0 else -math.inf
        return r, TestResult(statistic, dof, 0.0, significant=True)
    statistic = r * math.sqrt(dof / (1.0 - r * r))
    p = student_t_two_tailed_p(statistic, dof)
    return r, TestResult(statistic, dof, p, significant=p < ALPHA)


def aggregate_curves(runs: Sequence[Sequence[float]]) -> tuple[list[float], list[float]]:
    """Pointwise mean and sample standard deviation across runs.

    All series must share a length. A single run yields itself with zero
    deviation everywhere.
    """
    if not runs:
        raise ValueError("need at least one run")
    length = len(runs[0])
    for i, series in enumerate(runs):
        if len(series) != length:
            raise LengthMismatch(f"run {i} has length {len(series)}, expected {length}")
    means: list[float] = []
    stds: list[float] = []
    for point in range(length):
        values = [run[point] for run in runs]
        m = _mean(values)
        means.append(m)
        stds.append(math.sqrt(_sample_variance(values, m)) if len(values) > 1 else 0.0)
    return means, stds


@dataclass(frozen=True)
class FusionSummary:
    attempts: int
    accepted: int
    counts: dict[FusionClass, int]
    percentages: dict[FusionClass, float]

    @property
    def mutualisms(self) -> int:
        return self.counts.get(FusionClass.BOTH_PARTS_BENEFIT, 0)


def fusion_event_summary(events: Iterable[FusionEvent]) -> FusionSummary:
    """Classification tallies over every evaluated fusion attempt.

    Percentages are taken over all attempts and left empty when there
    were none.
    """
    counts = {cls: 0 for cls in FusionClass}
    attempts = accepted = 0
    for event in events:
        attempts += 1
        accepted += int(event.accepted)
        counts[event.classification] += 1
    if attempts == 0:
        return FusionSummary(0, 0, counts, {})
    percentages = {cls: 100.0 * n / attempts for cls, n in counts.items()}
    return FusionSummary(attempts, accepted, counts, percentages)
