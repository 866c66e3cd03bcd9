from dataclasses import dataclass
from typing import Sequence, Tuple
import numpy as np
from scipy import stats


@dataclass(frozen=True)
class LinearFit:
    """
    Least-squares line ``y = slope * x + intercept`` with its coefficient of determination.
    """

    slope: float
    intercept: float
    r_squared: float
    points: int


def mean_and_std_error(values: np.ndarray) -> Tuple[float, float]:
    """
    Returns the sample mean and its i.i.d. standard error (sample standard deviation over sqrt(n)).

    :param values: The observations.
    :type values: numpy.ndarray
    :rtype: Tuple[float, float]
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if n == 0:
        return float("nan"), float("nan")
    mean = float(values.mean())
    if n == 1:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / np.sqrt(n))


def lower_confidence_bound(mean: float, std_error: float, level: float = 0.99) -> float:
    """
    One-sided normal lower confidence bound.

    :rtype: float
    """
    return mean - float(stats.norm.ppf(level)) * std_error


def log_linear_fit(xs: Sequence[float], ys: Sequence[float]) -> LinearFit:
    """
    Fits ``log(y)`` against ``x`` over the points with ``y > 0``.

    :param xs: Abscissae.
    :type xs: Sequence[float]
    :param ys: Positive ordinates; others are skipped.
    :type ys: Sequence[float]
    :rtype: LinearFit
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    keep = ys > 0
    if np.count_nonzero(keep) < 2:
        return LinearFit(float("nan"), float("nan"), float("nan"), int(np.count_nonzero(keep)))
    fit = stats.linregress(xs[keep], np.log(ys[keep]))
    return LinearFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), int(np.count_nonzero(keep)))


def chi_square_uniform(counts: Sequence[int]) -> Tuple[float, float]:
    """
    Pearson chi-square test of equal cell probabilities.

    :return: ``(statistic, p_value)``.
    :rtype: Tuple[float, float]
    """
    result = stats.chisquare(np.asarray(counts, dtype=np.float64))
    return float(result.statistic), float(result.pvalue)


def within_sigmas(value: float, target: float, std_error: float, sigmas: float = 3.0) -> bool:
    return abs(value - target) <= sigmas * std_error


def intervals_disjoint(mean_a: float, error_a: float, mean_b: float, error_b: float, sigmas: float = 3.0) -> bool:
    """
    Returns true if the ``sigmas``-wide intervals around the two means do not overlap.
    """
    return mean_a - sigmas * error_a > mean_b + sigmas * error_b or mean_b - sigmas * error_b > mean_a + sigmas * error_a
