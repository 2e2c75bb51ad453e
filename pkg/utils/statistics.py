# utils/statistics.py
import math
from typing import Optional, Sequence

import numpy as np
from scipy.stats import ttest_ind

from core.errors import SampleTooSmall


def round_significant(value: Optional[float], digits: int) -> Optional[float]:
    """Rounds to `digits` significant digits; None stays None."""
    if value is None:
        return None
    return float(f"{value:.{digits}g}")


def sample_mean(values: Sequence[float]) -> float:
    return float(np.mean(np.asarray(values, dtype=np.float64)))


def sample_variance(values: Sequence[float]) -> float:
    """Unbiased (n-1) sample variance; needs at least two values."""
    if len(values) < 2:
        raise SampleTooSmall("Sample variance needs at least two values.")
    return float(np.var(np.asarray(values, dtype=np.float64), ddof=1))


def welch_p_value(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """
    Two-sided Welch (unequal variance) t-test p-value. When both samples have
    zero variance the t statistic is undefined: equal means give 1.0 and
    different means 0.0.
    """
    if len(sample_a) < 2 or len(sample_b) < 2:
        raise SampleTooSmall("Welch's test needs at least two values per sample.")

    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if np.var(a) == 0.0 and np.var(b) == 0.0:
        return 1.0 if a[0] == b[0] else 0.0

    p_value = float(ttest_ind(a, b, equal_var=False).pvalue)
    if math.isnan(p_value):
        return 1.0
    return p_value
