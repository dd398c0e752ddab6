"""Vuong test between two fits on the same observations."""
import math
from dataclasses import dataclass

import numpy as np
from django.db import models

from .exceptions import DegenerateVuongError, DimensionMismatchError
from .links import std_normal_cdf

VUONG_THRESHOLD = 1.96


class VuongPreference(models.TextChoices):
    MODEL_A = 'model_a', 'Model A'
    MODEL_B = 'model_b', 'Model B'
    INDETERMINATE = 'indeterminate', 'Indeterminate'


@dataclass(frozen=True)
class VuongResult:
    statistic: float
    n: int
    mean_lr: float
    sd_lr: float
    preferred: VuongPreference

    @property
    def p_value(self):
        """Two-sided normal p-value of the statistic."""
        return float(2.0 * std_normal_cdf(-abs(self.statistic)))


def preference(statistic, threshold=VUONG_THRESHOLD):
    if statistic > threshold:
        return VuongPreference.MODEL_A
    if statistic < -threshold:
        return VuongPreference.MODEL_B
    return VuongPreference.INDETERMINATE


def vuong_statistic(loglik_a, loglik_b):
    """V = sqrt(n) mean(m) / sd(m) with m the pointwise log-likelihood ratio."""
    loglik_a = np.asarray(loglik_a, dtype=float).ravel()
    loglik_b = np.asarray(loglik_b, dtype=float).ravel()
    if loglik_a.shape != loglik_b.shape:
        raise DimensionMismatchError(
            f'per-observation log-likelihoods differ in length: {loglik_a.size} vs {loglik_b.size}'
        )
    n = loglik_a.size
    if n < 2:
        raise DimensionMismatchError('the Vuong test needs at least two observations')
    ratios = loglik_a - loglik_b
    mean_lr = math.fsum(ratios) / n
    sd_lr = float(np.std(ratios, ddof=1))

    if sd_lr == 0.0:
        if mean_lr != 0.0:
            raise DegenerateVuongError(
                f'log-likelihood ratio is the constant {mean_lr!r}; the models cannot both be proper'
            )
        statistic = 0.0
    else:
        statistic = math.sqrt(n) * mean_lr / sd_lr
    return VuongResult(
        statistic=statistic,
        n=n,
        mean_lr=mean_lr,
        sd_lr=sd_lr,
        preferred=preference(statistic),
    )


def vuong(fit_a, fit_b, n=None):
    """Compare two fits; `n`, when given, must match both fits."""
    for fit_result in (fit_a, fit_b):
        if n is not None and fit_result.per_obs_loglik.size != n:
            raise DimensionMismatchError(
                f'fit has {fit_result.per_obs_loglik.size} observations, expected {n}'
            )
    return vuong_statistic(fit_a.per_obs_loglik, fit_b.per_obs_loglik)
