"""
Susceptible-probability links and the special functions they need.

All functions accept scalars or numpy arrays and return the same shape;
0-d results come back as numpy scalars.
"""
from dataclasses import dataclass

import numpy as np
from django.db import models
from scipy import optimize, special

from .exceptions import NonFiniteError

# Below this |eps| the GEV CDF is evaluated through its Gumbel limit.
GUMBEL_SWITCH = 1e-8

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


class LinkKind(models.TextChoices):
    LOGIT = 'logit', 'Logit'
    PROBIT = 'probit', 'Probit'
    CLOGLOG = 'cloglog', 'Complementary log-log'
    GEV = 'gev', 'Generalized extreme value'


@dataclass(frozen=True)
class LinkEval:
    prob: np.ndarray
    dprob_dt: np.ndarray
    dprob_deps: np.ndarray


def _scalar_or_array(values):
    return values[()] if np.ndim(values) == 0 else values


def _check_arguments(kind, t, eps):
    kind = LinkKind(kind)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise NonFiniteError('linear predictor must be finite')
    if kind == LinkKind.GEV:
        if eps is None:
            raise ValueError('the GEV link needs a shape parameter eps')
        if not np.isfinite(eps):
            raise NonFiniteError(f'GEV shape must be finite, got {eps!r}')
    elif eps is not None:
        raise ValueError(f'the {kind.value} link takes no shape parameter')
    return kind, t


def std_normal_cdf(x):
    """Phi(x); the upper half is 1 - Phi(-x) so the two tails sum to one."""
    x = np.asarray(x, dtype=float)
    lower_tail = 0.5 * special.erfc(np.abs(x) * _INV_SQRT2)
    return _scalar_or_array(np.where(x <= 0.0, lower_tail, 1.0 - lower_tail))


def std_normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(_INV_SQRT2PI * np.exp(-0.5 * x * x))


def normal_quantile(q, xtol=1e-12):
    """Invert std_normal_cdf by bisection on [-40, 40]."""
    if not 0.0 < q < 1.0:
        raise ValueError(f'quantile level must lie in (0, 1), got {q!r}')
    return optimize.bisect(lambda x: std_normal_cdf(x) - q, -40.0, 40.0, xtol=xtol, maxiter=200)


def gev_cdf(x, eps):
    """GEV(x; 0, 1, eps) with the Gumbel limit for |eps| < GUMBEL_SWITCH."""
    x = np.asarray(x, dtype=float)
    if abs(eps) < GUMBEL_SWITCH:
        return _scalar_or_array(np.exp(-np.exp(-x)))
    inside = 1.0 + eps * x > 0.0
    with np.errstate(divide='ignore', over='ignore'):
        s = np.exp(-np.log1p(np.where(inside, eps * x, 0.0)) / eps)
    # Outside the support: below the lower end (eps > 0) or above the upper end (eps < 0).
    s = np.where(inside, s, np.inf if eps > 0 else 0.0)
    return _scalar_or_array(np.exp(-s))


def _gev_terms(t, eps):
    """
    omega = 1 - GEV(-t; eps) = -expm1(-s) with s = (1 - eps*t)_+^(-1/eps).

    Returns (s, u, inside) where u = 1 - eps*t.
    """
    if abs(eps) < GUMBEL_SWITCH:
        with np.errstate(over='ignore'):
            s = np.exp(t)
        return s, np.ones_like(t), np.ones_like(t, dtype=bool)
    u = 1.0 - eps * t
    inside = u > 0.0
    with np.errstate(divide='ignore', over='ignore'):
        s = np.exp(-np.log1p(np.where(inside, -eps * t, 0.0)) / eps)
    s = np.where(inside, s, np.inf if eps > 0 else 0.0)
    return s, u, inside


def link_prob(kind, t, eps=None):
    """Link probability and its derivatives in t and (GEV only) eps."""
    kind, t = _check_arguments(kind, t, eps)
    zeros = np.zeros_like(t)

    if kind == LinkKind.LOGIT:
        prob = special.expit(t)
        dprob_dt = prob * special.expit(-t)
        dprob_deps = zeros
    elif kind == LinkKind.PROBIT:
        prob = np.asarray(std_normal_cdf(t))
        dprob_dt = np.asarray(std_normal_pdf(t))
        dprob_deps = zeros
    elif kind == LinkKind.CLOGLOG:
        with np.errstate(over='ignore', invalid='ignore'):
            rate = np.exp(-t)
            prob = np.exp(-rate)
            dprob_dt = np.where(prob > 0.0, prob * rate, 0.0)
        dprob_deps = zeros
    else:
        s, u, inside = _gev_terms(t, eps)
        survival = np.exp(-s)
        prob = -np.expm1(-s)
        live = inside & (survival > 0.0) & np.isfinite(s)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            if abs(eps) < GUMBEL_SWITCH:
                dprob_dt = np.where(live, survival * s, 0.0)
                dprob_deps = np.where(live, survival * s * 0.5 * t * t, 0.0)
            else:
                safe_u = np.where(inside, u, 1.0)
                dprob_dt = np.where(live, survival * s / safe_u, 0.0)
                log_u = np.log1p(np.where(inside, -eps * t, 0.0))
                dlog_s = log_u / (eps * eps) + t / (eps * safe_u)
                dprob_deps = np.where(live, survival * s * dlog_s, 0.0)

    return LinkEval(
        prob=_scalar_or_array(prob),
        dprob_dt=_scalar_or_array(dprob_dt),
        dprob_deps=_scalar_or_array(dprob_deps),
    )


def link_log_prob(kind, t, eps=None):
    """(log omega, log(1 - omega)) evaluated without forming 1 - omega."""
    kind, t = _check_arguments(kind, t, eps)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        if kind == LinkKind.LOGIT:
            log_prob, log_comp = special.log_expit(t), special.log_expit(-t)
        elif kind == LinkKind.PROBIT:
            log_prob, log_comp = special.log_ndtr(t), special.log_ndtr(-t)
        elif kind == LinkKind.CLOGLOG:
            rate = np.exp(-t)
            log_prob = -rate
            log_comp = np.log(-np.expm1(-rate))
        else:
            s, _, _ = _gev_terms(t, eps)
            log_prob = np.log(-np.expm1(-s))
            log_comp = -s
    return _scalar_or_array(log_prob), _scalar_or_array(log_comp)


@dataclass(frozen=True)
class LinkLogEval:
    """
    Log-domain link terms for the score.

    log_slope is log(domega/dt); eps_factor is (domega/deps) / (domega/dt),
    zero where the slope vanishes or the link has no shape.
    """

    log_prob: np.ndarray
    log_comp: np.ndarray
    log_slope: np.ndarray
    eps_factor: np.ndarray


def link_log_terms(kind, t, eps=None):
    """log omega, log(1 - omega), log of the t-slope and the eps/t slope ratio."""
    kind, t = _check_arguments(kind, t, eps)
    log_prob, log_comp = link_log_prob(kind, t, eps)
    eps_factor = np.zeros_like(t)

    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        if kind == LinkKind.LOGIT:
            log_slope = special.log_expit(t) + special.log_expit(-t)
        elif kind == LinkKind.PROBIT:
            log_slope = -0.5 * t * t + np.log(_INV_SQRT2PI)
        elif kind == LinkKind.CLOGLOG:
            log_slope = -t - np.exp(-t)
        elif abs(eps) < GUMBEL_SWITCH:
            log_slope = t - np.exp(t)
            eps_factor = 0.5 * t * t
        else:
            u = 1.0 - eps * t
            inside = u > 0.0
            safe_u = np.where(inside, u, 1.0)
            log_u = np.log1p(np.where(inside, -eps * t, 0.0))
            log_s = -log_u / eps
            log_slope = np.where(inside, log_s - np.exp(log_s) - log_u, -np.inf)
            dlog_s = log_u / (eps * eps) + t / (eps * safe_u)
            eps_factor = np.where(inside & np.isfinite(log_slope), safe_u * dlog_s, 0.0)

    return LinkLogEval(
        log_prob=_scalar_or_array(np.asarray(log_prob, dtype=float)),
        log_comp=_scalar_or_array(np.asarray(log_comp, dtype=float)),
        log_slope=_scalar_or_array(np.asarray(log_slope, dtype=float)),
        eps_factor=_scalar_or_array(np.asarray(eps_factor, dtype=float)),
    )
