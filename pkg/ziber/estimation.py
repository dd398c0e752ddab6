"""Maximum-likelihood fitting of ZIBer models and Wald inference."""
import logging
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from scipy import linalg

from .exceptions import DegenerateResponseError, InvalidFitError, NonFiniteError, RankDeficiencyError
from .links import LinkKind, normal_quantile, std_normal_cdf
from .model import (
    Beta, log_likelihood, observed_information, per_observation_loglik, score, success_prob,
)
from .optimizer import bfgs_ascent

logger = logging.getLogger(__name__)

EIGENVALUE_FLOOR = 1e-10
BOUND_TOLERANCE = 1e-6
START_BOX = 2.0
START_EPS = 0.1
POLISH_STEPS = 3


@dataclass(frozen=True)
class FitConfig:
    max_iters: int = 500
    grad_tol: float = 1e-6
    n_restarts: int = 5
    eps_bounds: tuple = (-0.5, 0.95)
    seed: int = 0
    divergence_guard: float = 30.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError('max_iters must be at least 1')
        if not self.grad_tol > 0:
            raise ValueError('grad_tol must be positive')
        if self.n_restarts < 1:
            raise ValueError('n_restarts must be at least 1')
        lower, upper = self.eps_bounds
        if not lower < upper:
            raise ValueError(f'eps_bounds must be increasing, got {self.eps_bounds}')
        object.__setattr__(self, 'eps_bounds', (float(lower), float(upper)))

    @classmethod
    def from_settings(cls, **overrides):
        """Defaults from settings.ZIBER, then keyword overrides."""
        try:
            options = getattr(settings, 'ZIBER', {})
        except ImproperlyConfigured:
            options = {}
        values = {
            'max_iters': options.get('MAX_ITERS', cls.max_iters),
            'grad_tol': options.get('GRAD_TOL', cls.grad_tol),
            'n_restarts': options.get('N_RESTARTS', cls.n_restarts),
            'eps_bounds': tuple(options.get('EPS_BOUNDS', cls.eps_bounds)),
            'seed': options.get('SEED', cls.seed),
            'divergence_guard': options.get('DIVERGENCE_GUARD', cls.divergence_guard),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True, eq=False)
class FitResult:
    beta_hat: Beta
    ase: np.ndarray
    loglik: float
    per_obs_loglik: np.ndarray
    converged: bool
    boundary: bool
    iterations: int
    singular: bool = False
    restart: int = 0
    information: np.ndarray = field(default=None, repr=False)
    covariance: np.ndarray = field(default=None, repr=False)
    gradient: np.ndarray = field(default=None, repr=False)
    observed_zero_fraction: float = float('nan')
    predicted_zero_fraction: float = float('nan')

    @property
    def n(self):
        return self.per_obs_loglik.size

    @property
    def k(self):
        return self.beta_hat.k

    @property
    def names(self):
        return self.beta_hat.names

    @property
    def ase_valid(self):
        return (
            self.converged
            and not self.singular
            and bool(np.all(np.isfinite(self.ase)))
            and bool(np.all(self.ase > 0))
        )


@dataclass(frozen=True)
class WaldRow:
    name: str
    estimate: float
    ase: float
    lower: float
    upper: float
    z: float
    p_value: float


def _check_response(data, k):
    if data.n <= k:
        raise RankDeficiencyError(f'{data.n} observations cannot identify {k} parameters')
    ones = int(data.y.sum())
    if ones == 0:
        raise DegenerateResponseError('every response is 0; the SP submodel is not identified')
    if ones == data.n:
        raise DegenerateResponseError('every response is 1; the model is not identified')


def _bounds(template, config):
    lower = np.full(template.k, -np.inf)
    upper = np.full(template.k, np.inf)
    if template.estimates_eps:
        lower[-1], upper[-1] = config.eps_bounds
    return lower, upper


def starting_points(template, config):
    """Restart 0 at zero (eps = 0.1); the rest uniform on [-2, 2]^k, eps within bounds."""
    rng = np.random.Generator(np.random.Philox(config.seed))
    lower, upper = config.eps_bounds
    first = np.zeros(template.k)
    if template.estimates_eps:
        first[-1] = min(max(START_EPS, lower), upper)
    points = [first]
    for _ in range(1, config.n_restarts):
        point = rng.uniform(-START_BOX, START_BOX, size=template.k)
        if template.estimates_eps:
            point[-1] = rng.uniform(lower, upper)
        points.append(point)
    return points


def invert_information(information):
    """Cholesky inverse; eigenvalue-floored inverse and singular=True on failure."""
    try:
        factor = linalg.cho_factor(information, lower=True)
        covariance = linalg.cho_solve(factor, np.eye(information.shape[0]))
        return covariance, False
    except linalg.LinAlgError:
        values, vectors = linalg.eigh(information)
        floored = np.maximum(values, EIGENVALUE_FLOOR)
        return (vectors / floored) @ vectors.T, True


def _polish(beta, data, value, lower, upper, grad_tol):
    """Newton steps from the observed information, kept only when l does not
    drop and the score shrinks."""
    theta = beta.pack()
    try:
        gradient = score(beta, data)
    except NonFiniteError:
        return beta, value, np.full(theta.size, np.nan)
    for _ in range(POLISH_STEPS):
        if np.max(np.abs(gradient)) <= grad_tol * 1e-3:
            break
        try:
            factor = linalg.cho_factor(observed_information(beta, data), lower=True)
        except (linalg.LinAlgError, ValueError):
            break
        candidate = np.clip(theta + linalg.cho_solve(factor, gradient), lower, upper)
        candidate_beta = beta.replace_packed(candidate)
        candidate_value = log_likelihood(candidate_beta, data)
        if not np.isfinite(candidate_value) or candidate_value < value:
            break
        try:
            candidate_gradient = score(candidate_beta, data)
        except NonFiniteError:
            break
        if np.max(np.abs(candidate_gradient)) >= np.max(np.abs(gradient)):
            break
        theta, beta, value, gradient = candidate, candidate_beta, candidate_value, candidate_gradient
    return beta, value, gradient


def fit(data, link, config=None, *, sp_frozen=False, eps=None):
    """
    Maximize the log-likelihood over restarts and attach ASEs.

    `eps` fixes the GEV shape at a known value instead of estimating it.
    """
    config = config or FitConfig()
    link = LinkKind(link)
    template = Beta.zeros(
        data,
        link,
        sp_frozen=sp_frozen,
        eps=START_EPS if eps is None else eps,
        eps_fixed=eps is not None,
    )
    _check_response(data, template.k)
    lower, upper = _bounds(template, config)

    def objective(theta):
        return log_likelihood(template.replace_packed(theta), data)

    def gradient(theta):
        return score(template.replace_packed(theta), data)

    best, best_index = None, -1
    for index, start in enumerate(starting_points(template, config)):
        outcome = bfgs_ascent(
            objective,
            gradient,
            start,
            max_iters=config.max_iters,
            grad_tol=config.grad_tol,
            lower=lower,
            upper=upper,
            divergence_guard=config.divergence_guard,
        )
        if not np.isfinite(outcome.value):
            logger.debug('restart %d of %s fit starts at an impossible point; skipped', index, link.value)
            continue
        logger.debug(
            'restart %d: loglik=%.6f converged=%s iterations=%d',
            index, outcome.value, outcome.converged, outcome.iterations,
        )
        # Converged beats non-converged, then higher loglik; ties keep the lower index.
        if best is None or (outcome.converged, outcome.value) > (best.converged, best.value):
            best, best_index = outcome, index

    if best is None:
        raise InvalidFitError(f'no restart of the {link.value} fit reached a finite log-likelihood')

    beta_hat = template.replace_packed(best.theta)
    loglik, final_gradient = best.value, best.gradient
    # A stalled line search usually means rounding noise right at the optimum.
    if (best.converged or best.stalled) and not best.diverged:
        beta_hat, loglik, final_gradient = _polish(
            beta_hat, data, loglik, lower, upper, config.grad_tol
        )
    converged = bool(np.max(np.abs(final_gradient)) <= config.grad_tol)

    theta_hat = beta_hat.pack()
    boundary = bool(best.diverged or np.max(np.abs(theta_hat)) > config.divergence_guard)
    if beta_hat.estimates_eps:
        lo, hi = config.eps_bounds
        boundary |= bool(min(theta_hat[-1] - lo, hi - theta_hat[-1]) <= BOUND_TOLERANCE)

    try:
        information = observed_information(beta_hat, data)
    except NonFiniteError:
        # A central-difference step left the support of the GEV link.
        information = np.full((beta_hat.k, beta_hat.k), np.nan)
    if np.all(np.isfinite(information)):
        covariance, singular = invert_information(information)
    else:
        covariance, singular = np.full_like(information, np.nan), True
    diagonal = np.diag(covariance)
    ase = np.sqrt(np.where(diagonal > 0, diagonal, np.nan))
    if singular:
        logger.warning('observed information of the %s fit is not positive definite', link.value)
    if not converged:
        logger.warning(
            '%s fit did not converge (max |score| = %.3g, boundary=%s)',
            link.value, float(np.max(np.abs(final_gradient))), boundary,
        )

    per_obs = per_observation_loglik(beta_hat, data)
    predicted_p = success_prob(beta_hat, data.design_x, data.design_z).p
    return FitResult(
        beta_hat=beta_hat,
        ase=ase,
        loglik=loglik,
        per_obs_loglik=per_obs,
        converged=converged,
        boundary=boundary,
        iterations=best.iterations,
        singular=singular,
        restart=best_index,
        information=information,
        covariance=covariance,
        gradient=final_gradient,
        observed_zero_fraction=float(np.mean(data.y == 0)),
        predicted_zero_fraction=float(np.mean(1.0 - predicted_p)),
    )


def wald_rows(names, estimates, ases, level=0.95):
    if not 0.0 < level < 1.0:
        raise ValueError(f'confidence level must lie in (0, 1), got {level!r}')
    ases = np.asarray(ases, dtype=float)
    if not (np.all(np.isfinite(ases)) and np.all(ases > 0)):
        raise InvalidFitError('standard errors must be finite and positive')
    critical = normal_quantile(0.5 * (1.0 + level))
    rows = []
    for name, estimate, ase in zip(names, estimates, ases):
        z = estimate / ase
        rows.append(WaldRow(
            name=name,
            estimate=float(estimate),
            ase=float(ase),
            lower=float(estimate - critical * ase),
            upper=float(estimate + critical * ase),
            z=float(z),
            p_value=float(2.0 * std_normal_cdf(-abs(z))),
        ))
    return rows


def wald(fit_result, level=0.95):
    """Per-parameter Wald intervals and two-sided p-values."""
    if not fit_result.ase_valid:
        raise InvalidFitError(
            'Wald inference needs a converged fit with a positive definite information matrix'
        )
    return wald_rows(fit_result.names, fit_result.beta_hat.pack(), fit_result.ase, level)


PLAIN_PREFIX = 'plain-'
PLAIN_LINKS = (LinkKind.LOGIT, LinkKind.PROBIT)
MODEL_LABELS = tuple(kind.value for kind in LinkKind) + tuple(PLAIN_PREFIX + kind.value for kind in PLAIN_LINKS)


def parse_model_label(label):
    """'probit' -> (PROBIT, False); 'plain-logit' -> (LOGIT, True)."""
    sp_frozen = label.startswith(PLAIN_PREFIX)
    name = label[len(PLAIN_PREFIX):] if sp_frozen else label
    if label not in MODEL_LABELS:
        raise ValueError(f'unknown model {label!r}; choose from {", ".join(MODEL_LABELS)}')
    return LinkKind(name), sp_frozen


def fit_model(data, label, config=None):
    """Fit a ZIBer model or a plain single-index baseline by its label."""
    link, sp_frozen = parse_model_label(label)
    return fit(data, link, config, sp_frozen=sp_frozen)
