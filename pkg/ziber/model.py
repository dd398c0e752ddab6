"""
Zero-inflated Bernoulli (ZIBer) regression.

P(Y=1 | X, Z) = omega(gamma'Zc) * H(eta'Xc), where omega is the
susceptible-probability link, H the logistic CDF, Zc = (1, Z) and
Xc = (1, X, Z[event columns]).
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import special

from .exceptions import DimensionMismatchError, NonFiniteError
from .links import LinkKind, link_log_prob, link_log_terms, link_prob

logger = logging.getLogger(__name__)


def _as_matrix(values, n, name):
    if values is None:
        return np.zeros((n, 0))
    matrix = np.array(values, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    if matrix.ndim != 2 or matrix.shape[0] != n:
        raise DimensionMismatchError(f'{name} must have {n} rows, got shape {matrix.shape}')
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError(f'{name} contains non-finite values')
    return matrix


@dataclass(frozen=True, eq=False)
class Dataset:
    """Responses plus raw covariates; design views are derived and cached."""

    y: np.ndarray
    x_raw: np.ndarray = None
    z_raw: np.ndarray = None
    x_names: tuple = ()
    z_names: tuple = ()
    event_z_columns: tuple = None

    def __post_init__(self):
        y = np.array(self.y, dtype=float).ravel()
        if y.size < 1:
            raise DimensionMismatchError('a dataset needs at least one observation')
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ValueError('responses must be exactly 0 or 1')
        n = y.size
        x_raw = _as_matrix(self.x_raw, n, 'x_raw')
        z_raw = _as_matrix(self.z_raw, n, 'z_raw')

        x_names = tuple(self.x_names) or tuple(f'X{j + 1}' for j in range(x_raw.shape[1]))
        z_names = tuple(self.z_names) or tuple(f'Z{j + 1}' for j in range(z_raw.shape[1]))
        if len(x_names) != x_raw.shape[1] or len(z_names) != z_raw.shape[1]:
            raise DimensionMismatchError('column names do not match the covariate matrices')

        if self.event_z_columns is None:
            event_z_columns = tuple(range(z_raw.shape[1]))
        else:
            event_z_columns = tuple(int(c) for c in self.event_z_columns)
            if any(c < 0 or c >= z_raw.shape[1] for c in event_z_columns):
                raise DimensionMismatchError(
                    f'event_z_columns {event_z_columns} out of range for {z_raw.shape[1]} Z columns'
                )

        for array in (y, x_raw, z_raw):
            array.setflags(write=False)
        object.__setattr__(self, 'y', y)
        object.__setattr__(self, 'x_raw', x_raw)
        object.__setattr__(self, 'z_raw', z_raw)
        object.__setattr__(self, 'x_names', x_names)
        object.__setattr__(self, 'z_names', z_names)
        object.__setattr__(self, 'event_z_columns', event_z_columns)

    @property
    def n(self):
        return self.y.size

    @property
    def a(self):
        return self.x_raw.shape[1]

    @property
    def b(self):
        return self.z_raw.shape[1]

    @cached_property
    def design_z(self):
        design = np.column_stack([np.ones(self.n), self.z_raw])
        design.setflags(write=False)
        return design

    @cached_property
    def design_x(self):
        design = np.column_stack(
            [np.ones(self.n), self.x_raw, self.z_raw[:, list(self.event_z_columns)]]
        )
        design.setflags(write=False)
        return design

    @property
    def sp_labels(self):
        return ('Intercept',) + self.z_names

    @property
    def event_labels(self):
        return ('Intercept',) + self.x_names + tuple(self.z_names[c] for c in self.event_z_columns)

    def take(self, index):
        """Rows `index` in the given order, e.g. a permutation."""
        index = np.asarray(index)
        return Dataset(
            y=self.y[index],
            x_raw=self.x_raw[index],
            z_raw=self.z_raw[index],
            x_names=self.x_names,
            z_names=self.z_names,
            event_z_columns=self.event_z_columns,
        )


@dataclass(frozen=True, eq=False)
class Beta:
    """
    Packed parameter (gamma, eta[, eps]).

    With sp_frozen the SP factor is held at omega = 1 and the named link is
    applied to eta'Xc instead (plain single-index baselines); gamma is empty.
    With eps_fixed a GEV shape is carried but not estimated.
    """

    gamma: np.ndarray
    eta: np.ndarray
    link: LinkKind
    eps: float = None
    sp_frozen: bool = False
    eps_fixed: bool = False

    def __post_init__(self):
        link = LinkKind(self.link)
        gamma = np.array(self.gamma, dtype=float, ndmin=1).ravel()
        eta = np.array(self.eta, dtype=float, ndmin=1).ravel()
        if self.sp_frozen:
            gamma = gamma[:0]
        elif gamma.size < 1:
            raise DimensionMismatchError('gamma needs at least the intercept')
        if eta.size < 1:
            raise DimensionMismatchError('eta needs at least the intercept')
        if (link == LinkKind.GEV) != (self.eps is not None):
            raise ValueError('eps must be given exactly when the link is GEV')
        object.__setattr__(self, 'link', link)
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'eta', eta)
        if self.eps is not None:
            object.__setattr__(self, 'eps', float(self.eps))

    @property
    def estimates_eps(self):
        return self.eps is not None and not self.eps_fixed

    @property
    def k(self):
        return self.gamma.size + self.eta.size + int(self.estimates_eps)

    @property
    def names(self):
        names = [f'gamma_{j}' for j in range(self.gamma.size)]
        names += [f'eta_{j}' for j in range(self.eta.size)]
        if self.estimates_eps:
            names.append('epsilon')
        return tuple(names)

    def pack(self):
        parts = [self.gamma, self.eta]
        if self.estimates_eps:
            parts.append([self.eps])
        return np.concatenate(parts)

    def replace_packed(self, theta):
        """A Beta of the same layout holding the packed vector `theta`."""
        theta = np.asarray(theta, dtype=float)
        if theta.size != self.k:
            raise DimensionMismatchError(f'expected {self.k} parameters, got {theta.size}')
        n_gamma, n_eta = self.gamma.size, self.eta.size
        eps = theta[-1] if self.estimates_eps else self.eps
        return Beta(
            gamma=theta[:n_gamma],
            eta=theta[n_gamma:n_gamma + n_eta],
            link=self.link,
            eps=eps,
            sp_frozen=self.sp_frozen,
            eps_fixed=self.eps_fixed,
        )

    @classmethod
    def zeros(cls, data, link, *, sp_frozen=False, eps=0.1, eps_fixed=False):
        link = LinkKind(link)
        return cls(
            gamma=np.zeros(0 if sp_frozen else data.b + 1),
            eta=np.zeros(data.design_x.shape[1]),
            link=link,
            eps=eps if link == LinkKind.GEV else None,
            sp_frozen=sp_frozen,
            eps_fixed=eps_fixed,
        )

    def check_dimensions(self, design_x, design_z):
        if design_x.shape[-1] != self.eta.size:
            raise DimensionMismatchError(
                f'eta has {self.eta.size} entries but the event design has {design_x.shape[-1]} columns'
            )
        if not self.sp_frozen and design_z.shape[-1] != self.gamma.size:
            raise DimensionMismatchError(
                f'gamma has {self.gamma.size} entries but the SP design has {design_z.shape[-1]} columns'
            )


@dataclass(frozen=True, eq=False)
class PerObsEval:
    p: np.ndarray
    omega: np.ndarray
    h: np.ndarray
    loglik: np.ndarray = field(default=None)


def _predictors(beta, design_x, design_z):
    beta.check_dimensions(design_x, design_z)
    event = design_x @ beta.eta
    sp = None if beta.sp_frozen else design_z @ beta.gamma
    return sp, event


def success_prob(beta, xi, zi, y=None):
    """Mixture probability for design rows (one row or a matrix of rows)."""
    xi = np.asarray(xi, dtype=float)
    zi = np.asarray(zi, dtype=float)
    sp, event = _predictors(beta, xi, zi)
    if beta.sp_frozen:
        omega = np.ones_like(event)
        h = link_prob(beta.link, event, beta.eps).prob
    else:
        omega = link_prob(beta.link, sp, beta.eps).prob
        h = special.expit(event)
    p = omega * h
    loglik = None
    if y is not None:
        y = np.asarray(y, dtype=float)
        with np.errstate(divide='ignore'):
            loglik = np.where(y == 1.0, np.log(p), np.log1p(-p))
    return PerObsEval(p=p, omega=omega, h=h, loglik=loglik)


def per_observation_loglik(beta, data):
    """
    Per-observation log-likelihood in the link-specific algebraic forms.

    logit:  y(a + b) + (1 - y) log(1 + e^a + e^b) - log(1 + e^a) - log(1 + e^b)
    others: y(b + log omega) + (1 - y) log(1 + (1 - omega) e^b) - log(1 + e^b)
    with a = gamma'Zc and b = eta'Xc.
    """
    sp, event = _predictors(beta, data.design_x, data.design_z)
    y = data.y

    with np.errstate(divide='ignore', invalid='ignore'):
        if beta.sp_frozen:
            log_p, log_q = link_log_prob(beta.link, event, beta.eps)
            loglik = np.where(y == 1.0, log_p, log_q)
        elif beta.link == LinkKind.LOGIT:
            log_1pa = np.logaddexp(0.0, sp)
            log_1pb = np.logaddexp(0.0, event)
            log_1pab = np.logaddexp(log_1pa, event)
            loglik = np.where(y == 1.0, sp + event, log_1pab) - log_1pa - log_1pb
        else:
            log_omega, log_comp = link_log_prob(beta.link, sp, beta.eps)
            log_1pb = np.logaddexp(0.0, event)
            loglik = np.where(
                y == 1.0,
                event + log_omega,
                np.logaddexp(0.0, log_comp + event),
            ) - log_1pb
    return np.asarray(loglik, dtype=float)


def log_likelihood(beta, data):
    """Sum of per-observation terms; -inf when some observation is impossible."""
    terms = per_observation_loglik(beta, data)
    if np.any(np.isnan(terms)) or np.any(terms == -np.inf):
        return -math.inf
    return math.fsum(terms)


def _require_finite(beta, data):
    theta = beta.pack()
    if not np.all(np.isfinite(theta)):
        raise NonFiniteError(f'parameter vector is not finite: {theta}')
    terms = per_observation_loglik(beta, data)
    if not np.all(np.isfinite(terms)):
        raise NonFiniteError('log-likelihood is -inf at this parameter')


def chain_rule_contributions(beta, data):
    """
    n x k matrix of per-observation gradients via dl/dp * dp/dtheta.

    Each factor is taken in the log domain: y = 1 rows use d log p and
    y = 0 rows d log(1 - p), so underflowing probabilities stay finite.
    """
    _require_finite(beta, data)
    design_x, design_z, y = data.design_x, data.design_z, data.y
    sp, event = _predictors(beta, design_x, design_z)
    success = y == 1.0

    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        if beta.sp_frozen:
            terms = link_log_terms(beta.link, event, beta.eps)
            d_event = np.where(
                success,
                np.exp(terms.log_slope - terms.log_prob),
                -np.exp(terms.log_slope - terms.log_comp),
            )
            d_sp = None
            d_eps = d_event * terms.eps_factor
        else:
            terms = link_log_terms(beta.link, sp, beta.eps)
            log_h, log_h_comp = special.log_expit(event), special.log_expit(-event)
            # log(1 - omega * h) = log(1 - h + (1 - omega) h)
            log_q = np.logaddexp(log_h_comp, terms.log_comp + log_h)
            d_sp = np.where(
                success,
                np.exp(terms.log_slope - terms.log_prob),
                -np.exp(log_h + terms.log_slope - log_q),
            )
            d_event = np.where(
                success,
                np.exp(log_h_comp),
                -np.exp(terms.log_prob + log_h + log_h_comp - log_q),
            )
            d_eps = d_sp * terms.eps_factor

    blocks = []
    if d_sp is not None:
        blocks.append(design_z * d_sp[:, None])
    blocks.append(design_x * d_event[:, None])
    if beta.estimates_eps:
        blocks.append(d_eps[:, None])
    contributions = np.hstack(blocks)
    if not np.all(np.isfinite(contributions)):
        raise NonFiniteError('score is not finite at this parameter')
    return contributions


def logit_contributions(beta, data):
    """
    Closed-form per-observation score of the logit-ZIBer model:
    D_i1 = Zc B_i1 (y - p), D_i2 = Xc B_i2 (y - p).
    """
    if beta.link != LinkKind.LOGIT or beta.sp_frozen:
        raise ValueError('the closed-form score applies to the logit-ZIBer model only')
    _require_finite(beta, data)
    sp, event = _predictors(beta, data.design_x, data.design_z)
    log_denominator = np.logaddexp(np.logaddexp(0.0, sp), event)
    b1 = np.exp(np.logaddexp(0.0, event) - log_denominator)
    b2 = np.exp(np.logaddexp(0.0, sp) - log_denominator)
    residual = data.y - special.expit(sp) * special.expit(event)
    return np.hstack([
        data.design_z * (b1 * residual)[:, None],
        data.design_x * (b2 * residual)[:, None],
    ])


def score_contributions(beta, data):
    if beta.link == LinkKind.LOGIT and not beta.sp_frozen:
        return logit_contributions(beta, data)
    return chain_rule_contributions(beta, data)


def chain_rule_score(beta, data):
    return chain_rule_contributions(beta, data).sum(axis=0)


def score(beta, data):
    """Gradient of the (unnormalized) log-likelihood, packed like Beta.pack()."""
    return score_contributions(beta, data).sum(axis=0)


def observed_information(beta, data=None, gradient=None):
    """
    -d2l/dbeta dbeta' by central differences of the score, symmetrized.

    `gradient` replaces the score with any callable of the packed vector.
    """
    theta = beta.pack()
    if gradient is None:
        def gradient(packed):
            return score(beta.replace_packed(packed), data)

    k = theta.size
    matrix = np.empty((k, k))
    for j in range(k):
        step = max(1e-5, 1e-5 * abs(theta[j]))
        offset = np.zeros(k)
        offset[j] = step
        matrix[:, j] = -(gradient(theta + offset) - gradient(theta - offset)) / (2.0 * step)
    return 0.5 * (matrix + matrix.T)
