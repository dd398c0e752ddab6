"""BFGS ascent with a projected backtracking (Armijo) line search."""
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NonFiniteError

logger = logging.getLogger(__name__)


@dataclass
class AscentResult:
    theta: np.ndarray
    value: float
    gradient: np.ndarray
    iterations: int
    converged: bool
    stalled: bool = False
    diverged: bool = False
    history: list = field(default_factory=list)


def projected_gradient(theta, gradient, lower, upper):
    """Zero the components that push against an active bound."""
    pinned = ((theta <= lower) & (gradient < 0)) | ((theta >= upper) & (gradient > 0))
    return np.where(pinned, 0.0, gradient)


def armijo_backtrack(fun, theta, value, gradient, direction, project,
                     c1=1e-4, shrink=0.5, max_backtracks=60):
    """
    Largest alpha in {1, shrink, shrink^2, ...} with
    f(P(x + alpha p)) >= f(x) + c1 * max(g'(P(x + alpha p) - x), 0).

    Never returns a point with a lower objective; None when no step qualifies.
    """
    alpha = 1.0
    for _ in range(max_backtracks):
        candidate = project(theta + alpha * direction)
        step = candidate - theta
        if not np.any(step):
            return None
        try:
            candidate_value = fun(candidate)
        except NonFiniteError:
            candidate_value = -np.inf
        if np.isfinite(candidate_value) and \
                candidate_value >= value + c1 * max(float(gradient @ step), 0.0):
            return candidate, candidate_value
        alpha *= shrink
    return None


def _safe_gradient(grad, theta):
    """The gradient at theta, or None when it is not finite there."""
    try:
        gradient = np.asarray(grad(theta), dtype=float)
    except NonFiniteError:
        return None
    return gradient if np.all(np.isfinite(gradient)) else None


def bfgs_ascent(fun, grad, theta0, *, max_iters=500, grad_tol=1e-6,
                lower=None, upper=None, divergence_guard=np.inf):
    """Maximize `fun` from `theta0`; `grad` must return its gradient."""
    k = np.size(theta0)
    lower = np.full(k, -np.inf) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(k, np.inf) if upper is None else np.asarray(upper, dtype=float)

    def project(theta):
        return np.clip(theta, lower, upper)

    theta = project(np.asarray(theta0, dtype=float))
    value = fun(theta)
    if not np.isfinite(value):
        return AscentResult(theta, value, np.full(k, np.nan), 0, converged=False, stalled=True)

    gradient = _safe_gradient(grad, theta)
    if gradient is None:
        logger.debug('gradient is not finite at the starting point')
        return AscentResult(theta, value, np.full(k, np.nan), 0, converged=False, stalled=True,
                            history=[value])
    identity = np.eye(k)
    inverse_hessian = identity.copy()
    scaled = False
    history = [value]
    iterations = 0
    stalled = diverged = False

    while iterations < max_iters:
        if np.max(np.abs(projected_gradient(theta, gradient, lower, upper))) <= grad_tol:
            break
        direction = inverse_hessian @ gradient
        if gradient @ direction <= 0:
            inverse_hessian, scaled = identity.copy(), False
            direction = gradient.copy()

        accepted = armijo_backtrack(fun, theta, value, gradient, direction, project)
        if accepted is None and scaled:
            logger.debug('line search failed at iteration %d; resetting the BFGS matrix', iterations)
            inverse_hessian, scaled = identity.copy(), False
            accepted = armijo_backtrack(fun, theta, value, gradient, gradient, project)
        if accepted is None:
            stalled = True
            break

        candidate, candidate_value = accepted
        candidate_gradient = _safe_gradient(grad, candidate)
        if candidate_gradient is None:
            logger.debug('gradient is not finite at iteration %d; stopping', iterations)
            stalled = True
            break
        s = candidate - theta
        # Curvature of -f, so the update keeps the matrix positive definite.
        y = gradient - candidate_gradient
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if not scaled:
                inverse_hessian = (sy / float(y @ y)) * identity
                scaled = True
            rho = 1.0 / sy
            left = identity - rho * np.outer(s, y)
            inverse_hessian = left @ inverse_hessian @ left.T + rho * np.outer(s, s)

        theta, value, gradient = candidate, candidate_value, candidate_gradient
        history.append(value)
        iterations += 1
        if np.max(np.abs(theta)) > divergence_guard:
            diverged = True
            break

    converged = bool(np.max(np.abs(gradient)) <= grad_tol)
    return AscentResult(
        theta=theta,
        value=value,
        gradient=gradient,
        iterations=iterations,
        converged=converged,
        stalled=stalled,
        diverged=diverged,
        history=history,
    )
