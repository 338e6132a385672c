"""Steady-state excess mean square error (EMSE) predictions and estimates.

For a filter of the form ``w <- w + mu f(e) G u`` with
``f(e) = exp(-e^2 / 2 sigma^2) e`` the energy-conservation argument gives the
steady-state balance ``E[e_a f(e)] = mu/2 Tr(S) E[f(e)^2]`` with
``S = E[G^1/2 u u^T G^1/2]``.  Two closed forms follow:

* Gaussian noise of variance ``v``: the implicit equation solved by
  :func:`emse_gaussian`.
* Arbitrary noise: the explicit ratio of noise expectations in
  :func:`emse_impulsive`, evaluated here for the Bernoulli-Gaussian mixture.

``sigma = inf`` is accepted everywhere and yields the LMS results.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NoFixedPointError, NumericDomainError, UnstableOperatingPointError


def _db(x):
    return 10.0 * math.log10(x) if x > 0.0 else -math.inf


@dataclass(frozen=True)
class SteadyStateProblem:
    mu: float
    trace_S: float
    sigma_v_sq: float
    sigma: float = 1.25

    def __post_init__(self):
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise NumericDomainError("mu must be positive and finite")
        if not (self.trace_S > 0.0 and math.isfinite(self.trace_S)):
            raise NumericDomainError("trace_S must be positive and finite")
        if not (self.sigma_v_sq >= 0.0 and math.isfinite(self.sigma_v_sq)):
            raise NumericDomainError("sigma_v_sq must be non-negative and finite")
        if not self.sigma > 0.0:
            raise NumericDomainError("sigma must be positive")


@dataclass(frozen=True)
class EmseEstimate:
    """EMSE value with its dB form and provenance counters.

    ``samples_used`` is the number of fixed-point iterations for theory values
    and the number of averaged a-priori errors for empirical ones.
    """

    xi: float
    samples_used: int
    converged: bool

    @property
    def xi_db(self):
        return _db(self.xi)


def trace_s_white(n_taps, sigma_u_sq):
    """``Tr(S) = L sigma_u^2`` for white input with gains averaging to one."""
    if n_taps < 1 or not sigma_u_sq > 0.0:
        raise NumericDomainError("need n_taps >= 1 and sigma_u_sq > 0")
    return n_taps * sigma_u_sq


def estimate_trace_s(gains, regressors):
    """Time average of ``u^T G u``, the empirical ``Tr(S)``.

    ``gains`` and ``regressors`` have shape ``(n, L)`` (or broadcast to it);
    pass ``gains=1`` for non-proportionate filters.
    """
    gains = np.asarray(gains, dtype=np.float64)
    u = np.asarray(regressors, dtype=np.float64)
    return float(np.mean(np.sum(gains * u * u, axis=-1)))


def gaussian_rhs(xi, problem):
    """Right-hand side of the Gaussian-noise EMSE equation."""
    total = xi + problem.sigma_v_sq
    lead = 0.5 * problem.mu * problem.trace_S * total
    if math.isinf(problem.sigma):
        return lead
    s2 = problem.sigma * problem.sigma
    return lead * ((total + s2) / (2.0 * total + s2)) ** 1.5


def emse_gaussian(problem, damping=0.5, max_iter=10_000, rtol=1e-12):
    """Smallest non-negative fixed point of the Gaussian-noise EMSE equation.

    Damped fixed-point iteration from zero, stopping once successive iterates
    differ by at most ``rtol * max(xi, sigma_v_sq)``.  If the iteration stalls
    or runs away, a bracketing bisection on ``xi - rhs(xi)`` takes over.

    Raises
    ------
    NoFixedPointError
        When no bracket can be found, i.e. the step size is too large for a
        steady state to exist.
    """
    v = problem.sigma_v_sq
    xi = 0.0
    for k in range(1, max_iter + 1):
        nxt = (1.0 - damping) * xi + damping * gaussian_rhs(xi, problem)
        if not math.isfinite(nxt):
            break
        if abs(nxt - xi) <= rtol * max(xi, v):
            return EmseEstimate(nxt, k, True)
        xi = nxt
    return _bisect_emse(problem, rtol)


def _bisect_emse(problem, rtol):
    v = problem.sigma_v_sq

    def g(x):
        return x - gaussian_rhs(x, problem)

    hi = max(v, 1e-300)
    while g(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise NoFixedPointError(
                f"no steady-state EMSE for mu={problem.mu}, Tr(S)={problem.trace_S}: "
                f"xi - rhs(xi) stays non-positive up to {hi:.3g}"
            )
    lo = 0.0
    steps = 0
    while hi - lo > rtol * max(lo, v) and steps < 2000:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        steps += 1
    return EmseEstimate(0.5 * (lo + hi), steps, True)


def mixture_expectations(noise, sigma):
    """Closed-form noise expectations for the impulsive EMSE formula.

    Returns ``(E[exp(-v^2/sigma^2) v^2], E[exp(-v^2/2sigma^2)(1 - v^2/sigma^2)])``
    for ``v`` drawn from the Bernoulli-Gaussian mixture.  For a single
    ``N(0, s)`` component these are ``s (1 + 2s/sigma^2)^-3/2`` and
    ``(1 + s/sigma^2)^-1/2 - (s/sigma^2)(1 + s/sigma^2)^-3/2``; the latter is
    evaluated in the equivalent cancellation-free form ``(1 + s/sigma^2)^-3/2``.
    """
    if math.isinf(sigma):
        return noise.total_variance, 1.0
    s2 = sigma * sigma
    num = 0.0
    den = 0.0
    for weight, var in noise.components():
        if weight == 0.0:
            continue
        num += weight * var * (1.0 + 2.0 * var / s2) ** -1.5
        den += weight * (1.0 + var / s2) ** -1.5
    return num, den


def emse_impulsive(problem, noise):
    """EMSE under the Bernoulli-Gaussian mixture ``noise``.

    Uses ``problem.mu``, ``problem.trace_S`` and ``problem.sigma``; the noise
    distribution comes from ``noise`` rather than ``problem.sigma_v_sq``.
    """
    num, den = mixture_expectations(noise, problem.sigma)
    if not den > 0.0:
        raise UnstableOperatingPointError(
            f"kernel width sigma={problem.sigma} is too small for this noise mixture "
            f"(denominator expectation {den:.3g} <= 0)"
        )
    return EmseEstimate(0.5 * problem.mu * problem.trace_S * num / den, 0, True)


def emse_prediction(problem, noise=None):
    """Pick the Gaussian or impulsive formula depending on ``noise``."""
    if noise is None or noise.is_gaussian:
        return emse_gaussian(problem)
    return emse_impulsive(problem, noise)


def emse_from_apriori(ea, window, drift_tol=0.25):
    """EMSE from a-priori errors ``ea`` of shape ``(n,)`` or ``(runs, n)``.

    Averages ``ea**2`` over the last ``window`` time steps and all runs.  The
    estimate is flagged as not converged when the means of the two halves of
    the window differ by more than ``drift_tol`` (relative).
    """
    ea = np.atleast_2d(np.asarray(ea, dtype=np.float64))
    n = ea.shape[-1]
    if not 1 <= window <= n:
        raise NumericDomainError(f"window {window} must lie in [1, {n}]")
    tail = ea[:, n - window:] ** 2
    xi = float(np.mean(tail))
    half = window // 2
    converged = True
    if half >= 1:
        first, second = float(np.mean(tail[:, :half])), float(np.mean(tail[:, half:]))
        ref = max(first, second)
        converged = ref == 0.0 or abs(first - second) <= drift_tol * ref
    return EmseEstimate(xi, tail.size, converged)


def empirical_emse(w_opt, weights, regressors, window):
    """Mean of ``((w_opt - w(n))^T u(n))^2`` over the final ``window`` steps.

    Parameters
    ----------
    w_opt : array-like, shape (L,) or (n, L)
        True system, constant or per time step.
    weights, regressors : array-like, shape (n, L) or (runs, n, L)
        Filter weights ``w(n)`` before the update at step ``n`` and the
        regressor used at that step.
    window : int
        Number of trailing steps to average; must not exceed ``n``.
    """
    weights = np.asarray(weights, dtype=np.float64)
    regressors = np.asarray(regressors, dtype=np.float64)
    if weights.shape != regressors.shape:
        raise NumericDomainError("weights and regressors must have the same shape")
    if window > weights.shape[-2]:
        raise NumericDomainError(
            f"window {window} is longer than the trajectory ({weights.shape[-2]} steps)"
        )
    ea = np.sum((np.asarray(w_opt, dtype=np.float64) - weights) * regressors, axis=-1)
    return emse_from_apriori(ea, window)
