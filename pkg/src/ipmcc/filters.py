"""Per-sample update rules for the correntropy family of adaptive filters.

Two layers live here.

* Unchecked array kernels (``output``, ``lms_update``, ``mcc_update``,
  ``pmcc_update``, ``ipmcc_update``).  They take tap vectors of shape
  ``(L,)`` or batches ``(R, L)`` and are what the estimators and the Monte
  Carlo harness call in their inner loops.
* Checked state transitions on :class:`FilterState` (``predict_and_error``,
  ``lms_step``, ``mcc_step``, ``pmcc_step``, ``ipmcc_step``) that validate
  their inputs and return a new state.

Every update has the form ``w <- w + mu * f(e) * (g * u)`` where
``f(e) = exp(-e^2 / (2 sigma^2)) * e`` and ``g`` is all ones except for the
proportionate variants.  The kernel factor is evaluated directly; for
``|e| / sigma`` above roughly 40 it underflows to zero and the update is
suppressed, which is the intended limit.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import NumericDomainError, StructuralError
from .gains import check_gain_params, iplms_coefficients, proportionate_gains


class Variant(str, Enum):
    """Filter variants known to the harness."""

    LMS = "lms"
    MCC = "mcc"
    PMCC = "pmcc"
    IPMCC = "ipmcc"


@dataclass(frozen=True)
class FilterParams:
    """Step size, kernel width and proportionate-gain settings.

    ``sigma`` may be ``inf``, which turns MCC into LMS exactly.
    """

    mu: float
    sigma: float = 1.25
    alpha: float = 0.0
    epsilon_p: float = 0.01

    def __post_init__(self):
        if not (self.mu > 0.0 and np.isfinite(self.mu)):
            raise NumericDomainError(f"mu must be positive and finite, got {self.mu!r}")
        if not self.sigma > 0.0:
            raise NumericDomainError(f"sigma must be positive, got {self.sigma!r}")
        check_gain_params(self.alpha, self.epsilon_p)

    @property
    def kernel_coef(self):
        """``-1 / (2 sigma^2)``, the exponent scale of the correntropy kernel."""
        return -0.5 / (self.sigma * self.sigma)


def _as_taps(values):
    arr = np.asarray(values)
    # object arrays pass through so instrumented scalar types can be traced
    if arr.dtype != object:
        arr = arr.astype(np.float64, copy=True)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise StructuralError(f"expected a non-empty 1-D tap vector, got shape {arr.shape}")
    return arr


def _require_finite(value, what):
    if not np.all(np.isfinite(np.asarray(value, dtype=np.float64))):
        raise NumericDomainError(f"{what} contains non-finite values")


@dataclass(frozen=True)
class FilterState:
    """Weights, tapped-delay-line regressor (newest sample first) and step count."""

    w: np.ndarray
    regressor: np.ndarray
    iteration: int = 0

    def __post_init__(self):
        w = _as_taps(self.w)
        u = _as_taps(self.regressor)
        if w.shape != u.shape:
            raise StructuralError(
                f"weights have length {w.shape[0]} but regressor has {u.shape[0]}"
            )
        if self.iteration < 0:
            raise NumericDomainError("iteration must be non-negative")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "regressor", u)

    @classmethod
    def zeros(cls, n_taps):
        """Fresh state: zero weights and a zero-padded delay line."""
        return cls(np.zeros(n_taps), np.zeros(n_taps), 0)

    @property
    def n_taps(self):
        return self.w.shape[0]


# --------------------------------------------------------------------------
# array kernels


def output(w, u):
    """Filter output ``w . u`` along the last axis."""
    return np.sum(w * u, axis=-1)


def correntropy_weighted_error(e, kernel_coef):
    """``exp(kernel_coef * e^2) * e``; bounded by ``sigma * exp(-1/2)`` in magnitude."""
    return np.exp(kernel_coef * (e * e)) * e


def lms_update(w, u, e, mu):
    return w + np.expand_dims(mu * e, -1) * u


def mcc_update(w, u, e, mu, kernel_coef):
    step = mu * correntropy_weighted_error(e, kernel_coef)
    return w + np.expand_dims(step, -1) * u


def pmcc_update(w, u, e, mu, kernel_coef, g):
    step = mu * correntropy_weighted_error(e, kernel_coef)
    return w + np.expand_dims(step, -1) * (g * u)


def ipmcc_update(w, u, e, mu, kernel_coef, floor, numer, epsilon_p):
    """Gains from the current (pre-update) weights, then the PMCC update."""
    g = proportionate_gains(w, floor, numer, epsilon_p)
    return pmcc_update(w, u, e, mu, kernel_coef, g)


# --------------------------------------------------------------------------
# checked state transitions


def push_sample(state, sample):
    """Shift ``sample`` into the delay line; weights and counter are unchanged."""
    _require_finite(sample, "input sample")
    u = np.concatenate(([sample], state.regressor[:-1]))
    return FilterState(state.w, u, state.iteration)


def predict_and_error(state, desired):
    """Return ``(output, error)`` with ``error = desired - w . u``."""
    _require_finite(desired, "desired response")
    _require_finite(state.w, "weights")
    _require_finite(state.regressor, "regressor")
    y = output(state.w, state.regressor)
    return y, desired - y


def _advance(state, new_w):
    _require_finite(new_w, "updated weights")
    return FilterState(new_w, state.regressor, state.iteration + 1)


def lms_step(state, error, mu):
    """``w <- w + mu e u`` (non-robust baseline)."""
    _require_finite(error, "error")
    if not (mu > 0.0 and np.isfinite(mu)):
        raise NumericDomainError(f"mu must be positive and finite, got {mu!r}")
    return _advance(state, lms_update(state.w, state.regressor, error, mu))


def mcc_step(state, error, params):
    """Maximum correntropy update ``w <- w + mu f(e) u``."""
    _require_finite(error, "error")
    return _advance(
        state, mcc_update(state.w, state.regressor, error, params.mu, params.kernel_coef)
    )


def pmcc_step(state, error, params, gains):
    """Proportionate MCC update with an explicit diagonal gain vector."""
    _require_finite(error, "error")
    gains = np.asarray(gains)
    if gains.shape != state.w.shape:
        raise StructuralError(
            f"gain vector has shape {gains.shape}, filter has {state.w.shape}"
        )
    return _advance(
        state,
        pmcc_update(
            state.w, state.regressor, error, params.mu, params.kernel_coef, gains
        ),
    )


def ipmcc_step(state, error, params):
    """Improved proportionate MCC update.

    Gains are computed from the weights held by ``state`` (before the update),
    so ``ipmcc_step(s, e, p)`` equals
    ``pmcc_step(s, e, p, iplms_gains(s.w, p.alpha, p.epsilon_p))`` exactly.
    """
    _require_finite(error, "error")
    floor, numer = iplms_coefficients(params.alpha, state.n_taps)
    return _advance(
        state,
        ipmcc_update(
            state.w,
            state.regressor,
            error,
            params.mu,
            params.kernel_coef,
            floor,
            numer,
            params.epsilon_p,
        ),
    )
