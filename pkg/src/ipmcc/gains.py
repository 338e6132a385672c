"""Proportionate gain vectors.

Both rules share the shape ``g_i = floor + scale * |w_i|`` with
``scale = numer / (2 * ||w||_1 + epsilon_p)``.  They differ only in how the
constant part and the proportional part are scaled with the filter length:

============  ==================  ==================
rule          floor               numer
============  ==================  ==================
IPNLMS        (1 - alpha) / 2L    (1 + alpha)
IPLMS         (1 - alpha) / 2     (1 + alpha) L
============  ==================  ==================

The IPLMS form is the one used by the unnormalized proportionate MCC filter;
its gains sum to (nearly) ``L`` so the step size keeps the meaning it has for
plain MCC.

All functions accept a single tap vector of shape ``(L,)`` or a batch of shape
``(..., L)`` and broadcast along the leading axes.
"""

import numpy as np

from .exceptions import NumericDomainError


def check_gain_params(alpha, epsilon_p):
    if not -1.0 <= alpha <= 1.0:
        raise NumericDomainError(f"alpha must lie in [-1, 1], got {alpha!r}")
    if not epsilon_p > 0.0 or not np.isfinite(epsilon_p):
        raise NumericDomainError(
            f"epsilon_p must be a positive finite number, got {epsilon_p!r}"
        )


def proportionate_gains(w, floor, numer, epsilon_p):
    """Evaluate ``floor + numer * |w| / (2 ||w||_1 + epsilon_p)``.

    Unchecked kernel shared by both gain rules and by the filter updates.
    ``floor`` and ``numer`` are per-run constants; only one division is
    performed per tap vector.
    """
    mag = np.abs(w)
    l1 = np.sum(mag, axis=-1)
    scale = numer / (2.0 * l1 + epsilon_p)
    return floor + np.expand_dims(scale, -1) * mag


def iplms_coefficients(alpha, n_taps):
    """Return ``(floor, numer)`` for the IPLMS rule at length ``n_taps``."""
    return (1.0 - alpha) / 2.0, (1.0 + alpha) * n_taps


def ipnlms_coefficients(alpha, n_taps):
    """Return ``(floor, numer)`` for the IPNLMS rule at length ``n_taps``."""
    return (1.0 - alpha) / (2.0 * n_taps), 1.0 + alpha


def ipnlms_gains(w, alpha=0.0, epsilon_p=0.01):
    """Improved proportionate NLMS gains.

    Parameters
    ----------
    w : array-like, shape (..., L)
        Current tap estimate(s).
    alpha : float, default=0.0
        Mix between uniform (``-1``) and fully proportional (``1``) gains.
    epsilon_p : float, default=0.01
        Positive regularizer in the l1-norm denominator.

    Returns
    -------
    g : ndarray, shape (..., L)
        Per-tap gains, summing to at most 1.
    """
    check_gain_params(alpha, epsilon_p)
    w = np.asarray(w, dtype=np.float64)
    floor, numer = ipnlms_coefficients(alpha, w.shape[-1])
    return proportionate_gains(w, floor, numer, epsilon_p)


def iplms_gains(w, alpha=0.0, epsilon_p=0.01):
    """Improved proportionate gains rescaled for the unnormalized update.

    Same arguments as :func:`ipnlms_gains`; the result is ``L`` times larger,
    so the gains sum to at most ``L`` and every gain is at least
    ``(1 - alpha) / 2``.  With ``alpha = -1`` every gain is exactly 1.
    """
    check_gain_params(alpha, epsilon_p)
    w = np.asarray(w, dtype=np.float64)
    floor, numer = iplms_coefficients(alpha, w.shape[-1])
    return proportionate_gains(w, floor, numer, epsilon_p)


def iplms_gain_sum(w, alpha=0.0, epsilon_p=0.01):
    """Closed-form sum of :func:`iplms_gains` over the taps."""
    w = np.asarray(w, dtype=np.float64)
    n_taps = w.shape[-1]
    l1 = np.sum(np.abs(w), axis=-1)
    return n_taps * (1.0 - alpha) / 2.0 + (1.0 + alpha) * n_taps * l1 / (
        2.0 * l1 + epsilon_p
    )
