"""scikit-learn style wrappers around the adaptive filter kernels.

An adaptive filter is fitted online: ``fit(X, y)`` makes one pass over the
rows of ``X`` in order, treating row ``n`` as the regressor ``u(n)`` and
``y[n]`` as the desired response ``d(n)``.  Use :class:`TappedDelayLine` to
turn a 1-D input signal into that regressor matrix, e.g.::

    from sklearn.pipeline import make_pipeline
    model = make_pipeline(TappedDelayLine(64), IPMCCFilter(mu=1e-3))
    model.fit(x.reshape(-1, 1), d)
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .filters import FilterParams, lms_update, mcc_update, output, pmcc_update
from .gains import (
    check_gain_params,
    iplms_coefficients,
    ipnlms_coefficients,
    proportionate_gains,
)


class TappedDelayLine(TransformerMixin, BaseEstimator):
    """Regressor matrix ``[x(n), x(n-1), ..., x(n-L+1)]`` per sample.

    Samples before the start of the signal are taken as zero.

    Parameters
    ----------
    n_taps : int, default=64
        Delay-line length ``L``.
    """

    def __init__(self, n_taps=64):
        self.n_taps = n_taps

    def fit(self, X, y=None):
        self._signal(X)
        self.n_features_in_ = 1
        return self

    def _signal(self, X):
        if not (isinstance(self.n_taps, (int, np.integer)) and self.n_taps >= 1):
            raise ValueError(f"n_taps must be a positive integer, got {self.n_taps!r}")
        x = check_array(X, ensure_2d=False, dtype=np.float64)
        if x.ndim == 2:
            if x.shape[1] != 1:
                raise ValueError(f"expected a single input channel, got shape {x.shape}")
            x = x[:, 0]
        return x

    def transform(self, X):
        """Return an ``(n_samples, n_taps)`` array, newest sample first."""
        check_is_fitted(self, "n_features_in_")
        x = self._signal(X)
        padded = np.concatenate((np.zeros(self.n_taps - 1), x))
        return np.ascontiguousarray(sliding_window_view(padded, self.n_taps)[:, ::-1])


class _OnlineFilter(RegressorMixin, BaseEstimator):
    """Shared fit/partial_fit/predict machinery; subclasses supply ``_make_update``."""

    def fit(self, X, y):
        """Reset the weights to zero and adapt over ``(X, y)`` once."""
        for attr in ("coef_", "n_iter_", "errors_"):
            self.__dict__.pop(attr, None)
        return self.partial_fit(X, y)

    def partial_fit(self, X, y):
        """Continue adapting from the current weights.

        Stores the a-priori errors ``d(n) - w(n)^T u(n)`` of this call in
        ``errors_``.
        """
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        first = not hasattr(self, "coef_")
        if first:
            self.n_features_in_ = X.shape[1]
            self._check_params()
            self.coef_ = np.zeros(X.shape[1])
            self.n_iter_ = 0
        elif X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, filter was fitted with {self.n_features_in_}"
            )
        update = self._make_update(X.shape[1])
        w = self.coef_
        errors = np.empty(X.shape[0])
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(X.shape[0]):
                u = X[n]
                e = y[n] - output(w, u)
                errors[n] = e
                w = update(w, u, e)
                if not np.isfinite(e):
                    break
        if not np.all(np.isfinite(w)):
            raise FloatingPointError(
                f"filter weights diverged to non-finite values at sample {n}"
            )
        self.coef_ = w
        self.errors_ = errors
        self.n_iter_ += X.shape[0]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, filter was fitted with {self.n_features_in_}"
            )
        return X @ self.coef_

    def _check_params(self):
        FilterParams(self.mu, getattr(self, "sigma", np.inf))


class LMSFilter(_OnlineFilter):
    """Least mean squares: ``w <- w + mu e u``.

    Parameters
    ----------
    mu : float, default=0.001
        Step size.
    """

    def __init__(self, mu=0.001):
        self.mu = mu

    def _make_update(self, n_taps):
        mu = self.mu
        return lambda w, u, e: lms_update(w, u, e, mu)


class MCCFilter(_OnlineFilter):
    """Maximum correntropy criterion filter.

    The update ``w <- w + mu exp(-e^2 / 2 sigma^2) e u`` down-weights large
    errors, so isolated impulses in ``y`` barely move the weights.

    Parameters
    ----------
    mu : float, default=0.001
        Step size.
    sigma : float, default=1.25
        Gaussian kernel width.
    """

    def __init__(self, mu=0.001, sigma=1.25):
        self.mu = mu
        self.sigma = sigma

    def _make_update(self, n_taps):
        mu, coef = self.mu, FilterParams(self.mu, self.sigma).kernel_coef
        return lambda w, u, e: mcc_update(w, u, e, mu, coef)


class PMCCFilter(_OnlineFilter):
    """Proportionate MCC filter ``w <- w + mu f(e) G(n) u``.

    ``G(n)`` is recomputed from the current weights before every update.

    Parameters
    ----------
    mu : float, default=0.001
    sigma : float, default=1.25
    alpha : float, default=0.0
        Proportionality mix in ``[-1, 1]``; ``-1`` gives uniform gains.
    epsilon_p : float, default=0.01
        Regularizer of the gain denominator.
    gain_rule : {"ipnlms", "iplms"}, default="ipnlms"
        ``"ipnlms"`` gains sum to about 1; ``"iplms"`` gains sum to about
        ``L`` and are the ones :class:`IPMCCFilter` uses.
    """

    def __init__(self, mu=0.001, sigma=1.25, alpha=0.0, epsilon_p=0.01, gain_rule="ipnlms"):
        self.mu = mu
        self.sigma = sigma
        self.alpha = alpha
        self.epsilon_p = epsilon_p
        self.gain_rule = gain_rule

    def _check_params(self):
        FilterParams(self.mu, self.sigma, self.alpha, self.epsilon_p)
        if self.gain_rule not in ("ipnlms", "iplms"):
            raise ValueError(f"unknown gain_rule {self.gain_rule!r}")

    def _make_update(self, n_taps):
        check_gain_params(self.alpha, self.epsilon_p)
        mu, eps = self.mu, self.epsilon_p
        coef = FilterParams(self.mu, self.sigma).kernel_coef
        if self.gain_rule == "iplms":
            floor, numer = iplms_coefficients(self.alpha, n_taps)
        else:
            floor, numer = ipnlms_coefficients(self.alpha, n_taps)

        def update(w, u, e):
            g = proportionate_gains(w, floor, numer, eps)
            return pmcc_update(w, u, e, mu, coef, g)

        return update

    def gains(self):
        """Gain vector the next update would use."""
        check_is_fitted(self, "coef_")
        if self.gain_rule == "iplms":
            floor, numer = iplms_coefficients(self.alpha, self.coef_.shape[0])
        else:
            floor, numer = ipnlms_coefficients(self.alpha, self.coef_.shape[0])
        return proportionate_gains(self.coef_, floor, numer, self.epsilon_p)


class IPMCCFilter(PMCCFilter):
    """Improved proportionate MCC filter.

    Proportionate MCC with gains
    ``g_i = (1 - alpha)/2 + (1 + alpha) L |w_i| / (2 ||w||_1 + epsilon_p)``,
    scaled so that the step size means the same as for :class:`MCCFilter`.
    With ``alpha=-1`` it reproduces :class:`MCCFilter` exactly.
    """

    gain_rule = "iplms"

    def __init__(self, mu=0.001, sigma=1.25, alpha=0.0, epsilon_p=0.01):
        self.mu = mu
        self.sigma = sigma
        self.alpha = alpha
        self.epsilon_p = epsilon_p
