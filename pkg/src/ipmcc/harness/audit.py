"""Arithmetic operation counts for one filter iteration.

The real filter code path (``predict_and_error`` followed by the variant's
step) is executed on object arrays of :class:`CountingScalar`, which tally
every arithmetic primitive they take part in.  Conventions:

* subtraction counts as an addition;
* ``abs``, negation and comparisons are free;
* constants that depend only on the filter parameters (``mu``,
  ``-1/(2 sigma^2)``, the gain floor and numerator) are plain floats computed
  once per run, so they never appear in the tally.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..filters import (
    FilterParams,
    FilterState,
    Variant,
    ipmcc_step,
    lms_step,
    mcc_step,
    pmcc_step,
    predict_and_error,
)
from ..gains import ipnlms_coefficients, proportionate_gains

# reference per-iteration counts of IP-MCC as functions of L
REFERENCE_IPMCC = {
    "adds": lambda L: 4 * L,
    "mults": lambda L: 4 * L + 5,
    "divs": lambda L: 1,
    "exps": lambda L: 1,
}


@dataclass
class OpCountReport:
    adds: int = 0
    mults: int = 0
    divs: int = 0
    exps: int = 0
    sqrts: int = 0


class CountingScalar:
    """Float stand-in that records arithmetic in a shared report."""

    __slots__ = ("value", "tally")

    def __init__(self, value, tally):
        self.value = float(value)
        self.tally = tally

    def _new(self, value):
        return CountingScalar(value, self.tally)

    def __add__(self, other):
        self.tally.adds += 1
        return self._new(self.value + _raw(other))

    __radd__ = __add__

    def __sub__(self, other):
        self.tally.adds += 1
        return self._new(self.value - _raw(other))

    def __rsub__(self, other):
        self.tally.adds += 1
        return self._new(_raw(other) - self.value)

    def __mul__(self, other):
        self.tally.mults += 1
        return self._new(self.value * _raw(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        self.tally.divs += 1
        return self._new(self.value / _raw(other))

    def __rtruediv__(self, other):
        self.tally.divs += 1
        return self._new(_raw(other) / self.value)

    def __neg__(self):
        return self._new(-self.value)

    def __abs__(self):
        return self._new(abs(self.value))

    def exp(self):
        self.tally.exps += 1
        return self._new(math.exp(self.value))

    def sqrt(self):
        self.tally.sqrts += 1
        return self._new(math.sqrt(self.value))

    def __float__(self):
        return self.value

    def __lt__(self, other):
        return self.value < _raw(other)

    def __le__(self, other):
        return self.value <= _raw(other)

    def __gt__(self, other):
        return self.value > _raw(other)

    def __ge__(self, other):
        return self.value >= _raw(other)

    def __repr__(self):
        return f"CountingScalar({self.value!r})"


def _raw(x):
    return x.value if isinstance(x, CountingScalar) else x


def _wrap(values, tally):
    out = np.empty(len(values), dtype=object)
    out[:] = [CountingScalar(v, tally) for v in values]
    return out


def audit_op_counts(variant, n_taps, params=None, seed=0):
    """Count the arithmetic in one prediction plus one update at length ``n_taps``.

    Weights, regressor and desired response are random (non-zero) so no
    operation is skipped by a data-dependent shortcut.
    """
    variant = Variant(variant)
    params = params or FilterParams(0.00097)
    rng = np.random.default_rng(seed)
    tally = OpCountReport()
    state = FilterState(
        _wrap(rng.standard_normal(n_taps), tally), _wrap(rng.standard_normal(n_taps), tally)
    )
    desired = CountingScalar(rng.standard_normal(), tally)
    tally.__init__()

    _, error = predict_and_error(state, desired)
    if variant is Variant.LMS:
        lms_step(state, error, params.mu)
    elif variant is Variant.MCC:
        mcc_step(state, error, params)
    elif variant is Variant.IPMCC:
        ipmcc_step(state, error, params)
    else:
        floor, numer = ipnlms_coefficients(params.alpha, n_taps)
        gains = proportionate_gains(state.w, floor, numer, params.epsilon_p)
        pmcc_step(state, error, params, gains)
    return tally
