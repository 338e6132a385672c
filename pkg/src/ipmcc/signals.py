"""Seedable excitation, noise and target-system generators.

Every generator is a pure function of its parameters and seed.  A seed may be
anything :func:`numpy.random.default_rng` accepts (an int, a
:class:`~numpy.random.SeedSequence` or a :class:`~numpy.random.Generator`).
"""

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .exceptions import ConfigError, NumericDomainError, StructuralError

AR1_BURN_IN = 1000


class InputKind(str, Enum):
    WHITE = "white"
    AR1 = "ar1"


@dataclass(frozen=True)
class InputModel:
    """Unit-variance excitation: white Gaussian or first-order autoregressive."""

    kind: InputKind = InputKind.AR1
    theta: float = 0.9

    def __post_init__(self):
        object.__setattr__(self, "kind", InputKind(self.kind))
        if not -1.0 < self.theta < 1.0:
            raise NumericDomainError(f"theta must lie in (-1, 1), got {self.theta!r}")

    def generate(self, count, seed, burn_in=AR1_BURN_IN):
        if self.kind is InputKind.WHITE:
            return white_gaussian(count, 1.0, seed)
        return ar1_colored(count, self.theta, seed, burn_in=burn_in)


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian background plus Bernoulli-gated Gaussian impulses.

    Each sample is ``s + B * I`` with ``s ~ N(0, sigma_s_sq)``,
    ``B ~ Bernoulli(p)`` and ``I ~ N(0, sigma_I_sq)``.
    """

    sigma_s_sq: float = 0.01
    p: float = 0.001
    sigma_I_sq: float = 1000.0

    def __post_init__(self):
        if not (self.sigma_s_sq >= 0.0 and self.sigma_I_sq >= 0.0):
            raise NumericDomainError("noise variances must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise NumericDomainError(f"p must lie in [0, 1], got {self.p!r}")
        if not (np.isfinite(self.sigma_s_sq) and np.isfinite(self.sigma_I_sq)):
            raise NumericDomainError("noise variances must be finite")

    @property
    def total_variance(self):
        return self.sigma_s_sq + self.p * self.sigma_I_sq

    @property
    def is_gaussian(self):
        return self.p == 0.0 or self.sigma_I_sq == 0.0

    def components(self):
        """Mixture weights and variances: ``[(1 - p, s), (p, s + I)]``."""
        return [
            (1.0 - self.p, self.sigma_s_sq),
            (self.p, self.sigma_s_sq + self.sigma_I_sq),
        ]


def white_gaussian(count, variance, seed):
    """``count`` i.i.d. zero-mean Gaussian samples with the given variance."""
    if count < 0:
        raise NumericDomainError("count must be non-negative")
    if not variance >= 0.0:
        raise NumericDomainError("variance must be non-negative")
    rng = np.random.default_rng(seed)
    return rng.standard_normal(count) * math.sqrt(variance)


def ar1_colored(count, theta, seed, burn_in=AR1_BURN_IN):
    """Unit-variance AR(1) sequence ``x(n) = theta x(n-1) + sqrt(1 - theta^2) v(n)``.

    The recursion starts from ``x(-1) = 0`` and its first ``burn_in`` outputs
    are discarded.  The retained driving noise is drawn first, so with
    ``theta = 0`` the result equals ``white_gaussian(count, 1.0, seed)``.
    """
    if not -1.0 < theta < 1.0:
        raise NumericDomainError(f"AR(1) is unstable for |theta| >= 1 (theta={theta!r})")
    if count < 0 or burn_in < 0:
        raise NumericDomainError("count and burn_in must be non-negative")
    rng = np.random.default_rng(seed)
    kept = rng.standard_normal(count)
    warm = rng.standard_normal(burn_in)
    drive = np.concatenate((warm, kept))
    x = lfilter([math.sqrt(1.0 - theta * theta)], [1.0, -theta], drive)
    return x[burn_in:]


def impulsive_noise(count, model, seed):
    """Bernoulli-Gaussian impulsive mixture drawn from ``model``."""
    if count < 0:
        raise NumericDomainError("count must be non-negative")
    rng = np.random.default_rng(seed)
    background = rng.standard_normal(count) * math.sqrt(model.sigma_s_sq)
    gate = rng.random(count) < model.p
    impulses = rng.standard_normal(count) * math.sqrt(model.sigma_I_sq)
    return background + gate * impulses


def sparseness_measure(w):
    """l1/l2 sparseness: 0 for equal-magnitude taps, 1 for a single active tap.

    Evaluated as ``(sqrt(L) - r) / (sqrt(L) - 1)`` with
    ``r = ||w||_1 / ||w||_2``, which keeps both extremes exact.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] < 2:
        raise StructuralError("sparseness needs a 1-D vector with at least 2 taps")
    sq = float(np.sum(w * w))
    if sq == 0.0:
        raise NumericDomainError("sparseness of the zero vector is undefined")
    l1 = float(np.sum(np.abs(w)))
    root_len = math.sqrt(w.shape[0])
    ratio = math.sqrt(l1 * l1 / sq)
    return min(1.0, max(0.0, (root_len - ratio) / (root_len - 1.0)))


@dataclass(frozen=True)
class SparseSystem:
    """Target impulse response with its active-tap count and sparseness."""

    w_opt: np.ndarray
    active_count: int
    sparseness: float

    @classmethod
    def from_taps(cls, w):
        w = np.array(w, dtype=np.float64)
        if not np.all(np.isfinite(w)):
            raise NumericDomainError("system taps must be finite")
        return cls(w, int(np.count_nonzero(w)), sparseness_measure(w))

    @property
    def n_taps(self):
        return self.w_opt.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SparseSystem):
            return NotImplemented
        return (
            self.active_count == other.active_count
            and np.array_equal(self.w_opt, other.w_opt)
        )

    __hash__ = None


def gen_sparse_system(n_taps, n_active, seed, clustered=False):
    """Random unit-norm system with ``n_active`` Gaussian taps.

    Active positions are drawn uniformly without replacement, or as one
    contiguous block at a uniform offset when ``clustered`` is set.
    """
    if not 1 <= n_active <= n_taps:
        raise NumericDomainError(
            f"need 1 <= active taps <= length, got K={n_active}, L={n_taps}"
        )
    rng = np.random.default_rng(seed)
    if clustered:
        start = int(rng.integers(0, n_taps - n_active + 1))
        positions = np.arange(start, start + n_active)
    else:
        positions = rng.choice(n_taps, size=n_active, replace=False)
    amplitudes = rng.standard_normal(n_active)
    while np.any(amplitudes == 0.0):
        amplitudes = rng.standard_normal(n_active)
    w = np.zeros(n_taps)
    w[positions] = amplitudes / np.linalg.norm(amplitudes)
    return SparseSystem.from_taps(w)


def save_system(system, path):
    """Write ``L K`` then one ``index value`` line per active tap."""
    w = system.w_opt
    lines = [f"{w.shape[0]} {system.active_count}"]
    lines += [f"{i} {float(w[i])!r}" for i in np.flatnonzero(w)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_system(path):
    """Inverse of :func:`save_system`; float values round-trip exactly."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty system file")
    try:
        n_taps, n_active = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise ConfigError(f"{path}:1: expected header 'L K', got {lines[0]!r}") from None
    if len(lines) - 1 != n_active:
        raise ConfigError(
            f"{path}: header declares {n_active} active taps, found {len(lines) - 1}"
        )
    w = np.zeros(n_taps)
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            idx_tok, val_tok = line.split()
            idx, val = int(idx_tok), float(val_tok)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: expected 'index value', got {line!r}") from None
        if not 0 <= idx < n_taps:
            raise ConfigError(f"{path}:{lineno}: tap index {idx} outside [0, {n_taps})")
        if val == 0.0 or not math.isfinite(val):
            raise ConfigError(f"{path}:{lineno}: active tap value must be finite and nonzero")
        w[idx] = val
    system = SparseSystem.from_taps(w)
    if system.active_count != n_active:
        raise ConfigError(f"{path}: duplicate tap indices")
    return system


def run_streams(base_seed, run_index):
    """Independent generators for one Monte Carlo run.

    Returns ``(input_rng, noise_rng, system_rng)``, derived from
    ``SeedSequence(base_seed, spawn_key=(run_index,))`` so that distinct runs
    never share a stream.
    """
    root = np.random.SeedSequence(base_seed, spawn_key=(run_index,))
    return tuple(np.random.default_rng(child) for child in root.spawn(3))
