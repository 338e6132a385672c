"""Monte Carlo system identification and tracking ensembles.

Runs are advanced in lockstep as rows of ``(runs, L)`` arrays; every row
only ever touches its own data, so a run's trajectory does not depend on
which other runs share its batch.  Within a run all filters see the same
input, noise and system realizations.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ..exceptions import ConfigError, NoFixedPointError
from ..filters import Variant, lms_update, mcc_update, output, pmcc_update
from ..gains import iplms_coefficients, ipnlms_coefficients, proportionate_gains
from ..signals import InputKind, impulsive_noise, run_streams
from ..theory import (
    EmseEstimate,
    SteadyStateProblem,
    emse_prediction,
    trace_s_white,
)

logger = logging.getLogger(__name__)

DIVERGENCE_MSD = 1e10  # +100 dB
MEMORY_BUDGET = 1 << 30
THEORY_MIN_TAPS = 64  # the EMSE analysis assumes a long filter


def _lin_to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


@dataclass
class LearningCurve:
    """Ensemble-averaged MSD trace for one filter.

    ``msd_db[n]`` is ``10 log10`` of the run average of
    ``||w_opt(n) - w(n)||^2`` where ``w(n)`` is the estimate before the
    update at step ``n``.  Averaging happens in the linear domain.
    """

    label: str
    variant: Variant
    msd_db: np.ndarray
    steady_state_msd_db: float
    steady_state_emse: EmseEstimate
    theory_emse: EmseEstimate
    trace_s: float
    included_runs: int
    excluded_runs: int

    def window_msd_db(self, start, stop):
        """Linear-domain mean MSD over iterations ``[start, stop)``, in dB."""
        seg = 10.0 ** (self.msd_db[start:stop] / 10.0)
        return float(_lin_to_db(np.mean(seg)))

    def iterations_to_reach(self, level_db):
        """First iteration whose MSD is at or below ``level_db`` (None if never)."""
        hit = np.flatnonzero(self.msd_db <= level_db)
        return int(hit[0]) if hit.size else None


class _Runner:
    """Per-filter kernel closure over precomputed constants."""

    def __init__(self, spec, n_taps):
        self.spec = spec
        p = spec.params
        self.mu = p.mu
        self.kernel_coef = p.kernel_coef
        self.eps = p.epsilon_p
        if spec.variant is Variant.IPMCC:
            self.coefs = iplms_coefficients(p.alpha, n_taps)
        elif spec.variant is Variant.PMCC:
            self.coefs = ipnlms_coefficients(p.alpha, n_taps)
        else:
            self.coefs = None

    @property
    def proportionate(self):
        return self.coefs is not None

    def gains(self, w):
        return proportionate_gains(w, self.coefs[0], self.coefs[1], self.eps)

    def update(self, w, u, e, g=None):
        variant = self.spec.variant
        if variant is Variant.LMS:
            return lms_update(w, u, e, self.mu)
        if variant is Variant.MCC:
            return mcc_update(w, u, e, self.mu, self.kernel_coef)
        return pmcc_update(w, u, e, self.mu, self.kernel_coef, g)


@dataclass
class _ChunkResult:
    msd: dict          # label -> (iterations, runs) linear MSD
    ea_sum: dict       # label -> (runs,) sum of ea^2 over the steady window
    ea_half: dict      # label -> (runs,) same over the first half of the window
    trace_sum: dict    # label -> (runs,) sum of u^T G u over the window
    diverged: dict     # label -> (runs,) bool


def _fixed_system(source, config, default_active):
    if not source.is_fixed:
        return None
    return source.realize(config.n_taps, None, default_active)


def _simulate_chunk(config, run_indices, fixed_first, fixed_second):
    n_taps, n_iter = config.n_taps, config.iterations
    n_runs = len(run_indices)
    switch_at = config.switch.iteration if config.switch is not None else n_iter

    # data: reversed padded inputs so each regressor is a forward slice
    x_rev = np.zeros((n_runs, n_iter + n_taps - 1))
    desired = np.empty((n_iter, n_runs))
    clean = np.empty((n_iter, n_runs))
    w_first = np.empty((n_runs, n_taps))
    w_second = np.empty((n_runs, n_taps))
    for row, run in enumerate(run_indices):
        in_rng, noise_rng, sys_rng = run_streams(config.base_seed, run)
        x = config.input.generate(n_iter, in_rng)
        noise = impulsive_noise(n_iter, config.noise, noise_rng)
        first = fixed_first or config.system.realize(n_taps, sys_rng, config.default_active)
        w_first[row] = first.w_opt
        y = lfilter(first.w_opt, [1.0], x)
        if config.switch is not None:
            second = fixed_second or config.switch.system.realize(
                n_taps, sys_rng, config.default_switch_active
            )
            w_second[row] = second.w_opt
            y[switch_at:] = lfilter(second.w_opt, [1.0], x)[switch_at:]
        clean[:, row] = y
        desired[:, row] = y + noise
        x_rev[row, : n_iter] = x[::-1]

    runners = [_Runner(spec, n_taps) for spec in config.filters]
    labels = [r.spec.label for r in runners]
    weights = {lb: np.zeros((n_runs, n_taps)) for lb in labels}
    msd = {lb: np.empty((n_iter, n_runs)) for lb in labels}
    ea_sum = {lb: np.zeros(n_runs) for lb in labels}
    ea_half = {lb: np.zeros(n_runs) for lb in labels}
    trace_sum = {lb: np.zeros(n_runs) for lb in labels}
    diverged = {lb: np.zeros(n_runs, dtype=bool) for lb in labels}

    window_start = n_iter - config.msd_window
    half_end = window_start + config.msd_window // 2
    w_opt = w_first
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(n_iter):
            if n == switch_at:
                w_opt = w_second
            start = n_iter - 1 - n
            u = x_rev[:, start:start + n_taps]
            d_n = desired[n]
            in_window = n >= window_start
            for runner, lb in zip(runners, labels):
                w = weights[lb]
                y = output(w, u)
                e = d_n - y
                dev = w_opt - w
                sq = np.sum(dev * dev, axis=-1)
                msd[lb][n] = sq
                bad = ~(sq <= DIVERGENCE_MSD)
                if bad.any():
                    fresh = bad & ~diverged[lb]
                    if fresh.any():
                        logger.warning(
                            "%s: %d run(s) diverged at iteration %d",
                            lb, int(fresh.sum()), n,
                        )
                    diverged[lb] |= bad
                    w[bad] = 0.0
                    e = np.where(bad, 0.0, e)
                g = runner.gains(w) if runner.proportionate else None
                if in_window:
                    ea = clean[n] - y
                    ea_sum[lb] += ea * ea
                    if n < half_end:
                        ea_half[lb] += ea * ea
                    if g is not None:
                        trace_sum[lb] += np.sum(g * u * u, axis=-1)
                weights[lb] = runner.update(w, u, e, g)
    return _ChunkResult(msd, ea_sum, ea_half, trace_sum, diverged)


def _chunks(config):
    per_run = 8 * config.iterations * (3 + len(config.filters)) + 8 * config.n_taps
    size = max(1, min(config.runs, MEMORY_BUDGET // max(per_run, 1)))
    runs = list(range(config.runs))
    return [runs[i:i + size] for i in range(0, len(runs), size)]


def _theory(config, spec, trace_s):
    p = spec.params
    sigma = math.inf if spec.variant is Variant.LMS else p.sigma
    try:
        problem = SteadyStateProblem(p.mu, trace_s, config.noise.total_variance, sigma)
        return emse_prediction(problem, config.noise)
    except (NoFixedPointError, ArithmeticError, ValueError) as exc:
        logger.warning("%s: no theory prediction (%s)", spec.label, exc)
        return None


def _simulate(config, run_indices=None):
    if run_indices is None:
        chunks = _chunks(config)
    else:
        chunks = [list(run_indices)]
    fixed_first = _fixed_system(config.system, config, config.default_active)
    fixed_second = None
    if config.switch is not None:
        fixed_second = _fixed_system(config.switch.system, config, config.default_switch_active)

    if config.n_taps < THEORY_MIN_TAPS:
        logger.warning(
            "L=%d is below %d taps: theory EMSE values are outside their validity range",
            config.n_taps, THEORY_MIN_TAPS,
        )
    labels = [s.label for s in config.filters]
    msd_total = {lb: np.zeros(config.iterations) for lb in labels}
    ea_total = dict.fromkeys(labels, 0.0)
    ea_first = dict.fromkeys(labels, 0.0)
    trace_total = dict.fromkeys(labels, 0.0)
    kept = dict.fromkeys(labels, 0)
    dropped = dict.fromkeys(labels, 0)
    for chunk in chunks:
        res = _simulate_chunk(config, chunk, fixed_first, fixed_second)
        for lb in labels:
            ok = ~res.diverged[lb]
            msd_total[lb] += np.sum(res.msd[lb][:, ok], axis=1)
            ea_total[lb] += float(np.sum(res.ea_sum[lb][ok]))
            ea_first[lb] += float(np.sum(res.ea_half[lb][ok]))
            trace_total[lb] += float(np.sum(res.trace_sum[lb][ok]))
            kept[lb] += int(ok.sum())
            dropped[lb] += int((~ok).sum())

    window = config.msd_window
    half = window // 2
    curves = {}
    for spec in config.filters:
        lb = spec.label
        n_ok = kept[lb]
        if n_ok == 0:
            logger.warning("%s: every run diverged", lb)
            msd_db = np.full(config.iterations, math.inf)
            curves[lb] = LearningCurve(
                lb, spec.variant, msd_db, math.inf,
                EmseEstimate(math.inf, 0, False), None, math.nan, 0, dropped[lb],
            )
            continue
        mean_msd = msd_total[lb] / n_ok
        msd_db = _lin_to_db(mean_msd)
        steady_msd = float(_lin_to_db(np.mean(mean_msd[-window:])))
        xi = ea_total[lb] / (n_ok * window)
        converged = True
        if half >= 1:
            a = ea_first[lb] / (n_ok * half)
            b = (ea_total[lb] - ea_first[lb]) / (n_ok * (window - half))
            ref = max(a, b)
            converged = ref == 0.0 or abs(a - b) <= 0.25 * ref
        emse = EmseEstimate(xi, n_ok * window, converged)

        if spec.variant in (Variant.LMS, Variant.MCC):
            trace_s = trace_s_white(config.n_taps, 1.0)
        elif spec.variant is Variant.IPMCC and config.input.kind is InputKind.WHITE:
            trace_s = trace_s_white(config.n_taps, 1.0)
        else:
            trace_s = trace_total[lb] / (n_ok * window)
        curves[lb] = LearningCurve(
            lb, spec.variant, msd_db, steady_msd, emse,
            _theory(config, spec, trace_s), trace_s, n_ok, dropped[lb],
        )
    return curves


def run_identification(config, run_indices=None):
    """Ensemble learning curves for every configured filter.

    Parameters
    ----------
    config : ExperimentConfig
    run_indices : sequence of int, optional
        Explicit run indices (seed streams) to simulate; defaults to
        ``range(config.runs)``.

    Returns
    -------
    dict
        ``{label: LearningCurve}`` in configuration order.
    """
    return _simulate(config, run_indices)


def run_tracking(config, run_indices=None):
    """Like :func:`run_identification` with the system replaced mid-run.

    MSD is measured against whichever system is active at each step.
    """
    if config.switch is None:
        raise ConfigError("tracking requires a [switch] section")
    return _simulate(config, run_indices)
