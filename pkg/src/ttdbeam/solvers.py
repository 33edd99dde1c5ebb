"""Baseline synthesis: closed-form steering and per-antenna alternating minimization.

The fitting problem minimized here is the squared Frobenius distance between
the hardware-realizable precoder and an arbitrary complex target, summed over
antennas and subcarriers.  That objective separates across antennas, so each
antenna can be solved independently: for a fixed delay the optimal phase has
a closed form, and the delay is found by line search over a uniform grid.

`jpta_approx` is the workhorse used to build dictionary entries; the
exhaustive oracle exists only to validate it at desk scale.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .core import ArrayConfig, SystemConfig, precoder_matrix, subcarrier_freqs, zero_config
from .splitbeam import DirectionMap, ideal_split_precoder

__all__ = [
    "SolverParams",
    "default_max_delay",
    "delay_grid",
    "constant_direction_config",
    "objective",
    "jpta_approx",
    "exhaustive_oracle",
    "fold_delay_periods",
    "register_synthesizer",
    "get_synthesizer",
    "registered_synthesizers",
    "make_jpta_synthesizer",
    "SynthesisFn",
]

SynthesisFn = Callable[[DirectionMap, SystemConfig], ArrayConfig]

_ORACLE_MAX_ANTENNAS = 6
_ORACLE_MAX_EVALS = 4_000_000


@dataclass(frozen=True)
class SolverParams:
    """Line-search settings for the alternating-minimization solver."""

    max_delay: float
    n_iterations: int = 30
    delay_grid_size: int = 1024

    def __post_init__(self) -> None:
        if not self.max_delay > 0.0:
            raise ValueError(f"max_delay must be positive, got {self.max_delay}")
        if self.n_iterations < 1:
            raise ValueError(f"n_iterations must be >= 1, got {self.n_iterations}")
        if self.delay_grid_size < 2:
            raise ValueError(f"delay_grid_size must be >= 2, got {self.delay_grid_size}")


def default_max_delay(cfg: SystemConfig) -> float:
    """One period of the per-antenna correlation in delay: M/BW seconds.

    The correlation against any target is periodic in the delay with this
    period (subcarrier spacing BW/M), so a larger search range only revisits
    aliases.
    """
    return cfg.n_subcarriers / cfg.bandwidth


def delay_grid(max_delay: float, size: int) -> np.ndarray:
    """Uniform candidate delays: ``size`` points spaced max_delay/size from 0."""
    if not max_delay > 0.0:
        raise ValueError("max_delay must be positive")
    if size < 2:
        raise ValueError("grid needs at least 2 points")
    return np.arange(size, dtype=np.float64) * (max_delay / size)


def constant_direction_config(delta: float, cfg: SystemConfig) -> ArrayConfig:
    """Closed-form config steering every subcarrier at direction delta.

    Delays grow linearly along the array, ``t_n = -delta*n/(2*fc)``; phases
    are zero.  The frequency-proportional phase ``-2*pi*f*t_n`` then matches
    the steering exponent at every subcarrier, so the beam does not squint.
    Accepts the closed interval [-1, 1]: -1 and +1 are distinct configs
    (their patterns coincide only at the carrier).
    """
    if not -1.0 <= delta <= 1.0:
        raise ValueError(f"direction must lie in [-1, 1], got {delta}")
    n = np.arange(cfg.n_antennas, dtype=np.float64)
    return ArrayConfig(-delta * n / (2.0 * cfg.carrier_freq), np.zeros(cfg.n_antennas))


def objective(phi: ArrayConfig, v_target: np.ndarray, cfg: SystemConfig) -> float:
    """Squared Frobenius distance between the realized precoder and the target."""
    v_target = np.asarray(v_target, dtype=np.complex128)
    expected = (cfg.n_antennas, cfg.n_subcarriers)
    if v_target.shape != expected:
        raise ValueError(f"target shape {v_target.shape} does not match {expected}")
    d = precoder_matrix(phi, cfg) - v_target
    return float(np.sum(d.real**2 + d.imag**2))


def _correlation_scores(v_target: np.ndarray, cfg: SystemConfig, t_grid: np.ndarray,
                        max_delay: float) -> np.ndarray:
    """c[k, n] = sum_m v_target[n, m] * exp(j*2*pi*f_m*t_k).

    When the grid spans exactly one correlation period (max_delay = M/BW with
    grid spacing max_delay/size), the sum over m reduces to a DFT and is
    evaluated by FFT; otherwise by direct (chunked) evaluation.
    """
    f = subcarrier_freqs(cfg)
    size = t_grid.size
    m_count = cfg.n_subcarriers
    ratio = max_delay * cfg.bandwidth / m_count
    if abs(ratio - 1.0) < 1e-12:
        # exponent 2*pi*m*BW*t_k/M == 2*pi*m*k/size: fold m onto m mod size
        folded = np.zeros((size, v_target.shape[0]), dtype=np.complex128)
        np.add.at(folded, np.arange(1, m_count + 1) % size, v_target.T)
        scores = size * np.fft.ifft(folded, axis=0)
        scores *= np.exp(
            1j * 2.0 * np.pi * (cfg.carrier_freq - cfg.bandwidth / 2.0) * t_grid
        )[:, None]
        return scores
    scores = np.empty((size, v_target.shape[0]), dtype=np.complex128)
    chunk = max(1, min(size, 8 * 1024 * 1024 // max(m_count, 1)))
    vt = v_target.T
    for start in range(0, size, chunk):
        stop = min(start + chunk, size)
        e = np.exp(1j * 2.0 * np.pi * np.outer(t_grid[start:stop], f))
        scores[start:stop] = e @ vt
    return scores


def _correlation_at(v_target: np.ndarray, cfg: SystemConfig, delays: np.ndarray) -> np.ndarray:
    """c_n at one arbitrary delay per antenna (off-grid evaluation)."""
    f = subcarrier_freqs(cfg)
    return (v_target * np.exp(1j * 2.0 * np.pi * np.outer(delays, f))).sum(axis=1)


def jpta_approx(
    v_target: np.ndarray,
    params: SolverParams,
    cfg: SystemConfig,
    init: ArrayConfig | None = None,
) -> ArrayConfig:
    """Fit a delay/phase config to an arbitrary target precoder.

    Per sweep, each antenna independently line-searches its delay over a
    uniform grid in [0, max_delay), pairing every candidate with its
    closed-form optimal phase (the argument of the target correlation at that
    delay); the antenna keeps its current pair only if strictly better.  Ties
    in the line search break toward the smaller delay.

    Because the objective separates across antennas and the per-antenna
    subproblem does not involve the other antennas, the first sweep already
    reaches the grid optimum; remaining sweeps are convergence checks and the
    loop exits as soon as a sweep leaves the config unchanged.  The result is
    identical to running all ``n_iterations`` sweeps.  Deterministic given
    (v_target, params, init).
    """
    v_target = np.asarray(v_target, dtype=np.complex128)
    expected = (cfg.n_antennas, cfg.n_subcarriers)
    if v_target.shape != expected:
        raise ValueError(f"target shape {v_target.shape} does not match {expected}")
    t_grid = delay_grid(params.max_delay, params.delay_grid_size)
    scores = _correlation_scores(v_target, cfg, t_grid, params.max_delay)
    mags = np.abs(scores)
    best_k = np.argmax(mags, axis=0)  # first max: smaller delay wins ties
    ant = np.arange(cfg.n_antennas)
    grid_score = mags[best_k, ant]
    grid_delays = t_grid[best_k]
    grid_phases = np.angle(scores[best_k, ant])

    current = init if init is not None else zero_config(cfg.n_antennas)
    if current.n_antennas != cfg.n_antennas:
        raise ValueError("init config antenna count mismatch")
    for _ in range(params.n_iterations):
        cur_score = np.real(
            _correlation_at(v_target, cfg, current.delays) * np.exp(-1j * current.phases)
        )
        keep = cur_score > grid_score
        new = ArrayConfig(
            np.where(keep, current.delays, grid_delays),
            np.where(keep, current.phases, grid_phases),
        )
        if np.array_equal(new.delays, current.delays) and np.array_equal(
            new.phases, current.phases
        ):
            break
        current = new
    return current


def fold_delay_periods(phi: ArrayConfig, cfg: SystemConfig) -> ArrayConfig:
    """Minimal-delay representative of a config, subcarrier response unchanged.

    The per-antenna response on the subcarrier comb is periodic in the delay
    with period M/BW (the comb spacing is BW/M), so delays found by a line
    search over [0, M/BW) may be comb-aliases of small negative delays.  On
    the comb both representatives are identical, but between comb frequencies
    a near-period delay oscillates wildly, which ruins any later band
    remapping.  Folding each delay into [-M/(2*BW), M/(2*BW)] and
    compensating the phase (mod 2*pi) picks the smooth representative.
    """
    period = cfg.n_subcarriers / cfg.bandwidth
    k = np.round(phi.delays / period)
    comp = k * (2.0 * np.pi * (cfg.carrier_freq - cfg.bandwidth / 2.0) * period)
    return ArrayConfig(
        phi.delays - k * period, np.mod(phi.phases - comp, 2.0 * np.pi)
    )


def exhaustive_oracle(
    v_target: np.ndarray,
    cfg: SystemConfig,
    delay_candidates: np.ndarray,
    phase_candidates: np.ndarray,
) -> ArrayConfig:
    """Exact per-antenna minimizer over a Cartesian delay x phase grid.

    Desk-scale only: the objective separates across antennas, so the exact
    grid optimum is found antenna by antenna.  Refuses problem sizes beyond
    the cap; ties break toward the smaller delay, then the smaller phase.
    """
    v_target = np.asarray(v_target, dtype=np.complex128)
    expected = (cfg.n_antennas, cfg.n_subcarriers)
    if v_target.shape != expected:
        raise ValueError(f"target shape {v_target.shape} does not match {expected}")
    d = np.asarray(delay_candidates, dtype=np.float64)
    p = np.asarray(phase_candidates, dtype=np.float64)
    if cfg.n_antennas > _ORACLE_MAX_ANTENNAS:
        raise ValueError(f"oracle capped at N <= {_ORACLE_MAX_ANTENNAS}")
    if d.size * p.size * cfg.n_antennas > _ORACLE_MAX_EVALS:
        raise ValueError("oracle grid too large; reduce delay/phase resolution")

    f = subcarrier_freqs(cfg)
    corr = np.exp(1j * 2.0 * np.pi * np.outer(d, f)) @ v_target.T  # (D, N)
    rot = np.exp(-1j * p)  # (P,)
    delays = np.empty(cfg.n_antennas)
    phases = np.empty(cfg.n_antennas)
    for n in range(cfg.n_antennas):
        gain = np.real(corr[:, n, None] * rot[None, :])  # maximize <=> minimize objective
        flat = int(np.argmax(gain))
        di, pi = divmod(flat, p.size)
        delays[n] = d[di]
        phases[n] = p[pi]
    return ArrayConfig(delays, phases)


_SYNTHESIZERS: dict[str, SynthesisFn] = {}


def register_synthesizer(name: str, fn: SynthesisFn, *, replace: bool = False) -> None:
    """Register a named map from a DirectionMap to an ArrayConfig."""
    if not replace and name in _SYNTHESIZERS:
        raise ValueError(f"synthesizer {name!r} already registered")
    _SYNTHESIZERS[name] = fn


def get_synthesizer(name: str) -> SynthesisFn:
    try:
        return _SYNTHESIZERS[name]
    except KeyError:
        known = ", ".join(sorted(_SYNTHESIZERS)) or "none"
        raise KeyError(f"no synthesizer named {name!r} (registered: {known})") from None


def registered_synthesizers() -> tuple[str, ...]:
    return tuple(sorted(_SYNTHESIZERS))


def make_jpta_synthesizer(params: SolverParams) -> SynthesisFn:
    """Direct alternating-minimization synthesis of a split-beam target."""

    def synth(dmap: DirectionMap, cfg: SystemConfig) -> ArrayConfig:
        return jpta_approx(ideal_split_precoder(dmap, cfg), params, cfg)

    return synth
