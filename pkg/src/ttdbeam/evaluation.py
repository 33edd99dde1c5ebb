"""Monte-Carlo spectral-efficiency evaluation over random user placements.

Each trial draws one direction per subband from a discrete uniform grid,
synthesizes a config with the procedure under test, and scores every
subcarrier as log2(1 + |gain at the assigned direction|^2 * SNR).  Trials are
seeded independently from the master seed, so reports are byte-identical
regardless of worker count or execution order.
"""

from __future__ import annotations

import time
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import ArrayConfig, SystemConfig, gain_at, gain_at_directions
from .parallel import worker_count
from .solvers import SynthesisFn, get_synthesizer
from .splitbeam import DirectionMap, expand_directions, subband_of

__all__ = [
    "EvalScenario",
    "EvalReport",
    "Ecdf",
    "direction_grid",
    "spectral_efficiency",
    "upper_bound_se",
    "monte_carlo",
    "ase_per_subband",
    "ase_per_subcarrier",
    "ecdf",
    "runtime_bench",
    "report_csv_lines",
    "summary_dict",
]

RNG_ALGORITHM = "pcg64-seedsequence(master_seed, trial)"


@dataclass(frozen=True)
class EvalScenario:
    """System, user count, SNR, direction grid, and trial budget for one experiment."""

    cfg: SystemConfig
    n_subbands: int
    snr_linear: float
    direction_grid_size: int
    n_trials: int
    master_seed: int

    def __post_init__(self) -> None:
        if self.cfg.n_subcarriers % self.n_subbands != 0:
            raise ValueError(
                f"{self.n_subbands} subbands do not divide {self.cfg.n_subcarriers} subcarriers"
            )
        if not self.snr_linear > 0.0:
            raise ValueError("snr_linear must be positive")
        if self.direction_grid_size < 2:
            raise ValueError("direction grid needs at least 2 points")
        if self.n_trials < 1:
            raise ValueError("need at least one trial")


def direction_grid(size: int) -> np.ndarray:
    """Uniform sine-space grid: point a is -1 + 2a/(size-1), endpoints exactly +-1."""
    if size < 2:
        raise ValueError("direction grid needs at least 2 points")
    return -1.0 + 2.0 * np.arange(size, dtype=np.float64) / (size - 1)


def upper_bound_se(cfg: SystemConfig, snr_linear: float) -> float:
    """Spectral efficiency at the full beamforming gain sqrt(N)."""
    return float(np.log2(1.0 + cfg.n_antennas * snr_linear))


def spectral_efficiency(
    phi: ArrayConfig, dmap: DirectionMap, m: int, snr_linear: float, cfg: SystemConfig
) -> float:
    """log2(1 + |gain toward the subband's direction at subcarrier m|^2 * SNR)."""
    dmap.validate_with(cfg)
    band = subband_of(m, dmap.n_subbands, cfg.n_subcarriers)
    g = gain_at(phi, float(dmap.directions[band - 1]), m, cfg)
    return float(np.log2(1.0 + (g.real**2 + g.imag**2) * snr_linear))


@dataclass(frozen=True)
class EvalReport:
    """Per-trial spectral efficiencies and their aggregates."""

    se_per_subcarrier: np.ndarray  # (successful trials, M)
    trial_directions: np.ndarray  # (successful trials, G)
    ase_per_subband: np.ndarray
    ase_per_subcarrier: np.ndarray
    ecdf_points: np.ndarray
    upper_bound: float
    synthesizer: str
    master_seed: int
    rng_algorithm: str = RNG_ALGORITHM
    failures: tuple[tuple[int, str], ...] = field(default=())

    def __post_init__(self) -> None:
        for name in (
            "se_per_subcarrier",
            "trial_directions",
            "ase_per_subband",
            "ase_per_subcarrier",
            "ecdf_points",
        ):
            a = np.array(getattr(self, name), dtype=np.float64, copy=True)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n_trials(self) -> int:
        return self.se_per_subcarrier.shape[0]


def _run_trial(
    scenario: EvalScenario, synth: SynthesisFn, trial: int
) -> tuple[np.ndarray, np.ndarray]:
    seq = np.random.SeedSequence(scenario.master_seed, spawn_key=(trial,))
    rng = np.random.default_rng(seq)
    idx = rng.integers(0, scenario.direction_grid_size, size=scenario.n_subbands)
    grid = direction_grid(scenario.direction_grid_size)
    dmap = DirectionMap(grid[idx])
    phi = synth(dmap, scenario.cfg)
    psi = expand_directions(dmap, scenario.cfg)
    gains = gain_at_directions(phi, psi, scenario.cfg)
    se = np.log2(1.0 + (gains.real**2 + gains.imag**2) * scenario.snr_linear)
    return dmap.directions, se


def monte_carlo(
    scenario: EvalScenario,
    synthesizer: str | SynthesisFn,
    *,
    workers: int | None = None,
) -> EvalReport:
    """Run all trials and aggregate.

    ``synthesizer`` is either a registered name or the procedure itself.
    Trial t derives its seed from (master_seed, t) alone, and results are
    assembled in trial order, so the report is reproducible bit-for-bit for
    any worker count.  A failing trial is recorded and skipped, not fatal.
    """
    if isinstance(synthesizer, str):
        name = synthesizer
        synth = get_synthesizer(synthesizer)
    else:
        name = getattr(synthesizer, "__name__", "custom")
        synth = synthesizer

    n_workers = min(worker_count(workers), scenario.n_trials)
    results: list[tuple[np.ndarray, np.ndarray] | Exception] = [None] * scenario.n_trials  # type: ignore[list-item]

    def run(trial: int) -> None:
        try:
            results[trial] = _run_trial(scenario, synth, trial)
        except Exception as exc:  # recorded per trial, not fatal
            results[trial] = exc

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(run, range(scenario.n_trials)))
    else:
        for trial in range(scenario.n_trials):
            run(trial)

    rows: list[np.ndarray] = []
    dirs: list[np.ndarray] = []
    failures: list[tuple[int, str]] = []
    for trial, outcome in enumerate(results):
        if isinstance(outcome, Exception):
            failures.append((trial, f"{type(outcome).__name__}: {outcome}"))
        else:
            dirs.append(outcome[0])
            rows.append(outcome[1])
    if not rows:
        raise RuntimeError(f"every trial failed; first error: {failures[0][1]}")

    se = np.stack(rows)
    return EvalReport(
        se_per_subcarrier=se,
        trial_directions=np.stack(dirs),
        ase_per_subband=_ase_per_subband(se, scenario.n_subbands),
        ase_per_subcarrier=se.mean(axis=0),
        ecdf_points=np.sort(se.ravel()),
        upper_bound=upper_bound_se(scenario.cfg, scenario.snr_linear),
        synthesizer=name,
        master_seed=scenario.master_seed,
        failures=tuple(failures),
    )


def _ase_per_subband(se: np.ndarray, n_subbands: int) -> np.ndarray:
    trials, m_count = se.shape
    return se.reshape(trials, n_subbands, m_count // n_subbands).mean(axis=(0, 2))


def ase_per_subband(report: EvalReport, n_subbands: int) -> np.ndarray:
    """Mean SE over trials and subcarriers within each subband."""
    if report.se_per_subcarrier.size == 0:
        raise ValueError("empty report")
    return _ase_per_subband(report.se_per_subcarrier, n_subbands)


def ase_per_subcarrier(report: EvalReport) -> np.ndarray:
    """Mean SE over trials for each subcarrier."""
    if report.se_per_subcarrier.size == 0:
        raise ValueError("empty report")
    return report.se_per_subcarrier.mean(axis=0)


@dataclass(frozen=True)
class Ecdf:
    """Empirical distribution of all (trial, subcarrier) SE values."""

    values: np.ndarray  # sorted ascending

    def quantile(self, q: float) -> float:
        """Smallest value whose empirical CDF reaches q."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile must lie in [0, 1], got {q}")
        n = self.values.size
        idx = max(0, int(np.ceil(q * n)) - 1)
        return float(self.values[idx])

    def fraction_below(self, threshold: float) -> float:
        return float(np.searchsorted(self.values, threshold, side="left")) / self.values.size


def ecdf(report: EvalReport) -> Ecdf:
    if report.ecdf_points.size == 0:
        raise ValueError("empty report")
    return Ecdf(report.ecdf_points)


def runtime_bench(
    scenario: EvalScenario,
    synthesizers: Mapping[str, SynthesisFn],
    calls: Mapping[str, int],
    *,
    warmup: int = 3,
) -> dict[str, float]:
    """Mean wall time per synthesis call, monotone-clock based.

    Warmup calls are excluded.  Targets are drawn once from the scenario seed
    and cycled, so every synthesizer sees the same inputs.
    """
    grid = direction_grid(scenario.direction_grid_size)
    rng = np.random.default_rng(np.random.SeedSequence(scenario.master_seed, spawn_key=(0xBE, 0xCE)))
    pool = [
        DirectionMap(grid[rng.integers(0, scenario.direction_grid_size, size=scenario.n_subbands)])
        for _ in range(32)
    ]
    means: dict[str, float] = {}
    for name, synth in synthesizers.items():
        n_calls = calls[name]
        if n_calls < 1:
            raise ValueError(f"need at least one timed call for {name!r}")
        for i in range(warmup):
            synth(pool[i % len(pool)], scenario.cfg)
        start = time.perf_counter()
        for i in range(n_calls):
            synth(pool[i % len(pool)], scenario.cfg)
        means[name] = (time.perf_counter() - start) / n_calls
    return means


def report_csv_lines(report: EvalReport, scenario: EvalScenario):
    """Rows ``trial,m,subband,direction,se_bps_hz`` (1-based trial and m)."""
    yield "trial,m,subband,direction,se_bps_hz"
    g_count = scenario.n_subbands
    m_count = scenario.cfg.n_subcarriers
    block = m_count // g_count
    for t in range(report.n_trials):
        dirs = [repr(float(x)) for x in report.trial_directions[t]]
        row = report.se_per_subcarrier[t]
        for m in range(1, m_count + 1):
            band = (m - 1) // block + 1
            yield f"{t + 1},{m},{band},{dirs[band - 1]},{float(row[m - 1])!r}"


def summary_dict(report: EvalReport, scenario: EvalScenario) -> dict:
    """JSON-ready aggregate: ASE vectors, tail quantiles, bound, seeds, config echo."""
    dist = ecdf(report)
    curve_q = np.linspace(0.0, 1.0, 101)
    return {
        "synthesizer": report.synthesizer,
        "rng": report.rng_algorithm,
        "master_seed": report.master_seed,
        "n_trials": report.n_trials,
        "failures": [list(f) for f in report.failures],
        "upper_bound": report.upper_bound,
        "ase_per_subband": [float(x) for x in report.ase_per_subband],
        "ase_per_subcarrier": [float(x) for x in report.ase_per_subcarrier],
        "ecdf_quantiles_pct": {
            str(p): dist.quantile(p / 100.0) for p in (1, 5, 10, 50, 90)
        },
        "ecdf_curve": [dist.quantile(float(q)) for q in curve_q],
        "config": {
            "n": scenario.cfg.n_antennas,
            "m": scenario.cfg.n_subcarriers,
            "fc_hz": scenario.cfg.carrier_freq,
            "bw_hz": scenario.cfg.bandwidth,
            "subbands": scenario.n_subbands,
            "snr_linear": scenario.snr_linear,
            "direction_grid_size": scenario.direction_grid_size,
        },
    }
