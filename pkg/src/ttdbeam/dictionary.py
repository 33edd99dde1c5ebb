"""Generator dictionary: precomputed two-subband split-beam configs per direction offset.

Entries are indexed by the direction offset between the two subbands.  The
offset grid is the full set of pairwise differences of an A-point uniform
direction grid on [-1, 1] (2A-1 values spanning [-2, 2]), so any difference
of two on-grid directions is itself an offset with its own entry.  Offsets
beyond [-1, 1] are kept unwrapped on purpose: a mod-2 direction shift is
exact only at the carrier, so fitting the true (aliased) target keeps the
composed beam on target at every subcarrier instead of drifting with the
beam squint at the band edges.

Binary layout (little-endian): 40-byte header (magic "TTDD", version,
N, A, D, M as int32, fc and bw as float64), then D offsets as float64, then
D rows of 2N float64 (N delays followed by N phases).  A JSON sidecar
mirroring the header is written next to the file for inspection.
"""

from __future__ import annotations

import json
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ArrayConfig,
    PsiGrid,
    SystemConfig,
    subcarrier_freqs,
    zero_config,
)
from .parallel import worker_count
from .solvers import SolverParams, fold_delay_periods, jpta_approx

__all__ = [
    "GeneratorDictionary",
    "DictionaryFormatError",
    "offset_grid",
    "build_dictionary",
    "postprocess_center",
    "lookup",
    "save",
    "load",
]

_MAGIC = b"TTDD"
_VERSION = 1
_HEADER = struct.Struct("<4siiiiidd")


class DictionaryFormatError(Exception):
    """Raised when a dictionary file is corrupt or has an unknown format."""


@dataclass(frozen=True, eq=False)
class GeneratorDictionary:
    """Immutable offset-indexed table of two-subband array configs."""

    offsets: np.ndarray
    delays: np.ndarray
    phases: np.ndarray
    meta: SystemConfig
    direction_grid_size: int
    degenerate: tuple[int, ...] = field(default=())
    build_warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        for name in ("offsets", "delays", "phases"):
            a = np.array(getattr(self, name), dtype=np.float64, copy=True)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.offsets.ndim != 1 or self.offsets.size == 0:
            raise ValueError("offsets must be a non-empty vector")
        if np.any(np.diff(self.offsets) <= 0):
            raise ValueError("offsets must be strictly increasing")
        d = self.offsets.size
        n = self.meta.n_antennas
        if self.delays.shape != (d, n) or self.phases.shape != (d, n):
            raise ValueError(
                f"config arrays must be ({d}, {n}), got {self.delays.shape} and {self.phases.shape}"
            )

    @property
    def n_entries(self) -> int:
        return self.offsets.size

    def config(self, index: int) -> ArrayConfig:
        return ArrayConfig(self.delays[index], self.phases[index])

    def lookup(self, delta: float) -> ArrayConfig:
        """Nearest-neighbor entry for a direction offset; ties take the smaller offset."""
        if not -2.0 <= delta <= 2.0:
            raise ValueError(f"offset must lie in [-2, 2], got {delta}")
        idx = int(np.argmin(np.abs(self.offsets - delta)))
        return self.config(idx)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GeneratorDictionary):
            return NotImplemented
        return (
            self.meta == other.meta
            and self.direction_grid_size == other.direction_grid_size
            and self.offsets.tobytes() == other.offsets.tobytes()
            and self.delays.tobytes() == other.delays.tobytes()
            and self.phases.tobytes() == other.phases.tobytes()
        )


def lookup(dictionary: GeneratorDictionary, delta: float) -> ArrayConfig:
    return dictionary.lookup(delta)


def offset_grid(direction_grid_size: int) -> np.ndarray:
    """All pairwise differences of the A-point direction grid: 2A-1 values in [-2, 2]."""
    if direction_grid_size < 2:
        raise ValueError("direction grid needs at least 2 points")
    denom = direction_grid_size - 1
    k = np.arange(-denom, denom + 1, dtype=np.float64)
    return 2.0 * k / denom


def _two_subband_target(delta: float, cfg: SystemConfig) -> np.ndarray:
    """Ideal precoder steering the lower half-band at 0 and the upper at delta.

    Unlike user-facing direction maps, delta may exceed the visible range
    [-1, 1]: the steering formula extends smoothly and the out-of-range
    direction appears in-range through the pattern's aliasing.
    """
    psi = np.repeat([0.0, delta], cfg.n_subcarriers // 2)
    f = subcarrier_freqs(cfg)
    n = np.arange(cfg.n_antennas)
    phase = np.pi * np.outer(n, psi * f / cfg.carrier_freq)
    return np.exp(1j * phase) / np.sqrt(cfg.n_antennas)


def _gain_profile(phi: ArrayConfig, psi: float, cfg: SystemConfig) -> np.ndarray:
    """|gain| toward one (possibly out-of-range) direction at every subcarrier."""
    f = subcarrier_freqs(cfg)
    n = np.arange(cfg.n_antennas)
    phase = (
        -2.0 * np.pi * np.outer(phi.delays, f)
        + phi.phases[:, None]
        - np.pi * psi * np.outer(n, f / cfg.carrier_freq)
    )
    return np.abs(np.exp(1j * phase).sum(axis=0)) / np.sqrt(cfg.n_antennas)


def _center_params(phi: ArrayConfig, delta: float, cfg: SystemConfig) -> tuple[float, float] | None:
    """Bandwidth and center frequency that put both gain maxima at subband centers.

    Returns None in the degenerate case where both maxima fall on the same
    subcarrier.
    """
    m_count = cfg.n_subcarriers
    m1 = int(np.argmax(_gain_profile(phi, 0.0, cfg))) + 1
    m2 = int(np.argmax(_gain_profile(phi, delta, cfg))) + 1
    if m1 == m2:
        return None
    alpha = m_count / (2.0 * abs(m2 - m1))
    bw_new = cfg.bandwidth * alpha
    f1 = cfg.carrier_freq + m1 * cfg.bandwidth / m_count - cfg.bandwidth / 2.0
    f2 = cfg.carrier_freq + m2 * cfg.bandwidth / m_count - cfg.bandwidth / 2.0
    fc_new = cfg.carrier_freq - ((f1 + f2) / 2.0 - cfg.carrier_freq) * alpha
    return fc_new, bw_new


def postprocess_center(phi: ArrayConfig, delta: float, cfg: SystemConfig) -> ArrayConfig:
    """Re-center a two-subband config so its gain maxima sit at the subband centers.

    The band is rescaled so the two maxima land half the band apart and
    shifted so their frequency midpoint maps to the carrier.  Degenerate
    inputs (both maxima on one subcarrier) are returned unchanged.
    """
    from .hdb import scale_shift

    params = _center_params(phi, delta, cfg)
    if params is None:
        return phi
    fc_new, bw_new = params
    return scale_shift(phi, fc_new, bw_new, cfg)


def _build_one(delta: float, cfg: SystemConfig, solver: SolverParams) -> tuple[np.ndarray, np.ndarray, bool]:
    """Build a single offset entry; returns (delays, phases, degenerate)."""
    if delta == 0.0:
        z = zero_config(cfg.n_antennas)
        return np.asarray(z.delays), np.asarray(z.phases), False
    phi = fold_delay_periods(jpta_approx(_two_subband_target(delta, cfg), solver, cfg), cfg)
    params = _center_params(phi, delta, cfg)
    if params is None:
        return np.asarray(phi.delays), np.asarray(phi.phases), True
    from .hdb import scale_shift

    fc_new, bw_new = params
    out = scale_shift(phi, fc_new, bw_new, cfg)
    return np.asarray(out.delays), np.asarray(out.phases), False


def _build_chunk(args: tuple) -> list[tuple[np.ndarray, np.ndarray, bool]]:
    deltas, cfg, solver = args
    return [_build_one(d, cfg, solver) for d in deltas]


def _entry_diagnostics(
    dictionary_delta: float,
    phi: ArrayConfig,
    cfg: SystemConfig,
    direction_grid_size: int,
    gain_threshold: float,
) -> list[str]:
    """Fidelity checks for one non-degenerate entry: peak placement and minimum gain."""
    warnings: list[str] = []
    m_count = cfg.n_subcarriers
    half = m_count // 2
    targets = (0.0, dictionary_delta)
    floor = gain_threshold * np.sqrt(cfg.n_antennas)
    grid = PsiGrid.uniform(direction_grid_size)
    step = grid.step
    centers = (half // 2, half + half // 2)  # 0-based subband-center subcarriers
    f = subcarrier_freqs(cfg)
    n = np.arange(cfg.n_antennas)
    for band, (target, center_m) in enumerate(zip(targets, centers), start=1):
        band_gains = _gain_profile(phi, target, cfg)[(band - 1) * half : band * half]
        if band_gains.min() < floor:
            warnings.append(
                f"offset {dictionary_delta:+.6f}: subband {band} gain dips to "
                f"{band_gains.min():.3f} (< {floor:.3f})"
            )
        f_m = f[center_m]
        weights = np.exp(1j * (-2.0 * np.pi * f_m * phi.delays + phi.phases))
        column = np.exp(-1j * np.pi * np.outer(grid.points, n) * (f_m / cfg.carrier_freq)) @ weights
        peak = grid.points[int(np.argmax(np.abs(column)))]
        # the visible peak of direction d at frequency f_m is its alias
        # d - 2k*fc/f_m brought into [-1, 1]
        k = round(target * f_m / (2.0 * cfg.carrier_freq))
        expected = target - 2.0 * k * cfg.carrier_freq / f_m
        if abs(peak - expected) > 2.0 * step + 1e-12:
            warnings.append(
                f"offset {dictionary_delta:+.6f}: subband {band} peak at {peak:+.6f}, "
                f"{abs(peak - expected) / step:.1f} grid steps from expected {expected:+.6f}"
            )
    return warnings


def build_dictionary(
    cfg: SystemConfig,
    direction_grid_size: int,
    solver: SolverParams,
    *,
    workers: int | None = None,
    gain_threshold: float = 0.5,
) -> GeneratorDictionary:
    """Build the offset-indexed config table for a system.

    Each offset gets the two-subband config fitted against the ideal
    [0, offset] target, delay-folded, then re-centered; the zero offset is
    the zero config by construction.  Entries are independent and may build
    in parallel; the result is identical regardless of worker count.
    Fidelity findings are attached as ``build_warnings`` and degenerate
    entries listed in ``degenerate``; neither affects equality or
    persistence.
    """
    if cfg.n_subcarriers % 2 != 0:
        raise ValueError("dictionary construction needs an even subcarrier count")
    offsets = offset_grid(direction_grid_size)
    denom = direction_grid_size - 1
    deltas = [2.0 * k / denom for k in range(-denom, denom + 1)]

    n_workers = worker_count(workers)
    if n_workers > 1 and len(deltas) > 4:
        chunks = [(deltas[i::n_workers], cfg, solver) for i in range(n_workers)]
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            chunk_results = list(pool.map(_build_chunk, chunks))
        built: list[tuple[np.ndarray, np.ndarray, bool] | None] = [None] * len(deltas)
        for i, results in enumerate(chunk_results):
            for slot, one in zip(range(i, len(deltas), n_workers), results):
                built[slot] = one
    else:
        built = [_build_one(delta, cfg, solver) for delta in deltas]

    n = cfg.n_antennas
    delays = np.empty((offsets.size, n))
    phases = np.empty((offsets.size, n))
    degenerate: list[int] = []
    for i, (d, p, flagged) in enumerate(built):
        delays[i] = d
        phases[i] = p
        if flagged:
            degenerate.append(i)

    warnings: list[str] = []
    degenerate_set = set(degenerate)
    for i, delta in enumerate(deltas):
        if i in degenerate_set or delta == 0.0:
            continue
        warnings.extend(
            _entry_diagnostics(
                delta,
                ArrayConfig(delays[i], phases[i]),
                cfg,
                direction_grid_size,
                gain_threshold,
            )
        )

    return GeneratorDictionary(
        offsets=offsets,
        delays=delays,
        phases=phases,
        meta=cfg,
        direction_grid_size=direction_grid_size,
        degenerate=tuple(degenerate),
        build_warnings=tuple(warnings),
    )


def save(dictionary: GeneratorDictionary, path: str | os.PathLike) -> None:
    """Write the binary dictionary plus a JSON sidecar mirroring the header."""
    cfg = dictionary.meta
    header = _HEADER.pack(
        _MAGIC,
        _VERSION,
        cfg.n_antennas,
        dictionary.direction_grid_size,
        dictionary.n_entries,
        cfg.n_subcarriers,
        cfg.carrier_freq,
        cfg.bandwidth,
    )
    rows = np.hstack([dictionary.delays, dictionary.phases]).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(dictionary.offsets.astype("<f8").tobytes())
        fh.write(rows.tobytes())
    sidecar = {
        "magic": _MAGIC.decode("ascii"),
        "version": _VERSION,
        "n": cfg.n_antennas,
        "a": dictionary.direction_grid_size,
        "d": dictionary.n_entries,
        "m": cfg.n_subcarriers,
        "fc_hz": cfg.carrier_freq,
        "bw_hz": cfg.bandwidth,
    }
    with open(f"{os.fspath(path)}.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load(path: str | os.PathLike) -> GeneratorDictionary:
    """Read a dictionary written by :func:`save`; rejects corrupt files whole."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise DictionaryFormatError("file shorter than header")
    magic, version, n, a, d, m, fc, bw = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise DictionaryFormatError(f"bad magic {magic!r}")
    if version != _VERSION:
        raise DictionaryFormatError(f"unsupported version {version}")
    if n < 1 or d < 1 or m < 1 or a < 2:
        raise DictionaryFormatError("implausible header counts")
    expected = _HEADER.size + d * 8 + d * 2 * n * 8
    if len(blob) != expected:
        raise DictionaryFormatError(
            f"payload length {len(blob)} does not match header (expected {expected})"
        )
    offsets = np.frombuffer(blob, dtype="<f8", count=d, offset=_HEADER.size).copy()
    rows = (
        np.frombuffer(blob, dtype="<f8", count=d * 2 * n, offset=_HEADER.size + d * 8)
        .copy()
        .reshape(d, 2 * n)
    )
    return GeneratorDictionary(
        offsets=offsets,
        delays=rows[:, :n],
        phases=rows[:, n:],
        meta=SystemConfig(n, m, fc, bw),
        direction_grid_size=a,
    )
