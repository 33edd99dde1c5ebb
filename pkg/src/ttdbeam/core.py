"""Array model for a true-time-delay ULA: configs, precoders, beampatterns.

A uniform linear array with half-wavelength spacing at the carrier is driven
through one time delay and one phase shifter per antenna.  Everything here is
a pure function of its inputs; the value types are immutable and safe to
share across threads.

Sine-space convention: a direction is psi = sin(theta) in [-1, 1], and the
steering exponent at subcarrier frequency f is ``-j * n * pi * psi * f / fc``
(standard half-wavelength ULA referenced to the carrier).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemConfig",
    "ArrayConfig",
    "PsiGrid",
    "Beampattern",
    "subcarrier_freqs",
    "precoder_matrix",
    "beampattern_of_precoder",
    "beampattern_of_config",
    "compose",
    "gain_at",
    "gain_at_directions",
    "argmax_directions",
    "wrap_sine",
    "zero_config",
    "config_to_json_dict",
    "config_from_json_dict",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def wrap_sine(x: float) -> float:
    """Wrap a sine-space value into (-1, 1] by shifting multiples of 2."""
    return float(x - 2.0 * math.ceil((x - 1.0) / 2.0))


@dataclass(frozen=True)
class SystemConfig:
    """OFDM system: N antennas, M subcarriers over bandwidth centered at fc."""

    n_antennas: int
    n_subcarriers: int
    carrier_freq: float
    bandwidth: float

    def __post_init__(self) -> None:
        if self.n_antennas < 1:
            raise ValueError(f"n_antennas must be >= 1, got {self.n_antennas}")
        if self.n_subcarriers < 1:
            raise ValueError(f"n_subcarriers must be >= 1, got {self.n_subcarriers}")
        if not (self.carrier_freq > self.bandwidth / 2.0 > 0.0):
            raise ValueError(
                "require carrier_freq > bandwidth/2 > 0, got "
                f"fc={self.carrier_freq}, bw={self.bandwidth}"
            )


def subcarrier_freqs(cfg: SystemConfig) -> np.ndarray:
    """Frequencies f_m = fc + m*BW/M - BW/2 for m = 1..M, in Hz."""
    m = np.arange(1, cfg.n_subcarriers + 1, dtype=np.float64)
    return cfg.carrier_freq + m * (cfg.bandwidth / cfg.n_subcarriers) - cfg.bandwidth / 2.0


@dataclass(frozen=True)
class ArrayConfig:
    """Per-antenna time delays (seconds) and phase shifts (radians).

    Adding two configs adds both vectors elementwise.  Negative delays are
    permitted; they are only flagged against a hardware range at export time
    (shifting them out would alter the frequency dependence of the pattern).
    """

    delays: np.ndarray
    phases: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "delays", _readonly(self.delays))
        object.__setattr__(self, "phases", _readonly(self.phases))
        if self.delays.ndim != 1 or self.phases.ndim != 1:
            raise ValueError("delays and phases must be 1-D vectors")
        if self.delays.shape != self.phases.shape:
            raise ValueError(
                f"delay/phase length mismatch: {self.delays.shape} vs {self.phases.shape}"
            )
        if not (np.all(np.isfinite(self.delays)) and np.all(np.isfinite(self.phases))):
            raise ValueError("delays and phases must be finite")

    @property
    def n_antennas(self) -> int:
        return self.delays.shape[0]

    def __add__(self, other: "ArrayConfig") -> "ArrayConfig":
        if not isinstance(other, ArrayConfig):
            return NotImplemented
        if other.n_antennas != self.n_antennas:
            raise ValueError(
                f"cannot add configs with {self.n_antennas} and {other.n_antennas} antennas"
            )
        return ArrayConfig(self.delays + other.delays, self.phases + other.phases)


def zero_config(n_antennas: int) -> ArrayConfig:
    """All-zero config: broadside steering, identity under composition."""
    z = np.zeros(n_antennas)
    return ArrayConfig(z, z)


@dataclass(frozen=True)
class PsiGrid:
    """Strictly increasing sample points in sine space, within [-1, 1]."""

    points: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", _readonly(self.points))
        if self.points.ndim != 1 or self.points.size < 2:
            raise ValueError("grid needs at least 2 points")
        if np.any(np.diff(self.points) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if self.points[0] < -1.0 or self.points[-1] > 1.0:
            raise ValueError("grid points must lie in [-1, 1]")

    @classmethod
    def uniform(cls, n_points: int = 1001) -> "PsiGrid":
        return cls(np.linspace(-1.0, 1.0, n_points))

    @property
    def step(self) -> float:
        return float(self.points[1] - self.points[0])

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class Beampattern:
    """Complex gains sampled on a PsiGrid (rows) per subcarrier (columns)."""

    gains: np.ndarray
    grid: PsiGrid

    def __post_init__(self) -> None:
        g = np.array(self.gains, dtype=np.complex128, copy=True)
        g.setflags(write=False)
        object.__setattr__(self, "gains", g)
        if g.ndim != 2 or g.shape[0] != len(self.grid):
            raise ValueError(
                f"gains shape {g.shape} inconsistent with grid of {len(self.grid)} points"
            )


def precoder_matrix(phi: ArrayConfig, cfg: SystemConfig) -> np.ndarray:
    """N x M per-subcarrier beamforming weights realized by the hardware.

    Entry (n, m) is ``exp(j*(-2*pi*f_m*t_n + phi_n)) / sqrt(N)``; every entry
    has magnitude 1/sqrt(N).
    """
    if phi.n_antennas != cfg.n_antennas:
        raise ValueError(
            f"config has {phi.n_antennas} antennas, system expects {cfg.n_antennas}"
        )
    f = subcarrier_freqs(cfg)
    phase = -2.0 * np.pi * np.outer(phi.delays, f) + phi.phases[:, None]
    return np.exp(1j * phase) / np.sqrt(cfg.n_antennas)


def beampattern_of_precoder(v: np.ndarray, cfg: SystemConfig, grid: PsiGrid) -> Beampattern:
    """Array response P(psi, m) = sum_n v[n,m] * exp(-j*n*pi*psi*f_m/fc).

    Evaluated for every grid point and subcarrier.  Linear in v.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 2 or v.shape != (cfg.n_antennas, cfg.n_subcarriers):
        raise ValueError(
            f"precoder shape {v.shape} does not match (N, M)="
            f"({cfg.n_antennas}, {cfg.n_subcarriers})"
        )
    f = subcarrier_freqs(cfg)
    # Horner evaluation in z = exp(-j*pi*psi*f/fc): avoids the (grid, N, M) cube.
    z = np.exp(-1j * np.pi * np.outer(grid.points, f / cfg.carrier_freq))
    acc = np.broadcast_to(v[-1], z.shape).copy()
    for n in range(cfg.n_antennas - 2, -1, -1):
        acc *= z
        acc += v[n]
    return Beampattern(acc, grid)


def beampattern_of_config(phi: ArrayConfig, cfg: SystemConfig, grid: PsiGrid) -> Beampattern:
    """Beampattern generated by a delay/phase config (precoder then response)."""
    return beampattern_of_precoder(precoder_matrix(phi, cfg), cfg, grid)


def compose(phi1: ArrayConfig, phi2: ArrayConfig, cfg: SystemConfig, grid: PsiGrid) -> Beampattern:
    """Pattern of the summed configuration phi1 + phi2.

    Equals the sqrt(N)-scaled column-wise circular convolution of the two
    individual patterns over one period of the response; evaluating the sum
    config in the antenna domain gives that composition exactly, without any
    discretization of the convolution.
    """
    return beampattern_of_config(phi1 + phi2, cfg, grid)


def gain_at(phi: ArrayConfig, psi: float, m: int, cfg: SystemConfig) -> complex:
    """Pattern value at a single (psi, m) point in O(N) time.

    ``m`` is the 1-based subcarrier index.
    """
    if not -1.0 <= psi <= 1.0:
        raise ValueError(f"psi must lie in [-1, 1], got {psi}")
    if not 1 <= m <= cfg.n_subcarriers:
        raise IndexError(f"subcarrier index {m} out of range 1..{cfg.n_subcarriers}")
    if phi.n_antennas != cfg.n_antennas:
        raise ValueError("config/system antenna count mismatch")
    f_m = cfg.carrier_freq + m * (cfg.bandwidth / cfg.n_subcarriers) - cfg.bandwidth / 2.0
    n = np.arange(cfg.n_antennas)
    phase = -2.0 * np.pi * f_m * phi.delays + phi.phases - n * np.pi * psi * f_m / cfg.carrier_freq
    return complex(np.exp(1j * phase).sum() / np.sqrt(cfg.n_antennas))


def gain_at_directions(phi: ArrayConfig, per_subcarrier_psi: np.ndarray, cfg: SystemConfig) -> np.ndarray:
    """Pattern value at subcarrier m evaluated in direction psi_m, for all m.

    Vectorized form of :func:`gain_at` used by the evaluation harness; avoids
    synthesizing a full grid when only one direction per subcarrier matters.
    Uses only elementwise ops and a fixed-order sum, so results do not depend
    on BLAS threading.
    """
    psi = np.asarray(per_subcarrier_psi, dtype=np.float64)
    if psi.shape != (cfg.n_subcarriers,):
        raise ValueError(f"need one direction per subcarrier, got shape {psi.shape}")
    if np.any(np.abs(psi) > 1.0):
        raise ValueError("directions must lie in [-1, 1]")
    f = subcarrier_freqs(cfg)
    n = np.arange(cfg.n_antennas)
    phase = (
        -2.0 * np.pi * np.outer(phi.delays, f)
        + phi.phases[:, None]
        - np.pi * np.outer(n, psi * f / cfg.carrier_freq)
    )
    return np.exp(1j * phase).sum(axis=0) / np.sqrt(cfg.n_antennas)


def argmax_directions(pattern: Beampattern) -> np.ndarray:
    """Grid direction of the magnitude peak in each subcarrier column."""
    idx = np.argmax(np.abs(pattern.gains), axis=0)
    return pattern.grid.points[idx]


def config_to_json_dict(phi: ArrayConfig, cfg: SystemConfig, t_max: float | None = None) -> dict:
    """JSON-exportable form of a config, with the system it was built for.

    Warns when delays fall outside the hardware range [0, t_max]; the config
    itself is exported unchanged.
    """
    lo = float(np.min(phi.delays))
    hi = float(np.max(phi.delays))
    if lo < 0.0 or (t_max is not None and hi > t_max):
        rng = f"[0, {t_max}]" if t_max is not None else "[0, inf)"
        warnings.warn(
            f"delays span [{lo:.3e}, {hi:.3e}] s, outside hardware range {rng}",
            stacklevel=2,
        )
    return {
        "n": phi.n_antennas,
        "delays_s": [float(x) for x in phi.delays],
        "phases_rad": [float(x) for x in phi.phases],
        "fc_hz": cfg.carrier_freq,
        "bw_hz": cfg.bandwidth,
        "m": cfg.n_subcarriers,
    }


def config_from_json_dict(d: dict) -> tuple[ArrayConfig, SystemConfig]:
    """Inverse of :func:`config_to_json_dict`."""
    phi = ArrayConfig(np.asarray(d["delays_s"], dtype=np.float64),
                      np.asarray(d["phases_rad"], dtype=np.float64))
    if phi.n_antennas != int(d["n"]):
        raise ValueError("antenna count field disagrees with vector lengths")
    cfg = SystemConfig(int(d["n"]), int(d["m"]), float(d["fc_hz"]), float(d["bw_hz"]))
    return phi, cfg
