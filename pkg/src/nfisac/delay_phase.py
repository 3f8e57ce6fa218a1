"""Per-antenna true-time-delay plus phase-shifter front end.

Each antenna path applies a real delay and a frequency-flat phase, so the
per-subcarrier weight is exp(-j*(2*pi*f_m*delay_n + phase_n))/sqrt(N). Delays
make the phase slope track frequency, which lets one configuration point
different subcarriers at different spatial locations (a beam trajectory);
phases alone cannot (they are frequency-flat).

Fitting a requested trajectory reduces to per-antenna linear regression of
unwrapped target phase against frequency: slope -> delay, intercept -> phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .arrays import ArrayGeometry, CarrierGrid, PolarPoint, spherical_delays
from .codebook import Beamformer
from .errors import HardwareBoundError, IllConditionedSpecError

# adjacent-subcarrier detrended phase steps this close to pi are unresolvable
_UNWRAP_GUARD = 0.95 * np.pi


@dataclass(frozen=True, eq=False)
class DelayPhaseConfig:
    """Fitted per-antenna delays (s) and phase offsets (rad).

    Delays are nonnegative; after fitting, the common part is removed so the
    smallest delay is zero. max_delay_s, when set, is the hardware bound.
    """

    delays_s: np.ndarray
    phases_rad: np.ndarray
    max_delay_s: Optional[float] = None

    def __post_init__(self) -> None:
        d = np.asarray(self.delays_s, dtype=float)
        p = np.asarray(self.phases_rad, dtype=float)
        if d.shape != p.shape or d.ndim != 1:
            raise ValueError("delays_s and phases_rad must be matching 1-D arrays")
        if np.any(d < 0):
            raise HardwareBoundError("delays must be nonnegative")
        if self.max_delay_s is not None and np.any(d > self.max_delay_s):
            raise HardwareBoundError(
                f"delay {d.max():.3e} s exceeds hardware bound {self.max_delay_s:.3e} s"
            )
        object.__setattr__(self, "delays_s", d)
        object.__setattr__(self, "phases_rad", p)


@dataclass(frozen=True)
class Arc:
    """Constant-range angular segment, angles in (0, pi)."""

    theta_start_rad: float
    theta_end_rad: float
    range_m: float

    def __post_init__(self) -> None:
        if not self.theta_start_rad < self.theta_end_rad:
            raise ValueError("theta_start_rad must be < theta_end_rad")
        if not (0.0 < self.theta_start_rad and self.theta_end_rad < np.pi):
            raise ValueError("arc angles must lie in (0, pi)")
        if self.range_m <= 0:
            raise ValueError("range_m must be > 0")

    def angle_at(self, s: float) -> float:
        """Angle at arc parameter s in [0, 1]."""
        return self.theta_start_rad + s * (self.theta_end_rad - self.theta_start_rad)


@dataclass(frozen=True, eq=False)
class TrajectorySpec:
    """Desired focal point per subcarrier; indices unique and sorted."""

    entries: tuple  # of (subcarrier m, PolarPoint)

    def __post_init__(self) -> None:
        ms = [m for m, _ in self.entries]
        if len(ms) == 0:
            raise ValueError("trajectory spec must be nonempty")
        if sorted(set(ms)) != ms:
            raise ValueError("subcarrier indices must be unique and sorted")

    def subcarriers(self) -> np.ndarray:
        return np.array([m for m, _ in self.entries], dtype=int)

    def points(self) -> tuple:
        return tuple(p for _, p in self.entries)


def arc_trajectory_spec(
    grid: CarrierGrid, arc: Arc, subcarriers: Optional[Sequence[int]] = None
) -> TrajectorySpec:
    """Map subcarriers affinely onto the arc: m -> angle at parameter m/M.

    With the full set 0..M the requested points are uniformly spaced in angle;
    a subset keeps each member at the angle its index maps to, so any subset
    uniformly spread over 0..M covers the arc uniformly.
    """
    m_top = grid.num_subcarriers - 1
    if subcarriers is None:
        ms = range(grid.num_subcarriers)
    else:
        ms = list(subcarriers)
    entries = []
    for m in ms:
        s = m / m_top if m_top else 0.5
        entries.append((int(m), PolarPoint(arc.range_m, arc.angle_at(s))))
    return TrajectorySpec(tuple(entries))


def apply_delay_phase(cfg: DelayPhaseConfig, grid: CarrierGrid, m: int) -> Beamformer:
    """Weights the front end realizes at subcarrier m."""
    if cfg.max_delay_s is not None and np.any(cfg.delays_s > cfg.max_delay_s):
        raise HardwareBoundError("delay exceeds hardware bound")
    f = grid.freq(m)
    n = cfg.delays_s.size
    phase = 2.0 * np.pi * f * cfg.delays_s + cfg.phases_rad
    return Beamformer(np.exp(-1j * phase) / np.sqrt(n), None, "delay_phase")


def _wrap(x: np.ndarray) -> np.ndarray:
    return (x + np.pi) % (2.0 * np.pi) - np.pi


def _unwrap_seeded(wrapped: np.ndarray, seed_row: int) -> np.ndarray:
    """Unwrap along axis 0 outward from seed_row, leaving that row unchanged."""
    lower = np.unwrap(wrapped[: seed_row + 1][::-1], axis=0)[::-1]
    upper = np.unwrap(wrapped[seed_row:], axis=0)
    return np.concatenate([lower[:-1], upper], axis=0)


def fit_trajectory(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    spec: TrajectorySpec,
    max_delay_s: Optional[float] = None,
) -> tuple:
    """Least-squares delays and phases tracking the requested trajectory.

    Target phases are those of the conjugate-matched steering vectors at the
    requested points. They wind through many cycles across the band, so the
    analytic phase of the middle spec point is subtracted first; the slowly
    varying remainder is unwrapped outward from the middle subcarrier, the
    trend is added back, and each antenna gets an ordinary linear regression
    against frequency. Returns (DelayPhaseConfig, rms_residual_rad).

    The returned delays are shifted so the smallest is zero; that changes the
    weights by a per-subcarrier common phase only, so every gain |w^H a| is
    identical to the unshifted fit.
    """
    ms = spec.subcarriers()
    pts = spec.points()
    freqs = np.array([grid.freq(int(m)) for m in ms])
    dist = np.stack([spherical_delays(geom, p) for p in pts])  # (K, N) seconds
    targets = 2.0 * np.pi * freqs[:, None] * dist  # ideal continuous phase
    wrapped = _wrap(targets)

    if len(ms) == 1:
        delays = np.zeros(geom.num_elements)
        phases = wrapped[0]
        cfg = DelayPhaseConfig(delays, phases, max_delay_s)
        return cfg, 0.0

    mid = len(ms) // 2
    trend = 2.0 * np.pi * freqs[:, None] * dist[mid][None, :]
    detrended = _wrap(wrapped - _wrap(trend))
    steps = _wrap(np.diff(detrended, axis=0))
    worst = float(np.abs(steps).max())
    if worst >= _UNWRAP_GUARD:
        raise IllConditionedSpecError(
            f"adjacent-subcarrier phase step {worst:.3f} rad is too close to pi; "
            "trajectory varies too fast for reliable unwrapping"
        )
    unwrapped = _unwrap_seeded(detrended, mid) + trend

    x = freqs - grid.center_hz
    xm = x.mean()
    xc = x - xm
    denom = float(xc @ xc)
    slopes = (xc @ unwrapped) / denom
    intercepts = unwrapped.mean(axis=0) - slopes * xm  # value at f = f_c
    delays = slopes / (2.0 * np.pi)
    phases = _wrap(intercepts - 2.0 * np.pi * grid.center_hz * delays)

    fitted = 2.0 * np.pi * freqs[:, None] * delays[None, :] + phases[None, :]
    resid = _wrap(targets - fitted)
    rms = float(np.sqrt(np.mean(resid**2)))

    delays = delays - delays.min()
    cfg = DelayPhaseConfig(delays, phases, max_delay_s)
    return cfg, rms
