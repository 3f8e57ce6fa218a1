"""Beamforming codewords and polar-grid gain evaluation.

A codeword is a unit-norm weight vector; its gain at a point is |w^H a|^2
against the spherical-wavefront steering vector there, which is at most N and
reaches N exactly when w conjugate-matches the steering vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arrays import ArrayGeometry, CarrierGrid, PolarPoint, spherical_delay_matrix, spherical_delays
from .constants import SPEED_OF_LIGHT as C

# chunk rows so a gain evaluation never materializes more than ~32 MB of phases
_CHUNK_ENTRIES = 2_000_000


@dataclass(frozen=True, eq=False)
class Beamformer:
    """Unit-power beamforming weights and how they were designed."""

    weights: np.ndarray
    design_point: Optional[PolarPoint] = None
    design_model: str = "custom"  # dft_angle | polar_point | delay_phase | custom

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=complex)
        norm = float(np.linalg.norm(w))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("beamformer weights must have unit l2 norm")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True, eq=False)
class PolarGrid:
    """Cartesian product of sorted angle and range axes."""

    angles_rad: np.ndarray
    ranges_m: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.angles_rad, dtype=float)
        r = np.asarray(self.ranges_m, dtype=float)
        if a.size > 1 and np.any(np.diff(a) <= 0):
            raise ValueError("angles_rad must be strictly increasing")
        if r.size > 1 and np.any(np.diff(r) <= 0):
            raise ValueError("ranges_m must be strictly increasing")
        if np.any(r <= 0):
            raise ValueError("ranges_m must be positive")
        object.__setattr__(self, "angles_rad", a)
        object.__setattr__(self, "ranges_m", r)

    @classmethod
    def regular(
        cls,
        range_min_m: float,
        range_max_m: float,
        num_angles: int = 721,
        ranges_per_decade: int = 60,
    ) -> "PolarGrid":
        """Default evaluation grid: angles interior to (0, pi), log-spaced ranges."""
        angles = np.linspace(0.0, np.pi, num_angles + 2)[1:-1]
        decades = np.log10(range_max_m / range_min_m)
        num_ranges = max(2, int(np.ceil(ranges_per_decade * decades)) + 1)
        ranges = np.geomspace(range_min_m, range_max_m, num_ranges)
        return cls(angles, ranges)

    @property
    def shape(self) -> tuple:
        return (self.angles_rad.size, self.ranges_m.size)


@dataclass(frozen=True, eq=False)
class GainMap:
    """|w^H a_m|^2 over a PolarGrid; shape (num_angles, num_ranges)."""

    values: np.ndarray
    grid: PolarGrid
    subcarrier_index: int


def dft_codeword(geom: ArrayGeometry, grid: CarrierGrid, angle_rad: float) -> Beamformer:
    """Frequency-flat codeword matched to the planar wavefront at angle_rad."""
    if not 0.0 < angle_rad < np.pi:
        raise ValueError("angle_rad must lie in (0, pi)")
    n = geom.num_elements
    phase = 2.0 * np.pi * grid.center_hz * geom.element_offsets_s * np.cos(angle_rad)
    return Beamformer(np.exp(1j * phase) / np.sqrt(n), None, "dft_angle")


def polar_codeword(geom: ArrayGeometry, grid: CarrierGrid, p: PolarPoint) -> Beamformer:
    """Codeword matched to the spherical wavefront at p at the center subcarrier.

    w equals the center-frequency steering vector scaled to unit norm, so
    |w^H a| is maximal (= sqrt(N)) exactly at the design point.
    """
    n = geom.num_elements
    phase = 2.0 * np.pi * grid.center_hz * spherical_delays(geom, p)
    return Beamformer(np.exp(-1j * phase) / np.sqrt(n), p, "polar_point")


def gains_at_freq(
    geom: ArrayGeometry,
    freq_hz: float,
    taus: np.ndarray,
    cosines: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    """|w^H a|^2 at one frequency over matched (tau, cos) point arrays."""
    taus = np.asarray(taus, dtype=float)
    cosines = np.asarray(cosines, dtype=float)
    out = np.empty(taus.size, dtype=float)
    wc = np.conj(weights)
    chunk = max(1, _CHUNK_ENTRIES // geom.num_elements)
    for lo in range(0, taus.size, chunk):
        hi = min(lo + chunk, taus.size)
        delays = spherical_delay_matrix(geom, taus[lo:hi], cosines[lo:hi])
        a = np.exp(-2j * np.pi * freq_hz * delays)
        out[lo:hi] = np.abs(a @ wc) ** 2
    return out


def gain_map(
    geom: ArrayGeometry, grid: CarrierGrid, w: Beamformer, m: int, pg: PolarGrid
) -> GainMap:
    """Evaluate the codeword's gain on every grid point at subcarrier m."""
    if pg.angles_rad.size == 0 or pg.ranges_m.size == 0:
        raise ValueError("polar grid must be nonempty")
    f = grid.freq(m)
    rr, aa = np.meshgrid(pg.ranges_m, pg.angles_rad, indexing="xy")
    gains = gains_at_freq(geom, f, (rr / C).ravel(), np.cos(aa).ravel(), w.weights)
    return GainMap(gains.reshape(pg.shape), pg, m)


def angular_spread(geom: ArrayGeometry, grid: CarrierGrid, p: PolarPoint) -> float:
    """Fraction of steering-vector energy in the strongest angular (DFT) bin.

    Far-field vectors at bin-aligned angles concentrate in one bin (fraction 1);
    shrinking the range diffuses energy across bins and lowers the fraction.
    """
    delays = spherical_delays(geom, p)
    a = np.exp(-2j * np.pi * grid.center_hz * delays)
    spectrum = np.abs(np.fft.fft(a, norm="ortho")) ** 2
    return float(spectrum.max() / spectrum.sum())
