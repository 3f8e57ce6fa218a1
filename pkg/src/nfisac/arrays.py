"""Uniform linear array geometry and wavefront steering models.

The spherical model keeps the exact per-element propagation distance, so it is
valid arbitrarily close to the array; the planar model linearizes the distance
in the element offset and is the classical far-field approximation. Both are
pure phase models: element amplitudes are identically one.

All quantities are SI (Hz, m, s, rad). Angles are measured from the array
axis, so broadside is pi/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import SPEED_OF_LIGHT as C


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Uniform linear array on a line, described by signed element offsets.

    element_offsets_s[n] is the signed propagation time from the array center
    to element n along the array axis; offsets are symmetric about zero and
    strictly increasing.
    """

    num_elements: int
    spacing_m: float
    element_offsets_s: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n, d = self.num_elements, self.spacing_m
        if n < 1:
            raise ValueError("num_elements must be >= 1")
        if d <= 0:
            raise ValueError("spacing_m must be > 0")
        t = np.asarray(self.element_offsets_s, dtype=float)
        if t.shape != (n,):
            raise ValueError("element_offsets_s must have one entry per element")
        if abs(float(t.sum())) > 1e-15:
            raise ValueError("element offsets must be symmetric about zero")
        if n > 1:
            steps = np.diff(t)
            if np.any(steps <= 0):
                raise ValueError("element offsets must be strictly increasing")
            if np.any(np.abs(steps - d / C) > 1e-12 * d / C):
                raise ValueError("adjacent offset difference must equal spacing_m/c")
        object.__setattr__(self, "element_offsets_s", t)

    @classmethod
    def ula(cls, num_elements: int, spacing_m: float) -> "ArrayGeometry":
        """Centered ULA: offset of element n is (n - (N-1)/2) * d / c."""
        n = np.arange(num_elements, dtype=float)
        t = (n - (num_elements - 1) / 2.0) * spacing_m / C
        return cls(num_elements, spacing_m, t)

    def aperture_m(self) -> float:
        return (self.num_elements - 1) * self.spacing_m


@dataclass(frozen=True)
class PolarPoint:
    """A location (range, angle) relative to the array center."""

    range_m: float
    angle_rad: float

    def __post_init__(self) -> None:
        if not self.range_m > 0:
            raise ValueError("range_m must be > 0")
        if not 0.0 < self.angle_rad < np.pi:
            raise ValueError("angle_rad must lie in (0, pi)")

    def delay_s(self) -> float:
        return self.range_m / C


@dataclass(frozen=True)
class CarrierGrid:
    """Uniformly spaced OFDM subcarriers around a center frequency.

    num_subcarriers is M+1 with M even, so subcarrier M/2 sits exactly at the
    center frequency.
    """

    center_hz: float
    num_subcarriers: int
    spacing_hz: float

    def __post_init__(self) -> None:
        if self.center_hz <= 0:
            raise ValueError("center_hz must be > 0")
        if self.num_subcarriers < 1 or self.num_subcarriers % 2 == 0:
            raise ValueError("num_subcarriers must be odd (M even)")
        if self.spacing_hz < 0:
            raise ValueError("spacing_hz must be >= 0")
        if self.freq(0) <= 0:
            raise ValueError("lowest subcarrier frequency must be > 0")

    @property
    def half_m(self) -> int:
        """M/2, the center subcarrier index."""
        return (self.num_subcarriers - 1) // 2

    def freq(self, m: int) -> float:
        if not 0 <= m < self.num_subcarriers:
            raise IndexError(f"subcarrier index {m} out of range 0..{self.num_subcarriers - 1}")
        return self.center_hz + (m - self.half_m) * self.spacing_hz

    def freqs(self) -> np.ndarray:
        m = np.arange(self.num_subcarriers, dtype=float)
        return self.center_hz + (m - self.half_m) * self.spacing_hz

    def bandwidth_hz(self) -> float:
        return (self.num_subcarriers - 1) * self.spacing_hz


@dataclass(frozen=True, eq=False)
class SteeringVector:
    """Per-antenna complex response at one subcarrier; entries unit modulus."""

    values: np.ndarray
    subcarrier_index: int
    model_tag: str  # "near_field" or "far_field"


@dataclass(frozen=True, eq=False)
class ChannelSnapshot:
    """Multipath channel: per-subcarrier superposition of steered paths."""

    matrix: np.ndarray  # (num_subcarriers, num_elements)
    path_list: tuple  # of (PolarPoint, complex gain)


def spherical_delays(geom: ArrayGeometry, p: PolarPoint) -> np.ndarray:
    """Exact per-element propagation delay (seconds) from point p."""
    tau = p.delay_s()
    t = geom.element_offsets_s
    return np.sqrt(tau * tau + t * t - 2.0 * tau * t * np.cos(p.angle_rad))


def spherical_delay_matrix(
    geom: ArrayGeometry, taus: np.ndarray, cosines: np.ndarray
) -> np.ndarray:
    """Per-element delays for many points at once, shape (len(taus), N).

    taus and cosines are matched 1-D arrays of point delays r/c and cos(angle).
    """
    t = geom.element_offsets_s[None, :]
    taus = np.asarray(taus, dtype=float)[:, None]
    cosines = np.asarray(cosines, dtype=float)[:, None]
    return np.sqrt(taus * taus + t * t - 2.0 * taus * t * cosines)


def _check_source_range(geom: ArrayGeometry, p: PolarPoint) -> None:
    # source inside the aperture breaks the point-source phase model
    if p.range_m <= geom.aperture_m() / 2:
        raise ValueError("source range must exceed half the aperture")


def near_field_steering(
    geom: ArrayGeometry, p: PolarPoint, grid: CarrierGrid, m: int
) -> SteeringVector:
    """Spherical-wavefront steering vector at subcarrier m."""
    _check_source_range(geom, p)
    f = grid.freq(m)
    values = np.exp(-2j * np.pi * f * spherical_delays(geom, p))
    return SteeringVector(values, m, "near_field")


def far_field_steering(
    geom: ArrayGeometry, p: PolarPoint, grid: CarrierGrid, m: int
) -> SteeringVector:
    """Planar-wavefront steering vector at subcarrier m."""
    _check_source_range(geom, p)
    f = grid.freq(m)
    delays = p.delay_s() - geom.element_offsets_s * np.cos(p.angle_rad)
    return SteeringVector(np.exp(-2j * np.pi * f * delays), m, "far_field")


def rayleigh_distance(geom: ArrayGeometry, grid: CarrierGrid) -> float:
    """Near/far boundary 2*D^2/lambda for aperture D at the center frequency."""
    wavelength = C / grid.center_hz
    d_ap = geom.aperture_m()
    return 2.0 * d_ap * d_ap / wavelength


def synthesize_channel(
    geom: ArrayGeometry, grid: CarrierGrid, paths: list
) -> ChannelSnapshot:
    """Superpose spherical-wavefront paths into an (M+1, N) channel matrix.

    paths is a list of (PolarPoint, complex gain).
    """
    if not paths:
        raise ValueError("path list must be nonempty")
    freqs = grid.freqs()
    matrix = np.zeros((grid.num_subcarriers, geom.num_elements), dtype=complex)
    for point, gain in paths:
        _check_source_range(geom, point)
        delays = spherical_delays(geom, point)
        matrix += gain * np.exp(-2j * np.pi * freqs[:, None] * delays[None, :])
    return ChannelSnapshot(matrix, tuple((p, complex(g)) for p, g in paths))
