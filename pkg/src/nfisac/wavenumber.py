"""Wavenumber-domain localization with a planar array.

A spherical wavefront sampled by a planar array spreads over a disk of
plane-wave components; the disk center encodes direction and its radius
shrinks as the source recedes, which gives a monotone radius-to-range map.
The whole pipeline runs on the magnitude spectrum, so it needs no timing or
phase synchronization: a global phase or delay on the snapshot cannot change
the output at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arrays import PolarPoint
from .constants import SPEED_OF_LIGHT as C
from .errors import AliasingError, CalibrationError, OutOfCalibrationError

# centroid snap (in bins) that makes estimates bit-identical under global phase
_CENTROID_SNAP = 1e-6


@dataclass(frozen=True)
class PlanarArray:
    """Uniform planar array in the x-z plane, centered at the origin.

    Spacings above half a wavelength shrink the alias-free wavenumber window;
    extract_support raises once the support disk touches the window border,
    which is the failure that actually matters here.
    """

    nx: int
    nz: int
    dx_m: float
    dz_m: float

    def __post_init__(self) -> None:
        if self.nx < 8 or self.nz < 8:
            raise ValueError("planar array needs at least 8x8 elements")
        if self.dx_m <= 0 or self.dz_m <= 0:
            raise ValueError("spacings must be > 0")

    def x_positions(self) -> np.ndarray:
        i = np.arange(self.nx, dtype=float)
        return (i - (self.nx - 1) / 2.0) * self.dx_m

    def z_positions(self) -> np.ndarray:
        k = np.arange(self.nz, dtype=float)
        return (k - (self.nz - 1) / 2.0) * self.dz_m

    def aperture_m(self) -> float:
        """Diagonal aperture, the longest baseline."""
        return float(np.hypot((self.nx - 1) * self.dx_m, (self.nz - 1) * self.dz_m))


@dataclass(frozen=True, eq=False)
class WavenumberSpectrum:
    """Centered magnitude-squared 2-D spectrum of an array snapshot."""

    values: np.ndarray  # (nx, nz), nonnegative
    center_bins: tuple  # zero-wavenumber bin indices


@dataclass(frozen=True)
class SupportCircle:
    """Equivalent-area disk summarizing the significant spectrum support."""

    center_bins: tuple  # (u0, v0) relative to the zero-wavenumber bin
    radius_bins: float
    threshold_used: float


@dataclass(frozen=True, eq=False)
class RadiusRangeTable:
    """Calibrated (range, support radius) pairs; radius strictly decreasing."""

    ranges_m: np.ndarray
    radii_bins: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.ranges_m, dtype=float)
        q = np.asarray(self.radii_bins, dtype=float)
        if r.size != q.size or r.size < 2:
            raise ValueError("table needs matching arrays of >= 2 entries")
        if np.any(np.diff(r) <= 0):
            raise ValueError("ranges_m must be strictly increasing")
        if np.any(np.diff(q) >= 0):
            raise CalibrationError("support radius must decrease strictly with range")
        object.__setattr__(self, "ranges_m", r)
        object.__setattr__(self, "radii_bins", q)

    def range_for_radius(self, radius_bins: float) -> float:
        lo, hi = float(self.radii_bins[-1]), float(self.radii_bins[0])
        if not lo <= radius_bins <= hi:
            raise OutOfCalibrationError(
                f"radius {radius_bins:.3f} bins outside calibrated [{lo:.3f}, {hi:.3f}]"
            )
        # radii decrease with range; reverse for increasing-x interpolation
        return float(np.interp(radius_bins, self.radii_bins[::-1], self.ranges_m[::-1]))


def upa_snapshot(
    arr: PlanarArray, source_xyz, freq_hz: float, global_phase_rad: float = 0.0
) -> np.ndarray:
    """Pure-phase spherical wavefront sampled on the planar array."""
    src = np.asarray(source_xyz, dtype=float)
    if src.shape != (3,):
        raise ValueError("source must be a 3-vector (x, y, z) in meters")
    if src[1] == 0.0:
        raise ValueError("source must be off the array plane (y != 0)")
    x = arr.x_positions()[:, None]
    z = arr.z_positions()[None, :]
    dist = np.sqrt((x - src[0]) ** 2 + src[1] ** 2 + (z - src[2]) ** 2)
    return np.exp(1j * (global_phase_rad - 2.0 * np.pi * freq_hz / C * dist))


def upa_rayleigh_distance(arr: PlanarArray, freq_hz: float) -> float:
    d_ap = arr.aperture_m()
    return 2.0 * d_ap * d_ap / (C / freq_hz)


def wavenumber_transform(snapshot: np.ndarray) -> WavenumberSpectrum:
    """Magnitude-squared unitary 2-D DFT, zero wavenumber at the matrix center."""
    snap = np.asarray(snapshot, dtype=complex)
    spec = np.abs(np.fft.fftshift(np.fft.fft2(snap, norm="ortho"))) ** 2
    center = (snap.shape[0] // 2, snap.shape[1] // 2)
    return WavenumberSpectrum(spec, center)


def extract_support(
    spec: WavenumberSpectrum, threshold_frac: float = 0.1
) -> SupportCircle:
    """Threshold the spectrum and summarize its support as a disk.

    Support touching the spectrum border means wavenumber content is aliased
    (array too small or source too close), so no circle can be trusted.
    """
    s = spec.values
    peak = float(s.max())
    if not peak > 0:
        raise ValueError("spectrum must have a positive peak")
    mask = s >= threshold_frac * peak
    iu, iv = np.nonzero(mask)
    if (
        iu.min() == 0
        or iv.min() == 0
        or iu.max() == s.shape[0] - 1
        or iv.max() == s.shape[1] - 1
    ):
        raise AliasingError("wavenumber support touches the spectrum border")
    energy = s[mask]
    u0 = float((iu * energy).sum() / energy.sum()) - spec.center_bins[0]
    v0 = float((iv * energy).sum() / energy.sum()) - spec.center_bins[1]
    # snap so a global snapshot phase cannot wiggle the last float ulps
    u0 = round(u0 / _CENTROID_SNAP) * _CENTROID_SNAP
    v0 = round(v0 / _CENTROID_SNAP) * _CENTROID_SNAP
    radius = float(np.sqrt(mask.sum() / np.pi))
    return SupportCircle((u0, v0), radius, threshold_frac)


def calibrate_radius_range(
    arr: PlanarArray,
    freq_hz: float,
    direction,
    range_sweep_m,
    threshold_frac: float = 0.1,
) -> RadiusRangeTable:
    """Run the forward pipeline over a range sweep along one direction.

    direction is a unit 3-vector off the array plane; sources sit at
    range * direction.
    """
    sweep = np.asarray(range_sweep_m, dtype=float)
    if sweep.size < 8:
        raise ValueError("range sweep needs at least 8 points")
    if np.any(np.diff(sweep) <= 0):
        raise ValueError("range sweep must be strictly increasing")
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    radii = []
    for r in sweep:
        snap = upa_snapshot(arr, r * d, freq_hz)
        circle = extract_support(wavenumber_transform(snap), threshold_frac)
        radii.append(circle.radius_bins)
    radii = np.asarray(radii)
    if np.any(np.diff(radii) >= 0):
        raise CalibrationError(
            "support radii are not strictly decreasing over the sweep; "
            "the sweep leaves the valid near-field window"
        )
    return RadiusRangeTable(sweep, radii)


def estimate_position(
    arr: PlanarArray,
    freq_hz: float,
    snapshot: np.ndarray,
    table: RadiusRangeTable,
    threshold_frac: Optional[float] = None,
) -> tuple:
    """Invert the calibrated map: snapshot -> (PolarPoint estimate, diagnostics).

    The polar angle is measured from the array's x axis, matching the linear
    array convention. Any global phase or timing offset on the snapshot leaves
    the result bit-identical.
    """
    frac = 0.1 if threshold_frac is None else threshold_frac
    circle = extract_support(wavenumber_transform(snapshot), frac)
    u0, v0 = circle.center_bins
    cos_x = C * u0 / (freq_hz * arr.nx * arr.dx_m)
    cos_z = C * v0 / (freq_hz * arr.nz * arr.dz_m)
    cos_x = float(np.clip(cos_x, -1.0, 1.0))
    range_m = table.range_for_radius(circle.radius_bins)
    estimate = PolarPoint(range_m, float(np.arccos(cos_x)))
    diagnostics = {
        "radius_bins": circle.radius_bins,
        "center_bins": circle.center_bins,
        "cos_x": cos_x,
        "cos_z": float(cos_z),
        "threshold_used": circle.threshold_used,
    }
    return estimate, diagnostics
