"""2-D (angle, range) MUSIC on a linear array with single-frequency snapshots.

The spherical-wavefront manifold depends on range as well as angle below the
near/far boundary, so scanning the MUSIC spectrum over a polar grid estimates
both jointly. The number of sources is an input; no model-order selection.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayGeometry, CarrierGrid, PolarPoint, spherical_delay_matrix, spherical_delays
from .codebook import PolarGrid
from .constants import SPEED_OF_LIGHT as C
from .errors import BoundaryPeakWarning

_CHUNK_ENTRIES = 2_000_000


@dataclass(frozen=True, eq=False)
class SampleCovariance:
    """Hermitian PSD snapshot covariance and the snapshot count behind it."""

    matrix: np.ndarray
    snapshot_count: int

    def __post_init__(self) -> None:
        r = np.asarray(self.matrix, dtype=complex)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError("covariance must be square")
        asym = float(np.abs(r - r.conj().T).max())
        if asym > 1e-10:
            raise ValueError(f"covariance asymmetry {asym:.2e} exceeds 1e-10")
        eig = np.linalg.eigvalsh(r)
        if eig[0] < -1e-9 * max(eig[-1], 0.0):
            raise ValueError("covariance is not positive semidefinite")
        object.__setattr__(self, "matrix", r)


@dataclass(frozen=True, eq=False)
class MusicSpectrum:
    """1 / ||E_n^H a||^2 over a polar grid; larger = closer to the manifold."""

    values: np.ndarray  # (num_angles, num_ranges)
    grid: PolarGrid
    num_sources: int


def collect_snapshots(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    sources,
    snapshot_count: int,
    noise_power: float,
    seed: int,
) -> np.ndarray:
    """Rows are snapshots: x_t = sum_s s_{s,t} a_{M/2}(p_s) + n_t.

    Source symbols are unit-power circular complex; noise is circular complex
    with the given power per antenna.
    """
    sources = list(sources)
    if snapshot_count <= len(sources):
        raise ValueError("snapshot_count must exceed the number of sources")
    if noise_power < 0:
        raise ValueError("noise_power must be >= 0")
    rng = np.random.default_rng(seed)
    t_count, n = snapshot_count, geom.num_elements
    x = np.zeros((t_count, n), dtype=complex)
    fc = grid.center_hz
    for p in sources:
        a = np.exp(-2j * np.pi * fc * spherical_delays(geom, p))
        symbols = (rng.standard_normal(t_count) + 1j * rng.standard_normal(t_count)) / np.sqrt(2)
        x += symbols[:, None] * a[None, :]
    if noise_power > 0:
        noise = (rng.standard_normal((t_count, n)) + 1j * rng.standard_normal((t_count, n)))
        x += np.sqrt(noise_power / 2) * noise
    return x


def sample_covariance(snapshots: np.ndarray) -> SampleCovariance:
    """R = (1/T) sum_t x_t x_t^H for row-snapshots, symmetrized exactly."""
    x = np.asarray(snapshots, dtype=complex)
    t_count = x.shape[0]
    r = x.T @ x.conj() / t_count
    r = (r + r.conj().T) / 2
    return SampleCovariance(r, t_count)


def _signal_subspace(cov: SampleCovariance, num_sources: int) -> np.ndarray:
    n = cov.matrix.shape[0]
    if not 0 < num_sources < n:
        raise ValueError("num_sources must lie in 1..N-1")
    _, vecs = np.linalg.eigh(cov.matrix)  # ascending eigenvalues
    return vecs[:, n - num_sources:]


def music_spectrum(
    cov: SampleCovariance,
    geom: ArrayGeometry,
    grid: CarrierGrid,
    pg: PolarGrid,
    num_sources: int,
) -> MusicSpectrum:
    """Evaluate the MUSIC spectrum on the polar grid at the center frequency.

    Uses ||E_n^H a||^2 = N - ||E_s^H a||^2, so only the small signal subspace
    is projected.
    """
    e_s = _signal_subspace(cov, num_sources)
    n = geom.num_elements
    fc = grid.center_hz
    rr, aa = np.meshgrid(pg.ranges_m, pg.angles_rad, indexing="xy")
    taus = (rr / C).ravel()
    cosines = np.cos(aa).ravel()
    den = np.empty(taus.size, dtype=float)
    es_conj = e_s.conj()
    chunk = max(1, _CHUNK_ENTRIES // n)
    for lo in range(0, taus.size, chunk):
        hi = min(lo + chunk, taus.size)
        delays = spherical_delay_matrix(geom, taus[lo:hi], cosines[lo:hi])
        a = np.exp(-2j * np.pi * fc * delays)
        proj = np.abs(a @ es_conj) ** 2
        den[lo:hi] = n - proj.sum(axis=1)
    den = np.maximum(den, np.finfo(float).tiny)
    values = (1.0 / den).reshape(pg.shape)
    return MusicSpectrum(values, pg, num_sources)


def _local_maxima(values: np.ndarray) -> np.ndarray:
    """Boolean mask of 4-neighborhood local maxima (plateau counted once)."""
    peak = np.ones_like(values, dtype=bool)
    peak[1:, :] &= values[1:, :] > values[:-1, :]
    peak[:-1, :] &= values[:-1, :] >= values[1:, :]
    peak[:, 1:] &= values[:, 1:] > values[:, :-1]
    peak[:, :-1] &= values[:, :-1] >= values[:, 1:]
    return peak


def music_localize(
    cov: SampleCovariance,
    geom: ArrayGeometry,
    grid: CarrierGrid,
    pg: PolarGrid,
    num_sources: int,
) -> list:
    """Largest local maxima of the MUSIC spectrum, sorted by peak height.

    Ties break toward smaller range. A peak on the grid boundary triggers a
    BoundaryPeakWarning, since the true maximum may lie outside the grid.
    """
    spec = music_spectrum(cov, geom, grid, pg, num_sources)
    values = spec.values
    mask = _local_maxima(values)
    ia, ir = np.nonzero(mask)
    if ia.size == 0:
        return []
    order = sorted(
        range(ia.size),
        key=lambda k: (-values[ia[k], ir[k]], pg.ranges_m[ir[k]], pg.angles_rad[ia[k]]),
    )
    picked = order[:num_sources]
    n_ang, n_rng = pg.shape
    results = []
    for k in picked:
        a_i, r_i = int(ia[k]), int(ir[k])
        if a_i in (0, n_ang - 1) or r_i in (0, n_rng - 1):
            warnings.warn(
                "MUSIC peak on the evaluation grid boundary", BoundaryPeakWarning
            )
        results.append(PolarPoint(float(pg.ranges_m[r_i]), float(pg.angles_rad[a_i])))
    return results
