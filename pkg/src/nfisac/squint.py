"""Per-subcarrier beam focal points and squint deviation metrics.

A frequency-flat (or delay-phase) codeword focuses different subcarriers at
different points; the focal trajectory is the per-subcarrier argmax of
|w^H a_m| over a polar evaluation grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arrays import ArrayGeometry, CarrierGrid, PolarPoint, spherical_delay_matrix
from .codebook import Beamformer, PolarGrid
from .constants import SPEED_OF_LIGHT as C

_CHUNK_ENTRIES = 2_000_000


@dataclass(frozen=True, eq=False)
class SquintTrajectory:
    """Focal point and peak gain per subcarrier over an evaluation grid."""

    subcarriers: np.ndarray  # m = 0..M
    points: tuple  # of PolarPoint, length M+1
    gains: np.ndarray  # peak |w^H a_m|^2 per subcarrier
    boundary_warning: bool

    def __len__(self) -> int:
        return len(self.points)


def focal_points(
    geom: ArrayGeometry, grid: CarrierGrid, w: Beamformer, pg: PolarGrid
) -> SquintTrajectory:
    """Grid-argmax focal point of w at every subcarrier.

    Ties break toward smaller range, then smaller angle. If any subcarrier
    peaks on the grid boundary the trajectory carries a boundary warning,
    meaning the grid is too small to trust that focal point.
    """
    n_ang, n_rng = pg.angles_rad.size, pg.ranges_m.size
    if n_ang == 0 or n_rng == 0:
        raise ValueError("polar grid must be nonempty")
    if w.design_point is not None:
        p = w.design_point
        if not (
            pg.angles_rad[0] <= p.angle_rad <= pg.angles_rad[-1]
            and pg.ranges_m[0] <= p.range_m <= pg.ranges_m[-1]
        ):
            raise ValueError("evaluation grid does not cover the design point")

    # range-major layout so first-occurrence argmax = smallest range, then angle
    aa, rr = np.meshgrid(pg.angles_rad, pg.ranges_m, indexing="xy")
    taus = (rr / C).ravel()
    cosines = np.cos(aa).ravel()

    num_m = grid.num_subcarriers
    f0 = grid.freq(0)
    df = grid.spacing_hz
    wc = np.conj(w.weights)

    best_val = np.full(num_m, -1.0)
    best_idx = np.zeros(num_m, dtype=np.int64)
    chunk = max(1, _CHUNK_ENTRIES // geom.num_elements)
    for lo in range(0, taus.size, chunk):
        hi = min(lo + chunk, taus.size)
        delays = spherical_delay_matrix(geom, taus[lo:hi], cosines[lo:hi])
        a = np.exp(-2j * np.pi * f0 * delays)
        step = np.exp(-2j * np.pi * df * delays) if df else None
        for m in range(num_m):
            g = np.abs(a @ wc) ** 2
            k = int(np.argmax(g))
            # strict > keeps the earlier (smaller-range) index on exact ties
            if g[k] > best_val[m]:
                best_val[m] = g[k]
                best_idx[m] = lo + k
            if step is not None and m + 1 < num_m:
                a *= step

    ir, ia = np.divmod(best_idx, n_ang)
    points = tuple(
        PolarPoint(float(pg.ranges_m[r]), float(pg.angles_rad[a_]))
        for r, a_ in zip(ir, ia)
    )
    on_boundary = bool(
        np.any((ia == 0) | (ia == n_ang - 1) | (ir == 0) | (ir == n_rng - 1))
    )
    return SquintTrajectory(np.arange(num_m), points, best_val, on_boundary)


def squint_deviation(traj: SquintTrajectory, design: PolarPoint) -> tuple:
    """Max absolute (angle, range) deviation of the trajectory from a point."""
    if len(traj) == 0:
        raise ValueError("trajectory must be nonempty")
    d_ang = max(abs(p.angle_rad - design.angle_rad) for p in traj.points)
    d_rng = max(abs(p.range_m - design.range_m) for p in traj.points)
    return d_ang, d_rng
