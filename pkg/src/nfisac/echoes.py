"""Echo synthesis and angle estimation from trajectory-swept sensing beams.

Each sensing subcarrier illuminates one arc point; a target near some arc
point returns the strongest normalized echo on the matching subcarrier.
The estimator takes the best subcarrier and sharpens it with a three-point
parabolic fit over neighboring arc angles.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .arrays import ArrayGeometry, CarrierGrid, PolarPoint, spherical_delays
from .delay_phase import DelayPhaseConfig, apply_delay_phase
from .squint import SquintTrajectory


def simulate_echoes(
    geom: ArrayGeometry,
    grid: CarrierGrid,
    cfg: DelayPhaseConfig,
    sensing_m: Sequence[int],
    target: PolarPoint,
    reflectivity: complex,
    powers_w: np.ndarray,
    noise_power_w: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Forward model y_m = beta * G_m * sqrt(p_m) + n_m per sensing subcarrier.

    G_m = |w_m^H a_m(target)| is the one-way beam amplitude toward the target;
    range attenuation is absorbed into the noise level (reflectivity and noise
    together set the operating SNR).
    """
    powers_w = np.asarray(powers_w, dtype=float)
    if powers_w.shape != (len(sensing_m),):
        raise ValueError("one power entry per sensing subcarrier required")
    dist = spherical_delays(geom, target)
    echoes = np.empty(len(sensing_m), dtype=complex)
    for k, m in enumerate(sensing_m):
        w = apply_delay_phase(cfg, grid, int(m)).weights
        a = np.exp(-2j * np.pi * grid.freq(int(m)) * dist)
        gain_amp = abs(np.vdot(w, a))
        echoes[k] = reflectivity * gain_amp * np.sqrt(powers_w[k])
    if noise_power_w > 0:
        noise = rng.standard_normal(len(sensing_m)) + 1j * rng.standard_normal(
            len(sensing_m)
        )
        echoes += np.sqrt(noise_power_w / 2) * noise
    return echoes


def parabolic_refine(values: np.ndarray, k: int) -> float:
    """Sub-sample peak offset in index units, clipped to [-0.5, 0.5].

    Uses the three points around k; returns 0 at the edges or when the
    curvature is not a maximum.
    """
    if k == 0 or k == len(values) - 1:
        return 0.0
    den = values[k - 1] - 2.0 * values[k] + values[k + 1]
    if den >= 0:
        return 0.0
    off = 0.5 * (values[k - 1] - values[k + 1]) / den
    return float(np.clip(off, -0.5, 0.5))


def sense_from_echoes(
    arc_angles,
    echoes: np.ndarray,
    powers_w: np.ndarray,
) -> Optional[float]:
    """Estimate the target angle from per-sensing-subcarrier echoes.

    arc_angles may be a SquintTrajectory (its focal-point angles are used) or
    an array of the arc angles the sensing subcarriers point at. Returns None
    when every echo is exactly zero (no detection). The statistic |y|^2/p is
    invariant to any common complex scaling of the echoes.
    """
    if isinstance(arc_angles, SquintTrajectory):
        angles = np.array([p.angle_rad for p in arc_angles.points])
    else:
        angles = np.asarray(arc_angles, dtype=float)
    echoes = np.asarray(echoes, dtype=complex)
    powers_w = np.asarray(powers_w, dtype=float)
    if angles.size < 3:
        raise ValueError("need at least 3 sensing subcarriers")
    if not (angles.size == echoes.size == powers_w.size):
        raise ValueError("angles, echoes and powers must align")
    if np.all(echoes == 0):
        return None
    stat = np.abs(echoes) ** 2 / powers_w
    k = int(np.argmax(stat))
    off = parabolic_refine(stat, k)
    if off == 0.0:
        return float(angles[k])
    local_step = (angles[k + 1] - angles[k - 1]) / 2.0
    return float(angles[k] + off * local_step)
