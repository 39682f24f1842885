"""Link-level metrics on top of an equilibrium solution.

Mean-field SINR and utility, deterministic state trajectories under the
equilibrium policy, distance-resolved average SINR, and the fading-aware
packet success rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .spatial import (
    NetworkGeometry,
    indoor_fading_second_moment,
    mean_link_distance,
    path_loss,
)

if TYPE_CHECKING:
    from .solver import EquilibriumSolution

__all__ = [
    "LinkParams",
    "Trajectory",
    "StalledTrajectoryError",
    "link_params",
    "mf_sinr",
    "mf_utility",
    "integrate_trajectory",
    "packet_success_rate",
    "avg_sinr_vs_distance",
]


class StalledTrajectoryError(RuntimeError):
    """Raised when a trajectory makes no progress under a vanishing policy."""


@dataclass(frozen=True)
class LinkParams:
    """Serving-link budget constants.

    ``k_gain`` is the composite mean channel gain (2 + eta^2) * l0 *
    d^(-alpha(d)) at the mean link distance d; ``noise_power`` is
    n0 * b_w in watts.
    """

    n0: float
    b_w: float
    k_gain: float

    def __post_init__(self):
        if self.n0 <= 0 or self.b_w <= 0 or self.k_gain <= 0:
            raise ValueError("link parameters must be positive")

    @property
    def noise_power(self) -> float:
        return self.n0 * self.b_w


def link_params(geom: NetworkGeometry, n0: float, b_w: float) -> LinkParams:
    """Assemble the link budget from the spatial model at the mean distance."""
    d = mean_link_distance(geom)
    gain = indoor_fading_second_moment(geom) * path_loss(d, geom.path_loss)
    return LinkParams(n0=n0, b_w=b_w, k_gain=gain)


def mf_sinr(p, i_mf: float, link: LinkParams):
    """Mean-field SINR p * k_gain / (noise + i_mf), linear."""
    return p * link.k_gain / (link.noise_power + i_mf)


def mf_utility(p, i_mf: float, link: LinkParams):
    """Running utility log2(1 + SINR), bits/s/Hz."""
    return np.log2(1.0 + mf_sinr(p, i_mf, link))


@dataclass
class Trajectory:
    """Deterministic state path under the equilibrium policy."""

    e0: float
    b0: float
    times: np.ndarray
    energies: np.ndarray
    bits: np.ndarray
    powers: np.ndarray
    exit_time: float
    exit_reason: str  # "buffer_empty" | "energy_exhausted"

    @property
    def energy_spent(self) -> float:
        return self.e0 - float(self.energies[-1])


def _bilinear(field: np.ndarray, e: float, b: float, grid) -> float:
    """Bilinear interpolation of a grid field, clamped to the domain box."""
    x = min(max(e / grid.d_e, 0.0), grid.nx - 1e-12)
    y = min(max(b / grid.d_b, 0.0), grid.ny - 1e-12)
    i, j = int(x), int(y)
    fx, fy = x - i, y - j
    return (
        field[i, j] * (1 - fx) * (1 - fy)
        + field[i + 1, j] * fx * (1 - fy)
        + field[i, j + 1] * (1 - fx) * fy
        + field[i + 1, j + 1] * fx * fy
    )


def integrate_trajectory(e0: float, b0: float, sol: "EquilibriumSolution") -> Trajectory:
    """Forward-Euler integration of (de, db) = (-p, -r_tr) dt from (e0, b0).

    The policy is looked up by bilinear interpolation of the equilibrium
    power field.  Integration stops when either coordinate would cross
    zero; the crossing instant is interpolated exactly, and a simultaneous
    crossing counts as a completed transmission (buffer first).
    """
    grid = sol.grid
    if not (0.0 < e0 <= grid.e_max and 0.0 < b0 <= grid.b_max):
        raise ValueError(f"initial state ({e0}, {b0}) outside the state domain")
    r_tr = sol.r_tr
    dt = min(grid.d_e / sol.p_max, grid.d_b / r_tr) / 4.0
    # bits drain at the fixed rate r_tr, so the buffer empties by b0/r_tr;
    # the cap below is defensive against a policy that cannot happen.
    max_steps = int(10.0 * b0 / r_tr / dt) + 2

    t, e, b = 0.0, e0, b0
    times, energies, bits, powers = [t], [e], [b], []
    exit_time = None
    exit_reason = None
    for _ in range(max_steps):
        p = max(_bilinear(sol.p_star, e, b, grid), 0.0)
        powers.append(p)
        t_buffer = b / r_tr
        t_energy = e / p if p > 0 else math.inf
        if min(t_buffer, t_energy) <= dt:
            # exact crossing inside this step; buffer wins ties
            if t_buffer <= t_energy:
                exit_time = t + t_buffer
                exit_reason = "buffer_empty"
                e, b = e - p * t_buffer, 0.0
            else:
                exit_time = t + t_energy
                exit_reason = "energy_exhausted"
                e, b = 0.0, b - r_tr * t_energy
            t = exit_time
            times.append(t)
            energies.append(max(e, 0.0))
            bits.append(max(b, 0.0))
            break
        t, e, b = t + dt, e - p * dt, b - r_tr * dt
        times.append(t)
        energies.append(e)
        bits.append(b)
    if exit_reason is None:
        raise StalledTrajectoryError(
            f"trajectory from ({e0}, {b0}) made no exit after {max_steps} steps"
        )
    powers.append(powers[-1])
    return Trajectory(
        e0=e0,
        b0=b0,
        times=np.array(times),
        energies=np.array(energies),
        bits=np.array(bits),
        powers=np.array(powers),
        exit_time=exit_time,
        exit_reason=exit_reason,
    )


def packet_success_rate(
    sol: "EquilibriumSolution",
    e0: float,
    b0: float,
    distance: float,
    link: LinkParams,
    geom: NetworkGeometry,
    fading_draws: int,
    rng_seed: int,
    b_w: float | None = None,
) -> tuple[float, float]:
    """Success probability of a packet sent from (e0, b0) at a given distance.

    A transmission succeeds when (i) the equilibrium trajectory drains the
    buffer before the energy budget runs out, and (ii) the block-fading
    spectral efficiency, averaged over the trajectory,

        mean_t log2(1 + p(t) H^2 L(r) / (noise + i_mf)),

    meets the configured rate per unit bandwidth r_tr / b_w.  Fading is
    drawn once per packet from the squared-Rician law of the serving link.
    Returns (success fraction, binomial standard error).
    """
    if fading_draws < 100:
        raise ValueError("fading_draws below 100 is statistically meaningless")
    if not 0.0 < distance <= geom.r_s:
        raise ValueError(f"distance must lie in (0, {geom.r_s}]")
    traj = integrate_trajectory(e0, b0, sol)
    if traj.exit_reason != "buffer_empty":
        return 0.0, 0.0
    bw = link.b_w if b_w is None else b_w
    threshold = sol.r_tr / bw
    gain = path_loss(distance, geom.path_loss) / (link.noise_power + sol.i_mf)
    # time-weighted average over Euler segments (left powers, segment lengths)
    seg = np.diff(traj.times)
    p_seg = traj.powers[: len(seg)]
    rng = np.random.default_rng(rng_seed)
    h2 = rng.noncentral_chisquare(2.0, geom.eta**2, size=fading_draws)
    # (draws x segments) spectral efficiency, averaged along the path
    se = np.log2(1.0 + np.outer(h2, p_seg) * gain)
    avg_se = se @ seg / traj.exit_time
    successes = int(np.count_nonzero(avg_se >= threshold))
    rate = successes / fading_draws
    stderr = math.sqrt(rate * (1.0 - rate) / fading_draws)
    return rate, stderr


def avg_sinr_vs_distance(
    sol: "EquilibriumSolution",
    link: LinkParams,
    geom: NetworkGeometry,
    distances,
) -> list[float]:
    """Population-average SINR in dB at each serving distance.

    Averages 10 log10(p (2 + eta^2) L(r) / (noise + i_mf)) over the
    stationary mean field; idle nodes (p = 0) carry no transmission and
    are excluded from the average.
    """
    grid = sol.grid
    nx, ny = grid.nx, grid.ny
    weights = sol.m_star[:nx, :ny].copy()
    p = sol.p_star[:nx, :ny]
    active = p > 0.0
    weights[~active] = 0.0
    total = weights.sum()
    if total <= 0:
        raise ValueError("mean field carries no transmitting mass")
    mean_log_p = float(np.sum(np.log10(p, where=active, out=np.zeros_like(p)) * weights)) / total
    fade = indoor_fading_second_moment(geom)
    out = []
    for r in distances:
        if not 0.0 < r <= geom.r_s:
            raise ValueError(f"distance must lie in (0, {geom.r_s}]")
        gain = fade * path_loss(r, geom.path_loss)
        out.append(
            10.0 * (mean_log_p + math.log10(gain / (link.noise_power + sol.i_mf)))
        )
    return out
