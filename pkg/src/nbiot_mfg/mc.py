"""Monte-Carlo validation of the analytic interference prediction.

Samples the active-device point process directly: retained base stations
form a thinned Poisson process, each contributes one active device offset
by the clustered radial law, and devices outside the interferer annulus
are discarded (the safety zone excludes them).  Displacing a Poisson
process by independent offsets leaves it Poisson with the same intensity,
so the empirical mean is an unbiased estimate of the closed-form
interference integral, with no geometric approximation in between.

Per-trial substreams come from a counter-based generator, so chunked or
parallel execution reproduces the serial results bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spatial import NetworkGeometry, min_interferer_distance

__all__ = ["PowerSampler", "McConfig", "sample_interference", "sample_device_count"]


class PowerSampler:
    """Discrete transmit-power distribution over equilibrium grid nodes."""

    def __init__(self, values: np.ndarray, weights: np.ndarray):
        values = np.asarray(values, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if values.shape != weights.shape or values.size == 0:
            raise ValueError("values and weights must be equal-length and nonempty")
        if np.any(weights < 0) or weights.sum() <= 0:
            raise ValueError("weights must be nonnegative with positive total")
        keep = weights > 0
        self.values = values[keep]
        w = weights[keep]
        self._cum = np.cumsum(w / w.sum())
        self._cum[-1] = 1.0
        self.mean = float(np.sum(self.values * w) / w.sum())

    @classmethod
    def from_solution(cls, sol) -> "PowerSampler":
        """Power of a uniformly drawn active device under (p*, m*)."""
        nx, ny = sol.grid.nx, sol.grid.ny
        return cls(sol.p_star[:nx, :ny], sol.m_star[:nx, :ny])

    @classmethod
    def constant(cls, power: float) -> "PowerSampler":
        return cls(np.array([power]), np.array([1.0]))

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.searchsorted(self._cum, rng.random(size), side="left")
        return self.values[idx]


@dataclass(frozen=True)
class McConfig:
    """Trial count, seed and scenario for the interference sampler."""

    trials: int
    rng_seed: int
    geom: NetworkGeometry
    p_a: float
    power_sampler: PowerSampler

    def __post_init__(self):
        if self.trials < 1000:
            raise ValueError("need at least 1000 trials for a meaningful estimate")
        if not 0.0 <= self.p_a <= 1.0:
            raise ValueError("activity probability must lie in [0, 1]")


def _banded_kernel(r: np.ndarray, model) -> np.ndarray:
    """r^(-alpha(r)) with the band exponent chosen by (lo, hi] membership."""
    his = np.array([hi for hi, _ in model.breakpoints])
    alphas = np.array([a for _, a in model.breakpoints])
    idx = np.searchsorted(his, r, side="left")
    return np.power(r, -alphas[idx])


def sample_interference(cfg: McConfig) -> tuple[float, float]:
    """Empirical mean and standard error of the aggregate interference.

    Each trial realizes the active same-tone interferer set: base stations
    are drawn on the offset-dilated annulus so that every device able to
    land in [R_min, R] has its chance, one device per station is placed by
    the Beta radial law, devices inside the safety radius or beyond the
    network edge are dropped, and each survivor contributes
    p * H^2 * r^(-alpha(r)) with Rayleigh-squared fading H^2.
    """
    geom = cfg.geom
    r_min = min_interferer_distance(geom)
    r_net = geom.r_net
    if r_min >= r_net:
        raise ValueError(
            f"no interferer annulus: R_min {r_min:.3g} m >= network radius {r_net:.3g} m"
        )
    # stations beyond these radii cannot place a device inside [R_min, R]
    lo = max(0.0, r_min - geom.r_s)
    hi = r_net + geom.r_s
    intensity = geom.beta_s * cfg.p_a
    mean_count = intensity * math.pi * (hi**2 - lo**2)

    base = np.random.Philox(key=cfg.rng_seed)
    totals = np.empty(cfg.trials)
    for t in range(cfg.trials):
        rng = np.random.Generator(base.jumped(t))
        n = rng.poisson(mean_count)
        if n == 0:
            totals[t] = 0.0
            continue
        rho = np.sqrt(rng.random(n) * (hi**2 - lo**2) + lo**2)
        w = geom.r_s * rng.beta(geom.beta_a, geom.beta_b, size=n)
        phi = rng.random(n) * (2.0 * math.pi)
        h2 = rng.exponential(2.0 * geom.sigma2**2, size=n)
        p = cfg.power_sampler.draw(rng, n)
        r_dev = np.sqrt(rho**2 + w**2 + 2.0 * rho * w * np.cos(phi))
        keep = (r_dev >= r_min) & (r_dev <= r_net)
        totals[t] = float(np.sum(p[keep] * h2[keep] * _banded_kernel(r_dev[keep], geom.path_loss)))

    mean = float(np.mean(totals))
    stderr = float(np.std(totals, ddof=1) / math.sqrt(cfg.trials))
    return mean, stderr


def sample_device_count(geom: NetworkGeometry, region_radius: float, rng_seed: int) -> int:
    """Total device count in a disk: Poisson stations, Poisson cluster sizes."""
    if region_radius <= 0:
        raise ValueError("region radius must be positive")
    rng = np.random.default_rng(rng_seed)
    n_sbs = rng.poisson(geom.beta_s * math.pi * region_radius**2)
    if n_sbs == 0:
        return 0
    return int(rng.poisson(geom.beta_u, size=n_sbs).sum())
