"""Traffic aggregation and per-tone activity probability.

Per-device renewal arrivals superpose into Poisson streams at the cell and
network scale.  A cell's tone is then an M/G/1 server whose busy
probability (at least one queued packet) is the utilization
rho = (lambda_s / c) * E[T_tr].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .phy import TransportConfig, transmission_time
from .spatial import NetworkGeometry

__all__ = [
    "TruncatedNormalSpec",
    "TrafficSpec",
    "UnstableQueueError",
    "cell_arrival_rate",
    "network_arrival_rate",
    "expected_transmission_time",
    "activity_probability",
]


class UnstableQueueError(ValueError):
    """Raised when the per-tone M/G/1 utilization reaches 1."""

    def __init__(self, rho: float):
        super().__init__(f"unstable queue: utilization rho = {rho:.4f} >= 1")
        self.rho = rho


@dataclass(frozen=True)
class TruncatedNormalSpec:
    """Normal(mu, sigma^2) truncated to [lo, hi]."""

    mu: float
    sigma: float
    lo: float
    hi: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not self.lo < self.hi:
            raise ValueError("truncation bounds must satisfy lo < hi")

    def _dist(self):
        a = (self.lo - self.mu) / self.sigma
        b = (self.hi - self.mu) / self.sigma
        return stats.truncnorm(a, b, loc=self.mu, scale=self.sigma)

    def pdf(self, x):
        return self._dist().pdf(x)

    def cdf(self, x):
        return self._dist().cdf(x)

    def mean(self) -> float:
        return float(self._dist().mean())

    def var(self) -> float:
        return float(self._dist().var())

    def sample(self, rng: np.random.Generator, size=None):
        return self._dist().rvs(size=size, random_state=rng)


@dataclass(frozen=True)
class TrafficSpec:
    """Per-device arrival rate and the state distributions of new packets.

    ``packet_size_kbits`` and ``energy_budget_j`` describe the initial
    buffer content (kilobits) and energy budget (joules) of an arriving
    transmission.
    """

    lambda_u: float
    beta_u: float
    tone_count: int
    packet_size_kbits: TruncatedNormalSpec
    energy_budget_j: TruncatedNormalSpec

    def __post_init__(self):
        if self.lambda_u <= 0:
            raise ValueError("per-device arrival rate must be positive")
        if self.beta_u <= 0:
            raise ValueError("devices per cell must be positive")
        if self.tone_count < 1:
            raise ValueError("tone count must be at least 1")


def cell_arrival_rate(spec: TrafficSpec) -> float:
    """Packets/s offered to one cell: beta_u * lambda_u."""
    return spec.beta_u * spec.lambda_u


def network_arrival_rate(spec: TrafficSpec, geom: NetworkGeometry) -> float:
    """Packets/s offered in the whole network disk of radius r_net."""
    return cell_arrival_rate(spec) * geom.beta_s * math.pi * geom.r_net**2


def expected_transmission_time(spec: TrafficSpec, cfg: TransportConfig) -> float:
    """E[T_tr] in seconds over the packet-size distribution.

    The transmission time is piecewise constant in the packet size,
    jumping at multiples of the transport block size, so the expectation
    is an exact finite sum of plateau probabilities from the truncated
    normal CDF: E[ceil(B/TBS)] = sum_k k * P(B in ((k-1) TBS, k TBS]).
    """
    dist = spec.packet_size_kbits
    tbs_kbits = cfg.tbs / 1000.0
    k_lo = max(1, math.ceil(dist.lo / tbs_kbits))
    k_hi = math.ceil(dist.hi / tbs_kbits)
    expected_blocks = 0.0
    prev_cdf = 0.0  # CDF at max(lo, (k-1) TBS); F(lo) = 0 for the truncated law
    for k in range(k_lo, k_hi + 1):
        upper = min(dist.hi, k * tbs_kbits)
        cdf_hi = float(dist.cdf(upper))
        expected_blocks += k * (cdf_hi - prev_cdf)
        prev_cdf = cdf_hi
    return expected_blocks * cfg.block_time_us / 1e6


def activity_probability(spec: TrafficSpec, cfg: TransportConfig) -> float:
    """Steady-state probability that a tone of a cell is busy.

    Equals the M/G/1 utilization (lambda_s / c) * E[T_tr]; requires it to
    be below 1, and warns above 0.95 where the steady-state reading of the
    busy probability becomes fragile.
    """
    rho = cell_arrival_rate(spec) / spec.tone_count * expected_transmission_time(spec, cfg)
    if rho >= 1.0:
        raise UnstableQueueError(rho)
    if rho >= 0.95:
        warnings.warn(f"tone utilization rho = {rho:.3f} close to saturation", stacklevel=2)
    return rho


def sample_transmission_time(
    spec: TrafficSpec, cfg: TransportConfig, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Monte-Carlo draw of T_tr; reference estimator for the exact sum."""
    kbits = spec.packet_size_kbits.sample(rng, size)
    return np.array([transmission_time(b * 1000.0, cfg) for b in np.atleast_1d(kbits)])
