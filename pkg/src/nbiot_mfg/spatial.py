"""Stochastic-geometry layer: SBS point process, device clustering, path loss.

Small base stations form a homogeneous Poisson point process of density
``beta_s``.  Devices cluster around their base station with a radial law
``r / r_s ~ Beta(a, b)``.  Path loss is a piecewise power law whose
exponent grows with distance (indoor wall build-up); no continuity
correction is applied at band edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

__all__ = [
    "PathLossModel",
    "NetworkGeometry",
    "path_loss",
    "path_loss_exponent",
    "beta_radial_pdf",
    "sample_radius",
    "mean_link_distance",
    "min_interferer_distance",
    "active_intensity",
    "geometric_factor",
    "indoor_fading_second_moment",
    "outdoor_fading_second_moment",
    "sample_indoor_h2",
    "sample_outdoor_h2",
]

# Free-space gain at 1 m, 900 MHz band (~ -31.5 dB).  Engineering default;
# see README on link-constant calibration.
DEFAULT_L0 = 10.0 ** -3.15


@dataclass(frozen=True)
class PathLossModel:
    """Piecewise power law L(r) = l0 * r^(-alpha(r)).

    ``breakpoints`` maps half-open distance bands (lo, hi] to exponents;
    the last band extends to infinity.  A distance exactly at a band edge
    takes the lower band's exponent.
    """

    l0: float = DEFAULT_L0
    breakpoints: tuple[tuple[float, float], ...] = (
        (3.0, 2.0),
        (20.0, 3.0),
        (40.0, 4.0),
        (math.inf, 6.0),
    )

    def __post_init__(self):
        if self.l0 <= 0:
            raise ValueError("l0 must be positive")
        radii = [hi for hi, _ in self.breakpoints]
        exps = [a for _, a in self.breakpoints]
        if radii != sorted(radii) or len(set(radii)) != len(radii):
            raise ValueError("band upper radii must be strictly increasing")
        if not math.isinf(radii[-1]):
            raise ValueError("last band must extend to infinity")
        if exps != sorted(exps):
            raise ValueError("exponents must be nondecreasing with distance")
        if any(not 2.0 <= a <= 12.0 for a in exps):
            raise ValueError("exponents must lie in [2, 12]")

    def exponent(self, r: float) -> float:
        for hi, alpha in self.breakpoints:
            if r <= hi:
                return alpha
        raise AssertionError("unreachable: last band is unbounded")


def path_loss_exponent(r: float, model: PathLossModel) -> float:
    """Exponent of the band containing r (band edges belong to the lower band)."""
    if r <= 0:
        raise ValueError(f"distance must be positive, got {r!r}")
    return model.exponent(r)


def path_loss(r: float, model: PathLossModel) -> float:
    """Linear path gain l0 * r^(-alpha(r))."""
    return model.l0 * r ** -path_loss_exponent(r, model)


@dataclass(frozen=True)
class NetworkGeometry:
    """Spatial parameters of the ultra-dense small-cell deployment.

    Densities are per square meter.  ``eta`` is the Rician LOS amplitude of
    the indoor (serving) link; ``sigma1`` its diffuse scale, fixed to 1.
    ``sigma2`` is the Rayleigh scale of the outdoor (interfering) links.
    """

    beta_s: float
    beta_u: float
    r_s: float
    r_net: float
    r_safe: float
    beta_a: float = 2.0
    beta_b: float = 4.0
    path_loss: PathLossModel = field(default_factory=PathLossModel)
    eta: float = 1.0
    sigma1: float = 1.0
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("beta_s", "r_s", "r_net", "r_safe", "beta_a", "beta_b"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.beta_u < 0:
            raise ValueError("mean devices per cell must be nonnegative")
        if self.r_net < 10.0 * self.r_s:
            raise ValueError("network radius must be at least 10x the cell radius")
        if self.r_safe >= self.r_s:
            raise ValueError("safety radius must be smaller than the cell radius")
        if self.sigma1 != 1.0:
            raise ValueError("indoor diffuse scale sigma1 is fixed to 1.0")
        if self.sigma2 <= 0 or self.eta < 0:
            raise ValueError("fading parameters must be nonnegative (sigma2 > 0)")


def beta_radial_pdf(r, geom: NetworkGeometry):
    """Density of the device-to-SBS distance on (0, r_s]; r/r_s ~ Beta(a, b)."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0) or np.any(arr > geom.r_s):
        raise ValueError(f"distance must lie in (0, {geom.r_s}]")
    out = stats.beta.pdf(arr / geom.r_s, geom.beta_a, geom.beta_b) / geom.r_s
    return float(out) if np.isscalar(r) else out


def sample_radius(geom: NetworkGeometry, rng: np.random.Generator, size=None):
    """Draw device-to-SBS distances from the Beta radial law."""
    return geom.r_s * rng.beta(geom.beta_a, geom.beta_b, size=size)


def mean_link_distance(geom: NetworkGeometry) -> float:
    """Average device-to-SBS distance a/(a+b) * r_s."""
    return geom.beta_a / (geom.beta_a + geom.beta_b) * geom.r_s


def min_interferer_distance(geom: NetworkGeometry) -> float:
    """Distance to the nearest interfering device: max(r_safe, 1/(2 sqrt(beta_s)) - r_s)."""
    return max(geom.r_safe, 0.5 / math.sqrt(geom.beta_s) - geom.r_s)


def active_intensity(p_a: float, geom: NetworkGeometry) -> float:
    """Density of same-tone active devices per m^2 under homogeneous activity."""
    if not 0.0 <= p_a <= 1.0:
        raise ValueError(f"activity probability must lie in [0, 1], got {p_a!r}")
    return geom.beta_s * p_a


def _annulus_kernel_integral(model: PathLossModel, r_lo: float, r_hi: float) -> float:
    """Closed-form integral of r^(1 - alpha(r)) over [r_lo, r_hi], per band."""
    total = 0.0
    lo = r_lo
    prev_hi = 0.0
    for hi, alpha in model.breakpoints:
        band_lo = max(lo, prev_hi)
        band_hi = min(r_hi, hi)
        if band_hi > band_lo:
            if alpha == 2.0:
                total += math.log(band_hi / band_lo)
            else:
                q = 2.0 - alpha
                total += (band_hi**q - band_lo**q) / q
        prev_hi = hi
        if band_hi >= r_hi:
            break
    return total


def geometric_factor(geom: NetworkGeometry, p_a: float) -> float:
    """Aggregate spatial weight of same-tone interferers.

    Evaluates 2*pi * beta_s * p_a * integral of r^(1-alpha(r)) over the
    interferer annulus [R_min, R], band by band in closed form.  The 1 m
    gain constant l0 is deliberately not included here; it belongs to the
    serving-link budget (see link module).
    """
    if not 0.0 <= p_a <= 1.0:
        raise ValueError(f"activity probability must lie in [0, 1], got {p_a!r}")
    r_min = min_interferer_distance(geom)
    if r_min >= geom.r_net:
        raise ValueError(
            f"no interferer annulus: R_min {r_min:.3g} m >= network radius {geom.r_net:.3g} m"
        )
    inner = _annulus_kernel_integral(geom.path_loss, r_min, geom.r_net)
    return 2.0 * math.pi * geom.beta_s * p_a * inner


def indoor_fading_second_moment(geom: NetworkGeometry) -> float:
    """E[H^2] of the Rician serving link: 2*sigma1^2 + eta^2."""
    return 2.0 * geom.sigma1**2 + geom.eta**2


def outdoor_fading_second_moment(geom: NetworkGeometry) -> float:
    """E[H^2] of the Rayleigh interfering links: 2*sigma2^2."""
    return 2.0 * geom.sigma2**2


def sample_indoor_h2(geom: NetworkGeometry, rng: np.random.Generator, size=None):
    """Squared Rician amplitude: noncentral chi-square, 2 dof, noncentrality eta^2."""
    return rng.noncentral_chisquare(2.0, geom.eta**2, size=size)


def sample_outdoor_h2(geom: NetworkGeometry, rng: np.random.Generator, size=None):
    """Squared Rayleigh amplitude: exponential with mean 2*sigma2^2."""
    return rng.exponential(2.0 * geom.sigma2**2, size=size)
