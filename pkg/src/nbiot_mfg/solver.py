"""Stationary mean-field equilibrium solver.

The state of a transmitting device is x = (e, b): remaining energy and
remaining bits, drifting at (-p, -R) for transmit power p and fixed rate
R.  On the grid covering Omega = [0, e_max] x [0, b_max] the solver
iterates, from p0 = p_max:

  1. transport sweep      -> population density m (zero inflow at e_max, b_max)
  2. normalization        -> unit mass under the rectangle rule
  3. interference update  -> i_mf from the spatial factor and integral of p*m
  4. adjoint sweep        -> multiplier mu (zero at e = 0 and b = 0)
  5. power update         -> closed-form stationarity inversion, relaxed

until the sup-norm relative change of p, m and mu all fall below the
tolerance.  Both sweeps are explicit upwind marches, so the discrete
equations hold to machine precision at every node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .link import LinkParams
from .phy import TransportConfig, mean_field_rate
from .spatial import NetworkGeometry, geometric_factor
from .traffic import TrafficSpec, activity_probability, network_arrival_rate

__all__ = [
    "StateGrid",
    "SolverSettings",
    "EquilibriumSolution",
    "ConvergenceError",
    "DegenerateMeanFieldError",
    "build_source",
    "fpk_sweep",
    "normalize",
    "mean_field_interference",
    "adjoint_sweep",
    "utility_field",
    "power_update",
    "solve_equilibrium",
]

LN2 = math.log(2.0)


class ConvergenceError(RuntimeError):
    """Raised when the successive-sweep iteration fails to converge."""

    def __init__(self, iterations: int, trace):
        final = trace[-1] if trace else None
        super().__init__(
            f"no convergence after {iterations} iterations (last errors: {final})"
        )
        self.iterations = iterations
        self.trace = trace


class DegenerateMeanFieldError(ValueError):
    """Raised when the transport solution carries no mass."""


@dataclass(frozen=True)
class StateGrid:
    """Uniform grid on [0, e_max] x [0, b_max] with (nx+1) x (ny+1) nodes."""

    e_max: float
    b_max: float
    nx: int = 50
    ny: int = 200

    def __post_init__(self):
        if self.e_max <= 0 or self.b_max <= 0:
            raise ValueError("state bounds must be positive")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 cells per axis")

    @property
    def d_e(self) -> float:
        return self.e_max / self.nx

    @property
    def d_b(self) -> float:
        return self.b_max / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx + 1, self.ny + 1)

    def e_nodes(self) -> np.ndarray:
        return np.arange(self.nx + 1) * self.d_e

    def b_nodes(self) -> np.ndarray:
        return np.arange(self.ny + 1) * self.d_b

    def cell_mass(self, values: np.ndarray) -> float:
        """Rectangle-rule integral over Omega (lower-left node weights)."""
        return float(np.sum(values[: self.nx, : self.ny])) * self.d_e * self.d_b


@dataclass(frozen=True)
class SolverSettings:
    """Iteration controls for the successive-sweep fixed point."""

    p_max: float
    source_scale: float
    tol: float = 1e-6
    max_iters: int = 200
    relaxation: float = 0.5

    def __post_init__(self):
        if self.p_max <= 0:
            raise ValueError("p_max must be positive")
        if self.source_scale <= 0:
            raise ValueError("source scale must be positive")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in (0, 1]")


@dataclass
class EquilibriumSolution:
    """Converged policy, mean field, multiplier and derived scalars."""

    p_star: np.ndarray
    m_star: np.ndarray
    mu_star: np.ndarray
    i_mf: float
    mean_power: float
    iterations: int
    trace: list
    grid: StateGrid
    r_tr: float
    p_max: float
    converged: bool = True
    final_errors: tuple = field(default=None)

    def __post_init__(self):
        if self.final_errors is None:
            self.final_errors = tuple(self.trace[-1]) if self.trace else (0.0, 0.0, 0.0)


def build_source(grid: StateGrid, spec: TrafficSpec) -> np.ndarray:
    """Arrival-state density f_E x f_B sampled at the grid nodes.

    Energies are in joules on axis 0, bits on axis 1 (packet sizes convert
    from kilobits).  Outside the truncation boxes the density is zero.
    """
    e_dist = spec.energy_budget_j
    b_dist = spec.packet_size_kbits
    if e_dist.hi >= grid.e_max:
        raise ValueError(
            f"energy support upper bound {e_dist.hi} must lie strictly below e_max {grid.e_max}"
        )
    if b_dist.hi * 1000.0 >= grid.b_max:
        raise ValueError(
            f"packet support upper bound {b_dist.hi * 1000.0} bits must lie strictly below b_max {grid.b_max}"
        )
    e = grid.e_nodes()
    b = grid.b_nodes()
    f_e = np.where((e >= e_dist.lo) & (e <= e_dist.hi), e_dist.pdf(e), 0.0)
    b_kbits = b / 1000.0
    f_b = np.where(
        (b_kbits >= b_dist.lo) & (b_kbits <= b_dist.hi), b_dist.pdf(b_kbits) / 1000.0, 0.0
    )
    return np.outer(f_e, f_b)


def fpk_sweep(
    p: np.ndarray, source: np.ndarray, r_tr: float, grid: StateGrid, settings: SolverSettings
) -> np.ndarray:
    """Solve the discrete stationary transport equation by backward marching.

    The upwind stencil at node (i, j),

      -(p[i+1,j] m[i+1,j] - p[i,j] m[i,j]) / dE - R (m[i,j+1] - m[i,j]) / dB
          = scale * source[i,j],

    is solved for m[i,j] sweeping i and j downward from the pinned zero
    rows i = nx and j = ny, so each node only references already-known
    neighbours and the scheme is exact.
    """
    out = np.zeros(grid.shape)
    _kernels.fpk_sweep_kernel(
        np.ascontiguousarray(p), np.ascontiguousarray(source),
        r_tr, grid.d_e, grid.d_b, settings.source_scale, out,
    )
    return out


def normalize(m: np.ndarray, grid: StateGrid) -> np.ndarray:
    """Scale a nonnegative field to unit rectangle-rule mass."""
    mass = grid.cell_mass(m)
    if mass <= 0.0:
        raise DegenerateMeanFieldError(f"mean-field mass is {mass}, cannot normalize")
    return m / mass


def mean_field_interference(
    p: np.ndarray, m: np.ndarray, gfactor: float, sigma2: float, grid: StateGrid
) -> float:
    """Stationary interference 2 sigma2^2 * gfactor * integral of p*m."""
    return 2.0 * sigma2**2 * gfactor * grid.cell_mass(p * m)


def utility_field(p: np.ndarray, i_mf: float, link: LinkParams) -> np.ndarray:
    """Spectral efficiency log2(1 + p k / (N + I)) at every node."""
    return np.log2(1.0 + p * link.k_gain / (link.noise_power + i_mf))


def adjoint_sweep(
    p: np.ndarray, i_mf: float, r_tr: float, grid: StateGrid, link: LinkParams
) -> np.ndarray:
    """Solve the discrete adjoint (multiplier) equation by forward marching.

    The stencil at node (i, j),

      -F[i,j] - p[i,j] (mu[i,j] - mu[i-1,j]) / dE - R (mu[i,j] - mu[i,j-1]) / dB = 0,

    is solved for mu[i,j] sweeping i and j upward from the pinned zero
    row i = 0 and column j = 0.
    """
    f = utility_field(p, i_mf, link)
    out = np.zeros(grid.shape)
    _kernels.adjoint_sweep_kernel(
        np.ascontiguousarray(p), np.ascontiguousarray(f), r_tr, grid.d_e, grid.d_b, out
    )
    return out


def energy_gradient(mu: np.ndarray, grid: StateGrid) -> np.ndarray:
    """Backward difference -(mu[i,j] - mu[i-1,j]) / dE; row 0 copies row 1."""
    g = np.empty_like(mu)
    g[1:, :] = -(mu[1:, :] - mu[:-1, :]) / grid.d_e
    g[0, :] = g[1, :]
    return g


def power_update(
    mu: np.ndarray,
    i_mf: float,
    link: LinkParams,
    settings: SolverSettings,
    grid: StateGrid,
    p_old: np.ndarray,
) -> np.ndarray:
    """Closed-form stationarity inversion with clamping and relaxation.

    Where the energy shadow price g = -d(mu)/de is positive the candidate
    power solves dF/dp = g exactly:

      p_hat = 1 / (ln 2 * g) - (N + I) / k

    and saturates at p_max where g <= 0 (utility strictly increasing in p).
    The returned field is the relaxed mix (1 - w) p_old + w clamp(p_hat).
    """
    g = energy_gradient(mu, grid)
    n_over_k = (link.noise_power + i_mf) / link.k_gain
    with np.errstate(divide="ignore", over="ignore"):
        p_hat = np.where(g > 0.0, 1.0 / (LN2 * g) - n_over_k, settings.p_max)
    np.clip(p_hat, 0.0, settings.p_max, out=p_hat)
    w = settings.relaxation
    return (1.0 - w) * p_old + w * p_hat


def solve_equilibrium(
    grid: StateGrid,
    settings: SolverSettings,
    geom: NetworkGeometry,
    spec: TrafficSpec,
    cfg: TransportConfig,
    link: LinkParams,
    raise_on_failure: bool = True,
) -> EquilibriumSolution:
    """Iterate the successive sweeps to the stationary equilibrium.

    Starts from the uniform full-power policy.  Convergence requires the
    sup-norm relative change of all three fields to drop below the
    tolerance; failure raises ``ConvergenceError`` carrying the error
    trace unless ``raise_on_failure`` is false.
    """
    r_tr = mean_field_rate(cfg)
    p_a = activity_probability(spec, cfg)
    gfactor = geometric_factor(geom, p_a)
    sigma2 = geom.sigma2
    source = build_source(grid, spec)

    p = np.full(grid.shape, settings.p_max)
    m = np.zeros(grid.shape)
    mu = np.zeros(grid.shape)
    trace = []
    i_mf = 0.0
    converged = False
    iterations = 0

    for iterations in range(1, settings.max_iters + 1):
        m_new = normalize(fpk_sweep(p, source, r_tr, grid, settings), grid)
        i_mf = mean_field_interference(p, m_new, gfactor, sigma2, grid)
        mu_new = adjoint_sweep(p, i_mf, r_tr, grid, link)
        p_new = power_update(mu_new, i_mf, link, settings, grid, p)

        errs = (
            _relative_change(p_new, p),
            _relative_change(m_new, m),
            _relative_change(mu_new, mu),
        )
        trace.append(errs)
        p, m, mu = p_new, m_new, mu_new
        if max(errs) < settings.tol:
            converged = True
            break

    if not converged and raise_on_failure:
        raise ConvergenceError(iterations, trace)

    return EquilibriumSolution(
        p_star=p,
        m_star=m,
        mu_star=mu,
        i_mf=i_mf,
        mean_power=grid.cell_mass(p * m),
        iterations=iterations,
        trace=trace,
        grid=grid,
        r_tr=r_tr,
        p_max=settings.p_max,
        converged=converged,
    )


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    scale = float(np.max(np.abs(new)))
    if scale == 0.0:
        scale = 1.0
    return float(np.max(np.abs(new - old))) / scale


def source_scale_from_traffic(spec: TrafficSpec, geom: NetworkGeometry) -> float:
    """Network arrival intensity per tone, the inflow scale of the transport equation."""
    return network_arrival_rate(spec, geom) / spec.tone_count
