"""Scratch calibration sweep (not part of the package)."""
import numpy as np
from nbiot_mfg.phy import RU_FORMATS, TransportConfig
from nbiot_mfg.spatial import NetworkGeometry, mean_link_distance
from nbiot_mfg.traffic import TrafficSpec, TruncatedNormalSpec
from nbiot_mfg.solver import StateGrid, SolverSettings, solve_equilibrium, source_scale_from_traffic
from nbiot_mfg.link import link_params, avg_sinr_vs_distance, packet_success_rate

GRID = StateGrid(e_max=0.004, b_max=2000, nx=50, ny=200)
N0 = 10 ** (-20.4)
BW = 15e3


def solve(beta_s_km2, lam, mcs, r_safe, sigma2, eta=1.0):
    geom = NetworkGeometry(beta_s=beta_s_km2 * 1e-6, beta_u=500, r_s=20, r_net=1e4,
                           r_safe=r_safe, sigma2=sigma2, eta=eta)
    spec = TrafficSpec(lambda_u=lam, beta_u=500, tone_count=12,
                       packet_size_kbits=TruncatedNormalSpec(1.0, 0.3, 0.6, 1.9),
                       energy_budget_j=TruncatedNormalSpec(0.002, 0.001, 0.001, 0.003))
    cfg = TransportConfig(RU_FORMATS[(15.0, 1)], mcs_level=mcs)
    link = link_params(geom, n0=N0, b_w=BW)
    settings = SolverSettings(p_max=0.025, source_scale=source_scale_from_traffic(spec, geom))
    sol = solve_equilibrium(GRID, settings, geom, spec, cfg, link)
    return sol, geom, link


def report(sigma2, eta=1.0):
    print(f"=== sigma2={sigma2:g} eta={eta:g}")
    dists = [1, 2, 3, 6.67, 10, 15, 20]
    # Fig 5: beta 3e4, lam 1/900, rsafe 4, MCS {0, 8}
    s8, g8, l8 = solve(3e4, 1 / 900, 8, 4.0, sigma2, eta)
    s0, g0, l0_ = solve(3e4, 1 / 900, 0, 4.0, sigma2, eta)
    sinr8 = avg_sinr_vs_distance(s8, l8, g8, dists)
    sinr0 = avg_sinr_vs_distance(s0, l0_, g0, dists)
    gap = np.mean(np.array(sinr8) - np.array(sinr0))
    print(f"  fig5 MCS8: {sinr8[0]:.1f} .. {sinr8[-1]:.1f} dB | MCS0: {sinr0[0]:.1f} .. {sinr0[-1]:.1f} dB | gap {gap:.2f} dB")
    print(f"  iters: {s8.iterations}, {s0.iterations}; imf8={s8.i_mf:.3e} imf0={s0.i_mf:.3e}; Ep8={s8.mean_power:.4f} Ep0={s0.mean_power:.4f}")
    # safety-zone gap at baseline (MCS 8, lam 1/900, beta 3e4)
    s3, g3, l3 = solve(3e4, 1 / 900, 8, 3.0, sigma2, eta)
    d = mean_link_distance(g8)
    gap_safe = avg_sinr_vs_distance(s8, l8, g8, [d])[0] - avg_sinr_vs_distance(s3, l3, g3, [d])[0]
    print(f"  rsafe 4 vs 3 gap: {gap_safe:.2f} dB (imf {s8.i_mf:.3e} vs {s3.i_mf:.3e})")
    # Fig 6 envelope: dens sweep, lam {1/60, 1/10800}, at mean distance
    hi = avg_sinr_vs_distance(*(lambda s, g, l: (s, l, g))(*solve(1e3, 1 / 10800, 8, 4.0, sigma2, eta)), [d])[0]
    lo = avg_sinr_vs_distance(*(lambda s, g, l: (s, l, g))(*solve(3e5, 1 / 60, 8, 4.0, sigma2, eta)), [d])[0]
    print(f"  fig6 envelope at mean dist: low-load {hi:.1f} dB, extreme {lo:.1f} dB")
    # success knife-edge: beta 3e5, lam 1/60, MCS8 (2 mJ, 1200 b, mean dist)
    se, ge, le = solve(3e5, 1 / 60, 8, 4.0, sigma2, eta)
    rate, err = packet_success_rate(se, 2e-3, 1200.0, d, le, ge, 10000, 42)
    rate2, _ = packet_success_rate(se, 3e-3, 1200.0, d, le, ge, 10000, 43)
    rate3, _ = packet_success_rate(se, 2e-3, 600.0, 6.67, le, ge, 10000, 44)
    print(f"  success(2mJ,1200b,{d:.2f}m)={rate:.4f}+-{err:.4f}  (3mJ,1200b)={rate2:.4f} (2mJ,600b)={rate3:.4f}")


for s2 in (1.0, 0.02, 0.0045, 0.002):
    report(s2)
