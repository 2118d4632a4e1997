"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Every tolerance is pinned here; nothing is deferred to later
calibration.
"""

import time

import numpy as np
import pytest

from dirac_sink.analytic import coefficients, eta0_surface, eta1_closed
from dirac_sink.dynamics import IntegratorConfig, efficiency_curve, propagate
from dirac_sink.noise import NoiseParams, mc_oracle, propagate_noisy
from dirac_sink.params import ModelParams
from dirac_sink.spectral import (
    biorthogonal_eigenvectors,
    overlap_criterion_solve,
    principal_omega,
    spectrum,
    st_locate,
)

MC_SEED = 42


def report(name: str, ok: bool, detail: str, elapsed: float, limit: float):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    print(f"[{status}] {name}: {detail} (elapsed {elapsed:.2f}s < {limit:.0f}s)")
    assert ok, f"{name}: {detail}"
    assert elapsed < limit, f"{name}: runtime {elapsed:.2f}s exceeds {limit}s"


def test_overlap_criterion_root():
    t0 = time.perf_counter()
    roots = overlap_criterion_solve(2, 2, 0)
    elapsed = time.perf_counter() - t0
    err = abs(roots[0] - np.sqrt(24))
    report(
        "overlap-criterion root", err < 1e-6,
        f"Gamma1* = {roots[0]:.9f}, |err vs sqrt(24)| = {err:.2e}", elapsed, 1.0,
    )


def test_st_location_and_gap():
    t0 = time.perf_counter()
    loc = st_locate(2, 2, 0, np.linspace(0, 12, 501))
    root = overlap_criterion_solve(2, 2, 0)[0]
    elapsed = time.perf_counter() - t0
    gap = (loc.gamma1 - root) / loc.gamma1
    ok = abs(loc.gamma1 - 5.3) <= 0.2 and abs(gap - 0.075) <= 0.01
    report(
        "ST location", ok,
        f"Gamma1_ST = {loc.gamma1:.4f} (5.3 +- 0.2), gap = {gap * 100:.2f}% (7.5 +- 1)",
        elapsed, 1.0,
    )


def test_ep_degeneracy_and_norm_collapse():
    t0 = time.perf_counter()
    p = ModelParams.symmetric(0, 4, 0, 2)
    cs = spectrum(p)
    eig_err = max(abs(cs.etilde1 - (-1j)), abs(cs.etilde2 - (-1j)))
    # probe the 1e-8 neighborhood of the EP, including the point itself
    overlaps = []
    for dg in (0.0, 1e-8, -1e-8):
        basis = biorthogonal_eigenvectors(ModelParams.symmetric(0, 4 + dg, 0, 2))
        overlaps.append(np.abs(basis.raw_overlaps).max())
    collapse = min(overlaps)
    elapsed = time.perf_counter() - t0
    ok = eig_err < 1e-10 and collapse < 1e-6
    report(
        "EP degeneracy", ok,
        f"|E - (-i)| = {eig_err:.2e}, min self-overlap near EP = {collapse:.2e}",
        elapsed, 1.0,
    )


def test_spacing_and_splitting_laws():
    t0 = time.perf_counter()
    v = 1.2 + 1.6j
    v_sq = abs(v) ** 2
    worst = 0.0
    for g1 in np.linspace(0, 8, 500):
        p = ModelParams(0.3, 0.3, g1, 0.4, v)  # eps1 = eps2
        cs = spectrum(p)
        g = p.gamma
        if abs(g) < abs(v):
            worst = max(worst, abs(cs.spacing - np.sqrt(v_sq - g * g)),
                        abs(cs.y1 - cs.y2))
        else:
            worst = max(worst, abs(cs.spacing),
                        abs(abs(cs.y1 - cs.y2) - np.sqrt(g * g - v_sq)))
    elapsed = time.perf_counter() - t0
    report(
        "spacing/splitting laws", worst < 1e-10,
        f"max deviation over 500-point grid = {worst:.2e}", elapsed, 1.0,
    )


def test_budget_conservation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    cfg = IntegratorConfig(t_final=20.0, dt=1e-3, stride=100)
    worst = 0.0
    for _ in range(100):
        p = ModelParams.symmetric(
            rng.uniform(-4, 4), rng.uniform(0, 10), rng.uniform(0, 10),
            rng.uniform(0.5, 4.0) * np.exp(2j * np.pi * rng.random()),
        )
        amps = rng.dirichlet([1, 1])
        off = rng.uniform(0, np.sqrt(amps[0] * amps[1])) * np.exp(2j * np.pi * rng.random())
        rho0 = np.array([[amps[0], off], [np.conj(off), amps[1]]])
        rec = propagate(p, rho0, cfg)
        worst = max(worst, rec.budget_error.max())
    elapsed = time.perf_counter() - t0
    report(
        "budget conservation", worst < 1e-9,
        f"max |Tr rho + eta1 + eta2 - 1| = {worst:.2e} over 100 random sets",
        elapsed, 30.0,
    )


def test_analytic_numeric_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(102)
    worst_curve = 0.0
    worst_zero = 0.0
    n_done = 0
    while n_done < 200:
        p = ModelParams.symmetric(
            rng.uniform(-2, 2), rng.uniform(0.2, 8), rng.uniform(0.2, 8),
            rng.uniform(0.4, 3.0) * np.exp(2j * np.pi * rng.random()),
        )
        om = principal_omega(p.v, p.eps, p.gamma)
        if p.gamma0 <= abs(om.imag) + 0.1 or abs(om) < 1e-3:
            continue
        n_done += 1
        rec = propagate(p, "siteB")
        worst_curve = max(worst_curve, np.abs(eta1_closed(rec.times, p) - rec.eta1).max())
        c = coefficients(p)
        scale = max(1.0, abs(c.b) * c.gamma0, abs(c.c) * c.gamma0)
        worst_zero = max(worst_zero, abs(eta1_closed(0.0, p)) / scale)
    elapsed = time.perf_counter() - t0
    ok = worst_curve < 1e-6 and worst_zero < 1e-13
    report(
        "analytic-numeric equivalence", ok,
        f"max_t |closed - numeric| = {worst_curve:.2e}, "
        f"|eta1(0)|/scale = {worst_zero:.1e} over 200 draws",
        elapsed, 120.0,
    )


def test_fig6_maximum():
    t0 = time.perf_counter()
    p = ModelParams.symmetric(0.1, 0, 1.0, 2.0)
    grid = np.linspace(0.1, 20.0, 100)
    curve_b = efficiency_curve(p, "siteB", grid)
    curve_a = efficiency_curve(p, "siteA", grid)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(curve_b.argmax_gamma1 - 2.0) <= 0.3
        and curve_b.interior_maximum
        and not curve_a.interior_maximum
    )
    report(
        "Fig. 6 maximum", ok,
        f"SiteB argmax Gamma1 = {curve_b.argmax_gamma1:.3f} (2.0 +- 0.3), "
        f"SiteA interior max = {curve_a.interior_maximum}",
        elapsed, 30.0,
    )


def test_eta0_surface_shape():
    t0 = time.perf_counter()
    grid = np.linspace(0.05, 12, 400)
    eps_rows = np.array([0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0])
    surf = eta0_surface(grid, eps_rows, 1.0, 2.0)
    maxima = np.nanmax(surf.eta0, axis=1)
    elapsed = time.perf_counter() - t0
    ok = bool(np.all(maxima[0] > maxima[1:]))
    report(
        "eta0 surface shape", ok,
        f"row maxima = {np.round(maxima, 5).tolist()}, largest at eps=0",
        elapsed, 10.0,
    )


def test_noise_closure_vs_monte_carlo():
    t0 = time.perf_counter()
    p = ModelParams.symmetric(0.0, 2.0, 1.0, 2.0)
    cfg = IntegratorConfig(t_final=10.0, dt=1e-3, stride=100)
    worst_z = 0.0
    for d in (5.0, 10.0, 20.0):
        noise = NoiseParams.symmetric(d, 10.0)
        closure = propagate_noisy(p, noise, "siteB", cfg)
        mc = mc_oracle(p, noise, "siteB", cfg, n_traj=10_000, rng_seed=MC_SEED)
        for key, col in (("rho11", closure.rho11), ("rho22", closure.rho22)):
            z = np.abs(getattr(mc, key)[1:] - col[1:]) / np.maximum(
                mc.stderr[key][1:], 1e-300
            )
            worst_z = max(worst_z, float(z.max()))
    quiet = propagate(p, "siteB", cfg)
    zero = propagate_noisy(p, NoiseParams.symmetric(0.0, 10.0), "siteB", cfg)
    bit_identical = all(
        np.array_equal(getattr(zero, f), getattr(quiet, f))
        for f in ("times", "rho11", "rho22", "rho12", "trace", "eta1", "eta2")
    )
    elapsed = time.perf_counter() - t0
    ok = worst_z < 3.0 and bit_identical
    report(
        "noise closure vs Monte Carlo", ok,
        f"worst |z| = {worst_z:.2f} over (d, gamma) in {{5,10,20}}x{{10}} "
        f"at 1e4 trajectories; d=0 bit-identical = {bit_identical}",
        elapsed, 300.0,
    )


def test_noise_flattening():
    t0 = time.perf_counter()
    p = ModelParams.symmetric(0.0, 2.0, 1.0, 2.0)
    cfg = IntegratorConfig(t_final=10.0, dt=1e-3, stride=200)
    grid = np.linspace(0.1, 20.0, 60)
    maxima = []
    interior_at_20 = False
    for d in (0.0, 5.0, 10.0, 20.0):
        noise = NoiseParams.symmetric(d, 10.0)
        eta1 = np.array(
            [propagate_noisy(p.__class__.symmetric(0.0, float(g1), 1.0, 2.0),
                             noise, "siteB", cfg).eta1[-1] for g1 in grid]
        )
        maxima.append(eta1.max())
        if d == 20.0:
            j = int(np.argmax(eta1))
            interior_at_20 = 0 < j < grid.size - 1
    elapsed = time.perf_counter() - t0
    decreasing = all(a > b for a, b in zip(maxima, maxima[1:]))
    ok = decreasing and interior_at_20
    report(
        "noise flattening", ok,
        f"max eta1 by d: {np.round(maxima, 4).tolist()} strictly decreasing = "
        f"{decreasing}, interior max at d=20 = {interior_at_20}",
        elapsed, 120.0,
    )


def test_unitary_limit():
    t0 = time.perf_counter()
    p = ModelParams.symmetric(0, 0, 0, 2)
    cfg = IntegratorConfig(t_final=np.pi, dt=1e-3, stride=10)
    rec = propagate(p, "siteB", cfg)
    err = np.abs(rec.rho22 - np.cos(rec.times) ** 2).max()
    elapsed = time.perf_counter() - t0
    report(
        "unitary limit", err < 1e-8,
        f"max |rho22 - cos^2 t| = {err:.2e} over one Rabi period",
        elapsed, 1.0,
    )
