//! Paper-facing probe checks at desk scale: decay exponents, Bernstein
//! ratios, the refined Strichartz family, virial/mass-moment transport,
//! blow-up rate fitting, and the sharp Gagliardo–Nirenberg family.

use bnls_core::conserved::{boost_inequality_margin, boost_polynomial, energy, mass};
use bnls_core::diagnostics::{
    mass_moment_rate_check, scale_track, virial_rate_check, VirialProbe,
};
use bnls_core::evolution::{evolve, EquationParams, Outcome, ProbeSet, RunControls};
use bnls_core::field::{ComplexField, Geometry};
use bnls_core::grid::make_grid;
use bnls_core::ground_state::{gn_ratio, solve_ground_state, SolverControls};
use bnls_core::lp::{lp_project, LittlewoodPaleyBank, Projection};
use bnls_core::propagator::{band_decay_probe, decay_probe, refined_strichartz_ratio};
use bnls_core::random::{random_localized, random_multiband};
use num_complex::Complex;

fn log_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t0 * (t1 / t0).powf(i as f64 / (n - 1) as f64)).collect()
}

#[test]
fn dispersive_decay_slope_n1() {
    // Smoothly band-limited Gaussian: bounded group speed keeps the window
    // image-free; expect the t^{-1/4} law.
    let g = make_grid::<f64>(1, 2048, 120.0).unwrap();
    let u0 = lp_project(
        &ComplexField::gaussian(&Geometry::Full(g), 1.0, 0.55, &[0.0]),
        1.0,
        Projection::Leq,
    )
    .unwrap();
    let fit = decay_probe(&u0, &log_grid(0.8, 3.5, 40), (0.8, 3.5)).unwrap();
    assert!(fit.valid, "window contaminated");
    assert!(fit.r_squared >= 0.99, "R² = {}", fit.r_squared);
    assert!(
        (fit.fitted_slope + 0.25).abs() <= 0.05,
        "n=1 slope {} outside -0.25 ± 0.05",
        fit.fitted_slope
    );
}

#[test]
fn dispersive_decay_slope_n2() {
    let g = make_grid::<f64>(2, 512, 80.0).unwrap();
    let u0 = lp_project(
        &ComplexField::gaussian(&Geometry::Full(g), 1.0, 0.8, &[0.0, 0.0]),
        1.0,
        Projection::Leq,
    )
    .unwrap();
    let fit = decay_probe(&u0, &log_grid(0.5, 3.5, 25), (0.5, 3.5)).unwrap();
    assert!(fit.valid);
    assert!(
        (fit.fitted_slope + 0.5).abs() <= 0.05,
        "n=2 slope {} outside -0.5 ± 0.05",
        fit.fitted_slope
    );
}

#[test]
fn band_decay_slopes_n1() {
    let g = make_grid::<f64>(1, 4096, 120.0).unwrap();
    let f8 = band_decay_probe(&g, 8.0, &log_grid(4e-3, 4e-2, 25), (4e-3, 4e-2)).unwrap();
    assert!(f8.valid);
    assert!((f8.fitted_slope + 0.5).abs() <= 0.1, "N=8 slope {}", f8.fitted_slope);
    let f16 = band_decay_probe(&g, 16.0, &log_grid(1e-3, 1e-2, 25), (1e-3, 1e-2)).unwrap();
    assert!(f16.valid);
    assert!((f16.fitted_slope + 0.5).abs() <= 0.1, "N=16 slope {}", f16.fitted_slope);
}

#[test]
fn band_prefactor_scales_like_inverse_n() {
    // P_N of the discrete delta: bands at N and 2N are exact dilates, so the
    // windowed prefactor exp(mean(ln sup + (n/2) ln t)) compares cleanly and
    // must scale by 2^n within 20%.
    let g = make_grid::<f64>(1, 4096, 120.0).unwrap();
    let ones = vec![Complex::new(1.0, 0.0); g.len()];
    let delta = ComplexField::new(Geometry::Full(g.clone()), g.inverse(&ones).unwrap()).unwrap();
    let bank = LittlewoodPaleyBank::for_grid(&g);
    let prefactor = |n_level: f64, window: (f64, f64)| -> f64 {
        let banded = bank.project(&delta, n_level, Projection::At).unwrap();
        let spec = g.forward(banded.values()).unwrap();
        let ts = log_grid(window.0, window.1, 17);
        let mut acc = 0.0;
        for &t in &ts {
            let mut sp = spec.clone();
            for (v, &x4) in sp.iter_mut().zip(g.xi4()) {
                *v *= Complex::from_polar(1.0, t * x4);
            }
            let vals = g.inverse(&sp).unwrap();
            let sup = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
            acc += sup.ln() + 0.5 * t.ln();
        }
        (acc / ts.len() as f64).exp()
    };
    // Matched N⁴t windows: [20, 160]/N⁴.
    let p8 = prefactor(8.0, (20.0 / 4096.0, 160.0 / 4096.0));
    let p16 = prefactor(16.0, (20.0 / 65536.0, 160.0 / 65536.0));
    let ratio = p8 / p16;
    assert!((ratio / 2.0 - 1.0).abs() <= 0.2, "prefactor ratio {ratio} vs 2");
}

#[test]
fn bernstein_ratio_stable_under_band_doubling() {
    // ‖P_N f‖_q ≤ C N^{n/p−n/q} ‖P_N f‖_p with C fixed per (p,q) across N:
    // compare each localized band draw against its exact dyadic dilate
    // g_{(2,0)}f (same shape, band at 2N), so the normalized ratio must be
    // stable to the interpolation error.
    let g = make_grid::<f64>(1, 512, 32.0).unwrap();
    for seed in 0..8u64 {
        let band = bnls_core::random::random_annulus(&g, 2.0, seed);
        // Window to emulate a whole-space profile before dilating.
        let mut f = band;
        for (flat, v) in f.values_mut().iter_mut().enumerate() {
            let x = flat as f64 * (2.0 * 32.0 / 512.0) - 32.0;
            *v *= Complex::new((-x * x / 72.0).exp(), 0.0);
        }
        let dilate = f.rescale_g(2.0, &[0.0], 1e-6).unwrap();
        for (p, q) in [(2.0, f64::INFINITY), (2.0, 10.0)] {
            let expo = 1.0 / p - if q.is_infinite() { 0.0 } else { 1.0 / q };
            let c1 = f.lp_norm(q).unwrap() / (f.lp_norm(p).unwrap() * 2.0f64.powf(expo));
            let c2 =
                dilate.lp_norm(q).unwrap() / (dilate.lp_norm(p).unwrap() * 4.0f64.powf(expo));
            let drift = (c2 / c1 - 1.0).abs();
            assert!(drift <= 0.1, "C drift {drift} at (p={p}, q={q}), seed {seed}");
        }
    }
}

#[test]
fn bernstein_high_pass_bound() {
    // ‖P_{≥N}f‖₂ ≤ 2^s N^{−s} ‖|∇|^s f‖₂ (support of P_{≥N} is |ξ| ≥ N/2).
    let g = make_grid::<f64>(1, 256, 8.0).unwrap();
    for seed in 0..20u64 {
        let f = random_localized(&g, 6.0, 2.0, seed);
        for s in [1.0, 2.0] {
            let grad = f.sobolev_seminorm(s).unwrap();
            for n_level in [2.0, 4.0, 8.0] {
                let hi = lp_project(&f, n_level, Projection::Geq).unwrap();
                let lhs = hi.lp_norm(2.0).unwrap();
                let bound = 2.0f64.powf(s) * n_level.powf(-s) * grad;
                assert!(lhs <= bound * (1.0 + 1e-10), "{lhs} > {bound} at N={n_level}, s={s}");
            }
        }
    }
}

#[test]
fn refined_strichartz_family() {
    let g = make_grid::<f64>(1, 512, 30.0).unwrap();
    let levels = [1.0, 2.0, 4.0, 8.0];
    let mut max_ratio: f64 = 0.0;
    for seed in 0..50u64 {
        let u = random_multiband(&g, &levels, seed);
        let r = refined_strichartz_ratio(&u, 0.5, 33).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        max_ratio = max_ratio.max(r.ratio);
    }
    assert!(max_ratio < 10.0, "ratio family blew up: {max_ratio}");

    // Invariance under the rescaling symmetry (horizon scales by h⁻⁴).
    let u = random_localized(&g, 2.0, 4.0, 7);
    let r1 = refined_strichartz_ratio(&u, 0.8, 65).unwrap();
    let u2 = u.rescale_g(2.0, &[0.0], 1e-7).unwrap();
    let r2 = refined_strichartz_ratio(&u2, 0.8 / 16.0, 65).unwrap();
    let rel = ((r1.ratio - r2.ratio) / r1.ratio).abs();
    assert!(rel <= 1e-2, "rescale invariance defect {rel:e}");
}

#[test]
fn refined_strichartz_single_shell() {
    // Shell modes at |ξ| = N are the only spectra with P_N u = u exactly:
    // the numerator then equals the band sup and the ratio collapses to
    // (Z/‖u‖₂)^{n/(n+4)} ≤ 1 for a short horizon.
    let g = make_grid::<f64>(1, 512, std::f64::consts::PI * 8.0).unwrap();
    let plus = ComplexField::pure_mode(&g, &[32]);
    let minus = ComplexField::pure_mode(&g, &[-32]);
    let mut u = ComplexField::zeros(Geometry::Full(g));
    for ((a, b), c) in u.values_mut().iter_mut().zip(plus.values()).zip(minus.values()) {
        *a = b * Complex::new(0.3, 0.1) + c * Complex::new(0.2, -0.4);
    }
    let m = u.l2_norm_sq();
    let u = u.scaled(Complex::new((0.25 / m).sqrt(), 0.0));
    let r = refined_strichartz_ratio(&u, 0.02, 33).unwrap();
    assert!(r.ratio <= 1.0 + 1e-6, "single-band ratio {}", r.ratio);
    assert!(
        ((r.z_total - r.sup_band_z) / r.z_total).abs() <= 1e-12,
        "numerator must equal the only band's norm"
    );
}

#[test]
fn virial_and_mass_moment_transport() {
    let g = make_grid::<f64>(1, 1024, 60.0).unwrap();
    let u0 = ComplexField::gaussian(&Geometry::Full(g), 1.0, 1.5, &[0.0]).boost(1.0, 0).unwrap();
    let params = EquationParams::new(1, 1.0).unwrap();
    let mut defects = Vec::new();
    for r in [15.0, 30.0] {
        let probe = VirialProbe::new(r, 0);
        let probes = ProbeSet {
            virial: Some(probe.clone()),
            mass_moment: Some(probe.clone()),
            ..Default::default()
        };
        let controls = RunControls {
            t_end: 0.2,
            dt_max: 5e-4,
            snapshot_every: 5,
            ..Default::default()
        };
        let rec = evolve(&u0, &params, &controls, &probes).unwrap();
        let vr = virial_rate_check(&rec, &probe).unwrap();
        let mr = mass_moment_rate_check(&rec, &probe).unwrap();
        assert!(!vr.r_invalid && !mr.r_invalid, "mass escaped R = {r}");
        assert!(vr.max_defect <= 2e-2, "virial defect {:e} at R = {r}", vr.max_defect);
        assert!(mr.max_defect <= 2e-2, "moment defect {:e} at R = {r}", mr.max_defect);
        defects.push(vr.max_defect);
    }
    assert!(defects[1] <= defects[0] * 1.5, "defect must not grow under R doubling: {defects:?}");
}

#[test]
fn focusing_blowup_probe_run() {
    let g = make_grid::<f64>(1, 2048, 25.0).unwrap();
    let gs = solve_ground_state(&Geometry::Full(g), &SolverControls::default()).unwrap();
    let u0 = gs.profile.scaled(Complex::new(1.2, 0.0));
    let params = EquationParams::new(1, -1.0).unwrap();
    let controls = RunControls {
        t_end: 3.0,
        dt_max: 1e-3,
        dt_min: 1e-8,
        adaptive: true,
        c_phase: 0.02,
        c_curv: 0.1,
        snapshot_every: 10,
        store_fields: false,
        sup_threshold: 3.0 * 1.2 * gs.profile.sup_norm(),
        ..Default::default()
    };
    let rec = evolve(&u0, &params, &controls, &ProbeSet::default()).unwrap();
    assert!(rec.aborted.is_none(), "run aborted: {:?}", rec.aborted);
    assert_eq!(rec.outcome, Outcome::BlowUp);
    let track = scale_track(&rec);
    let growth =
        track.n_est.iter().cloned().fold(0.0, f64::max) / track.n_est.first().unwrap();
    assert!(growth >= 10.0, "scale growth {growth}");
    // Either a declared in-band fit or an honest decline; never out of band.
    if let Some(fit) = rec.blowup_estimate {
        assert!(
            (fit.exponent - 0.25).abs() <= 0.1,
            "declared blow-up exponent {} out of band",
            fit.exponent
        );
        assert!(fit.decades >= 1.0);
    }
}

#[test]
fn gn_inequality_over_random_fields() {
    let gs = {
        let g = make_grid::<f64>(1, 1024, 25.0).unwrap();
        solve_ground_state(&Geometry::Full(g), &SolverControls::default()).unwrap()
    };
    let g = make_grid::<f64>(1, 512, 25.0).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..200u64 {
        let f = random_localized(&g, 3.0, 3.0, seed);
        let r = gn_ratio(&f, gs.mass_q).unwrap();
        worst = worst.max(r);
        assert!(r <= 1.0 + 1e-6, "GN violated: ratio {r} at seed {seed}");
    }
    // Extremality: the ground state itself sits at 1.
    assert!((gs.gn_ratio_at_q - 1.0).abs() <= 1e-3, "ratio at Q: {}", gs.gn_ratio_at_q);
    assert!(worst < 1.0, "random fields should be strictly sub-extremal, got {worst}");

    // Scaling invariance of the ratio.
    let f = random_localized(&g, 2.0, 3.0, 7);
    let r1 = gn_ratio(&f, gs.mass_q).unwrap();
    let r2 = gn_ratio(&f.rescale_g(2.0, &[0.0], 1e-7).unwrap(), gs.mass_q).unwrap();
    assert!(((r1 - r2) / r1).abs() <= 1e-6, "ratio not scale-invariant: {r1} vs {r2}");
}

#[test]
fn boost_polynomial_and_subthreshold_inequality() {
    let gs = {
        let g = make_grid::<f64>(1, 1024, 25.0).unwrap();
        solve_ground_state(&Geometry::Full(g), &SolverControls::default()).unwrap()
    };
    let g = make_grid::<f64>(1, 256, 20.0).unwrap();
    let xs: Vec<f64> = (0..64).map(|i| -2.0 + 4.0 * i as f64 / 63.0).collect();
    for seed in 0..25u64 {
        let u = random_localized(&g, 3.0, 2.5, seed);
        let lambda = -1.0;
        let poly = boost_polynomial(&u, lambda, 0).unwrap();
        for &x in xs.iter().step_by(7) {
            let direct = 2.0 * energy(&u.boost(x, 0).unwrap(), lambda).unwrap();
            let p = poly.eval(x);
            assert!(
                (p - direct).abs() <= 1e-8 * (1.0 + p.abs()),
                "P_u({x}) = {p} vs {direct} at seed {seed}"
            );
        }
        // Sub-threshold mass: rescale to M(u) = 0.5 M(Q), then (6.4) holds.
        let m = mass(&u);
        let sub = u.scaled(Complex::new((0.5 * gs.mass_q / m).sqrt(), 0.0));
        let margin = boost_inequality_margin(&sub, lambda, 0, gs.mass_q, &xs).unwrap();
        let poly_sub = boost_polynomial(&sub, lambda, 0).unwrap();
        let scale = 1.0 + poly_sub.eval(0.0).abs();
        assert!(margin >= -1e-6 * scale, "inequality margin {margin:e} at seed {seed}");
    }
}

#[test]
fn subthreshold_energy_bounds_h2() {
    // E(u) ≥ ½(1 − (M/M(Q))^{8/n}) ‖Δu‖² for focusing states below threshold.
    let gs = {
        let g = make_grid::<f64>(1, 1024, 25.0).unwrap();
        solve_ground_state(&Geometry::Full(g), &SolverControls::default()).unwrap()
    };
    let g = make_grid::<f64>(1, 512, 25.0).unwrap();
    for seed in 0..50u64 {
        let u = random_localized(&g, 2.5, 3.0, seed);
        let m = mass(&u);
        let sub = u.scaled(Complex::new((0.7 * gs.mass_q / m).sqrt(), 0.0));
        let e = energy(&sub, -1.0).unwrap();
        let h2 = sub.sobolev_seminorm(2.0).unwrap();
        // κ = (‖u‖₂/‖Q‖₂)^{8/n} = (M/M(Q))^{4/n}; n = 1 here.
        let kappa = (mass(&sub) / gs.mass_q).powf(4.0);
        let bound = 0.5 * (1.0 - kappa) * h2 * h2;
        assert!(e >= bound - 1e-10 * (1.0 + e.abs()), "{e} < {bound} at seed {seed}");
    }
}
