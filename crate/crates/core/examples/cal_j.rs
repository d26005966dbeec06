use bnls_core::grid::make_grid;
use bnls_core::propagator::propagate_linear;

fn main() {
    for (p, t, cut, napp) in [
        (256usize, 1e-3f64, 40.0f64, 10_000usize),
        (256, 1e-3, 40.0, 1_000),
        (256, 1e-5, 40.0, 10_000),
        (256, 1e-3, 10.0, 10_000),
        (512, 1e-3, 40.0, 10_000),
        (1024, 1e-3, 40.0, 10_000),
        (64, 1e-3, 10.0, 10_000),
    ] {
        let g = make_grid::<f64>(1, p, std::f64::consts::PI).unwrap();
        let mut w = bnls_core::random::random_band_limited(&g, cut, 11);
        let m0 = w.l2_norm_sq();
        for _ in 0..napp {
            w = propagate_linear(&w, t).unwrap();
        }
        let drift = ((w.l2_norm_sq() - m0) / m0).abs();
        println!("P={p} t={t:.0e} cut={cut} apps={napp}: drift={drift:.3e}");
    }
}
