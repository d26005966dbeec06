use bnls_core::grid::make_grid;
use bnls_core::propagator::band_decay_probe;

fn main() {
    for (p, l, nl, t0, t1) in [
        (1024usize, 32.0f64, 8.0f64, 0.002f64, 0.02f64),
        (1024, 32.0, 8.0, 0.003, 0.03),
        (1024, 32.0, 8.0, 0.0015, 0.015),
        (512, 16.0, 8.0, 0.002, 0.02),
        (1024, 64.0, 4.0, 0.03, 0.3),
    ] {
        let g = make_grid::<f64>(2, p, l).unwrap();
        let tg: Vec<f64> = (0..20).map(|i| t0 * (t1 / t0).powf(i as f64 / 19.0)).collect();
        match band_decay_probe(&g, nl, &tg, (t0, t1)) {
            Ok(f) => println!("[n=2 N={nl} P={p} L={l}] ({t0},{t1}): slope={:.4} r2={:.5} valid={}", f.fitted_slope, f.r_squared, f.valid),
            Err(e) => println!("[n=2 N={nl} P={p} L={l}] ERR {e}"),
        }
    }
}
