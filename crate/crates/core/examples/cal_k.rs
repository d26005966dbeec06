use num_complex::Complex;
use rustfft::FftPlanner;

fn main() {
    let n = 256usize;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mk = || -> Vec<Complex<f64>> {
        (0..n).map(|i| Complex::new(((i*37%101) as f64/101.0-0.5), ((i*61%97) as f64/97.0-0.5))).collect()
    };
    let norm = |v: &[Complex<f64>]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let scale = 1.0 / n as f64;

    // (a) fwd + inv plans
    let mut a = mk();
    let m0 = norm(&a);
    for _ in 0..10_000 {
        fwd.process(&mut a);
        inv.process(&mut a);
        for z in a.iter_mut() { *z *= scale; }
    }
    println!("fwd+inv pair:    drift={:.3e}", ((norm(&a)-m0)/m0).abs());

    // (b) conj trick: inverse = conj . fwd . conj
    let mut b = mk();
    for _ in 0..10_000 {
        fwd.process(&mut b);
        for z in b.iter_mut() { *z = z.conj(); }
        fwd.process(&mut b);
        for z in b.iter_mut() { *z = z.conj() * scale; }
    }
    println!("conj-fwd trick:  drift={:.3e}", ((norm(&b)-m0)/m0).abs());

    // (c) inverse-first ordering
    let mut c = mk();
    for _ in 0..10_000 {
        inv.process(&mut c);
        fwd.process(&mut c);
        for z in c.iter_mut() { *z *= scale; }
    }
    println!("inv-then-fwd:    drift={:.3e}", ((norm(&c)-m0)/m0).abs());
}
