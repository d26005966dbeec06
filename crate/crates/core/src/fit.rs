//! Small least-squares helpers shared by the decay probes and the blow-up
//! rate fitter.

use crate::scalar::{real, real_of_usize, Scalar};

/// Ordinary least squares y ≈ slope·x + intercept, with R².
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

pub fn linear_fit<T: Scalar>(xs: &[T], ys: &[T]) -> Option<LineFit<T>> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = real_of_usize::<T>(n);
    let mut sx = T::zero();
    let mut sy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sx = sx + x;
        sy = sy + y;
    }
    let mx = sx / nf;
    let my = sy / nf;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
        syy = syy + (y - my) * (y - my);
    }
    if sxx <= T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > T::zero() { (sxy * sxy) / (sxx * syy) } else { T::one() };
    Some(LineFit { slope, intercept, r_squared })
}

/// Result of fitting N(t) ≈ c·(T* − t)^{−β}.
#[derive(Clone, Copy, Debug)]
pub struct PowerLawFit<T> {
    pub t_star: T,
    pub exponent: T,
    pub r_squared: T,
    /// Decades spanned by (T* − t) over the fitted samples.
    pub decades: T,
}

/// Joint fit of (T*, β) on log N = c − β log(T* − t), scanning T* over a
/// bounded window past the last sample (golden-section on the residual).
pub fn fit_power_law_blowup<T: Scalar>(times: &[T], values: &[T]) -> Option<PowerLawFit<T>> {
    let n = times.len();
    if n < 8 || values.len() != n {
        return None;
    }
    if values.iter().any(|&v| v <= T::zero()) {
        return None;
    }
    let t_last = times[n - 1];
    let t_first = times[0];
    let span = t_last - t_first;
    if span <= T::zero() {
        return None;
    }
    let logs: Vec<T> = values.iter().map(|&v| v.ln()).collect();

    let sse = |t_star: T| -> T {
        let xs: Vec<T> = times.iter().map(|&t| (t_star - t).ln()).collect();
        match linear_fit(&xs, &logs) {
            Some(f) => {
                let mut s = T::zero();
                for (&x, &y) in xs.iter().zip(&logs) {
                    let r = y - (f.slope * x + f.intercept);
                    s = s + r * r;
                }
                s
            }
            None => T::infinity(),
        }
    };

    // T* must lie past the data; cap the search at one data-span beyond.
    let lo0 = t_last + span * real::<T>(1e-6);
    let hi0 = t_last + span;
    let phi = real::<T>(0.618_033_988_749_894_8);
    let mut lo = lo0;
    let mut hi = hi0;
    let mut x1 = hi - (hi - lo) * phi;
    let mut x2 = lo + (hi - lo) * phi;
    let mut f1 = sse(x1);
    let mut f2 = sse(x2);
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * phi;
            f1 = sse(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * phi;
            f2 = sse(x2);
        }
    }
    let t_star = (lo + hi) / real::<T>(2.0);
    let xs: Vec<T> = times.iter().map(|&t| (t_star - t).ln()).collect();
    let fit = linear_fit(&xs, &logs)?;
    let near = t_star - t_last;
    let far = t_star - t_first;
    let decades = (far / near).log10();
    Some(PowerLawFit { t_star, exponent: -fit.slope, r_squared: fit.r_squared, decades })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.5).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept + 1.5).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recovers_synthetic_blowup_power_law() {
        // N(t) = (1 − t)^{−1/4} on [0, 0.99].
        let times: Vec<f64> = (0..200).map(|i| 0.99 * i as f64 / 199.0).collect();
        let vals: Vec<f64> = times.iter().map(|&t| (1.0 - t).powf(-0.25)).collect();
        let fit = fit_power_law_blowup(&times, &vals).unwrap();
        assert!((fit.t_star - 1.0).abs() <= 1e-3, "T* = {}", fit.t_star);
        assert!((fit.exponent - 0.25).abs() <= 1e-3, "β = {}", fit.exponent);
        assert!(fit.r_squared >= 0.9999);
        assert!(fit.decades >= 1.0);
    }

    #[test]
    fn exponential_series_lacks_a_decade() {
        // e^t on [0,5] is mimicked by a distant T*, which compresses the
        // (T*−t) range below one decade; the caller's decade gate rejects it.
        let times: Vec<f64> = (0..100).map(|i| 5.0 * i as f64 / 99.0).collect();
        let vals: Vec<f64> = times.iter().map(|&t| t.exp()).collect();
        let fit = fit_power_law_blowup(&times, &vals).unwrap();
        assert!(fit.decades < 1.0, "decades = {}", fit.decades);
    }
}
