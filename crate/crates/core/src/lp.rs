//! Littlewood–Paley projections built from one fixed C^∞ bump.
//!
//! ψ(ξ) = 1 for |ξ| ≤ 1 and 0 for |ξ| ≥ 2; in between it is the standard
//! exponential partition step ψ(1+s) = B(1−s)/(B(s)+B(1−s)) with
//! B(τ) = e^{−1/τ}, which is C^∞ with all derivatives vanishing at both ends.
//! P_{≤N} multiplies by ψ(ξ/N); P_N by ψ(ξ/N) − ψ(2ξ/N); the strict
//! complements P_{>N}, P_{≥N} are formed by spectrum-space subtraction so the
//! dyadic partition reproduces the input spectrum bit-for-bit.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{ComplexField, Geometry};
use crate::grid::SpectralGrid;
use crate::scalar::{real, Scalar};

/// The smooth cutoff ψ at radius `r ≥ 0`.
pub fn psi_bump<T: Scalar>(r: T) -> T {
    let one = T::one();
    let two = real::<T>(2.0);
    if r <= one {
        return one;
    }
    if r >= two {
        return T::zero();
    }
    let s = r - one;
    let b_lo = (-one / s).exp();
    let b_hi = (-one / (one - s)).exp();
    b_hi / (b_lo + b_hi)
}

/// Which dyadic projection to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    /// P_N: annulus N/2 < |ξ| < 2N.
    At,
    /// P_{≤N}.
    Leq,
    /// P_{>N} = Id − P_{≤N}.
    Gt,
    /// P_{≥N} = Id − P_{≤N/2}.
    Geq,
    /// P_{<N} = P_{≤N/2}.
    Lt,
}

/// Dyadic levels resolved by a grid together with the shared cutoff.
pub struct LittlewoodPaleyBank<T: Scalar> {
    grid: Arc<SpectralGrid<T>>,
    exponents: Vec<i32>,
}

impl<T: Scalar> LittlewoodPaleyBank<T> {
    pub fn for_grid(grid: &Arc<SpectralGrid<T>>) -> Self {
        let dxi = grid.dxi().to_f64().unwrap();
        let ximax = grid.xi_max().to_f64().unwrap();
        // Lowest band whose annulus reaches the smallest nonzero frequency,
        // highest band that still intersects the grid.
        let k_min = (dxi / 2.0).log2().ceil() as i32;
        let k_max = ximax.log2().ceil() as i32;
        let exponents: Vec<i32> = (k_min..=k_max).collect();
        Self { grid: grid.clone(), exponents }
    }

    /// Dyadic N = 2^k covered by the grid.
    pub fn levels(&self) -> Vec<T> {
        self.exponents.iter().map(|&k| real::<T>(2f64.powi(k))).collect()
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        &self.grid
    }

    /// Apply the projection to a spectrum in place-free form.
    pub fn project_spectrum(&self, spectrum: &[Complex<T>], n_level: T, kind: Projection) -> Result<Vec<Complex<T>>> {
        if n_level <= T::zero() {
            return Err(Error::InvalidArgument("dyadic level must be positive".into()));
        }
        if spectrum.len() != self.grid.len() {
            return Err(Error::ShapeMismatch { expected: self.grid.len(), found: spectrum.len() });
        }
        let two = real::<T>(2.0);
        let xi2 = self.grid.xi2();
        let out: Vec<Complex<T>> = match kind {
            Projection::Leq => spectrum
                .iter()
                .zip(xi2)
                .map(|(v, &x2)| v * psi_bump(x2.sqrt() / n_level))
                .collect(),
            Projection::Lt => spectrum
                .iter()
                .zip(xi2)
                .map(|(v, &x2)| v * psi_bump(two * x2.sqrt() / n_level))
                .collect(),
            Projection::At => spectrum
                .iter()
                .zip(xi2)
                .map(|(v, &x2)| {
                    let r = x2.sqrt() / n_level;
                    v * (psi_bump(r) - psi_bump(two * r))
                })
                .collect(),
            // Complements by subtraction: exact partition in spectrum space.
            Projection::Gt => spectrum
                .iter()
                .zip(xi2)
                .map(|(v, &x2)| v - v * psi_bump(x2.sqrt() / n_level))
                .collect(),
            Projection::Geq => spectrum
                .iter()
                .zip(xi2)
                .map(|(v, &x2)| v - v * psi_bump(two * x2.sqrt() / n_level))
                .collect(),
        };
        Ok(out)
    }

    /// Apply the projection to a physical-space field.
    pub fn project(&self, field: &ComplexField<T>, n_level: T, kind: Projection) -> Result<ComplexField<T>> {
        let grid = field.geometry().full().map_err(|_| Error::UnsupportedGeometry {
            op: "lp_project",
            geometry: "radial",
        })?;
        let spec = grid.forward(field.values())?;
        let proj = self.project_spectrum(&spec, n_level, kind)?;
        let vals = grid.inverse(&proj)?;
        let mut out = ComplexField::new(Geometry::Full(grid.clone()), vals)?;
        if let Some(t) = field.time_tag() {
            out = out.with_time(t);
        }
        Ok(out)
    }
}

/// Free-function form matching the spec surface.
pub fn lp_project<T: Scalar>(field: &ComplexField<T>, n_level: T, kind: Projection) -> Result<ComplexField<T>> {
    let grid = field.geometry().full().map_err(|_| Error::UnsupportedGeometry {
        op: "lp_project",
        geometry: "radial",
    })?;
    LittlewoodPaleyBank::for_grid(grid).project(field, n_level, kind)
}

/// Hard spectral truncation: zero every mode with |ξ| > ξ_cap. Useful for
/// probe data that must have a finite maximum group velocity (the wraparound
/// time of the truncated field is exactly L/(4ξ_cap³)).
pub fn hard_lowpass<T: Scalar>(field: &ComplexField<T>, xi_cap: T) -> Result<ComplexField<T>> {
    let grid = field.geometry().full()?;
    let mut spec = grid.forward(field.values())?;
    for (v, &x2) in spec.iter_mut().zip(grid.xi2()) {
        if x2.sqrt() > xi_cap {
            *v = Complex::new(T::zero(), T::zero());
        }
    }
    let vals = grid.inverse(&spec)?;
    ComplexField::new(Geometry::Full(grid.clone()), vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn bump_shape() {
        assert_eq!(psi_bump(0.0f64), 1.0);
        assert_eq!(psi_bump(1.0f64), 1.0);
        assert_eq!(psi_bump(2.0f64), 0.0);
        assert_eq!(psi_bump(5.0f64), 0.0);
        let mid = psi_bump(1.5f64);
        assert!((mid - 0.5).abs() < 1e-14, "symmetric step at midpoint, got {mid}");
        // Monotone decreasing on the transition.
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = psi_bump(1.0 + i as f64 / 100.0);
            assert!(v <= prev + 1e-15);
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn pure_mode_below_level_unchanged() {
        let g = make_grid::<f64>(1, 64, std::f64::consts::PI).unwrap();
        let u = ComplexField::pure_mode(&g, &[2]);
        let p = lp_project(&u, 4.0, Projection::Leq).unwrap();
        let d = u.l2_distance(&p).unwrap();
        assert!(d <= 1e-13 * u.lp_norm(2.0).unwrap());
    }

    #[test]
    fn disjoint_annuli_compose_to_zero() {
        let g = make_grid::<f64>(1, 128, std::f64::consts::PI).unwrap();
        let u = ComplexField::from_fn_full(&g, |x| {
            num_complex::Complex::new((3.0 * x[0]).sin() + 0.2 * (11.0 * x[0]).cos(), 0.1 * (7.0 * x[0]).sin())
        });
        let first = lp_project(&u, 4.0, Projection::At).unwrap();
        let second = lp_project(&first, 16.0, Projection::At).unwrap();
        assert!(second.lp_norm(2.0).unwrap() <= 1e-14 * u.lp_norm(2.0).unwrap());
    }

    #[test]
    fn partition_reproduces_spectrum_exactly() {
        // Bitwise wherever ψ ∈ {0,1} (everything off the transition annulus);
        // on the annulus the complement-by-subtraction reconstructs to the
        // final IEEE rounding of p + (û − p), i.e. one ulp.
        let g = make_grid::<f64>(1, 128, 5.0).unwrap();
        let bank = LittlewoodPaleyBank::for_grid(&g);
        let u = ComplexField::from_fn_full(&g, |x| {
            num_complex::Complex::new((x[0] * 1.7).sin(), (-x[0] * x[0] / 7.0).exp())
        });
        let spec = g.forward(u.values()).unwrap();
        for n_level in bank.levels() {
            let lo = bank.project_spectrum(&spec, n_level, Projection::Leq).unwrap();
            let hi = bank.project_spectrum(&spec, n_level, Projection::Gt).unwrap();
            for (flat, ((a, b), s)) in lo.iter().zip(hi.iter()).zip(spec.iter()).enumerate() {
                let sum = a + b;
                let xi = g.xi2()[flat].sqrt();
                let on_ring = xi > n_level && xi < 2.0 * n_level;
                if on_ring {
                    assert!((sum.re - s.re).abs() <= f64::EPSILON * s.re.abs());
                    assert!((sum.im - s.im).abs() <= f64::EPSILON * s.im.abs());
                } else {
                    assert_eq!(sum.re, s.re, "re partition defect at N={n_level}, |ξ|={xi}");
                    assert_eq!(sum.im, s.im, "im partition defect at N={n_level}, |ξ|={xi}");
                }
            }
        }
    }

    #[test]
    fn telescoping_lt_plus_at_is_leq() {
        let g = make_grid::<f64>(1, 64, 2.0).unwrap();
        let bank = LittlewoodPaleyBank::for_grid(&g);
        let u = ComplexField::gaussian(&Geometry::Full(g.clone()), 1.0, 0.4, &[0.1]);
        let spec = g.forward(u.values()).unwrap();
        let n_level = 8.0;
        let lt = bank.project_spectrum(&spec, n_level, Projection::Lt).unwrap();
        let at = bank.project_spectrum(&spec, n_level, Projection::At).unwrap();
        let leq = bank.project_spectrum(&spec, n_level, Projection::Leq).unwrap();
        for ((a, b), c) in lt.iter().zip(at.iter()).zip(leq.iter()) {
            assert!((a + b - c).norm() <= 1e-15 * (1.0 + c.norm()));
        }
    }

    #[test]
    fn bernstein_second_derivative_constant() {
        // ‖|∇|² P_N u‖₂ ≤ 4N² ‖P_N u‖₂ because the annulus tops out at 2N.
        let g = make_grid::<f64>(1, 256, 8.0).unwrap();
        let bank = LittlewoodPaleyBank::for_grid(&g);
        for seed in 0..20u64 {
            let u = crate::random::random_band_limited(&g, 0.8 * g.xi_max(), seed);
            for &n_level in &[1.0, 2.0, 4.0] {
                let band = bank.project(&u, n_level, Projection::At).unwrap();
                let l2 = band.lp_norm(2.0).unwrap();
                if l2 < 1e-12 {
                    continue;
                }
                let d2 = band.sobolev_seminorm(2.0).unwrap();
                assert!(
                    d2 <= 4.0 * n_level * n_level * l2 * (1.0 + 1e-12),
                    "Bernstein violated: {d2} > 4N²·{l2} at N={n_level}"
                );
            }
        }
    }
}
