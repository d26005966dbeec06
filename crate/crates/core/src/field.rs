//! Complex-valued states on a grid and the fixed-time functionals applied to
//! them: Lᵖ and Sobolev norms, symmetry actions (rescaling g, boost), and the
//! pointwise nonlinearity λ|u|^{8/n}u.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;
use crate::radial::RadialGrid;
use crate::scalar::{real, Scalar};

/// Discretization a field lives on.
#[derive(Clone)]
pub enum Geometry<T: Scalar> {
    Full(Arc<SpectralGrid<T>>),
    Radial(Arc<RadialGrid<T>>),
}

impl<T: Scalar> Geometry<T> {
    pub fn len(&self) -> usize {
        match self {
            Geometry::Full(g) => g.len(),
            Geometry::Radial(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Full(g) => g.dim(),
            Geometry::Radial(g) => g.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Geometry::Full(_) => "full",
            Geometry::Radial(_) => "radial",
        }
    }

    pub fn full(&self) -> Result<&Arc<SpectralGrid<T>>> {
        match self {
            Geometry::Full(g) => Ok(g),
            Geometry::Radial(_) => Err(Error::UnsupportedGeometry { op: "spectral", geometry: "radial" }),
        }
    }

    pub fn radial(&self) -> Result<&Arc<RadialGrid<T>>> {
        match self {
            Geometry::Radial(g) => Ok(g),
            Geometry::Full(_) => Err(Error::UnsupportedGeometry { op: "radial", geometry: "full" }),
        }
    }

    pub fn same_as(&self, other: &Geometry<T>) -> bool {
        match (self, other) {
            (Geometry::Full(a), Geometry::Full(b)) => Arc::ptr_eq(a, b),
            (Geometry::Radial(a), Geometry::Radial(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// A complex state u on a grid, optionally stamped with its time.
#[derive(Clone)]
pub struct ComplexField<T: Scalar> {
    geometry: Geometry<T>,
    values: Vec<Complex<T>>,
    time_tag: Option<T>,
}

impl<T: Scalar> ComplexField<T> {
    pub fn new(geometry: Geometry<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::ShapeMismatch { expected: geometry.len(), found: values.len() });
        }
        Ok(Self { geometry, values, time_tag: None })
    }

    pub fn zeros(geometry: Geometry<T>) -> Self {
        let len = geometry.len();
        Self { geometry, values: vec![Complex::new(T::zero(), T::zero()); len], time_tag: None }
    }

    /// Build a full-grid field from a function of the point coordinates.
    pub fn from_fn_full(grid: &Arc<SpectralGrid<T>>, f: impl Fn(&[T]) -> Complex<T>) -> Self {
        let n = grid.dim();
        let mut coords = vec![T::zero(); n];
        let values = (0..grid.len())
            .map(|flat| {
                for (axis, c) in coords.iter_mut().enumerate() {
                    *c = grid.coord(flat, axis);
                }
                f(&coords)
            })
            .collect();
        Self { geometry: Geometry::Full(grid.clone()), values, time_tag: None }
    }

    /// Build a radial field from a function of r.
    pub fn from_fn_radial(grid: &Arc<RadialGrid<T>>, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { geometry: Geometry::Radial(grid.clone()), values, time_tag: None }
    }

    /// Isotropic Gaussian a·e^{−|x−x₀|²/(2σ²)} on either geometry.
    pub fn gaussian(geometry: &Geometry<T>, amplitude: T, sigma: T, center: &[T]) -> Self {
        let two = real::<T>(2.0);
        match geometry {
            Geometry::Full(g) => Self::from_fn_full(g, |x| {
                let mut r2 = T::zero();
                for (axis, &xi) in x.iter().enumerate() {
                    let c = center.get(axis).copied().unwrap_or(T::zero());
                    r2 = r2 + (xi - c) * (xi - c);
                }
                Complex::new(amplitude * (-r2 / (two * sigma * sigma)).exp(), T::zero())
            }),
            Geometry::Radial(g) => Self::from_fn_radial(g, |r| {
                Complex::new(amplitude * (-r * r / (two * sigma * sigma)).exp(), T::zero())
            }),
        }
    }

    /// Plane wave e^{i⟨k,x⟩Δξ·mode} with integer mode numbers per axis.
    pub fn pure_mode(grid: &Arc<SpectralGrid<T>>, mode: &[i64]) -> Self {
        let dxi = grid.dxi();
        Self::from_fn_full(grid, |x| {
            let mut phase = T::zero();
            for (axis, &xi) in x.iter().enumerate() {
                let m = mode.get(axis).copied().unwrap_or(0);
                phase = phase + dxi * real::<T>(m as f64) * xi;
            }
            Complex::from_polar(T::one(), phase)
        })
    }

    pub fn geometry(&self) -> &Geometry<T> {
        &self.geometry
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn time_tag(&self) -> Option<T> {
        self.time_tag
    }

    pub fn with_time(mut self, t: T) -> Self {
        self.time_tag = Some(t);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Quadrature measure of one sample (cell volume or radial weight).
    fn measure(&self, idx: usize) -> T {
        match &self.geometry {
            Geometry::Full(g) => g.cell_volume(),
            Geometry::Radial(g) => g.weights()[idx],
        }
    }

    /// ‖u‖_{Lᵖ} with the geometry's measure; `p = ∞` returns max modulus.
    pub fn lp_norm(&self, p: T) -> Result<T> {
        if p < T::one() {
            return Err(Error::InvalidArgument(format!("Lp norm needs p >= 1, got {p}")));
        }
        if p == T::infinity() {
            let mut m = T::zero();
            for v in &self.values {
                let a = v.norm();
                if a > m {
                    m = a;
                }
            }
            return Ok(m);
        }
        let two = real::<T>(2.0);
        let mut acc = T::zero();
        if p == two {
            for (idx, v) in self.values.iter().enumerate() {
                acc = acc + v.norm_sqr() * self.measure(idx);
            }
        } else {
            for (idx, v) in self.values.iter().enumerate() {
                let a = v.norm();
                if a > T::zero() {
                    acc = acc + a.powf(p) * self.measure(idx);
                }
            }
        }
        Ok(acc.powf(T::one() / p))
    }

    pub fn sup_norm(&self) -> T {
        self.lp_norm(T::infinity()).expect("infinity is a valid exponent")
    }

    /// ∫|u|ᵖ (the p-th power of the Lᵖ norm), used by space-time quadratures.
    pub fn lp_power_integral(&self, p: T) -> T {
        let mut acc = T::zero();
        for (idx, v) in self.values.iter().enumerate() {
            let a = v.norm();
            if a > T::zero() {
                acc = acc + a.powf(p) * self.measure(idx);
            }
        }
        acc
    }

    /// ‖u‖₂² with the geometry's measure.
    pub fn l2_norm_sq(&self) -> T {
        let mut acc = T::zero();
        for (idx, v) in self.values.iter().enumerate() {
            acc = acc + v.norm_sqr() * self.measure(idx);
        }
        acc
    }

    /// ‖|∇|^s u‖_{L²}. Full grids support any s ≥ 0 (Fourier multiplier |ξ|^s);
    /// radial grids only s ∈ {1, 2} through the discrete operators.
    pub fn sobolev_seminorm(&self, s: T) -> Result<T> {
        match &self.geometry {
            Geometry::Full(g) => {
                let spec = g.forward(&self.values)?;
                let mut acc = T::zero();
                if s == T::zero() {
                    for v in &spec {
                        acc = acc + v.norm_sqr();
                    }
                } else if s == real::<T>(2.0) {
                    for (v, &x4) in spec.iter().zip(g.xi4()) {
                        acc = acc + v.norm_sqr() * x4;
                    }
                } else {
                    for (v, &x2) in spec.iter().zip(g.xi2()) {
                        if x2 > T::zero() {
                            acc = acc + v.norm_sqr() * x2.powf(s);
                        }
                    }
                }
                Ok((acc * g.freq_measure()).sqrt())
            }
            Geometry::Radial(g) => {
                if s == T::one() {
                    Ok(g.h1_seminorm_sq(&self.values).sqrt())
                } else if s == real::<T>(2.0) {
                    let lap = g.apply_laplacian(&self.values)?;
                    Ok(g.mass_of(&lap).sqrt())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "radial geometry supports sobolev_seminorm only for s in {{1,2}}, got {s}"
                    )))
                }
            }
        }
    }

    /// Pointwise nonlinearity λ|u|^{8/n}u (n is the geometry's dimension).
    pub fn nonlinearity(&self, lambda: T) -> Self {
        let n = self.geometry.dim();
        let expo = real::<T>(8.0 / n as f64);
        let values = self
            .values
            .iter()
            .map(|v| {
                let a = v.norm();
                if a > T::zero() {
                    *v * (lambda * a.powf(expo))
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        Self { geometry: self.geometry.clone(), values, time_tag: self.time_tag }
    }

    /// Frequency modulation e^{iX x_axis}·u. Mass is preserved exactly; the
    /// shifted spectrum must stay below Nyquist, enforced as |X| ≤ ξ_max/2.
    pub fn boost(&self, x_boost: T, axis: usize) -> Result<Self> {
        let g = self.geometry.full().map_err(|_| Error::UnsupportedGeometry {
            op: "boost",
            geometry: "radial",
        })?;
        if axis >= g.dim() {
            return Err(Error::InvalidArgument(format!("boost axis {axis} out of range")));
        }
        if x_boost.abs() > g.xi_max() / real::<T>(2.0) {
            return Err(Error::InvalidArgument(format!(
                "boost {x_boost} exceeds the grid's Nyquist margin {}",
                g.xi_max() / real::<T>(2.0)
            )));
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(flat, v)| *v * Complex::from_polar(T::one(), x_boost * g.coord(flat, axis)))
            .collect();
        Ok(Self { geometry: self.geometry.clone(), values, time_tag: self.time_tag })
    }

    /// Rescaling symmetry g_{(h,x₀)}u = h^{n/2} u(h(x − x₀)) by exact
    /// trigonometric interpolation. Mass is checked to `mass_tol` relative.
    pub fn rescale_g(&self, h: T, x0: &[T], mass_tol: T) -> Result<Self> {
        let g = self.geometry.full().map_err(|_| Error::UnsupportedGeometry {
            op: "rescale_g",
            geometry: "radial",
        })?;
        if h <= T::zero() || !h.is_finite() {
            return Err(Error::InvalidArgument("rescale factor must be positive".into()));
        }
        let n = g.dim();
        let p = g.points_per_axis();
        let mass_before = self.l2_norm_sq();

        let mut data = self.values.clone();
        let mut line = vec![Complex::new(T::zero(), T::zero()); p];
        let mut out_line = vec![Complex::new(T::zero(), T::zero()); p];

        for axis in 0..n {
            let x0a = x0.get(axis).copied().unwrap_or(T::zero());
            // Target coordinates along this axis (same for every line).
            let targets: Vec<T> = (0..p)
                .map(|m| {
                    let x = g.dx() * real::<T>(m as f64) - g.half_width();
                    h * (x - x0a)
                })
                .collect();
            let stride = p.pow((n - 1 - axis) as u32);
            let block = stride * p;
            let mut block_start = 0;
            while block_start < data.len() {
                for offset in 0..stride {
                    let base = block_start + offset;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + j * stride];
                    }
                    resample_line(g, &line, &targets, &mut out_line);
                    for (j, v) in out_line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
                block_start += block;
            }
        }

        let amp = h.powf(real::<T>(n as f64) / real::<T>(2.0));
        for v in data.iter_mut() {
            *v = Complex::new(v.re * amp, v.im * amp);
        }

        let out = Self { geometry: self.geometry.clone(), values: data, time_tag: self.time_tag };
        let mass_after = out.l2_norm_sq();
        let drift = ((mass_after - mass_before) / mass_before.max(T::min_positive_value())).abs();
        if drift > mass_tol {
            return Err(Error::MassNotPreserved {
                drift: drift.to_f64().unwrap_or(f64::NAN),
                tol: mass_tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(out)
    }

    /// Complex conjugate (time reversal companion).
    pub fn conj(&self) -> Self {
        let values = self.values.iter().map(|v| v.conj()).collect();
        Self { geometry: self.geometry.clone(), values, time_tag: self.time_tag }
    }

    /// L² distance to another field on the same geometry.
    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        if !self.geometry.same_as(&other.geometry) {
            return Err(Error::GeometryMismatch);
        }
        let mut acc = T::zero();
        for (idx, (a, b)) in self.values.iter().zip(other.values.iter()).enumerate() {
            acc = acc + (a - b).norm_sqr() * self.measure(idx);
        }
        Ok(acc.sqrt())
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let values = self.values.iter().map(|v| v * factor).collect();
        Self { geometry: self.geometry.clone(), values, time_tag: self.time_tag }
    }

    /// Fraction of mass outside the centered box of half-width `frac·L`
    /// (full grid) or radius `frac·r_max` (radial).
    pub fn tail_mass_fraction(&self, frac: T) -> T {
        let total = self.l2_norm_sq();
        if total == T::zero() {
            return T::zero();
        }
        let mut outside = T::zero();
        match &self.geometry {
            Geometry::Full(g) => {
                let bound = g.half_width() * frac;
                for (flat, v) in self.values.iter().enumerate() {
                    let mut out = false;
                    for axis in 0..g.dim() {
                        if g.coord(flat, axis).abs() > bound {
                            out = true;
                            break;
                        }
                    }
                    if out {
                        outside = outside + v.norm_sqr() * g.cell_volume();
                    }
                }
            }
            Geometry::Radial(g) => {
                let bound = g.r_max() * frac;
                for (i, v) in self.values.iter().enumerate() {
                    if g.nodes()[i] > bound {
                        outside = outside + v.norm_sqr() * g.weights()[i];
                    }
                }
            }
        }
        outside / total
    }
}

/// Evaluate the trigonometric interpolant of `line` at `targets` (coordinates
/// in the box; periodic wrap is implicit in the exponentials).
fn resample_line<T: Scalar>(
    grid: &SpectralGrid<T>,
    line: &[Complex<T>],
    targets: &[T],
    out: &mut [Complex<T>],
) {
    let p = line.len();
    // Plain (unnormalized) DFT of the line via the grid's planner would need a
    // scratch FFT; lines are short, so an O(P²) direct evaluation from the DFT
    // coefficients keeps this dependency-free. First get C_k with one FFT-free
    // pass is O(P²) anyway, so evaluate straight from physical samples:
    //   v(y) = (1/P) Σ_k [Σ_j v_j e^{−2πijk/P}] e^{iξ_k(y+L)}
    // Summing first over k gives the Dirichlet kernel; direct two-stage
    // evaluation keeps the code transparent.
    let mut coeff = vec![Complex::new(T::zero(), T::zero()); p];
    let minus_two_pi_over_p = -real::<T>(2.0) * T::PI() / real::<T>(p as f64);
    for (k, c) in coeff.iter_mut().enumerate() {
        let w = Complex::from_polar(T::one(), minus_two_pi_over_p * real::<T>(k as f64));
        let mut wp = Complex::new(T::one(), T::zero());
        let mut acc = Complex::new(T::zero(), T::zero());
        for v in line {
            acc += v * wp;
            wp *= w;
        }
        *c = acc;
    }
    let inv_p = T::one() / real::<T>(p as f64);
    let dxi = grid.dxi();
    let l = grid.half_width();
    for (m, &y) in targets.iter().enumerate() {
        // The box stands in for ℝⁿ: outside the fundamental domain the field
        // is zero, not periodic, or a rescale with h > 1 would pick up ghost
        // copies of the support through the wrap.
        if y < -l || y >= l {
            out[m] = Complex::new(T::zero(), T::zero());
            continue;
        }
        let theta = dxi * (y + l);
        let w_pos = Complex::from_polar(T::one(), theta);
        let w_neg = w_pos.conj();
        let mut acc = coeff[0];
        let mut wp = w_pos;
        for k in 1..p / 2 {
            acc += coeff[k] * wp;
            wp *= w_pos;
        }
        let mut wn = w_neg;
        for k in 1..=p / 2 {
            acc += coeff[p - k] * wn;
            wn *= w_neg;
        }
        out[m] = acc * inv_p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn zero_field_norms_vanish() {
        let g = make_grid::<f64>(1, 64, 5.0).unwrap();
        let z = ComplexField::zeros(Geometry::Full(g));
        for p in [1.0, 2.0, 10.0, f64::INFINITY] {
            assert_eq!(z.lp_norm(p).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_p_below_one() {
        let g = make_grid::<f64>(1, 64, 5.0).unwrap();
        let z = ComplexField::zeros(Geometry::Full(g));
        assert!(z.lp_norm(0.5).is_err());
    }

    #[test]
    fn gaussian_l2_closed_form() {
        // ∫ e^{−x²} dx = √π, so ‖e^{−x²/2}‖₂² = √π.
        let g = make_grid::<f64>(1, 512, 20.0).unwrap();
        let u = ComplexField::gaussian(&Geometry::Full(g), 1.0, 1.0, &[0.0]);
        let m = u.l2_norm_sq();
        let want = std::f64::consts::PI.sqrt();
        assert!((m - want).abs() <= 1e-8, "mass {m} vs {want}");
        let norm = u.lp_norm(2.0).unwrap();
        assert!((norm - want.sqrt()).abs() <= 1e-8);
    }

    #[test]
    fn l2_matches_plancherel() {
        let g = make_grid::<f64>(1, 128, 7.0).unwrap();
        let u = ComplexField::from_fn_full(&g, |x| {
            Complex::new((x[0] * 0.9).sin() * (-x[0] * x[0] / 8.0).exp(), (x[0] * 0.3).cos() * 0.2)
        });
        let spec = g.forward(u.values()).unwrap();
        let phys = u.l2_norm_sq();
        let plan = g.spectral_mass_of(&spec);
        assert!((phys - plan).abs() <= 1e-10 * phys);
    }

    #[test]
    fn sobolev_s0_equals_l2_and_pure_mode_s2() {
        let g = make_grid::<f64>(1, 64, std::f64::consts::PI).unwrap();
        let u = ComplexField::pure_mode(&g, &[1]);
        let l2 = u.lp_norm(2.0).unwrap();
        let s0 = u.sobolev_seminorm(0.0).unwrap();
        assert!((l2 - s0).abs() <= 1e-12 * l2);
        // e^{ix} has |ξ|² = 1 so the H² seminorm equals the L² norm.
        let s2 = u.sobolev_seminorm(2.0).unwrap();
        assert!((s2 - l2).abs() <= 1e-12 * l2);
    }

    #[test]
    fn gaussian_h2_closed_form() {
        // For u = e^{−x²/2}: ‖u''‖₂² = (3/4)√π.
        let g = make_grid::<f64>(1, 1024, 20.0).unwrap();
        let u = ComplexField::gaussian(&Geometry::Full(g), 1.0, 1.0, &[0.0]);
        let s2 = u.sobolev_seminorm(2.0).unwrap();
        let want = (0.75 * std::f64::consts::PI.sqrt()).sqrt();
        assert!((s2 - want).abs() <= 1e-6, "{s2} vs {want}");
    }

    #[test]
    fn nonlinearity_pointwise_values() {
        let g = make_grid::<f64>(1, 64, 5.0).unwrap();
        let mut u = ComplexField::zeros(Geometry::Full(g));
        u.values_mut()[3] = Complex::new(2.0, 0.0);
        u.values_mut()[10] = Complex::new(1.0, 0.0);
        let f = u.nonlinearity(-1.0);
        // n = 1: λ|u|⁸u = −2⁹ at the 2-valued point.
        assert!((f.values()[3].re + 512.0).abs() < 1e-12);
        assert!((f.values()[10].re + 1.0).abs() < 1e-12);
        assert_eq!(f.values()[0].re, 0.0);
        let z = ComplexField::zeros(Geometry::Full(make_grid::<f64>(1, 64, 5.0).unwrap()));
        assert!(z.nonlinearity(1.0).values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn boost_preserves_modulus_and_mass() {
        let g = make_grid::<f64>(1, 256, 10.0).unwrap();
        let u = ComplexField::gaussian(&Geometry::Full(g), 1.3, 0.8, &[0.5]);
        let b = u.boost(2.0, 0).unwrap();
        for (a, c) in u.values().iter().zip(b.values().iter()) {
            assert!((a.norm() - c.norm()).abs() <= 1e-15);
        }
        assert_eq!(u.l2_norm_sq(), b.l2_norm_sq());
        // X = 0 is the identity.
        let b0 = u.boost(0.0, 0).unwrap();
        for (a, c) in u.values().iter().zip(b0.values().iter()) {
            assert_eq!(a, c);
        }
    }

    #[test]
    fn boost_rejects_beyond_nyquist_margin() {
        let g = make_grid::<f64>(1, 64, 10.0).unwrap();
        let u = ComplexField::gaussian(&Geometry::Full(g.clone()), 1.0, 1.0, &[0.0]);
        let too_big = g.xi_max();
        assert!(u.boost(too_big, 0).is_err());
    }

    #[test]
    fn rescale_identity_and_closed_form() {
        let g = make_grid::<f64>(1, 256, 16.0).unwrap();
        let u = ComplexField::gaussian(&Geometry::Full(g.clone()), 1.0, 1.0, &[0.0]);
        let same = u.rescale_g(1.0, &[0.0], 1e-8).unwrap();
        let d = u.l2_distance(&same).unwrap();
        assert!(d <= 1e-10, "identity rescale distance {d}");

        // h = 2: pointwise 2^{1/2} e^{−(2x)²/2}.
        let half = u.rescale_g(2.0, &[0.0], 1e-8).unwrap();
        for (flat, v) in half.values().iter().enumerate() {
            let x = g.coord(flat, 0);
            let want = 2.0f64.sqrt() * (-(2.0 * x).powi(2) / 2.0).exp();
            assert!((v.re - want).abs() <= 1e-8, "at x={x}: {} vs {want}", v.re);
            assert!(v.im.abs() <= 1e-9);
        }
        // Mass preserved.
        assert!((half.l2_norm_sq() - u.l2_norm_sq()).abs() <= 1e-8 * u.l2_norm_sq());
    }

    #[test]
    fn rescale_mass_guard_trips_on_support_violation() {
        // Shrinking (h < 1) a wide field pushes support outside the box.
        let g = make_grid::<f64>(1, 128, 8.0).unwrap();
        let u = ComplexField::gaussian(&Geometry::Full(g), 1.0, 3.0, &[0.0]);
        let r = u.rescale_g(0.05, &[0.0], 1e-10);
        assert!(matches!(r, Err(Error::MassNotPreserved { .. })));
    }

    #[test]
    fn nonlinearity_commutes_with_boost_in_modulus() {
        let g = make_grid::<f64>(1, 128, 10.0).unwrap();
        let u = ComplexField::gaussian(&Geometry::Full(g), 1.1, 1.0, &[0.3]);
        let lhs = u.boost(1.5, 0).unwrap().nonlinearity(-1.0);
        let rhs = u.nonlinearity(-1.0);
        for (a, b) in lhs.values().iter().zip(rhs.values().iter()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-12 * (1.0 + b.norm()));
        }
    }
}
