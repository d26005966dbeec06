//! Radial half-line discretization for radially symmetric fields on ℝⁿ.
//!
//! Nodes are staggered, r_i = (i+1/2)Δr with Δr = r_max/(N−1/2), so the ghost
//! node at −Δr/2 mirrors the first node (even reflection at r = 0) and the last
//! node sits exactly at r_max (Dirichlet decay beyond). The Laplacian
//! ∂_rr + ((n−1)/r)∂_r is discretized in conservative flux form
//! r^{1−n}∂_r(r^{n−1}∂_r·), which is exactly self-adjoint under the quadrature
//! weights w_i = S_{n−1} r_i^{n−1} Δr; the discrete Δ² is its square, so its
//! spectrum is nonnegative by construction.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, real_of_usize, Scalar};
use crate::tridiag::eigen_symmetric_tridiagonal;

/// Hard cap on the node count; the cached eigendecomposition is O(N²) memory.
pub const MAX_RADIAL_POINTS: usize = 4096;

pub struct RadialGrid<T: Scalar> {
    dim: usize,
    n_points: usize,
    r_max: T,
    dr: T,
    nodes: Vec<T>,
    weights: Vec<T>,
    sphere_area: T,
    lap_diag: Vec<T>,
    lap_upper: Vec<T>,
    lap_lower: Vec<T>,
    // Face conductances S·f_i/Δr used by the H¹ form (face i couples cells i, i+1).
    face_flux: Vec<T>,
    /// Eigenvalues of the discrete Laplacian (ascending, all ≤ 0).
    lap_eigenvalues: Vec<T>,
    /// Eigenvalues of the discrete biharmonic, μ_j = θ_j².
    eigenvalues: Vec<T>,
    /// Weighted-orthonormal eigenvectors, column-major.
    eigenvectors: Vec<T>,
}

impl<T: Scalar> std::fmt::Debug for RadialGrid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialGrid")
            .field("dim", &self.dim)
            .field("n_points", &self.n_points)
            .field("r_max", &self.r_max)
            .finish()
    }
}

fn gamma_half_integer(twice: usize) -> f64 {
    // Γ(twice/2) for twice ≥ 1, reduced to Γ(1) = 1 or Γ(1/2) = √π.
    let mut z = twice as f64 / 2.0;
    let mut acc = 1.0;
    while z > 1.0 + 1e-9 {
        z -= 1.0;
        acc *= z;
    }
    if (z - 1.0).abs() < 1e-9 {
        acc
    } else {
        acc * std::f64::consts::PI.sqrt()
    }
}

/// Area of the unit sphere S^{n−1} in ℝⁿ.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Build the radial grid and cache the eigendecomposition of the discrete Δ².
pub fn make_radial_grid<T: Scalar>(n: usize, n_points: usize, r_max: T) -> Result<Arc<RadialGrid<T>>> {
    if n < 1 {
        return Err(Error::InvalidGrid("dimension must be >= 1".into()));
    }
    if n_points < 8 {
        return Err(Error::InvalidGrid("radial grid needs at least 8 nodes".into()));
    }
    if n_points > MAX_RADIAL_POINTS {
        return Err(Error::InvalidGrid(format!(
            "radial grid capped at {MAX_RADIAL_POINTS} nodes (dense eigendecomposition), got {n_points}"
        )));
    }
    if r_max <= T::zero() || !r_max.is_finite() {
        return Err(Error::InvalidGrid("r_max must be positive and finite".into()));
    }

    let np = n_points;
    let dr = r_max / (real_of_usize::<T>(np) - real::<T>(0.5));
    let nodes: Vec<T> = (0..np).map(|i| (real_of_usize::<T>(i) + real::<T>(0.5)) * dr).collect();
    let sphere = real::<T>(unit_sphere_area(n));

    let pow = |r: T| -> T {
        let mut acc = T::one();
        for _ in 0..n - 1 {
            acc = acc * r;
        }
        acc
    };

    // Face i sits at (i+1)Δr between cells i and i+1; the r=0 face carries no flux.
    let face_pow: Vec<T> = (0..np).map(|i| pow(real_of_usize::<T>(i + 1) * dr)).collect();

    // Exact cell volumes ∫ r^{n−1} dr over [iΔr, (i+1)Δr]; using point values
    // r_i^{n−1}Δr instead is inconsistent at the axis for n > 1.
    let cell_vol: Vec<T> = (0..np)
        .map(|i| {
            let a = real_of_usize::<T>(i) * dr;
            let b = real_of_usize::<T>(i + 1) * dr;
            (pow(b) * b - pow(a) * a) / real::<T>(n as f64)
        })
        .collect();

    let weights: Vec<T> = cell_vol.iter().map(|&v| sphere * v).collect();

    let mut lap_diag = vec![T::zero(); np];
    let mut lap_upper = vec![T::zero(); np - 1];
    let mut lap_lower = vec![T::zero(); np - 1];
    for i in 0..np {
        let inner = if i == 0 { T::zero() } else { face_pow[i - 1] };
        lap_diag[i] = -(face_pow[i] + inner) / (cell_vol[i] * dr);
        if i + 1 < np {
            lap_upper[i] = face_pow[i] / (cell_vol[i] * dr);
            lap_lower[i] = face_pow[i] / (cell_vol[i + 1] * dr);
        }
    }

    // Symmetrize with D^{1/2} A D^{-1/2}, D = diag(w).
    let sym_off: Vec<T> = (0..np - 1)
        .map(|i| face_pow[i] / (dr * (cell_vol[i] * cell_vol[i + 1]).sqrt()))
        .collect();
    let eig = eigen_symmetric_tridiagonal(&lap_diag, &sym_off)?;

    let lap_eigenvalues = eig.vals.clone();
    let eigenvalues: Vec<T> = eig.vals.iter().map(|&t| t * t).collect();
    let mut eigenvectors = eig.vecs;
    // Undo the similarity transform and renormalize against the weights:
    // v_j[i] = u_j[i]/sqrt(w_i) is orthonormal under ⟨f,g⟩_w.
    let inv_sqrt_w: Vec<T> = weights.iter().map(|&w| T::one() / w.sqrt()).collect();
    for j in 0..np {
        let col = &mut eigenvectors[j * np..(j + 1) * np];
        for (i, c) in col.iter_mut().enumerate() {
            *c = *c * inv_sqrt_w[i];
        }
    }

    let face_flux: Vec<T> = face_pow.iter().map(|&fp| sphere * fp / dr).collect();

    Ok(Arc::new(RadialGrid {
        dim: n,
        n_points: np,
        r_max,
        dr,
        nodes,
        weights,
        sphere_area: sphere,
        lap_diag,
        lap_upper,
        lap_lower,
        face_flux,
        lap_eigenvalues,
        eigenvalues,
        eigenvectors,
    }))
}

impl<T: Scalar> RadialGrid<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn dr(&self) -> T {
        self.dr
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Quadrature weights S_{n−1} r^{n−1} Δr (full ℝⁿ normalization).
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn sphere_area(&self) -> T {
        self.sphere_area
    }

    /// Eigenvalues μ_j of the discrete biharmonic, ascending in |θ|.
    pub fn biharmonic_eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn laplacian_eigenvalues(&self) -> &[T] {
        &self.lap_eigenvalues
    }

    fn check_shape(&self, len: usize) -> Result<()> {
        if len != self.n_points {
            return Err(Error::ShapeMismatch { expected: self.n_points, found: len });
        }
        Ok(())
    }

    /// Apply the discrete radial Laplacian.
    pub fn apply_laplacian(&self, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_shape(u.len())?;
        let np = self.n_points;
        let mut out = vec![Complex::new(T::zero(), T::zero()); np];
        for i in 0..np {
            let mut acc = u[i] * self.lap_diag[i];
            if i > 0 {
                acc += u[i - 1] * self.lap_lower[i - 1];
            }
            if i + 1 < np {
                acc += u[i + 1] * self.lap_upper[i];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Apply the discrete biharmonic Δ² (the Laplacian squared).
    pub fn apply_biharmonic(&self, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let once = self.apply_laplacian(u)?;
        self.apply_laplacian(&once)
    }

    /// Expand onto the weighted-orthonormal eigenbasis: c_j = ⟨u, v_j⟩_w.
    pub fn analyze(&self, u: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_shape(u.len())?;
        let np = self.n_points;
        let weighted: Vec<Complex<T>> = (0..np).map(|i| u[i] * self.weights[i]).collect();
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); np];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let col = &self.eigenvectors[j * np..(j + 1) * np];
            let mut re = T::zero();
            let mut im = T::zero();
            for (v, w) in col.iter().zip(weighted.iter()) {
                re = re + *v * w.re;
                im = im + *v * w.im;
            }
            *c = Complex::new(re, im);
        }
        Ok(coeffs)
    }

    /// Reconstruct from eigenbasis coefficients.
    pub fn synthesize(&self, coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_shape(coeffs.len())?;
        let np = self.n_points;
        let mut out = vec![Complex::new(T::zero(), T::zero()); np];
        for (j, c) in coeffs.iter().enumerate() {
            if c.re == T::zero() && c.im == T::zero() {
                continue;
            }
            let col = &self.eigenvectors[j * np..(j + 1) * np];
            for (o, v) in out.iter_mut().zip(col.iter()) {
                o.re = o.re + *v * c.re;
                o.im = o.im + *v * c.im;
            }
        }
        Ok(out)
    }

    /// Weighted quadrature Σ wᵢ |uᵢ|².
    pub fn mass_of(&self, u: &[Complex<T>]) -> T {
        let mut s = T::zero();
        for (v, w) in u.iter().zip(self.weights.iter()) {
            s = s + v.norm_sqr() * *w;
        }
        s
    }

    /// Solve (Δ² + 1)x = b exactly through the factorization
    /// A² + I = (A + iI)(A − iI) with two tridiagonal (Thomas) sweeps.
    /// This avoids the eigenbasis route, whose accuracy is limited by
    /// ε·spectral-radius at fine grids.
    pub fn solve_biharmonic_plus_one(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_shape(b.len())?;
        let z = self.solve_shifted(b, T::one())?;
        self.solve_shifted(&z, -T::one())
    }

    /// Thomas solve of (A + i·shift·I)x = b for the tridiagonal Laplacian A.
    fn solve_shifted(&self, b: &[Complex<T>], shift: T) -> Result<Vec<Complex<T>>> {
        let np = self.n_points;
        let mut diag: Vec<Complex<T>> =
            self.lap_diag.iter().map(|&d| Complex::new(d, shift)).collect();
        let mut rhs = b.to_vec();
        // Forward elimination.
        for i in 1..np {
            let m = Complex::new(self.lap_lower[i - 1], T::zero()) / diag[i - 1];
            let upper_prev = self.lap_upper[i - 1];
            diag[i] = diag[i] - m * upper_prev;
            let corr = rhs[i - 1] * m;
            rhs[i] -= corr;
        }
        // Back substitution.
        let mut x = vec![Complex::new(T::zero(), T::zero()); np];
        x[np - 1] = rhs[np - 1] / diag[np - 1];
        for i in (0..np - 1).rev() {
            x[i] = (rhs[i] - x[i + 1] * self.lap_upper[i]) / diag[i];
        }
        Ok(x)
    }

    /// Discrete ∫|∇u|² via the flux form (includes the Dirichlet boundary face).
    pub fn h1_seminorm_sq(&self, u: &[Complex<T>]) -> T {
        let np = self.n_points;
        let mut s = T::zero();
        for i in 0..np {
            let diff = if i + 1 < np { u[i + 1] - u[i] } else { -u[np - 1] };
            s = s + self.face_flux[i] * diff.norm_sqr();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_field(vals: &[f64]) -> Vec<Complex<f64>> {
        vals.iter().map(|&v| Complex::new(v, 0.0)).collect()
    }

    #[test]
    fn sphere_areas_match_closed_forms() {
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-13);
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
        let s4 = 8.0 * std::f64::consts::PI.powi(2) / 3.0;
        assert!((unit_sphere_area(5) - s4).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(make_radial_grid::<f64>(0, 64, 1.0).is_err());
        assert!(make_radial_grid::<f64>(5, 5000, 1.0).is_err());
        assert!(make_radial_grid::<f64>(5, 64, -1.0).is_err());
    }

    #[test]
    fn last_node_is_r_max() {
        let g = make_radial_grid::<f64>(3, 128, 17.0).unwrap();
        let last = *g.nodes().last().unwrap();
        assert!((last - 17.0).abs() < 1e-12);
    }

    #[test]
    fn biharmonic_self_adjoint_under_weights() {
        let g = make_radial_grid::<f64>(1, 256, 20.0).unwrap();
        let u = real_field(&(0..256).map(|i| (i * 37 % 101) as f64 / 101.0 - 0.5).collect::<Vec<_>>());
        let v = real_field(&(0..256).map(|i| (i * 59 % 71) as f64 / 71.0 - 0.5).collect::<Vec<_>>());
        let bu = g.apply_biharmonic(&u).unwrap();
        let bv = g.apply_biharmonic(&v).unwrap();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut scale = 0.0;
        for i in 0..256 {
            lhs += g.weights()[i] * bu[i].re * v[i].re;
            rhs += g.weights()[i] * u[i].re * bv[i].re;
            scale += g.weights()[i] * (bu[i].re * v[i].re).abs();
        }
        assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-300), "defect {}", (lhs - rhs).abs());
    }

    #[test]
    fn spectrum_nonnegative_n5() {
        let g = make_radial_grid::<f64>(5, 512, 30.0).unwrap();
        let largest = g.biharmonic_eigenvalues().iter().cloned().fold(0.0, f64::max);
        let smallest = g.biharmonic_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(smallest >= -1e-8 * largest, "smallest {smallest}, largest {largest}");
    }

    #[test]
    fn eigenbasis_reconstructs_biharmonic_action() {
        let g = make_radial_grid::<f64>(3, 200, 12.0).unwrap();
        let u: Vec<Complex<f64>> = (0..200)
            .map(|i| Complex::new((i * 13 % 37) as f64 / 37.0 - 0.5, (i * 7 % 23) as f64 / 23.0 - 0.5))
            .collect();
        let direct = g.apply_biharmonic(&u).unwrap();
        let mut coeffs = g.analyze(&u).unwrap();
        for (c, mu) in coeffs.iter_mut().zip(g.biharmonic_eigenvalues()) {
            *c *= *mu;
        }
        let via_eig = g.synthesize(&coeffs).unwrap();
        let mut err = 0.0;
        let mut scale = 0.0;
        for (a, b) in direct.iter().zip(via_eig.iter()) {
            err += (a - b).norm_sqr() * 1.0;
            scale += a.norm_sqr();
        }
        assert!(err.sqrt() <= 1e-8 * scale.sqrt(), "rel err {}", err.sqrt() / scale.sqrt());
    }

    #[test]
    fn eigenbasis_orthonormal_under_weights() {
        let g = make_radial_grid::<f64>(5, 128, 10.0).unwrap();
        let np = g.len();
        let mut max_dev = 0.0f64;
        for a in 0..np {
            for b in a..np {
                let mut dot = 0.0;
                for i in 0..np {
                    dot += g.weights()[i] * g.eigenvectors[a * np + i] * g.eigenvectors[b * np + i];
                }
                let want = if a == b { 1.0 } else { 0.0 };
                max_dev = max_dev.max((dot - want).abs());
            }
        }
        assert!(max_dev <= 1e-8, "gram deviation {max_dev}");
    }

    #[test]
    fn biharmonic_matches_gaussian_closed_form() {
        // Δ²e^{−r²} = (16r⁴ − (32+16n)r² + 4n² + 8n)e^{−r²}.
        for &n in &[1usize, 5] {
            let np = 1024;
            let g = make_radial_grid::<f64>(n, np, 15.0).unwrap();
            let u: Vec<Complex<f64>> =
                g.nodes().iter().map(|&r| Complex::new((-r * r).exp(), 0.0)).collect();
            let bu = g.apply_biharmonic(&u).unwrap();
            let nn = n as f64;
            let mut max_err = 0.0f64;
            let mut max_mag = 0.0f64;
            for (i, &r) in g.nodes().iter().enumerate() {
                let want = (16.0 * r.powi(4) - (32.0 + 16.0 * nn) * r * r + 4.0 * nn * nn + 8.0 * nn)
                    * (-r * r).exp();
                max_mag = max_mag.max(want.abs());
                // Interior nodes: away from the axis cells (where the
                // pointwise value of the cell-averaged operator is only
                // first-order; their quadrature weight is O(Δrⁿ)) and from
                // the far-field region where the target underflows.
                if i >= 2 && r <= 2.5 {
                    max_err = max_err.max((bu[i].re - want).abs());
                }
            }
            let rel = max_err / max_mag;
            assert!(rel <= 1e-3, "n={n}: interior relative error {rel}");
        }
    }

    #[test]
    fn thomas_solve_inverts_biharmonic_plus_one() {
        let g = make_radial_grid::<f64>(5, 512, 25.0).unwrap();
        let b: Vec<Complex<f64>> = g
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &r)| Complex::new((-0.3 * r * r).exp(), ((i * 29 % 17) as f64 / 17.0 - 0.5) * (-r).exp()))
            .collect();
        let x = g.solve_biharmonic_plus_one(&b).unwrap();
        let bx = g.apply_biharmonic(&x).unwrap();
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..g.len() {
            let resid = bx[i] + x[i] - b[i];
            err += g.weights()[i] * resid.norm_sqr();
            scale += g.weights()[i] * b[i].norm_sqr();
        }
        // The attainable residual scales with ε times the spectral radius.
        assert!(err.sqrt() <= 1e-9 * scale.sqrt(), "solve residual {:e}", err.sqrt() / scale.sqrt());
    }

    #[test]
    fn h1_form_matches_quadratic_pairing() {
        let g = make_radial_grid::<f64>(2, 300, 9.0).unwrap();
        let u: Vec<Complex<f64>> =
            g.nodes().iter().map(|&r| Complex::new((-0.5 * r * r).exp(), 0.3 * (-r).exp())).collect();
        let lu = g.apply_laplacian(&u).unwrap();
        let mut pairing = 0.0;
        for i in 0..g.len() {
            // ⟨−Δu, u⟩_w, real part.
            pairing += g.weights()[i] * (-(lu[i].re * u[i].re + lu[i].im * u[i].im));
        }
        let h1 = g.h1_seminorm_sq(&u);
        assert!((pairing - h1).abs() <= 1e-10 * h1.abs());
    }
}
