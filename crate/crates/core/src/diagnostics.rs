//! Trajectory-level probes: the Z-norm ledger, the frequency-scale proxy and
//! blow-up rate fitter, the truncated virial action and local mass moment
//! with their transport identities, and the scattering detector.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::evolution::TrajectoryRecord;
use crate::field::{ComplexField, Geometry};
use crate::fit::{fit_power_law_blowup, PowerLawFit};
use crate::lp::psi_bump;
use crate::propagator::propagate_linear;
use crate::scalar::{real, Scalar};

/// Frequency-scale proxy N_est = (‖Δu‖₂/‖u‖₂)^{1/2}; exact on pure modes and
/// covariant under the rescaling symmetry.
pub fn scale_estimate<T: Scalar>(field: &ComplexField<T>) -> Result<T> {
    let l2 = field.lp_norm(real::<T>(2.0))?;
    if l2 == T::zero() {
        return Err(Error::ZeroField);
    }
    let h2 = field.sobolev_seminorm(real::<T>(2.0))?;
    Ok((h2 / l2).sqrt())
}

/// N_est series extracted from a finished run.
#[derive(Clone, Debug)]
pub struct ScaleTrack<T> {
    pub times: Vec<T>,
    pub n_est: Vec<T>,
    pub fitted_blowup: Option<PowerLawFit<T>>,
}

pub fn scale_track<T: Scalar>(record: &TrajectoryRecord<T>) -> ScaleTrack<T> {
    let mut times = Vec::new();
    let mut n_est = Vec::new();
    for row in &record.diagnostics {
        if row.n_est > T::zero() && row.n_est.is_finite() {
            times.push(row.t);
            n_est.push(row.n_est);
        }
    }
    ScaleTrack { times, n_est, fitted_blowup: None }
}

/// Declare a blow-up rate fit N_est ~ (T*−t)^{−β} only when it is earned:
/// the samples must grow (factor ≥ 2), the fit must explain them (R² ≥ 0.98),
/// (T*−t) must span at least one decade, and β must be a physical rate
/// (β ∈ (0.02, 2]); a bounded T* search makes exponential series fail the
/// decade gate instead of masquerading as distant-T* power laws.
///
/// Collapse runs sit on a flat transient before the scale starts moving, so
/// the fit uses the growth suffix: samples after the last time N_est was
/// within 25% of its running minimum.
pub fn fit_blowup_rate<T: Scalar>(track: &ScaleTrack<T>) -> Option<PowerLawFit<T>> {
    let n = track.n_est.len();
    if n < 8 {
        return None;
    }
    let n_min = track.n_est.iter().cloned().fold(T::infinity(), T::min);
    let max = track.n_est.iter().cloned().fold(T::zero(), T::max);
    if max < real::<T>(2.0) * n_min {
        return None;
    }
    let start = track
        .n_est
        .iter()
        .rposition(|&v| v <= n_min * real::<T>(1.25))
        .unwrap_or(0);
    let times = &track.times[start..];
    let values = &track.n_est[start..];
    if times.len() < 8 {
        return None;
    }
    let fit = fit_power_law_blowup(times, values)?;
    let beta_ok = fit.exponent > real::<T>(0.02) && fit.exponent <= real::<T>(2.0);
    if fit.r_squared >= real::<T>(0.98) && fit.decades >= T::one() && beta_ok {
        Some(fit)
    } else {
        None
    }
}

/// Truncated first-moment probe: cutoff radius R, direction axis, fixed
/// center. The cutoff a is the same C^∞ bump family as the LP cutoff
/// (a = 1 on |s| ≤ 1, a = 0 on |s| ≥ 2, a′ ≤ 0 for s ≥ 0).
#[derive(Clone, Debug)]
pub struct VirialProbe<T> {
    pub radius: T,
    pub axis: usize,
    pub center: Vec<T>,
}

impl<T: Scalar> VirialProbe<T> {
    pub fn new(radius: T, axis: usize) -> Self {
        Self { radius, axis, center: Vec::new() }
    }

    fn center_along(&self, axis: usize) -> T {
        self.center.get(axis).copied().unwrap_or(T::zero())
    }

    /// Fraction of mass outside |z_axis| ≤ R (the validity requirement).
    pub fn uncovered_mass_fraction(&self, field: &ComplexField<T>) -> Result<T> {
        let g = field.geometry().full()?;
        let total = field.l2_norm_sq();
        if total == T::zero() {
            return Ok(T::zero());
        }
        let c = self.center_along(self.axis);
        let mut outside = T::zero();
        for (flat, v) in field.values().iter().enumerate() {
            if (g.coord(flat, self.axis) - c).abs() > self.radius {
                outside = outside + v.norm_sqr() * g.cell_volume();
            }
        }
        Ok(outside / total)
    }
}

/// Spectral partial derivative along one axis.
fn partial_derivative<T: Scalar>(field: &ComplexField<T>, axis: usize) -> Result<ComplexField<T>> {
    let g = field.geometry().full()?;
    let mut spec = g.forward(field.values())?;
    let ax = g.wavenumber_axis();
    for (flat, v) in spec.iter_mut().enumerate() {
        let xi = ax[g.axis_index(flat, axis)];
        *v *= Complex::new(T::zero(), xi);
    }
    let vals = g.inverse(&spec)?;
    ComplexField::new(Geometry::Full(g.clone()), vals)
}

/// Orthogonal virial action A_R = 2 Im ∫ a(z₁/R) z₁ (∂₁u) ū dx, z = x − center.
pub fn virial_action<T: Scalar>(field: &ComplexField<T>, probe: &VirialProbe<T>) -> Result<T> {
    let g = field.geometry().full().map_err(|_| Error::UnsupportedGeometry {
        op: "virial_action",
        geometry: "radial",
    })?;
    let du = partial_derivative(field, probe.axis)?;
    let c = probe.center_along(probe.axis);
    let mut acc = T::zero();
    for (flat, (d, u)) in du.values().iter().zip(field.values()).enumerate() {
        let z1 = g.coord(flat, probe.axis) - c;
        let w = psi_bump((z1 / probe.radius).abs());
        if w == T::zero() {
            continue;
        }
        // Im((∂₁u)·ū)
        let im = d.im * u.re - d.re * u.im;
        acc = acc + w * z1 * im;
    }
    Ok(real::<T>(2.0) * acc * g.cell_volume())
}

/// Fixed-frame virial production rate
/// −16 ∫ (½|∂₁∇u|² + λ/(2(n+4)) |u|^{2(n+4)/n}) dx, computed spectrally.
pub fn virial_rhs<T: Scalar>(field: &ComplexField<T>, lambda: T, axis: usize) -> Result<T> {
    let g = field.geometry().full()?;
    let n = g.dim();
    let spec = g.forward(field.values())?;
    let ax = g.wavenumber_axis();
    let mut cross = T::zero();
    for (flat, v) in spec.iter().enumerate() {
        let w = v.norm_sqr();
        if w == T::zero() {
            continue;
        }
        let xi1 = ax[g.axis_index(flat, axis)];
        cross = cross + xi1 * xi1 * g.xi2()[flat] * w;
    }
    cross = cross * g.freq_measure();
    let q = real::<T>(2.0 * (n as f64 + 4.0) / n as f64);
    let pot = field.lp_power_integral(q);
    let nf = real::<T>(n as f64);
    Ok(real::<T>(-16.0)
        * (cross / real::<T>(2.0) + lambda / (real::<T>(2.0) * (nf + real::<T>(4.0))) * pot))
}

/// Local moment of mass M_R = ∫ a(z₁/R) z₁ |u|² dx.
pub fn mass_moment<T: Scalar>(field: &ComplexField<T>, probe: &VirialProbe<T>) -> Result<T> {
    let g = field.geometry().full().map_err(|_| Error::UnsupportedGeometry {
        op: "mass_moment",
        geometry: "radial",
    })?;
    let c = probe.center_along(probe.axis);
    let mut acc = T::zero();
    for (flat, u) in field.values().iter().enumerate() {
        let z1 = g.coord(flat, probe.axis) - c;
        let w = psi_bump((z1 / probe.radius).abs());
        if w == T::zero() {
            continue;
        }
        acc = acc + w * z1 * u.norm_sqr();
    }
    Ok(acc * g.cell_volume())
}

/// Fixed-frame mass-moment transport rate −4 Im ∫ ∂₁ū Δu dx
/// = −4 Σ ξ₁|ξ|²|û|²Δξⁿ.
pub fn mass_moment_rhs<T: Scalar>(field: &ComplexField<T>, axis: usize) -> Result<T> {
    let g = field.geometry().full()?;
    let spec = g.forward(field.values())?;
    let ax = g.wavenumber_axis();
    let mut acc = T::zero();
    for (flat, v) in spec.iter().enumerate() {
        let w = v.norm_sqr();
        if w == T::zero() {
            continue;
        }
        acc = acc + ax[g.axis_index(flat, axis)] * g.xi2()[flat] * w;
    }
    Ok(real::<T>(-4.0) * acc * g.freq_measure())
}

/// Outcome of a centered-difference identity audit along a run.
#[derive(Clone, Debug)]
pub struct RateCheck<T> {
    pub max_defect: T,
    pub samples: usize,
    /// Set when mass escaped the cutoff region (result R-invalid).
    pub r_invalid: bool,
}

fn rate_check_over_record<T: Scalar>(
    record: &TrajectoryRecord<T>,
    probe: &VirialProbe<T>,
    series: impl Fn(&ComplexField<T>) -> Result<T>,
    rhs: impl Fn(&ComplexField<T>) -> Result<T>,
) -> Result<RateCheck<T>> {
    let snaps = &record.snapshots;
    if snaps.len() < 3 {
        return Err(Error::InsufficientSamples("rate check needs >= 3 stored snapshots".into()));
    }
    let mut r_invalid = false;
    let mut values = Vec::with_capacity(snaps.len());
    let mut times = Vec::with_capacity(snaps.len());
    for s in snaps {
        values.push(series(s)?);
        times.push(s.time_tag().ok_or_else(|| Error::InvalidArgument("snapshot missing time tag".into()))?);
        if probe.uncovered_mass_fraction(s)? > real::<T>(1e-3) {
            r_invalid = true;
        }
    }
    let mut max_defect = T::zero();
    let mut samples = 0usize;
    for m in 1..snaps.len() - 1 {
        let fd = (values[m + 1] - values[m - 1]) / (times[m + 1] - times[m - 1]);
        let want = rhs(&snaps[m])?;
        if want.abs() > T::zero() {
            max_defect = max_defect.max((fd - want).abs() / want.abs());
            samples += 1;
        }
    }
    if samples == 0 {
        return Err(Error::InsufficientSamples("no interior samples with nonzero rate".into()));
    }
    Ok(RateCheck { max_defect, samples, r_invalid })
}

/// Audit d/dt A_R = −16∫(½|∂₁∇u|² + λ/(2(n+4))|u|^q) against the recorded run.
pub fn virial_rate_check<T: Scalar>(
    record: &TrajectoryRecord<T>,
    probe: &VirialProbe<T>,
) -> Result<RateCheck<T>> {
    let lambda = record.params.lambda;
    rate_check_over_record(
        record,
        probe,
        |s| virial_action(s, probe),
        |s| virial_rhs(s, lambda, probe.axis),
    )
}

/// Audit ∂ₜM_R = −4 Im ∫ ∂₁ū Δu dx against the recorded run.
pub fn mass_moment_rate_check<T: Scalar>(
    record: &TrajectoryRecord<T>,
    probe: &VirialProbe<T>,
) -> Result<RateCheck<T>> {
    rate_check_over_record(
        record,
        probe,
        |s| mass_moment(s, probe),
        |s| mass_moment_rhs(s, probe.axis),
    )
}

/// Z-norm bookkeeping: per-window increments of ∫‖u‖_q^q dt and the total.
pub struct ZLedger<T> {
    pub window_times: Vec<(T, T)>,
    pub increments: Vec<T>,
    pub total: T,
}

pub fn z_norm_accumulate<T: Scalar>(record: &TrajectoryRecord<T>) -> Result<ZLedger<T>> {
    let rows = &record.diagnostics;
    if rows.len() < 16 {
        return Err(Error::InsufficientSamples(format!(
            "z-norm quadrature needs >= 16 rows, found {}",
            rows.len()
        )));
    }
    let mut increments = Vec::with_capacity(rows.len() - 1);
    let mut windows = Vec::with_capacity(rows.len() - 1);
    let mut total = T::zero();
    for w in rows.windows(2) {
        let inc = (w[1].t - w[0].t) * (w[0].z_integrand + w[1].z_integrand) / real::<T>(2.0);
        increments.push(inc);
        windows.push((w[0].t, w[1].t));
        total = total + inc;
    }
    Ok(ZLedger { window_times: windows, increments, total })
}

/// Scattering detector: w(t) = e^{−itΔ²}u(t) must go Cauchy in L² over the
/// last quarter of the validity window.
#[derive(Clone)]
pub struct ScatteringReport<T: Scalar> {
    pub omega_plus: ComplexField<T>,
    pub cauchy_defect: T,
    pub fired: bool,
    /// End of the window actually used (min of wraparound stamp and t_end).
    pub window_end: T,
    /// True when the wraparound stamp truncated the window.
    pub wrap_limited: bool,
}

pub fn scattering_probe<T: Scalar>(record: &TrajectoryRecord<T>, epsilon: T) -> Result<ScatteringReport<T>> {
    let snaps = &record.snapshots;
    if snaps.is_empty() {
        return Err(Error::InsufficientSamples("scattering probe needs stored snapshots".into()));
    }
    let t_last = snaps
        .last()
        .and_then(|s| s.time_tag())
        .ok_or_else(|| Error::InvalidArgument("snapshots missing time tags".into()))?;
    let (mut window_end, mut wrap_limited) = match record.wrap_window {
        Some(w) if w < t_last => (w, true),
        _ => (t_last, false),
    };
    let mut window_start = window_end * real::<T>(0.75);
    let in_window = |s: &&ComplexField<T>, lo: T, hi: T| {
        let t = s.time_tag().unwrap_or(T::nan());
        t >= lo && t <= hi
    };
    let mut late: Vec<&ComplexField<T>> =
        snaps.iter().filter(|s| in_window(s, window_start, window_end)).collect();
    if late.len() < 4 && wrap_limited {
        // The stamp can predate the first snapshot (e.g. a standing wave,
        // where nothing disperses and the stamp is vacuous). Fall back to the
        // last quarter of the run and keep the wrap caveat.
        window_end = t_last;
        window_start = t_last * real::<T>(0.75);
        wrap_limited = true;
        late = snaps.iter().filter(|s| in_window(s, window_start, window_end)).collect();
    }
    if late.len() < 4 {
        return Err(Error::InsufficientSamples(format!(
            "scattering window [{window_start}, {window_end}] holds {} snapshots (need >= 4)",
            late.len()
        )));
    }
    let mut ws = Vec::with_capacity(late.len());
    for s in &late {
        let t = s.time_tag().unwrap();
        ws.push(propagate_linear(s, -t)?);
    }
    let mut defect = T::zero();
    for i in 0..ws.len() {
        for j in i + 1..ws.len() {
            defect = defect.max(ws[i].l2_distance(&ws[j])?);
        }
    }
    Ok(ScatteringReport {
        omega_plus: ws.last().unwrap().clone(),
        cauchy_defect: defect,
        fired: defect <= epsilon,
        window_end,
        wrap_limited,
    })
}
