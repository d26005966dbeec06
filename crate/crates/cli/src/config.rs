//! Run configuration: a flat key-value TOML file with sections, validated
//! with precise `section.key` error locations.

use serde::{Deserialize, Serialize};

use crate::RunnerError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub equation: EquationSection,
    pub geometry: GeometrySection,
    pub initial: InitialSection,
    pub time: TimeSection,
    #[serde(default)]
    pub probes: ProbesSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EquationSection {
    pub n: usize,
    /// +1 defocusing, −1 focusing, 0 linear-probe mode.
    pub lambda: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// "full" or "radial".
    pub kind: String,
    /// Points per axis (full) or radial node count.
    pub points: usize,
    /// Box half-width L (full) or r_max (radial).
    pub extent: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// gaussian | boosted_gaussian | pure_mode | ground_state_scaled | from_checkpoint
    pub kind: String,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub width: f64,
    /// Absolute mass target (rescales the amplitude when set).
    #[serde(default)]
    pub mass: Option<f64>,
    /// Mass target as a multiple of the computed M(Q) (ground_state_scaled).
    #[serde(default)]
    pub mass_ratio: Option<f64>,
    /// Frequency shift X for boosted_gaussian.
    #[serde(default)]
    pub boost: f64,
    /// Integer mode numbers for pure_mode.
    #[serde(default)]
    pub mode: Vec<i64>,
    /// Checkpoint path for from_checkpoint.
    #[serde(default)]
    pub checkpoint: Option<String>,
    /// Optional smooth spectral cutoff (ψ low-pass at this level).
    #[serde(default)]
    pub lowpass: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: f64,
    pub dt_max: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    #[serde(default = "default_c_phase")]
    pub c_phase: f64,
    #[serde(default = "default_c_curv")]
    pub c_curv: f64,
    #[serde(default)]
    pub adaptive: bool,
    #[serde(default = "yes")]
    pub dealias: bool,
    /// strang | suzuki4 | suzuki6
    #[serde(default = "default_order")]
    pub order: String,
    /// Blow-up trigger at this multiple of the initial sup norm; 0 disables.
    #[serde(default)]
    pub sup_threshold_factor: f64,
    #[serde(default = "yes")]
    pub store_fields: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProbesSection {
    #[serde(default)]
    pub virial_radius: Option<f64>,
    #[serde(default)]
    pub moment_radius: Option<f64>,
    #[serde(default)]
    pub direction_axis: usize,
    #[serde(default)]
    pub scattering_epsilon: Option<f64>,
    /// (t_min, t_max) for decay fits.
    #[serde(default)]
    pub decay_window: Option<(f64, f64)>,
    #[serde(default)]
    pub band_levels: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: String,
    /// Any of "json", "csv", "checkpoint".
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_dt_min() -> f64 {
    1e-9
}
fn default_snapshot_every() -> usize {
    10
}
fn default_c_phase() -> f64 {
    0.1
}
fn default_c_curv() -> f64 {
    0.5
}
fn default_order() -> String {
    "strang".into()
}
fn default_formats() -> Vec<String> {
    vec!["json".into(), "csv".into()]
}
fn default_seed() -> u64 {
    7
}

impl SimulationConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, RunnerError> {
        let cfg: SimulationConfig =
            toml::from_str(text).map_err(|e| RunnerError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        let fail = |loc: &str, msg: String| Err(RunnerError::Validation { location: loc.into(), message: msg });

        if self.equation.n < 1 {
            return fail("equation.n", "dimension must be >= 1".into());
        }
        if ![-1.0, 0.0, 1.0].contains(&self.equation.lambda) {
            return fail("equation.lambda", format!("must be one of -1, 0, +1, got {}", self.equation.lambda));
        }
        match self.geometry.kind.as_str() {
            "full" => {
                if self.equation.n > 3 {
                    return fail("geometry.kind", format!("full grids support n <= 3, got n = {}", self.equation.n));
                }
                if !self.geometry.points.is_power_of_two() || self.geometry.points < 16 {
                    return fail("geometry.points", format!("must be a power of two >= 16, got {}", self.geometry.points));
                }
            }
            "radial" => {
                if self.geometry.points < 8 || self.geometry.points > bnls_core::radial::MAX_RADIAL_POINTS {
                    return fail(
                        "geometry.points",
                        format!("radial nodes must lie in 8..={}, got {}", bnls_core::radial::MAX_RADIAL_POINTS, self.geometry.points),
                    );
                }
            }
            other => return fail("geometry.kind", format!("unknown geometry kind `{other}` (full|radial)")),
        }
        if self.geometry.extent <= 0.0 || !self.geometry.extent.is_finite() {
            return fail("geometry.extent", "must be positive and finite".into());
        }
        match self.initial.kind.as_str() {
            "gaussian" | "boosted_gaussian" | "pure_mode" | "ground_state_scaled" | "from_checkpoint" => {}
            other => return fail("initial.kind", format!("unknown initial kind `{other}`")),
        }
        if self.initial.kind == "from_checkpoint" && self.initial.checkpoint.is_none() {
            return fail("initial.checkpoint", "required for kind = from_checkpoint".into());
        }
        if self.initial.kind == "ground_state_scaled" && self.initial.mass_ratio.is_none() {
            return fail("initial.mass_ratio", "required for kind = ground_state_scaled".into());
        }
        if self.initial.kind == "pure_mode" && self.geometry.kind != "full" {
            return fail("initial.kind", "pure_mode needs a full grid".into());
        }
        if self.time.t_end <= 0.0 || self.time.dt_max <= 0.0 || self.time.dt_min <= 0.0 {
            return fail("time", "t_end, dt_max, dt_min must be positive".into());
        }
        if self.time.dt_min > self.time.dt_max {
            return fail("time.dt_min", "must not exceed dt_max".into());
        }
        if self.time.snapshot_every == 0 {
            return fail("time.snapshot_every", "must be >= 1".into());
        }
        if !["strang", "suzuki4", "suzuki6"].contains(&self.time.order.as_str()) {
            return fail("time.order", format!("unknown order `{}` (strang|suzuki4|suzuki6)", self.time.order));
        }
        if self.probes.direction_axis >= self.equation.n {
            return fail("probes.direction_axis", format!("axis {} out of range for n = {}", self.probes.direction_axis, self.equation.n));
        }
        for f in &self.output.formats {
            if !["json", "csv", "checkpoint"].contains(&f.as_str()) {
                return fail("output.formats", format!("unknown format `{f}`"));
            }
        }
        Ok(())
    }

    /// Apply a `section.key=value` override onto the serialized form.
    pub fn with_override(&self, assignment: &str) -> Result<Self, RunnerError> {
        let (path, value) = assignment.split_once('=').ok_or_else(|| RunnerError::Config(
            format!("override `{assignment}` is not of the form section.key=value"),
        ))?;
        let mut doc: toml::Value =
            toml::from_str(&self.to_toml_string()).expect("round trip of a valid config");
        let mut cursor = &mut doc;
        let parts: Vec<&str> = path.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            if i + 1 == parts.len() {
                let table = cursor.as_table_mut().ok_or_else(|| {
                    RunnerError::Config(format!("override path `{path}` does not address a table"))
                })?;
                table.insert(part.to_string(), parse_value_literal(value));
            } else {
                cursor = cursor
                    .as_table_mut()
                    .and_then(|t| t.get_mut(*part))
                    .ok_or_else(|| RunnerError::Config(format!("unknown override section `{part}`")))?;
            }
        }
        let text = toml::to_string(&doc).map_err(|e| RunnerError::Config(e.to_string()))?;
        Self::from_toml_str(&text)
    }
}

/// Parse an override literal as a TOML value (number, bool, array, quoted
/// string); bare words fall back to strings.
fn parse_value_literal(s: &str) -> toml::Value {
    if let Ok(toml::Value::Table(t)) = toml::from_str::<toml::Value>(&format!("v = {s}")) {
        if let Some(v) = t.get("v") {
            return v.clone();
        }
    }
    toml::Value::String(s.to_string())
}
