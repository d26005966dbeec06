//! Scenario presets: named, reproducible desk-scale experiments with
//! calibrated grids and fit windows.

use crate::config::SimulationConfig;
use crate::RunnerError;

/// What the runner does with a config beyond a plain evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Evolution,
    LinearDecay,
    BandDecay,
    RefinedStrichartz,
    DefocusingScatter,
    FocusingSubthreshold,
    FocusingBlowup,
    StandingWave,
    SymmetryAudit,
    VirialAudit,
    GroundstateTable,
}

pub const PRESET_NAMES: [&str; 10] = [
    "linear_decay",
    "band_decay",
    "refined_strichartz",
    "defocusing_scatter",
    "focusing_subthreshold",
    "focusing_blowup_probe",
    "standing_wave",
    "symmetry_audit",
    "virial_audit",
    "groundstate_table",
];

pub fn list_presets() -> Vec<&'static str> {
    PRESET_NAMES.to_vec()
}

fn cfg(text: &str) -> SimulationConfig {
    SimulationConfig::from_toml_str(text).expect("preset config validates")
}

pub fn build_preset(name: &str) -> Result<(SimulationConfig, ScenarioKind), RunnerError> {
    let out = |dir: &str| format!("[output]\ndirectory = \"runs/{dir}\"\n");
    match name {
        // Free-flow sup-norm decay, slope −n/4. Initial data is a Gaussian
        // smoothly band-limited at ψ-level 1 (max group speed 32), so the
        // fit window sits inside the exact wraparound time L/32.
        "linear_decay" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = 0

                [geometry]
                kind = "full"
                points = 2048
                extent = 120.0

                [initial]
                kind = "gaussian"
                width = 0.55
                lowpass = 1.0

                [time]
                t_end = 3.5
                dt_max = 1e-2
                store_fields = false

                [probes]
                decay_window = [0.8, 3.5]

                {}"#,
                out("linear_decay")
            )),
            ScenarioKind::LinearDecay,
        )),
        // Band-limited decay, slope −n/2, plus the N^{−n} prefactor audit.
        "band_decay" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = 0

                [geometry]
                kind = "full"
                points = 4096
                extent = 120.0

                [initial]
                kind = "gaussian"
                width = 0.234

                [time]
                t_end = 0.04
                dt_max = 1e-3
                store_fields = false

                [probes]
                band_levels = [8.0, 16.0]

                {}"#,
                out("band_decay")
            )),
            ScenarioKind::BandDecay,
        )),
        "refined_strichartz" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = 0

                [geometry]
                kind = "full"
                points = 512
                extent = 30.0

                [initial]
                kind = "gaussian"

                [time]
                t_end = 0.5
                dt_max = 1e-2
                store_fields = false

                {}"#,
                out("refined_strichartz")
            )),
            ScenarioKind::RefinedStrichartz,
        )),
        "defocusing_scatter" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = 1

                [geometry]
                kind = "full"
                points = 1024
                extent = 40.0

                [initial]
                kind = "gaussian"
                width = 1.0
                mass = 0.01

                [time]
                t_end = 0.08
                dt_max = 2.5e-4
                snapshot_every = 10

                [probes]
                scattering_epsilon = 1e-3

                {}"#,
                out("defocusing_scatter")
            )),
            ScenarioKind::DefocusingScatter,
        )),
        "focusing_subthreshold" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = -1

                [geometry]
                kind = "full"
                points = 1024
                extent = 25.0

                [initial]
                kind = "ground_state_scaled"
                mass_ratio = 0.9

                [time]
                t_end = 20.0
                dt_max = 2e-3
                adaptive = true
                c_phase = 0.05
                c_curv = 0.25
                snapshot_every = 200
                store_fields = false
                sup_threshold_factor = 8.0

                {}"#,
                out("focusing_subthreshold")
            )),
            ScenarioKind::FocusingSubthreshold,
        )),
        "focusing_blowup_probe" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = -1

                [geometry]
                kind = "full"
                points = 2048
                extent = 25.0

                [initial]
                kind = "ground_state_scaled"
                mass_ratio = 1.44

                [time]
                t_end = 3.0
                dt_max = 1e-3
                dt_min = 1e-8
                adaptive = true
                c_phase = 0.02
                c_curv = 0.1
                snapshot_every = 10
                store_fields = false
                sup_threshold_factor = 3.0

                {}"#,
                out("focusing_blowup_probe")
            )),
            ScenarioKind::FocusingBlowup,
        )),
        "standing_wave" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = -1

                [geometry]
                kind = "full"
                points = 1024
                extent = 25.0

                [initial]
                kind = "ground_state_scaled"
                mass_ratio = 1.0

                [time]
                t_end = 1.0
                dt_max = 1e-3
                snapshot_every = 50
                order = "suzuki6"

                [probes]
                scattering_epsilon = 1e-3

                {}"#,
                out("standing_wave")
            )),
            ScenarioKind::StandingWave,
        )),
        "symmetry_audit" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = -1

                [geometry]
                kind = "full"
                points = 1024
                extent = 32.0

                [initial]
                kind = "gaussian"
                amplitude = 0.3
                width = 2.0

                [time]
                t_end = 0.05
                dt_max = 1e-4
                snapshot_every = 25

                {}"#,
                out("symmetry_audit")
            )),
            ScenarioKind::SymmetryAudit,
        )),
        "virial_audit" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = 1

                [geometry]
                kind = "full"
                points = 1024
                extent = 60.0

                [initial]
                kind = "boosted_gaussian"
                width = 1.5
                boost = 1.0

                [time]
                t_end = 0.2
                dt_max = 5e-4
                snapshot_every = 5

                [probes]
                virial_radius = 15.0
                moment_radius = 15.0

                {}"#,
                out("virial_audit")
            )),
            ScenarioKind::VirialAudit,
        )),
        "groundstate_table" => Ok((
            cfg(&format!(
                r#"
                [equation]
                n = 1
                lambda = -1

                [geometry]
                kind = "full"
                points = 1024
                extent = 25.0

                [initial]
                kind = "ground_state_scaled"
                mass_ratio = 1.0

                [time]
                t_end = 0.01
                dt_max = 1e-3
                store_fields = false

                {}"#,
                out("groundstate_table")
            )),
            ScenarioKind::GroundstateTable,
        )),
        other => Err(RunnerError::Config(format!(
            "unknown preset `{other}`; available: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// Calibrated decay-probe config for the n = 2 variant of `linear_decay`.
pub fn linear_decay_n2() -> SimulationConfig {
    let (mut base, _) = build_preset("linear_decay").expect("preset exists");
    base = base.with_override("equation.n=2").expect("valid");
    base = base.with_override("geometry.points=512").expect("valid");
    base = base.with_override("geometry.extent=80.0").expect("valid");
    base = base.with_override("initial.width=0.8").expect("valid");
    base.with_override("time.t_end=3.5").expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_ten_presets_and_all_validate() {
        let names = list_presets();
        assert_eq!(names.len(), 10);
        for name in names {
            let (cfg, _) = build_preset(name).unwrap();
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(build_preset("does_not_exist").is_err());
    }

    #[test]
    fn n2_decay_variant_validates() {
        let cfg = linear_decay_n2();
        assert_eq!(cfg.equation.n, 2);
        cfg.validate().unwrap();
    }
}
