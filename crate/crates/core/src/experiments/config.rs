use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{DmracConfig, MracConfig, PidConfig};
use crate::disturbances::DisturbanceConfig;
use crate::dnac::DnacConfig;
use crate::error::{Error, Result};
use crate::plant::{CascadeConfig, QuadParams};
use crate::trajectories::TrajectorySpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ControllerKind {
    #[serde(rename = "pid")]
    Pid,
    #[serde(rename = "pid+mrac")]
    PidMrac,
    #[serde(rename = "pid+dmrac")]
    PidDmrac,
    #[serde(rename = "pid+dnac")]
    PidDnac,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 4] = [
        ControllerKind::Pid,
        ControllerKind::PidMrac,
        ControllerKind::PidDmrac,
        ControllerKind::PidDnac,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Pid => "pid",
            ControllerKind::PidMrac => "pid+mrac",
            ControllerKind::PidDmrac => "pid+dmrac",
            ControllerKind::PidDnac => "pid+dnac",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = Error;

    /// Accepts the scenario names and the short forms `mrac`, `dmrac`, `dnac`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pid" => Ok(ControllerKind::Pid),
            "pid+mrac" | "mrac" => Ok(ControllerKind::PidMrac),
            "pid+dmrac" | "dmrac" => Ok(ControllerKind::PidDmrac),
            "pid+dnac" | "dnac" => Ok(ControllerKind::PidDnac),
            other => Err(Error::config(format!("unknown controller '{other}'"))),
        }
    }
}

/// Optional zero-mean Gaussian noise on the attitude feedback.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorNoise {
    pub enabled: bool,
    pub attitude_std_deg: f64,
    pub rate_std_deg_s: f64,
}

impl Default for SensorNoise {
    fn default() -> Self {
        Self {
            enabled: false,
            attitude_std_deg: 0.2,
            rate_std_deg_s: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub controller: ControllerKind,
    pub trajectory: TrajectorySpec,
    #[serde(default)]
    pub disturbances: Vec<DisturbanceConfig>,
    #[serde(default)]
    pub plant: QuadParams,
    #[serde(default)]
    pub cascade: CascadeConfig,
    #[serde(default)]
    pub pid: PidConfig,
    #[serde(default)]
    pub mrac: MracConfig,
    #[serde(default)]
    pub dmrac: DmracConfig,
    #[serde(default)]
    pub dnac: DnacConfig,
    #[serde(default)]
    pub sensor_noise: SensorNoise,
    #[serde(default = "defaults::duration")]
    pub duration: f64,
    #[serde(default = "defaults::physics_dt")]
    pub physics_dt: f64,
    #[serde(default = "defaults::control_dt")]
    pub control_dt: f64,
    #[serde(default)]
    pub seed: u64,
    /// Initial interval excluded from the metrics, s.
    #[serde(default = "defaults::warmup")]
    pub warmup: f64,
    /// Moving-RMS window, s.
    #[serde(default = "defaults::rms_window")]
    pub rms_window: f64,
    /// Runs the augmentation controller but applies none of its output.
    #[serde(default)]
    pub zero_augmentation: bool,
}

mod defaults {
    pub fn duration() -> f64 {
        120.0
    }
    pub fn physics_dt() -> f64 {
        0.001
    }
    pub fn control_dt() -> f64 {
        0.004
    }
    pub fn warmup() -> f64 {
        5.0
    }
    pub fn rms_window() -> f64 {
        2.0
    }
}

impl ScenarioConfig {
    pub fn new(controller: ControllerKind, trajectory: TrajectorySpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: String::new(),
            controller,
            trajectory,
            disturbances: Vec::new(),
            plant: QuadParams::default(),
            cascade: CascadeConfig::default(),
            pid: PidConfig::default(),
            mrac: MracConfig::default(),
            dmrac: DmracConfig::default(),
            dnac: DnacConfig::default(),
            sensor_noise: SensorNoise::default(),
            duration: defaults::duration(),
            physics_dt: defaults::physics_dt(),
            control_dt: defaults::control_dt(),
            seed: 0,
            warmup: defaults::warmup(),
            rms_window: defaults::rms_window(),
            zero_augmentation: false,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Physics substeps per control step.
    pub fn substeps(&self) -> usize {
        (self.control_dt / self.physics_dt).round() as usize
    }

    pub fn control_steps(&self) -> usize {
        (self.duration / self.control_dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.physics_dt > 0.0) || !(self.control_dt > 0.0) {
            return Err(Error::config("physics_dt and control_dt must be positive"));
        }
        let ratio = self.control_dt / self.physics_dt;
        if ratio < 0.5 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::config("control_dt must be an integer multiple of physics_dt"));
        }
        if !(self.duration > self.warmup) || !(self.warmup >= 0.0) {
            return Err(Error::config("duration must exceed a non-negative warmup"));
        }
        if !(self.rms_window > 0.0) {
            return Err(Error::config("rms_window must be positive"));
        }
        if !(self.sensor_noise.attitude_std_deg >= 0.0) || !(self.sensor_noise.rate_std_deg_s >= 0.0) {
            return Err(Error::config("sensor noise standard deviations must be non-negative"));
        }
        if self.pid.dim() != 2 {
            return Err(Error::config("pid: attitude gains must have 2 axes"));
        }
        self.trajectory.validate()?;
        self.plant.validate()?;
        self.cascade.validate()?;
        self.pid.validate()?;
        for d in &self.disturbances {
            d.validate()?;
        }
        match self.controller {
            ControllerKind::Pid => Ok(()),
            ControllerKind::PidMrac => self.mrac.validate(),
            ControllerKind::PidDmrac => self.dmrac.validate(),
            ControllerKind::PidDnac => self.dnac.validate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_uses_defaults() {
        let cfg = ScenarioConfig::from_json(
            r#"{"schema_version": 1, "controller": "pid+dnac",
                "trajectory": {"kind": "circle", "radius": 1, "period": 12}}"#,
        )
        .unwrap();
        assert_eq!(cfg.controller, ControllerKind::PidDnac);
        assert_eq!(cfg.substeps(), 4);
        assert_eq!(cfg.control_steps(), 30_000);
        assert_eq!(cfg.dnac, DnacConfig::default());
    }

    #[test]
    fn sixty_seconds_is_15000_steps() {
        let mut cfg = ScenarioConfig::new(ControllerKind::Pid, TrajectorySpec::circle());
        cfg.duration = 60.0;
        assert_eq!(cfg.control_steps(), 15_000);
    }

    #[test]
    fn rejects_wrong_schema_and_unknown_fields() {
        let bad = r#"{"schema_version": 2, "controller": "pid", "trajectory": {"kind": "hover"}}"#;
        assert!(matches!(ScenarioConfig::from_json(bad), Err(Error::Config(_))));
        let typo = r#"{"schema_version": 1, "controler": "pid", "trajectory": {"kind": "hover"}}"#;
        assert!(matches!(ScenarioConfig::from_json(typo), Err(Error::Json(_))));
    }

    #[test]
    fn rejects_non_integer_rate_ratio() {
        let mut cfg = ScenarioConfig::new(ControllerKind::Pid, TrajectorySpec::circle());
        cfg.control_dt = 0.0025;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn controller_names_roundtrip() {
        for k in ControllerKind::ALL {
            assert_eq!(k.name().parse::<ControllerKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
        assert_eq!("dnac".parse::<ControllerKind>().unwrap(), ControllerKind::PidDnac);
        assert!("lqr".parse::<ControllerKind>().is_err());
    }

    #[test]
    fn config_roundtrip() {
        let cfg = ScenarioConfig::new(ControllerKind::PidDmrac, TrajectorySpec::rose());
        let back = ScenarioConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
