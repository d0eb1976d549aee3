//! Scenario files: TOML configuration of convergence and spinodal runs.
//!
//! Every key is optional; missing keys take the values of the chosen
//! `preset` (`"convergence"` or `"spinodal"`). Unknown keys are rejected.
//!
//! ```toml
//! preset = "convergence"
//! domain_radius = 1.0
//! final_time = 1.0
//! bdf_order = 3
//! tau_list = [0.05, 0.025]
//! mesh_levels = [1, 2, 3]
//! theta_correction = false
//! exact_solution = "xy"
//!
//! [mesh]
//! base_h = 0.5          # or: target_nodes = 640
//!
//! [potential]
//! bulk = { name = "double_well", scale = 0.25 }
//! surface = { name = "double_well", scale = 0.25 }
//!
//! [initial_data]
//! kind = "ritz_exact"   # interpolated_exact | random_pm1 | constant
//! seed = 7                      # random_pm1 only
//! value = 1.0                   # constant only
//!
//! [output]
//! dir = "out"
//! cadence = 1
//! snapshot_times = [0.0, 0.5, 1.0]
//! checkpoint = false
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{Potential, PotentialKind, PotentialPair};

/// The convergence study's step sizes.
pub const CONVERGENCE_TAUS: [f64; 6] = [0.05, 0.025, 0.0125, 0.005, 0.0025, 0.00125];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bdf_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh_levels: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_correction: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_solution: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_data: Option<InitialDataSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialEntry {
    pub name: String,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bulk: Option<PotentialEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<PotentialEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSection {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cadence: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshSpec {
    /// Structured disk mesh with at most this width, before refinement.
    BaseWidth(f64),
    /// Structured disk mesh with the node count closest to this one.
    TargetNodes(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactKind {
    /// `u = w = e^{−t} x₁x₂` on the unit disk.
    Xy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    InterpolatedExact,
    RitzExact,
    /// Each node independently `±1` from a seeded ChaCha8 stream.
    RandomPm1 {
        seed: u64,
    },
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Diagnostics are recorded every `cadence` steps (and at the final step).
    pub cadence: usize,
    pub snapshot_times: Vec<f64>,
    pub checkpoint: bool,
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub domain_radius: f64,
    pub mesh: MeshSpec,
    pub mesh_levels: Vec<usize>,
    pub tau_list: Vec<f64>,
    pub bdf_order: usize,
    pub potential: PotentialPair,
    pub final_time: f64,
    pub initial_data: InitialData,
    pub theta_correction: bool,
    pub exact_solution: Option<ExactKind>,
    pub output: OutputSpec,
}

fn cfg_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

fn potential_entry(p: &Potential) -> PotentialEntry {
    let (name, scale) = match p.kind {
        PotentialKind::DoubleWell { scale } => ("double_well", scale),
        PotentialKind::Quadratic { scale } => ("quadratic", scale),
        PotentialKind::Zero => ("zero", 1.0),
    };
    PotentialEntry { name: name.into(), scale }
}

impl Scenario {
    /// Manufactured-solution convergence study on the unit disk: BDF3,
    /// `T = 1`, `W = ¼(u²−1)²` in bulk and on the boundary, Ritz-map initial
    /// data, no θ-correction. With interpolated initial data the elliptic
    /// reconstruction of `w⁰` is not consistent on these meshes, so the
    /// uniform-in-time `w` errors would not converge.
    pub fn convergence_study() -> Self {
        let w = Potential::double_well(0.25).expect("positive scale");
        Scenario {
            name: "convergence".into(),
            domain_radius: 1.0,
            mesh: MeshSpec::BaseWidth(0.5),
            mesh_levels: vec![1, 2, 3, 4, 5],
            tau_list: CONVERGENCE_TAUS.to_vec(),
            bdf_order: 3,
            potential: PotentialPair::uniform(w),
            final_time: 1.0,
            initial_data: InitialData::RitzExact,
            theta_correction: false,
            exact_solution: Some(ExactKind::Xy),
            output: OutputSpec { dir: "out/convergence".into(), cadence: 1, snapshot_times: vec![], checkpoint: false },
        }
    }

    /// Spinodal decomposition on a disk of radius 10 with about 640 nodes,
    /// `W = 10(u²−1)²`, BDF2, `τ = 0.00125`, `T = 1`, random `±1` data.
    pub fn spinodal_study() -> Self {
        let w = Potential::double_well(10.0).expect("positive scale");
        Scenario {
            name: "spinodal".into(),
            domain_radius: 10.0,
            mesh: MeshSpec::TargetNodes(640),
            mesh_levels: vec![0],
            tau_list: vec![0.00125],
            bdf_order: 2,
            potential: PotentialPair::uniform(w),
            final_time: 1.0,
            initial_data: InitialData::RandomPm1 { seed: 2021 },
            theta_correction: false,
            exact_solution: None,
            output: OutputSpec {
                dir: "out/spinodal".into(),
                cadence: 1,
                snapshot_times: vec![0.0, 0.01, 0.1, 1.0],
                checkpoint: false,
            },
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "convergence" => Ok(Self::convergence_study()),
            "spinodal" => Ok(Self::spinodal_study()),
            other => Err(cfg_err("preset", format!("unknown preset `{other}` (expected convergence or spinodal)"))),
        }
    }

    /// Applies the keys present in `cfg` on top of its preset and validates.
    pub fn from_config(cfg: &ConfigFile) -> Result<Self> {
        let mut s = Self::preset(cfg.preset.as_deref().unwrap_or("convergence"))?;
        if let Some(v) = &cfg.name {
            s.name = v.clone();
        }
        if let Some(v) = cfg.domain_radius {
            s.domain_radius = v;
        }
        if let Some(v) = cfg.final_time {
            s.final_time = v;
        }
        if let Some(v) = cfg.bdf_order {
            s.bdf_order = v;
        }
        if let Some(v) = &cfg.tau_list {
            s.tau_list = v.clone();
        }
        if let Some(v) = &cfg.mesh_levels {
            s.mesh_levels = v.clone();
        }
        if let Some(v) = cfg.theta_correction {
            s.theta_correction = v;
        }
        if let Some(v) = &cfg.exact_solution {
            s.exact_solution = match v.as_str() {
                "xy" => Some(ExactKind::Xy),
                "none" => None,
                other => return Err(cfg_err("exact_solution", format!("unknown exact solution `{other}`"))),
            };
        }
        if let Some(m) = &cfg.mesh {
            s.mesh = match (m.base_h, m.target_nodes) {
                (Some(h), None) => MeshSpec::BaseWidth(h),
                (None, Some(n)) => MeshSpec::TargetNodes(n),
                (Some(_), Some(_)) => return Err(cfg_err("mesh", "give either base_h or target_nodes, not both")),
                (None, None) => s.mesh,
            };
        }
        if let Some(p) = &cfg.potential {
            if let Some(e) = &p.bulk {
                s.potential.bulk =
                    Potential::from_name(&e.name, e.scale).map_err(|e| cfg_err("potential.bulk", e.to_string()))?;
            }
            if let Some(e) = &p.surface {
                s.potential.surface =
                    Potential::from_name(&e.name, e.scale).map_err(|e| cfg_err("potential.surface", e.to_string()))?;
            }
        }
        if let Some(i) = &cfg.initial_data {
            let extra = |key: &str, present: bool| {
                if present {
                    Err(cfg_err(&format!("initial_data.{key}"), format!("not used by kind `{}`", i.kind)))
                } else {
                    Ok(())
                }
            };
            s.initial_data = match i.kind.as_str() {
                "interpolated_exact" | "ritz_exact" => {
                    extra("seed", i.seed.is_some())?;
                    extra("value", i.value.is_some())?;
                    if i.kind == "ritz_exact" {
                        InitialData::RitzExact
                    } else {
                        InitialData::InterpolatedExact
                    }
                }
                "random_pm1" => {
                    extra("value", i.value.is_some())?;
                    let seed = i.seed.ok_or_else(|| cfg_err("initial_data.seed", "random_pm1 requires a seed"))?;
                    InitialData::RandomPm1 { seed }
                }
                "constant" => {
                    extra("seed", i.seed.is_some())?;
                    let v = i.value.ok_or_else(|| cfg_err("initial_data.value", "constant requires a value"))?;
                    InitialData::Constant(v)
                }
                other => return Err(cfg_err("initial_data.kind", format!("unknown kind `{other}`"))),
            };
        }
        if let Some(o) = &cfg.output {
            if let Some(v) = &o.dir {
                s.output.dir = v.clone();
            }
            if let Some(v) = o.cadence {
                s.output.cadence = v;
            }
            if let Some(v) = &o.snapshot_times {
                s.output.snapshot_times = v.clone();
            }
            if let Some(v) = o.checkpoint {
                s.output.checkpoint = v;
            }
        }
        s.validate()?;
        Ok(s)
    }

    /// Config that reproduces this scenario exactly.
    pub fn to_config(&self) -> ConfigFile {
        let (base_h, target_nodes) = match self.mesh {
            MeshSpec::BaseWidth(h) => (Some(h), None),
            MeshSpec::TargetNodes(n) => (None, Some(n)),
        };
        let initial = match self.initial_data {
            InitialData::InterpolatedExact => {
                InitialDataSection { kind: "interpolated_exact".into(), ..Default::default() }
            }
            InitialData::RitzExact => InitialDataSection { kind: "ritz_exact".into(), ..Default::default() },
            InitialData::RandomPm1 { seed } => {
                InitialDataSection { kind: "random_pm1".into(), seed: Some(seed), value: None }
            }
            InitialData::Constant(v) => InitialDataSection { kind: "constant".into(), seed: None, value: Some(v) },
        };
        ConfigFile {
            preset: None,
            name: Some(self.name.clone()),
            domain_radius: Some(self.domain_radius),
            final_time: Some(self.final_time),
            bdf_order: Some(self.bdf_order),
            tau_list: Some(self.tau_list.clone()),
            mesh_levels: Some(self.mesh_levels.clone()),
            theta_correction: Some(self.theta_correction),
            exact_solution: Some(match self.exact_solution {
                Some(ExactKind::Xy) => "xy".into(),
                None => "none".into(),
            }),
            mesh: Some(MeshSection { base_h, target_nodes }),
            potential: Some(PotentialSection {
                bulk: Some(potential_entry(&self.potential.bulk)),
                surface: Some(potential_entry(&self.potential.surface)),
            }),
            initial_data: Some(initial),
            output: Some(OutputSection {
                dir: Some(self.output.dir.clone()),
                cadence: Some(self.output.cadence),
                snapshot_times: Some(self.output.snapshot_times.clone()),
                checkpoint: Some(self.output.checkpoint),
            }),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_config()).expect("scenario config serialises")
    }

    /// Number of steps `T/τ`, which validation guarantees is an integer.
    pub fn steps_for(&self, tau: f64) -> usize {
        (self.final_time / tau).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(cfg_err(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("domain_radius", self.domain_radius)?;
        positive("final_time", self.final_time)?;
        match self.mesh {
            MeshSpec::BaseWidth(h) => {
                positive("mesh.base_h", h)?;
                if h >= self.domain_radius {
                    return Err(cfg_err("mesh.base_h", format!("{h} must be below the radius {}", self.domain_radius)));
                }
            }
            MeshSpec::TargetNodes(n) => {
                if n < 7 {
                    return Err(cfg_err("mesh.target_nodes", format!("need at least 7 nodes, got {n}")));
                }
            }
        }
        if self.mesh_levels.is_empty() {
            return Err(cfg_err("mesh_levels", "must not be empty"));
        }
        if let Some(&l) = self.mesh_levels.iter().find(|&&l| l > 10) {
            return Err(cfg_err("mesh_levels", format!("refinement depth {l} is too large (max 10)")));
        }
        if !(1..=6).contains(&self.bdf_order) {
            return Err(cfg_err("bdf_order", format!("must lie in 1..=6, got {}", self.bdf_order)));
        }
        if self.tau_list.is_empty() {
            return Err(cfg_err("tau_list", "must not be empty"));
        }
        for &tau in &self.tau_list {
            positive("tau_list", tau)?;
            let steps = (self.final_time / tau).round();
            if steps < 1.0 || (steps * tau - self.final_time).abs() > 1e-12 * self.final_time {
                return Err(cfg_err(
                    "tau_list",
                    format!("tau = {tau} does not divide final_time = {}", self.final_time),
                ));
            }
        }
        let needs_exact = matches!(self.initial_data, InitialData::InterpolatedExact | InitialData::RitzExact);
        if (needs_exact || self.theta_correction) && self.exact_solution.is_none() {
            return Err(cfg_err(
                if needs_exact { "initial_data.kind" } else { "theta_correction" },
                "requires exact_solution",
            ));
        }
        if self.exact_solution == Some(ExactKind::Xy) && (self.domain_radius - 1.0).abs() > 1e-14 {
            return Err(cfg_err("exact_solution", "the xy solution is defined on the unit disk (domain_radius = 1)"));
        }
        if let InitialData::Constant(v) = self.initial_data {
            if !v.is_finite() {
                return Err(cfg_err("initial_data.value", "must be finite"));
            }
        }
        if self.output.cadence == 0 {
            return Err(cfg_err("output.cadence", "must be at least 1"));
        }
        if let Some(t) = self.output.snapshot_times.iter().find(|&&t| !(0.0..=self.final_time).contains(&t)) {
            return Err(cfg_err("output.snapshot_times", format!("{t} lies outside [0, {}]", self.final_time)));
        }
        Ok(())
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_config_str(text: &str, path: &Path) -> Result<Scenario> {
    let cfg: ConfigFile = toml::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    Scenario::from_config(&cfg)
}

pub fn parse_config(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        parse_config_str(text, Path::new("test.toml"))
    }

    #[test]
    fn empty_file_gives_convergence_defaults() {
        let s = parse("").unwrap();
        assert_eq!(s, Scenario::convergence_study());
        assert_eq!(s.bdf_order, 3);
        assert_eq!(s.tau_list, CONVERGENCE_TAUS.to_vec());
    }

    #[test]
    fn spinodal_preset() {
        let s = parse("preset = \"spinodal\"").unwrap();
        assert_eq!(s.domain_radius, 10.0);
        assert_eq!(s.mesh, MeshSpec::TargetNodes(640));
        assert_eq!(s.steps_for(0.00125), 800);
    }

    #[test]
    fn tau_not_dividing_final_time() {
        let err = parse("tau_list = [0.3]").unwrap_err().to_string();
        assert!(err.contains("tau_list") && err.contains("0.3") && err.contains("final_time = 1"), "{err}");
    }

    #[test]
    fn negative_radius() {
        let err = parse("preset = \"spinodal\"\ndomain_radius = -1.0").unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "domain_radius"));
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse("bdf_order = 2\n\n[output]\ncadense = 3\n").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("cadense"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_requires_seed() {
        let err = parse("preset = \"spinodal\"\n[initial_data]\nkind = \"random_pm1\"").unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "initial_data.seed"));
    }

    #[test]
    fn round_trip_through_toml() {
        for s in [Scenario::convergence_study(), Scenario::spinodal_study()] {
            assert_eq!(parse(&s.to_toml()).unwrap(), s);
        }
    }

    #[test]
    fn overrides() {
        let s = parse(
            "bdf_order = 2\nmesh_levels = [1]\ntau_list = [0.5]\n[potential]\nsurface = { name = \"zero\" }\n[initial_data]\nkind = \"interpolated_exact\"",
        )
        .unwrap();
        assert_eq!(s.bdf_order, 2);
        assert_eq!(s.potential.surface, Potential::zero());
        assert_eq!(s.initial_data, InitialData::InterpolatedExact);
        assert!(parse("bdf_order = 7").is_err());
        assert!(parse("mesh_levels = []").is_err());
        assert!(parse("domain_radius = 2.0").is_err());
    }
}
