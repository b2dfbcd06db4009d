//! TOML run configuration with dotted `key=value` overrides.

use crate::interaction::InteractionOptions;
use crate::monomer::{MoleculeParams, MonomerLabel, SpinConstants};
use crate::pair_basis::{preset, BasisSpec, PairLevel, Parity, PRESET_NAMES};
use crate::propagator::PropagationConfig;
use crate::{units, Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const MOLECULE_PRESETS: &[&str] = &["CaF-40-19"];

/// Molecule preset plus optional overrides of individual constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoleculeConfig {
    pub preset: String,
    pub b_ghz: Option<f64>,
    pub mu_debye: Option<f64>,
    pub mass_amu: Option<f64>,
    pub g_s: Option<f64>,
    pub gamma_mhz: Option<f64>,
    pub zeta_f_mhz: Option<f64>,
    pub t_mhz: Option<f64>,
    pub c_f_mhz: Option<f64>,
}

impl Default for MoleculeConfig {
    fn default() -> Self {
        Self {
            preset: "CaF-40-19".into(),
            b_ghz: None,
            mu_debye: None,
            mass_amu: None,
            g_s: None,
            gamma_mhz: None,
            zeta_f_mhz: None,
            t_mhz: None,
            c_f_mhz: None,
        }
    }
}

impl MoleculeConfig {
    pub fn params(&self) -> Result<MoleculeParams> {
        let mut p = match self.preset.as_str() {
            "CaF-40-19" => MoleculeParams::caf(),
            other => {
                return Err(Error::Config(format!(
                    "unknown molecule preset {other:?}; known: {MOLECULE_PRESETS:?}"
                )))
            }
        };
        let mhz = units::mhz_to_au;
        if let Some(v) = self.b_ghz {
            p.b = units::ghz_to_au(v);
        }
        if let Some(v) = self.mu_debye {
            p.mu = units::debye_to_au(v);
        }
        if let Some(v) = self.mass_amu {
            p.mass = v;
        }
        if let Some(v) = self.g_s {
            p.g_s = v;
        }
        let s: &mut SpinConstants = &mut p.spin;
        if let Some(v) = self.gamma_mhz {
            s.gamma = mhz(v);
        }
        if let Some(v) = self.zeta_f_mhz {
            s.zeta_f = mhz(v);
        }
        if let Some(v) = self.t_mhz {
            s.t = mhz(v);
        }
        if let Some(v) = self.c_f_mhz {
            s.c_f = mhz(v);
        }
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisConfig {
    /// One of the class-1 presets.
    pub preset: String,
    pub ntilde_max: u32,
    pub l_max: u32,
    pub m_tot: Vec<i32>,
    pub parity: Parity,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self {
            preset: "minimal".into(),
            ntilde_max: 5,
            l_max: 6,
            m_tot: vec![0],
            parity: Parity::Even,
        }
    }
}

impl BasisConfig {
    pub fn spec(&self, m_tot: i32) -> Result<BasisSpec> {
        let (class1, spin) = preset(&self.preset).ok_or_else(|| {
            Error::Config(format!(
                "unknown basis preset {:?}; known: {PRESET_NAMES:?}",
                self.preset
            ))
        })?;
        let mut spec = BasisSpec::new(self.ntilde_max, self.l_max, m_tot, self.parity, class1);
        spec.include_spin = spin;
        if spin {
            let s = MonomerLabel::with_spin(1, 0, 0, 0);
            spec.incoming = PairLevel::new(s, s);
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InteractionConfig {
    /// Isotropic electronic C₆, E_h a0⁶.
    pub c6_elec: f64,
    pub vv_floor_ghz: f64,
    pub vanvleck: bool,
}

impl Default for InteractionConfig {
    fn default() -> Self {
        let d = InteractionOptions::default();
        Self {
            c6_elec: d.c6_elec,
            vv_floor_ghz: units::au_to_ghz(d.vv_floor),
            vanvleck: d.vanvleck,
        }
    }
}

impl InteractionConfig {
    pub fn options(&self) -> InteractionOptions {
        InteractionOptions {
            c6_elec: self.c6_elec,
            vv_floor: units::ghz_to_au(self.vv_floor_ghz),
            vanvleck: self.vanvleck,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub fields_kv_cm: Vec<f64>,
    pub energies_uk: Vec<f64>,
    pub b_gauss: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            fields_kv_cm: vec![24.5],
            energies_uk: vec![10.0],
            b_gauss: vec![0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdiabatConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// Keep curves whose threshold lies within this window of the incoming level, GHz.
    pub window_ghz: f64,
}

impl Default for AdiabatConfig {
    fn default() -> Self {
        Self {
            r_min: 50.0,
            r_max: 5000.0,
            points: 200,
            window_ghz: 15.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StarkConfig {
    pub n_max: u32,
    pub ntilde_max: u32,
    /// Search bracket for threshold crossings, kV/cm.
    pub crossing_bracket: [f64; 2],
}

impl Default for StarkConfig {
    fn default() -> Self {
        Self {
            n_max: 20,
            ntilde_max: 3,
            crossing_bracket: [15.0, 30.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceAxis {
    LMax,
    Basis,
    RAbsorb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValue {
    Number(f64),
    Name(String),
}

impl std::fmt::Display for AxisValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AxisValue::Number(x) => write!(f, "{x}"),
            AxisValue::Name(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub axis: ConvergenceAxis,
    pub values: Vec<AxisValue>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            axis: ConvergenceAxis::LMax,
            values: vec![AxisValue::Number(6.0)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
    /// Prefix tables with a generation-time comment line.
    pub timestamp: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: Format::Csv,
            timestamp: false,
        }
    }
}

/// Complete description of a batch run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub molecule: MoleculeConfig,
    pub basis: BasisConfig,
    pub interaction: InteractionConfig,
    pub propagation: PropagationConfig,
    pub sweep: SweepConfig,
    pub adiabats: AdiabatConfig,
    pub stark: StarkConfig,
    pub convergence: ConvergenceConfig,
    pub output: OutputConfig,
}

fn sorted_nonempty(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{name} is empty")));
    }
    if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "{name} must be finite and strictly increasing"
        )));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads `path` (or defaults when `None`) and applies `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        let mut value: toml::Table =
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(value)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.molecule.params()?;
        self.basis.spec(0)?;
        if self.basis.m_tot.is_empty() {
            return Err(Error::Config("basis.m_tot is empty".into()));
        }
        sorted_nonempty("sweep.fields_kv_cm", &self.sweep.fields_kv_cm)?;
        sorted_nonempty("sweep.energies_uk", &self.sweep.energies_uk)?;
        sorted_nonempty("sweep.b_gauss", &self.sweep.b_gauss)?;
        if self.sweep.energies_uk.iter().any(|e| *e <= 0.0) {
            return Err(Error::Config("collision energies must be positive".into()));
        }
        self.propagation
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let a = &self.adiabats;
        if !(a.r_min > 0.0 && a.r_max > a.r_min && a.points >= 2) {
            return Err(Error::Config(
                "adiabats need 0 < r_min < r_max and points >= 2".into(),
            ));
        }
        if self.convergence.values.is_empty() {
            return Err(Error::Config("convergence.values is empty".into()));
        }
        for v in &self.convergence.values {
            let ok = match (self.convergence.axis, v) {
                (ConvergenceAxis::Basis, AxisValue::Name(n)) => preset(n).is_some(),
                (ConvergenceAxis::LMax, AxisValue::Number(x)) => *x >= 0.0 && x.fract() == 0.0,
                (ConvergenceAxis::RAbsorb, AxisValue::Number(x)) => {
                    *x > 0.0 && *x < self.propagation.r_mid
                }
                _ => false,
            };
            if !ok {
                return Err(Error::Config(format!(
                    "invalid value {v} for convergence axis {:?}",
                    self.convergence.axis
                )));
            }
        }
        Ok(())
    }
}

/// Sets a dotted key, parsing the value as TOML and falling back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key {key:?}")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("{p} is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
