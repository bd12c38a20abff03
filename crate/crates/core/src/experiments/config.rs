//! Experiment configuration: TOML file, `key=value` overrides and a stable hash.
//!
//! Frequencies and rates in the file are ordinary frequencies in Hz; they are
//! multiplied by 2π when the physics types are built.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cavity::{CircuitGeometry, CouplingForm, HybridSystem, Ladder};
use crate::error::{Error, Result};
use crate::lindblad::DecoherenceRates;
use crate::tqd::{self, TqdParams};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Free-form label echoed into the outputs.
    pub scenario: String,
    pub seed: u64,
    /// Integrator local error tolerance.
    pub tol: f64,
    /// Re-run each gate point with n_max + 1 and tol/10.
    pub convergence_check: bool,
    pub tqd: TqdConfig,
    pub geometry: GeometryConfig,
    pub system: SystemConfig,
    pub rates: RatesConfig,
    pub sweep: SweepConfig,
    pub sweetspot: SweetspotConfig,
    pub noise: NoiseConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: "default".into(),
            seed: 0,
            tol: 1e-9,
            convergence_check: true,
            tqd: TqdConfig::default(),
            geometry: GeometryConfig::default(),
            system: SystemConfig::default(),
            rates: RatesConfig::default(),
            sweep: SweepConfig::default(),
            sweetspot: SweetspotConfig::default(),
            noise: NoiseConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TqdConfig {
    pub t_p_hz: f64,
    pub eps_q_hz: f64,
    pub eps_d_hz: f64,
    pub t_m_hz: f64,
    /// Lower bound on eps_q/t_p for the operating point.
    pub min_ratio: f64,
}

impl Default for TqdConfig {
    fn default() -> Self {
        Self {
            t_p_hz: 2e9,
            eps_q_hz: 20e9,
            eps_d_hz: 0.0,
            t_m_hz: 0.0,
            min_ratio: tqd::DEFAULT_OPERATING_RATIO,
        }
    }
}

impl TqdConfig {
    pub fn params(&self) -> Result<TqdParams> {
        if !(self.t_p_hz > 0.0) {
            return Err(Error::Config(format!("tqd.t_p_hz must be positive, got {}", self.t_p_hz)));
        }
        if self.eps_q_hz / self.t_p_hz < self.min_ratio {
            return Err(Error::Config(format!(
                "tqd.eps_q_hz / tqd.t_p_hz = {} is below min_ratio {}",
                self.eps_q_hz / self.t_p_hz,
                self.min_ratio
            )));
        }
        Ok(TqdParams::from_tp_tm(
            TWO_PI * self.eps_d_hz,
            TWO_PI * self.eps_q_hz,
            TWO_PI * self.t_p_hz,
            TWO_PI * self.t_m_hz,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub f_r_hz: f64,
    pub z0_ohm: f64,
    pub chi0: f64,
    pub w_m: f64,
    pub s_m: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let g = CircuitGeometry::default();
        Self {
            f_r_hz: g.omega_r / TWO_PI,
            z0_ohm: g.z0,
            chi0: g.chi0,
            w_m: g.w,
            s_m: g.s,
        }
    }
}

impl GeometryConfig {
    pub fn geometry(&self, f_r_hz: f64) -> Result<CircuitGeometry> {
        let g = CircuitGeometry {
            omega_r: TWO_PI * f_r_hz,
            z0: self.z0_ohm,
            chi0: self.chi0,
            w: self.w_m,
            s: self.s_m,
            alpha: 0.0,
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    /// Coupling of qubit 1.
    pub g_hz: f64,
    /// g⁽²⁾ = g_hz · g2_over_g1.
    pub g2_over_g1: f64,
    /// Derive g from the circuit geometry and the TQD mixing angle instead of g_hz.
    pub g_from_geometry: bool,
    pub f_osc_hz: f64,
    pub n_max_dispersive: usize,
    pub n_max_holonomic: usize,
    pub ladder_dispersive: Ladder,
    pub ladder_holonomic: Ladder,
    pub coupling_dispersive: CouplingForm,
    pub coupling_holonomic: CouplingForm,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            g_hz: 66e6,
            g2_over_g1: 1.0,
            g_from_geometry: false,
            f_osc_hz: 1.7e9,
            n_max_dispersive: 2,
            n_max_holonomic: 3,
            ladder_dispersive: Ladder::Harmonic,
            ladder_holonomic: Ladder::Uniform,
            coupling_dispersive: CouplingForm::Rwa,
            coupling_holonomic: CouplingForm::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    pub gamma_phi_hz: f64,
    pub gamma_ge_hz: f64,
    pub gamma_a_resonator_hz: f64,
    pub gamma_a_transmon_hz: f64,
    pub gamma_phi_transmon_hz: f64,
    /// Multiplies every rate.
    pub scale: f64,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self {
            gamma_phi_hz: 2.7e6,
            gamma_ge_hz: 0.0,
            gamma_a_resonator_hz: 0.028e6,
            gamma_a_transmon_hz: 4e3,
            gamma_phi_transmon_hz: 0.8e6,
            scale: 1.0,
        }
    }
}

impl RatesConfig {
    fn base(&self) -> DecoherenceRates {
        DecoherenceRates {
            gamma_ge: [TWO_PI * self.gamma_ge_hz; 2],
            gamma_phi: [TWO_PI * self.gamma_phi_hz; 2],
            ..DecoherenceRates::zero()
        }
    }

    pub fn resonator(&self) -> Result<DecoherenceRates> {
        let r = DecoherenceRates {
            gamma_a: TWO_PI * self.gamma_a_resonator_hz,
            ..self.base()
        }
        .scaled(self.scale);
        r.validate()?;
        Ok(r)
    }

    pub fn transmon(&self) -> Result<DecoherenceRates> {
        let r = DecoherenceRates {
            gamma_a: TWO_PI * self.gamma_a_transmon_hz,
            gamma_phi_tr: TWO_PI * self.gamma_phi_transmon_hz,
            ..self.base()
        }
        .scaled(self.scale);
        r.validate()?;
        Ok(r)
    }
}

/// A grid given either as explicit values or as start/stop/points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Checked against the command's sweep parameter when given.
    pub parameter: Option<String>,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
}

impl SweepConfig {
    /// Resolves the grid, falling back to `default` when nothing is set.
    pub fn grid(&self, parameter: &str, default: &[f64]) -> Result<Vec<f64>> {
        if let Some(p) = &self.parameter {
            if p != parameter {
                return Err(Error::Config(format!(
                    "sweep.parameter is '{p}' but this command sweeps '{parameter}'"
                )));
            }
        }
        let grid = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => linspace(a, b, n)?,
            (None, None, None, None) => default.to_vec(),
            _ => {
                return Err(Error::Config(
                    "give either sweep.values or all of sweep.start, sweep.stop, sweep.points".into(),
                ))
            }
        };
        check_monotone(&grid, "sweep")?;
        Ok(grid)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::Config("a grid needs at least one point".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..n)
            .map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
            .collect()),
    }
}

pub fn check_monotone(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{what} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{what} grid has non-finite values")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(format!("{what} grid must be strictly increasing")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweetspotConfig {
    /// Dipolar detunings of the derivative map; the sweep grid supplies eps_q.
    pub eps_d_hz: Vec<f64>,
}

impl Default for SweetspotConfig {
    fn default() -> Self {
        Self {
            eps_d_hz: vec![-0.4e9, -0.2e9, 0.0, 0.2e9, 0.4e9],
        }
    }
}

/// Optional quasi-static detuning noise on each qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub sigma_eps_d_hz: f64,
    pub sigma_eps_q_hz: f64,
    /// Number of noise draws per sweep point; 0 disables sampling.
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    /// Write one trajectory CSV per gate sweep point.
    pub trajectories: bool,
    /// Output intervals per gate duration.
    pub samples: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            trajectories: true,
            samples: crate::lindblad::DEFAULT_SAMPLES,
        }
    }
}

impl ExperimentConfig {
    /// Reads a TOML file (or starts from defaults) and applies `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for ov in overrides {
            apply_override(&mut value, ov)?;
        }
        let cfg: Self = toml::Value::Table(value)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.output.samples == 0 {
            return Err(Error::Config("output.samples must be positive".into()));
        }
        if !(self.system.g_hz > 0.0) || !(self.system.f_osc_hz > 0.0) {
            return Err(Error::Config("system.g_hz and system.f_osc_hz must be positive".into()));
        }
        if self.noise.sigma_eps_d_hz < 0.0 || self.noise.sigma_eps_q_hz < 0.0 {
            return Err(Error::Config("noise sigmas must be non-negative".into()));
        }
        check_monotone(&self.sweetspot.eps_d_hz, "sweetspot.eps_d_hz")?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, excluding the output directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir.clear();
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    /// Couplings (g⁽¹⁾, g⁽²⁾) in rad/s.
    pub fn couplings(&self) -> Result<[f64; 2]> {
        let g1 = if self.system.g_from_geometry {
            let p = self.tqd.params()?;
            let eig = tqd::eigensystem_analytic(p.t_p(), p.eps_q());
            let g0 = crate::cavity::vacuum_rabi_g0(&self.geometry.geometry(self.system.f_osc_hz)?)?;
            crate::cavity::effective_coupling(g0, eig.theta)
        } else {
            TWO_PI * self.system.g_hz
        };
        Ok([g1, g1 * self.system.g2_over_g1])
    }

    /// Dispersive system with both qubits detuned by Δ = ratio·g⁽¹⁾.
    pub fn dispersive_system(&self, delta_over_g: f64, n_extra: usize) -> Result<HybridSystem> {
        let g = self.couplings()?;
        let w = TWO_PI * self.system.f_osc_hz;
        Ok(HybridSystem {
            omega: [w + delta_over_g * g[0]; 2],
            g,
            omega_osc: w,
            n_max: self.system.n_max_dispersive + n_extra,
            alpha: 0.0,
            ladder: self.system.ladder_dispersive,
            coupling: self.system.coupling_dispersive,
        })
    }

    /// Resonant transmon system with α = ratio·g⁽¹⁾.
    pub fn holonomic_system(&self, alpha_over_g: f64, n_extra: usize) -> Result<HybridSystem> {
        let g = self.couplings()?;
        let w = TWO_PI * self.system.f_osc_hz;
        Ok(HybridSystem {
            omega: [w; 2],
            g,
            omega_osc: w,
            n_max: self.system.n_max_holonomic + n_extra,
            alpha: alpha_over_g * g[0],
            ladder: self.system.ladder_holonomic,
            coupling: self.system.coupling_holonomic,
        })
    }
}

/// Applies `a.b.c=value` to the table. The value is parsed as a TOML value and
/// kept as a string when that fails.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{spec}' is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Config(format!("override '{spec}' has an empty key")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let (last, path) = parts.split_last().expect("non-empty key");
    let mut cur = table;
    for p in path {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override '{key}': '{p}' is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = toml::to_string(&c).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.hash(), back.hash());
    }

    #[test]
    fn overrides_apply_and_change_hash() {
        let base = ExperimentConfig::load(None, &[]).unwrap();
        let c = ExperimentConfig::load(
            None,
            &["rates.gamma_phi_hz=0".into(), "sweep.values=[2, 4]".into(), "system.ladder_holonomic=harmonic".into()],
        )
        .unwrap();
        assert_eq!(c.rates.gamma_phi_hz, 0.0);
        assert_eq!(c.sweep.values, Some(vec![2.0, 4.0]));
        assert_eq!(c.system.ladder_holonomic, Ladder::Harmonic);
        assert_ne!(base.hash(), c.hash());
    }

    #[test]
    fn output_dir_excluded_from_hash() {
        let a = ExperimentConfig::load(None, &["output.dir=a".into()]).unwrap();
        let b = ExperimentConfig::load(None, &["output.dir=b".into()]).unwrap();
        assert_eq!(a.hash(), b.hash());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::load(None, &["nonsense=1".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["tol".into()]).is_err());
        assert!(ExperimentConfig::load(None, &["tol=2".into()]).is_err());
        let s = SweepConfig {
            values: Some(vec![1.0, 1.0]),
            ..Default::default()
        };
        assert!(s.grid("x", &[]).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(1.5, 6.5, 11).unwrap();
        assert_eq!(g[0], 1.5);
        assert_eq!(g[10], 6.5);
    }

    #[test]
    fn default_systems() {
        let c = ExperimentConfig::default();
        let s = c.dispersive_system(10.0, 0).unwrap();
        assert!((s.detuning(0) / s.g[0] - 10.0).abs() < 1e-12);
        let h = c.holonomic_system(6.2, 1).unwrap();
        assert_eq!(h.n_max, 4);
        assert_eq!(h.ladder, Ladder::Uniform);
    }
}
