//! The six experiment commands. Each returns its artifacts; writing them is
//! left to the caller.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{linspace, ExperimentConfig};
use super::output::{json_artifact, Artifact, CsvTable};
use crate::cavity::{self, HybridSystem};
use crate::error::{Error, Result};
use crate::gates::{self, GateKind, GateRun, ProtocolOptions};
use crate::linalg;
use crate::lindblad::DecoherenceRates;
use crate::tqd::{self, TqdParams};

const TWO_PI: f64 = 2.0 * PI;

/// Fidelity shift below which a gate point counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Population,
    Coupling,
    Sweetspot,
    GateIswap,
    GateHolonomic,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Spectrum,
        Command::Population,
        Command::Coupling,
        Command::Sweetspot,
        Command::GateIswap,
        Command::GateHolonomic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Population => "population",
            Command::Coupling => "coupling",
            Command::Sweetspot => "sweetspot",
            Command::GateIswap => "gate-iswap",
            Command::GateHolonomic => "gate-holonomic",
        }
    }
}

pub fn run_command(cmd: Command, cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    match cmd {
        Command::Spectrum => spectrum(cfg),
        Command::Population => population(cfg),
        Command::Coupling => coupling(cfg),
        Command::Sweetspot => sweetspot(cfg),
        Command::GateIswap => gate(cfg, GateKind::IswapDispersive),
        Command::GateHolonomic => gate(cfg, GateKind::HolonomicResonant),
    }
}

fn eps_q_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    cfg.sweep.grid("eps_q_hz", &linspace(0.0, 20.0 * cfg.tqd.t_p_hz, 81)?)
}

fn spectrum(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let name = Command::Spectrum.name();
    let hash = cfg.hash();
    let grid = eps_q_grid(cfg)?;
    let t_p = TWO_PI * cfg.tqd.t_p_hz;
    let cols = ["eps_q_hz", "E_g_hz", "E_e_hz", "E_f_hz", "E_g_analytic_hz", "E_e_analytic_hz", "E_f_analytic_hz"];
    let mut table = CsvTable::new(name, &hash, cols.iter().map(|s| s.to_string()).collect());
    table.comment(format!("t_p_hz: {}", cfg.tqd.t_p_hz));
    for &eq_hz in &grid {
        let p = TqdParams::from_tp_tm(0.0, TWO_PI * eq_hz, t_p, 0.0);
        let num = tqd::eigensystem_numeric(&p)?;
        let ana = tqd::eigensystem_analytic(t_p, TWO_PI * eq_hz);
        table.push(vec![
            eq_hz,
            num.e_g / TWO_PI,
            num.e_e / TWO_PI,
            num.e_f / TWO_PI,
            ana.e_g / TWO_PI,
            ana.e_e / TWO_PI,
            ana.e_f / TWO_PI,
        ]);
    }
    Ok(vec![table.into_artifact(format!("{name}.csv"))])
}

fn population(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let name = Command::Population.name();
    let grid = eps_q_grid(cfg)?;
    let t_p = TWO_PI * cfg.tqd.t_p_hz;
    let mut cols = vec!["eps_q_hz".to_string()];
    for n in ["g", "e", "f"] {
        for b in ["E", "C", "L"] {
            cols.push(format!("pop_{b}_{n}"));
        }
    }
    let mut table = CsvTable::new(name, &cfg.hash(), cols);
    table.comment(format!("t_p_hz: {}", cfg.tqd.t_p_hz));
    let omega_grid: Vec<f64> = grid.iter().map(|x| TWO_PI * x).collect();
    for (row, eq_hz) in tqd::eigenstate_populations(t_p, &omega_grid)?.into_iter().zip(&grid) {
        let mut r = vec![*eq_hz];
        for pops in row.populations {
            r.extend(pops);
        }
        table.push(r);
    }
    Ok(vec![table.into_artifact(format!("{name}.csv"))])
}

#[derive(Serialize)]
struct CouplingPoint {
    f_r_hz: f64,
    g0_hz: f64,
    g_hz: f64,
}

#[derive(Serialize)]
struct CouplingReport {
    theta_rad: f64,
    cos_theta: f64,
    z0_ohm: f64,
    chi0: f64,
    w_over_s: f64,
    g0_min_hz: f64,
    g0_max_hz: f64,
    points: Vec<CouplingPoint>,
}

fn coupling(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let name = Command::Coupling.name();
    let grid = cfg.sweep.grid("f_r_hz", &linspace(1.5e9, 6.5e9, 11)?)?;
    let p = cfg.tqd.params()?;
    let theta = tqd::eigensystem_analytic(p.t_p(), p.eps_q()).theta;
    let mut points = Vec::with_capacity(grid.len());
    for &f in &grid {
        let g0 = cavity::vacuum_rabi_g0(&cfg.geometry.geometry(f)?)?;
        points.push(CouplingPoint {
            f_r_hz: f,
            g0_hz: g0 / TWO_PI,
            g_hz: cavity::effective_coupling(g0, theta) / TWO_PI,
        });
    }
    let g0s = points.iter().map(|p| p.g0_hz);
    let report = CouplingReport {
        theta_rad: theta,
        cos_theta: theta.cos(),
        z0_ohm: cfg.geometry.z0_ohm,
        chi0: cfg.geometry.chi0,
        w_over_s: cfg.geometry.w_m / cfg.geometry.s_m,
        g0_min_hz: g0s.clone().fold(f64::INFINITY, f64::min),
        g0_max_hz: g0s.fold(f64::NEG_INFINITY, f64::max),
        points,
    };
    Ok(vec![json_artifact(format!("{name}.json"), name, &cfg.hash(), report)?])
}

fn sweetspot(cfg: &ExperimentConfig) -> Result<Vec<Artifact>> {
    let name = Command::Sweetspot.name();
    let t_p_hz = cfg.tqd.t_p_hz;
    let grid = cfg.sweep.grid("eps_q_hz", &linspace(5.0 * t_p_hz, 100.0 * t_p_hz, 20)?)?;
    let cols = [
        "eps_d_hz",
        "eps_q_hz",
        "omega_ge_hz",
        "slope_eps_d",
        "slope_eps_q",
        "expansion_slope_eps_d",
        "expansion_slope_eps_q",
    ];
    let mut table = CsvTable::new(name, &cfg.hash(), cols.iter().map(|s| s.to_string()).collect());
    table.comment(format!("t_p_hz: {t_p_hz}"));
    table.comment(format!("t_m_hz: {}", cfg.tqd.t_m_hz));
    let (t_p, t_m) = (TWO_PI * t_p_hz, TWO_PI * cfg.tqd.t_m_hz);
    for &ed in &cfg.sweetspot.eps_d_hz {
        for &eq in &grid {
            let p = TqdParams::from_tp_tm(TWO_PI * ed, TWO_PI * eq, t_p, t_m);
            let slopes = tqd::sweet_spot_derivatives(&p)?;
            let x = tqd::excitation_energy_expansion(t_p, t_m, TWO_PI * eq, 0.0, 0.0);
            table.push(vec![
                ed,
                eq,
                tqd::omega_ge_exact(&p)? / TWO_PI,
                slopes.d_eps_d,
                slopes.d_eps_q,
                x.dipolar_slope,
                x.quadrupolar_slope,
            ]);
        }
    }
    Ok(vec![table.into_artifact(format!("{name}.csv"))])
}

#[derive(Debug, Clone, Serialize)]
pub struct Convergence {
    pub n_max: usize,
    pub tol: f64,
    pub fidelity: f64,
    pub shift: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseSummary {
    pub realizations: usize,
    pub sigma_eps_d_hz: f64,
    pub sigma_eps_q_hz: f64,
    pub fidelity_mean: f64,
    pub fidelity_std: f64,
}

/// One gate sweep point.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub index: usize,
    pub parameter: String,
    pub value: f64,
    pub qubit_f_hz: [f64; 2],
    pub g_hz: [f64; 2],
    pub f_osc_hz: f64,
    pub alpha_hz: f64,
    pub n_max: usize,
    pub tol: f64,
    pub gate_time_s: f64,
    pub fidelity: f64,
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub convergence: Option<Convergence>,
    pub noise: Option<NoiseSummary>,
    pub config_hash: String,
}

#[derive(Serialize)]
struct GateReport<'a> {
    scenario: &'a str,
    seed: u64,
    records: &'a [ResultRecord],
}

fn gate_system(cfg: &ExperimentConfig, kind: GateKind, value: f64, n_extra: usize) -> Result<HybridSystem> {
    match kind {
        GateKind::IswapDispersive => cfg.dispersive_system(value, n_extra),
        GateKind::HolonomicResonant => cfg.holonomic_system(value, n_extra),
    }
}

fn gate_rates(cfg: &ExperimentConfig, kind: GateKind) -> Result<DecoherenceRates> {
    match kind {
        GateKind::IswapDispersive => cfg.rates.resonator(),
        GateKind::HolonomicResonant => cfg.rates.transmon(),
    }
}

/// Initial state |g,e,0⟩ for the iSWAP and |g,e,1⟩ for the holonomic gate.
pub fn initial_state(sys: &HybridSystem, kind: GateKind) -> linalg::CMatrix {
    let n = match kind {
        GateKind::IswapDispersive => 0,
        GateKind::HolonomicResonant => 1,
    };
    linalg::projector(sys.dim(), sys.index(0, 1, n))
}

pub fn run_gate(sys: &HybridSystem, kind: GateKind, rates: &DecoherenceRates, opts: &ProtocolOptions) -> Result<GateRun> {
    let rho0 = initial_state(sys, kind);
    match kind {
        GateKind::IswapDispersive => gates::run_iswap_protocol(sys, rates, &rho0, opts),
        GateKind::HolonomicResonant => gates::run_holonomic_protocol(sys, rates, &rho0, opts),
    }
}

/// Qubit frequency shifts from one draw of quasi-static detuning noise,
/// computed from the exact TQD splitting.
fn noise_offsets(nominal: &TqdParams, rng: &mut ChaCha8Rng, d: &Normal<f64>, q: &Normal<f64>) -> Result<[f64; 2]> {
    let w0 = tqd::omega_ge_exact(nominal)?;
    let mut out = [0.0; 2];
    for o in &mut out {
        let p = nominal.with_noise(d.sample(rng), q.sample(rng));
        *o = tqd::omega_ge_exact(&p)? - w0;
    }
    Ok(out)
}

fn gate_point(cfg: &ExperimentConfig, kind: GateKind, index: usize, value: f64) -> Result<(ResultRecord, GateRun)> {
    let sys = gate_system(cfg, kind, value, 0)?;
    let rates = gate_rates(cfg, kind)?;
    let opts = ProtocolOptions {
        tol: cfg.tol,
        samples: cfg.output.samples,
        frequency_offsets: [0.0; 2],
    };
    let run = run_gate(&sys, kind, &rates, &opts)?;

    let convergence = if cfg.convergence_check {
        let bigger = gate_system(cfg, kind, value, 1)?;
        let tight = ProtocolOptions {
            tol: cfg.tol / 10.0,
            samples: 1,
            frequency_offsets: [0.0; 2],
        };
        let check = run_gate(&bigger, kind, &rates, &tight)?;
        let shift = (check.fidelity - run.fidelity).abs();
        Some(Convergence {
            n_max: bigger.n_max,
            tol: tight.tol,
            fidelity: check.fidelity,
            shift,
            converged: shift < CONVERGENCE_THRESHOLD,
        })
    } else {
        None
    };

    let noise = if cfg.noise.realizations > 0 {
        let nominal = cfg.tqd.params()?;
        let nd = Normal::new(0.0, TWO_PI * cfg.noise.sigma_eps_d_hz).map_err(|e| Error::Config(e.to_string()))?;
        let nq = Normal::new(0.0, TWO_PI * cfg.noise.sigma_eps_q_hz).map_err(|e| Error::Config(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(index as u64);
        let mut fs = Vec::with_capacity(cfg.noise.realizations);
        for _ in 0..cfg.noise.realizations {
            let offsets = noise_offsets(&nominal, &mut rng, &nd, &nq)?;
            let o = ProtocolOptions {
                tol: cfg.tol,
                samples: 1,
                frequency_offsets: offsets,
            };
            fs.push(run_gate(&sys, kind, &rates, &o)?.fidelity);
        }
        let n = fs.len() as f64;
        let mean = fs.iter().sum::<f64>() / n;
        let var = fs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
        Some(NoiseSummary {
            realizations: fs.len(),
            sigma_eps_d_hz: cfg.noise.sigma_eps_d_hz,
            sigma_eps_q_hz: cfg.noise.sigma_eps_q_hz,
            fidelity_mean: mean,
            fidelity_std: var.sqrt(),
        })
    } else {
        None
    };

    let d = run.trajectory.diagnostics;
    let record = ResultRecord {
        index,
        parameter: sweep_parameter(kind).into(),
        value,
        qubit_f_hz: [sys.omega[0] / TWO_PI, sys.omega[1] / TWO_PI],
        g_hz: [sys.g[0] / TWO_PI, sys.g[1] / TWO_PI],
        f_osc_hz: sys.omega_osc / TWO_PI,
        alpha_hz: sys.alpha / TWO_PI,
        n_max: sys.n_max,
        tol: cfg.tol,
        gate_time_s: run.spec.duration,
        fidelity: run.fidelity,
        max_trace_drift: d.max_trace_drift,
        max_hermiticity_error: d.max_hermiticity_error,
        min_eigenvalue: d.min_eigenvalue,
        convergence,
        noise,
        config_hash: cfg.hash(),
    };
    Ok((record, run))
}

fn sweep_parameter(kind: GateKind) -> &'static str {
    match kind {
        GateKind::IswapDispersive => "delta_over_g",
        GateKind::HolonomicResonant => "alpha_over_g",
    }
}

/// Runs the gate sweep and returns the records in grid order.
pub fn gate_records(cfg: &ExperimentConfig, kind: GateKind) -> Result<Vec<(ResultRecord, GateRun)>> {
    let default: Vec<f64> = match kind {
        GateKind::IswapDispersive => vec![2.0, 4.0, 6.0, 8.0, 10.0],
        GateKind::HolonomicResonant => (0..=12).map(f64::from).collect(),
    };
    let grid = cfg.sweep.grid(sweep_parameter(kind), &default)?;
    grid.par_iter()
        .enumerate()
        .map(|(i, &v)| gate_point(cfg, kind, i, v))
        .collect()
}

fn gate(cfg: &ExperimentConfig, kind: GateKind) -> Result<Vec<Artifact>> {
    let name = match kind {
        GateKind::IswapDispersive => Command::GateIswap.name(),
        GateKind::HolonomicResonant => Command::GateHolonomic.name(),
    };
    let hash = cfg.hash();
    let results = gate_records(cfg, kind)?;
    let mut artifacts = Vec::new();

    let mut cols: Vec<String> = [
        sweep_parameter(kind),
        "fidelity",
        "gate_time_s",
        "converged",
        "fidelity_shift",
        "max_trace_drift",
        "min_eigenvalue",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let noisy = cfg.noise.realizations > 0;
    if noisy {
        cols.push("noise_fidelity_mean".into());
        cols.push("noise_fidelity_std".into());
    }
    let mut summary = CsvTable::new(name, &hash, cols);
    for (rec, _) in &results {
        let conv = rec.convergence.as_ref();
        let mut row = vec![
            rec.value,
            rec.fidelity,
            rec.gate_time_s,
            conv.map_or(f64::NAN, |c| if c.converged { 1.0 } else { 0.0 }),
            conv.map_or(f64::NAN, |c| c.shift),
            rec.max_trace_drift,
            rec.min_eigenvalue,
        ];
        if let Some(n) = &rec.noise {
            row.push(n.fidelity_mean);
            row.push(n.fidelity_std);
        }
        summary.push(row);
    }
    artifacts.push(summary.into_artifact(format!("{name}.csv")));

    if cfg.output.trajectories {
        for (rec, run) in &results {
            let mut cols = vec!["t_s".to_string()];
            cols.extend(run.labels.iter().map(|l| format!("pop_{}", l.replace(',', ""))));
            cols.push("fidelity".into());
            let mut t = CsvTable::new(name, &hash, cols);
            t.comment(format!("{}: {}", rec.parameter, rec.value));
            let pops = run.populations();
            for ((time, p), f) in run.trajectory.times.iter().zip(pops).zip(&run.fidelity_series) {
                let mut row = Vec::with_capacity(p.len() + 2);
                row.push(*time);
                row.extend(p);
                row.push(*f);
                t.push(row);
            }
            artifacts.push(t.into_artifact(format!("{name}_traj_{:03}.csv", rec.index)));
        }
    }

    let records: Vec<ResultRecord> = results.into_iter().map(|(r, _)| r).collect();
    artifacts.push(json_artifact(
        format!("{name}.json"),
        name,
        &hash,
        GateReport {
            scenario: &cfg.scenario,
            seed: cfg.seed,
            records: &records,
        },
    )?);
    Ok(artifacts)
}
