//! Master-equation integration with the qubit, oscillator and transmon
//! dissipators, plus population and fidelity observables.
//!
//! Dephasing channels carry the ½ inside the rate: ½Γ_φ D[|e⟩⟨e| − |g⟩⟨g|].
//! Because the jump operator has eigenvalues ±1, this decays qubit
//! coherences at rate Γ_φ, not 2Γ_φ.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cavity::HybridSystem;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, LindbladChannel};
use crate::ode::{DormandPrince, Stats};

/// Default number of output intervals per gate duration.
pub const DEFAULT_SAMPLES: usize = 2000;
/// Default local error tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

const TWO_PI: f64 = 2.0 * PI;

/// Decoherence rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct DecoherenceRates {
    #[serde(default)]
    pub gamma_ge: [f64; 2],
    /// |e⟩ → |f⟩ relaxation. The qubits are modelled as two-level systems, so
    /// this must stay zero.
    #[serde(default)]
    pub gamma_ef: [f64; 2],
    /// |f⟩ → |g⟩ relaxation, same restriction as `gamma_ef`.
    #[serde(default)]
    pub gamma_gf: [f64; 2],
    #[serde(default)]
    pub gamma_phi: [f64; 2],
    /// Oscillator energy decay.
    #[serde(default)]
    pub gamma_a: f64,
    /// Transmon dephasing on the |0⟩, |1⟩ pair.
    #[serde(default)]
    pub gamma_phi_tr: f64,
}

impl DecoherenceRates {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Γ_φ/2π = 2.7 MHz per qubit and a resonator with Γ_a/2π = 0.028 MHz.
    pub fn resonator_preset() -> Self {
        Self {
            gamma_phi: [TWO_PI * 2.7e6; 2],
            gamma_a: TWO_PI * 0.028e6,
            ..Self::default()
        }
    }

    /// Γ_φ/2π = 2.7 MHz per qubit, transmon Γ_a/2π = 4 kHz and Γ_φ,tr/2π = 0.8 MHz.
    pub fn transmon_preset() -> Self {
        Self {
            gamma_phi: [TWO_PI * 2.7e6; 2],
            gamma_a: TWO_PI * 4e3,
            gamma_phi_tr: TWO_PI * 0.8e6,
            ..Self::default()
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for k in 0..2 {
            self.gamma_ge[k] *= factor;
            self.gamma_ef[k] *= factor;
            self.gamma_gf[k] *= factor;
            self.gamma_phi[k] *= factor;
        }
        self.gamma_a *= factor;
        self.gamma_phi_tr *= factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = self
            .gamma_ge
            .iter()
            .chain(&self.gamma_ef)
            .chain(&self.gamma_gf)
            .chain(&self.gamma_phi)
            .chain([&self.gamma_a, &self.gamma_phi_tr]);
        for r in all {
            if !(r.is_finite() && *r >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "decoherence rates must be finite and non-negative, got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Lindblad channels on the full q1 ⊗ q2 ⊗ oscillator space. Zero rates
/// produce no channel.
pub fn build_channels(rates: &DecoherenceRates, sys: &HybridSystem) -> Result<Vec<LindbladChannel>> {
    rates.validate()?;
    if rates.gamma_ef.iter().chain(&rates.gamma_gf).any(|&r| r > 0.0) {
        return Err(Error::InvalidParameter(
            "relaxation through |f> needs a three-level qubit; the qubits here have two levels".into(),
        ));
    }
    let mut out = Vec::new();
    let dephasing = linalg::projector(2, 1) - linalg::projector(2, 0);
    for k in 0..2 {
        if rates.gamma_ge[k] > 0.0 {
            out.push(LindbladChannel::new(
                format!("relax_ge_q{}", k + 1),
                sys.embed_qubit(k, &linalg::sigma_minus()),
                rates.gamma_ge[k],
            )?);
        }
        if rates.gamma_phi[k] > 0.0 {
            out.push(LindbladChannel::new(
                format!("dephase_q{}", k + 1),
                sys.embed_qubit(k, &dephasing),
                rates.gamma_phi[k] / 2.0,
            )?);
        }
    }
    if rates.gamma_a > 0.0 {
        out.push(LindbladChannel::new("decay_osc", sys.lowering(), rates.gamma_a)?);
    }
    if rates.gamma_phi_tr > 0.0 {
        let op = sys.oscillator_projector(0) - sys.oscillator_projector(1);
        out.push(LindbladChannel::new("dephase_osc", op, rates.gamma_phi_tr / 2.0)?);
    }
    Ok(out)
}

/// Hamiltonian supplied to [`integrate`].
pub enum Generator<'a> {
    Constant(&'a CMatrix),
    TimeDependent(&'a (dyn Fn(f64) -> CMatrix + Sync)),
}

/// Quality metrics accumulated over every stored state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Diagnostics {
    /// Trace drift ≤ 1e-8, Hermiticity ≤ 1e-10, min eigenvalue ≥ −1e-8.
    pub fn within_bounds(&self) -> bool {
        self.max_trace_drift <= 1e-8 && self.max_hermiticity_error <= 1e-10 && self.min_eigenvalue >= -1e-8
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn last(&self) -> &CMatrix {
        self.states.last().expect("trajectory has at least one state")
    }

    /// ⟨i|ρ(t)|i⟩ for each requested basis index, one row per time.
    pub fn populations(&self, indices: &[usize]) -> Vec<Vec<f64>> {
        self.states
            .iter()
            .map(|r| indices.iter().map(|&i| r[(i, i)].re).collect())
            .collect()
    }

    /// Tr[ρ_id ρ(t)] at every stored time.
    pub fn fidelity_series(&self, rho_id: &CMatrix) -> Result<Vec<f64>> {
        self.states.iter().map(|r| state_fidelity(rho_id, r)).collect()
    }
}

/// Uniform grid of `samples` intervals on [0, duration].
pub fn uniform_grid(duration: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(1);
    (0..=samples)
        .map(|k| if k == samples { duration } else { duration * k as f64 / samples as f64 })
        .collect()
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let sym = (m + m.adjoint()) * c(0.5);
    sym.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// ½ Σ |λ_i(ρ − σ)|.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let d = rho - sigma;
    let sym = (&d + d.adjoint()) * c(0.5);
    0.5 * sym.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

fn validate_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::Dimension("density matrix must be square".into()));
    }
    let herm = linalg::hermiticity_error(rho);
    if herm > 1e-10 {
        return Err(Error::NotHermitian { deviation: herm });
    }
    let tr = linalg::trace(rho);
    if (tr - c(1.0)).norm() > 1e-8 {
        return Err(Error::InvalidParameter(format!("initial state has trace {tr}")));
    }
    if min_eigenvalue(rho) < -1e-8 {
        return Err(Error::InvalidParameter("initial state is not positive semidefinite".into()));
    }
    Ok(())
}

/// Integrates dρ/dt = −i[H(t), ρ] + Σ_k Γ_k D[L_k]ρ on the vectorized state.
/// Trace is not renormalized; its drift is reported in the diagnostics.
pub fn integrate(
    rho0: &CMatrix,
    hamiltonian: Generator<'_>,
    channels: &[LindbladChannel],
    grid: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    validate_density(rho0)?;
    let n = rho0.nrows();
    let dissipator = linalg::dissipator_superop(channels, n)?;
    let solver = DormandPrince::with_tolerance(tol);
    let y0 = linalg::vectorize(rho0);

    let (ys, stats) = match hamiltonian {
        Generator::Constant(h) => {
            if h.nrows() != n {
                return Err(Error::Dimension(format!(
                    "hamiltonian is {}x{}, state is {n}x{n}",
                    h.nrows(),
                    h.ncols()
                )));
            }
            let herm = linalg::hermiticity_error(h);
            if herm > linalg::HERMITIAN_TOL * linalg::max_abs(h).max(1.0) {
                return Err(Error::NotHermitian { deviation: herm });
            }
            let l = linalg::hamiltonian_superop(h) + &dissipator;
            solver.solve(|_, y, dy| dy.gemv(c(1.0), &l, y, c(0.0)), &y0, grid)?
        }
        Generator::TimeDependent(hf) => solver.solve(
            |t, y, dy| {
                let rho = linalg::unvectorize(y, n);
                let h = hf(t);
                let comm = (&h * &rho - &rho * &h) * (-linalg::I);
                dy.copy_from(&linalg::vectorize(&comm));
                dy.gemv(c(1.0), &dissipator, y, c(1.0));
            },
            &y0,
            grid,
        )?,
    };
    Ok(assemble(grid, ys, n, stats))
}

fn assemble(grid: &[f64], ys: Vec<CVector>, n: usize, stats: Stats) -> Trajectory {
    let states: Vec<CMatrix> = ys.iter().map(|y| linalg::unvectorize(y, n)).collect();
    let mut d = Diagnostics {
        max_trace_drift: 0.0,
        max_hermiticity_error: 0.0,
        min_eigenvalue: f64::INFINITY,
        accepted_steps: stats.accepted,
        rejected_steps: stats.rejected,
    };
    for r in &states {
        d.max_trace_drift = d.max_trace_drift.max((linalg::trace(r) - c(1.0)).norm());
        d.max_hermiticity_error = d.max_hermiticity_error.max(linalg::hermiticity_error(r));
        d.min_eigenvalue = d.min_eigenvalue.min(min_eigenvalue(r));
    }
    Trajectory {
        times: grid.to_vec(),
        states,
        diagnostics: d,
    }
}

/// F = Tr[ρ_id ρ_re].
pub fn state_fidelity(rho_id: &CMatrix, rho_re: &CMatrix) -> Result<f64> {
    if rho_id.shape() != rho_re.shape() {
        return Err(Error::Dimension(format!(
            "fidelity between {:?} and {:?} states",
            rho_id.shape(),
            rho_re.shape()
        )));
    }
    Ok(linalg::trace(&(rho_id * rho_re)).re)
}
