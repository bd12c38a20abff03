//! Single triple-quantum-dot physics: position and even–odd Hamiltonians,
//! the operating-point eigensystem, sweet-spot slopes, dipole matrix
//! elements, and the microwave-driven effective qubit.
//!
//! Energies are angular frequencies (rad/s) with ħ = 1. The position basis is
//! (|100⟩, |010⟩, |001⟩); the even–odd basis is (|E⟩, |C⟩, |L⟩) with
//! |E⟩ = (|100⟩+|001⟩)/√2, |C⟩ = |010⟩, |L⟩ = (|100⟩−|001⟩)/√2.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::ode::DormandPrince;

/// Default lower bound on ε̄_q / t_p for the operating point.
pub const DEFAULT_OPERATING_RATIO: f64 = 10.0;

/// The controls of one TQD plus quasi-static noise offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TqdParams {
    pub eps_d_mean: f64,
    pub eps_q_mean: f64,
    pub t12: f64,
    pub t23: f64,
    #[serde(default)]
    pub d_eps_d: f64,
    #[serde(default)]
    pub d_eps_q: f64,
    /// Tunnelling fluctuations, zero unless a sensitivity study sets them.
    #[serde(default)]
    pub d_t_p: f64,
    #[serde(default)]
    pub d_t_m: f64,
}

impl Default for TqdParams {
    /// t_p/2π = 2 GHz, ε̄_q/2π = 20 GHz, symmetric tunnelling.
    fn default() -> Self {
        Self::operating_point(2.0 * PI * 2e9, 2.0 * PI * 20e9).expect("default operating point")
    }
}

impl TqdParams {
    /// Symmetric operating point ε̄_d = 0, t_m = 0 with the default ratio check.
    pub fn operating_point(t_p: f64, eps_q_mean: f64) -> Result<Self> {
        Self::operating_point_with_ratio(t_p, eps_q_mean, DEFAULT_OPERATING_RATIO)
    }

    pub fn operating_point_with_ratio(t_p: f64, eps_q_mean: f64, min_ratio: f64) -> Result<Self> {
        if !(t_p > 0.0) {
            return Err(Error::InvalidParameter(format!("t_p must be positive, got {t_p}")));
        }
        if eps_q_mean / t_p < min_ratio {
            return Err(Error::InvalidParameter(format!(
                "operating point needs eps_q/t_p >= {min_ratio}, got {}",
                eps_q_mean / t_p
            )));
        }
        Ok(Self::from_tp_tm(0.0, eps_q_mean, t_p, 0.0))
    }

    /// Builds parameters from the symmetric/antisymmetric tunnelling combinations.
    pub fn from_tp_tm(eps_d_mean: f64, eps_q_mean: f64, t_p: f64, t_m: f64) -> Self {
        Self {
            eps_d_mean,
            eps_q_mean,
            t12: (t_p + t_m) * FRAC_1_SQRT_2,
            t23: (t_p - t_m) * FRAC_1_SQRT_2,
            d_eps_d: 0.0,
            d_eps_q: 0.0,
            d_t_p: 0.0,
            d_t_m: 0.0,
        }
    }

    pub fn with_noise(mut self, d_eps_d: f64, d_eps_q: f64) -> Self {
        self.d_eps_d = d_eps_d;
        self.d_eps_q = d_eps_q;
        self
    }

    /// t_p = (t₁₂ + t₂₃)/√2 + δt_p.
    pub fn t_p(&self) -> f64 {
        (self.t12 + self.t23) * FRAC_1_SQRT_2 + self.d_t_p
    }

    /// t_m = (t₁₂ − t₂₃)/√2 + δt_m.
    pub fn t_m(&self) -> f64 {
        (self.t12 - self.t23) * FRAC_1_SQRT_2 + self.d_t_m
    }

    /// Effective t₁₂ and t₂₃ including the tunnelling fluctuations.
    fn tunnellings(&self) -> (f64, f64) {
        (
            self.t12 + (self.d_t_p + self.d_t_m) * FRAC_1_SQRT_2,
            self.t23 + (self.d_t_p - self.d_t_m) * FRAC_1_SQRT_2,
        )
    }

    pub fn eps_d(&self) -> f64 {
        self.eps_d_mean + self.d_eps_d
    }

    pub fn eps_q(&self) -> f64 {
        self.eps_q_mean + self.d_eps_q
    }
}

/// Hamiltonian in the position basis.
pub fn h_position(p: &TqdParams) -> CMatrix {
    let (ed, eq) = (p.eps_d(), p.eps_q());
    let (t12, t23) = p.tunnellings();
    linalg::real_matrix(3, &[ed, t12, 0.0, t12, eq, t23, 0.0, t23, -ed])
}

/// Columns are |E⟩, |C⟩, |L⟩ written in the position basis.
pub fn even_odd_basis() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    linalg::real_matrix(3, &[s, 0.0, s, 0.0, 1.0, 0.0, s, 0.0, -s])
}

/// W† H W with W from [`even_odd_basis`].
pub fn to_even_odd(h_pos: &CMatrix) -> CMatrix {
    let w = even_odd_basis();
    w.adjoint() * h_pos * w
}

/// Even–odd Hamiltonian [[0, t_p, ε_d], [t_p, ε_q, t_m], [ε_d, t_m, 0]].
pub fn h_even_odd(p: &TqdParams) -> CMatrix {
    let (ed, eq, tp, tm) = (p.eps_d(), p.eps_q(), p.t_p(), p.t_m());
    linalg::real_matrix(3, &[0.0, tp, ed, tp, eq, tm, ed, tm, 0.0])
}

/// Eigenvalues and eigenvectors of the three lowest TQD levels.
#[derive(Debug, Clone)]
pub struct TqdEigensystem {
    pub e_g: f64,
    pub e_e: f64,
    pub e_f: f64,
    /// Mixing angle with tan 2θ = 2t_p/ε̄_q (operating point only; NaN otherwise).
    pub theta: f64,
    /// Columns |g⟩, |e⟩, |f⟩ in the even–odd basis.
    pub vectors: CMatrix,
}

impl TqdEigensystem {
    pub fn omega_ge(&self) -> f64 {
        self.e_e - self.e_g
    }

    pub fn omega_gf(&self) -> f64 {
        self.e_f - self.e_g
    }

    pub fn omega_ef(&self) -> f64 {
        self.e_f - self.e_e
    }

    pub fn state(&self, n: Level) -> CVector {
        self.vectors.column(n as usize).into_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    G = 0,
    E = 1,
    F = 2,
}

/// Closed-form eigensystem at ε̄_d = t_m = 0.
///
/// θ = ½·atan2(2t_p, ε̄_q); the degenerate point t_p = ε̄_q = 0 returns θ = 0.
pub fn eigensystem_analytic(t_p: f64, eps_q: f64) -> TqdEigensystem {
    let root = (4.0 * t_p * t_p + eps_q * eps_q).sqrt();
    let theta = 0.5 * (2.0 * t_p).atan2(eps_q);
    let (s, co) = theta.sin_cos();
    let vectors = linalg::real_matrix(3, &[co, 0.0, s, -s, 0.0, co, 0.0, 1.0, 0.0]);
    TqdEigensystem {
        e_g: (eps_q - root) / 2.0,
        e_e: 0.0,
        e_f: (eps_q + root) / 2.0,
        theta,
        vectors,
    }
}

/// Eigensystem of the even–odd Hamiltonian by direct diagonalization.
pub fn eigensystem_numeric(p: &TqdParams) -> Result<TqdEigensystem> {
    let eig = linalg::eig_hermitian(&h_even_odd(p))?;
    let at_operating_point = p.eps_d() == 0.0 && p.t_m() == 0.0;
    Ok(TqdEigensystem {
        e_g: eig.values[0],
        e_e: eig.values[1],
        e_f: eig.values[2],
        theta: if at_operating_point {
            0.5 * (2.0 * p.t_p()).atan2(p.eps_q())
        } else {
            f64::NAN
        },
        vectors: eig.vectors,
    })
}

/// Exact qubit splitting E_e − E_g including the noise offsets.
pub fn omega_ge_exact(p: &TqdParams) -> Result<f64> {
    let e = linalg::eig_hermitian(&h_even_odd(p))?;
    Ok(e.values[1] - e.values[0])
}

/// First-order expansion of ω_ge in the detuning fluctuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationExpansion {
    /// Noise-free splitting.
    pub omega0: f64,
    /// Coefficient of δε_d.
    pub dipolar_slope: f64,
    /// Coefficient of δε_q.
    pub quadrupolar_slope: f64,
    /// omega0 + dipolar_slope·δε_d + quadrupolar_slope·δε_q.
    pub value: f64,
}

pub fn excitation_energy_expansion(
    t_p: f64,
    t_m: f64,
    eps_q: f64,
    d_eps_d: f64,
    d_eps_q: f64,
) -> ExcitationExpansion {
    let t2 = t_p * t_p + t_m * t_m;
    let root = (4.0 * t2 + eps_q * eps_q).sqrt();
    let omega0 = 0.5 * (root - eps_q);
    let dipolar_slope = if t2 > 0.0 {
        -t_p * t_m * (3.0 + eps_q / root) / t2
    } else {
        0.0
    };
    let quadrupolar_slope = if root > 0.0 { 0.5 * (eps_q / root - 1.0) } else { -0.5 };
    ExcitationExpansion {
        omega0,
        dipolar_slope,
        quadrupolar_slope,
        value: omega0 + dipolar_slope * d_eps_d + quadrupolar_slope * d_eps_q,
    }
}

/// Dimensionless slopes ∂ω_ge/∂ε_d and ∂ω_ge/∂ε_q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweetSpotSlopes {
    pub d_eps_d: f64,
    pub d_eps_q: f64,
    /// |D(h) − D(h/2)| for each slope, a truncation-error estimate.
    pub richardson_gap: (f64, f64),
    pub step: f64,
}

/// Central-difference slopes of the exact ω_ge, Richardson-extrapolated from
/// steps h and h/2 with h = max(t_p·1e-5, 2π·1 kHz).
pub fn sweet_spot_derivatives(p: &TqdParams) -> Result<SweetSpotSlopes> {
    let h = (p.t_p().abs() * 1e-5).max(2.0 * PI * 1e3);
    let central = |shift: &dyn Fn(TqdParams, f64) -> TqdParams, step: f64| -> Result<f64> {
        let up = omega_ge_exact(&shift(*p, step))?;
        let down = omega_ge_exact(&shift(*p, -step))?;
        Ok((up - down) / (2.0 * step))
    };
    let shift_d = |mut q: TqdParams, s: f64| {
        q.d_eps_d += s;
        q
    };
    let shift_q = |mut q: TqdParams, s: f64| {
        q.d_eps_q += s;
        q
    };
    let (d1, d2) = (central(&shift_d, h)?, central(&shift_d, h / 2.0)?);
    let (q1, q2) = (central(&shift_q, h)?, central(&shift_q, h / 2.0)?);
    Ok(SweetSpotSlopes {
        d_eps_d: (4.0 * d2 - d1) / 3.0,
        d_eps_q: (4.0 * q2 - q1) / 3.0,
        richardson_gap: ((d1 - d2).abs(), (q1 - q2).abs()),
        step: h,
    })
}

/// Dipole matrix elements in units of e·w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleElements {
    pub d_ge: f64,
    pub d_gf: f64,
    pub d_ef: f64,
    pub d_gg: f64,
    pub d_ee: f64,
    pub d_ff: f64,
}

/// Dipole operator (|100⟩⟨100| − |001⟩⟨001|) in the even–odd basis.
pub fn dipole_even_odd() -> CMatrix {
    to_even_odd(&linalg::real_matrix(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]))
}

/// ⟨m|d|n⟩/(e·w) in the eigenbasis. The position-basis dipole is
/// e·w·diag(1, 0, −1); at the operating point d_ge = cos θ.
pub fn dipole_matrix_elements(eig: &TqdEigensystem) -> DipoleElements {
    let d = dipole_even_odd();
    let v = &eig.vectors;
    let dm = v.adjoint() * d * v;
    let re = |i: usize, j: usize| dm[(i, j)].re;
    DipoleElements {
        d_ge: re(0, 1),
        d_gf: re(0, 2),
        d_ef: re(1, 2),
        d_gg: re(0, 0),
        d_ee: re(1, 1),
        d_ff: re(2, 2),
    }
}

/// Envelope of the microwave drive on the dipolar detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeShape {
    Square,
    RaisedCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub shape: EnvelopeShape,
    /// Peak amplitude of ε(t), rad/s.
    pub amplitude: f64,
    pub duration: f64,
    /// Carrier ω₀, rad/s.
    pub carrier: f64,
    pub phase: f64,
}

impl DriveParams {
    /// ε(t); zero outside [0, duration].
    pub fn envelope(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        match self.shape {
            EnvelopeShape::Square => self.amplitude,
            EnvelopeShape::RaisedCosine => {
                0.5 * self.amplitude * (1.0 - (2.0 * PI * t / self.duration).cos())
            }
        }
    }

    /// ∫ε dt over the pulse.
    pub fn area(&self) -> f64 {
        match self.shape {
            EnvelopeShape::Square => self.amplitude * self.duration,
            EnvelopeShape::RaisedCosine => 0.5 * self.amplitude * self.duration,
        }
    }

    /// Square or raised-cosine pulse whose effective (cos θ-weighted) area is π.
    pub fn pi_pulse(shape: EnvelopeShape, amplitude: f64, eig: &TqdEigensystem, phase: f64) -> Self {
        let weight = eig.theta.cos();
        let duration = match shape {
            EnvelopeShape::Square => PI / (amplitude * weight),
            EnvelopeShape::RaisedCosine => 2.0 * PI / (amplitude * weight),
        };
        Self {
            shape,
            amplitude,
            duration,
            carrier: eig.omega_ge(),
            phase,
        }
    }

    pub fn exceeds_weak_drive(&self, t_p: f64) -> bool {
        self.amplitude > t_p / 10.0
    }
}

/// Interaction-picture drive Hamiltonian in the (|g⟩, |e⟩, |f⟩) eigenbasis
/// after the rotating-wave approximation.
#[derive(Debug, Clone)]
pub struct EffectiveDrive {
    pub hamiltonian: CMatrix,
    /// Set when the drive is within a factor 10 of a neglected frequency, or
    /// when the amplitude exceeds t_p/10.
    pub rwa_warning: bool,
}

impl EffectiveDrive {
    /// The (g, e) block.
    pub fn qubit_block(&self) -> CMatrix {
        self.hamiltonian.view((0, 0), (2, 2)).into_owned()
    }
}

/// Evaluates the RWA drive matrix at time `t`, with the quasi-static noise
/// offsets taken from `noise`.
pub fn effective_drive_hamiltonian(
    drive: &DriveParams,
    eig: &TqdEigensystem,
    t_p: f64,
    noise: (f64, f64),
    t: f64,
) -> EffectiveDrive {
    let (d_eps_d, d_eps_q) = noise;
    let (s, co) = eig.theta.sin_cos();
    let eps = drive.envelope(t);
    let coupling = (C64::from_polar(eps / 2.0, drive.phase) + d_eps_d) * co;
    let mut h = linalg::zeros(3);
    h[(0, 0)] = c(d_eps_q * s * s);
    h[(0, 1)] = coupling;
    h[(1, 0)] = coupling.conj();
    h[(2, 2)] = c(d_eps_q * co * co);

    let gap = (eig.omega_ef() - drive.carrier)
        .abs()
        .min((eig.omega_ge() + drive.carrier).abs());
    let strongest = drive.amplitude.max(d_eps_d.abs()).max(d_eps_q.abs());
    EffectiveDrive {
        hamiltonian: h,
        rwa_warning: 10.0 * strongest > gap || drive.exceeds_weak_drive(t_p),
    }
}

/// Lab-frame H₀ + H' + H_m(t) in the eigenbasis of the noise-free operating point.
pub fn lab_drive_hamiltonian(
    drive: &DriveParams,
    eig: &TqdEigensystem,
    noise: (f64, f64),
    t: f64,
) -> CMatrix {
    let w = &eig.vectors;
    let c_proj = linalg::projector(3, 1);
    let el = linalg::ket_bra(3, 0, 2) + linalg::ket_bra(3, 2, 0);
    let h0 = CMatrix::from_diagonal(&CVector::from_vec(vec![c(eig.e_g), c(eig.e_e), c(eig.e_f)]));
    let field = drive.envelope(t) * (drive.carrier * t + drive.phase).cos();
    let perturbation = c_proj * c(noise.1) + el * c(noise.0 + field);
    h0 + w.adjoint() * perturbation * w
}

/// Propagates a pure state under the lab-frame drive for the pulse duration.
/// Returns the final state in the eigenbasis.
pub fn propagate_lab_frame(
    drive: &DriveParams,
    eig: &TqdEigensystem,
    noise: (f64, f64),
    psi0: &CVector,
    tol: f64,
) -> Result<CVector> {
    let solver = DormandPrince::with_tolerance(tol);
    let (states, _) = solver.solve(
        |t, psi, out| {
            let h = lab_drive_hamiltonian(drive, eig, noise, t);
            out.copy_from(&((h * psi) * C64::new(0.0, -1.0)));
        },
        psi0,
        &[0.0, drive.duration],
    )?;
    Ok(states.into_iter().last().unwrap_or_else(|| psi0.clone()))
}

/// One row of the operating-point sweep: energies and even–odd populations.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationRow {
    pub eps_q: f64,
    pub energies: [f64; 3],
    /// populations[n][b] = |⟨b|ψ_n⟩|² with n ∈ {g,e,f}, b ∈ {E,C,L}.
    pub populations: [[f64; 3]; 3],
}

/// Populations of the three eigenstates on the given ε_q grid at ε̄_d = t_m = 0.
pub fn eigenstate_populations(t_p: f64, eps_q_grid: &[f64]) -> Result<Vec<PopulationRow>> {
    eps_q_grid
        .iter()
        .map(|&eq| {
            let p = TqdParams::from_tp_tm(0.0, eq, t_p, 0.0);
            let eig = eigensystem_numeric(&p)?;
            let mut populations = [[0.0; 3]; 3];
            for (n, row) in populations.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate() {
                    *cell = eig.vectors[(b, n)].norm_sqr();
                }
            }
            Ok(PopulationRow {
                eps_q: eq,
                energies: [eig.e_g, eig.e_e, eig.e_f],
                populations,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const GHZ: f64 = 2.0 * PI * 1e9;

    #[test]
    fn position_hamiltonian_transcribes_entries() {
        let p = TqdParams {
            eps_d_mean: 1.0 * GHZ,
            eps_q_mean: 2.0 * GHZ,
            t12: 3.0 * GHZ,
            t23: 4.0 * GHZ,
            d_eps_d: 0.0,
            d_eps_q: 0.0,
            d_t_p: 0.0,
            d_t_m: 0.0,
        };
        let h = h_position(&p);
        let expected = [1.0, 3.0, 0.0, 3.0, 2.0, 4.0, 0.0, 4.0, -1.0];
        for (k, &x) in expected.iter().enumerate() {
            assert_eq!(h[(k / 3, k % 3)], c(x * GHZ));
        }
        assert!((linalg::trace(&h).re - p.eps_q()).abs() < 1e-15 * p.eps_q());
    }

    #[test]
    fn zero_params_give_zero_matrix() {
        let p = TqdParams::from_tp_tm(0.0, 0.0, 0.0, 0.0);
        assert_eq!(h_position(&p), linalg::zeros(3));
    }

    #[test]
    fn even_odd_transform_matches_closed_form() {
        let p = TqdParams {
            eps_d_mean: 0.3 * GHZ,
            eps_q_mean: 7.0 * GHZ,
            t12: 1.1 * GHZ,
            t23: 0.8 * GHZ,
            d_eps_d: 0.01 * GHZ,
            d_eps_q: -0.02 * GHZ,
            d_t_p: 0.0,
            d_t_m: 0.0,
        };
        let diff = to_even_odd(&h_position(&p)) - h_even_odd(&p);
        assert!(linalg::max_abs(&diff) < 1e-14 * 7.0 * GHZ, "{diff}");
    }

    #[test]
    fn equal_tunnelling_gives_tp_sqrt2_t() {
        let t = 2.0 * GHZ;
        let p = TqdParams {
            eps_d_mean: 0.0,
            eps_q_mean: 20.0 * GHZ,
            t12: t,
            t23: t,
            d_eps_d: 0.0,
            d_eps_q: 0.0,
            d_t_p: 0.0,
            d_t_m: 0.0,
        };
        let h = to_even_odd(&h_position(&p));
        let tp_expected = 2.0 * std::f64::consts::SQRT_2 * GHZ;
        assert!((h[(0, 1)].re - tp_expected).abs() < 1e-12 * tp_expected);
        assert!(h[(1, 2)].norm() < 1e-6);
    }

    #[test]
    fn operating_point_enforces_ratio() {
        assert!(TqdParams::operating_point(GHZ, 5.0 * GHZ).is_err());
        let p = TqdParams::operating_point(GHZ, 12.0 * GHZ).unwrap();
        assert_eq!(p.t_m(), 0.0);
        assert!((p.t_p() - GHZ).abs() < 1e-6);
    }

    #[test]
    fn analytic_eigensystem_limits() {
        let e = eigensystem_analytic(GHZ, 1000.0 * GHZ);
        assert_eq!(e.e_e, 0.0);
        assert!(e.theta < 1e-3);
        assert!(e.state(Level::G)[0].re > 0.999_999);
        assert!(e.state(Level::F)[1].re > 0.999_999);

        let degenerate = eigensystem_analytic(0.0, 0.0);
        assert_eq!(degenerate.theta, 0.0);
    }

    #[test]
    fn eq_zero_gives_equal_weights() {
        let rows = eigenstate_populations(GHZ, &[0.0]).unwrap();
        let g = rows[0].populations[0];
        assert!((g[0] - 0.5).abs() < 1e-12 && (g[1] - 0.5).abs() < 1e-12);
        assert!((rows[0].energies[0] + GHZ).abs() < 1e-6);
        assert!(rows[0].energies[1].abs() < 1e-6);
        assert!((rows[0].energies[2] - GHZ).abs() < 1e-6);
    }

    #[test]
    fn populations_sum_to_one() {
        let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5 * GHZ).collect();
        for row in eigenstate_populations(GHZ, &grid).unwrap() {
            for n in 0..3 {
                assert!((row.populations[n].iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
        let far = eigenstate_populations(GHZ, &[20.0 * GHZ]).unwrap();
        assert!(far[0].populations[0][0] > 0.99);
        assert!(far[0].populations[1][2] > 0.99);
    }

    #[test]
    fn expansion_noise_free_term() {
        let (tp, tm, eq) = (2.0 * GHZ, 0.1 * GHZ, 20.0 * GHZ);
        let x = excitation_energy_expansion(tp, tm, eq, 0.0, 0.0);
        let root = (4.0 * (tp * tp + tm * tm) + eq * eq).sqrt();
        assert_eq!(x.value, 0.5 * (root - eq));
        assert_eq!(excitation_energy_expansion(tp, 0.0, eq, 1e6, 0.0).dipolar_slope, 0.0);
    }

    #[test]
    fn dipole_at_zero_mixing() {
        let e = eigensystem_analytic(0.0, 10.0 * GHZ);
        let d = dipole_matrix_elements(&e);
        assert!((d.d_ge - 1.0).abs() < 1e-15);
        assert!(d.d_gf.abs() < 1e-15 && d.d_ef.abs() < 1e-15);
    }

    #[test]
    fn dipole_diagonal_vanishes() {
        for k in 0..20 {
            let e = eigensystem_analytic(GHZ, (k as f64 - 5.0) * GHZ);
            let d = dipole_matrix_elements(&e);
            assert!(d.d_gg.abs() < 1e-15 && d.d_ee.abs() < 1e-15);
            assert!((d.d_ge - e.theta.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn drive_phase_conventions() {
        let eig = eigensystem_analytic(2.0 * GHZ, 20.0 * GHZ);
        let amp = 0.01 * GHZ;
        let mut drive = DriveParams {
            shape: EnvelopeShape::Square,
            amplitude: amp,
            duration: 1e-6,
            carrier: eig.omega_ge(),
            phase: 0.0,
        };
        let cos = eig.theta.cos();
        let block = effective_drive_hamiltonian(&drive, &eig, 2.0 * GHZ, (0.0, 0.0), 0.0).qubit_block();
        let expected = linalg::sigma_x() * c(amp / 2.0 * cos);
        assert!(linalg::max_abs(&(block - expected)) < 1e-6 * amp);

        drive.phase = PI / 2.0;
        let block = effective_drive_hamiltonian(&drive, &eig, 2.0 * GHZ, (0.0, 0.0), 0.0).qubit_block();
        let expected = linalg::sigma_y() * c(-amp / 2.0 * cos);
        assert!(linalg::max_abs(&(block - expected)) < 1e-6 * amp);
    }

    #[test]
    fn strong_drive_raises_rwa_warning() {
        let eig = eigensystem_analytic(2.0 * GHZ, 20.0 * GHZ);
        let drive = DriveParams {
            shape: EnvelopeShape::Square,
            amplitude: 0.5 * GHZ,
            duration: 1e-9,
            carrier: eig.omega_ge(),
            phase: 0.0,
        };
        assert!(effective_drive_hamiltonian(&drive, &eig, 2.0 * GHZ, (0.0, 0.0), 0.0).rwa_warning);
    }

    #[test]
    fn raised_cosine_area() {
        let d = DriveParams {
            shape: EnvelopeShape::RaisedCosine,
            amplitude: 3.0,
            duration: 2.0,
            carrier: 0.0,
            phase: 0.0,
        };
        // Midpoint rule on the envelope.
        let n = 20_000;
        let num: f64 = (0..n).map(|k| d.envelope((k as f64 + 0.5) * 2.0 / n as f64) * 2.0 / n as f64).sum();
        assert!((num - d.area()).abs() < 1e-6);
    }
}
