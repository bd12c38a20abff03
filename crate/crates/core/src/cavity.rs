//! Circuit-derived coupling strength and the two-qubit-plus-oscillator
//! Hamiltonians, including the dispersive reduction.
//!
//! Tensor order is qubit 1 ⊗ qubit 2 ⊗ oscillator. Each qubit uses
//! (|g⟩, |e⟩) with σ_z = |g⟩⟨g| − |e⟩⟨e|, so the free qubit term −(ω/2)σ_z
//! puts |e⟩ at +ω/2.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_63e-19;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_82e-34;

/// Dispersive runs below this Δ/g are flagged.
pub const DISPERSIVE_WARN_RATIO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitGeometry {
    /// Resonator (or transmon) angular frequency.
    pub omega_r: f64,
    /// Characteristic impedance, Ω.
    pub z0: f64,
    /// Capacitance division ratio C_c/(C_c + C_d).
    pub chi0: f64,
    /// Dot half-spacing, m.
    pub w: f64,
    /// Effective voltage distance, m.
    pub s: f64,
    /// Transmon anharmonicity (0 for a linear resonator).
    #[serde(default)]
    pub alpha: f64,
}

impl Default for CircuitGeometry {
    /// w = s/2, χ₀ = 0.28, Z₀ = 1 kΩ, ω_r/2π = 1.7 GHz.
    fn default() -> Self {
        Self {
            omega_r: 2.0 * PI * 1.7e9,
            z0: 1e3,
            chi0: 0.28,
            w: 50e-9,
            s: 100e-9,
            alpha: 0.0,
        }
    }
}

impl CircuitGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.chi0 > 0.0 && self.chi0 < 1.0) {
            return Err(Error::InvalidParameter(format!("chi0 must lie in (0, 1), got {}", self.chi0)));
        }
        if !(self.w > 0.0 && self.s > 0.0) {
            return Err(Error::InvalidParameter("w and s must be positive".into()));
        }
        if !(self.z0 > 0.0 && self.omega_r > 0.0) {
            return Err(Error::InvalidParameter("z0 and omega_r must be positive".into()));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// g₀ = (e·w·χ₀/s)·ω_r·√(Z₀/(πħ)), rad/s.
pub fn vacuum_rabi_g0(geom: &CircuitGeometry) -> Result<f64> {
    geom.validate()?;
    Ok(ELEMENTARY_CHARGE * geom.w * geom.chi0 / geom.s
        * geom.omega_r
        * (geom.z0 / (PI * HBAR)).sqrt())
}

/// g = g₀·cos θ.
pub fn effective_coupling(g0: f64, theta: f64) -> f64 {
    g0 * theta.cos()
}

/// Matrix elements of the oscillator lowering operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Ladder {
    /// ⟨n−1|a|n⟩ = √n.
    #[default]
    Harmonic,
    /// ⟨n−1|a|n⟩ = 1, the transmon treated as an equally coupled level chain.
    Uniform,
}

/// Form of the qubit–oscillator interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CouplingForm {
    /// g σ_x (a + a†), counter-rotating terms kept.
    #[default]
    Full,
    /// g (a†σ₋ + σ₊a).
    Rwa,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridSystem {
    /// Qubit angular frequencies ω⁽¹⁾, ω⁽²⁾.
    pub omega: [f64; 2],
    /// Couplings g⁽¹⁾, g⁽²⁾.
    pub g: [f64; 2],
    /// Oscillator frequency ω_r (or ω_tr).
    pub omega_osc: f64,
    /// Highest oscillator level kept.
    pub n_max: usize,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub ladder: Ladder,
    #[serde(default)]
    pub coupling: CouplingForm,
}

impl HybridSystem {
    /// Equal qubits detuned by `delta` from the oscillator.
    pub fn symmetric(omega_osc: f64, delta: f64, g: f64, n_max: usize) -> Self {
        Self {
            omega: [omega_osc + delta; 2],
            g: [g; 2],
            omega_osc,
            n_max,
            alpha: 0.0,
            ladder: Ladder::Harmonic,
            coupling: CouplingForm::Full,
        }
    }

    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        4 * self.levels()
    }

    /// Δ⁽ᵏ⁾ = ω⁽ᵏ⁾ − ω_r for k = 0, 1.
    pub fn detuning(&self, k: usize) -> f64 {
        self.omega[k] - self.omega_osc
    }

    /// Index of |q1, q2, n⟩ with q = 0 for g and 1 for e.
    pub fn index(&self, q1: usize, q2: usize, n: usize) -> usize {
        (2 * q1 + q2) * self.levels() + n
    }

    fn check_levels(&self, min: usize) -> Result<()> {
        if self.n_max < min {
            return Err(Error::InvalidParameter(format!(
                "oscillator truncation n_max = {} is below the required {min}",
                self.n_max
            )));
        }
        Ok(())
    }

    fn ladder_matrix(&self, ladder: Ladder) -> CMatrix {
        let n = self.levels();
        match ladder {
            Ladder::Harmonic => linalg::annihilation(n),
            Ladder::Uniform => {
                let mut a = linalg::zeros(n);
                for k in 1..n {
                    a[(k - 1, k)] = c(1.0);
                }
                a
            }
        }
    }

    fn embed_osc(&self, m: &CMatrix) -> CMatrix {
        let id2 = linalg::identity(2);
        id2.kronecker(&id2).kronecker(m)
    }

    /// Qubit operator `m` on qubit k (0 or 1), padded with identities.
    pub fn embed_qubit(&self, k: usize, m: &CMatrix) -> CMatrix {
        let id2 = linalg::identity(2);
        let ida = linalg::identity(self.levels());
        if k == 0 {
            m.kronecker(&id2).kronecker(&ida)
        } else {
            id2.kronecker(m).kronecker(&ida)
        }
    }

    /// Oscillator lowering operator on the full space with the configured ladder.
    pub fn lowering(&self) -> CMatrix {
        self.embed_osc(&self.ladder_matrix(self.ladder))
    }

    /// Projector |n⟩⟨n| on the oscillator, full space.
    pub fn oscillator_projector(&self, n: usize) -> CMatrix {
        self.embed_osc(&linalg::projector(self.levels(), n))
    }

    /// Total excitation number a†a + Σ_k |e⟩⟨e|⁽ᵏ⁾ (oscillator level counted as n).
    pub fn excitation_number(&self) -> CMatrix {
        let ee = linalg::projector(2, 1);
        self.embed_osc(&linalg::number_operator(self.levels()))
            + self.embed_qubit(0, &ee)
            + self.embed_qubit(1, &ee)
    }

    fn free_part(&self, alpha: f64) -> CMatrix {
        let n = self.levels();
        let osc = CMatrix::from_diagonal(&linalg::CVector::from_iterator(
            n,
            (0..n).map(|k| {
                let k = k as f64;
                c(k * self.omega_osc - 0.5 * k * (k - 1.0) * alpha)
            }),
        ));
        let sz = linalg::sigma_z();
        self.embed_osc(&osc)
            - self.embed_qubit(0, &sz) * c(self.omega[0] / 2.0)
            - self.embed_qubit(1, &sz) * c(self.omega[1] / 2.0)
    }

    fn interaction(&self, a: &CMatrix, form: CouplingForm) -> CMatrix {
        let mut v = linalg::zeros(self.dim());
        let ad = a.adjoint();
        for k in 0..2 {
            let term = match form {
                CouplingForm::Full => {
                    self.embed_qubit(k, &linalg::sigma_x()) * (a + &ad)
                }
                CouplingForm::Rwa => {
                    let sm = self.embed_qubit(k, &linalg::sigma_minus());
                    let x = &ad * &sm;
                    &x + x.adjoint()
                }
            };
            v += term * c(self.g[k]);
        }
        v
    }

    /// Hamiltonian with the configured ladder, anharmonicity and coupling form.
    pub fn hamiltonian(&self) -> Result<CMatrix> {
        self.check_levels(1)?;
        let a = self.lowering();
        Ok(self.free_part(self.alpha) + self.interaction(&a, self.coupling))
    }
}

/// ω_r a†a − Σ_k (ω⁽ᵏ⁾/2)σ_z⁽ᵏ⁾ + Σ_k g⁽ᵏ⁾σ_x⁽ᵏ⁾(a + a†) with a harmonic ladder.
pub fn tavis_cummings_hamiltonian(sys: &HybridSystem) -> Result<CMatrix> {
    sys.check_levels(1)?;
    if sys.alpha != 0.0 {
        return Err(Error::InvalidParameter(
            "the resonator model needs alpha = 0; use transmon_hamiltonian".into(),
        ));
    }
    let a = sys.embed_osc(&linalg::annihilation(sys.levels()));
    Ok(sys.free_part(0.0) + sys.interaction(&a, CouplingForm::Full))
}

/// Oscillator with level energies nω − n(n−1)α/2 and σ_x(a + a†) coupling,
/// using the system's ladder.
pub fn transmon_hamiltonian(sys: &HybridSystem) -> Result<CMatrix> {
    if !(sys.alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {}", sys.alpha)));
    }
    sys.check_levels(if sys.alpha > 0.0 { 2 } else { 1 })?;
    Ok(sys.free_part(sys.alpha) + sys.interaction(&sys.lowering(), CouplingForm::Full))
}

/// Σ_k g⁽ᵏ⁾(a†σ₋⁽ᵏ⁾ + h.c.) on oscillator levels {0, 1} (8×8).
pub fn rwa_interaction(g: [f64; 2]) -> CMatrix {
    let sys = HybridSystem {
        omega: [0.0; 2],
        g,
        omega_osc: 0.0,
        n_max: 1,
        alpha: 0.0,
        ladder: Ladder::Harmonic,
        coupling: CouplingForm::Rwa,
    };
    sys.interaction(&sys.lowering(), CouplingForm::Rwa)
}

/// Excitation-number subspaces of the 8-dim {0,1}-level space.
pub mod subspace {
    /// (e,g,0), (g,e,0), (g,g,1).
    pub const S1: [usize; 3] = [4, 2, 1];
    /// (e,e,0), (e,g,1), (g,e,1).
    pub const S2: [usize; 3] = [6, 5, 3];
    /// (g,g,0).
    pub const S3: [usize; 1] = [0];
    /// (e,e,1).
    pub const S4: [usize; 1] = [7];
}

/// Extracts the block of `m` on the given basis indices.
pub fn block(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Result of the dispersive reduction.
#[derive(Debug, Clone)]
pub struct DispersiveModel {
    /// χ = g⁽¹⁾g⁽²⁾(Δ⁽¹⁾+Δ⁽²⁾)/(2Δ⁽¹⁾Δ⁽²⁾).
    pub chi: f64,
    /// ω̃⁽ᵏ⁾ = −ω⁽ᵏ⁾ + (g⁽ᵏ⁾)²/Δ⁽ᵏ⁾. The sign flip relative to the −(ω/2)σ_z
    /// convention of the full model makes (ω̃/2)σ_z the same dressed term.
    pub omega_tilde: [f64; 2],
    /// (g⁽ᵏ⁾)²/Δ⁽ᵏ⁾.
    pub stark: [f64; 2],
    /// Zero-photon qubit Hamiltonian Σ(ω̃/2)σ_z − χ(σ₊σ₋ + σ₋σ₊), 4×4.
    pub h_tilde: CMatrix,
    /// Set when min |Δ|/g falls below 5.
    pub weak_dispersion: bool,
}

impl DispersiveModel {
    /// iSWAP time π/(2χ).
    pub fn iswap_time(&self) -> f64 {
        PI / (2.0 * self.chi.abs())
    }
}

/// −χ(σ₊⁽¹⁾σ₋⁽²⁾ + σ₋⁽¹⁾σ₊⁽²⁾) on the two qubits.
pub fn exchange_hamiltonian(chi: f64) -> CMatrix {
    let x = linalg::sigma_plus().kronecker(&linalg::sigma_minus());
    (&x + x.adjoint()) * c(-chi)
}

pub fn schrieffer_wolff_reduce(sys: &HybridSystem) -> Result<DispersiveModel> {
    let d = [sys.detuning(0), sys.detuning(1)];
    for (k, dk) in d.iter().enumerate() {
        if *dk == 0.0 {
            return Err(Error::SingularDetuning { qubit: k + 1 });
        }
    }
    let chi = sys.g[0] * sys.g[1] * (d[0] + d[1]) / (2.0 * d[0] * d[1]);
    let stark = [sys.g[0].powi(2) / d[0], sys.g[1].powi(2) / d[1]];
    let omega_tilde = [-sys.omega[0] + stark[0], -sys.omega[1] + stark[1]];
    let sz = linalg::sigma_z();
    let id2 = linalg::identity(2);
    let h_tilde = sz.kronecker(&id2) * c(omega_tilde[0] / 2.0)
        + id2.kronecker(&sz) * c(omega_tilde[1] / 2.0)
        + exchange_hamiltonian(chi);
    let ratio = d
        .iter()
        .zip(sys.g.iter())
        .filter(|(_, g)| **g != 0.0)
        .map(|(dk, g)| (dk / g).abs())
        .fold(f64::INFINITY, f64::min);
    Ok(DispersiveModel {
        chi,
        omega_tilde,
        stark,
        h_tilde,
        weak_dispersion: ratio < DISPERSIVE_WARN_RATIO,
    })
}

/// S = Σ_k (g⁽ᵏ⁾/Δ⁽ᵏ⁾)(a†σ₋⁽ᵏ⁾ − σ₊⁽ᵏ⁾a), harmonic ladder.
pub fn sw_generator(sys: &HybridSystem) -> Result<CMatrix> {
    let a = sys.embed_osc(&linalg::annihilation(sys.levels()));
    let ad = a.adjoint();
    let mut s = linalg::zeros(sys.dim());
    for k in 0..2 {
        let dk = sys.detuning(k);
        if dk == 0.0 {
            return Err(Error::SingularDetuning { qubit: k + 1 });
        }
        let sm = sys.embed_qubit(k, &linalg::sigma_minus());
        let x = &ad * &sm;
        s += (&x - x.adjoint()) * c(sys.g[k] / dk);
    }
    Ok(s)
}

/// V = Σ_k g⁽ᵏ⁾σ_x⁽ᵏ⁾(a + a†) with the given coupling form, harmonic ladder.
pub fn dipole_interaction(sys: &HybridSystem, form: CouplingForm) -> CMatrix {
    let a = sys.embed_osc(&linalg::annihilation(sys.levels()));
    sys.interaction(&a, form)
}
