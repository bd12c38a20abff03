//! Dense complex linear algebra and open-system primitives.
//!
//! Operators are plain `nalgebra` matrices of `Complex64`. Composite spaces
//! always use the ordering qubit 1 ⊗ qubit 2 ⊗ oscillator, and every qubit
//! factor uses the basis (|g⟩, |e⟩).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance (relative to the largest entry) for treating a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

/// Real matrix from row-major data.
pub fn real_matrix(n: usize, rows: &[f64]) -> CMatrix {
    assert_eq!(rows.len(), n * n, "row data does not match dimension");
    CMatrix::from_row_iterator(n, n, rows.iter().map(|&x| c(x)))
}

/// |i⟩⟨j| on an `n`-dimensional space.
pub fn ket_bra(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(n);
    m[(i, j)] = ONE;
    m
}

pub fn projector(n: usize, i: usize) -> CMatrix {
    ket_bra(n, i, i)
}

pub fn basis_state(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = ONE;
    v
}

/// Density matrix |ψ⟩⟨ψ|.
pub fn pure_density(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

pub fn sigma_x() -> CMatrix {
    real_matrix(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

/// σ_z = |g⟩⟨g| − |e⟩⟨e|.
pub fn sigma_z() -> CMatrix {
    real_matrix(2, &[1.0, 0.0, 0.0, -1.0])
}

/// σ₋ = |g⟩⟨e|.
pub fn sigma_minus() -> CMatrix {
    ket_bra(2, 0, 1)
}

/// σ₊ = |e⟩⟨g|.
pub fn sigma_plus() -> CMatrix {
    ket_bra(2, 1, 0)
}

/// Harmonic-oscillator annihilation operator truncated to `levels` levels.
pub fn annihilation(levels: usize) -> CMatrix {
    let mut a = zeros(levels);
    for n in 1..levels {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    a
}

pub fn number_operator(levels: usize) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        levels,
        (0..levels).map(|n| c(n as f64)),
    ))
}

/// Kronecker product of square factors, left to right.
pub fn tensor(factors: &[&CMatrix]) -> Result<CMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Dimension("tensor of an empty factor list".into()))?;
    for (k, f) in factors.iter().enumerate() {
        if !f.is_square() {
            return Err(Error::Dimension(format!(
                "tensor factor {k} is {}x{}, expected square",
                f.nrows(),
                f.ncols()
            )));
        }
    }
    Ok(rest.iter().fold((*first).clone(), |acc, f| acc.kronecker(f)))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// max |A − A†|.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// max |U†U − I|.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn is_hermitian(m: &CMatrix) -> bool {
    m.is_square() && hermiticity_error(m) <= HERMITIAN_TOL * max_abs(m).max(f64::MIN_POSITIVE)
}

fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermiticity_error(m);
    if dev > HERMITIAN_TOL * max_abs(m).max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

fn ensure_same_dim(a: &CMatrix, b: &CMatrix, what: &str) -> Result<()> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Dimension(format!(
            "{what}: {}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(())
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector of `values[i]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// V Λ V†.
    pub fn reconstruct(&self) -> CMatrix {
        let lambda = CMatrix::from_diagonal(&CVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| c(x)),
        ));
        &self.vectors * lambda * self.vectors.adjoint()
    }
}

/// Rotates `v` so that its largest-magnitude component is real and positive.
pub fn fix_phase(v: &mut CVector) {
    let pivot = v
        .iter()
        .copied()
        .fold(ZERO, |best, z| if z.norm() > best.norm() + 1e-14 { z } else { best });
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn eig_hermitian(h: &CMatrix) -> Result<HermitianEigen> {
    ensure_hermitian(h)?;
    let n = h.nrows();
    let sym = (h + h.adjoint()) * c(0.5);
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut vectors = zeros(n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let mut v: CVector = eig.eigenvectors.column(src).into_owned();
        fix_phase(&mut v);
        vectors.set_column(dst, &v);
    }
    Ok(HermitianEigen { values, vectors })
}

/// exp(−iHt) for Hermitian H, via the spectral decomposition.
pub fn expm_unitary(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = eig_hermitian(h)?;
    Ok(propagator_from_eigen(&eig, t))
}

/// exp(−iHt) from a precomputed decomposition of H.
pub fn propagator_from_eigen(eig: &HermitianEigen, t: f64) -> CMatrix {
    let phases = CVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    );
    let v = &eig.vectors;
    v * CMatrix::from_diagonal(&phases) * v.adjoint()
}

/// A jump operator together with its rate (rad/s).
#[derive(Debug, Clone)]
pub struct LindbladChannel {
    pub label: String,
    pub operator: CMatrix,
    pub rate: f64,
}

impl LindbladChannel {
    pub fn new(label: impl Into<String>, operator: CMatrix, rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "channel rate must be finite and non-negative, got {rate}"
            )));
        }
        if !operator.is_square() {
            return Err(Error::Dimension("jump operator must be square".into()));
        }
        Ok(Self {
            label: label.into(),
            operator,
            rate,
        })
    }
}

/// D[L]ρ = (2LρL† − L†Lρ − ρL†L)/2.
pub fn dissipator(l: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    ensure_same_dim(l, rho, "dissipator")?;
    let ld = l.adjoint();
    let ldl = &ld * l;
    Ok((l * rho * &ld) - (&ldl * rho + rho * &ldl) * c(0.5))
}

/// −i[H, ρ] + Σ_k Γ_k D[L_k]ρ.
pub fn lindblad_rhs(rho: &CMatrix, h: &CMatrix, channels: &[LindbladChannel]) -> Result<CMatrix> {
    ensure_same_dim(h, rho, "lindblad_rhs hamiltonian")?;
    let mut out = commutator(h, rho) * (-I);
    for ch in channels {
        out += dissipator(&ch.operator, rho)? * c(ch.rate);
    }
    Ok(out)
}

/// Column-stacking vectorization, vec(ρ).
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Superoperator of −i[H, ·]: vec(−i(Hρ − ρH)) = −i(I⊗H − Hᵀ⊗I) vec(ρ).
pub fn hamiltonian_superop(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let id = identity(n);
    (id.kronecker(h) - h.transpose().kronecker(&id)) * (-I)
}

/// Superoperator of Σ_k Γ_k D[L_k].
pub fn dissipator_superop(channels: &[LindbladChannel], n: usize) -> Result<CMatrix> {
    let id = identity(n);
    let mut out = CMatrix::zeros(n * n, n * n);
    for ch in channels {
        let l = &ch.operator;
        if l.nrows() != n {
            return Err(Error::Dimension(format!(
                "channel '{}' acts on dimension {}, state has {n}",
                ch.label,
                l.nrows()
            )));
        }
        if ch.rate == 0.0 {
            continue;
        }
        let ldl = l.adjoint() * l;
        let term = l.conjugate().kronecker(l)
            - (id.kronecker(&ldl) + ldl.transpose().kronecker(&id)) * c(0.5);
        out += term * c(ch.rate);
    }
    Ok(out)
}

/// Full Liouvillian for a time-independent Hamiltonian.
pub fn liouvillian(h: &CMatrix, channels: &[LindbladChannel]) -> Result<CMatrix> {
    Ok(hamiltonian_superop(h) + dissipator_superop(channels, h.nrows())?)
}

/// ⟨ψ|A|ψ⟩.
pub fn expectation(psi: &CVector, a: &CMatrix) -> C64 {
    (psi.adjoint() * a * psi)[(0, 0)]
}
