//! Dense complex linear algebra for small multi-register Hilbert spaces.
//!
//! Everything here works on explicit amplitude vectors and matrices. Register
//! layouts are ordered, with the first register as the most significant digit
//! of the composite basis index.

mod density;
mod layout;
mod schmidt;
mod state;
mod unitary;

pub use density::{partial_trace, trace_distance, DensityMatrix};
pub use layout::{Layout, Register};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use state::{tensor_product, StateVector};
pub use unitary::{orthonormalize, rotation_from_bases, UnitaryMatrix};

pub use num_complex::Complex64;

pub type CMatrix = nalgebra::DMatrix<Complex64>;
pub type CVector = nalgebra::DVector<Complex64>;

/// Norm tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-10;
/// Max-entry tolerance on `U^dagger U - I`.
pub const UNITARY_TOL: f64 = 1e-12;
/// Schmidt coefficients below this are dropped.
pub const ZERO_COEFF: f64 = 1e-12;
/// Orthonormality tolerance for input vector sets.
pub const ORTHO_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entry modulus of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Rotates `v` so that its first component with modulus above the zero
/// threshold is real and non-negative. Returns the phase that was removed.
pub fn canonical_phase(v: &mut CVector) -> Complex64 {
    match v.iter().find(|z| z.norm() > ZERO_COEFF) {
        Some(&z) => {
            let phase = z / z.norm();
            let undo = phase.conj();
            v.iter_mut().for_each(|x| *x *= undo);
            phase
        }
        None => ONE,
    }
}

/// Kronecker product of two vectors, `a` as the more significant factor.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}
