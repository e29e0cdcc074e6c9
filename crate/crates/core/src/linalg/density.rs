use super::{max_abs, CMatrix, Layout, UnitaryMatrix, DENSITY_TOL, EIGEN_FLOOR, ZERO};
use crate::error::{Error, Result};
use nalgebra::SymmetricEigen;

/// Hermitian, positive-semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::check_shape(&entries)?;
        let min = hermitian_eigenvalues(&entries)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { entries })
    }

    /// `M M^dagger`, which is positive semidefinite by construction.
    pub(crate) fn from_gram(m: &CMatrix) -> Result<Self> {
        let mut entries = m * m.adjoint();
        // exact Hermitian symmetry; the product is only Hermitian to rounding
        let n = entries.nrows();
        for i in 0..n {
            entries[(i, i)].im = 0.0;
            for j in i + 1..n {
                entries[(j, i)] = entries[(i, j)].conj();
            }
        }
        Self::check_shape(&entries)?;
        Ok(Self { entries })
    }

    fn check_shape(entries: &CMatrix) -> Result<()> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidDensity(format!(
                "expected a non-empty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = max_abs(&(entries - entries.adjoint()));
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {herm:e})")));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        Ok(())
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in non-increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = hermitian_eigenvalues(&self.entries);
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// `U rho U^dagger`.
    pub fn conjugated(&self, u: &UnitaryMatrix) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: self.dim(),
            });
        }
        let m = u.entries() * &self.entries * u.entries().adjoint();
        Ok(Self { entries: m })
    }

    /// Max-entry distance to another operator of the same dimension.
    pub fn max_entry_distance(&self, other: &DensityMatrix) -> Result<f64> {
        same_dim(self, other)?;
        Ok(max_abs(&(&self.entries - &other.entries)))
    }
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// Reduced operator on the `keep` registers (in layout order).
pub fn partial_trace(rho: &DensityMatrix, layout: &Layout, keep: &[&str]) -> Result<DensityMatrix> {
    if layout.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: layout.dim(),
            right: rho.dim(),
        });
    }
    let kept = layout.restrict(keep)?;
    let traced = layout.complement(keep)?;
    let order: Vec<&str> = kept.names().chain(traced.names()).collect();
    let grouped = layout.reordered(&order)?;
    // map[grouped index] = original index
    let forward = layout.index_map(&grouped)?;
    let mut back = vec![0; forward.len()];
    for (orig, &g) in forward.iter().enumerate() {
        back[g] = orig;
    }
    let (dk, dt) = (kept.dim(), traced.dim());
    let mut out = CMatrix::from_element(dk, dk, ZERO);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                acc += rho.entries[(back[a * dt + t], back[b * dt + t])];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix { entries: out })
}

/// Half the trace norm of `r1 - r2`, clamped to `[0, 1]`.
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    same_dim(r1, r2)?;
    let diff = &r1.entries - &r2.entries;
    let d = 0.5 * hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}
