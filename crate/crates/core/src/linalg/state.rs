use super::{kron_vec, CMatrix, CVector, DensityMatrix, Layout, UnitaryMatrix, NORM_TOL, ONE};
use crate::error::{Error, Result};

/// A normalized pure state over a register layout.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    layout: Layout,
}

impl StateVector {
    pub fn new(amplitudes: CVector, layout: Layout) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::Layout(format!(
                "{} amplitudes for a layout of dimension {}",
                amplitudes.len(),
                layout.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, layout })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector, layout: Layout) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(amplitudes.unscale(norm), layout)
    }

    /// Computational basis state with the given per-register digits.
    pub fn basis(layout: Layout, digits: &[usize]) -> Result<Self> {
        let idx = layout.index(digits)?;
        let mut amplitudes = CVector::zeros(layout.dim());
        amplitudes[idx] = ONE;
        Ok(Self { amplitudes, layout })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn into_parts(self) -> (CVector, Layout) {
        (self.amplitudes, self.layout)
    }

    /// Same state with registers listed in `order`.
    pub fn permuted(&self, order: &[&str]) -> Result<StateVector> {
        let target = self.layout.reordered(order)?;
        let map = self.layout.index_map(&target)?;
        let mut amplitudes = CVector::zeros(self.dim());
        for (old, &new) in map.iter().enumerate() {
            amplitudes[new] = self.amplitudes[old];
        }
        Ok(Self {
            amplitudes,
            layout: target,
        })
    }

    /// Amplitude table with the `rows` registers as row index and the
    /// remaining registers (in layout order) as column index.
    pub fn matricize(&self, rows: &[&str]) -> Result<(CMatrix, Layout, Layout)> {
        let row_layout = self.layout.restrict(rows)?;
        let col_layout = self.layout.complement(rows)?;
        let order: Vec<&str> = row_layout.names().chain(col_layout.names()).collect();
        let p = self.permuted(&order)?;
        let (r, c) = (row_layout.dim(), col_layout.dim());
        let m = CMatrix::from_fn(r, c, |i, j| p.amplitudes[i * c + j]);
        Ok((m, row_layout, col_layout))
    }

    /// Reduced state on `keep` (registers in layout order), tracing out the rest.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let (m, _, _) = self.matricize(keep)?;
        DensityMatrix::from_gram(&m)
    }

    pub fn density(&self) -> DensityMatrix {
        let v = &self.amplitudes;
        DensityMatrix::from_gram(&CMatrix::from_column_slice(v.len(), 1, v.as_slice()))
            .expect("outer product of a normalized state is a density matrix")
    }

    /// Unnormalized branch `<value|_register |self>` over the remaining registers.
    pub fn project(&self, register: &str, value: usize) -> Result<(CVector, Layout)> {
        let pos = self.layout.position(register)?;
        let dim = self.layout.registers()[pos].dim;
        if value >= dim {
            return Err(Error::OutOfRange {
                what: "projection value",
                value,
                bound: dim,
            });
        }
        let rest = self.layout.complement(&[register])?;
        let mut out = CVector::zeros(rest.dim());
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let mut digits = self.layout.digits(idx);
            if digits.remove(pos) == value {
                out[rest.index(&digits)?] = *amp;
            }
        }
        Ok((out, rest))
    }

    /// Applies `u` to the listed registers (in that order), identity elsewhere.
    pub fn apply(&self, u: &UnitaryMatrix, on: &[&str]) -> Result<StateVector> {
        let target = self.layout.restrict(on)?;
        let target = target.reordered(on)?;
        if u.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: target.dim(),
            });
        }
        let rest = self.layout.complement(on)?;
        let order: Vec<&str> = target.names().chain(rest.names()).collect();
        let p = self.permuted(&order)?;
        let (r, c) = (target.dim(), rest.dim());
        let m = CMatrix::from_fn(r, c, |i, j| p.amplitudes[i * c + j]);
        let out = u.entries() * m;
        let amplitudes = CVector::from_fn(r * c, |k, _| out[(k / c, k % c)]);
        let rotated = Self {
            amplitudes,
            layout: p.layout,
        };
        let original: Vec<&str> = self.layout.names().collect();
        rotated.permuted(&original)
    }

    /// Euclidean distance to another state over the same layout.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::Layout("states have different layouts".into()));
        }
        Ok((&self.amplitudes - &other.amplitudes).norm())
    }

    /// Probability distribution of a computational-basis measurement of one register.
    pub fn marginal(&self, register: &str) -> Result<Vec<f64>> {
        let pos = self.layout.position(register)?;
        let mut probs = vec![0.0; self.layout.registers()[pos].dim];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            probs[self.layout.digits(idx)[pos]] += amp.norm_sqr();
        }
        Ok(probs)
    }
}

/// `a ⊗ b`, with the layout of `a` followed by the layout of `b`.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let layout = a.layout.concat(&b.layout)?;
    Ok(StateVector {
        amplitudes: kron_vec(&a.amplitudes, &b.amplitudes),
        layout,
    })
}
