use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{canonical_phase, max_abs, CMatrix, CVector, Complex64, ORTHO_TOL, UNITARY_TOL, ZERO};
use crate::error::{Error, Result};

/// Square matrix with `U^dagger U = I` to within [`UNITARY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::NotUnitary {
                defect: f64::INFINITY,
            });
        }
        let defect = unitarity_defect(&entries);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    /// Permutation matrix sending `|k>` to `|perm[k]>`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidProtocol(format!("not a permutation of 0..{n}")));
            }
        }
        let mut entries = CMatrix::from_element(n, n, ZERO);
        for (k, &p) in perm.iter().enumerate() {
            entries[(p, k)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    /// `self * other`.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        Self {
            entries: self.entries.kronecker(&other.entries),
        }
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        Ok(&self.entries * v)
    }

    pub fn column(&self, k: usize) -> CVector {
        self.entries.column(k).into_owned()
    }

    /// Max-entry norm of `U^dagger U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.entries)
    }

    /// Max-entry distance to another unitary of the same dimension.
    pub fn max_entry_distance(&self, other: &UnitaryMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(max_abs(&(&self.entries - &other.entries)))
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_row_major(&self) -> Vec<[f64; 2]> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                out.push([z.re, z.im]);
            }
        }
        out
    }

    pub fn from_row_major(dim: usize, entries: &[[f64; 2]]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        Self::new(CMatrix::from_fn(dim, dim, |i, j| {
            let [re, im] = entries[i * dim + j];
            Complex64::new(re, im)
        }))
    }
}

fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

#[derive(Serialize, Deserialize)]
struct RowMajor {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RowMajor {
            dim: self.dim(),
            entries: self.to_row_major(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RowMajor::deserialize(d)?;
        Self::from_row_major(raw.dim, &raw.entries).map_err(serde::de::Error::custom)
    }
}

fn check_orthonormal(vs: &[CVector], what: &str) -> Result<()> {
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate().skip(i) {
            let g = a.dotc(b);
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (g - Complex64::new(target, 0.0)).norm();
            if dev > ORTHO_TOL {
                return Err(Error::Conditioning(format!(
                    "{what} set is not orthonormal: <{i}|{j}> deviates by {dev:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Modified Gram-Schmidt with one reorthogonalization pass, in input order.
/// Fails if a vector is numerically dependent on its predecessors.
pub fn orthonormalize(vs: &[CVector]) -> Result<Vec<CVector>> {
    let mut out: Vec<CVector> = Vec::with_capacity(vs.len());
    for (k, v) in vs.iter().enumerate() {
        let w = reduce_against(v.clone(), &out);
        let norm = w.norm();
        if norm < 1e-8 {
            return Err(Error::Conditioning(format!(
                "vector {k} is linearly dependent on its predecessors"
            )));
        }
        out.push(w.unscale(norm));
    }
    Ok(out)
}

fn reduce_against(mut w: CVector, basis: &[CVector]) -> CVector {
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(&w);
            w.axpy(-c, b, Complex64::new(1.0, 0.0));
        }
    }
    w
}

/// Orthonormal basis of the complement of `span`, built from computational
/// basis vectors taken in index order.
fn complement_basis(span: &[CVector], dim: usize) -> Vec<CVector> {
    let mut all: Vec<CVector> = span.to_vec();
    let mut out = Vec::with_capacity(dim - span.len());
    for i in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut e = CVector::zeros(dim);
        e[i] = Complex64::new(1.0, 0.0);
        let w = reduce_against(e, &all);
        let norm = w.norm();
        // some basis vector always clears this while the set is incomplete
        if norm > 1e-6 {
            let mut w = w.unscale(norm);
            canonical_phase(&mut w);
            all.push(w.clone());
            out.push(w);
        }
    }
    out
}

/// Unitary mapping `from[k]` to `to[k]` for every k, extended to the
/// orthogonal complements by pairing their index-ordered Gram-Schmidt bases.
pub fn rotation_from_bases(from: &[CVector], to: &[CVector]) -> Result<UnitaryMatrix> {
    if from.len() != to.len() {
        return Err(Error::Conditioning(format!(
            "basis sizes differ: {} vs {}",
            from.len(),
            to.len()
        )));
    }
    let dim = match from.first().or(to.first()) {
        Some(v) => v.len(),
        None => {
            return Err(Error::Conditioning(
                "empty basis: dimension is undetermined".into(),
            ))
        }
    };
    if from.iter().chain(to).any(|v| v.len() != dim) {
        return Err(Error::Conditioning("vectors have mixed dimensions".into()));
    }
    if from.len() > dim {
        return Err(Error::Conditioning(format!(
            "{} vectors exceed dimension {dim}",
            from.len()
        )));
    }
    check_orthonormal(from, "source")?;
    check_orthonormal(to, "target")?;
    let from = orthonormalize(from)?;
    let to = orthonormalize(to)?;
    let from_rest = complement_basis(&from, dim);
    let to_rest = complement_basis(&to, dim);
    let mut entries = CMatrix::from_element(dim, dim, ZERO);
    for (f, t) in from.iter().chain(&from_rest).zip(to.iter().chain(&to_rest)) {
        entries += t * f.adjoint();
    }
    UnitaryMatrix::new(entries)
}
