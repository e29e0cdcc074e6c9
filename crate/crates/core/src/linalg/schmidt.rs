use super::{canonical_phase, kron_vec, CVector, Layout, StateVector, ZERO_COEFF};
use crate::error::{Error, Result};

/// `psi = sum_k a_k |left_k> ⊗ |right_k>` with orthonormal factor sets.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<CVector>,
    pub right_vectors: Vec<CVector>,
    pub left_layout: Layout,
    pub right_layout: Layout,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Amplitudes of `sum_k a_k |left_k> ⊗ |right_k>` over the layout
    /// `left_layout ++ right_layout`.
    pub fn reconstruct(&self) -> CVector {
        let dim = self.left_layout.dim() * self.right_layout.dim();
        let mut out = CVector::zeros(dim);
        for ((a, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            out += kron_vec(l, r).scale(*a);
        }
        out
    }

    pub fn layout(&self) -> Layout {
        self.left_layout
            .concat(&self.right_layout)
            .expect("sides of a cut are disjoint")
    }
}

/// Schmidt decomposition across the cut `left | rest`, via the SVD of the
/// amplitude table. Coefficients come out non-increasing; each left vector
/// carries the canonical phase (first nonzero component real positive).
pub fn schmidt_decompose(psi: &StateVector, left: &[&str]) -> Result<SchmidtDecomposition> {
    if left.is_empty() {
        return Err(Error::Partition("left side of the cut is empty".into()));
    }
    let (m, left_layout, right_layout) = psi.matricize(left)?;
    if right_layout.is_empty() {
        return Err(Error::Partition("right side of the cut is empty".into()));
    }
    let svd = m.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > ZERO_COEFF)
        .collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut coefficients = Vec::with_capacity(order.len());
    let mut left_vectors = Vec::with_capacity(order.len());
    let mut right_vectors = Vec::with_capacity(order.len());
    for k in order {
        let mut l = u.column(k).into_owned();
        // psi_{ab} = sum_k s_k u_{ak} (v^dagger)_{kb}, so the right factor is row k of v^dagger
        let mut r = v_t.row(k).transpose();
        let phase = canonical_phase(&mut l);
        r.iter_mut().for_each(|x| *x *= phase);
        coefficients.push(svd.singular_values[k]);
        left_vectors.push(l);
        right_vectors.push(r);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
        left_layout,
        right_layout,
    })
}
