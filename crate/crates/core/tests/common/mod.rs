//! Independent reference computations shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use otreduce::linalg::{CMatrix, CVector, Complex64, Layout, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v.unscale(n)
}

pub fn random_state<R: Rng>(rng: &mut R, dims: &[(&str, usize)]) -> StateVector {
    let layout = Layout::new(dims.iter().copied()).unwrap();
    StateVector::new(random_vector(rng, layout.dim()), layout).unwrap()
}

/// Random orthonormal set of `k` vectors in `dim` dimensions (classical Gram-Schmidt).
pub fn random_orthonormal<R: Rng>(rng: &mut R, dim: usize, k: usize) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::new();
    while out.len() < k {
        let mut v = random_vector(rng, dim);
        for _ in 0..2 {
            for b in &out {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let n = v.norm();
        if n > 1e-3 {
            out.push(v.unscale(n));
        }
    }
    out
}

/// `|psi><psi|` as a plain matrix.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Tensor product by explicit double loop.
pub fn tensor_oracle(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); a.len() * b.len()];
    for (x, ax) in a.iter().enumerate() {
        for (y, by) in b.iter().enumerate() {
            out[x * b.len() + y] = ax * by;
        }
    }
    out
}

/// Reduced state of a pure bipartite `da x db` state, keeping one side, by
/// explicit index summation.
pub fn partial_trace_oracle(psi: &[Complex64], da: usize, db: usize, keep_first: bool) -> CMatrix {
    if keep_first {
        CMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| psi[a * db + b] * psi[a2 * db + b].conj()).sum()
        })
    } else {
        CMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| psi[a * db + b] * psi[a * db + b2].conj()).sum()
        })
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi on its real symmetric
/// embedding `[[Re, -Im], [Im, Re]]`, which doubles every eigenvalue.
pub fn jacobi_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.nrows();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.into_iter().step_by(2).collect()
}

/// Half the absolute eigenvalue sum of `r1 - r2`, via the Jacobi oracle.
pub fn trace_distance_oracle(r1: &CMatrix, r2: &CMatrix) -> f64 {
    jacobi_eigenvalues(&(r1 - r2))
        .iter()
        .map(|e| e.abs())
        .sum::<f64>()
        / 2.0
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

/// Exact abort probability for `total` transfers and set size `alpha`, by
/// enumerating every delivery pattern.
pub fn abort_oracle(total: u32, alpha: u32) -> f64 {
    let aborts = (0u32..1 << total)
        .filter(|mask| mask.count_ones() < alpha)
        .count();
    aborts as f64 / f64::from(1u32 << total)
}

/// Exact probability that Bob knows every bit of V, given no abort. Every
/// delivery pattern is enumerated; within a pattern every U inside the
/// delivered set leaves the same count of delivered indices outside it, so
/// U is fixed to the first delivered indices and every V in its complement
/// is enumerated.
pub fn residual_oracle(total: u32, alpha: u32) -> f64 {
    let n = total as usize;
    let alpha = alpha as usize;
    let (mut mass, mut hit) = (0.0, 0.0);
    for mask in 0u32..1 << total {
        if (mask.count_ones() as usize) < alpha {
            continue;
        }
        let received: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let u: Vec<usize> = (0..n).filter(|&i| received[i]).take(alpha).collect();
        let rest: Vec<usize> = (0..n).filter(|i| !u.contains(i)).collect();
        let (mut good, mut all) = (0u64, 0u64);
        for vmask in 0u32..1 << rest.len() {
            if vmask.count_ones() as usize != alpha {
                continue;
            }
            all += 1;
            if (0..rest.len()).all(|k| vmask >> k & 1 == 0 || received[rest[k]]) {
                good += 1;
            }
        }
        mass += 1.0;
        hit += good as f64 / all as f64;
    }
    hit / mass
}

/// Closed form of [`residual_oracle`]: `sum_r C(n,r) C(r-a,a) / C(n-a,a)`
/// over delivered counts `r >= a`, normalized by the non-abort mass.
pub fn residual_closed_form(total: u64, alpha: u64) -> f64 {
    let (mut hit, mut mass) = (0.0, 0.0);
    for r in alpha..=total {
        let w = binomial(total, r) as f64;
        mass += w;
        hit += w * binomial(r - alpha, alpha) as f64 / binomial(total - alpha, alpha) as f64;
    }
    hit / mass
}

/// Classical truth table of P-abstract: `(c0, c1, key, e0, e1)` for
/// randomness `(ra, rb, w)`, choice `j` and messages `(b0, b1)`.
pub fn p_abstract_view(ra: u8, rb: u8, w: u8, j: u8, b0: u8, b1: u8) -> (u8, u8, u8, u8, u8) {
    let r = [ra, rb];
    let (known, other) = (r[w as usize], r[1 - w as usize]);
    let (c0, c1) = if j == 0 { (known, other) } else { (other, known) };
    (c0, c1, known, b0 ^ c0, b1 ^ c1)
}

/// Bob-only deviation of P-abstract for `j1 -> j2`, by exhaustive evaluation:
/// Bob's registers after the rotation hold his honest `j2` record for the
/// `j1` effective input, compared with the honest `j2` record for the `j2`
/// effective input. Records are classical, so the distance is 0 or 1.
pub fn p_abstract_delta_oracle(j1: u8, j2: u8) -> f64 {
    let mut best = f64::INFINITY;
    for b in 0..4u8 {
        let (b0, b1) = (b >> 1, b & 1);
        for ra in 0..2 {
            for rb in 0..2 {
                for w in 0..2 {
                    let (c0, c1, ..) = p_abstract_view(ra, rb, w, j1, b0, b1);
                    let (d0, d1, ..) = p_abstract_view(ra, rb, w, j2, b0, b1);
                    if (c0, c1) == (d0, d1) {
                        continue;
                    }
                    let record = |x0: u8, x1: u8| {
                        let key = if j2 == 0 { x0 } else { x1 };
                        (j2, key, b0 ^ x0, b1 ^ x1)
                    };
                    let dev = if record(c0, c1) == record(d0, d1) {
                        0.0
                    } else {
                        1.0
                    };
                    best = best.min(dev);
                }
            }
        }
    }
    best
}

use otreduce::linalg::{rotation_from_bases, UnitaryMatrix};
use otreduce::protocol::{Party, ProtocolSpec, RegisterSpec, TwoPartyUnitary};

/// Haar-ish random unitary: the rotation taking the computational basis to
/// a random orthonormal basis.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> UnitaryMatrix {
    let from: Vec<CVector> = (0..dim)
        .map(|k| CVector::from_fn(dim, |i, _| c(if i == k { 1.0 } else { 0.0 }, 0.0)))
        .collect();
    rotation_from_bases(&from, &random_orthonormal(rng, dim, dim)).unwrap()
}

pub fn standard_registers(n: usize, m: usize, p: usize) -> Vec<RegisterSpec> {
    vec![
        RegisterSpec::new("A", n, Party::Alice),
        RegisterSpec::new("B_in", m, Party::Bob),
        RegisterSpec::new("B_out", p, Party::Bob),
    ]
}

pub fn random_table<R: Rng>(rng: &mut R, n: usize, m: usize, p: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(0..p)).collect())
        .collect()
}

/// Protocol whose overall unitary is the identity on A ⊗ B_in ⊗ B_out.
pub fn identity_protocol(n: usize, m: usize, p: usize) -> ProtocolSpec {
    let circuit =
        TwoPartyUnitary::new(standard_registers(n, m, p), UnitaryMatrix::identity(n * m * p)).unwrap();
    ProtocolSpec::new(p, vec![vec![0; m]; n], circuit).unwrap()
}

/// Constant-zero function whose unitary also copies `j` into an Alice ancilla.
pub fn j_copying_protocol(n: usize, m: usize) -> ProtocolSpec {
    let mut regs = standard_registers(n, m, 1);
    regs.push(RegisterSpec::new("A_copy", m, Party::Alice));
    let circuit =
        TwoPartyUnitary::from_basis_map(regs, |d| vec![d[0], d[1], d[2], (d[3] + d[1]) % m]).unwrap();
    ProtocolSpec::new(1, vec![vec![0; m]; n], circuit).unwrap()
}

/// Constant-zero function whose unitary copies `i` into a Bob ancilla.
pub fn i_leaking_protocol(n: usize, m: usize) -> ProtocolSpec {
    let mut regs = standard_registers(n, m, 1);
    regs.push(RegisterSpec::new("B_copy", n, Party::Bob));
    let circuit =
        TwoPartyUnitary::from_basis_map(regs, |d| vec![d[0], d[1], d[2], (d[3] + d[0]) % n]).unwrap();
    ProtocolSpec::new(1, vec![vec![0; m]; n], circuit).unwrap()
}
