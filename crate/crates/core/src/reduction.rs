//! Monte-Carlo execution of the reduction from all-or-nothing OT to
//! one-out-of-two OT by disjoint index sets and parity masking.
//!
//! Alice draws `K*s` random bits and pushes each through the all-or-nothing
//! box. Bob forms `U` from `alpha_s` indices he learned and `V` from
//! `alpha_s` other indices, and sends `(U, V)` or `(V, U)` depending on his
//! choice `j`. Alice answers with both message bits masked by the parities of
//! the two declared sets. Bob unmasks `b_j` with the parity of `U`.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ot::{AonOt, IdealAonOt};
use crate::rng::SeedStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct PParams {
    s: usize,
    k: usize,
    alpha_s: usize,
}

#[derive(Deserialize)]
struct RawParams {
    s: usize,
    k: usize,
}

impl TryFrom<RawParams> for PParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.s, raw.k)
    }
}

impl PParams {
    pub const DEFAULT_K: usize = 3;

    pub fn new(s: usize, k: usize) -> Result<Self> {
        if s == 0 || k == 0 {
            return Err(Error::InvalidParams(format!(
                "s and K must be positive (s = {s}, K = {k})"
            )));
        }
        let total = s
            .checked_mul(k)
            .ok_or_else(|| Error::InvalidParams("K*s overflows".into()))?;
        if total % 3 != 0 {
            return Err(Error::InvalidParams(format!(
                "K*s = {total} is not divisible by 3"
            )));
        }
        Ok(Self {
            s,
            k,
            alpha_s: total / 3,
        })
    }

    pub fn with_default_k(s: usize) -> Result<Self> {
        Self::new(s, Self::DEFAULT_K)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha_s(&self) -> usize {
        self.alpha_s
    }

    /// Number of transferred bits, `K*s`.
    pub fn total(&self) -> usize {
        self.k * self.s
    }
}

/// Order in which Bob declares his sets to Alice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum XyOrder {
    /// `(X, Y) = (U, V)`, sent when `j = 0`.
    UV,
    /// `(X, Y) = (V, U)`, sent when `j = 1`.
    VU,
}

impl XyOrder {
    pub fn for_choice(j: bool) -> Self {
        if j {
            XyOrder::VU
        } else {
            XyOrder::UV
        }
    }
}

/// Messages exchanged after the transfers, on runs that did not abort.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub set_u: Vec<usize>,
    pub set_v: Vec<usize>,
    pub order: XyOrder,
    pub c0: bool,
    pub c1: bool,
    pub e0: bool,
    pub e1: bool,
}

impl Exchange {
    pub fn x(&self) -> &[usize] {
        match self.order {
            XyOrder::UV => &self.set_u,
            XyOrder::VU => &self.set_v,
        }
    }

    pub fn y(&self) -> &[usize] {
        match self.order {
            XyOrder::UV => &self.set_v,
            XyOrder::VU => &self.set_u,
        }
    }
}

/// Full record of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptP {
    pub params: PParams,
    pub b0: bool,
    pub b1: bool,
    pub j: bool,
    pub r: Vec<bool>,
    pub received: Vec<bool>,
    pub aborted: bool,
    pub exchange: Option<Exchange>,
    pub bob_output: Option<bool>,
}

impl TranscriptP {
    /// Checks set sizes, disjointness, `U ⊆ received`, the declaration order
    /// and the recomputed parities and masks.
    pub fn check_consistency(&self) -> Result<()> {
        let n = self.params.total();
        let bad = |msg: String| Err(Error::InvalidProtocol(msg));
        if self.r.len() != n || self.received.len() != n {
            return bad(format!("expected {n} bits and flags"));
        }
        let ex = match (&self.exchange, self.aborted) {
            (None, true) => return Ok(()),
            (Some(ex), false) => ex,
            _ => return bad("abort flag disagrees with the exchange record".into()),
        };
        let alpha = self.params.alpha_s();
        if ex.set_u.len() != alpha || ex.set_v.len() != alpha {
            return bad("set sizes differ from alpha_s".into());
        }
        let sorted = |s: &[usize]| s.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&ex.set_u) || !sorted(&ex.set_v) {
            return bad("index sets are not sorted".into());
        }
        if ex.set_u.iter().chain(&ex.set_v).any(|&i| i >= n) {
            return bad("index out of range".into());
        }
        if ex.set_u.iter().any(|i| ex.set_v.contains(i)) {
            return bad("U and V intersect".into());
        }
        if ex.set_u.iter().any(|&i| !self.received[i]) {
            return bad("U contains an index Bob did not receive".into());
        }
        if ex.order != XyOrder::for_choice(self.j) {
            return bad("declaration order does not match j".into());
        }
        if ex.c0 != parity(&self.r, ex.x()) || ex.c1 != parity(&self.r, ex.y()) {
            return bad("parities do not match r".into());
        }
        if ex.e0 != self.b0 ^ ex.c0 || ex.e1 != self.b1 ^ ex.c1 {
            return bad("masked bits do not match".into());
        }
        Ok(())
    }
}

/// XOR of `bits` over `indices`.
pub fn parity(bits: &[bool], indices: &[usize]) -> bool {
    indices.iter().fold(false, |acc, &i| acc ^ bits[i])
}

/// Bob's choice of `U` (uniform among `alpha`-subsets of received indices)
/// and `V` (uniform among `alpha`-subsets of all indices outside `U`).
/// Both sets are returned sorted.
pub fn select_sets<R: Rng + ?Sized>(
    received: &[bool],
    alpha: usize,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let known: Vec<usize> = (0..received.len()).filter(|&i| received[i]).collect();
    if known.len() < alpha {
        return Err(Error::Aborted(format!(
            "Bob knows {} bits, needs {alpha}",
            known.len()
        )));
    }
    let mut set_u: Vec<usize> = sample(rng, known.len(), alpha)
        .into_iter()
        .map(|k| known[k])
        .collect();
    set_u.sort_unstable();
    let rest: Vec<usize> = (0..received.len())
        .filter(|i| set_u.binary_search(i).is_err())
        .collect();
    if rest.len() < alpha {
        return Err(Error::Aborted(format!(
            "only {} indices remain for V, needs {alpha}",
            rest.len()
        )));
    }
    let mut set_v: Vec<usize> = sample(rng, rest.len(), alpha)
        .into_iter()
        .map(|k| rest[k])
        .collect();
    set_v.sort_unstable();
    Ok((set_u, set_v))
}

/// Runs the reduction once. Alice's bits and Bob's set choices come from
/// `rng`; the transfers go through `ot`.
pub fn run_protocol_p<O, R>(
    b0: bool,
    b1: bool,
    j: bool,
    params: &PParams,
    ot: &mut O,
    rng: &mut R,
) -> TranscriptP
where
    O: AonOt + ?Sized,
    R: Rng + ?Sized,
{
    let n = params.total();
    let r: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let received: Vec<bool> = r.iter().map(|&bit| ot.transfer(bit).received()).collect();

    let mut t = TranscriptP {
        params: *params,
        b0,
        b1,
        j,
        r,
        received,
        aborted: true,
        exchange: None,
        bob_output: None,
    };
    let Ok((set_u, set_v)) = select_sets(&t.received, params.alpha_s(), rng) else {
        return t;
    };

    let order = XyOrder::for_choice(j);
    let (x, y) = match order {
        XyOrder::UV => (&set_u, &set_v),
        XyOrder::VU => (&set_v, &set_u),
    };
    let c0 = parity(&t.r, x);
    let c1 = parity(&t.r, y);
    t.exchange = Some(Exchange {
        c0,
        c1,
        e0: b0 ^ c0,
        e1: b1 ^ c1,
        set_u,
        set_v,
        order,
    });
    t.aborted = false;
    t.bob_output = bob_decode(&t).ok();
    t
}

/// `e_j` unmasked with the parity of `U`, using only bits Bob received.
pub fn bob_decode(t: &TranscriptP) -> Result<bool> {
    let ex = t.exchange.as_ref().ok_or(Error::AbortedTranscript)?;
    if t.aborted {
        return Err(Error::AbortedTranscript);
    }
    let mut key = false;
    for &u in &ex.set_u {
        if !t.received[u] {
            return Err(Error::InvalidProtocol(format!("Bob never received bit {u}")));
        }
        key ^= t.r[u];
    }
    Ok(if t.j { ex.e1 ^ key } else { ex.e0 ^ key })
}

/// Whether Bob also received every bit of `V`, and so can unmask `b_{1-j}`.
pub fn bob_residual_knowledge(t: &TranscriptP) -> bool {
    match &t.exchange {
        Some(ex) if !t.aborted => ex.set_v.iter().all(|&v| t.received[v]),
        _ => false,
    }
}

/// Whether the smallest declared index lies in `X`; a low-noise summary of
/// the `(X, Y)` pattern Alice sees.
pub fn x_holds_min_index(ex: &Exchange) -> bool {
    match (ex.x().first(), ex.y().first()) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefinitionBReport {
    pub runs: usize,
    pub completed: usize,
    pub correct: usize,
    /// `None` when no run completed.
    pub correctness_rate: Option<f64>,
    pub j_counts: [usize; 2],
    /// False when either choice is missing or the split is more than
    /// three standard deviations from even.
    pub j_uniform: bool,
    /// Total variation between the `(X, Y)` statistic conditioned on `j = 0`
    /// and on `j = 1`; `None` unless both conditions have completed runs.
    pub tv_distance: Option<f64>,
}

/// Honest correctness and the sender-view comparison between choices.
pub fn verify_definition_b(batch: &[TranscriptP]) -> DefinitionBReport {
    let mut j_counts = [0usize; 2];
    let mut completed = 0;
    let mut correct = 0;
    // [j][statistic]
    let mut stat = [[0usize; 2]; 2];
    for t in batch {
        j_counts[t.j as usize] += 1;
        let Some(ex) = t.exchange.as_ref().filter(|_| !t.aborted) else {
            continue;
        };
        completed += 1;
        let want = if t.j { t.b1 } else { t.b0 };
        if bob_decode(t).ok() == Some(want) {
            correct += 1;
        }
        stat[t.j as usize][x_holds_min_index(ex) as usize] += 1;
    }
    let n = batch.len() as f64;
    let sigma = n.sqrt() / 2.0;
    let j_uniform = j_counts.iter().all(|&c| c > 0) && (j_counts[0] as f64 - n / 2.0).abs() <= 3.0 * sigma;
    let tv_distance = {
        let (n0, n1) = (stat[0][0] + stat[0][1], stat[1][0] + stat[1][1]);
        (n0 > 0 && n1 > 0).then(|| {
            (0..2)
                .map(|k| (stat[0][k] as f64 / n0 as f64 - stat[1][k] as f64 / n1 as f64).abs())
                .sum::<f64>()
                / 2.0
        })
    };
    DefinitionBReport {
        runs: batch.len(),
        completed,
        correct,
        correctness_rate: (completed > 0).then(|| correct as f64 / completed as f64),
        j_counts,
        j_uniform,
        tv_distance,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub runs: usize,
    pub aborts: usize,
    pub correctness_rate: Option<f64>,
    pub residual_rate: Option<f64>,
    pub tv_distance: Option<f64>,
}

pub fn summarize(batch: &[TranscriptP]) -> BatchSummary {
    let b = verify_definition_b(batch);
    let residual = batch.iter().filter(|t| bob_residual_knowledge(t)).count();
    BatchSummary {
        runs: b.runs,
        aborts: b.runs - b.completed,
        correctness_rate: b.correctness_rate,
        residual_rate: (b.completed > 0).then(|| residual as f64 / b.completed as f64),
        tv_distance: b.tv_distance,
    }
}

/// `runs` independent honest runs with uniform messages and choices. Run `k`
/// draws from `root.child(k)`: party randomness on child 0, the transfers on
/// child 1 (one stream per invocation), and the inputs on child 2.
pub fn run_batch(params: &PParams, runs: usize, root: SeedStream) -> Vec<TranscriptP> {
    (0..runs as u64)
        .map(|k| {
            let node = root.child(k);
            let mut inputs = node.child(2).rng();
            let (b0, b1, j) = (inputs.gen(), inputs.gen(), inputs.gen());
            let mut ot = IdealAonOt::new(node.child(1));
            run_protocol_p(b0, b1, j, params, &mut ot, &mut node.child(0).rng())
        })
        .collect()
}

/// `P[Bin(K*s, 1/2) < alpha_s]`, the chance Bob cannot fill `U`.
pub fn abort_probability(params: &PParams) -> f64 {
    let n = params.total();
    let mut term = 0.5_f64.powi(n as i32); // C(n, 0) / 2^n
    let mut total = 0.0;
    for k in 0..params.alpha_s() {
        total += term;
        term *= (n - k) as f64 / (k + 1) as f64;
    }
    total
}
