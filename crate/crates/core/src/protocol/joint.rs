use crate::error::{Error, Result};
use crate::linalg::StateVector;

use super::{
    alice_view_leakage, Party, ProtocolSpec, PurifiedState, RegisterSpec, TwoPartyUnitary, ALICE_INPUT,
    BOB_INPUT, BOB_OUTPUT,
};

/// Bob's key register in P-abstract.
pub const P_ABSTRACT_KEY: &str = "B_key";

/// A protocol computing `f(i(m0, m1, j), j)`: Alice's effective input is
/// chosen by her private randomness together with Bob's choice `j`.
///
/// `base` is the overall unitary for a fixed effective input. The dice
/// register `D` of the purification ranges over effective inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct JointInputProtocolSpec {
    message_bits: Option<[bool; 2]>,
    randomness: Vec<String>,
    input_map: Vec<Vec<usize>>,
    base: TwoPartyUnitary,
}

impl JointInputProtocolSpec {
    /// `input_map[r][j]` is the effective Alice input under randomness `r`.
    pub fn new(
        message_bits: Option<[bool; 2]>,
        randomness: Vec<String>,
        input_map: Vec<Vec<usize>>,
        base: TwoPartyUnitary,
    ) -> Result<Self> {
        if input_map.is_empty() || input_map.len() != randomness.len() {
            return Err(Error::InvalidProtocol(format!(
                "{} randomness labels for {} input-map rows",
                randomness.len(),
                input_map.len()
            )));
        }
        let (n, m) = (base.n(), base.m());
        for row in &input_map {
            if row.len() != m {
                return Err(Error::InvalidProtocol(format!(
                    "input-map row has {} entries, expected {m}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&i| i >= n) {
                return Err(Error::OutOfRange {
                    what: "effective input",
                    value: bad,
                    bound: n,
                });
            }
        }
        Ok(Self {
            message_bits,
            randomness,
            input_map,
            base,
        })
    }

    /// Ordinary protocol viewed as a joint-input one: one randomness value per
    /// input, and the effective input never depends on `j`.
    pub fn from_protocol(spec: &ProtocolSpec) -> Self {
        let (n, m) = (spec.n(), spec.m());
        Self {
            message_bits: None,
            randomness: (0..n).map(|i| format!("i={i}")).collect(),
            input_map: (0..n).map(|i| vec![i; m]).collect(),
            base: spec.circuit().clone(),
        }
    }

    pub fn message_bits(&self) -> Option<[bool; 2]> {
        self.message_bits
    }

    pub fn randomness_labels(&self) -> &[String] {
        &self.randomness
    }

    pub fn randomness_count(&self) -> usize {
        self.randomness.len()
    }

    pub fn input_map(&self) -> &[Vec<usize>] {
        &self.input_map
    }

    pub fn effective_input(&self, randomness: usize, j: usize) -> usize {
        self.input_map[randomness][j]
    }

    pub fn base(&self) -> &TwoPartyUnitary {
        &self.base
    }

    pub fn dice_dim(&self) -> usize {
        self.base.n()
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    /// True when no randomness value lets `j` change the effective input.
    pub fn is_degenerate(&self) -> bool {
        self.input_map.iter().all(|row| row.iter().all(|&i| i == row[0]))
    }

    pub fn purified_final_state(&self, j: usize) -> Result<PurifiedState> {
        self.base.purified_final_state(j)
    }

    /// Honest final state with Alice's randomness fixed classically.
    pub fn dice_free_state(&self, randomness: usize, j: usize) -> Result<StateVector> {
        self.check_randomness(randomness)?;
        if j >= self.m() {
            return Err(Error::OutOfRange {
                what: "Bob input",
                value: j,
                bound: self.m(),
            });
        }
        self.base.honest_final_state(self.input_map[randomness][j], j)
    }

    pub fn alice_view_leakage(&self, j1: usize, j2: usize) -> Result<f64> {
        alice_view_leakage(&self.base, j1, j2)
    }

    fn check_randomness(&self, randomness: usize) -> Result<()> {
        if randomness >= self.randomness.len() {
            return Err(Error::OutOfRange {
                what: "randomness value",
                value: randomness,
                bound: self.randomness.len(),
            });
        }
        Ok(())
    }
}

fn pair_index(hi: usize, lo: usize) -> usize {
    2 * hi + lo
}

/// Minimal joint-input model of Protocol P.
///
/// Alice holds two random bits `r_a, r_b`; Bob learns `r_w` for a random
/// `w`. Bob's choice decides which of `r_w`, `r_w'` (`w'` the other index)
/// masks which message: `j = 0` gives `(c0, c1) = (r_w, r_w')`, `j = 1` gives
/// `(r_w', r_w)`. The effective input is `c = 2 c0 + c1`.
///
/// Registers: `A` (Alice, dim 4) holds `c`, `B_in` (dim 2) holds `j`,
/// `B_key` (dim 2) receives `c_j` and `B_out` (dim 4) receives
/// `e = c xor b` where `b = 2 b0 + b1`. The basis map is
/// `(a, j, k, e) -> (e, j, k xor c_j(a), a xor b)`, so `A` is returned to
/// `|0>` on honest runs and Alice keeps no record of the exchange.
pub fn build_p_abstract(b0: bool, b1: bool) -> Result<JointInputProtocolSpec> {
    let registers = vec![
        RegisterSpec::new(ALICE_INPUT, 4, Party::Alice),
        RegisterSpec::new(BOB_INPUT, 2, Party::Bob),
        RegisterSpec::new(P_ABSTRACT_KEY, 2, Party::Bob),
        RegisterSpec::new(BOB_OUTPUT, 4, Party::Bob),
    ];
    let b = pair_index(b0 as usize, b1 as usize);
    let base = TwoPartyUnitary::from_basis_map(registers, move |d| {
        let (a, j, k, e) = (d[0], d[1], d[2], d[3]);
        let cj = if j == 0 { a >> 1 } else { a & 1 };
        vec![e, j, k ^ cj, a ^ b]
    })?;

    let mut labels = Vec::with_capacity(8);
    let mut input_map = Vec::with_capacity(8);
    for ra in 0..2 {
        for rb in 0..2 {
            for w in 0..2 {
                let r = [ra, rb];
                let (known, other) = (r[w], r[1 - w]);
                labels.push(format!("ra={ra},rb={rb},w={}", if w == 0 { 'a' } else { 'b' }));
                input_map.push(vec![pair_index(known, other), pair_index(other, known)]);
            }
        }
    }
    JointInputProtocolSpec::new(Some([b0, b1]), labels, input_map, base)
}

/// Bob's honest output in P-abstract: `e_j xor k` read from his registers.
pub fn p_abstract_decode(model: &JointInputProtocolSpec, randomness: usize, j: usize) -> Result<bool> {
    let state = model.dice_free_state(randomness, j)?;
    let (idx, amp) = state
        .amplitudes()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .expect("non-empty state");
    if (amp.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProtocol(
            "honest P-abstract state is not a basis state".into(),
        ));
    }
    let layout = state.layout();
    let digits = layout.digits(idx);
    let key = digits[layout.position(P_ABSTRACT_KEY)?];
    let e = digits[layout.position(BOB_OUTPUT)?];
    let ej = if j == 0 { e >> 1 } else { e & 1 };
    Ok(ej ^ key == 1)
}
