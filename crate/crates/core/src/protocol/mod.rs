//! Two-party protocols compressed into one overall unitary.
//!
//! A [`TwoPartyUnitary`] names its registers and who holds each one at the
//! end. Alice's input register is `A`, Bob's is `B_in`; every other register
//! starts in `|0>`. Purified executions prepend Alice's dice register `D`,
//! maximally entangled with `A`.

mod joint;

pub use joint::{build_p_abstract, p_abstract_decode, JointInputProtocolSpec, P_ABSTRACT_KEY};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{trace_distance, CVector, DensityMatrix, Layout, StateVector, UnitaryMatrix};

pub const ALICE_INPUT: &str = "A";
pub const BOB_INPUT: &str = "B_in";
pub const BOB_OUTPUT: &str = "B_out";
/// Bob-held register of the ideal functionality recording the row class of `i`.
pub const BOB_RECORD: &str = "B_rec";
pub const DICE: &str = "D";

/// Tolerance for the security-clause verdicts.
pub const CLAUSE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterSpec {
    pub name: String,
    pub dim: usize,
    pub owner: Party,
}

impl RegisterSpec {
    pub fn new(name: impl Into<String>, dim: usize, owner: Party) -> Self {
        Self {
            name: name.into(),
            dim,
            owner,
        }
    }
}

/// Overall unitary of a two-party protocol over owned registers.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPartyUnitary {
    registers: Vec<RegisterSpec>,
    layout: Layout,
    unitary: UnitaryMatrix,
}

impl TwoPartyUnitary {
    pub fn new(registers: Vec<RegisterSpec>, unitary: UnitaryMatrix) -> Result<Self> {
        let layout = Layout::new(registers.iter().map(|r| (r.name.clone(), r.dim)))?;
        if layout.contains(DICE) {
            return Err(Error::InvalidProtocol(format!(
                "register name `{DICE}` is reserved"
            )));
        }
        let owner = |name: &str| registers.iter().find(|r| r.name == name).map(|r| r.owner);
        if owner(ALICE_INPUT) != Some(Party::Alice) {
            return Err(Error::InvalidProtocol(format!(
                "needs an Alice-held input register `{ALICE_INPUT}`"
            )));
        }
        if owner(BOB_INPUT) != Some(Party::Bob) {
            return Err(Error::InvalidProtocol(format!(
                "needs a Bob-held input register `{BOB_INPUT}`"
            )));
        }
        if unitary.dim() != layout.dim() {
            return Err(Error::DimensionMismatch {
                left: unitary.dim(),
                right: layout.dim(),
            });
        }
        Ok(Self {
            registers,
            layout,
            unitary,
        })
    }

    /// Unitary given by a bijection on basis digits (one digit per register).
    pub fn from_basis_map<F>(registers: Vec<RegisterSpec>, map: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> Vec<usize>,
    {
        let layout = Layout::new(registers.iter().map(|r| (r.name.clone(), r.dim)))?;
        let perm = (0..layout.dim())
            .map(|idx| layout.index(&map(&layout.digits(idx))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(registers, UnitaryMatrix::from_permutation(&perm)?)
    }

    pub fn registers(&self) -> &[RegisterSpec] {
        &self.registers
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }

    /// Number of Alice inputs (dimension of `A`).
    pub fn n(&self) -> usize {
        self.layout.register_dim(ALICE_INPUT).expect("validated")
    }

    /// Number of Bob inputs (dimension of `B_in`).
    pub fn m(&self) -> usize {
        self.layout.register_dim(BOB_INPUT).expect("validated")
    }

    pub fn registers_of(&self, party: Party) -> Vec<&str> {
        self.registers
            .iter()
            .filter(|r| r.owner == party)
            .map(|r| r.name.as_str())
            .collect()
    }

    fn check_inputs(&self, i: Option<usize>, j: usize) -> Result<()> {
        if let Some(i) = i {
            if i >= self.n() {
                return Err(Error::OutOfRange {
                    what: "Alice input",
                    value: i,
                    bound: self.n(),
                });
            }
        }
        if j >= self.m() {
            return Err(Error::OutOfRange {
                what: "Bob input",
                value: j,
                bound: self.m(),
            });
        }
        Ok(())
    }

    fn initial_index(&self, i: usize, j: usize) -> usize {
        let digits: Vec<usize> = self
            .registers
            .iter()
            .map(|r| match r.name.as_str() {
                ALICE_INPUT => i,
                BOB_INPUT => j,
                _ => 0,
            })
            .collect();
        self.layout.index(&digits).expect("inputs checked")
    }

    /// `|v_ij> = U (|i>_A ⊗ |j>_B ⊗ |0...0>)`.
    pub fn honest_final_state(&self, i: usize, j: usize) -> Result<StateVector> {
        self.check_inputs(Some(i), j)?;
        let column = self.unitary.column(self.initial_index(i, j));
        StateVector::normalized(column, self.layout.clone())
    }

    /// `rho^{i,j}`: Bob's reduced state at the end of an honest run.
    pub fn bob_reduced_state(&self, i: usize, j: usize) -> Result<DensityMatrix> {
        self.honest_final_state(i, j)?
            .reduced(&self.registers_of(Party::Bob))
    }

    /// `|v_j> = n^{-1/2} sum_i |i>_D ⊗ |v_ij>`.
    pub fn purified_final_state(&self, j: usize) -> Result<PurifiedState> {
        self.check_inputs(None, j)?;
        let n = self.n();
        let dim = self.layout.dim();
        let scale = 1.0 / (n as f64).sqrt();
        let mut amplitudes = CVector::zeros(n * dim);
        for i in 0..n {
            let column = self.unitary.column(self.initial_index(i, j));
            for (k, z) in column.iter().enumerate() {
                amplitudes[i * dim + k] = z * scale;
            }
        }
        let layout = Layout::new([(DICE, n)])?.concat(&self.layout)?;
        let alice = std::iter::once(DICE.to_string())
            .chain(self.registers_of(Party::Alice).into_iter().map(String::from))
            .collect();
        Ok(PurifiedState {
            state: StateVector::normalized(amplitudes, layout)?,
            alice,
        })
    }
}

/// Global state of a purified run: dice `D`, then the protocol registers.
#[derive(Clone, Debug, PartialEq)]
pub struct PurifiedState {
    state: StateVector,
    alice: Vec<String>,
}

impl PurifiedState {
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// `D` followed by Alice's protocol registers.
    pub fn alice_registers(&self) -> Vec<&str> {
        self.alice.iter().map(String::as_str).collect()
    }

    pub fn bob_registers(&self) -> Vec<&str> {
        self.state
            .layout()
            .names()
            .filter(|n| !self.alice.iter().any(|a| a == n))
            .collect()
    }

    pub fn dice_dim(&self) -> usize {
        self.state.layout().registers()[0].dim
    }

    /// `<i|_D |v_j>`, which equals `n^{-1/2} |v_ij>`.
    pub fn branch(&self, i: usize) -> Result<CVector> {
        Ok(self.state.project(DICE, i)?.0)
    }

    /// Max-entry distance between the reduced state on `D` and `I/n`.
    pub fn dice_marginal_defect(&self) -> Result<f64> {
        let rho = self.state.reduced(&[DICE])?;
        let n = self.dice_dim();
        let mut target = crate::linalg::CMatrix::identity(n, n);
        target.unscale_mut(n as f64);
        Ok(crate::linalg::max_abs(&(rho.entries() - target)))
    }
}

/// `rho_j^Alice = Tr_B |v_j><v_j|` on `D` and Alice's registers.
pub fn alice_reduced_state(v: &PurifiedState) -> Result<DensityMatrix> {
    v.state.reduced(&v.alice_registers())
}

/// One-sided two-party computation of `f(i, j)`; `f_table[i][j]` in `0..p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec {
    n: usize,
    m: usize,
    p: usize,
    f_table: Vec<Vec<usize>>,
    circuit: TwoPartyUnitary,
}

impl ProtocolSpec {
    pub fn new(p: usize, f_table: Vec<Vec<usize>>, circuit: TwoPartyUnitary) -> Result<Self> {
        let (n, m) = (circuit.n(), circuit.m());
        check_table(&f_table, p)?;
        if f_table.len() != n || f_table[0].len() != m {
            return Err(Error::InvalidProtocol(format!(
                "f table is {}x{}, registers give {n}x{m}",
                f_table.len(),
                f_table[0].len()
            )));
        }
        let out = circuit
            .registers()
            .iter()
            .find(|r| r.name == BOB_OUTPUT)
            .ok_or_else(|| Error::InvalidProtocol(format!("missing output register `{BOB_OUTPUT}`")))?;
        if out.owner != Party::Bob || out.dim != p {
            return Err(Error::InvalidProtocol(format!(
                "`{BOB_OUTPUT}` must be Bob's with dimension p = {p}"
            )));
        }
        Ok(Self {
            n,
            m,
            p,
            f_table,
            circuit,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn f(&self, i: usize, j: usize) -> usize {
        self.f_table[i][j]
    }

    pub fn f_table(&self) -> &[Vec<usize>] {
        &self.f_table
    }

    pub fn circuit(&self) -> &TwoPartyUnitary {
        &self.circuit
    }

    pub fn honest_final_state(&self, i: usize, j: usize) -> Result<StateVector> {
        self.circuit.honest_final_state(i, j)
    }

    pub fn purified_final_state(&self, j: usize) -> Result<PurifiedState> {
        self.circuit.purified_final_state(j)
    }

    pub fn bob_reduced_state(&self, i: usize, j: usize) -> Result<DensityMatrix> {
        self.circuit.bob_reduced_state(i, j)
    }

    /// Distribution of Bob's output register after an honest run.
    pub fn output_distribution(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        self.honest_final_state(i, j)?.marginal(BOB_OUTPUT)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ProtocolDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProtocolDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Serialized form of a [`ProtocolSpec`].
#[derive(Serialize, Deserialize)]
struct ProtocolDocument {
    registers: Vec<RegisterSpec>,
    p: usize,
    f_table: Vec<Vec<usize>>,
    unitary: UnitaryMatrix,
}

impl From<&ProtocolSpec> for ProtocolDocument {
    fn from(spec: &ProtocolSpec) -> Self {
        Self {
            registers: spec.circuit.registers.clone(),
            p: spec.p,
            f_table: spec.f_table.clone(),
            unitary: spec.circuit.unitary.clone(),
        }
    }
}

impl TryFrom<ProtocolDocument> for ProtocolSpec {
    type Error = Error;

    fn try_from(doc: ProtocolDocument) -> Result<Self> {
        ProtocolSpec::new(
            doc.p,
            doc.f_table,
            TwoPartyUnitary::new(doc.registers, doc.unitary)?,
        )
    }
}

fn check_table(f_table: &[Vec<usize>], p: usize) -> Result<()> {
    let m = f_table.first().map_or(0, Vec::len);
    if f_table.is_empty() || m == 0 {
        return Err(Error::InvalidProtocol("empty f table".into()));
    }
    if f_table.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidProtocol("ragged f table".into()));
    }
    if let Some(bad) = f_table.iter().flatten().find(|&&y| y >= p) {
        return Err(Error::InvalidProtocol(format!(
            "table value {bad} is not below p = {p}"
        )));
    }
    Ok(())
}

/// Row class of every Alice input: inputs with identical rows of `f` share a class.
pub fn row_classes(f_table: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let mut distinct: Vec<&Vec<usize>> = Vec::new();
    let classes = f_table
        .iter()
        .map(|row| match distinct.iter().position(|d| *d == row) {
            Some(k) => k,
            None => {
                distinct.push(row);
                distinct.len() - 1
            }
        })
        .collect();
    (classes, distinct.len())
}

/// Ideal computation of `f`:
/// `|i>_A |j>_B_in |y>_B_out |z>_B_rec -> |i> |j> |y + f(i,j) mod p> |z + class(i) mod c>`,
/// where `class(i)` indexes the distinct rows of `f` and `c` counts them.
///
/// The record register makes Bob's final states for inputs with different
/// rows orthogonal for every `j`, so Alice's purified view is independent
/// of `j`.
pub fn build_ideal_functionality(f_table: Vec<Vec<usize>>, p: usize) -> Result<ProtocolSpec> {
    check_table(&f_table, p)?;
    let (n, m) = (f_table.len(), f_table[0].len());
    let (class, c) = row_classes(&f_table);
    let registers = vec![
        RegisterSpec::new(ALICE_INPUT, n, Party::Alice),
        RegisterSpec::new(BOB_INPUT, m, Party::Bob),
        RegisterSpec::new(BOB_OUTPUT, p, Party::Bob),
        RegisterSpec::new(BOB_RECORD, c, Party::Bob),
    ];
    let table = f_table.clone();
    let circuit = TwoPartyUnitary::from_basis_map(registers, move |d| {
        let (i, j, y, z) = (d[0], d[1], d[2], d[3]);
        vec![i, j, (y + table[i][j]) % p, (z + class[i]) % c]
    })?;
    ProtocolSpec::new(p, f_table, circuit)
}

/// `|i>_A |j>_B_in |y>_B_out -> |i> |j> |y + f(i,j) mod p>` with no record
/// register. Alice's purified view of this protocol depends on `j` whenever
/// the partition of inputs by `f(., j)` does.
pub fn build_coherent_functionality(f_table: Vec<Vec<usize>>, p: usize) -> Result<ProtocolSpec> {
    check_table(&f_table, p)?;
    let (n, m) = (f_table.len(), f_table[0].len());
    let registers = vec![
        RegisterSpec::new(ALICE_INPUT, n, Party::Alice),
        RegisterSpec::new(BOB_INPUT, m, Party::Bob),
        RegisterSpec::new(BOB_OUTPUT, p, Party::Bob),
    ];
    let table = f_table.clone();
    let circuit = TwoPartyUnitary::from_basis_map(registers, move |d| {
        vec![d[0], d[1], (d[2] + table[d[0]][d[1]]) % p]
    })?;
    ProtocolSpec::new(p, f_table, circuit)
}

/// Table of one-out-of-two OT on single bits: `i = 2*m0 + m1`, `f(i, j) = m_j`.
pub fn one_out_of_two_table() -> Vec<Vec<usize>> {
    (0..4).map(|i| vec![(i >> 1) & 1, i & 1]).collect()
}

/// `i` for the message pair `(m0, m1)` in [`one_out_of_two_table`].
pub fn ot_input(m0: bool, m1: bool) -> usize {
    2 * m0 as usize + m1 as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClauseVerdict {
    pub deviation: f64,
    pub pass: bool,
}

impl ClauseVerdict {
    fn from_deviation(deviation: f64) -> Self {
        Self {
            deviation,
            pass: deviation <= CLAUSE_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefinitionDReport {
    /// `max_{i,j} 1 - P[B_out = f(i,j)]`.
    pub a: ClauseVerdict,
    /// Max trace distance between Alice's purified views over pairs of `j`.
    pub b: ClauseVerdict,
    /// Max trace distance between `rho^{i,j}` and `rho^{i',j}` over pairs
    /// with `f(i,j) = f(i',j)`.
    pub c: ClauseVerdict,
}

/// Evaluates the three security clauses exhaustively.
pub fn check_definition_d(spec: &ProtocolSpec) -> Result<DefinitionDReport> {
    let (n, m) = (spec.n(), spec.m());
    let mut a = 0.0_f64;
    for i in 0..n {
        for j in 0..m {
            let probs = spec.output_distribution(i, j)?;
            a = a.max(1.0 - probs[spec.f(i, j)]);
        }
    }

    let alice = (0..m)
        .map(|j| alice_reduced_state(&spec.purified_final_state(j)?))
        .collect::<Result<Vec<_>>>()?;
    let mut b = 0.0_f64;
    for j1 in 0..m {
        for j2 in j1 + 1..m {
            b = b.max(trace_distance(&alice[j1], &alice[j2])?);
        }
    }

    let mut c = 0.0_f64;
    for j in 0..m {
        let bob = (0..n)
            .map(|i| spec.bob_reduced_state(i, j))
            .collect::<Result<Vec<_>>>()?;
        for i1 in 0..n {
            for i2 in i1 + 1..n {
                if spec.f(i1, j) == spec.f(i2, j) {
                    c = c.max(trace_distance(&bob[i1], &bob[i2])?);
                }
            }
        }
    }
    Ok(DefinitionDReport {
        a: ClauseVerdict::from_deviation(a.max(0.0)),
        b: ClauseVerdict::from_deviation(b),
        c: ClauseVerdict::from_deviation(c),
    })
}

/// Trace distance between Alice's purified views for two choices of Bob.
pub fn alice_view_leakage(circuit: &TwoPartyUnitary, j1: usize, j2: usize) -> Result<f64> {
    let r1 = alice_reduced_state(&circuit.purified_final_state(j1)?)?;
    let r2 = alice_reduced_state(&circuit.purified_final_state(j2)?)?;
    trace_distance(&r1, &r2)
}
