//! Lo's cheating unitary and the joint-input counterexample.
//!
//! When Alice's view of the purified protocol does not depend on `j`, the two
//! global states share Schmidt coefficients and Alice-side vectors, so a
//! unitary on Bob's side alone rotates one into the other.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{
    rotation_from_bases, schmidt_decompose, trace_distance, CMatrix, CVector, Complex64, StateVector,
    UnitaryMatrix,
};
use crate::protocol::{JointInputProtocolSpec, Party, ProtocolSpec, TwoPartyUnitary, DICE};

/// Tolerance on residuals and deviations for an attack to count as successful.
pub const ATTACK_TOL: f64 = 1e-9;
/// Schmidt coefficients closer than this share a degenerate block.
pub const BLOCK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct AttackReport {
    pub j1: usize,
    pub j2: usize,
    /// Acts on `bob_registers`, in that order.
    pub cheating_unitary: UnitaryMatrix,
    pub bob_registers: Vec<String>,
    /// `||(I ⊗ V)|v_j1> - |v_j2>||` on the purified states.
    pub global_residual: f64,
    /// `||(I ⊗ V)|v_ij1> - |v_ij2>||` per Alice input.
    pub branch_residuals: Vec<f64>,
    /// `TD(V rho^{i1,j1} V^dagger, rho^{i2,j2})` per Alice input or randomness value.
    pub bob_deviations: Vec<f64>,
    /// Swap on the dice register (joint-input runs only).
    pub alice_side_operator: Option<UnitaryMatrix>,
    /// Distance of the steered dice branch from `|v_{i2 j2}>`.
    pub steered_residual: Option<f64>,
    /// Trace distance of Bob's steered state from `rho^{i2,j2}`.
    pub steered_deviation: Option<f64>,
    pub bob_only_deviation: f64,
    /// Assignments for which no Bob-side unitary exists (ablation only).
    pub inapplicable: usize,
    pub success: bool,
}

fn sci(x: f64) -> Value {
    Value::String(format!("{x:.11e}"))
}

fn sci_all(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| sci(x)).collect())
}

impl AttackReport {
    pub fn max_bob_deviation(&self) -> f64 {
        self.bob_deviations.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_branch_residual(&self) -> f64 {
        self.branch_residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Scalars become 12-significant-digit strings; matrices only when `full`.
    pub fn to_json(&self, full: bool) -> Value {
        let mut doc = Map::new();
        doc.insert("j1".into(), json!(self.j1));
        doc.insert("j2".into(), json!(self.j2));
        doc.insert("bob_registers".into(), json!(self.bob_registers));
        doc.insert("global_residual".into(), sci(self.global_residual));
        doc.insert("branch_residuals".into(), sci_all(&self.branch_residuals));
        doc.insert("bob_deviations".into(), sci_all(&self.bob_deviations));
        doc.insert(
            "steered_residual".into(),
            self.steered_residual.map_or(Value::Null, sci),
        );
        doc.insert(
            "steered_deviation".into(),
            self.steered_deviation.map_or(Value::Null, sci),
        );
        doc.insert("bob_only_deviation".into(), sci(self.bob_only_deviation));
        doc.insert("inapplicable".into(), json!(self.inapplicable));
        doc.insert("success".into(), json!(self.success));
        doc.insert(
            "unitarity_defect".into(),
            sci(self.cheating_unitary.unitarity_defect()),
        );
        if full {
            doc.insert(
                "cheating_unitary".into(),
                serde_json::to_value(&self.cheating_unitary).expect("unitary serializes"),
            );
            doc.insert(
                "alice_side_operator".into(),
                self.alice_side_operator.as_ref().map_or(Value::Null, |u| {
                    serde_json::to_value(u).expect("unitary serializes")
                }),
            );
        }
        Value::Object(doc)
    }
}

/// Bob-side unitary `V` with `(I ⊗ V) psi1 = psi2`, where Alice holds `alice`
/// and Bob holds the remaining registers in layout order.
///
/// Fails with [`Error::AttackInapplicable`] when Alice's reduced states differ
/// by more than [`ATTACK_TOL`] in trace distance, and with
/// [`Error::Construction`] if the final residual check does not pass.
pub fn cheating_unitary(psi1: &StateVector, psi2: &StateVector, alice: &[&str]) -> Result<UnitaryMatrix> {
    if psi1.layout() != psi2.layout() {
        return Err(Error::Layout("states have different layouts".into()));
    }
    let leak = trace_distance(&psi1.reduced(alice)?, &psi2.reduced(alice)?)?;
    if leak > ATTACK_TOL {
        return Err(Error::AttackInapplicable { deviation: leak });
    }
    let s1 = schmidt_decompose(psi1, alice)?;
    let s2 = schmidt_decompose(psi2, alice)?;
    let rank = s1.rank().min(s2.rank());

    // Align the second decomposition's left vectors with the first's, one
    // degenerate block at a time, and carry the alignment over to the right.
    let mut targets: Vec<CVector> = Vec::with_capacity(rank);
    let mut start = 0;
    while start < rank {
        let mut end = start + 1;
        while end < rank && (s1.coefficients[start] - s1.coefficients[end]).abs() <= BLOCK_TOL {
            end += 1;
        }
        let size = end - start;
        let overlap = CMatrix::from_fn(size, size, |l, k| {
            s1.left_vectors[start + l].dotc(&s2.left_vectors[start + k])
        });
        let w = polar_unitary(&overlap);
        for l in 0..size {
            let mut r = CVector::zeros(s2.right_layout.dim());
            for k in 0..size {
                r.axpy(w[(l, k)], &s2.right_vectors[start + k], Complex64::new(1.0, 0.0));
            }
            targets.push(r);
        }
        start = end;
    }

    let v = rotation_from_bases(&s1.right_vectors[..rank], &targets)?;
    let bob: Vec<&str> = s1.right_layout.names().collect();
    let residual = psi1.apply(&v, &bob)?.distance(psi2)?;
    if residual > ATTACK_TOL {
        return Err(Error::Construction { residual });
    }
    Ok(v)
}

/// Unitary factor `X Y^dagger` of the SVD `M = X S Y^dagger`.
fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    svd.u.expect("requested") * svd.v_t.expect("requested")
}

fn bob_names(circuit: &TwoPartyUnitary) -> Vec<String> {
    circuit
        .registers_of(Party::Bob)
        .into_iter()
        .map(String::from)
        .collect()
}

fn check_choice(m: usize, j: usize) -> Result<()> {
    if j >= m {
        return Err(Error::OutOfRange {
            what: "Bob input",
            value: j,
            bound: m,
        });
    }
    Ok(())
}

/// `V` on Bob's registers with `(I_DA ⊗ V)|v_j1> = |v_j2>`.
pub fn construct_cheating_unitary(spec: &ProtocolSpec, j1: usize, j2: usize) -> Result<UnitaryMatrix> {
    check_choice(spec.m(), j1)?;
    check_choice(spec.m(), j2)?;
    let v1 = spec.purified_final_state(j1)?;
    let v2 = spec.purified_final_state(j2)?;
    cheating_unitary(v1.state(), v2.state(), &v1.alice_registers())
}

/// Residuals and deviations of a candidate cheating unitary, per Alice input.
pub fn verify_attack(spec: &ProtocolSpec, v: &UnitaryMatrix, j1: usize, j2: usize) -> Result<AttackReport> {
    check_choice(spec.m(), j1)?;
    check_choice(spec.m(), j2)?;
    let circuit = spec.circuit();
    let bob = bob_names(circuit);
    let bob_refs: Vec<&str> = bob.iter().map(String::as_str).collect();

    let p1 = spec.purified_final_state(j1)?;
    let p2 = spec.purified_final_state(j2)?;
    let global_residual = p1.state().apply(v, &bob_refs)?.distance(p2.state())?;

    let mut branch_residuals = Vec::with_capacity(spec.n());
    let mut bob_deviations = Vec::with_capacity(spec.n());
    for i in 0..spec.n() {
        let before = spec.honest_final_state(i, j1)?;
        let after = spec.honest_final_state(i, j2)?;
        branch_residuals.push(before.apply(v, &bob_refs)?.distance(&after)?);
        let rotated = spec.bob_reduced_state(i, j1)?.conjugated(v)?;
        bob_deviations.push(trace_distance(&rotated, &spec.bob_reduced_state(i, j2)?)?);
    }
    let worst = bob_deviations.iter().copied().fold(0.0, f64::max);
    Ok(AttackReport {
        j1,
        j2,
        cheating_unitary: v.clone(),
        bob_registers: bob,
        global_residual,
        branch_residuals,
        bob_deviations,
        alice_side_operator: None,
        steered_residual: None,
        steered_deviation: None,
        bob_only_deviation: worst,
        inapplicable: 0,
        success: worst <= ATTACK_TOL,
    })
}

/// Swap of `|a>` and `|b>` on a `dim`-level register.
pub fn dice_swap(dim: usize, a: usize, b: usize) -> Result<UnitaryMatrix> {
    let mut perm: Vec<usize> = (0..dim).collect();
    if a >= dim || b >= dim {
        return Err(Error::OutOfRange {
            what: "dice value",
            value: a.max(b),
            bound: dim,
        });
    }
    perm.swap(a, b);
    UnitaryMatrix::from_permutation(&perm)
}

/// Lo's attack on a joint-input model.
///
/// `V` is built from the purified states. For each randomness value the
/// effective inputs are `i1 = i(r, j1)` and `i2 = i(r, j2)`; `bob_deviations`
/// lists `TD(V rho^{i1,j1} V^dagger, rho^{i2,j2})` per randomness value, and
/// the Bob-only deviation is their minimum over values with `i1 != i2` (the
/// maximum over all values if there are none). The Alice-side operator swaps
/// `|i1>` and `|i2>` on `D`; with it the `<i1|_D` branch of the state matches
/// `|v_{i2 j2}>`, which is what `steered_residual` and `steered_deviation` measure.
pub fn attack_joint_input(model: &JointInputProtocolSpec, j1: usize, j2: usize) -> Result<AttackReport> {
    check_choice(model.m(), j1)?;
    check_choice(model.m(), j2)?;
    let base = model.base();
    let bob = bob_names(base);
    let bob_refs: Vec<&str> = bob.iter().map(String::as_str).collect();

    let p1 = model.purified_final_state(j1)?;
    let p2 = model.purified_final_state(j2)?;
    let v = cheating_unitary(p1.state(), p2.state(), &p1.alice_registers())?;
    let rotated_state = p1.state().apply(&v, &bob_refs)?;
    let global_residual = rotated_state.distance(p2.state())?;

    let n = model.dice_dim();
    let mut branch_residuals = Vec::with_capacity(n);
    for i in 0..n {
        let before = base.honest_final_state(i, j1)?;
        let after = base.honest_final_state(i, j2)?;
        branch_residuals.push(before.apply(&v, &bob_refs)?.distance(&after)?);
    }

    let scale = (n as f64).sqrt();
    let mut bob_deviations = Vec::with_capacity(model.randomness_count());
    let mut steered_res = 0.0_f64;
    let mut steered_dev = 0.0_f64;
    let mut chosen: Option<(f64, usize, usize)> = None;
    for r in 0..model.randomness_count() {
        let (i1, i2) = (model.effective_input(r, j1), model.effective_input(r, j2));
        let rotated = base.bob_reduced_state(i1, j1)?.conjugated(&v)?;
        let target_rho = base.bob_reduced_state(i2, j2)?;
        let dev = trace_distance(&rotated, &target_rho)?;
        bob_deviations.push(dev);
        if i1 != i2 && chosen.is_none_or(|(best, _, _)| dev < best) {
            chosen = Some((dev, i1, i2));
        }

        let swap = dice_swap(n, i1, i2)?;
        let (branch, layout) = p1
            .state()
            .apply(&swap, &[DICE])?
            .apply(&v, &bob_refs)?
            .project(DICE, i1)?;
        let target = base.honest_final_state(i2, j2)?;
        steered_res = steered_res.max((branch.scale(scale) - target.amplitudes()).norm());
        let branch = StateVector::normalized(branch, layout)?;
        steered_dev = steered_dev.max(trace_distance(&branch.reduced(&bob_refs)?, &target_rho)?);
    }
    let worst = bob_deviations.iter().copied().fold(0.0, f64::max);
    let (bob_only_deviation, i1, i2) = match chosen {
        Some(c) => c,
        None => {
            let i = model.effective_input(0, j1);
            (worst, i, i)
        }
    };
    Ok(AttackReport {
        j1,
        j2,
        cheating_unitary: v,
        bob_registers: bob,
        global_residual,
        branch_residuals,
        bob_deviations,
        alice_side_operator: Some(dice_swap(n, i1, i2)?),
        steered_residual: Some(steered_res),
        steered_deviation: Some(steered_dev),
        bob_only_deviation,
        inapplicable: 0,
        success: worst <= ATTACK_TOL,
    })
}

/// The attack with no dice: Alice's randomness is fixed classically to each
/// value in turn and Bob gets a separate unitary for each. Values for which no
/// Bob-side unitary exists are counted in `inapplicable` and score deviation
/// 1. The report carries the unitary of the worst value.
pub fn ablation_no_dice(model: &JointInputProtocolSpec, j1: usize, j2: usize) -> Result<AttackReport> {
    check_choice(model.m(), j1)?;
    check_choice(model.m(), j2)?;
    let base = model.base();
    let bob = bob_names(base);
    let bob_refs: Vec<&str> = bob.iter().map(String::as_str).collect();
    let alice = base.registers_of(Party::Alice);

    let mut branch_residuals = Vec::with_capacity(model.randomness_count());
    let mut bob_deviations = Vec::with_capacity(model.randomness_count());
    let mut inapplicable = 0;
    let mut worst: Option<(f64, UnitaryMatrix)> = None;
    for r in 0..model.randomness_count() {
        let psi1 = model.dice_free_state(r, j1)?;
        let psi2 = model.dice_free_state(r, j2)?;
        let (i1, i2) = (model.effective_input(r, j1), model.effective_input(r, j2));
        let (residual, dev, v) = match cheating_unitary(&psi1, &psi2, &alice) {
            Ok(v) => {
                let residual = psi1.apply(&v, &bob_refs)?.distance(&psi2)?;
                let rotated = base.bob_reduced_state(i1, j1)?.conjugated(&v)?;
                let dev = trace_distance(&rotated, &base.bob_reduced_state(i2, j2)?)?;
                (residual, dev, v)
            }
            Err(Error::AttackInapplicable { .. }) => {
                inapplicable += 1;
                let dim = bob_refs
                    .iter()
                    .map(|b| base.layout().register_dim(b))
                    .product::<Result<usize>>()?;
                (f64::NAN, 1.0, UnitaryMatrix::identity(dim))
            }
            Err(e) => return Err(e),
        };
        branch_residuals.push(residual);
        bob_deviations.push(dev);
        if worst.as_ref().is_none_or(|(d, _)| dev > *d) {
            worst = Some((dev, v));
        }
    }
    let (bob_only_deviation, v) = worst.expect("at least one randomness value");
    let global_residual = branch_residuals.iter().copied().fold(0.0, f64::max);
    Ok(AttackReport {
        j1,
        j2,
        cheating_unitary: v,
        bob_registers: bob,
        global_residual: if inapplicable > 0 {
            f64::NAN
        } else {
            global_residual
        },
        branch_residuals,
        bob_deviations,
        alice_side_operator: None,
        steered_residual: None,
        steered_deviation: None,
        bob_only_deviation,
        inapplicable,
        success: bob_only_deviation <= ATTACK_TOL && inapplicable == 0,
    })
}
