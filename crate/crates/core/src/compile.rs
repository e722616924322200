//! Compilation of the n-player referee to a trapped-ion style native gate
//! set: single-qubit unitaries, CNOT blocks, and the two-qubit interaction
//! XX(θ) = e^{−iθσx⊗σx}.
//!
//! The entangler 𝒥 = e^{iπ/4·σx^{⊗n}} is realized as a CNOT-ladder
//! conjugation of one XX(−π/4) gate: CNOT(k→k+1) conjugation extends the
//! σx⊗σx exponent by one qubit at a time, so
//! 𝒥ₙ = C(n−1→n)…C(2→3) · XX(−π/4 on 1,2) · C(2→3)…C(n−1→n), exactly and
//! with no global phase left over. The dagger flips the XX angle.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::OutcomeDistribution;
use crate::protocols::{ProtocolError, QuantumStrategy};
use crate::qsim::{gates, xx_gate, QsimError, StateVector, UnitaryMatrix, MAX_QUBITS};

/// Register size limit for explicit circuit unitaries (1024×1024).
pub const MAX_UNITARY_QUBITS: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error("player count {0} out of range 2..={MAX_QUBITS}")]
    BadPlayerCount(usize),
    #[error("{got} strategies for {expected} players")]
    CountMismatch { got: usize, expected: usize },
    #[error("circuit on {0} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit unitary limit")]
    DimensionOverflow(usize),
    #[error("noise probability {0} outside [0, 1]")]
    BadNoiseProbability(f64),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("bad circuit document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Sim(#[from] QsimError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// One native operation.
#[derive(Clone, Debug, PartialEq)]
pub enum CircuitOp {
    /// XX(θ) on two qubits.
    Xx { a: usize, b: usize, theta: f64 },
    /// Controlled-NOT, kept as a primitive block.
    Cnot { control: usize, target: usize },
    /// An arbitrary validated single-qubit unitary.
    Single { target: usize, u: UnitaryMatrix },
}

impl CircuitOp {
    pub fn is_entangling(&self) -> bool {
        !matches!(self, CircuitOp::Single { .. })
    }

    fn targets(&self) -> Vec<usize> {
        match self {
            CircuitOp::Xx { a, b, .. } => vec![*a, *b],
            CircuitOp::Cnot { control, target } => vec![*control, *target],
            CircuitOp::Single { target, .. } => vec![*target],
        }
    }
}

fn cnot_matrix() -> UnitaryMatrix {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    UnitaryMatrix::new(
        2,
        vec![
            o, z, z, z, //
            z, o, z, z, //
            z, z, z, o, //
            z, z, o, z,
        ],
    )
    .expect("CNOT is unitary")
}

/// An ordered list of native operations on an n-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    qubits: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(qubits: usize, ops: Vec<CircuitOp>) -> Result<Circuit, CompileError> {
        if !(1..=MAX_QUBITS).contains(&qubits) {
            return Err(CompileError::BadPlayerCount(qubits));
        }
        for op in &ops {
            let t = op.targets();
            if t.iter().any(|&q| q >= qubits) || (t.len() == 2 && t[0] == t[1]) {
                return Err(CompileError::Malformed(format!(
                    "bad targets {t:?} on a {qubits}-qubit circuit"
                )));
            }
        }
        Ok(Circuit { qubits, ops })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    /// Number of entangling operations (XX and CNOT).
    pub fn entangling_gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_entangling()).count()
    }

    fn apply_op(&self, state: StateVector, op: &CircuitOp) -> Result<StateVector, QsimError> {
        match op {
            CircuitOp::Xx { a, b, theta } => state.apply(&xx_gate(*theta), &[*a, *b]),
            CircuitOp::Cnot { control, target } => {
                state.apply(&cnot_matrix(), &[*control, *target])
            }
            CircuitOp::Single { target, u } => state.apply(u, &[*target]),
        }
    }

    /// Run the circuit on an initial state.
    pub fn run(&self, init: StateVector) -> Result<StateVector, CompileError> {
        let mut state = init;
        for op in &self.ops {
            state = self.apply_op(state, op)?;
        }
        Ok(state)
    }

    /// The full 2ⁿ×2ⁿ unitary, built by driving every basis state through the
    /// circuit (equal to the ordered product of the expanded op matrices).
    pub fn unitary(&self) -> Result<UnitaryMatrix, CompileError> {
        if self.qubits > MAX_UNITARY_QUBITS {
            return Err(CompileError::DimensionOverflow(self.qubits));
        }
        let dim = 1usize << self.qubits;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[col] = Complex64::new(1.0, 0.0);
            let state = self.run(StateVector::from_amplitudes(self.qubits, amps)?)?;
            for (row, a) in state.amplitudes().iter().enumerate() {
                entries[row * dim + col] = *a;
            }
        }
        Ok(UnitaryMatrix::new(self.qubits, entries)?)
    }

    pub fn to_json(&self) -> String {
        let doc = CircuitDoc {
            qubits: self.qubits,
            ops: self.ops.iter().map(OpDoc::from).collect(),
        };
        crate::numfmt::to_json_string(&doc)
    }

    pub fn from_json(text: &str) -> Result<Circuit, CompileError> {
        let doc: CircuitDoc =
            serde_json::from_str(text).map_err(|e| CompileError::Malformed(e.to_string()))?;
        let ops = doc
            .ops
            .into_iter()
            .map(OpDoc::into_op)
            .collect::<Result<Vec<_>, _>>()?;
        Circuit::new(doc.qubits, ops)
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    qubits: usize,
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
struct OpDoc {
    kind: String,
    targets: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    /// Row-major 2×2 entries as [re, im] pairs, single-qubit ops only.
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
}

impl From<&CircuitOp> for OpDoc {
    fn from(op: &CircuitOp) -> OpDoc {
        match op {
            CircuitOp::Xx { a, b, theta } => OpDoc {
                kind: "xx".into(),
                targets: vec![*a, *b],
                theta: Some(*theta),
                matrix: None,
            },
            CircuitOp::Cnot { control, target } => OpDoc {
                kind: "cnot".into(),
                targets: vec![*control, *target],
                theta: None,
                matrix: None,
            },
            CircuitOp::Single { target, u } => OpDoc {
                kind: "single".into(),
                targets: vec![*target],
                theta: None,
                matrix: Some(u.entries().iter().map(|c| [c.re, c.im]).collect()),
            },
        }
    }
}

impl OpDoc {
    fn into_op(self) -> Result<CircuitOp, CompileError> {
        let two = |t: &[usize]| -> Result<(usize, usize), CompileError> {
            if t.len() == 2 {
                Ok((t[0], t[1]))
            } else {
                Err(CompileError::Malformed(format!(
                    "op `{}` expects 2 targets, got {}",
                    self.kind,
                    t.len()
                )))
            }
        };
        match self.kind.as_str() {
            "xx" => {
                let (a, b) = two(&self.targets)?;
                let theta = self
                    .theta
                    .ok_or_else(|| CompileError::Malformed("xx op without theta".into()))?;
                Ok(CircuitOp::Xx { a, b, theta })
            }
            "cnot" => {
                let (control, target) = two(&self.targets)?;
                Ok(CircuitOp::Cnot { control, target })
            }
            "single" => {
                if self.targets.len() != 1 {
                    return Err(CompileError::Malformed(
                        "single op expects 1 target".into(),
                    ));
                }
                let m = self
                    .matrix
                    .ok_or_else(|| CompileError::Malformed("single op without matrix".into()))?;
                if m.len() != 4 {
                    return Err(CompileError::Malformed(
                        "single op matrix must have 4 entries".into(),
                    ));
                }
                let u = UnitaryMatrix::new(
                    1,
                    m.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
                )?;
                Ok(CircuitOp::Single {
                    target: self.targets[0],
                    u,
                })
            }
            other => Err(CompileError::Malformed(format!("unknown op kind `{other}`"))),
        }
    }
}

/// The XX angle realizing 𝒥 (its dagger uses the opposite sign).
pub const ENTANGLER_XX_ANGLE: f64 = -std::f64::consts::FRAC_PI_4;

/// Compile 𝒥ₙ (or 𝒥ₙ† with `dagger`) to the native set: a nested CNOT
/// ladder around one XX gate on qubits 0 and 1.
pub fn compile_entangler(n: usize, dagger: bool) -> Result<Circuit, CompileError> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(CompileError::BadPlayerCount(n));
    }
    let theta = if dagger {
        -ENTANGLER_XX_ANGLE
    } else {
        ENTANGLER_XX_ANGLE
    };
    let mut ops = Vec::with_capacity(2 * n - 3);
    // Outermost CNOT first; CNOT(k→k+1) sits closer to the XX gate as k
    // decreases, so the innermost pair is CNOT(1→2) in 0-based indices.
    for k in (1..n - 1).rev() {
        ops.push(CircuitOp::Cnot {
            control: k,
            target: k + 1,
        });
    }
    ops.push(CircuitOp::Xx { a: 0, b: 1, theta });
    for k in 1..n - 1 {
        ops.push(CircuitOp::Cnot {
            control: k,
            target: k + 1,
        });
    }
    Circuit::new(n, ops)
}

/// Compile the full protocol: an X layer when the register starts all-|1⟩,
/// then 𝒥, the strategy layer, and 𝒥†.
pub fn compile_protocol(
    n: usize,
    strategies: &[QuantumStrategy],
    init_bit: u8,
) -> Result<Circuit, CompileError> {
    if strategies.len() != n {
        return Err(CompileError::CountMismatch {
            got: strategies.len(),
            expected: n,
        });
    }
    let mut ops = Vec::new();
    if init_bit == 1 {
        for q in 0..n {
            ops.push(CircuitOp::Single {
                target: q,
                u: gates::pauli_x(),
            });
        }
    }
    ops.extend(compile_entangler(n, false)?.ops);
    for (q, s) in strategies.iter().enumerate() {
        ops.push(CircuitOp::Single {
            target: q,
            u: s.matrix()?,
        });
    }
    ops.extend(compile_entangler(n, true)?.ops);
    Circuit::new(n, ops)
}

/// Scale of the phase-aligned elementwise comparison of two unitaries: the
/// candidate is multiplied by the phase matching the reference at its first
/// significant entry, then the largest elementwise deviation is returned.
pub fn phase_aligned_max_deviation(reference: &UnitaryMatrix, candidate: &UnitaryMatrix) -> f64 {
    assert_eq!(reference.dim(), candidate.dim());
    let d = reference.dim();
    let mut phase = Complex64::new(1.0, 0.0);
    for i in 0..d * d {
        let (r, c) = (i / d, i % d);
        if reference.entry(r, c).norm() > 1e-6 && candidate.entry(r, c).norm() > 1e-6 {
            let ratio = reference.entry(r, c) / candidate.entry(r, c);
            phase = ratio / Complex64::new(ratio.norm(), 0.0);
            break;
        }
    }
    let mut max_dev: f64 = 0.0;
    for r in 0..d {
        for c in 0..d {
            max_dev = max_dev.max((phase * candidate.entry(r, c) - reference.entry(r, c)).norm());
        }
    }
    max_dev
}

/// Monte-Carlo run with two-qubit depolarizing noise: after each entangling
/// op, with probability `p2q`, a uniformly random non-identity Pauli is
/// applied to each of its targets. Trial t draws from stream t of the seeded
/// generator, so results are bitwise reproducible and trials are independent.
pub fn noisy_run(
    circuit: &Circuit,
    init_bit: u8,
    p2q: f64,
    trials: u64,
    seed: u64,
) -> Result<OutcomeDistribution, CompileError> {
    if !(0.0..=1.0).contains(&p2q) || !p2q.is_finite() {
        return Err(CompileError::BadNoiseProbability(p2q));
    }
    if trials == 0 {
        return Err(CompileError::NoTrials);
    }
    let paulis = [gates::pauli_x(), gates::pauli_y(), gates::pauli_z()];
    let dim = 1usize << circuit.qubits;
    let mut acc = vec![0.0; dim];
    for trial in 0..trials {
        // Independent per-trial stream so trials can run in any order.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut state = StateVector::init(circuit.qubits, init_bit)?;
        for op in &circuit.ops {
            state = circuit.apply_op(state, op)?;
            if op.is_entangling() && rng.gen::<f64>() < p2q {
                for q in op.targets() {
                    let p = &paulis[rng.gen_range(0..3)];
                    state = state.apply(p, &[q])?;
                }
            }
        }
        for (a, s) in acc.iter_mut().zip(state.amplitudes()) {
            *a += s.norm_sqr();
        }
    }
    let t = trials as f64;
    for a in acc.iter_mut() {
        *a /= t;
    }
    Ok(OutcomeDistribution::new(acc).expect("averaged distributions stay normalized"))
}
