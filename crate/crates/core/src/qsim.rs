//! Minimal dense state-vector simulator for up to 12 qubits.
//!
//! States hold a full complex amplitude vector over 2ⁿ basis states; qubit 1
//! is the most significant index bit, matching the game outcome convention.
//! Unitarity is validated when a matrix is constructed; application trusts
//! validated matrices. Global phase is never normalized away.

use num_complex::Complex64;
use thiserror::Error;

use crate::game::OutcomeDistribution;

/// Maximum register size; a 12-qubit state holds 4096 amplitudes.
pub const MAX_QUBITS: usize = 12;

/// Elementwise tolerance for the U·U† = I check and for state norms.
pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum QsimError {
    #[error("qubit count {0} out of range 1..={MAX_QUBITS}")]
    BadQubitCount(usize),
    #[error("matrix is not unitary (max |U·U† − I| = {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix has {got} entries, expected {expected} for arity {arity}")]
    BadDimension {
        got: usize,
        expected: usize,
        arity: usize,
    },
    #[error("state norm² is {0}, not 1")]
    NotNormalized(f64),
    #[error("gate arity {arity} does not match {targets} targets")]
    ArityMismatch { arity: usize, targets: usize },
    #[error("bad target list: {0}")]
    BadTargets(String),
    #[error("tensor product of an empty factor list")]
    EmptyTensor,
    #[error("init bit must be 0 or 1, got {0}")]
    BadInitBit(u8),
}

/// A 2ᵏ×2ᵏ unitary acting on k qubits, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    arity: usize,
    dim: usize,
    entries: Vec<Complex64>,
}

impl UnitaryMatrix {
    /// Validates the dimension and U·U† = I within 1e−9 elementwise.
    pub fn new(arity: usize, entries: Vec<Complex64>) -> Result<UnitaryMatrix, QsimError> {
        let dim = 1usize << arity;
        if entries.len() != dim * dim {
            return Err(QsimError::BadDimension {
                got: entries.len(),
                expected: dim * dim,
                arity,
            });
        }
        let m = UnitaryMatrix {
            arity,
            dim,
            entries,
        };
        let dev = m.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(QsimError::NotUnitary(dev));
        }
        Ok(m)
    }

    pub fn identity(arity: usize) -> UnitaryMatrix {
        let dim = 1usize << arity;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        UnitaryMatrix {
            arity,
            dim,
            entries,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> UnitaryMatrix {
        let mut entries = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for r in 0..self.dim {
            for c in 0..self.dim {
                entries[c * self.dim + r] = self.entry(r, c).conj();
            }
        }
        UnitaryMatrix {
            arity: self.arity,
            dim: self.dim,
            entries,
        }
    }

    /// Matrix product self·rhs (both operands must share the arity).
    pub fn mul(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        assert_eq!(self.dim, rhs.dim, "arity mismatch in matrix product");
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        UnitaryMatrix {
            arity: self.arity,
            dim: d,
            entries,
        }
    }

    fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut max_dev: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                // (U·U†)[r][c] = Σ_k U[r][k]·conj(U[c][k])
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.entries[r * d + k] * self.entries[c * d + k].conj();
                }
                let target = if r == c { 1.0 } else { 0.0 };
                max_dev = max_dev.max((acc - Complex64::new(target, 0.0)).norm());
            }
        }
        max_dev
    }
}

/// Kronecker product of the factors in list order; the first factor owns the
/// most significant qubit.
pub fn tensor(factors: &[&UnitaryMatrix]) -> Result<UnitaryMatrix, QsimError> {
    let (first, rest) = factors.split_first().ok_or(QsimError::EmptyTensor)?;
    let mut arity = first.arity;
    let mut dim = first.dim;
    let mut entries = first.entries.clone();
    for f in rest {
        let nd = dim * f.dim;
        let mut next = vec![Complex64::new(0.0, 0.0); nd * nd];
        for r1 in 0..dim {
            for c1 in 0..dim {
                let a = entries[r1 * dim + c1];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for r2 in 0..f.dim {
                    for c2 in 0..f.dim {
                        next[(r1 * f.dim + r2) * nd + (c1 * f.dim + c2)] =
                            a * f.entries[r2 * f.dim + c2];
                    }
                }
            }
        }
        arity += f.arity;
        dim = nd;
        entries = next;
    }
    Ok(UnitaryMatrix {
        arity,
        dim,
        entries,
    })
}

/// Fixed single-qubit matrices.
pub mod gates {
    use super::UnitaryMatrix;
    use num_complex::Complex64;

    fn m2(e: [(f64, f64); 4]) -> UnitaryMatrix {
        UnitaryMatrix::new(1, e.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
            .expect("constant gate is unitary")
    }

    pub fn pauli_x() -> UnitaryMatrix {
        m2([(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
    }

    pub fn pauli_y() -> UnitaryMatrix {
        m2([(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)])
    }

    pub fn pauli_z() -> UnitaryMatrix {
        m2([(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)])
    }

    /// The Short gate D = [[0, 1], [−1, 0]] (= i·Pauli-Y).
    pub fn short_d() -> UnitaryMatrix {
        m2([(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 0.0)])
    }
}

/// The two-qubit interaction e^{−iθ·σx⊗σx} = cos θ·I − i sin θ·(σx⊗σx).
pub fn xx_gate(theta: f64) -> UnitaryMatrix {
    let c = Complex64::new(theta.cos(), 0.0);
    let ms = Complex64::new(0.0, -theta.sin());
    let z = Complex64::new(0.0, 0.0);
    UnitaryMatrix {
        arity: 2,
        dim: 4,
        entries: vec![
            c, z, z, ms, //
            z, c, ms, z, //
            z, ms, c, z, //
            ms, z, z, c,
        ],
    }
}

/// Exponent basis for [`entangler`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntanglerBasis {
    /// σx⊗…⊗σx; valid for any register size.
    PauliX,
    /// D⊗…⊗D with `D = [[0,1],[−1,0]]`; the exponent is Hermitian only for an
    /// even number of factors, so odd sizes are rejected.
    ShortD,
}

/// The entangling/disentangling gate e^{i·sign·(π/4)·B^{⊗n}}
/// = cos(π/4)·I + i·sign·sin(π/4)·B^{⊗n}, in closed form (B^{⊗n} squares to
/// the identity for the accepted bases/sizes).
pub fn entangler(basis: EntanglerBasis, sign: i8, n: usize) -> Result<UnitaryMatrix, QsimError> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(QsimError::BadQubitCount(n));
    }
    if basis == EntanglerBasis::ShortD && !n.is_multiple_of(2) {
        return Err(QsimError::BadTargets(format!(
            "D-basis entangler needs an even qubit count, got {n}"
        )));
    }
    let b = match basis {
        EntanglerBasis::PauliX => gates::pauli_x(),
        EntanglerBasis::ShortD => gates::short_d(),
    };
    let factors: Vec<&UnitaryMatrix> = vec![&b; n];
    let m = tensor(&factors)?;
    let dim = m.dim;
    let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let is = Complex64::new(0.0, f64::from(sign) * std::f64::consts::FRAC_1_SQRT_2);
    let mut entries = m.entries;
    for e in entries.iter_mut() {
        *e *= is;
    }
    for i in 0..dim {
        entries[i * dim + i] += c;
    }
    Ok(UnitaryMatrix {
        arity: n,
        dim,
        entries,
    })
}

/// A pure state of an n-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The basis state |bb…b⟩.
    pub fn init(n: usize, bit: u8) -> Result<StateVector, QsimError> {
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(QsimError::BadQubitCount(n));
        }
        if bit > 1 {
            return Err(QsimError::BadInitBit(bit));
        }
        let size = 1usize << n;
        let index = if bit == 0 { 0 } else { size - 1 };
        let mut amps = vec![Complex64::new(0.0, 0.0); size];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubits: n, amps })
    }

    /// Wrap raw amplitudes; the norm must be 1 within 1e−9.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<StateVector, QsimError> {
        if !(1..=MAX_QUBITS).contains(&n) || amps.len() != 1usize << n {
            return Err(QsimError::BadQubitCount(n));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > UNITARY_TOL {
            return Err(QsimError::NotNormalized(norm2));
        }
        Ok(StateVector { qubits: n, amps })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply `u` to the ordered `targets` (0-based, target 0 of the gate is
    /// its most significant qubit), identity elsewhere.
    pub fn apply(&self, u: &UnitaryMatrix, targets: &[usize]) -> Result<StateVector, QsimError> {
        let k = targets.len();
        if u.arity != k {
            return Err(QsimError::ArityMismatch {
                arity: u.arity,
                targets: k,
            });
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.qubits {
                return Err(QsimError::BadTargets(format!(
                    "target {t} out of range for {} qubits",
                    self.qubits
                )));
            }
            if targets[..i].contains(&t) {
                return Err(QsimError::BadTargets(format!("duplicate target {t}")));
            }
        }
        // Bit position (from LSB) of each target; gate bit j is target[j],
        // with target[0] the most significant gate bit.
        let positions: Vec<usize> = targets.iter().map(|&t| self.qubits - 1 - t).collect();
        let target_mask: usize = positions.iter().map(|&p| 1usize << p).sum();
        let gate_dim = u.dim;
        let sub_index = |base: usize, g: usize| -> usize {
            let mut idx = base;
            for (j, &p) in positions.iter().enumerate() {
                if (g >> (k - 1 - j)) & 1 == 1 {
                    idx |= 1 << p;
                }
            }
            idx
        };
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for base in 0..self.amps.len() {
            if base & target_mask != 0 {
                continue;
            }
            for r in 0..gate_dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..gate_dim {
                    acc += u.entries[r * gate_dim + c] * self.amps[sub_index(base, c)];
                }
                out[sub_index(base, r)] = acc;
            }
        }
        Ok(StateVector {
            qubits: self.qubits,
            amps: out,
        })
    }

    /// Measurement probabilities |aᵢ|² per outcome index.
    pub fn measure_distribution(&self) -> OutcomeDistribution {
        OutcomeDistribution::new(self.amps.iter().map(|a| a.norm_sqr()).collect())
            .expect("unit-norm state yields a normalized distribution")
    }

    /// One line per amplitude: "index bitstring re im", 12 significant digits.
    pub fn debug_dump(&self) -> String {
        let n = self.qubits;
        self.amps
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let bits: String = (0..n)
                    .map(|q| char::from(b'0' + ((idx >> (n - 1 - q)) & 1) as u8))
                    .collect();
                format!("{idx} {bits} {:.11e} {:.11e}", a.re, a.im)
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}
