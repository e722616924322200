//! Shared test oracles, independent of the library's computation paths:
//! a Taylor-series matrix exponential, Gram-Schmidt random unitaries, and an
//! explicit embedded-matrix construction for gate application.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)] // index-parallel loops in oracles

use num_complex::Complex64;
use rand::Rng;
use qtg_core::qsim::UnitaryMatrix;

pub const Z: Complex64 = Complex64::new(0.0, 0.0);

/// Dense complex matrix used only by oracles.
#[derive(Clone, Debug)]
pub struct Cm {
    pub dim: usize,
    pub e: Vec<Complex64>,
}

impl Cm {
    pub fn zeros(dim: usize) -> Cm {
        Cm {
            dim,
            e: vec![Z; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Cm {
        let mut m = Cm::zeros(dim);
        for i in 0..dim {
            m.e[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.e[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.e[r * self.dim + c] = v;
    }

    pub fn mul(&self, rhs: &Cm) -> Cm {
        let d = self.dim;
        let mut out = Cm::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a == Z {
                    continue;
                }
                for c in 0..d {
                    out.e[r * d + c] += a * rhs.get(k, c);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Cm {
        Cm {
            dim: self.dim,
            e: self.e.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Cm) -> Cm {
        Cm {
            dim: self.dim,
            e: self.e.iter().zip(&rhs.e).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn kron(&self, rhs: &Cm) -> Cm {
        let (d1, d2) = (self.dim, rhs.dim);
        let nd = d1 * d2;
        let mut out = Cm::zeros(nd);
        for r1 in 0..d1 {
            for c1 in 0..d1 {
                let a = self.get(r1, c1);
                if a == Z {
                    continue;
                }
                for r2 in 0..d2 {
                    for c2 in 0..d2 {
                        out.e[(r1 * d2 + r2) * nd + (c1 * d2 + c2)] = a * rhs.get(r2, c2);
                    }
                }
            }
        }
        out
    }

    pub fn from_unitary(u: &UnitaryMatrix) -> Cm {
        Cm {
            dim: u.dim(),
            e: u.entries().to_vec(),
        }
    }

    pub fn max_abs_diff(&self, rhs: &Cm) -> f64 {
        self.e
            .iter()
            .zip(&rhs.e)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim;
        (0..d)
            .map(|r| (0..d).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }
}

pub fn pauli_x_cm() -> Cm {
    let mut m = Cm::zeros(2);
    m.set(0, 1, Complex64::new(1.0, 0.0));
    m.set(1, 0, Complex64::new(1.0, 0.0));
    m
}

pub fn short_d_cm() -> Cm {
    let mut m = Cm::zeros(2);
    m.set(0, 1, Complex64::new(1.0, 0.0));
    m.set(1, 0, Complex64::new(-1.0, 0.0));
    m
}

/// e^{s·M} by plain Taylor series; converges fast for the π/4-scale
/// exponents used here.
pub fn expm_taylor(m: &Cm, s: Complex64) -> Cm {
    let mut result = Cm::identity(m.dim);
    let mut term = Cm::identity(m.dim);
    for k in 1..=60 {
        term = term.mul(m).scale(s / Complex64::new(k as f64, 0.0));
        result = result.add(&term);
        let biggest = term.e.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if biggest < 1e-18 {
            break;
        }
    }
    result
}

/// Haar-ish random unitary via Gram-Schmidt on a random complex Gaussian
/// matrix (good enough for property tests).
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> UnitaryMatrix {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        Complex64::new(
                            gaussian(rng),
                            gaussian(rng),
                        )
                    })
                    .collect()
            })
            .collect();
        let mut ok = true;
        for i in 0..dim {
            for j in 0..i {
                let proj: Complex64 = (0..dim).map(|k| cols[j][k].conj() * cols[i][k]).sum();
                for k in 0..dim {
                    let sub = proj * cols[j][k];
                    cols[i][k] -= sub;
                }
            }
            let norm: f64 = cols[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for k in 0..dim {
                cols[i][k] /= norm;
            }
        }
        if !ok {
            continue;
        }
        let arity = dim.trailing_zeros() as usize;
        let mut entries = vec![Z; dim * dim];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                entries[r * dim + c] = *v;
            }
        }
        if let Ok(u) = UnitaryMatrix::new(arity, entries) {
            return u;
        }
    }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Embed a k-qubit gate acting on `targets` of an n-qubit register as an
/// explicit 2ⁿ×2ⁿ matrix (target 0 = most significant gate bit, qubit 0 =
/// most significant register bit).
pub fn embed_gate(u: &UnitaryMatrix, targets: &[usize], n: usize) -> Cm {
    let k = targets.len();
    let dim = 1usize << n;
    let mut out = Cm::zeros(dim);
    for col in 0..dim {
        let gcol = (0..k).fold(0usize, |acc, j| {
            (acc << 1) | ((col >> (n - 1 - targets[j])) & 1)
        });
        for grow in 0..1usize << k {
            let mut row = col;
            for (j, &t) in targets.iter().enumerate() {
                let bit = (grow >> (k - 1 - j)) & 1;
                let pos = n - 1 - t;
                row = (row & !(1usize << pos)) | (bit << pos);
            }
            let v = u.entry(grow, gcol);
            if v != Z {
                out.e[row * dim + col] += v;
            }
        }
    }
    out
}
