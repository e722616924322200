//! Trading games, classically and under quantum referees.
//!
//! The crate models n-trader, two-strategy normal-form games (Long vs.
//! Short), checks their classical equilibria (pure/mixed Nash, correlated
//! equilibria induced by a refereeing distribution), evaluates the EWL and
//! Du quantum-referee protocols on an exact state-vector simulator, and
//! compiles the quantum referees to a trapped-ion style native gate set
//! (CNOT + XX(θ) + single-qubit unitaries) with equivalence verification
//! and a depolarizing noise model.
//!
//! Modules
//! - [`game`]: games, payoffs, pure/mixed Nash, dominance.
//! - [`referee`]: classical correlation devices and obedience analysis.
//! - [`qsim`]: dense state vectors and unitary matrices, up to 12 qubits.
//! - [`protocols`]: quantum strategies and the EWL / Du referee circuits.
//! - [`compile`]: native-gate compilation, gate counts, noise injection.
//! - [`lab`]: parameter sweeps, equilibrium verification, CSV emission.

pub mod compile;
pub mod game;
pub mod lab;
pub mod numfmt;
pub mod protocols;
pub mod qsim;
pub mod referee;
