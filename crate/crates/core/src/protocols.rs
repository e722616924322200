//! Quantum strategies and the EWL / Du quantum-referee protocols.
//!
//! A quantum strategy is a single-qubit unitary a trader applies to their
//! qubit between the referee's entangling and disentangling gates. Three
//! parametrized families are supported together with the named constants the
//! protocols are usually discussed in terms of:
//!
//! - EWL form U(θ,φ) = [[e^{iφ}cos(θ/2), sin(θ/2)], [−sin(θ/2), e^{−iφ}cos(θ/2)]]
//! - Du form  U(θ,φ) = [[cos(θ/2), e^{iφ}sin(θ/2)], [−e^{−iφ}sin(θ/2), cos(θ/2)]]
//! - full form U(α,θ,γ) = [[e^{iα}cos(θ/2), e^{iγ}sin(θ/2)], [−e^{−iγ}sin(θ/2), e^{−iα}cos(θ/2)]]
//!
//! with `θ ∈ [0,π]`, `φ ∈ [0,π/2]`, `α,γ ∈ [0,2π]`.
//!
//! The two-player referee applies J = e^{iπ/4(D⊗D)} and J†; this sign makes
//! the simulated distributions coincide with the closed-form amplitudes (see
//! [`ewl_amplitudes_closed_form`]). The n-player referee applies
//! 𝒥 = e^{iπ/4·σx^{⊗n}} and its inverse, with the register initialized to
//! all-|1⟩ for even player counts by default.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameError, NormalFormGame, OutcomeDistribution};
use crate::qsim::{entangler, EntanglerBasis, QsimError, StateVector, UnitaryMatrix, MAX_QUBITS};

const RANGE_EPS: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("game has {game} players but {strategies} strategies were given")]
    CountMismatch { game: usize, strategies: usize },
    #[error("player count {0} out of range 2..={MAX_QUBITS}")]
    BadPlayerCount(usize),
    #[error("protocol requires a 2-player game, got {0} players")]
    NotTwoPlayer(usize),
    #[error("mixture weights sum to {0}, not 1")]
    BadWeights(f64),
    #[error("mixture weight {0} is negative")]
    NegativeWeight(f64),
    #[error("empty mixture")]
    EmptyMixture,
    #[error("cannot parse strategy `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Sim(#[from] QsimError),
}

/// A named constant strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NamedStrategy {
    /// The identity: keep the qubit as advised.
    Long,
    /// `D = [[0,1],[−1,0]]`: the classical flip.
    Short,
    /// diag(i, −i): the θ=0, φ=π/2 strategy.
    QuantumLong,
    /// diag(−i, i), written "quantumLong1" on the command line.
    #[serde(rename = "quantumLong1")]
    QuantumLong1,
    /// [[0,−i],[−i,0]] = −i·σx; reachable only through the full form.
    QuantumShort,
}

impl NamedStrategy {
    pub const ALL: [NamedStrategy; 5] = [
        NamedStrategy::Long,
        NamedStrategy::Short,
        NamedStrategy::QuantumLong,
        NamedStrategy::QuantumLong1,
        NamedStrategy::QuantumShort,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NamedStrategy::Long => "long",
            NamedStrategy::Short => "short",
            NamedStrategy::QuantumLong => "quantumLong",
            NamedStrategy::QuantumLong1 => "quantumLong1",
            NamedStrategy::QuantumShort => "quantumShort",
        }
    }

    fn parse(name: &str) -> Option<NamedStrategy> {
        NamedStrategy::ALL
            .into_iter()
            .find(|n| n.label().eq_ignore_ascii_case(name))
    }
}

/// A single-qubit quantum strategy in one of the supported forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum QuantumStrategy {
    Ewl { theta: f64, phi: f64 },
    Du { theta: f64, phi: f64 },
    Full { alpha: f64, theta: f64, gamma: f64 },
    Named { name: NamedStrategy },
}

fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<(), ProtocolError> {
    if value.is_finite() && (min - RANGE_EPS..=max + RANGE_EPS).contains(&value) {
        Ok(())
    } else {
        Err(ProtocolError::OutOfRange {
            name,
            value,
            min,
            max,
        })
    }
}

impl QuantumStrategy {
    pub fn named(name: NamedStrategy) -> QuantumStrategy {
        QuantumStrategy::Named { name }
    }

    /// The realized 2×2 unitary. Parameters are range-checked per form.
    pub fn matrix(&self) -> Result<UnitaryMatrix, ProtocolError> {
        use std::f64::consts::{FRAC_PI_2, PI};
        let c = Complex64::new(0.0, 0.0);
        let entries = match *self {
            QuantumStrategy::Ewl { theta, phi } => {
                check_range("theta", theta, 0.0, PI)?;
                check_range("phi", phi, 0.0, FRAC_PI_2)?;
                let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let e = Complex64::from_polar(1.0, phi);
                vec![
                    e * ct,
                    Complex64::new(st, 0.0),
                    Complex64::new(-st, 0.0),
                    e.conj() * ct,
                ]
            }
            QuantumStrategy::Du { theta, phi } => {
                check_range("theta", theta, 0.0, PI)?;
                check_range("phi", phi, 0.0, FRAC_PI_2)?;
                let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let e = Complex64::from_polar(1.0, phi);
                vec![
                    Complex64::new(ct, 0.0),
                    e * st,
                    -e.conj() * st,
                    Complex64::new(ct, 0.0),
                ]
            }
            QuantumStrategy::Full { alpha, theta, gamma } => {
                check_range("alpha", alpha, 0.0, 2.0 * PI)?;
                check_range("theta", theta, 0.0, PI)?;
                check_range("gamma", gamma, 0.0, 2.0 * PI)?;
                let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let ea = Complex64::from_polar(1.0, alpha);
                let eg = Complex64::from_polar(1.0, gamma);
                vec![ea * ct, eg * st, -eg.conj() * st, ea.conj() * ct]
            }
            QuantumStrategy::Named { name } => match name {
                NamedStrategy::Long => vec![
                    Complex64::new(1.0, 0.0),
                    c,
                    c,
                    Complex64::new(1.0, 0.0),
                ],
                NamedStrategy::Short => vec![
                    c,
                    Complex64::new(1.0, 0.0),
                    Complex64::new(-1.0, 0.0),
                    c,
                ],
                NamedStrategy::QuantumLong => vec![
                    Complex64::new(0.0, 1.0),
                    c,
                    c,
                    Complex64::new(0.0, -1.0),
                ],
                NamedStrategy::QuantumLong1 => vec![
                    Complex64::new(0.0, -1.0),
                    c,
                    c,
                    Complex64::new(0.0, 1.0),
                ],
                NamedStrategy::QuantumShort => vec![
                    c,
                    Complex64::new(0.0, -1.0),
                    Complex64::new(0.0, -1.0),
                    c,
                ],
            },
        };
        Ok(UnitaryMatrix::new(1, entries)?)
    }

    /// Parse the command-line syntax `form:key=value,…`, e.g.
    /// `ewl:theta=pi,phi=0`, `full:alpha=0,theta=pi/2,gamma=0`,
    /// `named:quantumLong`. Angles accept decimals or pi literals.
    pub fn parse(input: &str) -> Result<QuantumStrategy, ProtocolError> {
        let err = |reason: String| ProtocolError::Parse {
            input: input.to_string(),
            reason,
        };
        let (form, rest) = input
            .split_once(':')
            .ok_or_else(|| err("expected `form:...`".into()))?;
        let form = form.trim().to_ascii_lowercase();
        if form == "named" {
            let name = NamedStrategy::parse(rest.trim())
                .ok_or_else(|| err(format!("unknown named strategy `{}`", rest.trim())))?;
            return Ok(QuantumStrategy::named(name));
        }
        let mut theta = None;
        let mut phi = None;
        let mut alpha = None;
        let mut gamma = None;
        for pair in rest.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key=value`, got `{pair}`")))?;
            let angle = crate::numfmt::parse_angle(value).map_err(err)?;
            match key.trim() {
                "theta" => theta = Some(angle),
                "phi" => phi = Some(angle),
                "alpha" => alpha = Some(angle),
                "gamma" => gamma = Some(angle),
                other => return Err(err(format!("unknown parameter `{other}`"))),
            }
        }
        let req = |opt: Option<f64>, name: &str| {
            opt.ok_or_else(|| err(format!("missing parameter `{name}`")))
        };
        let strategy = match form.as_str() {
            "ewl" => QuantumStrategy::Ewl {
                theta: req(theta, "theta")?,
                phi: req(phi, "phi")?,
            },
            "du" => QuantumStrategy::Du {
                theta: req(theta, "theta")?,
                phi: req(phi, "phi")?,
            },
            "full" => QuantumStrategy::Full {
                alpha: req(alpha, "alpha")?,
                theta: req(theta, "theta")?,
                gamma: req(gamma, "gamma")?,
            },
            other => return Err(err(format!("unknown form `{other}`"))),
        };
        strategy.matrix()?; // surface range errors at parse time
        Ok(strategy)
    }
}

/// A probabilistic mixture of quantum strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedQuantumStrategy {
    components: Vec<MixtureComponent>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub strategy: QuantumStrategy,
}

impl MixedQuantumStrategy {
    pub fn new(components: Vec<(f64, QuantumStrategy)>) -> Result<MixedQuantumStrategy, ProtocolError> {
        if components.is_empty() {
            return Err(ProtocolError::EmptyMixture);
        }
        let mut sum = 0.0;
        for &(w, _) in &components {
            if !w.is_finite() || w < 0.0 {
                return Err(ProtocolError::NegativeWeight(w));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(ProtocolError::BadWeights(sum));
        }
        Ok(MixedQuantumStrategy {
            components: components
                .into_iter()
                .map(|(weight, strategy)| MixtureComponent { weight, strategy })
                .collect(),
        })
    }

    pub fn pure(strategy: QuantumStrategy) -> MixedQuantumStrategy {
        MixedQuantumStrategy {
            components: vec![MixtureComponent {
                weight: 1.0,
                strategy,
            }],
        }
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    /// Parse the JSON schema `[{"weight": w, "strategy": {"form": …}}, …]`.
    pub fn from_json(text: &str) -> Result<MixedQuantumStrategy, ProtocolError> {
        let components: Vec<MixtureComponent> =
            serde_json::from_str(text).map_err(|e| ProtocolError::Parse {
                input: text.to_string(),
                reason: e.to_string(),
            })?;
        MixedQuantumStrategy::new(
            components
                .into_iter()
                .map(|c| (c.weight, c.strategy))
                .collect(),
        )
    }
}

/// Trader 1's probabilistic equilibrium advice: half Long, half diag(−i, i).
pub fn equilibrium_mixture_trader1() -> MixedQuantumStrategy {
    MixedQuantumStrategy::new(vec![
        (0.5, QuantumStrategy::named(NamedStrategy::Long)),
        (0.5, QuantumStrategy::named(NamedStrategy::QuantumLong1)),
    ])
    .expect("constant mixture is normalized")
}

/// Trader 2's probabilistic equilibrium advice: half Short, half −i·σx.
pub fn equilibrium_mixture_trader2() -> MixedQuantumStrategy {
    MixedQuantumStrategy::new(vec![
        (0.5, QuantumStrategy::named(NamedStrategy::Short)),
        (0.5, QuantumStrategy::named(NamedStrategy::QuantumShort)),
    ])
    .expect("constant mixture is normalized")
}

/// Outcome of one protocol evaluation. `final_state` is present for pure
/// strategy profiles; mixed play averages classical outcome distributions, so
/// no single pure state exists there.
#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub final_state: Option<StateVector>,
    pub distribution: OutcomeDistribution,
    pub payoffs: Vec<f64>,
}

/// Closed-form referee superposition (μ₁, μ₂, μ₃, μ₄) for two EWL-form
/// strategies. Satisfies Σ|μᵢ|² = 1; |μᵢ|² equals the simulated outcome
/// distribution of [`play_ewl2`], while the amplitudes themselves differ from
/// the circuit output by a factor i on μ₂ and μ₃.
pub fn ewl_amplitudes_closed_form(
    theta1: f64,
    phi1: f64,
    theta2: f64,
    phi2: f64,
) -> Result<[Complex64; 4], ProtocolError> {
    use std::f64::consts::{FRAC_PI_2, PI};
    check_range("theta1", theta1, 0.0, PI)?;
    check_range("theta2", theta2, 0.0, PI)?;
    check_range("phi1", phi1, 0.0, FRAC_PI_2)?;
    check_range("phi2", phi2, 0.0, FRAC_PI_2)?;
    let (c1, s1) = ((theta1 / 2.0).cos(), (theta1 / 2.0).sin());
    let (c2, s2) = ((theta2 / 2.0).cos(), (theta2 / 2.0).sin());
    let mu1 = Complex64::new((phi1 + phi2).cos() * c1 * c2, 0.0);
    let mu2 = Complex64::new(0.0, -(phi2.sin() * s1 * c2 - phi1.cos() * c1 * s2));
    let mu3 = Complex64::new(0.0, -(phi1.sin() * c1 * s2 - phi2.cos() * s1 * c2));
    let mu4 = Complex64::new((phi1 + phi2).sin() * c1 * c2 + s1 * s2, 0.0);
    Ok([mu1, mu2, mu3, mu4])
}

fn game_phase_j() -> UnitaryMatrix {
    entangler(EntanglerBasis::ShortD, 1, 2).expect("2-qubit D entangler")
}

/// Run the two-player quantum referee: J† (U₁⊗U₂) J |00⟩, measure, score.
pub fn play_ewl2(
    game: &NormalFormGame,
    s1: &QuantumStrategy,
    s2: &QuantumStrategy,
) -> Result<ProtocolResult, ProtocolError> {
    if game.players() != 2 {
        return Err(ProtocolError::NotTwoPlayer(game.players()));
    }
    let j = game_phase_j();
    let state = StateVector::init(2, 0)?
        .apply(&j, &[0, 1])?
        .apply(&s1.matrix()?, &[0])?
        .apply(&s2.matrix()?, &[1])?
        .apply(&j.dagger(), &[0, 1])?;
    let distribution = state.measure_distribution();
    let payoffs = game.expected_payoffs(&distribution)?;
    Ok(ProtocolResult {
        final_state: Some(state),
        distribution,
        payoffs,
    })
}

/// Default register initialization for the n-player referee: all-|1⟩ for even
/// player counts, all-|0⟩ for odd.
pub fn default_init_bit(players: usize) -> u8 {
    if players.is_multiple_of(2) {
        1
    } else {
        0
    }
}

/// Run the n-player quantum referee 𝒥† (U₁⊗…⊗Uₙ) 𝒥 |b…b⟩ with
/// 𝒥 = e^{iπ/4·σx^{⊗n}}. `init_bit = None` selects the parity default.
pub fn play_du(
    game: &NormalFormGame,
    strategies: &[QuantumStrategy],
    init_bit: Option<u8>,
) -> Result<ProtocolResult, ProtocolError> {
    let n = game.players();
    if strategies.len() != n {
        return Err(ProtocolError::CountMismatch {
            game: n,
            strategies: strategies.len(),
        });
    }
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(ProtocolError::BadPlayerCount(n));
    }
    let bit = init_bit.unwrap_or_else(|| default_init_bit(n));
    let j = entangler(EntanglerBasis::PauliX, 1, n)?;
    let targets: Vec<usize> = (0..n).collect();
    let mut state = StateVector::init(n, bit)?.apply(&j, &targets)?;
    for (q, s) in strategies.iter().enumerate() {
        state = state.apply(&s.matrix()?, &[q])?;
    }
    let state = state.apply(&j.dagger(), &targets)?;
    let distribution = state.measure_distribution();
    let payoffs = game.expected_payoffs(&distribution)?;
    Ok(ProtocolResult {
        final_state: Some(state),
        distribution,
        payoffs,
    })
}

/// Two-player protocol under probabilistic advice: the outcome distribution
/// is the product-weighted average over all component pairs, and payoffs are
/// taken from the averaged distribution.
pub fn play_mixed_quantum(
    game: &NormalFormGame,
    m1: &MixedQuantumStrategy,
    m2: &MixedQuantumStrategy,
) -> Result<ProtocolResult, ProtocolError> {
    if game.players() != 2 {
        return Err(ProtocolError::NotTwoPlayer(game.players()));
    }
    let mut probs = vec![0.0; game.outcome_count()];
    let mut pure_state = None;
    let single = m1.components.len() == 1 && m2.components.len() == 1;
    for c1 in &m1.components {
        for c2 in &m2.components {
            let w = c1.weight * c2.weight;
            let result = play_ewl2(game, &c1.strategy, &c2.strategy)?;
            for (acc, p) in probs.iter_mut().zip(result.distribution.probs()) {
                *acc += w * p;
            }
            if single {
                pure_state = result.final_state;
            }
        }
    }
    let distribution = OutcomeDistribution::new(probs)?;
    let payoffs = game.expected_payoffs(&distribution)?;
    Ok(ProtocolResult {
        final_state: pure_state,
        distribution,
        payoffs,
    })
}

/// Draw `shots` outcomes from `dist` (inverse-CDF sampling, ChaCha-seeded)
/// and return the counts.
pub fn sample_shots(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Vec<u64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..shots {
        let mut u: f64 = rng.gen();
        let mut chosen = dist.len() - 1;
        for (i, &p) in dist.probs().iter().enumerate() {
            if u < p {
                chosen = i;
                break;
            }
            u -= p;
        }
        counts[chosen] += 1;
    }
    counts
}
