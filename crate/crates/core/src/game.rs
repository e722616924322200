//! n-trader, two-strategy normal-form games and their classical analysis.
//!
//! Outcomes are bitstrings of length n with bit i owned by trader i
//! (0 = Long, 1 = Short); trader 1 owns the most significant bit, so the
//! outcome index is Σ bᵢ·2^(n−i). Player indices are 0-based internally
//! and 1-based in display output.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on player count, matching the simulator's qubit budget.
pub const MAX_PLAYERS: usize = 12;

/// Tolerance for distribution normalization checks.
pub const NORM_TOL: f64 = 1e-9;

/// Negative probability entries larger than this (in magnitude) are rejected;
/// smaller ones are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("unknown game `{0}`")]
    UnknownGame(String),
    #[error("game `{0}` requires parameters (V, C)")]
    MissingParams(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("player count {0} out of range 2..={MAX_PLAYERS}")]
    BadPlayerCount(usize),
    #[error("malformed game document: {0}")]
    Malformed(String),
    #[error("incomplete payoff table: missing outcome `{0}`")]
    IncompletePayoffTable(String),
    #[error("bad outcome key `{0}`")]
    BadOutcomeKey(String),
    #[error("outcome `{key}` has {got} payoffs, expected {expected}")]
    WrongPayoffLength {
        key: String,
        got: usize,
        expected: usize,
    },
    #[error("non-finite payoff at outcome `{0}`")]
    NonFinitePayoff(String),
    #[error("profile has {got} strategies, game has {expected} players")]
    ProfileLength { got: usize, expected: usize },
    #[error("player index {0} out of range")]
    PlayerOutOfRange(usize),
    #[error("distribution has {got} entries, game has {expected} outcomes")]
    DistributionLength { got: usize, expected: usize },
    #[error("distribution entry {index} is negative ({value})")]
    NegativeProbability { index: usize, value: f64 },
    #[error("distribution sums to {0}, not 1")]
    Unnormalized(f64),
    #[error("operation requires a 2-player game, got {0} players")]
    NotTwoPlayer(usize),
}

/// One of the two trading strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Long = 0,
    Short = 1,
}

impl Strategy {
    pub fn from_bit(bit: usize) -> Strategy {
        if bit == 0 {
            Strategy::Long
        } else {
            Strategy::Short
        }
    }

    pub fn bit(self) -> usize {
        self as usize
    }

    pub fn other(self) -> Strategy {
        match self {
            Strategy::Long => Strategy::Short,
            Strategy::Short => Strategy::Long,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Long => "long",
            Strategy::Short => "short",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A pure strategy choice for every player.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrategyProfile(Vec<Strategy>);

impl StrategyProfile {
    pub fn new(choices: Vec<Strategy>) -> StrategyProfile {
        StrategyProfile(choices)
    }

    /// Profile corresponding to an outcome index (trader 1 = MSB).
    pub fn from_outcome_index(index: usize, players: usize) -> StrategyProfile {
        let choices = (0..players)
            .map(|p| Strategy::from_bit((index >> (players - 1 - p)) & 1))
            .collect();
        StrategyProfile(choices)
    }

    pub fn outcome_index(&self) -> usize {
        let n = self.0.len();
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (p, s)| acc | (s.bit() << (n - 1 - p)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn choices(&self) -> &[Strategy] {
        &self.0
    }

    /// Outcome key as used in game documents, e.g. "01".
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|s| if *s == Strategy::Long { '0' } else { '1' })
            .collect()
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.0.iter().map(|s| s.label()).collect();
        write!(f, "({})", labels.join(", "))
    }
}

/// Per-player probability of playing Long.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile {
    p_long: Vec<f64>,
}

impl MixedProfile {
    pub fn new(p_long: Vec<f64>) -> Result<MixedProfile, GameError> {
        for (i, p) in p_long.iter().enumerate() {
            if !(0.0..=1.0).contains(p) || !p.is_finite() {
                return Err(GameError::InvalidParam(format!(
                    "p_long[{i}] = {p} outside [0, 1]"
                )));
            }
        }
        Ok(MixedProfile { p_long })
    }

    pub fn p_long(&self) -> &[f64] {
        &self.p_long
    }

    /// The induced product distribution over outcomes.
    pub fn outcome_distribution(&self) -> OutcomeDistribution {
        let n = self.p_long.len();
        let probs = (0..1usize << n)
            .map(|idx| {
                (0..n).fold(1.0, |acc, p| {
                    let bit = (idx >> (n - 1 - p)) & 1;
                    acc * if bit == 0 {
                        self.p_long[p]
                    } else {
                        1.0 - self.p_long[p]
                    }
                })
            })
            .collect();
        OutcomeDistribution::new(probs).expect("product distribution is normalized")
    }
}

/// A probability distribution over the 2ⁿ outcomes of a game.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validates non-negativity (entries ≥ −1e−12 are clamped to 0) and
    /// normalization within 1e−9.
    pub fn new(probs: Vec<f64>) -> Result<OutcomeDistribution, GameError> {
        let mut probs = probs;
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -CLAMP_TOL {
                return Err(GameError::NegativeProbability {
                    index: i,
                    value: *p,
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(GameError::Unnormalized(sum));
        }
        Ok(OutcomeDistribution { probs })
    }

    pub fn point_mass(index: usize, len: usize) -> OutcomeDistribution {
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        OutcomeDistribution { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probs[index]
    }
}

/// JSON document shape for game files.
#[derive(Serialize, Deserialize)]
struct GameDoc {
    name: String,
    players: usize,
    payoffs: BTreeMap<String, Vec<f64>>,
}

/// An n-player, two-strategy game with one payoff vector per outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormGame {
    name: String,
    players: usize,
    /// Indexed by outcome; inner vectors have length `players`.
    payoffs: Vec<Vec<f64>>,
}

impl NormalFormGame {
    pub fn new(
        name: impl Into<String>,
        players: usize,
        payoffs: Vec<Vec<f64>>,
    ) -> Result<NormalFormGame, GameError> {
        if !(2..=MAX_PLAYERS).contains(&players) {
            return Err(GameError::BadPlayerCount(players));
        }
        let expected = 1usize << players;
        if payoffs.len() != expected {
            return Err(GameError::Malformed(format!(
                "{} outcome entries, expected {expected}",
                payoffs.len()
            )));
        }
        for (idx, row) in payoffs.iter().enumerate() {
            let key = StrategyProfile::from_outcome_index(idx, players).key();
            if row.len() != players {
                return Err(GameError::WrongPayoffLength {
                    key,
                    got: row.len(),
                    expected: players,
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(GameError::NonFinitePayoff(key));
            }
        }
        Ok(NormalFormGame {
            name: name.into(),
            players,
            payoffs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn outcome_count(&self) -> usize {
        1 << self.players
    }

    pub fn payoff_vector(&self, outcome: usize) -> &[f64] {
        &self.payoffs[outcome]
    }

    /// Payoff vector for a full strategy profile.
    pub fn payoff(&self, profile: &StrategyProfile) -> Result<&[f64], GameError> {
        if profile.len() != self.players {
            return Err(GameError::ProfileLength {
                got: profile.len(),
                expected: self.players,
            });
        }
        Ok(&self.payoffs[profile.outcome_index()])
    }

    /// Per-player expectation Σ_ω dist(ω)·payoff(ω).
    pub fn expected_payoffs(&self, dist: &OutcomeDistribution) -> Result<Vec<f64>, GameError> {
        if dist.len() != self.outcome_count() {
            return Err(GameError::DistributionLength {
                got: dist.len(),
                expected: self.outcome_count(),
            });
        }
        let mut out = vec![0.0; self.players];
        for (idx, row) in self.payoffs.iter().enumerate() {
            let w = dist.get(idx);
            if w == 0.0 {
                continue;
            }
            for (p, v) in row.iter().enumerate() {
                out[p] += w * v;
            }
        }
        Ok(out)
    }

    /// All pure Nash equilibria, by exhaustive enumeration over 2ⁿ profiles
    /// and n unilateral deviations each. Weak best responses (ties) count.
    pub fn pure_nash(&self) -> Vec<StrategyProfile> {
        let n = self.players;
        (0..self.outcome_count())
            .filter(|&idx| {
                (0..n).all(|p| {
                    let flipped = idx ^ (1 << (n - 1 - p));
                    self.payoffs[idx][p] >= self.payoffs[flipped][p]
                })
            })
            .map(|idx| StrategyProfile::from_outcome_index(idx, n))
            .collect()
    }

    /// Interior mixed equilibrium of a 2-player game via the indifference
    /// conditions. `solution` is None when a player has no interior
    /// indifference point (e.g. under strict dominance); `degenerate` is set
    /// when an indifference denominator vanishes (every mixture works for
    /// that side).
    pub fn mixed_nash_2p2s(&self) -> Result<MixedNashReport, GameError> {
        if self.players != 2 {
            return Err(GameError::NotTwoPlayer(self.players));
        }
        let u = |outcome: usize, p: usize| self.payoffs[outcome][p];
        // Outcome indices: 0 = LL, 1 = LS, 2 = SL, 3 = SS.
        // q = P(player 2 plays Long) making player 1 indifferent.
        let den1 = u(0, 0) - u(1, 0) - u(2, 0) + u(3, 0);
        let den2 = u(0, 1) - u(1, 1) - u(2, 1) + u(3, 1);
        if den1 == 0.0 || den2 == 0.0 {
            return Ok(MixedNashReport {
                solution: None,
                degenerate: true,
            });
        }
        let q = (u(3, 0) - u(1, 0)) / den1;
        let p = (u(3, 1) - u(2, 1)) / den2;
        if !(0.0 < p && p < 1.0 && 0.0 < q && q < 1.0) {
            return Ok(MixedNashReport {
                solution: None,
                degenerate: false,
            });
        }
        let profile = MixedProfile::new(vec![p, q])?;
        let payoffs = self.expected_payoffs(&profile.outcome_distribution())?;
        Ok(MixedNashReport {
            solution: Some(MixedNashSolution { profile, payoffs }),
            degenerate: false,
        })
    }

    /// The strategy strictly better against every opponent profile, if any.
    pub fn strictly_dominant(&self, player: usize) -> Result<Option<Strategy>, GameError> {
        if player >= self.players {
            return Err(GameError::PlayerOutOfRange(player));
        }
        let n = self.players;
        let bit = 1usize << (n - 1 - player);
        'candidate: for s in [Strategy::Long, Strategy::Short] {
            for idx in 0..self.outcome_count() {
                if (idx >> (n - 1 - player)) & 1 != 0 {
                    continue; // enumerate opponent profiles via player-bit = 0
                }
                let with_s = if s == Strategy::Long { idx } else { idx | bit };
                let with_other = with_s ^ bit;
                if self.payoffs[with_s][player] <= self.payoffs[with_other][player] {
                    continue 'candidate;
                }
            }
            return Ok(Some(s));
        }
        Ok(None)
    }

    /// Parse and validate a game-definition JSON document.
    pub fn from_json(document: &str) -> Result<NormalFormGame, GameError> {
        let doc: GameDoc =
            serde_json::from_str(document).map_err(|e| GameError::Malformed(e.to_string()))?;
        if !(2..=MAX_PLAYERS).contains(&doc.players) {
            return Err(GameError::BadPlayerCount(doc.players));
        }
        let n = doc.players;
        let expected = 1usize << n;
        for key in doc.payoffs.keys() {
            if key.len() != n || !key.chars().all(|c| c == '0' || c == '1') {
                return Err(GameError::BadOutcomeKey(key.clone()));
            }
        }
        let mut payoffs = Vec::with_capacity(expected);
        for idx in 0..expected {
            let key = StrategyProfile::from_outcome_index(idx, n).key();
            let row = doc
                .payoffs
                .get(&key)
                .ok_or_else(|| GameError::IncompletePayoffTable(key.clone()))?;
            payoffs.push(row.clone());
        }
        if doc.payoffs.len() != expected {
            return Err(GameError::Malformed(format!(
                "{} outcome entries, expected {expected}",
                doc.payoffs.len()
            )));
        }
        NormalFormGame::new(doc.name, n, payoffs)
    }

    /// Serialize to the game-definition document format (17-significant-digit
    /// numbers; keys in outcome order).
    pub fn to_json(&self) -> String {
        let mut payoffs = BTreeMap::new();
        for idx in 0..self.outcome_count() {
            let key = StrategyProfile::from_outcome_index(idx, self.players).key();
            payoffs.insert(key, self.payoffs[idx].clone());
        }
        let doc = GameDoc {
            name: self.name.clone(),
            players: self.players,
            payoffs,
        };
        crate::numfmt::to_json_string(&doc)
    }
}

/// Result of the 2-player mixed-equilibrium solve.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedNashReport {
    pub solution: Option<MixedNashSolution>,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedNashSolution {
    pub profile: MixedProfile,
    pub payoffs: Vec<f64>,
}

/// Names accepted by [`builtin_game`].
pub const BUILTIN_NAMES: [&str; 4] = ["chicken", "pd2", "pd3", "hawk_dove"];

/// Construct one of the built-in games. `hawk_dove` requires `params = (V, C)`
/// with V, C > 0 and uses the convention (L,L)=(V/2,V/2), (L,S)=(0,V),
/// (S,L)=(V,0), (S,S)=((V−C)/2,(V−C)/2).
pub fn builtin_game(name: &str, params: Option<(f64, f64)>) -> Result<NormalFormGame, GameError> {
    match name {
        "chicken" => NormalFormGame::new(
            "chicken",
            2,
            vec![
                vec![2.0, 2.0],
                vec![0.0, 3.0],
                vec![3.0, 0.0],
                vec![-1.0, -1.0],
            ],
        ),
        "pd2" => NormalFormGame::new(
            "pd2",
            2,
            vec![
                vec![3.0, 3.0],
                vec![0.0, 5.0],
                vec![5.0, 0.0],
                vec![1.0, 1.0],
            ],
        ),
        "pd3" => {
            // Per-player payoff by own strategy and number of other Shorts:
            // Long: 3/2/0, Short: 5/4/1.
            let long_pay = [3.0, 2.0, 0.0];
            let short_pay = [5.0, 4.0, 1.0];
            let mut payoffs = Vec::with_capacity(8);
            for idx in 0..8usize {
                let bits: Vec<usize> = (0..3).map(|p| (idx >> (2 - p)) & 1).collect();
                let row = (0..3)
                    .map(|p| {
                        let others_short: usize =
                            bits.iter().enumerate().filter(|&(q, _)| q != p).map(|(_, b)| b).sum();
                        if bits[p] == 0 {
                            long_pay[others_short]
                        } else {
                            short_pay[others_short]
                        }
                    })
                    .collect();
                payoffs.push(row);
            }
            NormalFormGame::new("pd3", 3, payoffs)
        }
        "hawk_dove" => {
            let (v, c) = params.ok_or_else(|| GameError::MissingParams("hawk_dove".into()))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(GameError::InvalidParam(format!("V = {v}, must be > 0")));
            }
            if !c.is_finite() || c <= 0.0 {
                return Err(GameError::InvalidParam(format!("C = {c}, must be > 0")));
            }
            NormalFormGame::new(
                "hawk_dove",
                2,
                vec![
                    vec![v / 2.0, v / 2.0],
                    vec![0.0, v],
                    vec![v, 0.0],
                    vec![(v - c) / 2.0, (v - c) / 2.0],
                ],
            )
        }
        other => Err(GameError::UnknownGame(other.into())),
    }
}

/// Parse a game-definition JSON document. Alias for [`NormalFormGame::from_json`].
pub fn load_game(document: &str) -> Result<NormalFormGame, GameError> {
    NormalFormGame::from_json(document)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(bits: &[usize]) -> StrategyProfile {
        StrategyProfile::new(bits.iter().map(|&b| Strategy::from_bit(b)).collect())
    }

    #[test]
    fn chicken_table_matches() {
        let g = builtin_game("chicken", None).unwrap();
        assert_eq!(g.payoff(&profile(&[0, 0])).unwrap(), &[2.0, 2.0]);
        assert_eq!(g.payoff(&profile(&[0, 1])).unwrap(), &[0.0, 3.0]);
        assert_eq!(g.payoff(&profile(&[1, 0])).unwrap(), &[3.0, 0.0]);
        assert_eq!(g.payoff(&profile(&[1, 1])).unwrap(), &[-1.0, -1.0]);
    }

    #[test]
    fn pd2_table_matches() {
        let g = builtin_game("pd2", None).unwrap();
        assert_eq!(g.payoff(&profile(&[0, 0])).unwrap(), &[3.0, 3.0]);
        assert_eq!(g.payoff(&profile(&[0, 1])).unwrap(), &[0.0, 5.0]);
        assert_eq!(g.payoff(&profile(&[1, 0])).unwrap(), &[5.0, 0.0]);
        assert_eq!(g.payoff(&profile(&[1, 1])).unwrap(), &[1.0, 1.0]);
    }

    #[test]
    fn pd3_payoffs_by_short_count() {
        let g = builtin_game("pd3", None).unwrap();
        // All Short.
        assert_eq!(g.payoff(&profile(&[1, 1, 1])).unwrap(), &[1.0, 1.0, 1.0]);
        // All Long.
        assert_eq!(g.payoff(&profile(&[0, 0, 0])).unwrap(), &[3.0, 3.0, 3.0]);
        // One defector gets 5, the two Longs get 2 each.
        assert_eq!(g.payoff(&profile(&[0, 0, 1])).unwrap(), &[2.0, 2.0, 5.0]);
        assert_eq!(g.payoff(&profile(&[0, 1, 1])).unwrap(), &[0.0, 4.0, 4.0]);
    }

    #[test]
    fn unknown_game_rejected() {
        assert_eq!(
            builtin_game("poker", None).unwrap_err(),
            GameError::UnknownGame("poker".into())
        );
    }

    #[test]
    fn hawk_dove_convention_and_params() {
        let g = builtin_game("hawk_dove", Some((4.0, 3.0))).unwrap();
        assert_eq!(g.payoff(&profile(&[0, 0])).unwrap(), &[2.0, 2.0]);
        assert_eq!(g.payoff(&profile(&[0, 1])).unwrap(), &[0.0, 4.0]);
        assert_eq!(g.payoff(&profile(&[1, 0])).unwrap(), &[4.0, 0.0]);
        assert_eq!(g.payoff(&profile(&[1, 1])).unwrap(), &[0.5, 0.5]);
        assert!(builtin_game("hawk_dove", None).is_err());
        assert!(builtin_game("hawk_dove", Some((-1.0, 2.0))).is_err());
        assert!(builtin_game("hawk_dove", Some((4.0, 0.0))).is_err());
    }

    #[test]
    fn pure_nash_chicken() {
        let g = builtin_game("chicken", None).unwrap();
        let nash = g.pure_nash();
        assert_eq!(nash, vec![profile(&[0, 1]), profile(&[1, 0])]);
    }

    #[test]
    fn pure_nash_pd2_and_pd3() {
        assert_eq!(
            builtin_game("pd2", None).unwrap().pure_nash(),
            vec![profile(&[1, 1])]
        );
        assert_eq!(
            builtin_game("pd3", None).unwrap().pure_nash(),
            vec![profile(&[1, 1, 1])]
        );
    }

    #[test]
    fn mixed_nash_chicken_is_half_half() {
        let g = builtin_game("chicken", None).unwrap();
        let report = g.mixed_nash_2p2s().unwrap();
        let sol = report.solution.expect("chicken has an interior equilibrium");
        assert_eq!(sol.profile.p_long(), &[0.5, 0.5]);
        assert_eq!(sol.payoffs, vec![1.0, 1.0]);
        assert!(!report.degenerate);
    }

    #[test]
    fn mixed_nash_pd2_none_under_dominance() {
        let g = builtin_game("pd2", None).unwrap();
        let report = g.mixed_nash_2p2s().unwrap();
        assert!(report.solution.is_none());
        assert!(!report.degenerate);
    }

    #[test]
    fn mixed_nash_degenerate_flagged() {
        let g = NormalFormGame::new("flat", 2, vec![vec![1.0, 1.0]; 4]).unwrap();
        let report = g.mixed_nash_2p2s().unwrap();
        assert!(report.solution.is_none());
        assert!(report.degenerate);
    }

    #[test]
    fn mixed_nash_rejects_pd3() {
        let g = builtin_game("pd3", None).unwrap();
        assert_eq!(g.mixed_nash_2p2s().unwrap_err(), GameError::NotTwoPlayer(3));
    }

    #[test]
    fn dominance() {
        let pd2 = builtin_game("pd2", None).unwrap();
        assert_eq!(pd2.strictly_dominant(0).unwrap(), Some(Strategy::Short));
        assert_eq!(pd2.strictly_dominant(1).unwrap(), Some(Strategy::Short));
        // Chicken: Long beats Short vs Short (0 > -1), Short beats Long vs
        // Long (3 > 2) -> no dominant strategy.
        let chicken = builtin_game("chicken", None).unwrap();
        assert_eq!(chicken.strictly_dominant(0).unwrap(), None);
        let pd3 = builtin_game("pd3", None).unwrap();
        assert_eq!(pd3.strictly_dominant(2).unwrap(), Some(Strategy::Short));
        assert!(pd3.strictly_dominant(3).is_err());
    }

    #[test]
    fn expected_payoffs_referee_distribution() {
        let g = builtin_game("chicken", None).unwrap();
        let d = OutcomeDistribution::new(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]).unwrap();
        let pay = g.expected_payoffs(&d).unwrap();
        assert!((pay[0] - 5.0 / 3.0).abs() < 1e-12);
        assert!((pay[1] - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn expected_payoffs_point_mass_and_half_half() {
        let g = builtin_game("pd2", None).unwrap();
        for idx in 0..4 {
            let d = OutcomeDistribution::point_mass(idx, 4);
            assert_eq!(g.expected_payoffs(&d).unwrap(), g.payoff_vector(idx));
        }
        let d = OutcomeDistribution::new(vec![0.0, 0.5, 0.5, 0.0]).unwrap();
        assert_eq!(g.expected_payoffs(&d).unwrap(), vec![2.5, 2.5]);
    }

    #[test]
    fn distribution_validation() {
        assert!(OutcomeDistribution::new(vec![0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(OutcomeDistribution::new(vec![0.5, 0.6, -0.1, 0.0]).is_err());
        // Tiny negatives clamp to zero.
        let d = OutcomeDistribution::new(vec![1.0, -1e-13, 1e-13, 0.0]).unwrap();
        assert_eq!(d.get(1), 0.0);
    }

    #[test]
    fn json_round_trip_builtin() {
        let g = builtin_game("chicken", None).unwrap();
        let doc = g.to_json();
        let g2 = load_game(&doc).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn json_missing_outcome_is_incomplete() {
        let doc = r#"{"name":"x","players":2,"payoffs":{"00":[1,1],"01":[0,0],"10":[0,0]}}"#;
        match load_game(doc) {
            Err(GameError::IncompletePayoffTable(k)) => assert_eq!(k, "11"),
            other => panic!("expected incomplete table, got {other:?}"),
        }
    }

    #[test]
    fn json_four_player_accepted() {
        let mut payoffs = String::new();
        for idx in 0..16 {
            let key: String = (0..4).map(|p| char::from(b'0' + ((idx >> (3 - p)) & 1) as u8)).collect();
            payoffs.push_str(&format!("\"{key}\":[1,2,3,4],"));
        }
        payoffs.pop();
        let doc = format!("{{\"name\":\"big\",\"players\":4,\"payoffs\":{{{payoffs}}}}}");
        let g = load_game(&doc).unwrap();
        assert_eq!(g.players(), 4);
        assert_eq!(g.outcome_count(), 16);
    }

    #[test]
    fn json_rejects_bad_values() {
        let doc = r#"{"name":"x","players":2,"payoffs":{"00":[1,1],"01":[0,0],"10":[0,0],"11":[1]}}"#;
        assert!(matches!(
            load_game(doc),
            Err(GameError::WrongPayoffLength { .. })
        ));
        let doc = r#"{"name":"x","players":2,"payoffs":{"00":[1,1],"01":[0,0],"2x":[0,0],"11":[1,1]}}"#;
        assert!(matches!(load_game(doc), Err(GameError::BadOutcomeKey(_))));
        assert!(matches!(load_game("not json"), Err(GameError::Malformed(_))));
    }

    #[test]
    fn outcome_index_round_trip() {
        for n in 2..=4 {
            for idx in 0..1usize << n {
                let p = StrategyProfile::from_outcome_index(idx, n);
                assert_eq!(p.outcome_index(), idx);
                assert_eq!(p.len(), n);
            }
        }
    }

    #[test]
    fn trader_one_owns_most_significant_bit() {
        let p = profile(&[1, 0, 0]);
        assert_eq!(p.outcome_index(), 4);
        assert_eq!(p.key(), "100");
    }
}
