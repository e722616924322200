//! Classical referee machinery: a public distribution over outcomes acts as
//! advice, and a distribution is a correlated equilibrium when every player
//! weakly prefers following their advice to any deviation, conditional on
//! what the advice reveals about the opponents.

use thiserror::Error;

use crate::game::{GameError, NormalFormGame, OutcomeDistribution, Strategy};

/// Default tolerance for equilibrium verdicts; indifference counts as
/// obedient.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum RefereeError {
    #[error("advice never issued: player {player} is advised {advice} with probability 0")]
    AdviceNeverIssued { player: usize, advice: Strategy },
    #[error("player index {0} out of range")]
    PlayerOutOfRange(usize),
    #[error("distribution has {got} entries, game has {expected} outcomes")]
    LengthMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// The referee's public distribution over a game's outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct RefereeDistribution {
    dist: OutcomeDistribution,
    players: usize,
}

impl RefereeDistribution {
    pub fn new(dist: OutcomeDistribution) -> Result<RefereeDistribution, RefereeError> {
        let len = dist.len();
        if !len.is_power_of_two() || len < 4 {
            return Err(RefereeError::LengthMismatch {
                got: len,
                expected: 4,
            });
        }
        Ok(RefereeDistribution {
            players: len.trailing_zeros() as usize,
            dist,
        })
    }

    pub fn from_probs(probs: Vec<f64>) -> Result<RefereeDistribution, RefereeError> {
        RefereeDistribution::new(OutcomeDistribution::new(probs)?)
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn distribution(&self) -> &OutcomeDistribution {
        &self.dist
    }

    /// Probability that `player` is advised `advice`.
    pub fn marginal(&self, player: usize, advice: Strategy) -> Result<f64, RefereeError> {
        if player >= self.players {
            return Err(RefereeError::PlayerOutOfRange(player));
        }
        let n = self.players;
        Ok((0..self.dist.len())
            .filter(|idx| (idx >> (n - 1 - player)) & 1 == advice.bit())
            .map(|idx| self.dist.get(idx))
            .sum())
    }
}

/// Outcome index for a given opponents-profile index and the player's own
/// strategy. Opponent profiles pack the remaining players in ascending player
/// order, most significant first.
pub fn outcome_from_opponents(
    opponents: usize,
    players: usize,
    player: usize,
    own: Strategy,
) -> usize {
    let mut idx = 0usize;
    let mut opp_bit = players - 2; // bits remaining in the opponents index
    for p in 0..players {
        let bit = if p == player {
            own.bit()
        } else {
            let b = (opponents >> opp_bit) & 1;
            opp_bit = opp_bit.wrapping_sub(1);
            b
        };
        idx = (idx << 1) | bit;
    }
    idx
}

/// P(opponents' advice profile | player's advice), entries summing to 1.
pub fn conditional_advice(
    dist: &RefereeDistribution,
    player: usize,
    advice: Strategy,
) -> Result<Vec<f64>, RefereeError> {
    let marginal = dist.marginal(player, advice)?;
    if marginal <= 0.0 {
        return Err(RefereeError::AdviceNeverIssued { player, advice });
    }
    let n = dist.players();
    Ok((0..1usize << (n - 1))
        .map(|opp| dist.dist.get(outcome_from_opponents(opp, n, player, advice)) / marginal)
        .collect())
}

/// Expected payoffs for following vs. deviating from one piece of advice.
#[derive(Clone, Debug, PartialEq)]
pub struct ObedienceReport {
    pub player: usize,
    pub advice: Strategy,
    pub follow_payoff: f64,
    pub deviation_payoff: f64,
    /// P(opponents' profile | advice), indexed like [`conditional_advice`].
    pub conditional: Vec<f64>,
}

pub fn obedience_payoffs(
    game: &NormalFormGame,
    dist: &RefereeDistribution,
    player: usize,
    advice: Strategy,
) -> Result<ObedienceReport, RefereeError> {
    if dist.players() != game.players() {
        return Err(RefereeError::LengthMismatch {
            got: dist.distribution().len(),
            expected: game.outcome_count(),
        });
    }
    let conditional = conditional_advice(dist, player, advice)?;
    let n = game.players();
    let expect = |strategy: Strategy| -> f64 {
        conditional
            .iter()
            .enumerate()
            .map(|(opp, w)| {
                w * game.payoff_vector(outcome_from_opponents(opp, n, player, strategy))[player]
            })
            .sum()
    };
    let follow_payoff = expect(advice);
    // Best alternative; with two strategies this is the single other one.
    let deviation_payoff = expect(advice.other());
    Ok(ObedienceReport {
        player,
        advice,
        follow_payoff,
        deviation_payoff,
        conditional,
    })
}

/// Verdict of the correlated-equilibrium check, with every violated piece of
/// advice.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumVerdict {
    pub holds: bool,
    pub violations: Vec<ObedienceReport>,
}

/// True iff for every player and every advice with positive marginal,
/// follow_payoff ≥ deviation_payoff − tol. Advice that is never issued is
/// skipped (vacuously obedient).
pub fn is_correlated_equilibrium(
    game: &NormalFormGame,
    dist: &RefereeDistribution,
    tol: f64,
) -> Result<EquilibriumVerdict, RefereeError> {
    if dist.players() != game.players() {
        return Err(RefereeError::LengthMismatch {
            got: dist.distribution().len(),
            expected: game.outcome_count(),
        });
    }
    let mut violations = Vec::new();
    for player in 0..game.players() {
        for advice in [Strategy::Long, Strategy::Short] {
            if dist.marginal(player, advice)? <= 0.0 {
                continue;
            }
            let report = obedience_payoffs(game, dist, player, advice)?;
            if report.follow_payoff < report.deviation_payoff - tol {
                violations.push(report);
            }
        }
    }
    Ok(EquilibriumVerdict {
        holds: violations.is_empty(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::builtin_game;

    const EPS: f64 = 1e-12;

    fn referee(probs: Vec<f64>) -> RefereeDistribution {
        RefereeDistribution::from_probs(probs).unwrap()
    }

    fn chicken_referee() -> RefereeDistribution {
        referee(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0])
    }

    #[test]
    fn conditional_for_chicken_referee() {
        // Trader 2 advised Long: trader 1 is Long or Short with probability 1/2.
        let cond = conditional_advice(&chicken_referee(), 1, Strategy::Long).unwrap();
        assert!((cond[0] - 0.5).abs() < EPS);
        assert!((cond[1] - 0.5).abs() < EPS);
    }

    #[test]
    fn conditional_point_mass_and_uniform() {
        let point = referee(vec![0.0, 0.0, 0.0, 1.0]);
        let cond = conditional_advice(&point, 0, Strategy::Short).unwrap();
        assert_eq!(cond, vec![0.0, 1.0]);

        let uniform = referee(vec![0.125; 8]);
        let cond = conditional_advice(&uniform, 2, Strategy::Long).unwrap();
        assert_eq!(cond.len(), 4);
        for w in cond {
            assert!((w - 0.25).abs() < EPS);
        }
    }

    #[test]
    fn zero_marginal_is_an_error() {
        let point = referee(vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(
            conditional_advice(&point, 0, Strategy::Long).unwrap_err(),
            RefereeError::AdviceNeverIssued {
                player: 0,
                advice: Strategy::Long
            }
        );
    }

    #[test]
    fn chicken_referee_makes_long_advice_indifferent() {
        let game = builtin_game("chicken", None).unwrap();
        let report = obedience_payoffs(&game, &chicken_referee(), 1, Strategy::Long).unwrap();
        assert!((report.follow_payoff - 1.0).abs() < EPS);
        assert!((report.deviation_payoff - 1.0).abs() < EPS);
    }

    #[test]
    fn pd3_long_advice_always_tempts() {
        let game = builtin_game("pd3", None).unwrap();
        let dist = referee(vec![0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2]);
        let report = obedience_payoffs(&game, &dist, 2, Strategy::Long).unwrap();
        assert!(report.deviation_payoff > report.follow_payoff);
    }

    #[test]
    fn pd2_point_mass_on_cooperation() {
        let game = builtin_game("pd2", None).unwrap();
        let dist = referee(vec![1.0, 0.0, 0.0, 0.0]);
        let report = obedience_payoffs(&game, &dist, 0, Strategy::Long).unwrap();
        assert!((report.follow_payoff - 3.0).abs() < EPS);
        assert!((report.deviation_payoff - 5.0).abs() < EPS);
    }

    #[test]
    fn chicken_referee_is_correlated_equilibrium() {
        let game = builtin_game("chicken", None).unwrap();
        let verdict = is_correlated_equilibrium(&game, &chicken_referee(), DEFAULT_TOL).unwrap();
        assert!(verdict.holds);
        assert!(verdict.violations.is_empty());
    }

    #[test]
    fn dominated_long_advice_breaks_equilibrium() {
        let pd2 = builtin_game("pd2", None).unwrap();
        let dist = referee(vec![0.5, 0.0, 0.0, 0.5]);
        let verdict = is_correlated_equilibrium(&pd2, &dist, DEFAULT_TOL).unwrap();
        assert!(!verdict.holds);
        assert!(verdict
            .violations
            .iter()
            .all(|r| r.advice == Strategy::Long));
    }

    #[test]
    fn nash_point_masses_verify() {
        for name in ["chicken", "pd2", "pd3"] {
            let game = builtin_game(name, None).unwrap();
            for profile in game.pure_nash() {
                let dist = RefereeDistribution::new(OutcomeDistribution::point_mass(
                    profile.outcome_index(),
                    game.outcome_count(),
                ))
                .unwrap();
                let verdict = is_correlated_equilibrium(&game, &dist, 0.0).unwrap();
                assert!(verdict.holds, "{name} point mass on {profile} should verify");
            }
        }
    }

    #[test]
    fn opponent_profile_indexing() {
        // 3 players, player 1 advised Short; opponents (p0, p2) = (1, 0)
        // packs to opponent index 0b10 = 2, outcome 110 = 6.
        assert_eq!(outcome_from_opponents(2, 3, 1, Strategy::Short), 6);
        assert_eq!(outcome_from_opponents(0, 2, 0, Strategy::Short), 2);
        assert_eq!(outcome_from_opponents(1, 2, 1, Strategy::Long), 2);
    }

    #[test]
    fn length_mismatch_rejected() {
        let pd3 = builtin_game("pd3", None).unwrap();
        let dist = chicken_referee();
        assert!(matches!(
            is_correlated_equilibrium(&pd3, &dist, 0.0),
            Err(RefereeError::LengthMismatch { .. })
        ));
    }
}
