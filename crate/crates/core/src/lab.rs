//! Equilibrium laboratory: payoff sweeps over strategy-parameter grids,
//! Nash verification at candidate points, flatness checks, and CSV emission.
//!
//! One player varies their strategy over a named grid while the others hold
//! fixed (pure or probabilistic) strategies. Grid points are evaluated
//! row-major with the first axis outermost; evaluation is pure, so identical
//! specs produce bitwise identical results regardless of parallelism.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::Path;

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::game::{GameError, NormalFormGame};
use crate::protocols::{
    equilibrium_mixture_trader1, equilibrium_mixture_trader2, play_du, play_mixed_quantum,
    MixedQuantumStrategy, ProtocolError, QuantumStrategy,
};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("candidate {0:?} is not a grid point")]
    OffGrid(Vec<f64>),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Which referee drives the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolKind {
    Ewl2,
    Du,
}

/// A fixed player's strategy.
#[derive(Clone, Debug)]
pub enum PlayerStrategy {
    Pure(QuantumStrategy),
    Mixed(MixedQuantumStrategy),
}

impl PlayerStrategy {
    fn as_mixture(&self) -> MixedQuantumStrategy {
        match self {
            PlayerStrategy::Pure(s) => MixedQuantumStrategy::pure(s.clone()),
            PlayerStrategy::Mixed(m) => m.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisName {
    Theta,
    Phi,
    Alpha,
    Gamma,
}

impl AxisName {
    pub fn label(self) -> &'static str {
        match self {
            AxisName::Theta => "theta",
            AxisName::Phi => "phi",
            AxisName::Alpha => "alpha",
            AxisName::Gamma => "gamma",
        }
    }

    fn legal_range(self) -> (f64, f64) {
        match self {
            AxisName::Theta => (0.0, PI),
            AxisName::Phi => (0.0, FRAC_PI_2),
            AxisName::Alpha | AxisName::Gamma => (0.0, 2.0 * PI),
        }
    }
}

/// A named parameter grid.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpec {
    pub name: AxisName,
    pub points: Vec<f64>,
}

impl AxisSpec {
    pub fn new(name: AxisName, points: Vec<f64>) -> Result<AxisSpec, LabError> {
        if points.is_empty() {
            return Err(LabError::InvalidSpec(format!(
                "axis {} has no points",
                name.label()
            )));
        }
        let (lo, hi) = name.legal_range();
        for &p in &points {
            if !p.is_finite() || p < lo - 1e-12 || p > hi + 1e-12 {
                return Err(LabError::InvalidSpec(format!(
                    "axis {} point {p} outside [{lo}, {hi}]",
                    name.label()
                )));
            }
        }
        Ok(AxisSpec { name, points })
    }
}

/// `m` evenly spaced points from `a` to `b`, endpoints included.
pub fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    assert!(m >= 1);
    if m == 1 {
        return vec![a];
    }
    (0..m)
        .map(|i| a + (b - a) * (i as f64) / ((m - 1) as f64))
        .collect()
}

/// Default grids: 41 θ points, 21 φ points, 17 α/γ points — chosen so that
/// (π,0), (0,π/2) and θ ∈ {0,π} land exactly on the grid.
pub fn default_theta_axis() -> AxisSpec {
    AxisSpec::new(AxisName::Theta, linspace(0.0, PI, 41)).expect("default axis")
}

pub fn default_phi_axis() -> AxisSpec {
    AxisSpec::new(AxisName::Phi, linspace(0.0, FRAC_PI_2, 21)).expect("default axis")
}

pub fn default_alpha_axis() -> AxisSpec {
    AxisSpec::new(AxisName::Alpha, linspace(0.0, 2.0 * PI, 17)).expect("default axis")
}

pub fn default_gamma_axis() -> AxisSpec {
    AxisSpec::new(AxisName::Gamma, linspace(0.0, 2.0 * PI, 17)).expect("default axis")
}

/// How grid coordinates map to the varying player's strategy.
#[derive(Clone, Debug, PartialEq)]
pub enum StrategyFamily {
    /// (θ,φ) grid over the EWL form; two-player referee.
    EwlGrid,
    /// (θ,φ) grid over the Du form; n-player referee.
    DuGrid,
    /// (α,γ) grid over the full form at a fixed θ; two-player referee.
    FullAlphaGamma { theta: f64 },
    /// θ grid over the probabilistic-advice family: both mixture components
    /// move jointly, one at phases (0,0) and one at (3π/2, 3π/2) so the
    /// endpoints reproduce the two traders' equilibrium mixtures.
    MixedJointTheta,
}

/// A full sweep description.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub protocol: ProtocolKind,
    pub game: NormalFormGame,
    /// 0-based index of the player whose strategy varies.
    pub varying: usize,
    /// Strategies of the other players, in ascending player order.
    pub fixed: Vec<PlayerStrategy>,
    pub family: StrategyFamily,
    pub axes: Vec<AxisSpec>,
    pub init_bit: Option<u8>,
}

impl SweepSpec {
    fn validate(&self) -> Result<(), LabError> {
        let n = self.game.players();
        if self.varying >= n {
            return Err(LabError::InvalidSpec(format!(
                "varying player {} out of range for {n} players",
                self.varying
            )));
        }
        if self.fixed.len() != n - 1 {
            return Err(LabError::InvalidSpec(format!(
                "{} fixed strategies for {n} players",
                self.fixed.len()
            )));
        }
        let expected_axes: &[AxisName] = match self.family {
            StrategyFamily::EwlGrid | StrategyFamily::DuGrid => &[AxisName::Theta, AxisName::Phi],
            StrategyFamily::FullAlphaGamma { .. } => &[AxisName::Alpha, AxisName::Gamma],
            StrategyFamily::MixedJointTheta => &[AxisName::Theta],
        };
        let got: Vec<AxisName> = self.axes.iter().map(|a| a.name).collect();
        if got != expected_axes {
            return Err(LabError::InvalidSpec(format!(
                "family {:?} expects axes {:?}, got {:?}",
                self.family, expected_axes, got
            )));
        }
        if self.axes.iter().any(|a| a.points.is_empty()) {
            return Err(LabError::InvalidSpec("empty axis".into()));
        }
        match self.protocol {
            ProtocolKind::Ewl2 => {
                if n != 2 {
                    return Err(LabError::InvalidSpec(format!(
                        "ewl2 sweeps need a 2-player game, got {n} players"
                    )));
                }
                if matches!(self.family, StrategyFamily::DuGrid) {
                    return Err(LabError::InvalidSpec(
                        "du strategy family under the ewl2 protocol".into(),
                    ));
                }
            }
            ProtocolKind::Du => {
                if !matches!(self.family, StrategyFamily::DuGrid) {
                    return Err(LabError::InvalidSpec(
                        "du sweeps support the du:(theta,phi) family".into(),
                    ));
                }
                if self.fixed.iter().any(|s| matches!(s, PlayerStrategy::Mixed(_))) {
                    return Err(LabError::InvalidSpec(
                        "du sweeps need pure fixed strategies".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn varying_mixture(&self, coords: &[f64]) -> Result<MixedQuantumStrategy, LabError> {
        let s = match self.family {
            StrategyFamily::EwlGrid => MixedQuantumStrategy::pure(QuantumStrategy::Ewl {
                theta: coords[0],
                phi: coords[1],
            }),
            StrategyFamily::DuGrid => MixedQuantumStrategy::pure(QuantumStrategy::Du {
                theta: coords[0],
                phi: coords[1],
            }),
            StrategyFamily::FullAlphaGamma { theta } => {
                MixedQuantumStrategy::pure(QuantumStrategy::Full {
                    alpha: coords[0],
                    theta,
                    gamma: coords[1],
                })
            }
            StrategyFamily::MixedJointTheta => {
                let theta = coords[0];
                let twist = 1.5 * PI;
                MixedQuantumStrategy::new(vec![
                    (
                        0.5,
                        QuantumStrategy::Full {
                            alpha: 0.0,
                            theta,
                            gamma: 0.0,
                        },
                    ),
                    (
                        0.5,
                        QuantumStrategy::Full {
                            alpha: twist,
                            theta,
                            gamma: twist,
                        },
                    ),
                ])?
            }
        };
        Ok(s)
    }

    fn evaluate(&self, coords: &[f64]) -> Result<f64, LabError> {
        let varying = self.varying_mixture(coords)?;
        match self.protocol {
            ProtocolKind::Ewl2 => {
                let opponent = self.fixed[0].as_mixture();
                let (m1, m2) = if self.varying == 0 {
                    (varying, opponent)
                } else {
                    (opponent, varying)
                };
                let result = play_mixed_quantum(&self.game, &m1, &m2)?;
                Ok(result.payoffs[self.varying])
            }
            ProtocolKind::Du => {
                let n = self.game.players();
                let mut strategies = Vec::with_capacity(n);
                let mut fixed_iter = self.fixed.iter();
                for p in 0..n {
                    if p == self.varying {
                        match varying.components() {
                            [only] => strategies.push(only.strategy.clone()),
                            _ => {
                                return Err(LabError::InvalidSpec(
                                    "du sweeps vary a pure strategy".into(),
                                ))
                            }
                        }
                    } else {
                        match fixed_iter.next() {
                            Some(PlayerStrategy::Pure(s)) => strategies.push(s.clone()),
                            _ => unreachable!("validated: du fixed strategies are pure"),
                        }
                    }
                }
                let result = play_du(&self.game, &strategies, self.init_bit)?;
                Ok(result.payoffs[self.varying])
            }
        }
    }
}

/// Sweep output: payoffs of the varying player at each grid point, row-major
/// with the first axis outermost, plus the (first) argmax.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub axes: Vec<AxisSpec>,
    pub values: Vec<f64>,
    pub argmax_index: usize,
    pub argmax_coords: Vec<f64>,
    pub argmax_payoff: f64,
}

impl SweepResult {
    /// Grid coordinates of a flat index.
    pub fn coords(&self, index: usize) -> Vec<f64> {
        let mut idx = index;
        let mut coords = vec![0.0; self.axes.len()];
        for (a, axis) in self.axes.iter().enumerate().rev() {
            coords[a] = axis.points[idx % axis.points.len()];
            idx /= axis.points.len();
        }
        coords
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, LabError> {
    spec.validate()?;
    let total: usize = spec.axes.iter().map(|a| a.points.len()).product();
    let coords_of = |index: usize| -> Vec<f64> {
        let mut idx = index;
        let mut coords = vec![0.0; spec.axes.len()];
        for (a, axis) in spec.axes.iter().enumerate().rev() {
            coords[a] = axis.points[idx % axis.points.len()];
            idx /= axis.points.len();
        }
        coords
    };

    #[cfg(feature = "parallel")]
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|i| spec.evaluate(&coords_of(i)))
        .collect::<Result<_, _>>()?;
    #[cfg(not(feature = "parallel"))]
    let values: Vec<f64> = (0..total)
        .map(|i| spec.evaluate(&coords_of(i)))
        .collect::<Result<_, _>>()?;

    let mut argmax_index = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[argmax_index] {
            argmax_index = i;
        }
    }
    Ok(SweepResult {
        axes: spec.axes.clone(),
        argmax_coords: coords_of(argmax_index),
        argmax_payoff: values[argmax_index],
        argmax_index,
        values,
    })
}

/// True iff the payoff at `candidate` is within `tol` of the sweep maximum.
/// The candidate must lie on the grid.
pub fn verify_nash_point(
    result: &SweepResult,
    candidate: &[f64],
    tol: f64,
) -> Result<bool, LabError> {
    if candidate.len() != result.axes.len() {
        return Err(LabError::OffGrid(candidate.to_vec()));
    }
    let mut index = 0usize;
    for (axis, &c) in result.axes.iter().zip(candidate) {
        let pos = axis
            .points
            .iter()
            .position(|&p| (p - c).abs() <= 1e-12)
            .ok_or_else(|| LabError::OffGrid(candidate.to_vec()))?;
        index = index * axis.points.len() + pos;
    }
    Ok(result.values[index] >= result.argmax_payoff - tol)
}

/// θ-sweep of the probabilistic-advice family against the opposite trader's
/// equilibrium mixture. `varying` is 0 (trader 1, argmax at θ=0) or
/// 1 (trader 2, argmax at θ=π).
pub fn run_mixed_theta_sweep(
    game: &NormalFormGame,
    varying: usize,
    points: usize,
) -> Result<SweepResult, LabError> {
    let opponent = if varying == 0 {
        equilibrium_mixture_trader2()
    } else {
        equilibrium_mixture_trader1()
    };
    let spec = SweepSpec {
        protocol: ProtocolKind::Ewl2,
        game: game.clone(),
        varying,
        fixed: vec![PlayerStrategy::Mixed(opponent)],
        family: StrategyFamily::MixedJointTheta,
        axes: vec![AxisSpec::new(AxisName::Theta, linspace(0.0, PI, points))?],
        init_bit: None,
    };
    run_sweep(&spec)
}

/// Flatness result: the payoff spread over an (α,γ) grid at fixed θ.
#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub spread: f64,
    pub min: f64,
    pub max: f64,
    pub result: SweepResult,
}

/// Sweep (α,γ) at fixed `theta` for `varying` against a chosen opponent
/// strategy and report max − min of the payoff.
pub fn flatness_check_vs(
    game: &NormalFormGame,
    varying: usize,
    theta: f64,
    points: usize,
    opponent: PlayerStrategy,
) -> Result<FlatnessReport, LabError> {
    let spec = SweepSpec {
        protocol: ProtocolKind::Ewl2,
        game: game.clone(),
        varying,
        fixed: vec![opponent],
        family: StrategyFamily::FullAlphaGamma { theta },
        axes: vec![
            AxisSpec::new(AxisName::Alpha, linspace(0.0, 2.0 * PI, points))?,
            AxisSpec::new(AxisName::Gamma, linspace(0.0, 2.0 * PI, points))?,
        ],
        init_bit: None,
    };
    let result = run_sweep(&spec)?;
    let min = result.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = result.argmax_payoff;
    Ok(FlatnessReport {
        spread: max - min,
        min,
        max,
        result,
    })
}

/// [`flatness_check_vs`] with the opponent at their equilibrium mixture.
pub fn flatness_check(
    game: &NormalFormGame,
    varying: usize,
    theta: f64,
    points: usize,
) -> Result<FlatnessReport, LabError> {
    let opponent = if varying == 0 {
        equilibrium_mixture_trader2()
    } else {
        equilibrium_mixture_trader1()
    };
    flatness_check_vs(game, varying, theta, points, PlayerStrategy::Mixed(opponent))
}

/// Render a sweep as CSV: axis-name header, one row per grid point in
/// row-major order, 17-significant-digit values, LF line endings.
pub fn csv_string(result: &SweepResult) -> String {
    let mut out = String::new();
    for axis in &result.axes {
        out.push_str(axis.name.label());
        out.push(',');
    }
    out.push_str("payoff\n");
    for (i, v) in result.values.iter().enumerate() {
        for c in result.coords(i) {
            out.push_str(&crate::numfmt::sig17(c));
            out.push(',');
        }
        out.push_str(&crate::numfmt::sig17(*v));
        out.push('\n');
    }
    out
}

/// Write [`csv_string`] to a file.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), LabError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(csv_string(result).as_bytes())?;
    Ok(())
}
