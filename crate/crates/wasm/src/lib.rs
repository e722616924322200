//! Browser bindings for the interactive demo page: a two-trader duel under
//! the quantum referee, the n-trader Nash payoff heatmap, and the
//! probabilistic-advice θ curves. Each export returns a JSON string the page
//! renders onto canvases.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qtg_core::game::{builtin_game, load_game, NormalFormGame};
use qtg_core::lab::{
    linspace, run_mixed_theta_sweep, run_sweep, AxisName, AxisSpec, PlayerStrategy, ProtocolKind,
    StrategyFamily, SweepSpec,
};
use qtg_core::numfmt::to_json_string;
use qtg_core::protocols::{default_init_bit, play_ewl2, QuantumStrategy};

const PI: f64 = std::f64::consts::PI;
const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

const SHIPPED_GAMES: [(usize, &str); 4] = [
    (3, include_str!("../../../games/pd_3.json")),
    (4, include_str!("../../../games/pd_4.json")),
    (5, include_str!("../../../games/pd_5.json")),
    (6, include_str!("../../../games/pd_6.json")),
];

fn demo_game(name: &str) -> Result<NormalFormGame, String> {
    match name {
        "chicken" | "pd2" => builtin_game(name, None).map_err(|e| e.to_string()),
        other => Err(format!("demo games are chicken and pd2, got `{other}`")),
    }
}

fn shipped_dilemma(players: usize) -> Result<NormalFormGame, String> {
    let (_, doc) = SHIPPED_GAMES
        .iter()
        .find(|(n, _)| *n == players)
        .ok_or_else(|| format!("heatmap supports 3..=6 traders, got {players}"))?;
    load_game(doc).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct DuelOut {
    game: String,
    outcomes: Vec<String>,
    distribution: Vec<f64>,
    payoffs: Vec<f64>,
}

fn duel_json(game: &str, s1: &str, s2: &str) -> Result<String, String> {
    let game = demo_game(game)?;
    let s1 = QuantumStrategy::parse(s1).map_err(|e| e.to_string())?;
    let s2 = QuantumStrategy::parse(s2).map_err(|e| e.to_string())?;
    let result = play_ewl2(&game, &s1, &s2).map_err(|e| e.to_string())?;
    let outcomes = (0..4)
        .map(|idx| {
            qtg_core::game::StrategyProfile::from_outcome_index(idx, 2)
                .choices()
                .iter()
                .map(|s| if s.bit() == 0 { "L" } else { "S" })
                .collect::<Vec<_>>()
                .join("")
        })
        .collect();
    Ok(to_json_string(&DuelOut {
        game: game.name().to_string(),
        outcomes,
        distribution: result.distribution.probs().to_vec(),
        payoffs: result.payoffs,
    }))
}

#[derive(Serialize)]
struct HeatmapOut {
    players: usize,
    init_bit: u8,
    theta: Vec<f64>,
    phi: Vec<f64>,
    /// Row-major, θ outermost.
    values: Vec<f64>,
    argmax_theta: f64,
    argmax_phi: f64,
    argmax_payoff: f64,
}

fn heatmap_json(players: usize, theta_points: usize, phi_points: usize) -> Result<String, String> {
    let game = shipped_dilemma(players)?;
    let init = default_init_bit(players);
    let spec = SweepSpec {
        protocol: ProtocolKind::Du,
        game,
        varying: 0,
        fixed: vec![
            PlayerStrategy::Pure(QuantumStrategy::Du { theta: PI, phi: 0.0 });
            players - 1
        ],
        family: StrategyFamily::DuGrid,
        axes: vec![
            AxisSpec::new(AxisName::Theta, linspace(0.0, PI, theta_points))
                .map_err(|e| e.to_string())?,
            AxisSpec::new(AxisName::Phi, linspace(0.0, FRAC_PI_2, phi_points))
                .map_err(|e| e.to_string())?,
        ],
        init_bit: Some(init),
    };
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    Ok(to_json_string(&HeatmapOut {
        players,
        init_bit: init,
        theta: result.axes[0].points.clone(),
        phi: result.axes[1].points.clone(),
        values: result.values.clone(),
        argmax_theta: result.argmax_coords[0],
        argmax_phi: result.argmax_coords[1],
        argmax_payoff: result.argmax_payoff,
    }))
}

#[derive(Serialize)]
struct CurvesOut {
    theta: Vec<f64>,
    trader1: Vec<f64>,
    trader2: Vec<f64>,
}

fn curves_json(points: usize) -> Result<String, String> {
    let game = builtin_game("pd2", None).map_err(|e| e.to_string())?;
    let t1 = run_mixed_theta_sweep(&game, 0, points).map_err(|e| e.to_string())?;
    let t2 = run_mixed_theta_sweep(&game, 1, points).map_err(|e| e.to_string())?;
    Ok(to_json_string(&CurvesOut {
        theta: t1.axes[0].points.clone(),
        trader1: t1.values,
        trader2: t2.values,
    }))
}

/// Play one round of the two-trader quantum referee. Strategies use the
/// command syntax, e.g. `ewl:theta=pi,phi=0` or `named:quantumLong`.
#[wasm_bindgen]
pub fn ewl_duel(game: &str, s1: &str, s2: &str) -> Result<String, JsValue> {
    duel_json(game, s1, s2).map_err(|e| JsValue::from_str(&e))
}

/// Trader 1's payoff over a (θ,φ) grid against n−1 opponents fixed at (π,0),
/// for the shipped n-trader dilemma (n in 3..=6).
#[wasm_bindgen]
pub fn nash_heatmap(
    players: usize,
    theta_points: usize,
    phi_points: usize,
) -> Result<String, JsValue> {
    heatmap_json(players, theta_points, phi_points).map_err(|e| JsValue::from_str(&e))
}

/// Payoff-vs-θ curves for both traders deviating from the probabilistic
/// equilibrium advice.
#[wasm_bindgen]
pub fn mixed_theta_curves(points: usize) -> Result<String, JsValue> {
    curves_json(points).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duel_reports_equilibrium_payoffs() {
        let out = duel_json("pd2", "named:quantumLong", "named:quantumLong").unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["payoffs"][0].as_f64().unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(v["outcomes"][0], "LL");
        assert!(duel_json("pd9", "named:long", "named:long").is_err());
        assert!(duel_json("pd2", "bogus", "named:long").is_err());
    }

    #[test]
    fn heatmap_peaks_at_pi_zero() {
        for players in 3..=6 {
            let out = heatmap_json(players, 11, 11).unwrap();
            let v: serde_json::Value = serde_json::from_str(&out).unwrap();
            assert!((v["argmax_theta"].as_f64().unwrap() - PI).abs() < 1e-12);
            assert_eq!(v["argmax_phi"].as_f64().unwrap(), 0.0);
            assert!((v["argmax_payoff"].as_f64().unwrap() - 1.0).abs() < 1e-9);
            assert_eq!(v["values"].as_array().unwrap().len(), 121);
        }
        assert!(heatmap_json(7, 5, 5).is_err());
    }

    #[test]
    fn curves_have_the_advertised_maxima() {
        let out = curves_json(21).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let t1: Vec<f64> = v["trader1"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        let t2: Vec<f64> = v["trader2"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        assert!((t1[0] - 2.5).abs() < 1e-9);
        assert!((t2[20] - 2.5).abs() < 1e-9);
        assert!(t1.iter().all(|&x| x <= 2.5 + 1e-9));
        assert!(t2.iter().all(|&x| x <= 2.5 + 1e-9));
    }
}
