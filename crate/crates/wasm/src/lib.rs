//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; errors become JavaScript exceptions.

use std::f64::consts::PI;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use khavinson::ball::{c_directional, sharp_constant_ball};
use khavinson::geometry::{BallConfig, HalfSpaceConfig, QNorm};
use khavinson::halfspace::{ch_directional, sharp_constant_halfspace};
use khavinson::regime::regime_intervals;

/// Quadrature order; lower than the command line default to stay interactive.
pub const DEMO_ORDER: usize = 64;
const SERIES_TOL: f64 = 1e-12;

#[derive(Serialize)]
struct Constant {
    value: f64,
    method: &'static str,
    direction_alpha: Option<f64>,
}

#[derive(Serialize)]
struct Interval {
    regime: &'static str,
    notation: String,
    lo: f64,
    hi: f64,
}

fn fail(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(fail)
}

fn is_ball(geometry: &str) -> Result<bool, JsError> {
    match geometry {
        "ball" => Ok(true),
        "halfspace" => Ok(false),
        other => Err(fail(format!("unknown geometry {other:?}"))),
    }
}

fn directional(ball: bool, n: usize, q: QNorm, position: f64, alpha: f64) -> Result<f64, JsError> {
    if ball {
        let cfg = BallConfig::new(n, q, position, alpha).map_err(fail)?;
        Ok(c_directional(&cfg, DEMO_ORDER, SERIES_TOL).map_err(fail)?.value)
    } else {
        let cfg = HalfSpaceConfig::new(n, q, position, alpha).map_err(fail)?;
        Ok(ch_directional(&cfg, DEMO_ORDER).map_err(fail)?.value)
    }
}

/// `[[α, C(x; l_α)], …]` on `points` equally spaced angles in `[0, π]`.
/// `position` is ρ for the ball and x_n for the half-space.
#[wasm_bindgen]
pub fn sweep_alpha(geometry: &str, n: usize, q: &str, position: f64, points: usize) -> Result<String, JsError> {
    let ball = is_ball(geometry)?;
    let q = QNorm::parse(q, n).map_err(fail)?;
    if points < 2 {
        return Err(fail("at least two points are needed"));
    }
    let pairs = (0..points)
        .map(|i| {
            let alpha = PI * i as f64 / (points - 1) as f64;
            Ok([alpha, directional(ball, n, q, position, alpha)?])
        })
        .collect::<Result<Vec<_>, JsError>>()?;
    to_json(&pairs)
}

/// Regime intervals of `(1, q_max]`.
#[wasm_bindgen]
pub fn regime_map(n: usize, q_max: f64) -> Result<String, JsError> {
    if n < 3 {
        return Err(fail("dimension must be at least 3"));
    }
    let out: Vec<Interval> = regime_intervals(n, q_max)
        .iter()
        .map(|iv| Interval {
            regime: iv.regime.name(),
            notation: iv.notation(),
            lo: iv.lo,
            hi: iv.hi,
        })
        .collect();
    to_json(&out)
}

/// The sharp constant `sup_l C(x; l)`.
#[wasm_bindgen]
pub fn sharp_constant(geometry: &str, n: usize, q: &str, position: f64) -> Result<String, JsError> {
    let ball = is_ball(geometry)?;
    let q = QNorm::parse(q, n).map_err(fail)?;
    let (value, method, direction_alpha) = if ball {
        let r = sharp_constant_ball(n, q, position).map_err(fail)?;
        (r.value, r.method.name(), r.direction_alpha)
    } else {
        let r = sharp_constant_halfspace(n, q, position, DEMO_ORDER).map_err(fail)?;
        (r.value, r.method.name(), r.direction_alpha)
    };
    to_json(&Constant {
        value,
        method,
        direction_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_produce_json() {
        let c: serde_json::Value = serde_json::from_str(&sharp_constant("ball", 3, "inf", 0.5).unwrap()).unwrap();
        assert!((c["value"].as_f64().unwrap() - 48.0).abs() < 1e-12);
        let s: Vec<[f64; 2]> = serde_json::from_str(&sweep_alpha("halfspace", 3, "1", 2.0, 5).unwrap()).unwrap();
        assert_eq!(s.len(), 5);
        for [_, v] in s {
            assert!((v - 0.5).abs() < 1e-10);
        }
        let r: serde_json::Value = serde_json::from_str(&regime_map(5, 3.0).unwrap()).unwrap();
        assert_eq!(r[0]["regime"], "Tangential");
        assert_eq!(r[1]["notation"], "[1.25, 1.5]");
    }
}
