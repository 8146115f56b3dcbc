//! wasm-bindgen entry points for `www/index.html`.

use ads3::classifier::classify;
use ads3::engine::{causal_character, CausalCharacter};
use ads3::orbit_space::{finite_space, quotient_verdict, topology_checks};
use ads3::sl2::iwasawa;
use ads3::GroupLabel;
use serde_json::json;
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-9;

fn label(name: &str) -> Result<GroupLabel, JsError> {
    name.parse::<GroupLabel>().map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn labels() -> Vec<String> {
    GroupLabel::ALL.iter().map(|l| l.to_string()).collect()
}

/// Orbit record of K_theta A_t N_s, with the Gram-engine character alongside.
#[wasm_bindgen]
pub fn classify_point(group: &str, theta: f64, t: f64, s: f64) -> Result<String, JsError> {
    let l = label(group)?;
    let p = iwasawa(theta, t, s);
    let engine = causal_character(l, p, TOL).ok();
    Ok(json!({ "point": p.m().to_array(), "record": classify(l, p, TOL), "engine": engine }).to_string())
}

/// Palette index used by the canvas; 255 marks an engine anomaly.
pub fn character_code(c: Option<CausalCharacter>) -> u8 {
    use CausalCharacter::*;
    match c {
        Some(Point0) => 0,
        Some(SpacelikeCurve) => 1,
        Some(LightlikeCurve) => 2,
        Some(TimelikeCurve) => 3,
        Some(SpacelikeSurface) => 4,
        Some(LorentzianSurface) => 5,
        Some(DegenerateSurface) => 6,
        Some(Open3) => 7,
        None => 255,
    }
}

/// Row-major character codes over t in [t0, t1] (columns) and s in [s0, s1] (rows) at fixed theta.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn character_grid(
    group: &str,
    theta: f64,
    t0: f64,
    t1: f64,
    s0: f64,
    s1: f64,
    width: usize,
    height: usize,
) -> Result<Vec<u8>, JsError> {
    let l = label(group)?;
    let step = |a: f64, b: f64, i: usize, n: usize| if n <= 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    let mut out = Vec::with_capacity(width * height);
    for row in 0..height {
        let s = step(s1, s0, row, height);
        for col in 0..width {
            let p = iwasawa(theta, step(t0, t1, col, width), s);
            out.push(character_code(causal_character(l, p, TOL).ok()));
        }
    }
    Ok(out)
}

/// Quotient verdict plus, for the finite quotients, points, basis and separation report.
#[wasm_bindgen]
pub fn topology_report(group: &str) -> Result<String, JsError> {
    let l = label(group)?;
    let finite = finite_space(l).map(|t| {
        let basis: Vec<Vec<&str>> = t.basis.iter().map(|b| b.iter().map(|&i| t.names[i].as_str()).collect()).collect();
        json!({ "points": t.names, "basis": basis, "report": topology_checks(&t).ok() })
    });
    Ok(json!({ "label": l, "verdict": quotient_verdict(l), "finite_space": finite }).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_codes() {
        let g = character_grid("AxK", 0.3, -1.0, 1.0, -1.0, 1.0, 7, 5).unwrap();
        assert_eq!(g.len(), 35);
        assert!(g.iter().all(|&c| c == 5));
    }

    #[test]
    fn reports_parse() {
        let v: serde_json::Value = serde_json::from_str(&classify_point("KxK", 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(v["record"]["character"], "TimelikeCurve");
        let t: serde_json::Value = serde_json::from_str(&topology_report("AffxA").unwrap()).unwrap();
        assert_eq!(t["finite_space"]["points"].as_array().unwrap().len(), 8);
        assert_eq!(t["finite_space"]["report"]["hausdorff"], false);
        assert_eq!(labels().len(), 16);
    }
}
