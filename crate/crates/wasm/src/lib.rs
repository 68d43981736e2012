//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function returns a flat `Float64Array`; the plain Rust
//! functions underneath are what the tests exercise.

use rotnum_core::catalog::{catalog, FamilySpec};
use rotnum_core::conjugacy::MonotoneTable;
use rotnum_core::monotone_family::build_global_conjugacy;
use rotnum_core::rotation::rotation_number;
use rotnum_core::tongues::tongue_scan;
use wasm_bindgen::prelude::*;

/// Enclosure width used for staircase points; coarse enough to stay
/// interactive.
const STAIRCASE_TOL: f64 = 1e-5;
const TONGUE_TOL: f64 = 1e-6;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Rotation numbers of the arnold family at `samples` points of
/// `[t_min, t_max]`, as `[t0, rho0, t1, rho1, ...]`.
pub fn staircase_points(a: f64, t_min: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(t_min < t_max) || !(2..=4000).contains(&samples) {
        return Err("need t_min < t_max and 2..=4000 samples".into());
    }
    let f = catalog(&FamilySpec::arnold(a)).map_err(|e| e.to_string())?;
    Ok(grid(t_min, t_max, samples)
        .into_iter()
        .flat_map(|t| [t, rotation_number(&f.at(t), STAIRCASE_TOL).value])
        .collect())
}

/// Edges of the arnold `p/q` tongue for `rows` couplings in `[0, a_max]`, as
/// `[a0, left0, right0, ...]`. Failed rows carry NaN edges.
pub fn tongue_rows(p: i32, q: u32, a_max: f64, rows: usize) -> Result<Vec<f64>, String> {
    if q == 0 || !(2..=200).contains(&rows) {
        return Err("need q >= 1 and 2..=200 rows".into());
    }
    let values = grid(0.0, a_max, rows);
    Ok(tongue_scan(&FamilySpec::arnold(0.0), p as i64, q as u64, &values, TONGUE_TOL)
        .into_iter()
        .flat_map(|r| [r.a, r.t_left, r.t_right])
        .collect())
}

/// Orbit-recovered conjugacy next to the closed form at parameter `t`, as
/// `[x0, recovered0, exact0, ...]` on `samples` points of `[0, 1)`.
pub fn conjugacy_points(family: &str, amplitude: f64, t: f64, n: usize, samples: usize) -> Result<Vec<f64>, String> {
    let spec = match family {
        "dehn" => FamilySpec::dehn(amplitude),
        "conj_rotation" => FamilySpec::conj_rotation(amplitude, 0.0),
        "example8" => FamilySpec::example8(),
        other => return Err(format!("no closed-form conjugacy for `{other}`")),
    };
    if samples == 0 || samples > 10_000 || n > 200_000 {
        return Err("need 1..=10000 samples and an orbit of at most 200000 steps".into());
    }
    let f = catalog(&spec).map_err(|e| e.to_string())?;
    let recovered = build_global_conjugacy(&f, &[t], n).map_err(|e| e.to_string())?.remove(0).table;
    let phi = spec
        .closed_form_conjugacy(t)
        .map_err(|e| e.to_string())?
        .ok_or("family has no closed form")?;
    let exact = MonotoneTable::from_fn(|x| phi.eval(x), 4096).map_err(|e| e.to_string())?;
    Ok((0..samples)
        .flat_map(|i| {
            let x = i as f64 / samples as f64;
            [x, recovered.eval(x), exact.eval(x)]
        })
        .collect())
}

#[wasm_bindgen]
pub fn staircase(a: f64, t_min: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    staircase_points(a, t_min, t_max, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn tongue_edges(p: i32, q: u32, a_max: f64, rows: usize) -> Result<Vec<f64>, JsError> {
    tongue_rows(p, q, a_max, rows).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn conjugacy_curves(family: &str, amplitude: f64, t: f64, n: usize, samples: usize) -> Result<Vec<f64>, JsError> {
    conjugacy_points(family, amplitude, t, n, samples).map_err(|e| JsError::new(&e))
}
