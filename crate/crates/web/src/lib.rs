//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function has a plain Rust twin returning
//! `sphdes::Result` so the logic is testable off the browser.

use serde_json::json;
use sphdes::catalog::{platonic, product_design, Platonic, ProductDesignSpec};
use sphdes::construct::{minimize, ConstructOptions};
use sphdes::cubature::{monomial_check_all, strength, DEFAULT_TOL};
use sphdes::harmonics::real_sph_harm;
use sphdes::optimality::check_result;
use sphdes::stereogram::{render, StereogramStyle};
use sphdes::{Design, Error, Result};
use wasm_bindgen::prelude::*;

/// Demo-side caps so a click cannot hang the page.
const MAX_CONSTRUCT_T: usize = 10;
const MAX_CONSTRUCT_N: usize = 120;
const MAX_STARTS: usize = 50;
const MAX_GRID: usize = 720;

/// `product` needs `d`; other names are Platonic solids.
pub fn catalog_design(name: &str, d: usize) -> Result<Design> {
    if name.eq_ignore_ascii_case("product") {
        product_design(&ProductDesignSpec::minimal(d)?)
    } else {
        Ok(platonic(name.parse::<Platonic>()?))
    }
}

fn style(grid: bool) -> StereogramStyle {
    StereogramStyle { size: 480, grid, ..StereogramStyle::default() }
}

/// Per-order check of the identity information matrix, up to the largest
/// order the design supports plus one.
fn design_summary(design: &Design, t_max: usize) -> serde_json::Value {
    let rep = strength(design, t_max, DEFAULT_TOL);
    let orders: Vec<_> = (0..=rep.strength / 2 + 1)
        .map(|d| {
            let c = check_result(design, d, DEFAULT_TOL);
            json!({"d": d, "identity": c.holds, "deviation": c.deviation})
        })
        .collect();
    json!({
        "n": design.len(),
        "label": design.label(),
        "residuals": rep.residuals,
        "strength": rep.strength,
        "orders": orders,
        "points": design.vectors(),
    })
}

/// Stereogram plus strength report of a built-in design, as JSON.
pub fn inspect_catalog(name: &str, d: usize, grid: bool) -> Result<String> {
    let design = catalog_design(name, d)?;
    let t_max = (2 * d + 3).max(8);
    let mut v = design_summary(&design, t_max);
    v["svg"] = json!(render(&design, &style(grid)));
    Ok(v.to_string())
}

/// Runs the multi-start search and returns the outcome, its verification and
/// its stereogram as JSON.
pub fn construct_json(t: usize, n: usize, starts: usize, seed: u64, grid: bool) -> Result<String> {
    if t > MAX_CONSTRUCT_T || n > MAX_CONSTRUCT_N || starts > MAX_STARTS {
        return Err(Error::InvalidOptions(format!(
            "demo limits: t <= {MAX_CONSTRUCT_T}, n <= {MAX_CONSTRUCT_N}, starts <= {MAX_STARTS}"
        )));
    }
    let mut opts = ConstructOptions::new(t, n);
    opts.starts = starts;
    opts.seed = seed;
    let out = minimize(&opts)?;
    let mut v = design_summary(&out.design, t + 2);
    v["residual"] = json!(out.residual);
    v["converged"] = json!(out.converged);
    v["iterations"] = json!(out.iterations);
    v["start_index"] = json!(out.start_index);
    v["oracle_deviation"] = json!(monomial_check_all(&out.design, t as u32));
    v["svg"] = json!(render(&out.design, &style(grid)));
    Ok(v.to_string())
}

/// `Y_l^m` on an equirectangular grid, row-major with `θ` down the rows
/// (cell centres) and `φ` from `-π` across the columns.
pub fn harmonic_grid(l: usize, m: i64, width: usize, height: usize) -> Result<Vec<f64>> {
    if width == 0 || height == 0 || width > MAX_GRID || height > MAX_GRID {
        return Err(Error::Domain(format!("grid size must be 1..={MAX_GRID}")));
    }
    let pi = std::f64::consts::PI;
    let mut out = Vec::with_capacity(width * height);
    for r in 0..height {
        let theta = pi * (r as f64 + 0.5) / height as f64;
        for c in 0..width {
            let phi = -pi + 2.0 * pi * (c as f64 + 0.5) / width as f64;
            out.push(real_sph_harm(l, m, theta, phi)?);
        }
    }
    Ok(out)
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = inspectCatalog)]
pub fn inspect_catalog_js(name: &str, d: usize, grid: bool) -> Result<String, JsError> {
    inspect_catalog(name, d, grid).map_err(js)
}

#[wasm_bindgen(js_name = constructDesign)]
pub fn construct_design_js(t: usize, n: usize, starts: usize, seed: u32, grid: bool) -> Result<String, JsError> {
    construct_json(t, n, starts, u64::from(seed), grid).map_err(js)
}

#[wasm_bindgen(js_name = harmonicGrid)]
pub fn harmonic_grid_js(l: usize, m: i32, width: usize, height: usize) -> Result<Vec<f64>, JsError> {
    harmonic_grid(l, i64::from(m), width, height).map_err(js)
}
