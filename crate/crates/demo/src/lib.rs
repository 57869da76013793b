//! Browser bindings: certify a base from coefficients, decode one random
//! depolarizing error, and compute the hashing bound for a rate.
//!
//! The `*_report` functions are plain Rust so they can be tested natively;
//! the `#[wasm_bindgen]` wrappers only convert errors.

use std::fmt::Write;

use coset_qldpc::base::{
    build_base, census, check_4cycle_certificate, check_orthogonality_certificate, presets, verify_4cycles_directly,
};
use coset_qldpc::certify::{check_lower_bound, CssCode, EnumOptions, SearchBudget};
use coset_qldpc::decode::{classify_outcome, sample_error, syndromes, Decoder, DecoderConfig, DepolarizingPrior};
use coset_qldpc::harness::hashing_threshold;
use coset_qldpc::io;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

/// Largest code for which the page runs a distance check.
pub const MAX_DISTANCE_N: usize = 300;

pub fn preset_names() -> Vec<&'static str> {
    presets::ALL.iter().map(|p| p.name).collect()
}

pub fn preset_text(name: &str) -> Result<String, String> {
    presets::find(name)
        .map(|p| io::write_coefficients(&p.coefficients()))
        .ok_or_else(|| format!("unknown preset {name}"))
}

pub fn certify_report(coeff_text: &str, distance: usize) -> Result<String, String> {
    let c = io::parse_coefficients(coeff_text).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let mut line = |pass: bool, name: &str, detail: String| {
        let _ = writeln!(out, "{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    };
    match check_orthogonality_certificate(&c).map_err(|e| e.to_string())? {
        Ok(()) => line(true, "orthogonality certificate", "cross coset equalities hold".into()),
        Err(e) => line(false, "orthogonality certificate", e.to_string()),
    }
    match check_4cycle_certificate(&c).map_err(|e| e.to_string())? {
        Ok(()) => line(true, "4-cycle certificate", "same-type cosets disjoint".into()),
        Err(e) => line(false, "4-cycle certificate", e.to_string()),
    }
    let b = build_base(&c).map_err(|e| e.to_string())?;
    let code = CssCode::new(b.hx.clone(), b.hz.clone());
    line(code.is_ok(), "orthogonality", "H_X H_Z^T = 0".into());
    line(verify_4cycles_directly(&b), "no 4-cycles", "checked on both matrices".into());
    let cen = census(&b);
    line(
        cen.overlaps_zero_or_two(),
        "census",
        format!("N6 = ({}, {}), N_XZ2 = {}", cen.n6_x, cen.n6_z, cen.n_xz2),
    );
    if let Ok(code) = code {
        let _ = writeln!(out, "params {}", code.params_string());
        if distance > 0 {
            if code.n() > MAX_DISTANCE_N {
                let _ = writeln!(out, "distance check skipped: n > {MAX_DISTANCE_N}");
            } else {
                let opts = EnumOptions {
                    budget: SearchBudget::unlimited(),
                    ..Default::default()
                };
                for d in [distance, distance + 1] {
                    let _ = writeln!(out, "{}", check_lower_bound(&code, d, &opts));
                }
            }
        }
    }
    Ok(out)
}

fn list(v: &[usize]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
    }
}

pub fn decode_report(preset: &str, p: f64, seed: u64) -> Result<String, String> {
    let err = |e: coset_qldpc::Error| e.to_string();
    let c = presets::find(preset).ok_or_else(|| format!("unknown preset {preset}"))?.coefficients();
    let b = build_base(&c).map_err(err)?;
    let code = CssCode::new(b.hx, b.hz).map_err(err)?;
    let dec = Decoder::new(&code, DecoderConfig::default()).map_err(err)?;
    let prior = DepolarizingPrior::new(p).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ex, ez) = sample_error(&prior, code.n(), &mut rng);
    let (sx, sz) = syndromes(&code, &ex, &ez).map_err(err)?;
    let out = dec.decode(&sx, &sz, &prior).map_err(err)?;
    let verdict = classify_outcome(&code, &ex, &ez, &out.ex, &out.ez).map_err(err)?;
    let mut s = String::new();
    let _ = writeln!(s, "code {} p {p} seed {seed}", code.params_string());
    let _ = writeln!(s, "error X: {}", list(&ex.ones()));
    let _ = writeln!(s, "error Z: {}", list(&ez.ones()));
    let _ = writeln!(s, "syndrome X: {}", list(&sx.ones()));
    let _ = writeln!(s, "syndrome Z: {}", list(&sz.ones()));
    let _ = writeln!(s, "estimate X: {}", list(&out.ex.ones()));
    let _ = writeln!(s, "estimate Z: {}", list(&out.ez.ones()));
    let _ = writeln!(s, "BP iterations {} fallback {}", out.iterations, out.used_fallback);
    for a in &out.trace {
        let _ = writeln!(s, "  {a:?}");
    }
    let _ = writeln!(s, "status {} verdict {verdict:?}", out.status);
    Ok(s)
}

#[wasm_bindgen]
pub fn presets_list() -> String {
    preset_names().join("\n")
}

#[wasm_bindgen]
pub fn preset_coefficients(name: &str) -> Result<String, JsError> {
    preset_text(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn certify_base(coeff_text: &str, distance: usize) -> Result<String, JsError> {
    certify_report(coeff_text, distance).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn decode_once(preset: &str, p: f64, seed: u64) -> Result<String, JsError> {
    decode_report(preset, p, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn hashing_bound(rate: f64) -> Result<f64, JsError> {
    hashing_threshold(rate).map_err(|e| JsError::new(&e.to_string()))
}
