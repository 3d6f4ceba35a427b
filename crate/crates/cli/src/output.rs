use std::fs;
use std::io::Write;
use std::path::Path;

use returnset::density::{density_points, DensityEstimate, IndexWindow, Witness, WitnessMode};
use returnset::format_rational;
use serde_json::{json, Value};

use crate::error::{data, failure, CliError};

pub const SCHEMA: u64 = 1;

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| failure(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(failure)
        }
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| failure(format!("{}: {e}", path.display())))
}

/// Window files are JSON objects or the line-based text format.
pub fn parse_window(text: &str) -> Result<IndexWindow, CliError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(data)
    } else {
        IndexWindow::from_text(text).map_err(data)
    }
}

pub fn density_json(est: &DensityEstimate) -> Value {
    json!({
        "horizon": est.horizon,
        "lengths": est.per_length.keys().collect::<Vec<_>>(),
        "curve": density_points(est),
        "headline": format_rational(&est.headline),
        "headline_length": est.headline_length(),
    })
}

pub fn density_csv(est: &DensityEstimate) -> String {
    let mut s = String::from("length,numerator,denominator,start\n");
    for p in density_points(est) {
        s.push_str(&format!("{},{},{},{}\n", p.length, p.numerator, p.denominator, p.start));
    }
    s
}

pub fn witness_json(w: &Witness) -> Value {
    json!({
        "mode": match w.mode { WitnessMode::Lemma => "lemma", WitnessMode::Corollary => "corollary" },
        "k": w.k,
        "block_size": w.block_size,
        "density": format_rational(&w.density),
        "q_size": w.q.len(),
        "q": w.q.members(),
        "guaranteed_q_size": w.guaranteed.as_ref().map(format_rational),
    })
}

/// `"p/q"` as `p` when the denominator is one.
pub fn short_rational(s: &str) -> &str {
    s.strip_suffix("/1").unwrap_or(s)
}
