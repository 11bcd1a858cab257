//! CSV rendering of sweep results.

use std::fs;
use std::path::Path;

use crate::error::{BenchError, Result};
use crate::sweep::PointResult;

pub const CSV_HEADER: &str = "domain,planner,param,simulations,episodes,mean_return,std_err,completion_rate,mean_steps";

/// `%g`-style rendering with six significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-4..6).contains(&exponent) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exponent.abs());
    }
    let decimals = (5 - exponent).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv(results: &[PointResult]) -> String {
    let mut rows: Vec<&PointResult> = results.iter().collect();
    rows.sort_by(|a, b| {
        (a.domain, a.planner, a.param, a.simulations)
            .partial_cmp(&(b.domain, b.planner, b.param, b.simulations))
            .expect("parameters are finite")
    });
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let s = &r.summary;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.domain,
            r.planner,
            format_sig(r.param),
            r.simulations,
            s.episodes,
            format_sig(s.mean_return),
            format_sig(s.std_err),
            format_sig(s.completion_rate),
            format_sig(s.mean_steps),
        ));
    }
    out
}

pub fn write_output(results: &[PointResult], path: &Path) -> Result<()> {
    fs::write(path, render_csv(results)).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })
}
