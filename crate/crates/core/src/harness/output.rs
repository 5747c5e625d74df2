//! CSV table, SVG chart and metadata for an [`RmseCurve`].
//!
//! CSV columns are fixed ([`CSV_HEADER`]); floats use `%.9g` formatting,
//! missing values (all trials failed, or no CRB) are written as `nan`, and
//! lines end with `\n`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{DoaError, Result};
use crate::harness::config::{Algorithm, SweepVariable};
use crate::harness::sweep::RmseCurve;

pub const CSV_HEADER: &str =
    "sweep_variable,sweep_value,algorithm,rmse_deg,crb_deg,n_trials,n_failed";

/// C `printf("%.9g")`.
pub fn format_g9(x: f64) -> String {
    const PRECISION: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..PRECISION).contains(&exp) {
        let fixed = format!("{:.*}", (PRECISION - 1 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), format_g9)
}

/// Writes the CSV table (header plus one row per sweep value and algorithm).
pub fn write_csv(curve: &RmseCurve) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        for r in &p.results {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                curve.variable,
                format_g9(p.value),
                r.algorithm,
                opt(r.rmse_deg),
                opt(p.crb_deg),
                r.n_trials,
                r.n_failed
            );
        }
    }
    out
}

/// One parsed CSV data row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub sweep_variable: SweepVariable,
    pub sweep_value: f64,
    pub algorithm: Algorithm,
    pub rmse_deg: Option<f64>,
    pub crb_deg: Option<f64>,
    pub n_trials: usize,
    pub n_failed: usize,
}

/// Parses text produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(DoaError::Format(format!("unexpected CSV header {other:?}")));
        }
    }
    let num = |s: &str| -> Result<Option<f64>> {
        if s == "nan" {
            return Ok(None);
        }
        s.parse()
            .map(Some)
            .map_err(|_| DoaError::Format(format!("bad number `{s}`")))
    };
    let int = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| DoaError::Format(format!("bad count `{s}`")))
    };
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(DoaError::Format(format!("expected 7 fields in `{line}`")));
            }
            Ok(CsvRow {
                sweep_variable: f[0].parse().map_err(|_| DoaError::Format(f[0].into()))?,
                sweep_value: num(f[1])?
                    .ok_or_else(|| DoaError::Format("sweep value is nan".into()))?,
                algorithm: f[2].parse().map_err(|_| DoaError::Format(f[2].into()))?,
                rmse_deg: num(f[3])?,
                crb_deg: num(f[4])?,
                n_trials: int(f[5])?,
                n_failed: int(f[6])?,
            })
        })
        .collect()
}

const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// Self-contained SVG line chart with a log-scale RMSE axis.
pub fn render_svg(curve: &RmseCurve) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 160.0, 30.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let xs: Vec<f64> = curve.points.iter().map(|p| p.value).collect();
    let xmin = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let xmax = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };

    let ys: Vec<f64> = curve
        .points
        .iter()
        .flat_map(|p| p.results.iter().filter_map(|r| r.rmse_deg).chain(p.crb_deg))
        .filter(|v| *v > 0.0 && v.is_finite())
        .collect();
    let (dmin, dmax) = if ys.is_empty() {
        (-1.0, 1.0)
    } else {
        let lo = ys
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            .log10()
            .floor();
        let hi = ys
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            .log10()
            .ceil();
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };

    let px = |x: f64| left + (x - xmin) / xspan * pw;
    let py = |y: f64| top + (dmax - y.log10()) / (dmax - dmin) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let mut decade = dmin as i32;
    while decade as f64 <= dmax {
        let y = py(10f64.powi(decade));
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{decade}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0
        );
        decade += 1;
    }
    for &x in &xs {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            top + ph + 18.0,
            format_g9(x)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 10.0,
        curve.variable
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">RMSE (deg)</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );

    let mut legend_y = top + 10.0;
    let mut polyline = |s: &mut String,
                        pts: Vec<(f64, f64)>,
                        color: &str,
                        dash: &str,
                        label: &str| {
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            path.join(" ")
        );
        for &(x, y) in &pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            lx + 24.0,
            lx + 30.0,
            legend_y + 4.0
        );
        legend_y += 18.0;
    };
    for (i, &alg) in curve.algorithms.iter().enumerate() {
        let pts = curve
            .points
            .iter()
            .filter_map(|p| {
                p.result(alg)
                    .and_then(|r| r.rmse_deg)
                    .filter(|v| *v > 0.0)
                    .map(|v| (p.value, v))
            })
            .collect();
        polyline(&mut s, pts, COLORS[i % COLORS.len()], "", alg.name());
    }
    let crb = curve
        .points
        .iter()
        .filter_map(|p| p.crb_deg.filter(|v| *v > 0.0).map(|v| (p.value, v)))
        .collect();
    polyline(&mut s, crb, "black", r#" stroke-dasharray="6 4""#, "CRB");
    s.push_str("</svg>\n");
    s
}

fn render_meta(curve: &RmseCurve) -> String {
    let mut s = String::new();
    s.push_str("rmse_pooling = joint over sources and non-failed trials\n");
    s.push_str("failed_trials = excluded from rmse_deg, counted in n_failed\n");
    s.push_str("pairing = minimum total squared error permutation\n");
    s.push_str("crb = stochastic, sqrt of mean per-source variance\n");
    s.push_str("noise_power = source_power * 10^(-snr_db/10)\n");
    let _ = writeln!(s, "sweep_variable = {}", curve.variable);
    let _ = writeln!(s, "points = {}", curve.points.len());
    s
}

/// Files written by [`emit_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub meta: PathBuf,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<prefix>.csv`, `<prefix>.svg` and `<prefix>.meta.txt`.
pub fn emit_outputs(curve: &RmseCurve, prefix: impl AsRef<Path>) -> Result<OutputPaths> {
    if curve.points.is_empty() {
        return Err(DoaError::Precondition("cannot emit an empty curve".into()));
    }
    let prefix = prefix.as_ref();
    if let Some(parent) = prefix.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let paths = OutputPaths {
        csv: with_suffix(prefix, ".csv"),
        svg: with_suffix(prefix, ".svg"),
        meta: with_suffix(prefix, ".meta.txt"),
    };
    fs::write(&paths.csv, write_csv(curve))?;
    fs::write(&paths.svg, render_svg(curve))?;
    fs::write(&paths.meta, render_meta(curve))?;
    Ok(paths)
}
