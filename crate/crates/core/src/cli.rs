//! Spectrum description files and the command implementations behind the
//! `iwasawa` binary.
//!
//! A spectrum file is one JSON object:
//!
//! ```json
//! { "name": "CP2", "p": 5, "betti": { "0": 1, "2": 1, "4": 1 }, "torsion": [3] }
//! ```
//!
//! Degree keys are strings so that negative degrees are expressible. Unknown
//! keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{
    default_skip, graded_average, ratio_of, sphere_window_length, AsymptoticsError, GrowthRatio,
};
use crate::imc::{verify_weak_imc, ImcReport};
use crate::iwalg::invariants_of;
use crate::k1::sphere_order;
use crate::padic::{OddPrime, PadicError, PadicValuation, DEFAULT_PRECISION};
use crate::spectra::{
    eigenspace_charpoly, euler_characteristic, torsion_free_wedge, total_lambda, EigenspaceKey,
    FiniteSpectrumData, KDegree,
};

/// Environment variable holding the default `--format`.
pub const FORMAT_ENV: &str = "IWASAWA_FORMAT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid prime: {0}")]
    InvalidPrime(u64),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) => 2,
            CliError::InvalidPrime(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl From<AsymptoticsError> for CliError {
    fn from(e: AsymptoticsError) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpecFile {
    pub p: u64,
    pub betti: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// A validated spectrum with its display name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSpectrum {
    pub name: String,
    pub data: FiniteSpectrumData,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn key_error(text: &str, key: &str, message: String) -> CliError {
    let needle = format!("\"{key}\"");
    let (line, column) = text.find(&needle).map_or((1, 1), |at| line_column(text, at));
    CliError::Parse { line, column, message }
}

/// Parses a spectrum file. `prime_override`, when given, replaces the file's `p`.
pub fn parse_spectrum(
    text: &str,
    fallback_name: &str,
    prime_override: Option<u64>,
) -> Result<NamedSpectrum, CliError> {
    let spec: SpectrumSpecFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let p = prime_override.unwrap_or(spec.p);
    let p = OddPrime::new(p).map_err(|_| CliError::InvalidPrime(p))?;
    let mut betti = Vec::with_capacity(spec.betti.len());
    for (key, &rank) in &spec.betti {
        let degree: i64 = key
            .trim()
            .parse()
            .map_err(|_| key_error(text, key, format!("degree {key:?} is not an integer")))?;
        if rank == 0 {
            return Err(key_error(text, key, format!("rank in degree {degree} must be positive")));
        }
        betti.push((degree, rank));
    }
    let data = FiniteSpectrumData::new(p, betti, spec.torsion.unwrap_or_default())
        .map_err(|e| CliError::Parse { line: 1, column: 1, message: e.to_string() })?;
    Ok(NamedSpectrum { name: spec.name.unwrap_or_else(|| fallback_name.to_string()), data })
}

pub fn read_spectrum(path: &std::path::Path, prime_override: Option<u64>) -> Result<NamedSpectrum, CliError> {
    let text = std::fs::read_to_string(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("spectrum");
    parse_spectrum(&text, stem, prime_override)
}

/// Parses `a..b` (inclusive), e.g. `-10..10`.
pub fn parse_m_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: i64 = a.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok(a..=b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub i: i64,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenspaceEntry {
    pub degree: KDegree,
    pub j: u64,
    pub lambda: u64,
    pub mu: u64,
    pub charpoly: String,
    pub factors: Vec<FactorEntry>,
    /// constant term first, exact
    pub coefficients: Vec<String>,
    /// the same coefficients modulo `p^precision`
    pub coefficients_mod: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub name: String,
    pub p: u64,
    pub precision: u32,
    pub euler_characteristic: i64,
    pub total_lambda: i64,
    pub eigenspaces: Vec<EigenspaceEntry>,
}

pub fn invariants_report(spectrum: &NamedSpectrum, precision: u32) -> Result<InvariantsReport, CliError> {
    let x = &spectrum.data;
    let mut eigenspaces = Vec::new();
    for key in EigenspaceKey::all(x.prime()) {
        let f = eigenspace_charpoly(x, key);
        let inv = invariants_of(&f);
        let coefficients_mod = f
            .coefficients_mod(precision)
            .map_err(|e: PadicError| CliError::Domain(e.to_string()))?
            .iter()
            .map(|c| c.residue().to_string())
            .collect();
        eigenspaces.push(EigenspaceEntry {
            degree: key.degree,
            j: key.j,
            lambda: inv.lambda,
            mu: inv.mu,
            charpoly: f.to_string(),
            factors: f.factors().iter().map(|(&i, &multiplicity)| FactorEntry { i, multiplicity }).collect(),
            coefficients: f.coefficients().iter().map(BigRational::to_string).collect(),
            coefficients_mod,
        });
    }
    Ok(InvariantsReport {
        name: spectrum.name.clone(),
        p: x.prime().get(),
        precision,
        euler_characteristic: euler_characteristic(x),
        total_lambda: total_lambda(x),
        eigenspaces,
    })
}

pub fn render_invariants(report: &InvariantsReport, format: OutputFormat) -> Result<String, CliError> {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string_pretty(report).expect("serializable");
            out.push('\n');
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["degree", "j", "lambda", "mu", "charpoly"]).map_err(csv_err)?;
            for e in &report.eigenspaces {
                w.write_record([
                    e.degree.to_string(),
                    e.j.to_string(),
                    e.lambda.to_string(),
                    e.mu.to_string(),
                    e.charpoly.clone(),
                ])
                .map_err(csv_err)?;
            }
            out = finish_csv(w)?;
        }
        OutputFormat::Table => {
            writeln!(out, "spectrum {} at p = {}", report.name, report.p).unwrap();
            writeln!(out, "{:<8} {:>3} {:>7} {:>3}  charpoly", "module", "j", "lambda", "mu").unwrap();
            for e in &report.eigenspaces {
                let module = format!("KU^{}", e.degree);
                writeln!(out, "{:<8} {:>3} {:>7} {:>3}  {}", module, e.j, e.lambda, e.mu, e.charpoly)
                    .unwrap();
            }
            writeln!(out, "euler characteristic: {}", report.euler_characteristic).unwrap();
            writeln!(out, "total lambda: {}", report.total_lambda).unwrap();
        }
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedImcReport {
    pub name: String,
    #[serde(flatten)]
    pub report: ImcReport,
}

pub fn imc_report(spectrum: &NamedSpectrum, m_range: RangeInclusive<i64>) -> NamedImcReport {
    NamedImcReport { name: spectrum.name.clone(), report: verify_weak_imc(&spectrum.data, m_range) }
}

pub fn render_imc(report: &NamedImcReport, format: OutputFormat) -> Result<String, CliError> {
    let records = &report.report.records;
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string_pretty(report).expect("serializable");
            out.push('\n');
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["m", "side", "lhs_val", "rhs_val", "in_window", "match"]).map_err(csv_err)?;
            for r in records {
                w.write_record([
                    r.m.to_string(),
                    r.side.to_string(),
                    r.lhs_val.to_string(),
                    r.rhs_val.to_string(),
                    r.in_window.to_string(),
                    r.matches.to_string(),
                ])
                .map_err(csv_err)?;
            }
            out = finish_csv(w)?;
        }
        OutputFormat::Table => {
            let window = match report.report.window {
                Some(w) => format!("[{}, {}]", w.alpha, w.beta),
                None => "empty".to_string(),
            };
            writeln!(out, "spectrum {} at p = {}, homology in degrees {}", report.name, report.report.p, window)
                .unwrap();
            writeln!(out, "{:>5} {:>5} {:>5} {:>5} {:>9} {:>6}", "m", "side", "lhs", "rhs", "in_window", "match")
                .unwrap();
            for r in records {
                writeln!(
                    out,
                    "{:>5} {:>5} {:>5} {:>5} {:>9} {:>6}",
                    r.m,
                    r.side.to_string(),
                    r.lhs_val.to_string(),
                    r.rhs_val.to_string(),
                    r.in_window,
                    r.matches
                )
                .unwrap();
            }
            let failures = report.report.failures().count();
            writeln!(out, "in-window mismatches: {failures}").unwrap();
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub rung: u32,
    pub n: u64,
    pub average: String,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub name: String,
    pub p: u64,
    pub total_lambda: i64,
    pub skip: i64,
    pub rows: Vec<GrowthRow>,
}

/// Graded averages over windows `2(p-1)p^k`, `k = 0..=ladder`, of `X°`.
pub fn growth_report(
    spectrum: &NamedSpectrum,
    ladder: u32,
    extra_skip: i64,
    average_only: bool,
) -> Result<GrowthReport, CliError> {
    let x = torsion_free_wedge(&spectrum.data);
    let p = x.prime();
    let lambda = total_lambda(&x);
    if lambda == 0 && !average_only {
        return Err(AsymptoticsError::LambdaZero.into());
    }
    let skip = default_skip(&x) + extra_skip;
    let mut rows = Vec::new();
    for rung in 0..=ladder {
        let n = sphere_window_length(p, rung);
        let avg = graded_average(&x, skip, n)?;
        let ratio = match ratio_of(p, lambda, &avg) {
            GrowthRatio::Defined(r) if !average_only => Some(r),
            _ => None,
        };
        rows.push(GrowthRow { rung, n, average: avg.value.to_string(), ratio });
    }
    Ok(GrowthReport { name: spectrum.name.clone(), p: p.get(), total_lambda: lambda, skip, rows })
}

fn ratio_text(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), |r| format!("{r:.6}"))
}

pub fn render_growth(report: &GrowthReport, format: OutputFormat) -> Result<String, CliError> {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string_pretty(report).expect("serializable");
            out.push('\n');
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["rung", "n", "average", "ratio"]).map_err(csv_err)?;
            for r in &report.rows {
                w.write_record([r.rung.to_string(), r.n.to_string(), r.average.clone(), ratio_text(r.ratio)])
                    .map_err(csv_err)?;
            }
            out = finish_csv(w)?;
        }
        OutputFormat::Table => {
            writeln!(
                out,
                "spectrum {} at p = {}, total lambda {}, skip {}",
                report.name, report.p, report.total_lambda, report.skip
            )
            .unwrap();
            writeln!(out, "{:>4} {:>12} {:>16} {:>10}", "rung", "n", "average", "ratio").unwrap();
            for r in &report.rows {
                writeln!(out, "{:>4} {:>12} {:>16} {:>10}", r.rung, r.n, r.average, ratio_text(r.ratio)).unwrap();
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereRow {
    pub t: i64,
    pub exponent: PadicValuation,
    pub group: String,
}

pub fn sphere_table(p: u64, from: i64, to: i64) -> Result<Vec<SphereRow>, CliError> {
    let p = OddPrime::new(p).map_err(|_| CliError::InvalidPrime(p))?;
    Ok((from..=to)
        .map(|t| {
            let order = sphere_order(p, t);
            let group = match order.exponent {
                PadicValuation::Infinite => "Z_p".to_string(),
                PadicValuation::Finite(0) => "0".to_string(),
                PadicValuation::Finite(k) => format!("Z/{p}^{k}"),
            };
            SphereRow { t, exponent: order.exponent, group }
        })
        .collect())
}

pub fn render_sphere_table(rows: &[SphereRow], format: OutputFormat) -> Result<String, CliError> {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string_pretty(rows).expect("serializable");
            out.push('\n');
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["t", "exponent", "group"]).map_err(csv_err)?;
            for r in rows {
                w.write_record([r.t.to_string(), r.exponent.to_string(), r.group.clone()]).map_err(csv_err)?;
            }
            out = finish_csv(w)?;
        }
        OutputFormat::Table => {
            writeln!(out, "{:>6} {:>8}  group", "t", "exponent").unwrap();
            for r in rows {
                writeln!(out, "{:>6} {:>8}  {}", r.t, r.exponent.to_string(), r.group).unwrap();
            }
        }
    }
    Ok(out)
}

pub fn default_precision() -> u32 {
    DEFAULT_PRECISION
}
