//! Batch front end: every job resolves to a `JobConfig` (defaults, then an
//! optional `key = value` file, then flags) and emits one data table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{self, HistogramBins};
use crate::dynamics::{self, DynamicsTrace, QuantumState};
use crate::error::{RabiError, Result};
use crate::model::{self, ModelParams, Parity, SymmetryLabel, TwoPhotonClass, Variant};
use crate::recurrences::{self, BogoliubovClass, GSign, SeriesConfig};
use crate::spectrum::{self, AsymBranch, Condition, LevelKind, TwoPhotonFamily};

pub const CSV_SCHEMA: &str = "# rabiq-csv v1";
pub const JSON_SCHEMA: &str = "rabiq-json v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// lowest levels from the analytic conditions
    Spectrum,
    /// G-function curves on an x grid (E grid for the two-photon model)
    Gfun,
    /// exceptional (Judd-type) degeneracy points
    Judd,
    /// atomic inversion P(t)
    Dynamics,
    /// nearest-neighbour spacing histogram in one parity sector
    Stats,
    /// geometric phase γ_n/2π along a g sweep
    Berry,
    /// analytic-vs-oracle check table
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Gfun => "gfun",
            Command::Judd => "judd",
            Command::Dynamics => "dynamics",
            Command::Stats => "stats",
            Command::Berry => "berry",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = RabiError;
    fn from_str(s: &str) -> Result<Self> {
        const ALL: [Command; 7] = [
            Command::Spectrum,
            Command::Gfun,
            Command::Judd,
            Command::Dynamics,
            Command::Stats,
            Command::Berry,
            Command::Verify,
        ];
        ALL.into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| RabiError::Parse(format!("unknown command '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = RabiError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(RabiError::Parse(format!("unknown format '{s}' (csv|json)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynMethod {
    Spectral,
    Ode,
    Rwa,
    DeepStrong,
    Delta0,
}

impl DynMethod {
    fn name(self) -> &'static str {
        match self {
            DynMethod::Spectral => "spectral",
            DynMethod::Ode => "ode",
            DynMethod::Rwa => "rwa",
            DynMethod::DeepStrong => "deep-strong",
            DynMethod::Delta0 => "delta0",
        }
    }
}

impl FromStr for DynMethod {
    type Err = RabiError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spectral" => DynMethod::Spectral,
            "ode" => DynMethod::Ode,
            "rwa" => DynMethod::Rwa,
            "deep-strong" => DynMethod::DeepStrong,
            "delta0" => DynMethod::Delta0,
            _ => return Err(RabiError::Parse(format!("unknown method '{s}'"))),
        })
    }
}

fn family_name(f: TwoPhotonFamily) -> &'static str {
    match f {
        TwoPhotonFamily::HalfInteger => "half",
        TwoPhotonFamily::Integer => "integer",
    }
}

fn parse_family(s: &str) -> Result<TwoPhotonFamily> {
    match s {
        "half" => Ok(TwoPhotonFamily::HalfInteger),
        "integer" => Ok(TwoPhotonFamily::Integer),
        _ => Err(RabiError::Parse(format!("unknown family '{s}' (half|integer)"))),
    }
}

/// Tolerances in effect for a job; only `series` is adjustable (`--tol`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub series: f64,
    pub bisection: f64,
    pub scan_step: f64,
    pub pole_guard: f64,
    pub oracle: f64,
    pub leakage: f64,
    pub certify: f64,
    pub overlap: f64,
}

impl Tolerances {
    fn new(series: f64) -> Self {
        let scan = spectrum::RootScanConfig::new(0.0, 1.0);
        Tolerances {
            series,
            bisection: scan.bisection_tol,
            scan_step: scan.scan_step,
            pole_guard: scan.pole_guard,
            oracle: model::ORACLE_TOL,
            leakage: dynamics::LEAKAGE_TOL,
            certify: spectrum::CERTIFY_TOL,
            overlap: analysis::OVERLAP_THRESHOLD,
        }
    }

    fn line(&self) -> String {
        format!(
            "series={:e} bisection={:e} scan-step={} pole-guard={:e} oracle={:e} leakage={:e} certify={:e} overlap={}",
            self.series,
            self.bisection,
            self.scan_step,
            self.pole_guard,
            self.oracle,
            self.leakage,
            self.certify,
            self.overlap
        )
    }
}

/// Fully resolved job. `levels` and `samples` fall back to per-command defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub command: Command,
    pub model: Variant,
    pub delta: f64,
    pub g: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub levels: Option<usize>,
    pub x_range: (f64, f64),
    pub samples: Option<usize>,
    pub n: usize,
    pub g_range: (f64, f64),
    pub family: String,
    pub alpha: f64,
    pub spin: String,
    pub t_max: f64,
    pub method: DynMethod,
    pub parity: i32,
    pub bin_width: f64,
    pub bin_max: f64,
    pub g_max: f64,
    pub g_steps: usize,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            command: Command::Spectrum,
            model: Variant::Rabi,
            delta: 0.4,
            g: 0.7,
            omega: 1.0,
            epsilon: 0.0,
            lambda: 0.0,
            levels: None,
            x_range: (-1.0, 5.0),
            samples: None,
            n: 1,
            g_range: (0.0, 2.0),
            family: "half".into(),
            alpha: 2.0,
            spin: "up".into(),
            t_max: 50.0,
            method: DynMethod::Spectral,
            parity: 1,
            bin_width: 0.02,
            bin_max: 2.0,
            g_max: 1.0,
            g_steps: 101,
            tol: SeriesConfig::default().tol,
            format: Format::Csv,
            out: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| RabiError::Parse(format!("{key}: cannot parse '{v}'")))
}

fn parse_pair(key: &str, v: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    match parts[..] {
        [a, b] => Ok((parse_num(key, a)?, parse_num(key, b)?)),
        _ => Err(RabiError::Parse(format!("{key}: expected two numbers, got '{v}'"))),
    }
}

impl JobConfig {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            variant: self.model,
            delta: self.delta,
            omega: self.omega,
            g: self.g,
            epsilon: self.epsilon,
            lambda: self.lambda,
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::new(self.tol)
    }

    /// Plain-text form; `from_kv(to_kv())` reproduces the config exactly.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("command", self.command.name().into());
        put("model", self.model.name().into());
        put("delta", self.delta.to_string());
        put("g", self.g.to_string());
        put("omega", self.omega.to_string());
        put("epsilon", self.epsilon.to_string());
        put("lambda", self.lambda.to_string());
        if let Some(l) = self.levels {
            put("levels", l.to_string());
        }
        put("x-range", format!("{} {}", self.x_range.0, self.x_range.1));
        if let Some(n) = self.samples {
            put("samples", n.to_string());
        }
        put("n", self.n.to_string());
        put("g-range", format!("{} {}", self.g_range.0, self.g_range.1));
        put("family", self.family.clone());
        put("alpha", self.alpha.to_string());
        put("spin", self.spin.clone());
        put("t-max", self.t_max.to_string());
        put("method", self.method.name().into());
        put("parity", format!("{:+}", self.parity));
        put("bin-width", self.bin_width.to_string());
        put("bin-max", self.bin_max.to_string());
        put("g-max", self.g_max.to_string());
        put("g-steps", self.g_steps.to_string());
        put("tol", self.tol.to_string());
        put("format", if self.format == Format::Csv { "csv" } else { "json" }.into());
        if let Some(p) = &self.out {
            put("out", p.display().to_string());
        }
        s
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| RabiError::Parse(format!("line {}: expected 'key = value'", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut c = JobConfig::default();
        c.apply_kv(text)?;
        Ok(c)
    }

    fn set(&mut self, k: &str, v: &str) -> Result<()> {
        match k {
            "command" => self.command = v.parse()?,
            "model" => self.model = v.parse().map_err(|_| RabiError::Parse(format!("unknown model '{v}'")))?,
            "delta" => self.delta = parse_num(k, v)?,
            "g" => self.g = parse_num(k, v)?,
            "omega" => self.omega = parse_num(k, v)?,
            "epsilon" => self.epsilon = parse_num(k, v)?,
            "lambda" => self.lambda = parse_num(k, v)?,
            "levels" => self.levels = Some(parse_num(k, v)?),
            "x-range" => self.x_range = parse_pair(k, v)?,
            "samples" => self.samples = Some(parse_num(k, v)?),
            "n" => self.n = parse_num(k, v)?,
            "g-range" => self.g_range = parse_pair(k, v)?,
            "family" => {
                parse_family(v)?;
                self.family = v.into();
            }
            "alpha" => self.alpha = parse_num(k, v)?,
            "spin" => {
                if v != "up" && v != "down" {
                    return Err(RabiError::Parse(format!("spin must be up or down, got '{v}'")));
                }
                self.spin = v.into();
            }
            "t-max" => self.t_max = parse_num(k, v)?,
            "method" => self.method = v.parse()?,
            "parity" => {
                let p: i32 = parse_num(k, v.trim_start_matches('+'))?;
                if p != 1 && p != -1 {
                    return Err(RabiError::Parse(format!("parity must be +1 or -1, got '{v}'")));
                }
                self.parity = p;
            }
            "bin-width" => self.bin_width = parse_num(k, v)?,
            "bin-max" => self.bin_max = parse_num(k, v)?,
            "g-max" => self.g_max = parse_num(k, v)?,
            "g-steps" => self.g_steps = parse_num(k, v)?,
            "tol" => self.tol = parse_num(k, v)?,
            "format" => self.format = v.parse()?,
            "out" => self.out = Some(PathBuf::from(v)),
            _ => return Err(RabiError::Parse(format!("unknown config key '{k}'"))),
        }
        Ok(())
    }
}

#[derive(Parser, Debug)]
#[command(name = "rabiq", version, about = "Exact spectra and dynamics of Rabi-type models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// key = value file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// rabi | asymmetric | anisotropic | twophoton
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    levels: Option<usize>,
    #[arg(long, global = true, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    x_range: Option<Vec<f64>>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    g_range: Option<Vec<f64>>,
    /// two-photon exceptional family: half | integer
    #[arg(long, global = true)]
    family: Option<String>,
    /// coherent amplitude of the initial field
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// initial spin: up | down
    #[arg(long, global = true)]
    spin: Option<String>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// spectral | ode | rwa | deep-strong | delta0
    #[arg(long, global = true)]
    method: Option<String>,
    /// +1 | -1
    #[arg(long, global = true, allow_negative_numbers = true)]
    parity: Option<String>,
    #[arg(long, global = true)]
    bin_width: Option<f64>,
    #[arg(long, global = true)]
    bin_max: Option<f64>,
    #[arg(long, global = true)]
    g_max: Option<f64>,
    #[arg(long, global = true)]
    g_steps: Option<usize>,
    /// series truncation tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// csv | json
    #[arg(long, global = true)]
    format: Option<String>,
    /// output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Cli {
    fn resolve(&self) -> Result<JobConfig> {
        let mut c = JobConfig::default();
        if let Some(p) = &self.config {
            c.apply_kv(&std::fs::read_to_string(p)?)?;
        }
        c.command = self.command;
        let mut kv: Vec<(&str, String)> = Vec::new();
        macro_rules! flag {
            ($f:ident, $k:expr) => {
                if let Some(v) = &self.$f {
                    kv.push(($k, v.to_string()));
                }
            };
        }
        flag!(model, "model");
        flag!(delta, "delta");
        flag!(g, "g");
        flag!(omega, "omega");
        flag!(epsilon, "epsilon");
        flag!(lambda, "lambda");
        flag!(levels, "levels");
        flag!(samples, "samples");
        flag!(n, "n");
        flag!(family, "family");
        flag!(alpha, "alpha");
        flag!(spin, "spin");
        flag!(t_max, "t-max");
        flag!(method, "method");
        flag!(parity, "parity");
        flag!(bin_width, "bin-width");
        flag!(bin_max, "bin-max");
        flag!(g_max, "g-max");
        flag!(g_steps, "g-steps");
        flag!(tol, "tol");
        flag!(format, "format");
        if let Some(r) = &self.x_range {
            kv.push(("x-range", format!("{} {}", r[0], r[1])));
        }
        if let Some(r) = &self.g_range {
            kv.push(("g-range", format!("{} {}", r[0], r[1])));
        }
        for (k, v) in kv {
            c.set(k, &v)?;
        }
        if let Some(p) = &self.out {
            c.out = Some(p.clone());
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_nan() => "nan".into(),
            Cell::Num(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => csv_quote(s),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Int(i) => (*i).into(),
            Cell::Text(s) => s.clone().into(),
        }
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One output document: metadata pairs plus a rectangular data section.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Vec<(String, String)>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }
    fn meta(&mut self, k: &str, v: impl ToString) {
        self.meta.push((k.into(), v.to_string()));
    }

    /// The data section alone (column header plus rows), as written to CSV.
    pub fn csv_data(&self) -> String {
        let mut s = self.columns.iter().map(|c| csv_quote(c)).collect::<Vec<_>>().join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn render(&self, cfg: &JobConfig, format: Format) -> String {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        match format {
            Format::Csv => {
                let mut s = format!("{CSV_SCHEMA}\n# generated-unix: {stamp}\n");
                let _ = writeln!(s, "# config: {}", cfg.to_kv().trim_end().replace('\n', "; "));
                let _ = writeln!(s, "# tolerances: {}", cfg.tolerances().line());
                for (k, v) in &self.meta {
                    let _ = writeln!(s, "# {k}: {v}");
                }
                s + &self.csv_data()
            }
            Format::Json => {
                let rows: Vec<Vec<serde_json::Value>> = self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
                let meta: serde_json::Map<String, serde_json::Value> =
                    self.meta.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect();
                let doc = serde_json::json!({
                    "schema": JSON_SCHEMA,
                    "generated_unix": stamp,
                    "config": cfg,
                    "tolerances": cfg.tolerances(),
                    "meta": meta,
                    "columns": self.columns,
                    "rows": rows,
                });
                serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n"
            }
        }
    }
}

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

fn text(s: impl Into<String>) -> Cell {
    Cell::Text(s.into())
}

fn kind_name(k: LevelKind) -> &'static str {
    match k {
        LevelKind::Regular => "regular",
        LevelKind::ExceptionalDegenerate => "exceptional-degenerate",
        LevelKind::ExceptionalNondegenerate => "exceptional-nondegenerate",
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn run_spectrum(c: &JobConfig) -> Result<Table> {
    let p = c.params();
    let levels = spectrum::regular_spectrum(&p, c.levels.unwrap_or(12))?;
    let mut t = Table::new(&["x", "energy", "parity", "n", "kind"]);
    for l in levels {
        t.rows.push(vec![num(l.x), num(l.energy), text(l.label.short()), Cell::Int(l.n as i64), text(kind_name(l.kind))]);
    }
    Ok(t)
}

fn g_or_nan(r: Result<recurrences::GEvaluation>) -> f64 {
    r.map_or(f64::NAN, |v| v.value)
}

fn run_gfun(c: &JobConfig) -> Result<Table> {
    let p = c.params();
    p.validate()?;
    let cfg = SeriesConfig { tol: c.tol, ..SeriesConfig::default() };
    let xs = linspace(c.x_range.0, c.x_range.1, c.samples.unwrap_or(2400));
    let t = match p.variant {
        Variant::Rabi | Variant::Anisotropic => {
            let mut t = Table::new(&["x", "g_plus", "g_minus"]);
            for &x in &xs {
                let f = |s| match p.variant {
                    Variant::Rabi => g_or_nan(recurrences::braak_g(x, s, &p, &cfg)),
                    _ => g_or_nan(recurrences::aniso_g(x, s, &p, 0.0, &cfg)),
                };
                t.rows.push(vec![num(x), num(f(GSign::Plus)), num(f(GSign::Minus))]);
            }
            t.meta("g_plus_parity", format!("{:+}", recurrences::braak_parity(GSign::Plus).value()));
            t
        }
        Variant::Asymmetric => {
            let mut t = Table::new(&["x", "g"]);
            for &x in &xs {
                t.rows.push(vec![num(x), num(g_or_nan(recurrences::asym_g(x, &p, &cfg)))]);
            }
            t
        }
        Variant::TwoPhoton => {
            let classes = TwoPhotonClass::ALL;
            let mut t = Table::new(&["energy", "g_c+1", "g_c-1", "g_c+i", "g_c-i"]);
            for &e in &xs {
                let mut row = vec![num(e)];
                row.extend(classes.iter().map(|&k| num(g_or_nan(recurrences::twophoton_g(e, k, &p)))));
                t.rows.push(row);
            }
            t
        }
    };
    Ok(t)
}

fn run_judd(c: &JobConfig) -> Result<Table> {
    // g is scanned here, not fixed
    let p = c.params().with_g(0.0);
    p.validate()?;
    let mut t = Table::new(&["branch", "n", "g_star", "energy", "residual", "degeneracy_gap", "oracle_offset"]);
    let mut push = |b: &str, pt: &spectrum::JuddPoint| {
        t.rows.push(vec![
            text(b),
            Cell::Int(pt.n as i64),
            num(pt.g_star),
            num(pt.energy),
            num(pt.residual),
            num(pt.degeneracy_gap),
            num(pt.oracle_offset),
        ]);
    };
    match p.variant {
        Variant::Rabi => {
            for pt in spectrum::judd_points(c.n, c.delta, c.omega, c.g_range)? {
                push("rabi", &pt);
            }
        }
        Variant::Asymmetric => {
            for a in spectrum::asym_judd_points(c.n, c.delta, c.epsilon, c.omega, c.g_range)? {
                push(if a.branch == AsymBranch::Plus { "+eps" } else { "-eps" }, &a.point);
            }
        }
        Variant::TwoPhoton => {
            let fam = parse_family(&c.family)?;
            for e in spectrum::twophoton_exceptional(fam, c.n, c.delta, c.omega)? {
                t.rows.push(vec![
                    text(family_name(e.family)),
                    Cell::Int(e.n as i64),
                    num(e.g_star),
                    num(e.energy),
                    num(f64::NAN),
                    num(e.degeneracy_gap),
                    num(e.oracle_offset),
                ]);
            }
        }
        Variant::Anisotropic => {
            return Err(RabiError::Domain("judd: no exceptional-point relation for the anisotropic model".into()))
        }
    }
    Ok(t)
}

fn trace_from_states(states: &[QuantumState], n_max: usize) -> DynamicsTrace {
    let s0 = &states[0];
    let n0 = s0.norm_sqr();
    DynamicsTrace {
        times: states.iter().map(|s| s.time).collect(),
        inversion: states.iter().map(QuantumState::inversion).collect(),
        revival: Some(states.iter().map(|s| s0.overlap(s).norm_sqr()).collect()),
        method: dynamics::Method::Ode,
        n_max,
        max_norm_drift: states.iter().map(|s| (s.norm_sqr() - n0).abs()).fold(0.0, f64::max),
        max_boundary_weight: states.iter().map(QuantumState::boundary_weight).fold(0.0, f64::max),
        aliased: false,
    }
}

fn run_dynamics(c: &JobConfig) -> Result<Table> {
    let p = c.params();
    p.validate()?;
    if !(c.t_max > 0.0) || !(c.alpha >= 0.0) {
        return Err(RabiError::Domain("dynamics needs t-max > 0 and alpha >= 0".into()));
    }
    let times = dynamics::time_grid(c.t_max, c.samples);
    let up = c.spin == "up";
    let psi0 = || dynamics::coherent_initial(c.alpha, up, dynamics::coherent_n_max(c.alpha));
    let tr = match c.method {
        DynMethod::Spectral => dynamics::propagate(&psi0()?, &p, &times)?,
        DynMethod::Ode => {
            let s0 = psi0()?;
            let states = dynamics::propagate_ode(&s0, &p, &times, 1e-10)?;
            trace_from_states(&states, s0.n_max())
        }
        DynMethod::Rwa => dynamics::p_rwa(&psi0()?, &p, &times)?,
        DynMethod::DeepStrong => dynamics::p_deep_strong(&p, c.alpha, &times)?,
        DynMethod::Delta0 => dynamics::delta0_revival(c.g, c.omega, &times),
    };
    let mut t = Table::new(&["t", "inversion", "revival"]);
    for (i, &tt) in tr.times.iter().enumerate() {
        let rev = tr.revival.as_ref().map_or(f64::NAN, |r| r[i]);
        t.rows.push(vec![num(tt), num(tr.inversion[i]), num(rev)]);
    }
    t.meta("method", format!("{:?}", tr.method));
    t.meta("n_max", tr.n_max);
    t.meta("max_norm_drift", format!("{:.3e}", tr.max_norm_drift));
    t.meta("max_boundary_weight", format!("{:.3e}", tr.max_boundary_weight));
    t.meta("aliased", tr.aliased);
    Ok(t)
}

fn run_stats(c: &JobConfig) -> Result<Table> {
    let p = c.params();
    let parity = Parity::from_value(c.parity).ok_or_else(|| RabiError::Domain("parity must be +1 or -1".into()))?;
    let bins = HistogramBins { width: c.bin_width, max: c.bin_max };
    let h = analysis::spacing_histogram(&p, parity, c.levels.unwrap_or(501), bins)?;
    let mut t = Table::new(&["center", "count"]);
    for (x, n) in h.centers().into_iter().zip(&h.counts) {
        t.rows.push(vec![num(x), Cell::Int(*n as i64)]);
    }
    let peaks = analysis::histogram_peaks(&h);
    let (wl, wr) = analysis::peak_widths(&h);
    t.meta("levels_used", h.levels_used);
    t.meta("overflow", h.overflow);
    t.meta("peaks", peaks.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" "));
    t.meta("widths", format!("{wl:.4} {wr:.4}"));
    Ok(t)
}

fn run_berry(c: &JobConfig) -> Result<Table> {
    let p = c.params();
    if c.g_steps < 2 || !(c.g_max > 0.0) {
        return Err(RabiError::Domain("berry needs g-steps >= 2 and g-max > 0".into()));
    }
    let grid = linspace(0.0, c.g_max, c.g_steps);
    let r = analysis::berry_phase(&p, c.n, &grid)?;
    let mut t = Table::new(&["g", "energy", "gamma_over_2pi", "label"]);
    for i in 0..r.g.len() {
        t.rows.push(vec![num(r.g[i]), num(r.energy[i]), num(r.gamma[i]), text(r.label[i].short())]);
    }
    t.meta("min_overlap", format!("{:.6}", r.min_overlap));
    t.meta("ambiguous", r.ambiguous.len());
    t.meta("truncation_change", format!("{:.3e}", r.truncation_change));
    t.meta("n_max", r.n_max);
    Ok(t)
}

/// One row of the `verify` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: &str, measured: f64, tolerance: f64) -> Check {
    Check { name: name.into(), measured, tolerance, pass: measured.is_finite() && measured <= tolerance }
}

/// Largest pairwise distance of two sorted root lists (∞ if the counts differ).
pub fn max_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn certified(params: &ModelParams, c: Condition, z: f64, range: (f64, f64)) -> Result<Vec<f64>> {
    Ok(spectrum::condition_roots(params, c, z, range)?
        .into_iter()
        .filter(|r| r.certified)
        .map(|r| r.energy)
        .collect())
}

fn spectrum_vs_oracle(p: &ModelParams, k: usize) -> Result<f64> {
    let lv = spectrum::regular_spectrum(p, k)?;
    let sp = model::oracle_energies(p, k, 1e-12)?;
    Ok(max_distance(&lv.iter().map(|l| l.energy).collect::<Vec<_>>(), &sp.energies[..k]))
}

/// Analytic-vs-oracle checks; measured values are deterministic.
pub fn verify_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let rabi = ModelParams::rabi(0.4, 0.7);
    out.push(check("rabi braak roots vs oracle (g=0.7 delta=0.4, 12 levels)", spectrum_vs_oracle(&rabi, 12)?, 1e-7));
    let cal = spectrum::calibrate_braak_parity()?;
    out.push(check(
        "G_+ parity calibration matches stored convention",
        if cal == recurrences::braak_parity(GSign::Plus) { 0.0 } else { 1.0 },
        0.0,
    ));

    let p = ModelParams::rabi(0.7, 0.8);
    let range = (-1.5, 4.0);
    let bp = certified(&p, Condition::Braak(GSign::Plus), 0.0, range)?;
    let bm = certified(&p, Condition::Braak(GSign::Minus), 0.0, range)?;
    for z in [0.0, 0.24] {
        for (k, sign, want, other) in [(3, GSign::Plus, &bp, "G_+"), (4, GSign::Plus, &bp, "G_+"), (1, GSign::Plus, &bm, "G_-"), (2, GSign::Plus, &bm, "G_-")] {
            let r = certified(&p, Condition::Weak(sign, k), z, range)?;
            out.push(check(&format!("weak G^+_{k} zeros vs {other} (z={z})"), max_distance(&r, want), 1e-8));
        }
    }
    let union = sorted(bp.iter().chain(&bm).copied().collect());
    let w1 = certified(&p, Condition::W1, 0.0, range)?;
    out.push(check("W1 zeros vs union of G_+ and G_- roots", max_distance(&w1, &union), 1e-7));

    let mut gap = 0.0f64;
    let mut count_err = 0usize;
    for d in [0.3, 0.6, 0.9] {
        for n in 1..=3usize {
            let pts = spectrum::judd_points(n, d, 1.0, (0.0, 3.0))?;
            count_err += usize::from(pts.len() != n - spectrum::kus_band(d).unwrap_or(0));
            gap = pts.iter().map(|q| q.degeneracy_gap).fold(gap, f64::max);
        }
    }
    out.push(check("judd points: oracle degeneracy gap (n<=3)", gap, 1e-8));
    out.push(check("judd points: n-k crossing counts (mismatches)", count_err as f64, 0.0));
    let first = spectrum::judd_points(1, 0.6, 1.0, (0.0, 2.0))?;
    let miss = first.first().map_or(f64::INFINITY, |q| (q.g_star - 0.4).abs().max((q.energy - 0.84).abs()));
    out.push(check("judd n=1 delta=0.6 at g=0.4, E=0.84", miss, 1e-12));

    let m = crate::heun::heun_map(1.0 - 0.16, &ModelParams::rabi(0.6, 0.4))?;
    let hc = crate::heun::hc_eval(&m.p2, 0.5, crate::heun::HC_TOL)?;
    out.push(check(
        "heun series truncates at order 0 when delta^2+4g^2=1",
        if hc.truncated_at == Some(0) { 0.0 } else { 1.0 },
        0.0,
    ));

    let asym = spectrum::asym_judd_points(2, 0.4, 0.5, 1.0, (0.0, 3.0))?;
    let agap = asym.iter().map(|a| a.point.degeneracy_gap).fold(if asym.is_empty() { f64::INFINITY } else { 0.0 }, f64::max);
    out.push(check("asymmetric eps=0.5: exceptional degeneracy gap", agap, 1e-8));
    out.push(check("asymmetric eps=0.5 delta=0.4 g=0.7 roots vs oracle", spectrum_vs_oracle(&ModelParams::asymmetric(0.4, 0.7, 0.5), 10)?, 1e-7));

    let one = spectrum::regular_spectrum(&ModelParams::anisotropic(0.4, 0.7, 1.0), 10)?;
    let r = spectrum::regular_spectrum(&rabi, 10)?;
    out.push(check(
        "anisotropic lambda=1 roots vs rabi roots",
        max_distance(&one.iter().map(|l| l.energy).collect::<Vec<_>>(), &r.iter().map(|l| l.energy).collect::<Vec<_>>()),
        1e-8,
    ));
    out.push(check("anisotropic lambda=0.5 roots vs oracle", spectrum_vs_oracle(&ModelParams::anisotropic(0.4, 0.7, 0.5), 10)?, 1e-7));
    let jc = ModelParams::anisotropic(0.4, 0.7, 0.0);
    let lv = spectrum::regular_spectrum(&jc, 10)?;
    let blocks: Vec<f64> = recurrences::aniso_jc_levels(&jc, 12).into_iter().map(|(e, _)| e).take(10).collect();
    out.push(check("anisotropic lambda=0 roots vs JC blocks", max_distance(&lv.iter().map(|l| l.energy).collect::<Vec<_>>(), &blocks), 1e-10));

    let tp = ModelParams::two_photon(1.0, 0.25);
    out.push(check("two-photon G roots vs oracle (delta=1, g=0.25)", spectrum_vs_oracle(&tp, 8)?, 1e-6));
    let ep = spectrum::twophoton_exceptional(TwoPhotonFamily::HalfInteger, 2, 1.0, 1.0)?;
    let ep_err = ep.first().map_or(f64::INFINITY, |e| e.degeneracy_gap.max((e.g_star * e.g_star - 0.125).abs()));
    out.push(check("two-photon N=2 point g^2=1/8: degeneracy gap", ep_err, 1e-7));
    let sp = model::oracle_spectrum(&tp, 16, 1e-12)?;
    let mut bog = 0.0f64;
    for class in [BogoliubovClass::Even, BogoliubovClass::Odd] {
        for sign in [GSign::Plus, GSign::Minus] {
            let (label, roots) = spectrum::bogoliubov_roots(&tp, class, sign, (-1.5, 2.5))?;
            let want: Vec<f64> = sp
                .energies
                .iter()
                .zip(&sp.labels)
                .filter(|(e, l)| **l == SymmetryLabel::TwoPhoton(label) && **e < 2.5)
                .map(|(e, _)| *e)
                .collect();
            bog = bog.max(max_distance(&roots, &want));
        }
    }
    out.push(check("two-photon Bogoliubov G roots vs oracle", bog, 1e-6));

    let dyn_p = ModelParams::rabi(0.5, 0.2);
    let tr = dynamics::propagate(&dynamics::coherent_initial(2.0, true, dynamics::coherent_n_max(2.0))?, &dyn_p, &dynamics::time_grid(250.0, Some(512)))?;
    out.push(check("dynamics norm drift (gt <= 50)", tr.max_norm_drift, 1e-10));
    let d0 = ModelParams::rabi(0.0, 0.3);
    let times = dynamics::time_grid(4.0 * std::f64::consts::PI, Some(256));
    let num_tr = dynamics::propagate(&QuantumState::fock(true, 0, 40)?, &d0, &times)?;
    let closed = dynamics::delta0_revival(0.3, 1.0, &times);
    let rev = num_tr
        .revival
        .as_ref()
        .zip(closed.revival.as_ref())
        .map_or(f64::INFINITY, |(a, b)| max_distance(a, b));
    out.push(check("delta=0 revival vs closed form (two periods)", rev, 1e-6));
    Ok(out)
}

fn run_verify() -> Result<(Table, bool)> {
    let checks = verify_checks()?;
    let mut t = Table::new(&["check", "measured", "tolerance", "status"]);
    let mut ok = true;
    for c in &checks {
        ok &= c.pass;
        t.rows.push(vec![
            text(c.name.clone()),
            text(format!("{:.3e}", c.measured)),
            text(format!("{:.0e}", c.tolerance)),
            text(if c.pass { "PASS" } else { "FAIL" }),
        ]);
    }
    t.meta("checks", checks.len());
    Ok((t, ok))
}

fn execute(c: &JobConfig) -> Result<(Table, bool)> {
    match c.command {
        Command::Spectrum => run_spectrum(c).map(|t| (t, true)),
        Command::Gfun => run_gfun(c).map(|t| (t, true)),
        Command::Judd => run_judd(c).map(|t| (t, true)),
        Command::Dynamics => run_dynamics(c).map(|t| (t, true)),
        Command::Stats => run_stats(c).map(|t| (t, true)),
        Command::Berry => run_berry(c).map(|t| (t, true)),
        Command::Verify => run_verify(),
    }
}

fn threads() -> Result<Option<usize>> {
    match std::env::var("RABIQ_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(RabiError::Domain(format!("RABIQ_THREADS must be an integer >= 1, got '{v}'"))),
        },
    }
}

fn write_out(path: Option<&Path>, doc: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, doc).map_err(RabiError::from),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn run_config(c: &JobConfig) -> Result<bool> {
    let job = || -> Result<bool> {
        let (table, ok) = execute(c)?;
        write_out(c.out.as_deref(), &table.render(c, c.format))?;
        if c.command == Command::Verify {
            let failed = table.rows.iter().filter(|r| r[3] == text("FAIL")).count();
            eprintln!("verify: {} checks, {failed} failed", table.rows.len());
        }
        Ok(ok)
    };
    match threads()? {
        None => job(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RabiError::Domain(format!("thread pool: {e}")))?
            .install(job),
    }
}

/// Parses argv, runs the job and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = cli.resolve().and_then(|c| run_config(&c));
    match result {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let mut c = JobConfig { command: Command::Judd, g: 0.1 + 0.2, x_range: (-1.0 / 3.0, 5.0), ..Default::default() };
        c.levels = Some(7);
        c.out = Some("out dir/a.csv".into());
        c.parity = -1;
        let back = JobConfig::from_kv(&c.to_kv()).unwrap();
        assert_eq!(back, c);
        assert_eq!(JobConfig::from_kv(&JobConfig::default().to_kv()).unwrap(), JobConfig::default());
    }

    #[test]
    fn kv_errors() {
        assert!(JobConfig::from_kv("nope = 1").is_err());
        assert!(JobConfig::from_kv("delta 1").is_err());
        assert!(JobConfig::from_kv("x-range = 1").is_err());
        let c = JobConfig::from_kv("# comment\n  g = 0.25  # trailing\n").unwrap();
        assert_eq!(c.g, 0.25);
    }

    #[test]
    fn csv_cells() {
        assert_eq!(Cell::Num(0.1).csv(), "1.0000000000000001e-1");
        assert_eq!(Cell::Text("a,\"b\"".into()).csv(), "\"a,\"\"b\"\"\"");
        assert_eq!(Cell::Num(f64::NAN).csv(), "nan");
    }
}
