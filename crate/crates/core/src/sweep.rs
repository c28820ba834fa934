//! Parameter sweeps, figure presets and the zero-temperature limit table.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::entanglement::{c12_zero_t_limit, concurrence_pair, Pair};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::oracle::threshold_scan;
use crate::thermal::ThermalParams;

pub const CSV_HEADER: &str = "pair,j_sign,B,tau,concurrence";
/// Significant digits written to CSV files.
pub const CSV_DIGITS: usize = 10;
pub const FIGURE_POINTS: usize = 200;

/// Sign of the exchange coupling, `J = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// `J > 0`.
    Antiferromagnetic,
    /// `J < 0`.
    Ferromagnetic,
}

impl Coupling {
    pub fn j(self) -> f64 {
        match self {
            Coupling::Antiferromagnetic => 1.0,
            Coupling::Ferromagnetic => -1.0,
        }
    }

    pub fn from_sign(j: i64) -> Result<Self> {
        match j {
            1 => Ok(Coupling::Antiferromagnetic),
            -1 => Ok(Coupling::Ferromagnetic),
            other => Err(Error::InvalidInput(format!("J sign must be 1 or -1, got {other}"))),
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Antiferromagnetic => f.write_str("1"),
            Coupling::Ferromagnetic => f.write_str("-1"),
        }
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: i64 = s
            .trim()
            .trim_start_matches('+')
            .parse()
            .map_err(|_| Error::InvalidInput(format!("J sign must be 1 or -1, got {s:?}")))?;
        Self::from_sign(v)
    }
}

/// `min:max:count`, inclusive of both ends.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::InvalidInput(format!("range must be min:max:count, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !min.is_finite() || !max.is_finite() {
        return Err(bad());
    }
    Ok(linspace(min, max, count))
}

pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        n => (0..n)
            .map(|k| {
                if k == n - 1 {
                    max
                } else {
                    min + (max - min) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Comma-separated list of numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::InvalidInput(format!("not a number: {s:?}")))
        })
        .collect()
}

/// Rounds to `digits` significant digits and prints the shortest
/// representation that round-trips the rounded value.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub pair: Pair,
    pub coupling: Coupling,
    pub b_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b_values.is_empty() {
            return Err(Error::InvalidInput("empty B axis".into()));
        }
        if self.tau_values.is_empty() {
            return Err(Error::InvalidInput("empty tau axis".into()));
        }
        if let Some(&b) = self.b_values.iter().find(|b| !b.is_finite()) {
            return Err(Error::InvalidInput(format!("B value {b} is not finite")));
        }
        for &tau in &self.tau_values {
            ThermalParams::new(tau)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub pair: Pair,
    pub coupling: Coupling,
    pub b: f64,
    pub tau: f64,
    pub concurrence: f64,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.pair,
            self.coupling,
            format_significant(self.b, CSV_DIGITS),
            format_significant(self.tau, CSV_DIGITS),
            format_significant(self.concurrence, CSV_DIGITS)
        )
    }
}

/// Evaluates the sweep with `B` as the outer and `τ` as the inner axis.
pub fn evaluate_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let points: Vec<(f64, f64)> = config
        .b_values
        .iter()
        .flat_map(|&b| config.tau_values.iter().map(move |&tau| (b, tau)))
        .collect();
    points
        .into_par_iter()
        .map(|(b, tau)| {
            let params = ModelParams::new(config.coupling.j(), b)?;
            let concurrence = concurrence_pair(&params, &ThermalParams::new(tau)?, config.pair)?;
            Ok(SweepRow {
                pair: config.pair,
                coupling: config.coupling,
                b,
                tau,
                concurrence,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    out.write_all(CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        out.write_all(row.csv_line().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// One- or many-valued config entry.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Values {
    One(f64),
    Many(Vec<f64>),
}

impl Values {
    fn into_vec(self) -> Vec<f64> {
        match self {
            Values::One(x) => vec![x],
            Values::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PairValue {
    Number(i64),
    Text(String),
}

/// Sweep settings read from a flat TOML file; keys mirror the CLI flags.
///
/// ```toml
/// pair = 13
/// j = -1
/// b_range = "0:12:200"
/// tau = [0.1, 0.5, 1.0]
/// out = "c13.csv"
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pair: Option<PairValue>,
    j: Option<i64>,
    b: Option<Values>,
    b_range: Option<String>,
    tau: Option<Values>,
    tau_range: Option<String>,
    out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Sweep settings given on the command line; anything set here wins over
/// the config file.
#[derive(Debug, Clone, Default)]
pub struct SweepOverrides {
    pub pair: Option<Pair>,
    pub coupling: Option<Coupling>,
    pub b: Option<Vec<f64>>,
    pub b_range: Option<String>,
    pub tau: Option<Vec<f64>>,
    pub tau_range: Option<String>,
    pub out: Option<PathBuf>,
}

fn axis(
    flag_list: Option<Vec<f64>>,
    flag_range: Option<String>,
    file_list: Option<Values>,
    file_range: Option<String>,
    name: &str,
) -> Result<Vec<f64>> {
    if let Some(v) = flag_list {
        return Ok(v);
    }
    if let Some(r) = flag_range {
        return parse_range(&r);
    }
    if let Some(v) = file_list {
        return Ok(v.into_vec());
    }
    if let Some(r) = file_range {
        return parse_range(&r);
    }
    Err(Error::InvalidInput(format!("no {name} values given")))
}

pub fn resolve_sweep(file: Option<SweepFile>, flags: SweepOverrides) -> Result<SweepConfig> {
    let file = file.unwrap_or_default();
    let pair = match (flags.pair, file.pair) {
        (Some(p), _) => p,
        (None, Some(PairValue::Number(n))) => n.to_string().parse()?,
        (None, Some(PairValue::Text(s))) => s.parse()?,
        (None, None) => Pair::P12,
    };
    let coupling = match (flags.coupling, file.j) {
        (Some(c), _) => c,
        (None, Some(j)) => Coupling::from_sign(j)?,
        (None, None) => Coupling::Antiferromagnetic,
    };
    let config = SweepConfig {
        pair,
        coupling,
        b_values: axis(flags.b, flags.b_range, file.b, file.b_range, "B")?,
        tau_values: axis(flags.tau, flags.tau_range, file.tau, file.tau_range, "tau")?,
        out: flags.out.or(file.out),
    };
    config.validate()?;
    Ok(config)
}

/// The sweeps behind figure `id`, one per plotted curve.
pub fn figure_series(id: u32) -> Result<Vec<SweepConfig>> {
    let both = [Coupling::Antiferromagnetic, Coupling::Ferromagnetic];
    let tau_axis = linspace(0.05, 3.0, FIGURE_POINTS);
    let b_axis = linspace(0.0, 12.0, FIGURE_POINTS);
    let series = |pair, coupling, b_values: Vec<f64>, tau_values: Vec<f64>| SweepConfig {
        pair,
        coupling,
        b_values,
        tau_values,
        out: None,
    };
    let mut out = Vec::new();
    match id {
        1 | 3 => {
            let pair = if id == 1 { Pair::P12 } else { Pair::P13 };
            for c in both {
                for b in [0.0, 1.0, 10.0] {
                    out.push(series(pair, c, vec![b], tau_axis.clone()));
                }
            }
        }
        2 => {
            for c in both {
                for tau in [0.1, 0.5, 1.0] {
                    out.push(series(Pair::P12, c, b_axis.clone(), vec![tau]));
                }
            }
        }
        4 => {
            for tau in [0.1, 0.5, 1.0] {
                out.push(series(Pair::P13, Coupling::Ferromagnetic, b_axis.clone(), vec![tau]));
            }
            out.push(series(Pair::P13, Coupling::Antiferromagnetic, b_axis.clone(), vec![2.0]));
        }
        other => return Err(Error::BadFigureId(other)),
    }
    Ok(out)
}

/// All rows of figure `id`, series after series.
pub fn figure_rows(id: u32) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for s in figure_series(id)? {
        rows.extend(evaluate_sweep(&s)?);
    }
    Ok(rows)
}

pub fn figure_file_name(id: u32) -> String {
    format!("fig{id}.csv")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub label: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl LimitRow {
    pub fn passed(&self) -> bool {
        (self.computed - self.expected).abs() <= self.tolerance
    }
}

/// `τ* = 1/ln x*` with `x*` the real root of `x³ − 3x − 4 = 0`: where the
/// zero-field pair-12 concurrence vanishes.
pub fn zero_field_threshold() -> f64 {
    let s = 3f64.sqrt();
    let x = (2.0 + s).cbrt() + (2.0 - s).cbrt();
    1.0 / x.ln()
}

/// Largest `C13` over a uniform grid of `count` field values.
pub fn max_c13_over_field(coupling: Coupling, tau: f64, b_min: f64, b_max: f64, count: usize) -> Result<(f64, f64)> {
    let tp = ThermalParams::new(tau)?;
    let mut best = (f64::NEG_INFINITY, b_min);
    for b in linspace(b_min, b_max, count) {
        let c = concurrence_pair(&ModelParams::new(coupling.j(), b)?, &tp, Pair::P13)?;
        if c > best.0 {
            best = (c, b);
        }
    }
    Ok(best)
}

/// Evaluates the tabulated zero-temperature and threshold results.
pub fn limit_table() -> Result<Vec<LimitRow>> {
    let c = |j: f64, b: f64, tau: f64, pair: Pair| -> Result<f64> {
        concurrence_pair(&ModelParams::new(j, b)?, &ThermalParams::new(tau)?, pair)
    };
    let fm_unit = ModelParams::new(-1.0, 1.0)?;
    let zero_field_fm = ModelParams::new(-1.0, 0.0)?;
    let (c13_max, b_at_max) = max_c13_over_field(Coupling::Ferromagnetic, 0.002, 0.01, 0.2, 400)?;

    Ok(vec![
        LimitRow {
            label: "C12 tau->0, J>0, B=10 (tau=0.01)".into(),
            computed: c(1.0, 10.0, 0.01, Pair::P12)?,
            expected: 1.0,
            tolerance: 1e-3,
        },
        LimitRow {
            label: "C12 tau->0, J<0, B=1 -> 2/(2+a4^2) (tau=0.005)".into(),
            computed: c(-1.0, 1.0, 0.005, Pair::P12)?,
            expected: c12_zero_t_limit(&fm_unit)?,
            tolerance: 1e-3,
        },
        LimitRow {
            label: "C12 tau->0, J<0, B=1e6 -> 1 (tau=0.01)".into(),
            computed: c(-1.0, 1e6, 0.01, Pair::P12)?,
            expected: 1.0,
            tolerance: 1e-3,
        },
        LimitRow {
            label: "C12 tau->0, J<0, B->0+ -> 2/3 (B=1e-3, tau=1e-5)".into(),
            computed: c(-1.0, 1e-3, 1e-5, Pair::P12)?,
            expected: 2.0 / 3.0,
            tolerance: 1e-3,
        },
        LimitRow {
            label: "C12 tau->0, B=0, J<0 -> 1/3 (tau=0.01)".into(),
            computed: c(-1.0, 0.0, 0.01, Pair::P12)?,
            expected: 1.0 / 3.0,
            tolerance: 1e-3,
        },
        LimitRow {
            label: "C12, B=0, J>0 (tau=0.05)".into(),
            computed: c(1.0, 0.0, 0.05, Pair::P12)?,
            expected: 0.0,
            tolerance: 0.0,
        },
        LimitRow {
            label: format!("max C13, J<0, tau=0.002, B in [0.01, 0.2] (at B={b_at_max:.4})"),
            computed: c13_max,
            expected: 2.0 / 3.0,
            tolerance: 0.01,
        },
        LimitRow {
            label: "threshold tau*, B=0, J<0, pair 12".into(),
            computed: threshold_scan(&zero_field_fm, Pair::P12, (0.05, 3.0))?,
            expected: zero_field_threshold(),
            tolerance: 0.002,
        },
    ])
}
