//! Convergence diagnostics and CSV/JSON emission.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{CheckpointSeries, DualitySeries, Mode, Value};
use crate::error::{Error, Result};
use crate::rational::{parse_fraction, to_f64, to_fraction_string, Rational};

/// Allowed growth of the error per checkpoint step.
pub const SLACK: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Where the report's target came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetSource {
    Analytic,
    /// `pi_S(x) / pi(x)` at the largest checkpoint.
    Empirical,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub weight: String,
    pub set: String,
    pub mode: String,
    pub window: usize,
    pub target_source: TargetSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub x: u64,
    #[serde(with = "value_serde")]
    pub value: Value,
    #[serde(with = "opt_rational_serde")]
    pub target: Option<Rational>,
    pub abs_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
    pub trend_verdict: Verdict,
    pub final_error: Option<f64>,
}

/// PASS iff each of the last `window` steps satisfies
/// `err[i] <= SLACK * err[i - 1]`.
pub fn trend(errors: &[f64], window: usize) -> Verdict {
    if window == 0 || errors.len() < window + 1 {
        return Verdict::Inconclusive;
    }
    let tail = &errors[errors.len() - window - 1..];
    if tail.windows(2).all(|w| w[1] <= SLACK * w[0]) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Analyzes against the series' own analytic target.
pub fn analyze(series: &CheckpointSeries, window: usize) -> Result<ConvergenceReport> {
    let source = if series.target.is_some() {
        TargetSource::Analytic
    } else {
        TargetSource::None
    };
    analyze_against(series, window, series.target.clone(), source)
}

/// Analyzes against an explicit target. A series shorter than `window + 1`
/// checkpoints gets an INCONCLUSIVE verdict.
pub fn analyze_against(
    series: &CheckpointSeries,
    window: usize,
    target: Option<Rational>,
    source: TargetSource,
) -> Result<ConvergenceReport> {
    if window == 0 {
        return Err(Error::Domain("window must be >= 1".into()));
    }
    let rows: Vec<ReportRow> = series
        .checkpoints
        .iter()
        .zip(&series.values)
        .map(|(&x, v)| ReportRow {
            x,
            value: v.clone(),
            target: target.clone(),
            abs_error: target.as_ref().map(|t| v.abs_error(t)),
        })
        .collect();
    let errors: Option<Vec<f64>> = rows.iter().map(|r| r.abs_error).collect();
    let (trend_verdict, final_error) = match errors {
        Some(e) => (trend(&e, window), e.last().copied()),
        None => (Verdict::Inconclusive, None),
    };
    Ok(ConvergenceReport {
        meta: ReportMeta {
            weight: series.weight_descriptor(),
            set: series.set.descriptor(),
            mode: series.mode.to_string(),
            window,
            target_source: source,
            wall_time_s: None,
        },
        rows,
        trend_verdict,
        final_error,
    })
}

fn decimal(v: &Value) -> String {
    match v {
        Value::Float(f) => f.to_string(),
        Value::Exact(r) => to_f64(r).to_string(),
    }
}

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,value,target,abs_error")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                r.x,
                decimal(&r.value),
                opt(r.target.as_ref(), |t| to_f64(t).to_string()),
                opt(r.abs_error, |e| e.to_string()),
            )?;
        }
        Ok(())
    }

    /// `log10_x,abs_error` for external plotting; rows without a target are
    /// skipped.
    pub fn write_plot_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "log10_x,abs_error")?;
        for r in &self.rows {
            if let Some(e) = r.abs_error {
                writeln!(w, "{},{}", (r.x as f64).log10(), e)?;
            }
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn emit<W: Write>(&self, format: Format, w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format \"{s}\""))),
        }
    }
}

/// Both sides of the duality, analyzed against the same target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub alladi: ConvergenceReport,
    pub duality: ConvergenceReport,
}

impl DualityReport {
    pub fn new(
        series: &DualitySeries,
        window: usize,
        target: Option<Rational>,
        source: TargetSource,
    ) -> Result<Self> {
        Ok(DualityReport {
            alladi: analyze_against(&series.weighted, window, target.clone(), source)?,
            duality: analyze_against(&series.counts, window, target, source)?,
        })
    }

    /// FAIL if either side fails, PASS if both pass.
    pub fn verdict(&self) -> Verdict {
        use Verdict::*;
        match (self.alladi.trend_verdict, self.duality.trend_verdict) {
            (Fail, _) | (_, Fail) => Fail,
            (Pass, Pass) => Pass,
            _ => Inconclusive,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "x,alladi_value,duality_value,target,alladi_abs_error,duality_abs_error"
        )?;
        for (a, d) in self.alladi.rows.iter().zip(&self.duality.rows) {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                a.x,
                decimal(&a.value),
                decimal(&d.value),
                opt(a.target.as_ref(), |t| to_f64(t).to_string()),
                opt(a.abs_error, |e| e.to_string()),
                opt(d.abs_error, |e| e.to_string()),
            )?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn emit<W: Write>(&self, format: Format, w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }
}

/// Float values as JSON numbers, exact values as `"num/den"` strings.
mod value_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Float(f64),
        Exact(String),
    }

    pub fn serialize<S: Serializer>(v: &Value, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Value::Float(f) => Repr::Float(*f),
            Value::Exact(r) => Repr::Exact(to_fraction_string(r)),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Value, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Float(f) => Ok(Value::Float(f)),
            Repr::Exact(s) => parse_fraction(&s)
                .map(Value::Exact)
                .map_err(serde::de::Error::custom),
        }
    }
}

mod opt_rational_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(to_fraction_string).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_fraction(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Mode of a parsed report, taken from its first row.
pub fn report_mode(report: &ConvergenceReport) -> Option<Mode> {
    report.rows.first().map(|r| r.value.mode())
}
