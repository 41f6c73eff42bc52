//! Profile-check configuration.
//!
//! ```text
//! n = 5
//! kind = ratio_family     # euclidean | ratio_family | tabulated
//! b_inf = 0.5
//! t0 = 1
//! p = 2
//! c = 1.05K0              # absolute value, or a multiple of K0
//! ```
//!
//! Tabulated profiles list `sample = t v` lines (radius, volume) or point
//! `table` at a file of `t v` / `t,v` rows, resolved relative to the config.
//! Optional keys: `mode`, `tol`, `lambda_min`, `lambda_max`, `lambda_count`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sobolev_rigidity::kv::{Entry, KvDocument};
use sobolev_rigidity::rigidity::{ThresholdMode, DEFAULT_TOLERANCE};
use sobolev_rigidity::sharp::sharp_constant_second_order;
use sobolev_rigidity::volume::VolumeProfile;
use sobolev_rigidity::{Dimension, Error};

const KEYS: &[&str] = &[
    "n",
    "kind",
    "b_inf",
    "t0",
    "p",
    "c",
    "sample",
    "table",
    "mode",
    "tol",
    "lambda_min",
    "lambda_max",
    "lambda_count",
];

#[derive(Debug, Clone)]
pub struct ProfileConfig {
    pub profile: VolumeProfile,
    /// `None` when neither the config nor the command line sets `c`.
    pub c: Option<f64>,
    pub mode: ThresholdMode,
    pub tolerance: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
}

/// Parses `"1.05K0"`, `"1.05*K0"`, `"K0"` or a plain number.
pub fn parse_constant(s: &str, n: Dimension) -> Result<f64> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let c = if let Some(head) = lower.strip_suffix("k0") {
        let head = head.trim().trim_end_matches('*').trim();
        let m: f64 = if head.is_empty() {
            1.0
        } else {
            head.parse().with_context(|| format!("invalid multiple of K0 in `{t}`"))?
        };
        m * sharp_constant_second_order(n)?
    } else {
        t.parse().with_context(|| format!("invalid constant `{t}`"))?
    };
    if !(c > 0.0 && c.is_finite()) {
        bail!("the Sobolev constant must be positive and finite, got `{t}`");
    }
    Ok(c)
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn parse_pair(text: &str, line: usize) -> Result<(f64, f64), Error> {
    let fields: Vec<&str> = text
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|f| !f.is_empty())
        .collect();
    let [t, v] = fields[..] else {
        return Err(format_err(line, format!("expected two numbers `t v`, got `{}`", text.trim())));
    };
    let num = |f: &str| f.parse::<f64>().map_err(|_| format_err(line, format!("invalid number `{f}`")));
    Ok((num(t)?, num(v)?))
}

/// Samples with the source line of each, for error reporting.
fn table_samples(path: &Path) -> Result<Vec<((f64, f64), usize)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading table {}", path.display()))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_pair(line, i + 1) {
            Ok(pair) => out.push((pair, i + 1)),
            // A header row is allowed in the first non-comment line.
            Err(_) if out.is_empty() && line.chars().next().is_some_and(|c| c.is_alphabetic()) => {}
            Err(e) => return Err(e).with_context(|| format!("in table {}", path.display())),
        }
    }
    Ok(out)
}

fn positive(e: &Entry) -> Result<f64, Error> {
    let x: f64 = e.parse()?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(format_err(e.line, format!("`{}` must be positive, got {x}", e.key)));
    }
    Ok(x)
}

impl ProfileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base).with_context(|| format!("in config {}", path.display()))
    }

    /// `base` resolves a relative `table` path.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let doc = KvDocument::parse(text)?;
        doc.expect_keys(KEYS)?;
        let n_entry = doc.require("n")?;
        let n = Dimension::second_order(n_entry.parse()?)
            .map_err(|e| format_err(n_entry.line, e.to_string()))?;
        let kind = doc.require("kind")?;
        let profile = match kind.value.as_str() {
            "euclidean" => VolumeProfile::euclidean(n)?,
            "ratio_family" => {
                let b = doc.require("b_inf")?;
                let t0 = positive(doc.require("t0")?)?;
                let p = positive(doc.require("p")?)?;
                VolumeProfile::ratio_family(n, b.parse()?, t0, p)
                    .map_err(|e| format_err(b.line, e.to_string()))?
            }
            "tabulated" => Self::tabulated(&doc, n, base)?,
            other => {
                return Err(format_err(
                    kind.line,
                    format!("unknown kind `{other}` (expected euclidean, ratio_family or tabulated)"),
                )
                .into())
            }
        };
        let c = match doc.get("c") {
            Some(_) => {
                let e = doc.require("c")?;
                Some(parse_constant(&e.value, n).map_err(|err| format_err(e.line, err.to_string()))?)
            }
            None => None,
        };
        let mode = match doc.get("mode") {
            Some(e) => e.value.parse().map_err(|err: Error| format_err(e.line, err.to_string()))?,
            None => ThresholdMode::default(),
        };
        let tolerance = match doc.get("tol") {
            Some(_) => positive(doc.require("tol")?)?,
            None => DEFAULT_TOLERANCE,
        };
        let lambda_min = doc.optional_parsed("lambda_min")?.unwrap_or(1e-3);
        let lambda_max: f64 = doc.optional_parsed("lambda_max")?.unwrap_or(1e3);
        let lambda_count = doc.optional_parsed("lambda_count")?.unwrap_or(41);
        if !(lambda_min > 0.0 && lambda_max >= lambda_min && lambda_max.is_finite() && lambda_count >= 1) {
            bail!("invalid lambda grid: [{lambda_min}, {lambda_max}] with {lambda_count} points");
        }
        Ok(Self {
            profile,
            c,
            mode,
            tolerance,
            lambda_min,
            lambda_max,
            lambda_count,
        })
    }

    fn tabulated(doc: &KvDocument, n: Dimension, base: &Path) -> Result<VolumeProfile> {
        let inline: Vec<_> = doc
            .get_all("sample")
            .map(|e| parse_pair(&e.value, e.line).map(|p| (p, e.line)))
            .collect::<Result<_, _>>()?;
        let (samples, source): (Vec<_>, Option<PathBuf>) = match (inline.is_empty(), doc.get("table")) {
            (false, Some(t)) => {
                return Err(format_err(t.line, "use either `sample` lines or `table`, not both").into())
            }
            (true, Some(_)) => {
                let t = doc.require("table")?;
                let path = base.join(&t.value);
                (table_samples(&path)?, Some(path))
            }
            (false, None) => (inline, None),
            (true, None) => {
                return Err(format_err(
                    doc.require("kind")?.line,
                    "tabulated profile needs `sample = t v` lines or a `table` file",
                )
                .into())
            }
        };
        let pairs: Vec<(f64, f64)> = samples.iter().map(|s| s.0).collect();
        VolumeProfile::tabulated(n, &pairs).map_err(|e| match e {
            // Map the sample index back to its source line.
            Error::Format { line, message } => {
                let line = samples.get(line.wrapping_sub(1)).map_or(line, |s| s.1);
                match &source {
                    Some(p) => anyhow::Error::from(format_err(line, message)).context(format!("in table {}", p.display())),
                    None => format_err(line, message).into(),
                }
            }
            other => other.into(),
        })
    }
}
