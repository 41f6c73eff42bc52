//! Command implementations behind the `sobolev-rigidity` binary.
//!
//! Every command returns its stdout text plus an exit status so that tests
//! can drive them without spawning processes.

pub mod config;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sobolev_rigidity::kv::{format_f64, KvWriter};
use sobolev_rigidity::munn::munn_table;
use sobolev_rigidity::rigidity::{decide, RigidityReport, ThresholdMode};
use sobolev_rigidity::sharp::{euclidean_g, g_exponent, sharp_constant_kth, EuclideanConstants};
use sobolev_rigidity::volume::{comparison_trace, kernel_integral_scan, log_grid, ComparisonTrace, KernelIntegralScan, ValidationReport};
use sobolev_rigidity::Dimension;

pub use config::{parse_constant, ProfileConfig};
pub use verify::{run_verification_suite, Suite, VerificationReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_VIOLATIONS: u8 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub status: u8,
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn constants(n: u32, k: Option<u32>) -> Result<Outcome> {
    let d = Dimension::second_order(n)?;
    let c = EuclideanConstants::new(d)?;
    let mut w = KvWriter::new();
    w.put("n", n)
        .put_f64("k0", c.k0)
        .put_f64("c0", c.c0)
        .put_f64("omega_n", c.omega_n)
        .put_f64("two_sharp", c.two_sharp)
        .put_f64("window_upper", c.window_upper)
        .put_f64("g_at_one", euclidean_g(1.0, d)?)
        .put_f64("g_exponent", g_exponent(d));
    if let Some(k) = k {
        w.put("k", k).put_f64("lambda_k", sharp_constant_kth(d, k)?);
    }
    Ok(Outcome {
        stdout: w.finish(),
        status: EXIT_OK,
    })
}

pub fn decide_command(n: u32, c: &str, mode: ThresholdMode, tol: f64) -> Result<Outcome> {
    let d = Dimension::second_order(n)?;
    let report = decide(d, parse_constant(c, d)?, mode, tol)?;
    Ok(Outcome {
        stdout: report.to_kv(),
        status: EXIT_OK,
    })
}

pub fn verify_command(suite: Suite) -> Result<Outcome> {
    let report = run_verification_suite(suite)?;
    Ok(Outcome {
        stdout: report.to_csv(),
        status: if report.all_passed() { EXIT_OK } else { EXIT_ERROR },
    })
}

/// Everything a profile check computed, before it is written out.
#[derive(Debug, Clone)]
pub struct ProfileCheck {
    pub config: ProfileConfig,
    pub c: f64,
    pub validation: ValidationReport,
    pub report: RigidityReport,
    pub trace: ComparisonTrace,
    pub scan: KernelIntegralScan,
    pub relation_violations: Vec<String>,
    pub asymptotic_ratio: Result<f64, String>,
}

impl ProfileCheck {
    pub fn run(config: ProfileConfig, c_override: Option<&str>) -> Result<Self> {
        let p = &config.profile;
        let n = p.n();
        let k0 = EuclideanConstants::new(n)?.k0;
        let c = match (c_override, config.c) {
            (Some(s), _) => parse_constant(s, n)?,
            (None, Some(c)) => c,
            (None, None) => k0,
        };
        let validation = p.validate();
        let report = decide(n, c, config.mode, config.tolerance)?;
        let grid = log_grid(config.lambda_min, config.lambda_max, config.lambda_count);
        let trace = comparison_trace(p, c, &grid)?;
        let scan = kernel_integral_scan(p, trace.b, &grid)?;
        let relation_violations = trace.relation_violations();
        let asymptotic_ratio = p.asymptotic_ratio().map_err(|e| e.to_string());
        Ok(Self {
            config,
            c,
            validation,
            report,
            trace,
            scan,
            relation_violations,
            asymptotic_ratio,
        })
    }

    /// Profile invariants or pointwise comparison relations that fail.
    pub fn has_violations(&self) -> bool {
        !self.validation.is_valid() || !self.relation_violations.is_empty()
    }

    /// Smallest grid `λ` with a strictly negative kernel integral.
    pub fn lambda_star(&self) -> Option<f64> {
        self.scan.first_negative()
    }

    pub fn summary(&self) -> String {
        let r = &self.report;
        let mut s = String::new();
        let mut line = |t: String| {
            s.push_str(&t);
            s.push('\n');
        };
        line(format!("profile check: n = {}, kind = {}", r.n, kind_name(&self.config)));
        line(format!("C = {} ({} K0)", format_f64(self.c), format_f64(r.c_over_k0)));
        if self.config.c.is_none() {
            line("C not configured; defaulted to K0".into());
        }
        line(String::new());
        if self.validation.is_valid() {
            line(format!("profile invariants: ok ({} points)", self.validation.points_checked));
        } else {
            line("profile invariants: VIOLATED".into());
            for v in &self.validation.violations {
                line(format!("  {} at t = {}: {}", v.invariant.name(), format_f64(v.t), v.detail));
            }
        }
        if self.relation_violations.is_empty() {
            line("F versus G relations: ok".into());
        } else {
            line(format!("F versus G relations: {} failures", self.relation_violations.len()));
            for v in &self.relation_violations {
                line(format!("  {v}"));
            }
        }
        let below = self.trace.f0_below_g0();
        line(format!(
            "F0 >= G0 on {} of {} grid points",
            self.trace.rows.len() - below.len(),
            self.trace.rows.len()
        ));
        let window = self.trace.rows.iter().filter(|row| !row.window_ok).count();
        line(format!("window condition fails at {window} grid points"));
        match self.lambda_star() {
            Some(l) => line(format!(
                "finding: kernel integral negative at b = {}, first at lambda* = {}",
                format_f64(self.scan.b),
                format_f64(l)
            )),
            None => line(format!("kernel integral nonnegative on the grid at b = {}", format_f64(self.scan.b))),
        }
        match &self.asymptotic_ratio {
            Ok(a) => line(format!("asymptotic volume ratio = {}", format_f64(*a))),
            Err(e) => line(format!("asymptotic volume ratio undetermined: {e}")),
        }
        line(String::new());
        line(format!(
            "admissible = {}, isometric = {}, simply connected = {}, homotopy level = {}",
            r.ssi_admissible, r.isometric_to_euclidean, r.simply_connected, r.homotopy_vanishing_level
        ));
        for note in &r.notes {
            line(format!("note: {note}"));
        }
        s
    }

    pub fn status(&self) -> u8 {
        if self.has_violations() {
            EXIT_VIOLATIONS
        } else {
            EXIT_OK
        }
    }

    /// Writes `report.txt`, `trace.csv` and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let files = [
            ("report.txt", self.report.to_kv()),
            ("trace.csv", self.trace.to_csv()),
            ("summary.txt", self.summary()),
        ];
        let mut out = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            write_atomic(&path, &body)?;
            out.push(path);
        }
        Ok(out)
    }
}

fn kind_name(c: &ProfileConfig) -> &'static str {
    use sobolev_rigidity::volume::ProfileKind;
    match c.profile.kind() {
        ProfileKind::Euclidean => "euclidean",
        ProfileKind::RatioFamily { .. } => "ratio_family",
        ProfileKind::Tabulated { .. } => "tabulated",
    }
}

pub fn profile_check(config: &Path, c: Option<&str>, out: &Path) -> Result<Outcome> {
    let cfg = ProfileConfig::load(config)?;
    let check = ProfileCheck::run(cfg, c)?;
    check.write(out)?;
    Ok(Outcome {
        stdout: check.summary(),
        status: check.status(),
    })
}

pub const MUNN_TABLE_HEADER: &str =
    "k,n,ln_c_kk,ln_delta,ln_one_minus_alpha,ln_threshold_over_k0,ln_ln_threshold_over_k0";

pub fn munn_table_csv(n_max: u32, digits: usize) -> Result<String> {
    let mut s = format!("{MUNN_TABLE_HEADER}\n");
    for r in munn_table(n_max, digits)? {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            r.n,
            format_f64(r.ln_c_kk),
            format_f64(r.ln_delta),
            format_f64(r.ln_one_minus_alpha),
            format_f64(r.ln_threshold_over_k0),
            format_f64(r.ln_ln_threshold_over_k0)
        ));
    }
    Ok(s)
}

pub fn munn_table_command(n_max: u32, digits: usize, out: &Path) -> Result<Outcome> {
    let csv = munn_table_csv(n_max, digits)?;
    write_atomic(out, &csv)?;
    Ok(Outcome {
        stdout: format!("wrote {} rows to {}\n", csv.lines().count() - 1, out.display()),
        status: EXIT_OK,
    })
}
