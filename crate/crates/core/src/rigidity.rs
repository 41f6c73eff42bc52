//! The `(n, C)` decision procedure: which rigidity conclusions follow when
//! the second-order inequality holds on a complete manifold with
//! nonnegative Ricci curvature and the distance-Laplacian growth condition,
//! with constant `C`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kv::{KvDocument, KvWriter};
use crate::munn::{check_claimed_identity, MunnContext};
use crate::sharp::{sharp_constant_second_order, Dimension};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMode {
    /// Every homotopy threshold from the literal Munn-Perelman formula.
    LiteralFormula,
    /// `2^{4/n} K₀` for `k = 1`, literal formula for `k ≥ 2`.
    #[default]
    ClaimedIdentity,
}

impl ThresholdMode {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdMode::LiteralFormula => "literal",
            ThresholdMode::ClaimedIdentity => "claimed",
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" | "literal_formula" => Ok(ThresholdMode::LiteralFormula),
            "claimed" | "claimed_identity" => Ok(ThresholdMode::ClaimedIdentity),
            _ => Err(Error::domain(format!("unknown threshold mode `{s}`"))),
        }
    }
}

const ASSUMPTIONS: [&str; 3] = [
    "complete Riemannian manifold with nonnegative Ricci curvature",
    "distance Laplacian growth condition rho*Laplacian(rho) >= n-5",
    "second-order Sobolev inequality holds with constant C",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub n: u32,
    pub c: f64,
    pub k0: f64,
    pub c_over_k0: f64,
    pub tolerance: f64,
    pub threshold_mode: ThresholdMode,
    /// `C ≥ K₀` up to tolerance; no manifold carries the inequality below.
    pub ssi_admissible: bool,
    /// `(K₀/C)^{n/4}`, the volume non-collapsing level.
    pub volume_bound: Option<f64>,
    /// `C ≤ (n+2)/(n-2) K₀`.
    pub volume_bound_applicable: bool,
    /// `⌊(C/K₀)^{n/4}⌋`, withheld outside the volume-bound window.
    pub pi1_order_bound: Option<u64>,
    pub pi1_order_bound_real: f64,
    pub simply_connected: bool,
    /// Largest `k` with `π₁ = … = π_k = 0` in the active mode.
    pub homotopy_vanishing_level: u32,
    pub homotopy_level_literal: u32,
    pub homotopy_level_claimed: u32,
    pub contractible: bool,
    pub isometric_to_euclidean: bool,
    /// Whether the literal `α_MP(1,n)^{-4/n}` equals `2^{4/n}`.
    pub claimed_identity_consistent: bool,
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
}

/// Precomputed thresholds for one dimension.
#[derive(Debug, Clone)]
pub struct Decider {
    n: Dimension,
    k0: f64,
    window: f64,
    /// `ln ln(threshold_k / K₀)` from the literal formula, `k = 1..=n`.
    ln_ln_literal: Vec<f64>,
    claimed_identity_consistent: bool,
}

impl Decider {
    pub fn new(n: Dimension) -> Result<Self> {
        n.require_second_order()?;
        let ctx = MunnContext::new(n)?;
        let ln_ln_literal = (1..=n.get())
            .map(|k| Ok(ctx.alpha(k)?.ln_ln_threshold_over_k0()))
            .collect::<Result<Vec<_>>>()?;
        let nf = n.as_f64();
        Ok(Self {
            n,
            k0: sharp_constant_second_order(n)?,
            window: (nf + 2.0) / (nf - 2.0),
            ln_ln_literal,
            claimed_identity_consistent: check_claimed_identity(n)?.consistent,
        })
    }

    fn ln_ln_threshold(&self, k: u32, mode: ThresholdMode) -> f64 {
        match (mode, k) {
            (ThresholdMode::ClaimedIdentity, 1) => (4.0 / self.n.as_f64() * std::f64::consts::LN_2).ln(),
            _ => self.ln_ln_literal[k as usize - 1],
        }
    }

    /// Largest `k₀` with `C < threshold_j` for every `j ≤ k₀`.
    fn level(&self, ratio: f64, mode: ThresholdMode) -> u32 {
        if ratio <= 1.0 {
            return self.n.get();
        }
        let ln_ln_r = libm::log1p(ratio - 1.0).ln();
        (1..=self.n.get())
            .take_while(|&k| ln_ln_r < self.ln_ln_threshold(k, mode))
            .count() as u32
    }

    pub fn decide(&self, c: f64, mode: ThresholdMode, tolerance: f64) -> Result<RigidityReport> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::domain(format!("C must be positive and finite, got {c}")));
        }
        if !(tolerance >= 0.0) || !tolerance.is_finite() {
            return Err(Error::domain(format!("tolerance must be >= 0, got {tolerance}")));
        }
        let nf = self.n.as_f64();
        let r = c / self.k0;
        let mut notes = Vec::new();
        let admissible = r >= 1.0 - tolerance;
        let isometric = (r - 1.0).abs() <= tolerance;
        let pi1_real = r.powf(nf / 4.0);
        let applicable = admissible && r <= self.window * (1.0 + tolerance);

        let (volume_bound, pi1_bound, simply_connected, lit, cla) = if admissible {
            let b = if isometric { 1.0 } else { r.powf(-nf / 4.0).min(1.0) };
            let pi1 = if isometric {
                Some(1)
            } else if applicable {
                Some((pi1_real.floor() as u64).max(1))
            } else {
                notes.push(format!(
                    "C/K0 = {r} exceeds (n+2)/(n-2) = {}: volume bound and pi1 bound withheld (real value {pi1_real})",
                    self.window
                ));
                None
            };
            let sc = isometric || r.powf(nf / 4.0) < 2.0;
            let (lit, cla) = if isometric {
                (self.n.get(), self.n.get())
            } else {
                (
                    self.level(r, ThresholdMode::LiteralFormula),
                    self.level(r, ThresholdMode::ClaimedIdentity),
                )
            };
            (Some(b), pi1, sc, lit, cla)
        } else {
            notes.push(format!(
                "C/K0 = {r} < 1: the inequality fails on every such manifold since K0 is optimal on R^n; no conclusions drawn"
            ));
            (None, None, false, 0, 0)
        };
        if lit != cla {
            notes.push(format!(
                "homotopy level differs by threshold mode: literal {lit}, claimed {cla}"
            ));
        }
        if !self.claimed_identity_consistent {
            notes.push(
                "literal alpha_MP(1,n)^(-4/n) differs from 2^(4/n); flagged inconsistency".to_string(),
            );
        }
        let level = match mode {
            ThresholdMode::LiteralFormula => lit,
            ThresholdMode::ClaimedIdentity => cla,
        };
        Ok(RigidityReport {
            n: self.n.get(),
            c,
            k0: self.k0,
            c_over_k0: r,
            tolerance,
            threshold_mode: mode,
            ssi_admissible: admissible,
            volume_bound,
            volume_bound_applicable: applicable,
            pi1_order_bound: pi1_bound,
            pi1_order_bound_real: pi1_real,
            simply_connected,
            homotopy_vanishing_level: level,
            homotopy_level_literal: lit,
            homotopy_level_claimed: cla,
            contractible: admissible && (isometric || level == self.n.get()),
            isometric_to_euclidean: isometric,
            claimed_identity_consistent: self.claimed_identity_consistent,
            assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
            notes,
        })
    }
}

pub fn decide(n: Dimension, c: f64, mode: ThresholdMode, tolerance: f64) -> Result<RigidityReport> {
    Decider::new(n)?.decide(c, mode, tolerance)
}

fn opt<T: fmt::Display>(x: Option<T>) -> String {
    x.map_or_else(|| "none".to_string(), |v| v.to_string())
}

impl RigidityReport {
    pub fn to_kv(&self) -> String {
        use crate::kv::format_f64 as f;
        let mut w = KvWriter::new();
        w.put("n", self.n)
            .put_f64("c", self.c)
            .put_f64("k0", self.k0)
            .put_f64("c_over_k0", self.c_over_k0)
            .put_f64("tolerance", self.tolerance)
            .put("threshold_mode", self.threshold_mode)
            .put("ssi_admissible", self.ssi_admissible)
            .put("volume_bound", opt(self.volume_bound.map(f)))
            .put("volume_bound_applicable", self.volume_bound_applicable)
            .put("pi1_order_bound", opt(self.pi1_order_bound))
            .put_f64("pi1_order_bound_real", self.pi1_order_bound_real)
            .put("simply_connected", self.simply_connected)
            .put("homotopy_vanishing_level", self.homotopy_vanishing_level)
            .put("homotopy_level_literal", self.homotopy_level_literal)
            .put("homotopy_level_claimed", self.homotopy_level_claimed)
            .put("contractible", self.contractible)
            .put("isometric_to_euclidean", self.isometric_to_euclidean)
            .put("claimed_identity_consistent", self.claimed_identity_consistent);
        for a in &self.assumptions {
            w.put("assumption", a);
        }
        for note in &self.notes {
            w.put("note", note);
        }
        w.finish()
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let d = KvDocument::parse(text)?;
        let optional = |key: &str| -> Result<Option<&crate::kv::Entry>> {
            let e = d.require(key)?;
            Ok(if e.value == "none" { None } else { Some(e) })
        };
        Ok(Self {
            n: d.require_parsed("n")?,
            c: d.require_parsed("c")?,
            k0: d.require_parsed("k0")?,
            c_over_k0: d.require_parsed("c_over_k0")?,
            tolerance: d.require_parsed("tolerance")?,
            threshold_mode: d.require("threshold_mode")?.value.parse()?,
            ssi_admissible: d.require_parsed("ssi_admissible")?,
            volume_bound: optional("volume_bound")?.map(|e| e.parse()).transpose()?,
            volume_bound_applicable: d.require_parsed("volume_bound_applicable")?,
            pi1_order_bound: optional("pi1_order_bound")?.map(|e| e.parse()).transpose()?,
            pi1_order_bound_real: d.require_parsed("pi1_order_bound_real")?,
            simply_connected: d.require_parsed("simply_connected")?,
            homotopy_vanishing_level: d.require_parsed("homotopy_vanishing_level")?,
            homotopy_level_literal: d.require_parsed("homotopy_level_literal")?,
            homotopy_level_claimed: d.require_parsed("homotopy_level_claimed")?,
            contractible: d.require_parsed("contractible")?,
            isometric_to_euclidean: d.require_parsed("isometric_to_euclidean")?,
            claimed_identity_consistent: d.require_parsed("claimed_identity_consistent")?,
            assumptions: d.get_all("assumption").map(|e| e.value.clone()).collect(),
            notes: d.get_all("note").map(|e| e.value.clone()).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k0(n: u32) -> f64 {
        sharp_constant_second_order(Dimension::new(n).unwrap()).unwrap()
    }

    fn run(n: u32, ratio: f64) -> RigidityReport {
        decide(Dimension::new(n).unwrap(), ratio * k0(n), ThresholdMode::default(), DEFAULT_TOLERANCE).unwrap()
    }

    #[test]
    fn euclidean_constant_is_rigid() {
        let r = run(5, 1.0);
        assert!(r.isometric_to_euclidean && r.contractible && r.simply_connected);
        assert_eq!(r.volume_bound, Some(1.0));
        assert_eq!(r.homotopy_vanishing_level, 5);
    }

    #[test]
    fn slightly_larger_constant() {
        let r = run(5, 1.1);
        assert!((r.volume_bound.unwrap() - (1.0f64 / 1.1).powf(1.25)).abs() < 1e-12);
        assert_eq!(r.pi1_order_bound, Some(1));
        assert!(r.simply_connected && !r.isometric_to_euclidean);
        assert_eq!(r.homotopy_level_claimed, 1);
        assert_eq!(r.homotopy_level_literal, 0);
    }

    #[test]
    fn outside_volume_window() {
        let r = run(5, 3.0);
        assert!(!r.volume_bound_applicable);
        assert_eq!(r.pi1_order_bound, None);
        assert!((r.pi1_order_bound_real - 3f64.powf(1.25)).abs() < 1e-12);
        assert!(!r.simply_connected);
    }

    #[test]
    fn below_k0_is_inadmissible() {
        let r = run(6, 0.9);
        assert!(!r.ssi_admissible && !r.contractible && !r.simply_connected);
        assert_eq!(r.volume_bound, None);
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn kv_round_trip() {
        for &ratio in &[1.0, 1.1, 3.0, 0.5] {
            let r = run(7, ratio);
            assert_eq!(RigidityReport::from_kv(&r.to_kv()).unwrap(), r);
        }
    }
}
