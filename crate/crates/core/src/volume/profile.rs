//! Radial volume profiles `t ↦ vol B(x₀, t)`, stored through the ratio
//! `θ(t) = v(t) / (ω_n tⁿ)`.

use crate::error::{Error, Result};
use crate::numerics::solve_bracketed;
use crate::sharp::{unit_ball_volume, Dimension};

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `θ ≡ 1`.
    Euclidean,
    /// `θ(t) = b_inf + (1 - b_inf) / (1 + (t/t0)ᵖ)`.
    RatioFamily { b_inf: f64, t0: f64, p: f64 },
    /// Samples of `θ` at strictly increasing radii, linearly interpolated
    /// from `(0, 1)` and held constant past the last sample.
    Tabulated { t: Vec<f64>, theta: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeProfile {
    n: Dimension,
    omega: f64,
    kind: ProfileKind,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

impl VolumeProfile {
    pub fn euclidean(n: Dimension) -> Result<Self> {
        n.require_second_order()?;
        Ok(Self {
            n,
            omega: unit_ball_volume(n),
            kind: ProfileKind::Euclidean,
        })
    }

    pub fn ratio_family(n: Dimension, b_inf: f64, t0: f64, p: f64) -> Result<Self> {
        n.require_second_order()?;
        if !(b_inf > 0.0 && b_inf <= 1.0) {
            return Err(Error::domain(format!("b_inf must lie in (0, 1], got {b_inf}")));
        }
        positive("t0", t0)?;
        positive("p", p)?;
        Ok(Self {
            n,
            omega: unit_ball_volume(n),
            kind: ProfileKind::RatioFamily { b_inf, t0, p },
        })
    }

    /// Profile from `(t, v)` volume samples. Only structural problems are
    /// rejected here; comparison-geometry violations are left to
    /// [`VolumeProfile::validate`] so they can be reported with a location.
    pub fn tabulated(n: Dimension, samples: &[(f64, f64)]) -> Result<Self> {
        n.require_second_order()?;
        if samples.is_empty() {
            return Err(Error::Format {
                line: 0,
                message: "tabulated profile needs at least one sample".into(),
            });
        }
        let omega = unit_ball_volume(n);
        let mut t = Vec::with_capacity(samples.len());
        let mut theta = Vec::with_capacity(samples.len());
        for (i, &(ti, vi)) in samples.iter().enumerate() {
            let line = i + 1;
            if !(ti > 0.0) || !ti.is_finite() {
                return Err(Error::Format {
                    line,
                    message: format!("sample radius must be positive, got {ti}"),
                });
            }
            if !(vi >= 0.0) || !vi.is_finite() {
                return Err(Error::Format {
                    line,
                    message: format!("sample volume must be nonnegative, got {vi}"),
                });
            }
            if let Some(&prev) = t.last() {
                if ti <= prev {
                    return Err(Error::Format {
                        line,
                        message: format!("sample radii must increase strictly ({ti} after {prev})"),
                    });
                }
            }
            t.push(ti);
            theta.push(vi / (omega * ti.powi(n.get() as i32)));
        }
        Ok(Self {
            n,
            omega,
            kind: ProfileKind::Tabulated { t, theta },
        })
    }

    /// Tabulated profile sampled from a ratio function.
    pub fn from_ratio_samples<Fn: FnMut(f64) -> f64>(n: Dimension, radii: &[f64], mut theta: Fn) -> Result<Self> {
        let omega = unit_ball_volume(n);
        let samples: Vec<(f64, f64)> = radii
            .iter()
            .map(|&t| (t, theta(t) * omega * t.powi(n.get() as i32)))
            .collect();
        Self::tabulated(n, &samples)
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// A radius scale characteristic of the profile.
    pub fn length_scale(&self) -> f64 {
        match &self.kind {
            ProfileKind::Euclidean => 1.0,
            ProfileKind::RatioFamily { t0, .. } => *t0,
            ProfileKind::Tabulated { t, .. } => t[t.len() / 2],
        }
    }

    /// `θ(t) = v(t) / (ω_n tⁿ)` for `t ≥ 0`.
    pub fn theta(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Euclidean => 1.0,
            ProfileKind::RatioFamily { b_inf, t0, p } => {
                b_inf + (1.0 - b_inf) / (1.0 + (t / t0).powf(*p))
            }
            ProfileKind::Tabulated { t: ts, theta } => {
                let j = ts.partition_point(|&x| x <= t);
                if j == ts.len() {
                    return theta[j - 1];
                }
                let (t_lo, th_lo) = if j == 0 { (0.0, 1.0) } else { (ts[j - 1], theta[j - 1]) };
                let w = (t - t_lo) / (ts[j] - t_lo);
                th_lo + w * (theta[j] - th_lo)
            }
        }
    }

    /// `v(t) = θ(t) ω_n tⁿ`.
    pub fn volume(&self, t: f64) -> f64 {
        self.theta(t) * self.omega * t.powi(self.n.get() as i32)
    }

    /// Checks the comparison-geometry invariants on a dense grid plus every
    /// sample radius.
    pub fn validate(&self) -> ValidationReport {
        const TOL: f64 = 1e-12;
        let scale = self.length_scale();
        let mut grid: Vec<f64> = (0..=4000)
            .map(|i| scale * 10f64.powf(-6.0 + 12.0 * i as f64 / 4000.0))
            .collect();
        if let ProfileKind::Tabulated { t, .. } = &self.kind {
            grid.extend_from_slice(t);
            grid.extend(t.iter().map(|&x| x * (1.0 + 1e-9)));
            grid.sort_by(f64::total_cmp);
            grid.dedup();
        }

        let mut found: Vec<Violation> = Vec::new();
        let mut note = |kind: Invariant, t: f64, detail: String| {
            if !found.iter().any(|v| v.invariant == kind) {
                found.push(Violation { invariant: kind, t, detail });
            }
        };

        // Linear interpolation in θ keeps the ratio conditions between
        // samples, so sample-level problems are reported at the sample.
        if let ProfileKind::Tabulated { t, theta } = &self.kind {
            let mut prev: Option<(f64, f64, f64)> = None;
            for (&ti, &th) in t.iter().zip(theta) {
                let v = th * self.omega * ti.powi(self.n.get() as i32);
                if th > 1.0 + TOL {
                    note(
                        Invariant::EuclideanBound,
                        ti,
                        format!("sample volume {v} exceeds the Euclidean ball volume {}", v / th),
                    );
                }
                if let Some((tp, thp, vp)) = prev {
                    if th > thp + TOL {
                        note(
                            Invariant::RatioNonIncreasing,
                            ti,
                            format!("ratio rises from {thp} at t = {tp} to {th}"),
                        );
                    }
                    if v < vp * (1.0 - TOL) {
                        note(
                            Invariant::VolumeMonotone,
                            ti,
                            format!("volume drops from {vp} at t = {tp} to {v}"),
                        );
                    }
                }
                prev = Some((ti, th, v));
            }
        }

        let near0 = grid[0] * 1e-3;
        let th0 = self.theta(near0);
        if (th0 - 1.0).abs() > 1e-6 {
            note(
                Invariant::RatioAtOrigin,
                near0,
                format!("ratio near the origin is {th0}, expected 1"),
            );
        }
        let mut prev: Option<(f64, f64, f64)> = None;
        for &t in &grid {
            let th = self.theta(t);
            let v = self.volume(t);
            if th > 1.0 + TOL {
                note(
                    Invariant::EuclideanBound,
                    t,
                    format!("volume {v} exceeds the Euclidean ball volume {}", v / th),
                );
            }
            if let Some((tp, thp, vp)) = prev {
                if th > thp + TOL {
                    note(
                        Invariant::RatioNonIncreasing,
                        t,
                        format!("ratio rises from {thp} at t = {tp} to {th}"),
                    );
                }
                if v < vp * (1.0 - TOL) {
                    note(
                        Invariant::VolumeMonotone,
                        t,
                        format!("volume drops from {vp} at t = {tp} to {v}"),
                    );
                }
            }
            prev = Some((t, th, v));
        }
        found.sort_by(|a, b| a.t.total_cmp(&b.t));
        ValidationReport {
            points_checked: grid.len(),
            violations: found,
        }
    }

    /// `b₀ = lim θ(t)` as `t → ∞`.
    ///
    /// Tabulated profiles fit `θ ≈ b + c t^{-q}` through the last three
    /// samples; a tail that does not admit such a fit is an error.
    pub fn asymptotic_ratio(&self) -> Result<f64> {
        match &self.kind {
            ProfileKind::Euclidean => Ok(1.0),
            ProfileKind::RatioFamily { b_inf, .. } => Ok(*b_inf),
            ProfileKind::Tabulated { t, theta } => tail_limit(t, theta),
        }
    }
}

fn tail_limit(t: &[f64], theta: &[f64]) -> Result<f64> {
    let m = t.len();
    if m < 3 {
        return Err(Error::TailUndetermined(format!(
            "need at least 3 samples for tail extrapolation, got {m}"
        )));
    }
    let (t1, t2, t3) = (t[m - 3], t[m - 2], t[m - 1]);
    let (a1, a2, a3) = (theta[m - 3], theta[m - 2], theta[m - 1]);
    let (d1, d2) = (a1 - a2, a2 - a3);
    if d1 < 0.0 || d2 < 0.0 {
        return Err(Error::TailUndetermined("ratio increases in the tail".into()));
    }
    if d2 == 0.0 {
        if a3 > 0.0 {
            return Ok(a3.min(1.0));
        }
        return Err(Error::TailUndetermined("tail ratio is zero".into()));
    }
    if d1 == 0.0 {
        return Err(Error::TailUndetermined("tail decay restarts after a flat stretch".into()));
    }
    let target = d1 / d2;
    let r = |q: f64| {
        let p = |x: f64| x.powf(-q);
        (p(t1) - p(t2)) / (p(t2) - p(t3)) - target
    };
    let (q_lo, q_hi) = (1e-6, 60.0);
    let q = solve_bracketed(r, q_lo, q_hi, 1e-14).map_err(|_| {
        Error::TailUndetermined(format!(
            "tail increments {d1:e}, {d2:e} do not fit a power-law decay"
        ))
    })?;
    let c = d2 / (t2.powf(-q) - t3.powf(-q));
    let b = a3 - c * t3.powf(-q);
    // Extrapolation more than 5% below the last sample is not trusted.
    if !(b > 0.0) || b > a3 || a3 - b > 0.05 * a3 {
        return Err(Error::TailUndetermined(format!(
            "extrapolated limit {b} is not supported by the last sample {a3}"
        )));
    }
    Ok(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    /// `θ(0⁺) = 1`.
    RatioAtOrigin,
    /// `θ` non-increasing.
    RatioNonIncreasing,
    /// `v(t) ≤ ω_n tⁿ`.
    EuclideanBound,
    /// `v` non-decreasing.
    VolumeMonotone,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::RatioAtOrigin => "ratio_at_origin",
            Invariant::RatioNonIncreasing => "ratio_non_increasing",
            Invariant::EuclideanBound => "euclidean_bound",
            Invariant::VolumeMonotone => "volume_monotone",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub invariant: Invariant,
    pub t: f64,
    pub detail: String,
}

/// At most one violation per invariant (its first occurrence), ordered by
/// radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub points_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}
