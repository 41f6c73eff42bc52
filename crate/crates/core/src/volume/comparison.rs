//! The `F`-side of the comparison argument for a radial volume profile.
//!
//! With `v(t) = θ(t) ω_n tⁿ`,
//!
//! * `F(λ)   =  2(n-2)         ∫ v(t) t (λ+t²)^{1-n}   dt`
//! * `F'(λ)  = -2(n-2)(n-1)    ∫ v(t) t (λ+t²)^{-n}    dt`
//! * `F''(λ) =  2(n-2)(n-1)n   ∫ v(t) t (λ+t²)^{-n-1}  dt`
//!
//! Integrands are written through `q = t / (λ + t²)` so that no intermediate
//! power overflows for large or small `λ`.

use crate::error::{Error, Result};
use crate::numerics::{log_gamma, Quadrature, QuadratureResult};
use crate::sharp::{
    comparison_equation_sides, euclidean_g_derivatives, sharp_constant_second_order, Dimension,
    EquationSides,
};

use super::profile::VolumeProfile;

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// 41 log-spaced points on `[1e-3, 1e3]`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 41)
}

/// `F`, `F'` or `F''` (`order` 0, 1, 2) with the default quadrature.
pub fn profile_f(p: &VolumeProfile, lambda: f64, order: u8) -> Result<f64> {
    Ok(profile_f_with(p, lambda, order, &Quadrature::default())?.value)
}

pub fn profile_f_with(
    p: &VolumeProfile,
    lambda: f64,
    order: u8,
    quad: &Quadrature,
) -> Result<QuadratureResult> {
    positive("lambda", lambda)?;
    let n = p.n().get() as i32;
    let nf = p.n().as_f64();
    let w = p.omega();
    // t^{n+1} (λ+t²)^{-m} = q^{m} t^{n+1-m}
    let (prefactor, power, extra) = match order {
        0 => (2.0 * (nf - 2.0) * w, n - 1, 2),
        1 => (-2.0 * (nf - 2.0) * (nf - 1.0) * w, n, 1),
        2 => (2.0 * (nf - 2.0) * (nf - 1.0) * nf * w, n + 1, 0),
        _ => return Err(Error::domain(format!("derivative order must be 0, 1 or 2, got {order}"))),
    };
    let r = quad.semi_infinite(
        |t| {
            let q = t / (lambda + t * t);
            p.theta(t) * q.powi(power) * t.powi(extra)
        },
        lambda.sqrt(),
    )?;
    Ok(QuadratureResult {
        value: prefactor * r.value,
        error_estimate: prefactor.abs() * r.error_estimate,
        evaluations: r.evaluations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FValues {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

pub fn profile_f_all(p: &VolumeProfile, lambda: f64, quad: &Quadrature) -> Result<FValues> {
    Ok(FValues {
        f: profile_f_with(p, lambda, 0, quad)?.value,
        df: profile_f_with(p, lambda, 1, quad)?.value,
        d2f: profile_f_with(p, lambda, 2, quad)?.value,
    })
}

/// Both sides of the comparison ODI for `F₀ = F − λF'`, `F₀' = −λF''`.
pub fn odi_sides(p: &VolumeProfile, c: f64, lambda: f64) -> Result<EquationSides> {
    positive("C", c)?;
    let fv = profile_f_all(p, lambda, &Quadrature::default())?;
    Ok(odi_sides_from(p.n(), c, lambda, &fv))
}

fn odi_sides_from(n: Dimension, c: f64, lambda: f64, fv: &FValues) -> EquationSides {
    let f0 = fv.f - lambda * fv.df;
    let df0 = -lambda * fv.d2f;
    comparison_equation_sides(n.as_f64(), c, lambda, f0, df0)
}

/// `LHS − RHS` of the comparison ODI; `≤ 0` is consistent with the
/// inequality holding with constant `C` at this `λ`.
pub fn odi_residual(p: &VolumeProfile, c: f64, lambda: f64) -> Result<f64> {
    Ok(odi_sides(p, c, lambda)?.residual())
}

/// `φ_λ(t) = t^{(n-4)/n} − C(n-2)²(n-4)²λ² t`.
pub fn phi(n: Dimension, c: f64, lambda: f64, t: f64) -> f64 {
    let nf = n.as_f64();
    t.powf((nf - 4.0) / nf) - c * (nf - 2.0).powi(2) * (nf - 4.0).powi(2) * lambda * lambda * t
}

/// `φ_λ'(t)`.
pub fn phi_derivative(n: Dimension, c: f64, lambda: f64, t: f64) -> f64 {
    let nf = n.as_f64();
    (nf - 4.0) / nf * t.powf(-4.0 / nf) - c * (nf - 2.0).powi(2) * (nf - 4.0).powi(2) * lambda * lambda
}

/// `t_λ = λ^{-n/2} (C n (n-4)(n-2)²)^{-n/4}`, the stationary point of `φ_λ`.
pub fn t_lambda(n: Dimension, c: f64, lambda: f64) -> f64 {
    let nf = n.as_f64();
    let ln_t = -nf / 2.0 * lambda.ln() - nf / 4.0 * (c * nf * (nf - 4.0) * (nf - 2.0).powi(2)).ln();
    ln_t.exp()
}

/// Relative slack allowed when comparing a profile quantity against `t_λ`;
/// the Euclidean profile touches `t_λ` exactly at the window edge.
pub const WINDOW_RELATIVE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowReport {
    pub t_lambda: f64,
    pub t_within_window: bool,
    pub phi_derivative: f64,
    pub phi_nondecreasing: bool,
    /// `F''(λ)/((n-2)(n-1))` when a profile was supplied.
    pub profile_argument: Option<f64>,
    pub profile_within_window: Option<bool>,
}

pub fn phi_window_check(
    n: Dimension,
    c: f64,
    lambda: f64,
    t: f64,
    profile: Option<&VolumeProfile>,
) -> Result<WindowReport> {
    n.require_second_order()?;
    positive("C", c)?;
    positive("lambda", lambda)?;
    positive("t", t)?;
    let nf = n.as_f64();
    let tl = t_lambda(n, c, lambda);
    let dphi = phi_derivative(n, c, lambda, t);
    // Scale of the two cancelling terms, for a rounding-aware sign test.
    let scale = c * (nf - 2.0).powi(2) * (nf - 4.0).powi(2) * lambda * lambda;
    let (arg, inside) = match profile {
        Some(p) => {
            let d2f = profile_f(p, lambda, 2)?;
            let a = d2f / ((nf - 2.0) * (nf - 1.0));
            (Some(a), Some(a <= tl * (1.0 + WINDOW_RELATIVE_SLACK)))
        }
        None => (None, None),
    };
    Ok(WindowReport {
        t_lambda: tl,
        t_within_window: t <= tl,
        phi_derivative: dphi,
        phi_nondecreasing: dphi >= -1e-12 * scale,
        profile_argument: arg,
        profile_within_window: inside,
    })
}

/// Kernel `f(λ,t) = ((n-1)λ + t²) t / (λ+t²)ⁿ`.
pub fn kernel_f(n: Dimension, lambda: f64, t: f64) -> f64 {
    let nf = n.as_f64();
    let w = lambda + t * t;
    ((nf - 1.0) * lambda + t * t) * t / w.powi(n.get() as i32)
}

/// `tⁿ f(λ,t)` in overflow-safe form.
fn weighted_kernel(nf: f64, n: i32, lambda: f64, t: f64) -> f64 {
    let q = t / (lambda + t * t);
    q.powi(n) * t * ((nf - 1.0) * lambda + t * t)
}

/// Closed form of `I₁(λ) = ∫₀^∞ tⁿ f(λ,t) dt`:
/// `2^{1-n} √π (n²-4n+6) Γ(n/2+1) / ((n-2)(n-4) Γ((n+1)/2)) · λ^{(4-n)/2}`.
pub fn kernel_i1(lambda: f64, n: Dimension) -> Result<f64> {
    n.require_second_order()?;
    positive("lambda", lambda)?;
    let nf = n.as_f64();
    let ln = (1.0 - nf) * std::f64::consts::LN_2 + 0.5 * std::f64::consts::PI.ln()
        + (nf * nf - 4.0 * nf + 6.0).ln()
        + log_gamma(nf / 2.0 + 1.0)?
        - ((nf - 2.0) * (nf - 4.0)).ln()
        - log_gamma((nf + 1.0) / 2.0)?
        + (4.0 - nf) / 2.0 * lambda.ln();
    Ok(ln.exp())
}

/// Upper bound on `I₂(λ) = ∫₀^N tⁿ f(λ,t) dt` from the majorant
/// `t^{n+1}((n-1)λ + t²) λ^{-n}`:
/// `(n-1) N^{n+2} λ^{1-n} / (n+2) + N^{n+4} λ^{-n} / (n+4)`.
pub fn kernel_i2_bound(lambda: f64, n: Dimension, big_n: f64) -> Result<f64> {
    n.require_second_order()?;
    positive("lambda", lambda)?;
    positive("N", big_n)?;
    let nf = n.as_f64();
    let a = (nf - 1.0) * big_n.powf(nf + 2.0) * lambda.powf(1.0 - nf) / (nf + 2.0);
    let b = big_n.powf(nf + 4.0) * lambda.powf(-nf) / (nf + 4.0);
    Ok(a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Zero,
    Negative,
    /// `|value|` within its error estimate.
    Indeterminate,
}

impl Sign {
    fn classify(r: &QuadratureResult) -> Self {
        if r.value == 0.0 && r.error_estimate == 0.0 {
            Sign::Zero
        } else if r.value > r.error_estimate {
            Sign::Positive
        } else if r.value < -r.error_estimate {
            Sign::Negative
        } else {
            Sign::Indeterminate
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sign::Positive => "positive",
            Sign::Zero => "zero",
            Sign::Negative => "negative",
            Sign::Indeterminate => "indeterminate",
        }
    }
}

/// `∫₀^∞ (v(t) − b ω_n tⁿ) f(λ,t) dt`.
///
/// The whole half-line is integrated under a rational map, so no truncation
/// tail is dropped; the absolute tolerance is tied to `1e-12 · b ω_n I₁(λ)`,
/// the size of the subtracted term.
pub fn kernel_integral(p: &VolumeProfile, b: f64, lambda: f64) -> Result<QuadratureResult> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::domain(format!("b must lie in (0, 1], got {b}")));
    }
    positive("lambda", lambda)?;
    let n = p.n();
    let nf = n.as_f64();
    let m = n.get() as i32;
    let w = p.omega();
    let head = w * kernel_i1(lambda, n)?;
    let quad = Quadrature::with_rel_tol(1e-10).abs_tol(1e-12 * head);
    let mut r = quad.semi_infinite(
        |t| (p.theta(t) - b) * weighted_kernel(nf, m, lambda, t),
        lambda.sqrt().max(p.length_scale()),
    )?;
    r.value *= w;
    r.error_estimate *= w;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelIntegralPoint {
    pub lambda: f64,
    pub value: f64,
    pub error_estimate: f64,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelIntegralScan {
    pub b: f64,
    pub points: Vec<KernelIntegralPoint>,
}

impl KernelIntegralScan {
    /// Smallest grid `λ` with a strictly negative integral.
    pub fn first_negative(&self) -> Option<f64> {
        self.points
            .iter()
            .filter(|pt| pt.sign == Sign::Negative)
            .map(|pt| pt.lambda)
            .min_by(f64::total_cmp)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.points.iter().all(|pt| pt.sign != Sign::Negative)
    }
}

pub fn kernel_integral_scan(p: &VolumeProfile, b: f64, grid: &[f64]) -> Result<KernelIntegralScan> {
    let points = grid
        .iter()
        .map(|&lambda| {
            let r = kernel_integral(p, b, lambda)?;
            Ok(KernelIntegralPoint {
                lambda,
                value: r.value,
                error_estimate: r.error_estimate,
                sign: Sign::classify(&r),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelIntegralScan { b, points })
}

/// Relative tolerance for the pointwise `F`-versus-`G` relations.
pub const RELATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub lambda: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
    pub f0: f64,
    pub g0: f64,
    pub odi_lhs: f64,
    pub odi_rhs: f64,
    pub window_ok: bool,
    pub kernel_integral: f64,
    // Euclidean references for the pointwise relations.
    pub g: f64,
    pub dg: f64,
    pub d2g: f64,
}

impl TraceRow {
    pub fn odi_residual(&self) -> f64 {
        self.odi_lhs - self.odi_rhs
    }

    pub fn f0_ge_g0(&self) -> bool {
        self.f0 >= self.g0 * (1.0 - RELATION_TOLERANCE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTrace {
    pub n: Dimension,
    pub c: f64,
    pub k0: f64,
    /// Active volume-ratio level `(K₀/C)^{n/4}` used for `kernel_integral`.
    pub b: f64,
    pub rows: Vec<TraceRow>,
}

impl ComparisonTrace {
    pub const CSV_HEADER: &'static str =
        "lambda,F,dF,d2F,F0,G0,odi_residual,window_ok,kernel_integral";

    /// Grid points where `F₀ < G₀` beyond tolerance.
    pub fn f0_below_g0(&self) -> Vec<f64> {
        self.rows.iter().filter(|r| !r.f0_ge_g0()).map(|r| r.lambda).collect()
    }

    /// Pointwise relations `F ≤ G`, `G' ≤ F' < 0`, `0 < F'' ≤ G''`, as
    /// human-readable violation messages.
    pub fn relation_violations(&self) -> Vec<String> {
        let tol = RELATION_TOLERANCE;
        let mut out = Vec::new();
        for r in &self.rows {
            let l = r.lambda;
            if !(r.df < 0.0) {
                out.push(format!("lambda={l}: F' = {} is not negative", r.df));
            }
            if !(r.d2f > 0.0) {
                out.push(format!("lambda={l}: F'' = {} is not positive", r.d2f));
            }
            if r.f > r.g * (1.0 + tol) {
                out.push(format!("lambda={l}: F = {} exceeds G = {}", r.f, r.g));
            }
            if r.df < r.dg - tol * r.dg.abs() {
                out.push(format!("lambda={l}: F' = {} is below G' = {}", r.df, r.dg));
            }
            if r.d2f > r.d2g * (1.0 + tol) {
                out.push(format!("lambda={l}: F'' = {} exceeds G'' = {}", r.d2f, r.d2g));
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
                r.lambda,
                r.f,
                r.df,
                r.d2f,
                r.f0,
                r.g0,
                r.odi_residual(),
                r.window_ok,
                r.kernel_integral
            ));
        }
        s
    }
}

pub fn comparison_trace(p: &VolumeProfile, c: f64, grid: &[f64]) -> Result<ComparisonTrace> {
    positive("C", c)?;
    let n = p.n();
    let nf = n.as_f64();
    let k0 = sharp_constant_second_order(n)?;
    let prefactor = (k0 / c).powf(nf / 4.0);
    let b = prefactor.min(1.0);
    let quad = Quadrature::default();
    let rows = grid
        .iter()
        .map(|&lambda| {
            let fv = profile_f_all(p, lambda, &quad)?;
            let gv = euclidean_g_derivatives(lambda, n)?;
            let sides = odi_sides_from(n, c, lambda, &fv);
            let arg = fv.d2f / ((nf - 2.0) * (nf - 1.0));
            let window_ok = arg <= t_lambda(n, c, lambda) * (1.0 + WINDOW_RELATIVE_SLACK);
            Ok(TraceRow {
                lambda,
                f: fv.f,
                df: fv.df,
                d2f: fv.d2f,
                f0: fv.f - lambda * fv.df,
                g0: prefactor * (gv.g - lambda * gv.dg),
                odi_lhs: sides.lhs,
                odi_rhs: sides.rhs,
                window_ok,
                kernel_integral: kernel_integral(p, b, lambda)?.value,
                g: gv.g,
                dg: gv.dg,
                d2g: gv.d2g,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonTrace { n, c, k0, b, rows })
}
