//! Distance-Laplacian envelope `|λ + (3-n)ρ² + (λ+ρ²) a| ≤ 2ρ² + nλ` with
//! `a = ρΔρ`, and the density form of the growth condition.

use crate::error::{Error, Result};
use crate::sharp::Dimension;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeInput {
    pub n: Dimension,
    pub lambda: f64,
    pub rho: f64,
    /// Value of `ρΔρ` under test.
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    pub expression: f64,
    pub bound: f64,
    /// `bound - |expression|`.
    pub margin: f64,
    pub holds: bool,
    /// `n-5 ≤ a ≤ n-1`, the range on which the envelope is guaranteed.
    pub within_growth_range: bool,
}

pub fn laplacian_envelope_check(e: EnvelopeInput) -> Result<EnvelopeReport> {
    if !(e.lambda > 0.0) || !e.lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be positive, got {}", e.lambda)));
    }
    if !(e.rho >= 0.0) || !e.rho.is_finite() || !e.a.is_finite() {
        return Err(Error::domain("rho must be nonnegative and a finite"));
    }
    let nf = e.n.as_f64();
    let r2 = e.rho * e.rho;
    let expression = e.lambda + (3.0 - nf) * r2 + (e.lambda + r2) * e.a;
    let bound = 2.0 * r2 + nf * e.lambda;
    // The endpoint a = n-1 attains equality; allow for rounding in the terms.
    let slack = 8.0 * f64::EPSILON * (e.lambda.abs() * (1.0 + e.a.abs()) + r2 * (nf + e.a.abs()) + bound);
    Ok(EnvelopeReport {
        expression,
        bound,
        margin: bound - expression.abs(),
        holds: expression.abs() <= bound + slack,
        within_growth_range: e.a >= nf - 5.0 && e.a <= nf - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCheck {
    /// `J'/J ≥ -4/ρ`.
    pub holds: bool,
    /// Implied `ρΔρ = n - 1 + ρ J'/J`.
    pub rho_laplacian_rho: f64,
}

/// Growth condition in terms of the log-derivative of the volume density
/// along a geodesic.
pub fn growth_condition_check(n: Dimension, rho: f64, density_log_deriv: f64) -> Result<GrowthCheck> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!("rho must be positive, got {rho}")));
    }
    if !density_log_deriv.is_finite() {
        return Err(Error::domain("density log-derivative must be finite"));
    }
    let a = n.as_f64() - 1.0 + rho * density_log_deriv;
    // Compare in the ρΔρ form, where the boundary case is exactly n - 5.
    let holds = rho * density_log_deriv >= -4.0 * (1.0 + 4.0 * f64::EPSILON);
    Ok(GrowthCheck {
        holds,
        rho_laplacian_rho: a,
    })
}
