//! Sharp Euclidean Sobolev constants and the Euclidean comparison function
//! `G(λ) = ∫_{ℝⁿ} (λ + |x|²)^{2-n} dx`.
//!
//! Every constant is assembled in log space from [`log_gamma`] and only
//! exponentiated at the end, so large dimensions do not overflow `Γ(n)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{log_gamma, Quadrature};

/// Ambient dimension `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        Ok(Self(n))
    }

    /// Dimension valid for the second-order theory (`n ≥ 5`).
    pub fn second_order(n: u32) -> Result<Self> {
        let d = Self::new(n)?;
        d.require_second_order()?;
        Ok(d)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub(crate) fn require_second_order(self) -> Result<()> {
        if self.0 < 5 {
            return Err(Error::domain(format!(
                "second-order operations need n >= 5, got n = {}",
                self.0
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn require_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

fn ln_gamma_ratio(n: f64) -> Result<f64> {
    Ok(log_gamma(n)? - log_gamma(n / 2.0)?)
}

/// Volume of the Euclidean unit ball, `π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: Dimension) -> f64 {
    let h = n.as_f64() / 2.0;
    (h * PI.ln() - log_gamma(h + 1.0).expect("n/2 + 1 > 0")).exp()
}

/// `K₀ = [π² n (n-4)(n²-4)]⁻¹ (Γ(n)/Γ(n/2))^{4/n}`, the optimal constant of the
/// second-order inequality on ℝⁿ.
pub fn sharp_constant_second_order(n: Dimension) -> Result<f64> {
    n.require_second_order()?;
    let nf = n.as_f64();
    let ln_k0 = 4.0 / nf * ln_gamma_ratio(nf)?
        - (PI * PI * nf * (nf - 4.0) * (nf * nf - 4.0)).ln();
    Ok(ln_k0.exp())
}

/// `c₀ = [π n (n-2)]⁻¹ (Γ(n)/Γ(n/2))^{2/n}`, the first-order constant (`n ≥ 3`).
pub fn sharp_constant_first_order(n: Dimension) -> Result<f64> {
    if n.get() < 3 {
        return Err(Error::domain("first-order constant needs n >= 3"));
    }
    let nf = n.as_f64();
    let ln_c0 = 2.0 / nf * ln_gamma_ratio(nf)? - (PI * nf * (nf - 2.0)).ln();
    Ok(ln_c0.exp())
}

/// The `k`-th order constant
/// `Λ_k = [πᵏ n (n-2k) ∏_{i=1}^{k-1} (n² - 4i²)]⁻¹ (Γ(n)/Γ(n/2))^{2k/n}`.
pub fn sharp_constant_kth(n: Dimension, k: u32) -> Result<f64> {
    if k == 0 || n.get() <= 2 * k {
        return Err(Error::domain(format!(
            "k-th order constant needs n > 2k >= 2, got n = {n}, k = {k}"
        )));
    }
    let nf = n.as_f64();
    let kf = k as f64;
    let ln_product: f64 = (1..k)
        .map(|i| {
            let i = i as f64;
            (nf * nf - 4.0 * i * i).ln()
        })
        .sum();
    let ln_denominator = kf * PI.ln() + nf.ln() + (nf - 2.0 * kf).ln() + ln_product;
    Ok((2.0 * kf / nf * ln_gamma_ratio(nf)? - ln_denominator).exp())
}

/// Bundle of the Euclidean constants for one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanConstants {
    pub n: Dimension,
    pub k0: f64,
    pub c0: f64,
    pub omega_n: f64,
    /// Critical exponent `2n/(n-4)`.
    pub two_sharp: f64,
    /// `(n+2)/(n-2) · K₀`, the upper end of the volume non-collapsing window.
    pub window_upper: f64,
}

impl EuclideanConstants {
    pub fn new(n: Dimension) -> Result<Self> {
        n.require_second_order()?;
        let nf = n.as_f64();
        let k0 = sharp_constant_second_order(n)?;
        Ok(Self {
            n,
            k0,
            c0: sharp_constant_first_order(n)?,
            omega_n: unit_ball_volume(n),
            two_sharp: 2.0 * nf / (nf - 4.0),
            window_upper: (nf + 2.0) / (nf - 2.0) * k0,
        })
    }
}

/// `ln G(1)` from the closed form `2^{4-n} π^{(n+1)/2} / ((n-4) Γ((n-1)/2))`.
fn ln_g_at_one(nf: f64) -> Result<f64> {
    Ok((4.0 - nf) * std::f64::consts::LN_2 + (nf + 1.0) / 2.0 * PI.ln()
        - (nf - 4.0).ln()
        - log_gamma((nf - 1.0) / 2.0)?)
}

/// `G(λ) = G(1) λ^{(4-n)/2}`.
pub fn euclidean_g(lambda: f64, n: Dimension) -> Result<f64> {
    Ok(euclidean_g_derivatives(lambda, n)?.g)
}

/// `G` and its first two derivatives at one `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValues {
    pub g: f64,
    pub dg: f64,
    pub d2g: f64,
}

pub fn euclidean_g_derivatives(lambda: f64, n: Dimension) -> Result<GValues> {
    n.require_second_order()?;
    require_positive("lambda", lambda)?;
    let nf = n.as_f64();
    let p = (4.0 - nf) / 2.0;
    let ln_g = ln_g_at_one(nf)? + p * lambda.ln();
    let g = ln_g.exp();
    Ok(GValues {
        g,
        dg: p * g / lambda,
        d2g: p * (p - 1.0) * g / (lambda * lambda),
    })
}

/// Left and right sides of a scalar (in)equality evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationSides {
    pub lhs: f64,
    pub rhs: f64,
}

impl EquationSides {
    pub fn residual(&self) -> f64 {
        self.lhs - self.rhs
    }

    /// `(lhs - rhs) / |rhs|`.
    pub fn relative(&self) -> f64 {
        self.residual() / self.rhs.abs()
    }
}

/// Both sides of the Euclidean comparison ODE
/// `(-G₀'/(λ(n-2)(n-1)))^{(n-4)/n} = C (n-4)² {4G₀ - (n-2)/(n-1) λ G₀'}`
/// with `G₀ = (K₀/C)^{n/4} (G - λG')`. The `C` dependence cancels exactly.
pub fn euclidean_ode_sides(lambda: f64, n: Dimension, c: f64) -> Result<EquationSides> {
    require_positive("C", c)?;
    let gv = euclidean_g_derivatives(lambda, n)?;
    let nf = n.as_f64();
    let k0 = sharp_constant_second_order(n)?;
    let prefactor = (k0 / c).powf(nf / 4.0);
    let g0 = prefactor * (gv.g - lambda * gv.dg);
    let dg0 = -prefactor * lambda * gv.d2g;
    Ok(comparison_equation_sides(nf, c, lambda, g0, dg0))
}

/// `LHS - RHS` of the Euclidean comparison ODE.
pub fn euclidean_ode_residual(lambda: f64, n: Dimension, c: f64) -> Result<f64> {
    Ok(euclidean_ode_sides(lambda, n, c)?.residual())
}

/// Shared form of the comparison ODE/ODI for a function `H₀` and its
/// derivative: `(−H₀'/(λ(n−2)(n−1)))^{(n−4)/n}` against
/// `C(n−4)²{4H₀ − (n−2)/(n−1) λ H₀'}`.
pub(crate) fn comparison_equation_sides(
    nf: f64,
    c: f64,
    lambda: f64,
    h0: f64,
    dh0: f64,
) -> EquationSides {
    let lhs = (-dh0 / (lambda * (nf - 2.0) * (nf - 1.0))).powf((nf - 4.0) / nf);
    let rhs = c * (nf - 4.0).powi(2) * (4.0 * h0 - (nf - 2.0) / (nf - 1.0) * lambda * dh0);
    EquationSides { lhs, rhs }
}

/// `(∫|u_λ|^{2♯})^{2/2♯} / ∫(Δu_λ)²` for `u_λ = (λ + |x|²)^{(4-n)/2}` on ℝⁿ,
/// by radial quadrature. Equals `K₀` for every `λ`.
pub fn euclidean_ssi_ratio(n: Dimension, lambda: f64) -> Result<f64> {
    n.require_second_order()?;
    require_positive("lambda", lambda)?;
    let nf = n.as_f64();
    let m = n.get() as i32;
    let sphere = nf * unit_ball_volume(n);
    let quad = Quadrature::with_rel_tol(1e-12);
    let scale = lambda.sqrt();

    // r^{n-1} (λ+r²)^{-n} written as q^{n-1}/(λ+r²), q = r/(λ+r²), to stay finite.
    let norm = quad.semi_infinite(
        |r| {
            let w = lambda + r * r;
            (r / w).powi(m - 1) / w
        },
        scale,
    )?;
    let energy = quad.semi_infinite(
        |r| {
            let w = lambda + r * r;
            let e = 2.0 * r * r + nf * lambda;
            (r / w).powi(m - 1) / w * e * e
        },
        scale,
    )?;
    let lhs = (sphere * norm.value).powf((nf - 4.0) / nf);
    let rhs = (nf - 4.0).powi(2) * sphere * energy.value;
    Ok(lhs / rhs)
}

/// Power-law exponent `(4-n)/2` of `G`.
pub fn g_exponent(n: Dimension) -> f64 {
    (4.0 - n.as_f64()) / 2.0
}
