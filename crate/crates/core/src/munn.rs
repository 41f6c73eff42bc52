//! Munn-Perelman constants.
//!
//! For `1 ≤ k ≤ n` the recursion
//! `C_{k,n}(0) = 1`, `C_{k,n}(i) = 3 + 10C(i-1) + (16k)^{n-1}(1 + 10C(i-1))ⁿ`
//! feeds the equation `10^{k+2} C_{k,n}(k) s (1 + s/(2k))ᵏ = 1` whose root is
//! `δ_{k,n}`, the bijection `h_{k,n}(s) = [1 - 10^{k+2}C_{k,n}(k) s(1+s/(2k))ᵏ]⁻¹`
//! on `(0, δ_{k,n})`, and finally `α_MP(k,n)`.
//!
//! `C_{k,n}(k)` has roughly `nᵏ` digits, so everything downstream runs on
//! [`LogScaledReal`]. An exact big-integer backend runs alongside while the
//! value fits a digit budget. `1 - α` underflows every float format for
//! `k ≥ 2`, so it is the stored primitive.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::numerics::{solve_bracketed_newton, LogScaledReal};
use crate::sharp::{sharp_constant_second_order, Dimension};

pub const DEFAULT_DIGIT_BUDGET: usize = 10_000;

/// One value `C_{k,n}(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MunnRecursionValue {
    pub k: u32,
    pub n: Dimension,
    pub i: u32,
    pub value: LogScaledReal,
    /// Exact integer, present while it fits the digit budget.
    pub exact: Option<BigUint>,
}

fn check_indices(k: u32, n: Dimension) -> Result<()> {
    if k == 0 || k > n.get() {
        return Err(Error::domain(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(())
}

fn lsr(x: f64) -> LogScaledReal {
    LogScaledReal::from_f64(x).expect("positive constant")
}

/// Natural log of a positive big integer, accurate to a few units in the
/// last place of the double-double log.
pub fn ln_biguint(x: &BigUint) -> LogScaledReal {
    let bits = x.bits();
    if bits == 0 {
        return LogScaledReal::ZERO;
    }
    let shift = bits.saturating_sub(106);
    let top: BigUint = x >> shift;
    let top = u128::try_from(top).expect("at most 106 bits");
    let high = (top >> 53) as f64;
    let low = (top & ((1u128 << 53) - 1)) as f64;
    let head = if high > 0.0 {
        let h = high * 2f64.powi(53);
        lsr(h).add_ln(libm::log1p(low / h))
    } else {
        lsr(low)
    };
    head * LogScaledReal::from_pow2(shift as i64)
}

/// All values `C_{k,n}(0..=k)`, exact ones included while they have at most
/// `digit_budget` decimal digits.
pub fn munn_recursion(k: u32, n: Dimension, digit_budget: usize) -> Result<Vec<MunnRecursionValue>> {
    check_indices(k, n)?;
    let m = n.get();
    let three = lsr(3.0);
    let ten = lsr(10.0);
    let coeff = lsr(16.0 * k as f64).powi(m as i32 - 1);
    let coeff_exact = BigUint::from(16 * k).pow(m - 1);

    let mut out = Vec::with_capacity(k as usize + 1);
    let mut value = LogScaledReal::ONE;
    let mut exact = Some(BigUint::from(1u32));
    out.push(MunnRecursionValue {
        k,
        n,
        i: 0,
        value,
        exact: exact.clone(),
    });
    for i in 1..=k {
        let ten_c = ten * value;
        value = three + ten_c + coeff * (LogScaledReal::ONE + ten_c).powi(m as i32);
        let digits = value.ln() / std::f64::consts::LN_10 + 1.0;
        exact = match exact {
            Some(prev) if digits <= digit_budget as f64 => {
                let ten_prev = prev * 10u32;
                let next = (&ten_prev + 1u32).pow(m) * &coeff_exact + ten_prev + 3u32;
                Some(next)
            }
            _ => None,
        };
        out.push(MunnRecursionValue {
            k,
            n,
            i,
            value,
            exact: exact.clone(),
        });
    }
    Ok(out)
}

/// `C_{k,n}(i)` with the default digit budget.
pub fn munn_c(k: u32, n: Dimension, i: u32) -> Result<MunnRecursionValue> {
    if i > k {
        return Err(Error::domain(format!("need 0 <= i <= k, got i = {i}, k = {k}")));
    }
    let mut all = munn_recursion(k, n, DEFAULT_DIGIT_BUDGET)?;
    Ok(all.swap_remove(i as usize))
}

/// Per-dimension cache of `10^{j+2} C_{j,n}(j)` for `j = 1..=n`.
#[derive(Debug, Clone)]
pub struct MunnContext {
    n: Dimension,
    leading: Vec<LogScaledReal>,
}

impl MunnContext {
    pub fn new(n: Dimension) -> Result<Self> {
        let mut leading = Vec::with_capacity(n.get() as usize);
        for j in 1..=n.get() {
            let c = munn_recursion(j, n, 0)?.pop().expect("non-empty").value;
            leading.push(lsr(10.0).powi(j as i32 + 2) * c);
        }
        Ok(Self { n, leading })
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    /// `10^{k+2} C_{k,n}(k)`.
    pub fn leading(&self, k: u32) -> Result<LogScaledReal> {
        check_indices(k, self.n)?;
        Ok(self.leading[k as usize - 1])
    }

    /// Solves `10^{k+2}C s (1+s/(2k))ᵏ = target` for `s`, with `target ≤ 1`.
    fn solve(&self, k: u32, target: LogScaledReal) -> Result<LogScaledReal> {
        let base = target / self.leading(k)?;
        // s = base · e^y with y in [-2k ln1p(base/(2k)), 0].
        let kf = k as f64;
        let base_f = base.to_f64();
        let g = |y: f64| {
            let s = base.add_ln(y).to_f64();
            let u = s / (2.0 * kf);
            (y + kf * libm::log1p(u), 1.0 + 0.5 * s / (1.0 + u))
        };
        // Twice the analytic lower end keeps g(lo) < 0 clear of rounding.
        let lo = -2.0 * kf * libm::log1p(base_f / (2.0 * kf));
        if lo == 0.0 {
            return Ok(base);
        }
        let y = solve_bracketed_newton(g, lo, 0.0, 0.0)?;
        Ok(base.add_ln(y))
    }

    /// `δ_{k,n}`: the unique positive root of `10^{k+2}C s(1+s/(2k))ᵏ = 1`.
    pub fn delta(&self, k: u32) -> Result<LogScaledReal> {
        self.solve(k, LogScaledReal::ONE)
    }

    /// `ln s + k ln(1 + s/(2k)) + ln(10^{k+2} C_{k,n}(k))`; zero at `s = δ`.
    pub fn delta_log_residual(&self, k: u32, s: LogScaledReal) -> Result<f64> {
        let lead = self.leading(k)?;
        let (sh, sl) = s.ln_parts();
        let (lh, ll) = lead.ln_parts();
        let kf = k as f64;
        Ok((sh + lh) + (sl + ll) + kf * libm::log1p(s.to_f64() / (2.0 * kf)))
    }

    /// `h_{k,n}(s)` for `0 < s < δ_{k,n}`.
    pub fn h(&self, k: u32, s: LogScaledReal) -> Result<f64> {
        if s.is_zero() {
            return Err(Error::domain("h_{k,n} needs s > 0"));
        }
        let ln_p = self.delta_log_residual(k, s)?;
        if !(ln_p < 0.0) {
            return Err(Error::domain(format!(
                "h_{{{k},n}} needs s < delta; got s = {s}"
            )));
        }
        Ok(-1.0 / libm::expm1(ln_p))
    }

    /// `h_{k,n}⁻¹(1 + excess)` for `excess > 0`.
    pub fn h_inv_excess(&self, k: u32, excess: LogScaledReal) -> Result<LogScaledReal> {
        if excess.is_zero() || !excess.ln().is_finite() {
            return Err(Error::domain("h inverse needs an argument strictly above 1"));
        }
        // 1 - 1/y = ε/(1+ε)
        self.solve(k, excess / (LogScaledReal::ONE + excess))
    }

    pub fn h_inv(&self, k: u32, y: f64) -> Result<LogScaledReal> {
        if !(y > 1.0) || !y.is_finite() {
            return Err(Error::domain(format!("h inverse needs y > 1, got {y}")));
        }
        self.h_inv_excess(k, LogScaledReal::from_f64(y - 1.0)?)
    }

    pub fn alpha(&self, k: u32) -> Result<MunnConstant> {
        check_indices(k, self.n)?;
        self.n.require_second_order()?;
        let nf = self.n.as_f64();
        let delta = self.delta(k)?;
        let mut chain = Vec::new();

        let one_minus_alpha = if k == 1 {
            let arg = LogScaledReal::ONE;
            let s1 = self.h_inv_excess(1, arg)?;
            chain.push(ChainStep {
                j: 1,
                argument_excess: arg,
                h_inv: s1,
            });
            LogScaledReal::ONE / (LogScaledReal::ONE + lsr(2.0) / s1)
        } else {
            let mut excess = delta / lsr(2.0 * k as f64);
            for j in (2..k).rev() {
                let s = self
                    .h_inv_excess(j, excess)
                    .map_err(|_| Error::ChainInfeasible { j })?;
                chain.push(ChainStep {
                    j,
                    argument_excess: excess,
                    h_inv: s,
                });
                excess = s / lsr(2.0 * j as f64);
            }
            let s1 = self
                .h_inv_excess(1, excess)
                .map_err(|_| Error::ChainInfeasible { j: 1 })?;
            chain.push(ChainStep {
                j: 1,
                argument_excess: excess,
                h_inv: s1,
            });
            let numerator = LogScaledReal::ONE + excess;
            let ratio = (numerator / s1).powf(nf);
            LogScaledReal::ONE / (LogScaledReal::ONE + ratio)
        };

        Ok(MunnConstant {
            k,
            n: self.n,
            delta,
            one_minus_alpha,
            chain,
        })
    }
}

/// One evaluation `h_{j,n}⁻¹(1 + argument_excess)` in the nested numerator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStep {
    pub j: u32,
    pub argument_excess: LogScaledReal,
    pub h_inv: LogScaledReal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MunnConstant {
    pub k: u32,
    pub n: Dimension,
    pub delta: LogScaledReal,
    /// `1 - α_MP(k,n)`.
    pub one_minus_alpha: LogScaledReal,
    /// h-inverse evaluations, outermost (`j = k-1`) first, ending at `j = 1`.
    pub chain: Vec<ChainStep>,
}

impl MunnConstant {
    pub fn ln_one_minus_alpha(&self) -> f64 {
        self.one_minus_alpha.ln()
    }

    /// `α` rounded to a double; equals `1.0` once `1 - α < 2^-53`.
    pub fn alpha(&self) -> f64 {
        -libm::expm1(self.ln_one_minus_alpha())
    }

    /// `ln α = ln(1 - (1 - α))`.
    pub fn ln_alpha(&self) -> f64 {
        libm::log1p(-self.one_minus_alpha.to_f64())
    }

    /// `ln(threshold / K₀) = -(4/n) ln α`, as a double (underflows to 0 for
    /// most `k ≥ 2`).
    pub fn ln_threshold_over_k0(&self) -> f64 {
        -4.0 / self.n.as_f64() * self.ln_alpha()
    }

    /// `ln ln(threshold / K₀)`, finite even when the threshold excess
    /// underflows.
    pub fn ln_ln_threshold_over_k0(&self) -> f64 {
        let ell = self.ln_one_minus_alpha();
        let x = self.one_minus_alpha.to_f64();
        // ln(-ln(1-x)) = ln x + ln(-ln(1-x)/x), second term ≈ x/2 for small x.
        let correction = if x < 1e-8 {
            0.5 * x
        } else {
            (-libm::log1p(-x) / x).ln()
        };
        (4.0 / self.n.as_f64()).ln() + ell + correction
    }
}

/// `α_MP(k,n)`, `k = 1` by the closed expression and `k ≥ 2` by the
/// descending chain `u ← 1 + δ/(2k)`, `u ← 1 + h_j⁻¹(u)/(2j)` for
/// `j = k-1, …, 2`, then `α = 1 - [1 + (u/h_1⁻¹(u))ⁿ]⁻¹`.
pub fn munn_alpha(k: u32, n: Dimension) -> Result<MunnConstant> {
    check_indices(k, n)?;
    n.require_second_order()?;
    MunnContext::new(n)?.alpha(k)
}

pub fn munn_delta(k: u32, n: Dimension) -> Result<LogScaledReal> {
    check_indices(k, n)?;
    MunnContext::new(n)?.delta(k)
}

pub fn munn_h(k: u32, n: Dimension, s: LogScaledReal) -> Result<f64> {
    check_indices(k, n)?;
    MunnContext::new(n)?.h(k, s)
}

pub fn munn_h_inv(k: u32, n: Dimension, y: f64) -> Result<LogScaledReal> {
    check_indices(k, n)?;
    MunnContext::new(n)?.h_inv(k, y)
}

/// `α_MP(k,n)^{-4/n} K₀`.
pub fn homotopy_threshold(k: u32, n: Dimension) -> Result<LogScaledReal> {
    let alpha = munn_alpha(k, n)?;
    let k0 = LogScaledReal::from_f64(sharp_constant_second_order(n)?)?;
    Ok(k0.add_ln(alpha.ln_threshold_over_k0()))
}

/// Comparison of the literal `α_MP(1,n)^{-4/n}` with the value `2^{4/n}`
/// used for the simple-connectivity criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimedIdentityCheck {
    pub n: Dimension,
    pub literal_alpha: f64,
    pub literal_ratio: f64,
    pub claimed_ratio: f64,
    pub relative_gap: f64,
    pub consistent: bool,
}

pub fn check_claimed_identity(n: Dimension) -> Result<ClaimedIdentityCheck> {
    let alpha = munn_alpha(1, n)?;
    let literal_ratio = alpha.ln_threshold_over_k0().exp();
    let claimed_ratio = 2f64.powf(4.0 / n.as_f64());
    let relative_gap = ((literal_ratio - claimed_ratio) / claimed_ratio).abs();
    Ok(ClaimedIdentityCheck {
        n,
        literal_alpha: alpha.alpha(),
        literal_ratio,
        claimed_ratio,
        relative_gap,
        consistent: relative_gap <= 1e-9,
    })
}

/// One row of the exported constants table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MunnTableRow {
    pub k: u32,
    pub n: u32,
    pub ln_c_kk: f64,
    pub ln_delta: f64,
    pub ln_one_minus_alpha: f64,
    pub ln_threshold_over_k0: f64,
    /// Stays finite where `ln_threshold_over_k0` underflows to zero.
    pub ln_ln_threshold_over_k0: f64,
}

/// Rows for `5 ≤ n ≤ n_max`, `1 ≤ k ≤ n`.
pub fn munn_table(n_max: u32, digit_budget: usize) -> Result<Vec<MunnTableRow>> {
    if n_max < 5 {
        return Err(Error::domain("munn table needs n_max >= 5"));
    }
    let mut rows = Vec::new();
    for n in 5..=n_max {
        let dim = Dimension::new(n)?;
        let ctx = MunnContext::new(dim)?;
        for k in 1..=n {
            let top = munn_recursion(k, dim, digit_budget)?.pop().expect("non-empty");
            let ln_c_kk = match &top.exact {
                Some(e) => ln_biguint(e).ln(),
                None => top.value.ln(),
            };
            let a = ctx.alpha(k)?;
            rows.push(MunnTableRow {
                k,
                n,
                ln_c_kk,
                ln_delta: a.delta.ln(),
                ln_one_minus_alpha: a.ln_one_minus_alpha(),
                ln_threshold_over_k0: a.ln_threshold_over_k0(),
                ln_ln_threshold_over_k0: a.ln_ln_threshold_over_k0(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn recursion_base_and_first_step() {
        let v0 = munn_c(3, dim(6), 0).unwrap();
        assert_eq!(v0.exact, Some(BigUint::from(1u32)));
        assert_eq!(v0.value, LogScaledReal::ONE);
        let v1 = munn_c(1, dim(5), 1).unwrap();
        assert_eq!(v1.exact, Some(BigUint::from(10_554_638_349u64)));
    }

    #[test]
    fn digit_budget_cuts_off_exact_backend() {
        let vals = munn_recursion(3, dim(7), 50).unwrap();
        assert!(vals[1].exact.is_some());
        assert!(vals[3].exact.is_none());
        assert!(vals.windows(2).all(|w| w[0].value < w[1].value));
    }

    #[test]
    fn ln_of_big_integers() {
        let x = BigUint::from(10u32).pow(400) * 7u32;
        let want = 400.0 * std::f64::consts::LN_10 + 7f64.ln();
        assert!((ln_biguint(&x).ln() - want).abs() < 1e-12);
        assert_eq!(ln_biguint(&BigUint::from(1u32)).ln(), 0.0);
    }

    #[test]
    fn delta_first_case() {
        let d = munn_delta(1, dim(5)).unwrap();
        assert!(((d.to_f64() - 9.474_507_481_298e-14) / 9.474_507_481_298e-14).abs() < 1e-11);
    }

    #[test]
    fn h_inverse_and_limits() {
        let ctx = MunnContext::new(dim(5)).unwrap();
        let s = ctx.h_inv(1, 2.0).unwrap().to_f64();
        assert!(((s - 4.737_253_740_649_11e-14) / s).abs() < 1e-11);
        let delta = ctx.delta(1).unwrap();
        let near_zero = ctx.h(1, delta.add_ln(-(1e6f64).ln())).unwrap();
        assert!(((near_zero - 1.0) / 1e-6 - 1.0).abs() < 1e-3);
        assert!(ctx.h(1, delta).is_err());
        assert!(ctx.h(1, LogScaledReal::ZERO).is_err());
        assert!(ctx.h_inv(1, 1.0).is_err());
        assert!(ctx.h_inv(1, 0.5).is_err());
    }

    #[test]
    fn first_alpha_matches_leading_order() {
        let a = munn_alpha(1, dim(5)).unwrap();
        let want = 2.368_626_870_324_5e-14f64;
        assert!((a.ln_one_minus_alpha() - want.ln()).abs() < 1e-10);
        assert!(a.alpha() > 0.0 && a.alpha() < 1.0);
    }

    #[test]
    fn domain_checks() {
        assert!(munn_c(0, dim(5), 0).is_err());
        assert!(munn_c(6, dim(5), 0).is_err());
        assert!(munn_c(2, dim(5), 3).is_err());
        assert!(munn_alpha(1, dim(4)).is_err());
    }

    #[test]
    fn literal_first_constant_disagrees_with_claimed_identity() {
        let check = check_claimed_identity(dim(5)).unwrap();
        assert!(!check.consistent);
        assert!((check.claimed_ratio - 2f64.powf(0.8)).abs() < 1e-15);
        assert!((check.literal_ratio - 1.0).abs() < 1e-12);
    }
}
