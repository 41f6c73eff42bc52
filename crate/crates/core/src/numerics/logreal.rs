//! Nonnegative reals stored by their natural logarithm.
//!
//! The logarithm is carried as an unevaluated sum `hi + lo` of two doubles, so
//! products and powers of huge numbers keep close to 106 bits of the log
//! rather than 53. This matters for Munn-Perelman recursion values, whose
//! logarithms reach 1e11 while callers still compare them at the 1e-12 level.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use crate::error::{Error, Result};

// fdlibm split of ln 2: the high part has 32 trailing zero bits, so k * LN2_HI
// is exact for any |k| < 2^20.
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-01;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Natural log of a positive finite double as an (hi, lo) pair.
fn ln_f64_parts(x: f64) -> (f64, f64) {
    let (mut m, mut e) = libm::frexp(x);
    if m < std::f64::consts::FRAC_1_SQRT_2 {
        m *= 2.0;
        e -= 1;
    }
    let ef = e as f64;
    let (hi, lo) = two_sum(ef * LN2_HI, m.ln());
    quick_two_sum(hi, lo + ef * LN2_LO)
}

/// A nonnegative real `x` represented by `ln x`; zero is `ln x = -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScaledReal {
    hi: f64,
    lo: f64,
}

impl LogScaledReal {
    pub const ZERO: Self = Self {
        hi: f64::NEG_INFINITY,
        lo: 0.0,
    };
    pub const ONE: Self = Self { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x >= 0.0) || x.is_infinite() {
            return Err(Error::domain(format!(
                "LogScaledReal requires a finite nonnegative value, got {x}"
            )));
        }
        if x == 0.0 {
            return Ok(Self::ZERO);
        }
        let (hi, lo) = ln_f64_parts(x);
        Ok(Self { hi, lo })
    }

    /// Builds the value `exp(ln)`. `ln = -inf` gives zero.
    pub fn from_ln(ln: f64) -> Self {
        Self::from_ln_parts(ln, 0.0)
    }

    pub fn from_ln_parts(hi: f64, lo: f64) -> Self {
        assert!(!hi.is_nan() && !lo.is_nan(), "NaN logarithm");
        if hi == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    /// `2^e`, exact in the logarithm for `|e| < 2^20`.
    pub fn from_pow2(e: i64) -> Self {
        let ef = e as f64;
        Self::from_ln_parts(ef * LN2_HI, ef * LN2_LO)
    }

    pub fn is_zero(&self) -> bool {
        self.hi == f64::NEG_INFINITY
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.hi + self.lo
        }
    }

    pub fn ln_parts(&self) -> (f64, f64) {
        (self.hi, self.lo)
    }

    /// Evaluates the value in ordinary floating point, saturating to `inf`
    /// or `0` outside the representable range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.hi > 710.0 {
            return f64::INFINITY;
        }
        if self.hi < -746.0 {
            return 0.0;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = (self.hi - k * LN2_HI) - k * LN2_LO + self.lo;
        libm::scalbn(r.exp(), k as i32)
    }

    /// `ln(self - other)` requires `self >= other`; returns `None` otherwise.
    pub fn checked_sub(self, other: Self) -> Option<Self> {
        if other.is_zero() {
            return Some(self);
        }
        match self.partial_cmp(&other)? {
            Ordering::Less => None,
            Ordering::Equal => Some(Self::ZERO),
            Ordering::Greater => {
                let d = (other.hi - self.hi) + (other.lo - self.lo);
                Some(self.add_ln(libm::log(-libm::expm1(d))))
            }
        }
    }

    pub fn powf(self, p: f64) -> Self {
        if self.is_zero() {
            return if p == 0.0 { Self::ONE } else { Self::ZERO };
        }
        let prod = self.hi * p;
        let err = self.hi.mul_add(p, -prod);
        Self::from_ln_parts(prod, err + self.lo * p)
    }

    pub fn powi(self, p: i32) -> Self {
        self.powf(p as f64)
    }

    pub fn sqrt(self) -> Self {
        self.powf(0.5)
    }

    /// Multiplies by `exp(delta)`.
    pub fn add_ln(self, delta: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        let (hi, lo) = two_sum(self.hi, delta);
        Self::from_ln_parts(hi, lo + self.lo)
    }

    /// Decimal mantissa in [1, 10) and base-10 exponent.
    pub fn to_decimal(&self) -> (f64, i64) {
        if self.is_zero() {
            return (0.0, 0);
        }
        use std::f64::consts::LN_10;
        let q = self.hi / LN_10;
        let q_err = (-q).mul_add(LN_10, self.hi) / LN_10 + self.lo / LN_10;
        let mut e = (q + q_err).floor();
        let mut m = 10f64.powf((q - e) + q_err);
        if m >= 10.0 {
            m /= 10.0;
            e += 1.0;
        }
        (m, e as i64)
    }
}

impl Mul for LogScaledReal {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        let (hi, lo) = two_sum(self.hi, rhs.hi);
        Self::from_ln_parts(hi, lo + self.lo + rhs.lo)
    }
}

impl Div for LogScaledReal {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division of LogScaledReal by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        let (hi, lo) = two_sum(self.hi, -rhs.hi);
        Self::from_ln_parts(hi, lo + self.lo - rhs.lo)
    }
}

impl Add for LogScaledReal {
    type Output = Self;

    /// Log-sum-exp: `ln(a + b) = max + ln1p(exp(min - max))`.
    fn add(self, rhs: Self) -> Self {
        let (big, small) = if self >= rhs { (self, rhs) } else { (rhs, self) };
        if small.is_zero() {
            return big;
        }
        let d = (small.hi - big.hi) + (small.lo - big.lo);
        big.add_ln(libm::log1p(d.exp()))
    }
}

impl PartialOrd for LogScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => match self.hi.partial_cmp(&other.hi)? {
                Ordering::Equal => self.lo.partial_cmp(&other.lo),
                ord => Some(ord),
            },
        }
    }
}

impl fmt::Display for LogScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (mut m, mut e) = self.to_decimal();
        if (m * 1e6).round() >= 1e7 {
            m /= 10.0;
            e += 1;
        }
        write!(f, "{m:.6}e{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn round_trip_across_the_double_range() {
        for &x in &[1.0, 0.5, 3.0, 1e-300, 1e300, 7.25e-310, 1.797e308, 123456.789] {
            let back = LogScaledReal::from_f64(x).unwrap().to_f64();
            assert!(rel(back, x) < 1e-14, "{x} -> {back}");
        }
        assert_eq!(LogScaledReal::from_f64(0.0).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(LogScaledReal::from_f64(-1.0).is_err());
        assert!(LogScaledReal::from_f64(f64::NAN).is_err());
        assert!(LogScaledReal::from_f64(f64::INFINITY).is_err());
    }

    #[test]
    fn addition_far_outside_double_range() {
        let a = LogScaledReal::from_ln(1e6);
        let b = LogScaledReal::from_ln(1e6);
        let s = a + b;
        assert!((s.ln() - (1e6 + std::f64::consts::LN_2)).abs() < 1e-9);
        let tiny = LogScaledReal::from_ln(-1e12);
        assert_eq!((a + tiny).ln(), a.ln());
        assert_eq!((LogScaledReal::ZERO + a).ln(), a.ln());
    }

    #[test]
    fn subtraction() {
        let five = LogScaledReal::from_f64(5.0).unwrap();
        let three = LogScaledReal::from_f64(3.0).unwrap();
        assert!(rel(five.checked_sub(three).unwrap().to_f64(), 2.0) < 1e-15);
        assert!(three.checked_sub(five).is_none());
        assert!(five.checked_sub(five).unwrap().is_zero());
    }

    #[test]
    fn powers_and_display() {
        let ten = LogScaledReal::from_f64(10.0).unwrap();
        let big = ten.powi(5000);
        let (m, e) = big.to_decimal();
        assert_eq!(e, 5000);
        assert!((m - 1.0).abs() < 1e-9);
        assert_eq!(format!("{}", ten.powi(3)), "1.000000e3");
    }

    #[test]
    fn ordering() {
        let a = LogScaledReal::from_f64(2.0).unwrap();
        let b = LogScaledReal::from_f64(3.0).unwrap();
        assert!(a < b);
        assert!(LogScaledReal::ZERO < a);
    }
}
