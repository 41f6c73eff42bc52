//! Safeguarded Newton/bisection on a sign-changing bracket.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 400;

struct Bracket {
    neg: f64,
    pos: f64,
}

impl Bracket {
    fn width(&self) -> f64 {
        (self.pos - self.neg).abs()
    }

    fn contains_strictly(&self, x: f64) -> bool {
        x > self.neg.min(self.pos) && x < self.neg.max(self.pos)
    }

    fn midpoint(&self) -> f64 {
        self.neg + 0.5 * (self.pos - self.neg)
    }

    fn converged(&self, tol: f64) -> bool {
        let m = self.midpoint();
        // Nothing representable strictly inside, or relative width below tol.
        m == self.neg || m == self.pos || self.width() <= tol * self.neg.abs().max(self.pos.abs())
    }

    fn update(&mut self, x: f64, fx: f64) {
        if fx < 0.0 {
            self.neg = x;
        } else {
            self.pos = x;
        }
    }
}

fn start(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Option<Bracket>> {
    if !(lo < hi) {
        return Err(Error::domain(format!("bracket needs lo < hi, got [{lo}, {hi}]")));
    }
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::domain("function is NaN at a bracket endpoint"));
    }
    if f_lo == 0.0 || f_hi == 0.0 {
        return Ok(None);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    Ok(Some(if f_lo < 0.0 {
        Bracket { neg: lo, pos: hi }
    } else {
        Bracket { neg: hi, pos: lo }
    }))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 0.0) {
        return Err(Error::domain(format!("root tolerance must be >= 0, got {tol}")));
    }
    Ok(())
}

/// Finds a root of `f` in `[lo, hi]` given `f(lo) * f(hi) < 0`.
///
/// Newton steps use the secant slope through the two most recent iterates and
/// fall back to bisection whenever a step leaves the bracket or the bracket
/// fails to halve. `tol` is relative to the bracket magnitude; `tol = 0` runs
/// to full machine precision.
pub fn solve_bracketed<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let (f_lo, f_hi) = (f(lo), f(hi));
    let Some(mut br) = start(lo, hi, f_lo, f_hi)? else {
        return Ok(if f_lo == 0.0 { lo } else { hi });
    };

    // Regula falsi from the endpoints for the first step.
    let (mut x_prev, mut f_prev) = (lo, f_lo);
    let (mut x, mut fx) = (hi, f_hi);
    let mut best = if f_lo.abs() < f_hi.abs() { lo } else { hi };
    let mut best_abs = f_lo.abs().min(f_hi.abs());
    let mut width_before = br.width();

    for _ in 0..MAX_ITERATIONS {
        if br.converged(tol) {
            break;
        }
        let slope = (fx - f_prev) / (x - x_prev);
        let mut cand = x - fx / slope;
        if !(slope.is_finite() && slope != 0.0 && br.contains_strictly(cand)) {
            cand = br.midpoint();
        }
        let fc = f(cand);
        if fc.is_nan() {
            return Err(Error::domain(format!("function is NaN at {cand}")));
        }
        if fc.abs() < best_abs {
            best = cand;
            best_abs = fc.abs();
        }
        if fc == 0.0 {
            return Ok(cand);
        }
        br.update(cand, fc);
        x_prev = x;
        f_prev = fx;
        x = cand;
        fx = fc;

        // Force a bisection if the last two steps did not halve the bracket.
        if br.width() > 0.5 * width_before {
            let m = br.midpoint();
            if br.contains_strictly(m) {
                let fm = f(m);
                if fm.is_nan() {
                    return Err(Error::domain(format!("function is NaN at {m}")));
                }
                if fm.abs() < best_abs {
                    best = m;
                    best_abs = fm.abs();
                }
                if fm == 0.0 {
                    return Ok(m);
                }
                br.update(m, fm);
                x_prev = x;
                f_prev = fx;
                x = m;
                fx = fm;
            }
        }
        width_before = br.width();
    }
    Ok(best)
}

/// Newton/bisection hybrid using an analytic derivative; `fdf(x)` returns
/// `(f(x), f'(x))`. Same bracket and tolerance conventions as
/// [`solve_bracketed`].
pub fn solve_bracketed_newton<F: FnMut(f64) -> (f64, f64)>(
    mut fdf: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    check_tol(tol)?;
    let ((f_lo, _), (f_hi, _)) = (fdf(lo), fdf(hi));
    let Some(mut br) = start(lo, hi, f_lo, f_hi)? else {
        return Ok(if f_lo == 0.0 { lo } else { hi });
    };

    let mut x = br.midpoint();
    let (mut fx, mut dfx) = fdf(x);
    let mut best = (x, fx.abs());
    let mut last_step = br.width();
    for _ in 0..MAX_ITERATIONS {
        if fx.is_nan() {
            return Err(Error::domain(format!("function is NaN at {x}")));
        }
        if fx == 0.0 {
            return Ok(x);
        }
        br.update(x, fx);
        if br.converged(tol) {
            break;
        }
        let newton = x - fx / dfx;
        let step_ok = dfx.is_finite()
            && dfx != 0.0
            && br.contains_strictly(newton)
            && (newton - x).abs() <= 0.5 * last_step;
        let next = if step_ok { newton } else { br.midpoint() };
        last_step = (next - x).abs();
        x = next;
        (fx, dfx) = fdf(x);
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = solve_bracketed(|x| x - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_root() {
        let r = solve_bracketed(|x| x * (1.0 + x / 2.0) - 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - (3f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn log_inversion_tiny_root() {
        let target = (-30f64).exp();
        let r = solve_bracketed(|x: f64| x.ln() + 30.0, target / 10.0, target * 10.0, 1e-12).unwrap();
        assert!(((r - target) / target).abs() < 1e-12);
    }

    #[test]
    fn decreasing_function_and_endpoint_roots() {
        let r = solve_bracketed(|x| 2.0 - x, 0.0, 3.0, 0.0).unwrap();
        assert_eq!(r, 2.0);
        assert_eq!(solve_bracketed(|x| x, 0.0, 1.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn missing_sign_change() {
        match solve_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12) {
            Err(Error::Bracket { .. }) => {}
            other => panic!("expected bracket error, got {other:?}"),
        }
    }

    #[test]
    fn newton_variant() {
        let r = solve_bracketed_newton(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 0.0).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 4e-16);
    }

    #[test]
    fn flat_then_steep() {
        // Poor Newton steps must still converge through bisection.
        let r = solve_bracketed(|x: f64| x.powi(9) - 1e-9, 0.0, 4.0, 1e-14).unwrap();
        assert!((r - 0.1).abs() < 1e-13);
    }
}
