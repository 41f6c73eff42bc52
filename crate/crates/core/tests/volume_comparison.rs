use sobolev_rigidity::numerics::{integrate_semi_infinite_scaled, Quadrature};
use sobolev_rigidity::sharp::{euclidean_g_derivatives, sharp_constant_second_order, unit_ball_volume};
use sobolev_rigidity::volume::*;
use sobolev_rigidity::{Dimension, Error};

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn k0(n: u32) -> f64 {
    sharp_constant_second_order(dim(n)).unwrap()
}

#[test]
fn validation_examples() {
    assert!(VolumeProfile::euclidean(dim(5)).unwrap().validate().is_valid());
    assert!(VolumeProfile::ratio_family(dim(5), 0.8, 1.0, 2.0).unwrap().validate().is_valid());

    let n = dim(5);
    let w = unit_ball_volume(n);
    let p = VolumeProfile::tabulated(n, &[(1.0, 0.9 * w), (2.0, 33.0 * w), (4.0, 500.0 * w)]).unwrap();
    let r = p.validate();
    assert!(!r.is_valid());
    let bound = r
        .violations
        .iter()
        .find(|v| v.invariant == Invariant::EuclideanBound)
        .unwrap();
    assert_eq!(bound.t, 2.0);

    // θ starting away from 1 near the origin.
    let p = VolumeProfile::ratio_family(n, 0.5, 1.0, 2.0).unwrap();
    assert!(p.validate().is_valid());
}

#[test]
fn f_matches_g_for_euclidean_profile() {
    let quad = Quadrature::with_rel_tol(1e-12);
    for n in [5, 9, 14] {
        let p = VolumeProfile::euclidean(dim(n)).unwrap();
        for l in log_grid(1e-3, 1e3, 7) {
            let fv = profile_f_all(&p, l, &quad).unwrap();
            let gv = euclidean_g_derivatives(l, dim(n)).unwrap();
            assert!(rel(fv.f, gv.g) < 1e-8);
            assert!(rel(fv.df, gv.dg) < 1e-8);
            assert!(rel(fv.d2f, gv.d2g) < 1e-8);
        }
    }
}

#[test]
fn second_derivative_matches_finite_difference() {
    let p = VolumeProfile::ratio_family(dim(5), 0.8, 1.0, 2.0).unwrap();
    let quad = Quadrature::with_rel_tol(1e-12);
    let h = 1e-4;
    let f1 = |x: f64| profile_f_with(&p, x, 1, &quad).unwrap().value;
    let fd = (f1(1.0 + h) - f1(1.0 - h)) / (2.0 * h);
    assert!(rel(profile_f(&p, 1.0, 2).unwrap(), fd) < 1e-6);
}

#[test]
fn relations_against_g_hold_for_valid_profiles() {
    let profiles = [
        VolumeProfile::ratio_family(dim(5), 0.8, 1.0, 2.0).unwrap(),
        VolumeProfile::ratio_family(dim(6), 0.3, 0.5, 4.0).unwrap(),
        VolumeProfile::from_ratio_samples(dim(7), &[0.5, 1.0, 2.0, 4.0, 8.0], |t| 0.4 + 0.6 / (1.0 + t)).unwrap(),
    ];
    for p in &profiles {
        assert!(p.validate().is_valid());
        let t = comparison_trace(p, 1.2 * k0(p.n().get()), &log_grid(1e-3, 1e3, 13)).unwrap();
        assert!(t.relation_violations().is_empty(), "{:?}", t.relation_violations());
    }
}

#[test]
fn trace_ratio_for_euclidean_profile() {
    let n = 6;
    let p = VolumeProfile::euclidean(dim(n)).unwrap();
    for &c in &[k0(n), 1.3 * k0(n), 2.0 * k0(n)] {
        let t = comparison_trace(&p, c, &default_lambda_grid()).unwrap();
        assert_eq!(t.rows.len(), 41);
        let want = (c / k0(n)).powf(n as f64 / 4.0);
        for r in &t.rows {
            assert!(rel(r.f0 / r.g0, want) < 1e-8);
        }
        assert!(t.f0_below_g0().is_empty());
    }
}

#[test]
fn collapsed_profile_falls_below_g0() {
    let p = VolumeProfile::ratio_family(dim(5), 0.5, 1.0, 2.0).unwrap();
    let t = comparison_trace(&p, 1.05 * k0(5), &default_lambda_grid()).unwrap();
    let below = t.f0_below_g0();
    assert!(!below.is_empty());
    assert!(*below.last().unwrap() > 999.0);
}

#[test]
fn odi_examples() {
    let p = VolumeProfile::euclidean(dim(5)).unwrap();
    let s = odi_sides(&p, k0(5), 1.0).unwrap();
    assert!(s.residual().abs() < 1e-8 * s.rhs.abs());
    assert!(odi_residual(&p, 2.0 * k0(5), 1.0).unwrap() < 0.0);
    for &l in &[0.1, 0.4, 1.6, 6.4] {
        assert!(odi_residual(&p, 1.5 * k0(5), l).unwrap() < 0.0);
    }
}

#[test]
fn window_examples() {
    let n = dim(5);
    let c = 1.4 * k0(5);
    for &l in &[0.01, 1.0, 50.0] {
        let tl = t_lambda(n, c, l);
        let at = phi_window_check(n, c, l, tl, None).unwrap();
        assert!(at.t_within_window && at.phi_nondecreasing);
        let scale = c * 9.0 * l * l;
        assert!(at.phi_derivative.abs() < 1e-10 * scale);
        let half = phi_window_check(n, c, l, tl / 2.0, None).unwrap();
        assert!(half.phi_derivative > 0.0);
        let out = phi_window_check(n, c, l, 2.0 * tl, None).unwrap();
        assert!(!out.t_within_window && !out.phi_nondecreasing);
    }
    // The Euclidean profile sits inside the window up to its edge.
    let edge = 7.0 / 3.0 * k0(5);
    let p = VolumeProfile::euclidean(n).unwrap();
    for l in default_lambda_grid() {
        let r = phi_window_check(n, edge, l, 1.0, Some(&p)).unwrap();
        assert_eq!(r.profile_within_window, Some(true), "lambda = {l}");
    }
    let r = phi_window_check(n, 2.5 * k0(5), 1.0, 1.0, Some(&p)).unwrap();
    assert_eq!(r.profile_within_window, Some(false));
}

#[test]
fn phi_is_nondecreasing_inside_the_window() {
    let n = dim(7);
    let (c, l) = (2.0 * k0(7), 0.8);
    let tl = t_lambda(n, c, l);
    for t in log_grid(tl * 1e-8, tl, 200) {
        let h = t * 1e-6;
        let d = (phi(n, c, l, t + h) - phi(n, c, l, t - h)) / (2.0 * h);
        let scale = phi(n, c, l, t).abs().max(1e-300) / t;
        assert!(d >= -1e-6 * scale, "t = {t}: {d}");
    }
}

#[test]
fn kernel_closed_form() {
    let n5 = dim(5);
    assert!((kernel_i1(1.0, n5).unwrap() - 0.674_951_546_669_682_14).abs() < 1e-14);
    assert!(rel(kernel_i1(4.0, n5).unwrap(), kernel_i1(1.0, n5).unwrap() / 2.0) < 1e-14);
    let n6 = dim(6);
    let q = integrate_semi_infinite_scaled(|t| t.powi(6) * kernel_f(n6, 1.0, t), 1.0, 1e-12).unwrap();
    assert!(rel(kernel_i1(1.0, n6).unwrap(), q.value) < 1e-8);
    assert!(kernel_i1(1.0, dim(4)).is_err());
}

#[test]
fn truncated_kernel_bound() {
    let n = dim(5);
    for &(l, big_n) in &[(1.0, 0.5), (10.0, 2.0), (100.0, 3.0)] {
        let q = Quadrature::with_rel_tol(1e-12)
            .finite(|t| t.powi(5) * kernel_f(n, l, t), 0.0, big_n)
            .unwrap();
        assert!(q.value <= kernel_i2_bound(l, n, big_n).unwrap());
    }
}

#[test]
fn kernel_integral_examples() {
    let grid = default_lambda_grid();
    let e = VolumeProfile::euclidean(dim(5)).unwrap();
    assert!(kernel_integral_scan(&e, 1.0, &grid).unwrap().points.iter().all(|p| p.value == 0.0));
    assert!(kernel_integral_scan(&e, 0.9, &grid).unwrap().points.iter().all(|p| p.sign == Sign::Positive));

    let p = VolumeProfile::ratio_family(dim(5), 0.5, 1.0, 2.0).unwrap();
    let s = kernel_integral_scan(&p, 0.8, &grid).unwrap();
    let star = s.first_negative().unwrap();
    // Negative from λ* on.
    assert!(s.points.iter().filter(|pt| pt.lambda >= star).all(|pt| pt.sign == Sign::Negative));
    assert!(s.points[0].sign == Sign::Positive);
    assert!(kernel_integral(&p, 0.0, 1.0).is_err());
}

#[test]
fn kernel_integral_nonnegative_at_asymptotic_ratio() {
    let grid = log_grid(1e-3, 1e3, 13);
    for &(b, t0, pw) in &[(0.5, 1.0, 2.0), (0.9, 0.2, 1.0), (0.2, 3.0, 3.0)] {
        for n in [5, 8] {
            let p = VolumeProfile::ratio_family(dim(n), b, t0, pw).unwrap();
            let b0 = p.asymptotic_ratio().unwrap();
            assert_eq!(b0, b);
            assert!(kernel_integral_scan(&p, b0, &grid).unwrap().all_nonnegative());
        }
    }
}

#[test]
fn near_origin_comparison() {
    // θ ≡ 1 on [0, 2], then decaying.
    let radii: Vec<f64> = (0..40).map(|i| 2.0 + 0.25 * i as f64).collect();
    for n in 5..=8 {
        let p = VolumeProfile::from_ratio_samples(dim(n), &radii, |t| 0.5 + 0.5 / (1.0 + (t - 2.0).powi(2))).unwrap();
        let l = 1e-6;
        let quad = Quadrature::with_rel_tol(1e-12);
        let fv = profile_f_all(&p, l, &quad).unwrap();
        let gv = euclidean_g_derivatives(l, dim(n)).unwrap();
        let ratio = (fv.f - l * fv.df) / (gv.g - l * gv.dg);
        assert!((ratio - 1.0).abs() < 1e-3, "n = {n}: {ratio}");
    }
}

#[test]
fn asymptotic_ratio_examples() {
    assert_eq!(VolumeProfile::euclidean(dim(5)).unwrap().asymptotic_ratio().unwrap(), 1.0);
    assert_eq!(
        VolumeProfile::ratio_family(dim(5), 0.8, 1.0, 2.0).unwrap().asymptotic_ratio().unwrap(),
        0.8
    );
    let radii: Vec<f64> = (1..=60).map(|i| i as f64 * 0.5).collect();
    let p = VolumeProfile::from_ratio_samples(dim(6), &radii, |t| 0.6 + 0.4 / (1.0 + t * t)).unwrap();
    assert!((p.asymptotic_ratio().unwrap() - 0.6).abs() < 1e-3);
    let p = VolumeProfile::from_ratio_samples(dim(6), &[1.0, 2.0], |_| 0.7).unwrap();
    assert!(matches!(p.asymptotic_ratio(), Err(Error::TailUndetermined(_))));
}

#[test]
fn envelope_examples() {
    for n in 5..=12u32 {
        let nf = n as f64;
        let (lambda, rho) = (0.7, 3.1);
        let up = laplacian_envelope_check(EnvelopeInput { n: dim(n), lambda, rho, a: nf - 1.0 }).unwrap();
        assert!(rel(up.expression, 2.0 * rho * rho + nf * lambda) < 1e-14);
        let lo = laplacian_envelope_check(EnvelopeInput { n: dim(n), lambda, rho, a: nf - 5.0 }).unwrap();
        assert!(rel(lo.expression, (nf - 4.0) * lambda - 2.0 * rho * rho) < 1e-14);
        assert!(up.holds && lo.holds && up.within_growth_range);
        let bad = laplacian_envelope_check(EnvelopeInput { n: dim(n), lambda: 1e-2, rho: 50.0, a: nf - 6.0 }).unwrap();
        assert!(!bad.holds && bad.margin < 0.0);
    }
}

#[test]
fn growth_condition_examples() {
    let n = dim(9);
    let rho = 3.0;
    let e = growth_condition_check(n, rho, 0.0).unwrap();
    assert!(e.holds && e.rho_laplacian_rho == 8.0);
    let b = growth_condition_check(n, rho, -4.0 / rho).unwrap();
    assert!(b.holds && (b.rho_laplacian_rho - 4.0).abs() < 1e-14);
    assert!(!growth_condition_check(n, rho, -5.0 / rho).unwrap().holds);
}
