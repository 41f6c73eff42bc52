use sobolev_rigidity::sharp::*;
use sobolev_rigidity::{Dimension, Error};

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// Reference values computed at 25 digits from the Γ-function definitions.
const K0: [(u32, f64); 4] = [
    (5, 0.009_767_220_429_617_730_2),
    (6, 0.004_043_925_975_333_479_967_4),
    (10, 0.000_826_225_296_570_947_392_39),
    (20, 0.000_161_406_644_136_274_707_75),
];

#[test]
fn second_order_constant_reference_values() {
    for &(n, want) in &K0 {
        assert!(rel(sharp_constant_second_order(dim(n)).unwrap(), want) < 1e-13, "n = {n}");
    }
}

#[test]
fn kth_order_reference_values() {
    let cases = [
        (5, 1, 0.067_513_229_818_223_584_206),
        (8, 2, 0.001_529_461_921_386_420_107),
        (7, 3, 0.000_311_747_304_127_917_213_24),
        (9, 4, 7.097_380_504_605_585_837_3e-6),
        (12, 5, 3.514_253_130_180_854_893e-8),
    ];
    for &(n, k, want) in &cases {
        assert!(rel(sharp_constant_kth(dim(n), k).unwrap(), want) < 1e-13, "n = {n}, k = {k}");
    }
}

#[test]
fn unit_ball_reference_values() {
    for &(n, want) in &[
        (5, 5.263_789_013_914_324_596_7),
        (8, 4.058_712_126_416_768_218_2),
        (13, 0.910_628_754_783_283_146_04),
    ] {
        assert!(rel(unit_ball_volume(dim(n)), want) < 1e-14);
    }
}

#[test]
fn g_at_one_reference_values() {
    for &(n, want) in &[
        (5, 15.503_138_340_149_910_088),
        (7, 2.029_356_063_208_384_109_1),
        (9, 0.318_770_504_984_668_180_48),
    ] {
        assert!(rel(euclidean_g(1.0, dim(n)).unwrap(), want) < 1e-13);
    }
    // Power-law scaling λ^{(4-n)/2}.
    let d = dim(6);
    assert!(rel(euclidean_g(4.0, d).unwrap(), euclidean_g(1.0, d).unwrap() / 4.0) < 1e-14);
    assert_eq!(g_exponent(d), -1.0);
}

#[test]
fn ode_residual_is_c_independent_and_zero() {
    let d = dim(8);
    let k0 = sharp_constant_second_order(d).unwrap();
    for &c in &[k0, 2.0 * k0, 10.0 * k0] {
        for &l in &[1e-3, 1.0, 1e3] {
            let s = euclidean_ode_sides(l, d, c).unwrap();
            assert!(s.relative().abs() < 1e-12);
            assert!(euclidean_ode_residual(l, d, c).unwrap().abs() < 1e-12 * s.rhs.abs());
        }
    }
}

#[test]
fn extremal_ratio_in_high_dimension() {
    let d = dim(16);
    let k0 = sharp_constant_second_order(d).unwrap();
    assert!(rel(euclidean_ssi_ratio(d, 0.3).unwrap(), k0) < 1e-9);
}

#[test]
fn bundle_window_edge() {
    let c = EuclideanConstants::new(dim(5)).unwrap();
    assert!(rel(c.window_upper, 7.0 / 3.0 * c.k0) < 1e-15);
    assert_eq!(c.two_sharp, 10.0);
}

#[test]
fn domain_errors() {
    assert!(matches!(sharp_constant_second_order(dim(4)), Err(Error::Domain(_))));
    assert!(matches!(sharp_constant_first_order(dim(2)), Err(Error::Domain(_))));
    assert!(sharp_constant_kth(dim(6), 3).is_err());
    assert!(sharp_constant_kth(dim(6), 0).is_err());
    assert!(euclidean_g(0.0, dim(5)).is_err());
    assert!(euclidean_g(-1.0, dim(5)).is_err());
    assert!(euclidean_ode_sides(1.0, dim(5), 0.0).is_err());
    assert!(Dimension::new(0).is_err());
    assert!(Dimension::second_order(4).is_err());
}
