use sobolev_rigidity::rigidity::*;
use sobolev_rigidity::sharp::sharp_constant_second_order;
use sobolev_rigidity::Dimension;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn k0(n: u32) -> f64 {
    sharp_constant_second_order(dim(n)).unwrap()
}

#[test]
fn euclidean_constant() {
    let r = decide(dim(5), k0(5), ThresholdMode::ClaimedIdentity, DEFAULT_TOLERANCE).unwrap();
    assert!(r.ssi_admissible && r.isometric_to_euclidean && r.contractible);
    assert_eq!(r.volume_bound, Some(1.0));
    assert_eq!(r.pi1_order_bound, Some(1));
    assert_eq!(r.assumptions.len(), 3);
}

#[test]
fn ten_percent_above() {
    let r = decide(dim(5), 1.1 * k0(5), ThresholdMode::ClaimedIdentity, DEFAULT_TOLERANCE).unwrap();
    assert!((r.volume_bound.unwrap() - 0.887_685_536_069_373_2).abs() < 1e-12);
    assert!(r.volume_bound_applicable);
    assert_eq!(r.pi1_order_bound, Some(1));
    assert!((r.pi1_order_bound_real - 1.1f64.powf(1.25)).abs() < 1e-14);
    assert!(r.simply_connected && !r.contractible && !r.isometric_to_euclidean);
    // Modes disagree about k = 1; both levels are recorded.
    assert_eq!((r.homotopy_level_literal, r.homotopy_level_claimed), (0, 1));
    assert!(r.notes.iter().any(|n| n.contains("threshold mode")));
    let lit = decide(dim(5), 1.1 * k0(5), ThresholdMode::LiteralFormula, DEFAULT_TOLERANCE).unwrap();
    assert_eq!(lit.homotopy_vanishing_level, 0);
    assert!(lit.simply_connected);
}

#[test]
fn outside_the_window() {
    let r = decide(dim(5), 3.0 * k0(5), ThresholdMode::default(), DEFAULT_TOLERANCE).unwrap();
    assert!(!r.volume_bound_applicable);
    assert_eq!(r.pi1_order_bound, None);
    assert_eq!(r.pi1_order_bound_real.floor(), 3.0);
    assert!(r.notes.iter().any(|n| n.contains("withheld")));
}

#[test]
fn tolerance_direction() {
    for n in [5, 7, 11] {
        let d = Decider::new(dim(n)).unwrap();
        let tol = 1e-9;
        assert!(d.decide(k0(n), ThresholdMode::default(), tol).unwrap().isometric_to_euclidean);
        let off = d.decide(k0(n) * (1.0 + 2.0 * tol), ThresholdMode::default(), tol).unwrap();
        assert!(!off.isometric_to_euclidean && off.ssi_admissible);
        let r = d.decide(k0(n) * (1.0 + 0.5 * tol), ThresholdMode::default(), tol).unwrap();
        assert!(r.isometric_to_euclidean);
        assert_eq!(r.tolerance, tol);
    }
}

#[test]
fn invariants_over_a_sweep() {
    for n in [5, 6, 9] {
        let d = Decider::new(dim(n)).unwrap();
        for i in 0..200 {
            let c = k0(n) * (0.8 + 2.5 * i as f64 / 199.0);
            for mode in [ThresholdMode::LiteralFormula, ThresholdMode::ClaimedIdentity] {
                let r = d.decide(c, mode, DEFAULT_TOLERANCE).unwrap();
                if r.isometric_to_euclidean {
                    assert_eq!(r.volume_bound, Some(1.0));
                }
                if r.simply_connected {
                    assert!(r.pi1_order_bound.unwrap_or(1) <= 1);
                }
                if r.contractible {
                    assert!(r.simply_connected);
                }
                if !r.ssi_admissible {
                    assert!(!r.simply_connected && r.homotopy_vanishing_level == 0);
                }
                assert!(r.homotopy_vanishing_level <= n);
            }
        }
    }
}

#[test]
fn report_round_trip_and_format() {
    let r = decide(dim(8), 1.7 * k0(8), ThresholdMode::LiteralFormula, 1e-10).unwrap();
    let text = r.to_kv();
    assert!(text.starts_with("n = 8\nc = "));
    assert!(text.contains("threshold_mode = literal\n"));
    assert_eq!(RigidityReport::from_kv(&text).unwrap(), r);
    assert!(RigidityReport::from_kv("n = 8\n").is_err());
}

#[test]
fn invalid_inputs() {
    assert!(decide(dim(4), 1.0, ThresholdMode::default(), DEFAULT_TOLERANCE).is_err());
    assert!(decide(dim(5), 0.0, ThresholdMode::default(), DEFAULT_TOLERANCE).is_err());
    assert!(decide(dim(5), 1.0, ThresholdMode::default(), -1.0).is_err());
    assert!("sideways".parse::<ThresholdMode>().is_err());
    assert_eq!("literal".parse::<ThresholdMode>().unwrap(), ThresholdMode::LiteralFormula);
}
