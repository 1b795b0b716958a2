//! Values frozen from independent high-precision and brute-force computations.

use aplab_core::almost_periods::{geometric_eps, length_curve, WindowPolicy};
use aplab_core::dimension::orbit_angles;
use aplab_core::diophantine::{badness_score, best_simultaneous_denominator, kronecker_residuals};
use aplab_core::{Exponent, Limits, Preset, Real};

#[test]
fn golden_distance_at_fibonacci_times() {
    let f = Preset::Golden.signal();
    let frozen = [
        (21.0, 0.133_645_705_257_142_3),
        (34.0, 0.082_635_652_394_746_13),
        (55.0, 0.051_080_629_292_787_54),
        (89.0, 0.031_571_686_868_947_36),
        (144.0, 0.019_512_876_469_997_34),
    ];
    for (t, d) in frozen {
        assert!((f.translation_distance(t) - d).abs() < 1e-13, "t = {t}");
    }
}

#[test]
fn golden_orbit_angle() {
    let f = Preset::Golden.signal();
    let a = orbit_angles(&f, 1.0);
    assert!(a.angles()[0].abs() < 1e-15);
    assert!((a.angles()[1] - 3.883_222_077_450_933).abs() < 1e-13);
}

#[test]
fn golden_gap_structure() {
    // largest gaps between eps-hits, brute force on a 5x longer window at step eps/200
    let frozen = [(0.4, 7.976), (0.2, 12.964), (0.1, 33.9835), (0.05, 54.9978)];
    let eps = geometric_eps(0.4, 4, 2.0);
    let curve = length_curve(
        &Preset::Golden.signal(),
        &eps,
        &WindowPolicy::default(),
        &Limits::default(),
    )
    .unwrap();
    for (s, (e, gap)) in curve.samples.iter().zip(frozen) {
        assert!((s.eps - e).abs() < 1e-12);
        assert!(s.l_lower <= s.l_upper);
        assert!(
            (s.l_upper - gap).abs() < 0.05 * e,
            "eps {e}: {} vs {gap}",
            s.l_upper
        );
    }
}

#[test]
fn diophantine_brute_force() {
    let lim = Limits::default();
    let phi = Real::golden();
    let sqrt2 = Real::sqrt_int(2);
    let b = badness_score(&[phi], 100_000, &lim).unwrap();
    assert!((b.score - 0.381_966_011_250_105_15).abs() < 1e-12);
    assert_eq!(b.argmin_q, 1);
    let b = badness_score(&[sqrt2], 100_000, &lim).unwrap();
    assert!((b.score - 0.343_145_750_507_619_8).abs() < 1e-12);
    assert_eq!(b.argmin_q, 2);
    assert_eq!(
        best_simultaneous_denominator(&[phi], 0.01, 1000, &lim).unwrap(),
        Some(55)
    );
    assert_eq!(
        best_simultaneous_denominator(&[phi, sqrt2], 0.05, 1000, &lim).unwrap(),
        Some(157)
    );
}

#[test]
fn kronecker_at_seventeen() {
    let lambda = [
        Exponent::from_cycles(Real::ONE),
        Exponent::from_cycles(Real::golden()),
    ];
    let r = kronecker_residuals(&lambda, &[0.0, std::f64::consts::PI], 17.0);
    assert!(r[0] < 1e-12);
    assert!((r[1] - 0.041_329_591_280_205_62).abs() < 1e-12);
}
