use multiflow::quad::{integrate_from_origin, QuadOptions};
use multiflow::specfun::{gamma_fn, gauss_2f1, kummer_phi, SeriesControl};
use proptest::prelude::*;

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

// Term-by-term Gauss series, summed until the terms stall.
fn direct_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for k in 0..20_000 {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gamma_recurrence(x in 0.1f64..40.0) {
        let lhs = gamma_fn(x + 1.0).unwrap();
        let rhs = x * gamma_fn(x).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-11, "x = {x}: {lhs} vs {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn zero_argument_is_exactly_one(a in -5.0f64..5.0, b in 0.05f64..5.0, c in 0.05f64..5.0) {
        prop_assert_eq!(kummer_phi(a, b, 0.0, &ctl()).unwrap(), 1.0);
        prop_assert_eq!(gauss_2f1(a, b, c, 0.0, &ctl()).unwrap(), 1.0);
    }

    #[test]
    fn kummer_large_negative_argument(a in -2.0f64..-0.01, b in 0.1f64..2.0, lz in 3.0f64..6.0) {
        let z = -(10f64.powf(lz));
        let phi = kummer_phi(a, b, z, &ctl()).unwrap();
        let lead = gamma_fn(b - a).unwrap() / gamma_fn(b).unwrap() * (-z).powf(a);
        prop_assert!((phi * lead - 1.0).abs() < 1e-2, "a {a} b {b} z {z}: {}", phi * lead);
    }

    #[test]
    fn gauss_inside_unit_disc_matches_series(
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in 0.5f64..3.0, z in -0.95f64..0.0
    ) {
        let got = gauss_2f1(a, b, c, z, &ctl()).unwrap();
        let want = direct_series(a, b, c, z);
        prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1e-300), "{got} vs {want}");
    }

    #[test]
    fn continuation_matches_integral(b in 0.3f64..6.0, lz in 0.01f64..6.0) {
        // F(1,b;b+1;z) = b ∫_0^1 t^{b-1}/(1 - z t) dt
        let z = -(10f64.powf(lz));
        let got = gauss_2f1(1.0, b, b + 1.0, z, &ctl()).unwrap();
        let opts = QuadOptions::default().with_rel_tol(1e-12);
        let want = b * integrate_from_origin(|t| t.powf(b - 1.0) / (1.0 - z * t), b, 1.0, &opts).unwrap();
        prop_assert!((got / want - 1.0).abs() < 1e-8, "b {b} z {z}: {got} vs {want}");
    }
}
