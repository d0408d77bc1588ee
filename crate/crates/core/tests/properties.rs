use std::sync::OnceLock;

use bergman_orlicz::atoms::Atom;
use bergman_orlicz::factor::{
    bloch_norm, factor_atom_bloch, factor_atom_two_orlicz, rule_for_atoms, BlochCase, BlochFunction, RightFactor,
};
use bergman_orlicz::geometry::{bergman_distance, distance_from_origin, BallPoint};
use bergman_orlicz::growth::{Grid, GrowthFunction};
use bergman_orlicz::quad::{build_rule, luxembourg_norm_fast, QuadratureRule};
use num_complex::Complex64 as C;
use proptest::prelude::*;

type G = GrowthFunction<f64>;

fn disc_point() -> impl Strategy<Value = BallPoint<f64>> {
    (0.0..0.999f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| BallPoint::disc(C::from_polar(r, t)).unwrap())
}

fn ball2_point() -> impl Strategy<Value = BallPoint<f64>> {
    (0.0..0.99f64, 0.0..1.0f64, 0.0..6.3f64, 0.0..6.3f64).prop_map(|(r, u, p, q)| {
        BallPoint::ball2(C::from_polar(r * u.sqrt(), p), C::from_polar(r * (1.0 - u).sqrt(), q)).unwrap()
    })
}

fn growth() -> impl Strategy<Value = G> {
    prop_oneof![
        (0.2..4.0f64).prop_map(G::power),
        (0.3..2.0f64).prop_map(|p| G::power_log(G::power(p))),
        Just(G::exp_minus_one()),
    ]
}

fn rule() -> &'static QuadratureRule<f64> {
    static R: OnceLock<QuadratureRule<f64>> = OnceLock::new();
    R.get_or_init(|| build_rule(0.0, 1, 6).unwrap())
}

fn conjugate_of_square() -> &'static G {
    static P: OnceLock<G> = OnceLock::new();
    P.get_or_init(|| G::power(2.0).complementary().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn growth_is_monotone(phi in growth(), a in -6.0..6.0f64, b in -6.0..6.0f64) {
        let (s, t) = (10f64.powf(a.min(b)), 10f64.powf(a.max(b)));
        prop_assert!(phi.value(s) <= phi.value(t));
    }

    #[test]
    fn inverse_undoes_evaluate(phi in growth(), e in -6.0..6.0f64) {
        let t = 10f64.powf(e);
        // e^t − 1 leaves the f64 range beyond t ≈ 709
        prop_assume!(phi.value(t).is_finite());
        let back = phi.inverse(phi.value(t));
        prop_assert!((back - t).abs() <= 1e-8 * t, "{t} -> {back}");
    }

    #[test]
    fn power_log_is_exact_composition(p in 0.3..3.0f64, t in 0.0..1e6f64) {
        let psi = G::power_log(G::power(p));
        prop_assert_eq!(psi.value(t), G::power(p).value(t / (std::f64::consts::E + t).ln()));
    }

    #[test]
    fn young_inequality(t in 1e-3..1e3f64, s in 1e-3..1e3f64) {
        let psi = conjugate_of_square();
        prop_assert!(t * s <= t * t + psi.value(s) + 1e-9);
    }

    #[test]
    fn metric_axioms(z in disc_point(), w in disc_point(), v in disc_point()) {
        let d = |a: &BallPoint<f64>, b: &BallPoint<f64>| bergman_distance(a, b).unwrap();
        prop_assert!((d(&z, &w) - d(&w, &z)).abs() <= 1e-12 * (1.0 + d(&z, &w)));
        prop_assert!(d(&z, &v) + d(&v, &w) - d(&z, &w) >= -1e-10);
    }

    #[test]
    fn metric_axioms_in_the_ball(z in ball2_point(), w in ball2_point(), v in ball2_point()) {
        let d = |a: &BallPoint<f64>, b: &BallPoint<f64>| bergman_distance(a, b).unwrap();
        prop_assert!((d(&z, &w) - d(&w, &z)).abs() <= 1e-12 * (1.0 + d(&z, &w)));
        prop_assert!(d(&z, &v) + d(&v, &w) - d(&z, &w) >= -1e-10);
    }

    #[test]
    fn distance_from_the_origin(w in disc_point()) {
        let r = w.norm();
        let d = bergman_distance(&BallPoint::origin(1), &w).unwrap();
        let closed = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
        prop_assert!((d - closed).abs() <= 1e-12 * (1.0 + closed));
        prop_assert!((distance_from_origin(r) - closed).abs() <= 1e-12 * (1.0 + closed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn luxembourg_is_homogeneous_for_powers(p in 0.3..3.0f64, x in 0.0..0.9f64, k in 0usize..3) {
        let s = [0.1, 1.0, 10.0][k];
        let phi = G::power(p);
        let a = BallPoint::real(x, 1).unwrap();
        let f = move |z: &BallPoint<f64>| (C::new(1.0, 0.0) - z.inner(&a)).inv().powf(3.0);
        let g = move |z: &BallPoint<f64>| f(z) * s;
        let nf = luxembourg_norm_fast(&f, &phi, rule()).unwrap().luxembourg_norm;
        let ng = luxembourg_norm_fast(&g, &phi, rule()).unwrap().luxembourg_norm;
        prop_assert!((ng - s * nf).abs() <= 1e-8 * s * nf, "{ng} vs {}", s * nf);
    }

    #[test]
    fn luxembourg_is_monotone(phi in growth(), c in 0.01..10.0f64, x in 0.0..0.9f64) {
        // |c z (1 − x z)| ≤ c (1 + x)
        let small = move |z: &BallPoint<f64>| z.z1() * c * (C::new(1.0, 0.0) - z.z1() * x);
        let big = move |_: &BallPoint<f64>| C::new(c * (1.0 + x), 0.0);
        let ns = luxembourg_norm_fast(&small, &phi, rule()).unwrap().luxembourg_norm;
        let nb = luxembourg_norm_fast(&big, &phi, rule()).unwrap().luxembourg_norm;
        prop_assert!(ns <= nb * (1.0 + 1e-8));
    }

    #[test]
    fn log_atom_bloch_norm_in_band(r in 0.0..0.999f64, t in 0.0..6.3f64, s in 0.0..1.0f64) {
        let a = BallPoint::disc(C::from_polar(r, t)).unwrap();
        let nb = bloch_norm(&BlochFunction::log_atom(a, s), 1, 8).unwrap();
        let lo = 1.0 + s * 4f64.ln();
        prop_assert!(nb.value >= lo - 1e-12 && nb.value <= lo + 2.0 * s + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bloch_split_is_exact_and_total(u in 0.1..3.0f64, t in 0.0..6.3f64, h in -2.0..6.0f64, eta in 0.01..0.9f64) {
        let b = 8.0;
        let r = 1.0 - 10f64.powf(-u);
        let d = 1.0 - r * r;
        // height |c|/(1−|a|²)^b = 10^h, kept in the normalized regime |c| < 1
        let c = (10f64.powf(h) * d.powf(b)).min(0.5);
        let atom = Atom::new(BallPoint::disc(C::from_polar(r, t)).unwrap(), C::from_polar(c, t + 1.0), b).unwrap();
        let rule = rule_for_atoms(&[atom], 0.0, 1, 4).unwrap();
        let p = factor_atom_bloch(&atom, &G::power(1.0), 0.0, eta, &rule).unwrap();
        prop_assert!(p.product_residual <= 1e-9);
        let expected = if atom.height() <= 4.0 {
            BlochCase::SmallHeight
        } else if r * r <= 1.0 - eta {
            BlochCase::Interior
        } else {
            BlochCase::LogSplit
        };
        prop_assert_eq!(p.case, Some(expected));
        if expected != BlochCase::LogSplit {
            let is_one = matches!(&p.right, RightFactor::Bloch(th) if th.is_one());
            prop_assert!(is_one);
        }
    }

    #[test]
    fn two_orlicz_split_is_exact(u in 0.1..2.5f64, t in 0.0..6.3f64, c in 1e-4..1.0f64, s in 0.3..0.7f64) {
        let b = 8.0;
        let r = 1.0 - 10f64.powf(-u);
        let atom = Atom::new(BallPoint::disc(C::from_polar(r, t)).unwrap(), C::from_polar(c, -t), b).unwrap();
        let rule = rule_for_atoms(&[atom], 0.0, 1, 4).unwrap();
        let one = G::power(1.0);
        let p = factor_atom_two_orlicz(&atom, &G::power(0.5), &one, &one, s, 0.0, &rule).unwrap();
        prop_assert!(p.product_residual <= 1e-9);
    }
}

#[test]
fn ratio_non_increasing_gives_delta2_at_most_two() {
    for phi in [G::power(0.5), G::power(1.0), G::power_log(G::power(1.0))] {
        let grid = Grid::default();
        if phi.ratio_non_increasing(grid) {
            assert!(phi.check_delta2(grid).k <= 2.0 + 1e-9);
        }
    }
}
