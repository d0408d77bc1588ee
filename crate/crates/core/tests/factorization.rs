use bergman_orlicz::atoms::{Atom, AtomicSeries};
use bergman_orlicz::factor::*;
use bergman_orlicz::geometry::BallPoint;
use bergman_orlicz::growth::GrowthFunction;
use bergman_orlicz::quad::{modular, RuleSpec};
use num_complex::Complex64 as C;

type G = GrowthFunction<f64>;

fn rule_at(x: f64, res: usize) -> bergman_orlicz::quad::QuadratureRule<f64> {
    RuleSpec::new(0.0, 1, res).with_foci([BallPoint::real(x, 1).unwrap()]).build().unwrap()
}

#[test]
fn log_weighted_atom_two_sided_estimate() {
    for (phi, band) in [(G::power(0.5), 1.1), (G::power_log(G::power(1.0)), 3.0)] {
        let mut per_radius = Vec::new();
        for x in [0.9, 0.99, 0.999] {
            let rule = rule_at(x, 12);
            let a = BallPoint::real(x, 1).unwrap();
            let mut c = 1.0f64;
            for lam in [1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
                let e = log_weighted_atom_estimate(&a, C::new(lam, 0.0), 8.0, &phi, 0.0, &rule).unwrap();
                c = c.max(e.ratio).max(1.0 / e.ratio);
            }
            per_radius.push(c);
        }
        assert!(per_radius.iter().all(|&c| c <= band), "{per_radius:?}");
    }
}

#[test]
fn case_three_example_near_the_boundary() {
    // |a|² = 0.999 with |c| = (1−|a|²)^{b−1}, so the height is 1000
    let b = 8.0;
    let x = 0.999f64.sqrt();
    let d = 1.0 - x * x;
    let atom = Atom::new(BallPoint::real(x, 1).unwrap(), C::new(d.powf(b - 1.0), 0.0), b).unwrap();
    let phi = G::power(1.0);
    let rule = rule_at(x, 12);
    let p = factor_atom_bloch(&atom, &phi, 0.0, ETA_THRESHOLD, &rule).unwrap();
    assert_eq!(p.case, Some(BlochCase::LogSplit));
    assert!(p.product_residual <= 1e-12);
    let delta = log_split_delta(&atom);
    let formula = d.powi(2) * atom.coefficient.norm() / ((1.0 - delta) * d.powf(b) * (4.0 / d).ln());
    let ratio = p.left_modular / formula;
    assert!(ratio > 0.5 && ratio < 2.0, "{ratio}");
}

#[test]
fn single_small_atom_series_reduces_to_one_term() {
    let phi = G::power(1.0);
    let psi = G::power_log(phi.clone());
    let atom = Atom::new(BallPoint::real(0.5, 1).unwrap(), C::new(0.01, 0.0), 8.0).unwrap();
    let series = AtomicSeries::new(vec![atom], 0.0, psi.clone(), 1, 8.0).unwrap();
    let f = factor_series_bloch(&series, &phi, 0.0, ETA_THRESHOLD, 12).unwrap();
    assert_eq!(f.pairs.len(), 1);
    assert_eq!(f.pairs[0].case, Some(BlochCase::SmallHeight));
    let rule = rule_for_atoms(&[atom], 0.0, 1, 12).unwrap();
    let g = |z: &BallPoint<f64>| atom.eval(z);
    let direct = modular(&g, &psi, &rule).unwrap() / modular(&g, &phi, &rule).unwrap();
    assert!((f.ratio_psi_to_modular / direct - 1.0).abs() < 1e-8);
    assert_eq!(f.reconstruction_residual, 0.0);
}

#[test]
fn series_requires_power_log_growth() {
    let phi = G::power(1.0);
    let atom = Atom::new(BallPoint::real(0.5, 1).unwrap(), C::new(0.01, 0.0), 8.0).unwrap();
    let series = AtomicSeries::new(vec![atom], 0.0, phi.clone(), 1, 8.0).unwrap();
    assert!(factor_series_bloch(&series, &phi, 0.0, ETA_THRESHOLD, 8).is_err());
}

#[test]
fn single_atom_two_orlicz_series_is_the_pair() {
    let half = G::power(0.5);
    let one = G::power(1.0);
    let atom = Atom::new(BallPoint::real(0.9, 1).unwrap(), C::new(1e-3, 2e-3), 8.0).unwrap();
    let series = AtomicSeries::new(vec![atom], 0.0, half.clone(), 1, 8.0).unwrap();
    let f = factor_series_two_orlicz(&series, &one, &one, 0.5, 12).unwrap();
    let rule = rule_for_atoms(&[atom], 0.0, 1, 12).unwrap();
    let p = factor_atom_two_orlicz(&atom, &half, &one, &one, 0.5, 0.0, &rule).unwrap();
    assert!((f.sum_norm_products / (p.left_norm * p.right_norm) - 1.0).abs() < 1e-12);
    // per-factor bound against the closed-form size
    for (m, formula) in [(p.left_norm, p.left_formula.unwrap()), (p.right_norm, p.right_formula.unwrap())] {
        let r = m / formula;
        assert!(r > 0.2 && r < 5.0, "{r}");
    }
}

#[test]
fn atom_times_log_atom_product_is_stable_in_the_center() {
    let phi = G::power(0.5);
    let psi = G::power_log(phi.clone());
    let mut ratios = Vec::new();
    for x in [0.9f64, 0.99] {
        let a = BallPoint::real(x, 1).unwrap();
        let atom = Atom::new(a, C::new((1.0 - x * x).powf(4.0), 0.0), 8.0).unwrap();
        let theta = BlochFunction::log_atom(a, 1.0);
        let rule = rule_at(x, 12);
        let f = |z: &BallPoint<f64>| atom.eval(z);
        let r = product_norm_check_bloch(&f, &theta, &phi, &psi, &rule).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        ratios.push(r.ratio);
    }
    assert!(ratios[1] / ratios[0] < 2.0 && ratios[0] / ratios[1] < 2.0, "{ratios:?}");
}
