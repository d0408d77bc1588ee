use bergman_orlicz::atoms::*;
use bergman_orlicz::geometry::{BallPoint, JointLattice};
use bergman_orlicz::growth::GrowthFunction;
use bergman_orlicz::quad::{luxembourg_norm_fast, modular, RuleSpec};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type G = GrowthFunction<f64>;

#[test]
fn concave_synthesis_is_dominated_by_the_coefficient_modular() {
    let phi = G::power(0.5);
    let joint = JointLattice::build(0.25, 0.9, 1).unwrap();
    let centers = joint.coarse.centers.clone();
    let rng = ChaCha8Rng::seed_from_u64(3);
    let mut constants = Vec::new();
    for res in [8, 16] {
        let mut rng_k = rng.clone();
        let rule = RuleSpec::new(0.0, 1, res).with_foci(centers.iter().copied()).build().unwrap();
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let atoms: Vec<Atom<f64>> = centers
                .iter()
                .map(|a| {
                    let d: f64 = 1.0 - a.norm_sq();
                    let c = C::from_polar(rng_k.gen_range(0.0..1.0f64) * d.powf(6.0), rng_k.gen_range(0.0..6.3));
                    Atom::new(*a, c, 8.0).unwrap()
                })
                .collect();
            let s = AtomicSeries::new(atoms, 0.0, phi.clone(), 1, 8.0).unwrap();
            let m = modular(&|z: &BallPoint<f64>| s.eval(z), &phi, &rule).unwrap();
            worst = worst.max(m / s.coefficient_modular);
        }
        constants.push(worst);
    }
    assert!((constants[1] / constants[0] - 1.0).abs() < 1e-2, "{constants:?}");
    assert!(constants[0] < 10.0);
}

#[test]
fn decomposition_norm_matches_sequence_quasinorm() {
    let phi = G::power(1.0);
    let joint = JointLattice::build(0.25, 0.9, 1).unwrap();
    let op = SamplingOperator::new(&joint, 8.0, BetaMode::Concave, 0.0, 16).unwrap();
    let mut ratios = Vec::new();
    for f in ["constant:1", "atom:0.9,1", "poly:1,1,-0.5,0.3"] {
        let f: TestFunction<f64> = f.parse().unwrap();
        let rule = RuleSpec::new(0.0, 1, 16).with_foci(f.foci(1)).build().unwrap();
        let d = neumann_decompose(&|z: &BallPoint<f64>| f.eval(z), &op, &phi, &rule, &NeumannConfig::default()).unwrap();
        let norm = luxembourg_norm_fast(&|z: &BallPoint<f64>| f.eval(z), &phi, &rule).unwrap().luxembourg_norm;
        ratios.push(norm / sequence_quasinorm(&d.series).unwrap().value);
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn contraction_improves_as_eta_shrinks() {
    let phi = G::power(1.0);
    let f: TestFunction<f64> = "atom:0.9,1".parse().unwrap();
    let rule = RuleSpec::new(0.0, 1, 16).with_foci(f.foci(1)).build().unwrap();
    let mut rhos = Vec::new();
    for eta in [0.5, 0.25, 0.125] {
        let joint = JointLattice::build(eta, 0.9, 1).unwrap();
        let op = SamplingOperator::new(&joint, 8.0, BetaMode::Concave, 0.0, 16).unwrap();
        let cfg = NeumannConfig { max_iters: 60, tol: 1e-5, initial: None, keep_unconverged: false };
        match neumann_decompose(&|z: &BallPoint<f64>| f.eval(z), &op, &phi, &rule, &cfg) {
            Ok(d) => rhos.push(d.contraction.unwrap()),
            Err(bergman_orlicz::error::Error::NotConverged { history, .. }) => {
                let (rho, _) = tail_contraction(&history);
                rhos.push(rho.unwrap());
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(rhos[0] > rhos[1] && rhos[1] > rhos[2], "{rhos:?}");
}

#[test]
fn mean_value_constant_is_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let points: Vec<BallPoint<f64>> = (0..100)
        .map(|_| BallPoint::disc(C::from_polar(1.0 - 10f64.powf(-rng.gen_range(0.0..2.5)), rng.gen_range(0.0..6.3))).unwrap())
        .collect();
    let g = |z: &BallPoint<f64>| (C::new(1.0, 0.0) - z.z1() * 0.95).inv().powf(3.0);
    let c1 = mean_value_constant(&g, &points, 0.5, 0.0, 16).unwrap();
    let c2 = mean_value_constant(&g, &points, 0.5, 0.0, 32).unwrap();
    assert!(c1.is_finite() && c1 >= 1.0 - 1e-9);
    assert!((c2 / c1 - 1.0).abs() < 1e-2, "{c1} vs {c2}");
}
