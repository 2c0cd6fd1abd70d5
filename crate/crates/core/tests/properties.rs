use std::f64::consts::PI;

use markov_pade::cubature::{apply, apply_via_contour, build_cubature, exactness_report, positivity_check, random_polynomial};
use markov_pade::harmonics::{dimension, eval_y, indices, legendre, surface_area};
use markov_pade::markov::{coefficient_table, eval_kernel, eval_series, homog_lift, DirectionalMoments};
use markov_pade::measures::{Measure, MeasureKind, RadialFunction, RadialMeasure};
use markov_pade::pade::{atomic_moments, choose_r1, gauss_rule, lift_a_mono, pade_pair, PadeMethod};
use markov_pade::polyalg::laurent_product_head;
use markov_pade::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn unit_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.01)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
}

fn atoms_strategy(d: usize) -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
    prop::collection::vec((prop::collection::vec(-0.55f64..0.55, d), -1.0f64..1.0), 1..=5)
}

fn polar(w0: f64, w1: f64) -> Measure {
    Measure::new(
        2,
        1.0,
        MeasureKind::PolarDensity {
            w0: RadialFunction::lebesgue(0.0, 1.0).with_scale(w0),
            w1: RadialFunction::lebesgue(0.0, 1.0).with_scale(w1),
            assert_hankel_positive: true,
        },
    )
    .unwrap()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn homogeneous_lift_scales_along_rays(atoms in atoms_strategy(2), theta in unit_strategy(2), rho in 0.1f64..3.0, l in 0usize..6) {
        let table = coefficient_table(&Measure::discrete(2, 1.0, atoms).unwrap(), 6).unwrap();
        let h = homog_lift(&table, l).unwrap();
        let y: Vec<f64> = theta.iter().map(|t| rho * t).collect();
        let a = h.eval_scaled(Complex64::new(rho, 0.0), &theta).unwrap();
        let b = h.eval(&y).unwrap();
        prop_assert!((a.re - b).abs() <= 1e-12 * b.abs().max(1e-300) + 1e-300);
        prop_assert!(a.im == 0.0);
    }

    #[test]
    fn series_equals_distributed_moment_double_sum(
        d in 2usize..=3,
        seed in 0u64..1000,
        theta_seed in 0u64..1000,
        arg in 0.0f64..(2.0 * PI),
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let atoms: Vec<(Vec<f64>, f64)> = (0..4)
            .map(|_| ((0..d).map(|_| rand::Rng::gen_range(&mut rng, -0.5..0.5)).collect(), rand::Rng::gen_range(&mut rng, -1.0..1.0)))
            .collect();
        let mut rng = StdRng::seed_from_u64(theta_seed);
        let raw: Vec<f64> = (0..d).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let theta: Vec<f64> = raw.iter().map(|v| v / norm(&raw)).collect();
        let mu = Measure::discrete(d, 1.0, atoms).unwrap();
        let lmax = 12;
        let table = coefficient_table(&mu, lmax).unwrap();
        let zeta = Complex64::from_polar(1.8, arg);
        let (series, _) = eval_series(&table, zeta, &theta, lmax).unwrap();
        let moments = mu.distributed_moments(lmax).unwrap();
        let mut direct = Complex64::new(0.0, 0.0);
        for ((s, k, m), c) in &moments {
            if 2 * s + k <= lmax {
                direct += c * eval_y(d, *k, *m, &theta).unwrap() * zeta.powi(-(2 * *s as i32) - *k as i32 - 1);
            }
        }
        prop_assert!((series - direct).norm() <= 1e-13 * direct.norm().max(1.0));
    }

    #[test]
    fn coefficient_functions_follow_the_addition_theorem(d in 2usize..=3, seed in 0u64..1000, theta_seed in 0u64..1000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let atoms: Vec<(Vec<f64>, f64)> = (0..3)
            .map(|_| ((0..d).map(|_| rand::Rng::gen_range(&mut rng, -0.5..0.5)).collect(), rand::Rng::gen_range(&mut rng, -1.0..1.0)))
            .collect();
        let mut rng = StdRng::seed_from_u64(theta_seed);
        let raw: Vec<f64> = (0..d).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let theta: Vec<f64> = raw.iter().map(|v| v / norm(&raw)).collect();
        let lmax = 8;
        let table = coefficient_table(&Measure::discrete(d, 1.0, atoms.clone()).unwrap(), lmax).unwrap();
        let dm = table.directional(&theta).unwrap();
        for l in 0..=lmax {
            // f_l(θ) = Σ w |x|^l Σ_{k ≡ l (2)} (a_k / ω_d) P_k(⟨x/|x|, θ⟩).
            let mut expect = 0.0;
            for (x, w) in &atoms {
                let r = norm(x);
                let cos = x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>() / r;
                for k in (l % 2..=l).step_by(2) {
                    expect += w * r.powi(l as i32) * dimension(d, k) as f64 / surface_area(d) * legendre(d, k, cos);
                }
            }
            let got = dm.values.values()[l];
            prop_assert!((got - expect).abs() <= 1e-10 * expect.abs().max(1e-3), "l = {} {} {}", l, got, expect);
        }
    }

    #[test]
    fn parity_structure_is_exact(atoms in atoms_strategy(3)) {
        let table = coefficient_table(&Measure::discrete(3, 1.0, atoms).unwrap(), 9).unwrap();
        for l in 0..=9 {
            for ((k, _), _) in table.entry(l).coefficients() {
                prop_assert!(*k <= l && (l - k) % 2 == 0);
            }
        }
    }

    #[test]
    fn series_and_kernel_agree_in_three_dimensions(atoms in atoms_strategy(3), theta in unit_strategy(3), arg in 0.0f64..(2.0 * PI)) {
        let mu = Measure::discrete(3, 1.0, atoms).unwrap();
        let table = coefficient_table(&mu, 40).unwrap();
        let zeta = Complex64::from_polar(2.0, arg);
        let (series, tail) = eval_series(&table, zeta, &theta, 40).unwrap();
        let kernel = eval_kernel(&mu, zeta, &theta).unwrap();
        prop_assert!((series - kernel).norm() <= tail, "{} > {}", (series - kernel).norm(), tail);
    }

    #[test]
    fn determinant_and_linear_solve_pairs_share_the_approximant(
        atoms in prop::collection::vec((-0.9f64..0.9, 0.1f64..1.0), 5..=6),
        n in 1usize..=4,
        seed in 0u64..1000,
    ) {
        let f = atomic_moments(&atoms, 2 * n);
        prop_assume!(markov_pade::polyalg::hankel_det(&f, n).unwrap().abs() > 1e-6 * f.scale().powi(n as i32));
        let dm = DirectionalMoments::new(vec![1.0, 0.0], f.values().to_vec());
        let a = pade_pair(&dm, n, PadeMethod::Determinant).unwrap();
        let b = pade_pair(&dm, n, PadeMethod::LinearSolve).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..10 {
            let z = Complex64::from_polar(rand::Rng::gen_range(&mut rng, 1.5..3.0), rand::Rng::gen_range(&mut rng, 0.0..2.0 * PI));
            let (x, y) = (a.approximant(z), b.approximant(z));
            prop_assert!((x - y).norm() <= 1e-9 * y.norm());
        }
    }

    #[test]
    fn gauss_rules_reproduce_moments(atoms in prop::collection::vec((-0.9f64..0.9, 0.1f64..1.0), 4..=6), n in 1usize..=3) {
        let mut xs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        xs.sort_by(f64::total_cmp);
        prop_assume!(xs.windows(2).all(|w| w[1] - w[0] > 0.05));
        let f = atomic_moments(&atoms, 2 * n);
        let rule = gauss_rule(&DirectionalMoments::new(vec![1.0, 0.0], f.values().to_vec()), n, 1.0).unwrap();
        for l in 0..2 * n {
            let got: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, a)| a * x.powi(l as i32)).sum();
            let want = f.values()[l];
            prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(f.scale()));
        }
        prop_assert!(rule.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn radial_sequences_are_exact_once_n_covers_the_support(radii in prop::collection::vec((0.1f64..0.95, 0.2f64..1.0), 1..=2)) {
        let mut rs: Vec<f64> = radii.iter().map(|r| r.0).collect();
        rs.sort_by(f64::total_cmp);
        prop_assume!(rs.windows(2).all(|w| w[1] - w[0] > 0.1));
        let mu = Measure::new(2, 1.0, MeasureKind::RadialProduct { radial: RadialMeasure::Atoms(radii.clone()) }).unwrap();
        let k = radii.len();
        let table = coefficient_table(&mu, 8 * k).unwrap();
        let dm = table.directional(&[0.6, 0.8]).unwrap();
        let pair = pade_pair(&dm, 2 * k, PadeMethod::LinearSolve).unwrap();
        let head = laurent_product_head(&pair.p, &dm.values, 8 * k + 1 - 2 * k).unwrap();
        prop_assert!(head.iter().all(|c| c.norm() <= 1e-12 * dm.values.scale()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn cubature_invariants_for_polar_densities(w0 in 0.5f64..2.0, ratio in -1.0f64..1.0, n in 1usize..=5, seed in 0u64..1000) {
        let mu = polar(w0, ratio * w0);
        let table = coefficient_table(&mu, 2 * n).unwrap();
        let rule = build_cubature(&table, n, None, true).unwrap();
        prop_assert!(rule.points().iter().all(|p| norm(&p.x) < mu.radius()));
        let report = exactness_report(&rule, &mu).unwrap();
        prop_assert!(report.max_rel_error <= 1e-8, "exactness {}", report.max_rel_error);
        let check = positivity_check(&rule, &table, 100, seed).unwrap();
        prop_assert!(check.violations.is_empty() && check.identity_failures == 0);
        let r1 = choose_r1(&rule.pairs, mu.radius()).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        for degree in 0..2 * n {
            let u = random_polynomial(&mut rng, 2, degree);
            let a = apply(&rule, &u);
            let c = apply_via_contour(&rule, &u, r1, 4 * (degree + n) + 64).unwrap();
            prop_assert!(!c.pole_warning);
            let reference = a.abs().max(mu.total_variation() * u.coefficient_norm());
            prop_assert!((a - c.value).abs() <= 1e-7 * reference, "{} vs {}", a, c.value);
        }
    }

    #[test]
    fn cubature_annihilates_multiples_of_the_lift(w0 in 0.5f64..2.0, ratio in -1.0f64..1.0, n in 1usize..=3, seed in 0u64..1000) {
        let mu = polar(w0, ratio * w0);
        let table = coefficient_table(&mu, 2 * n).unwrap();
        let rule = build_cubature(&table, n, None, true).unwrap();
        let a = lift_a_mono(&table, n).unwrap();
        let a = a.scaled(1.0 / a.max_abs_coefficient());
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..20 {
            let degree = rand::Rng::gen_range(&mut rng, 0..=3);
            let v = random_polynomial(&mut rng, 2, degree);
            let value = apply(&rule, &(&a * &v));
            prop_assert!(value.abs() <= 1e-8 * rule.scale, "{}", value);
        }
    }
}

#[test]
fn sphere_rules_integrate_harmonic_products() {
    for d in [2, 3] {
        let rule = markov_pade::harmonics::sphere_rule(d, 9).unwrap();
        for (k, m) in indices(d, 4) {
            let v = rule.integrate(|x| eval_y(d, k, m, x).unwrap().powi(2));
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn lebesgue_radial_part_gives_odd_reciprocals() {
    // σ ⊗ dθ with σ Lebesgue on [0, 1]: f_{2l} = ∫ r^{2l} dr = 1/(2l+1), f_{2l+1} = 0.
    for d in [2, 3] {
        let mu = Measure::new(d, 1.0, MeasureKind::RadialProduct { radial: RadialMeasure::Density(RadialFunction::lebesgue(0.0, 1.0)) })
            .unwrap();
        let table = coefficient_table(&mu, 10).unwrap();
        let theta: Vec<f64> = if d == 2 { vec![0.6, 0.8] } else { vec![0.48, 0.64, 0.6] };
        for (l, v) in table.directional(&theta).unwrap().values.values().iter().enumerate() {
            let exact = if l % 2 == 0 { 1.0 / (l as f64 + 1.0) } else { 0.0 };
            assert!((v - exact).abs() < 1e-12, "d = {d}, l = {l}: {v}");
        }
    }
}
