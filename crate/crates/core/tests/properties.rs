mod common;

use std::f64::consts::PI;

use common::*;
use kawahara::bourgain::{
    bilinear_ratio, l6_ratio, random_sample, xsb_norm, ys_norm, zs_norm, SampleGrid,
};
use kawahara::cli::apply_override;
use kawahara::evolution::{absorbing_time, linear_propagate, step, Checkpoint, Nonlinearity, StepperConfig};
use kawahara::normal_form::{
    nonresonant_trilinear, nonresonant_trilinear_fast, normal_form_bilinear, resonant_pair, resonant_self,
};
use kawahara::resonance::{
    classify_resonant_triple, four_phase_factorization_check, kappa, quintic_identity_check, TripleClass,
};
use kawahara::spectral::{default_grid, nonlinear_term, to_physical, to_spectral};
use kawahara::{random_field, ConvolutionMode, PhysicalParams, SpectralField};
use proptest::prelude::*;
use serde_json::{json, Value};

fn field(max_k: usize) -> impl Strategy<Value = SpectralField> {
    (1..=max_k, 0.0..2.5f64, 0.1..2.0f64, any::<u64>()).prop_map(|(k, d, s, seed)| random_field(k, d, s, seed))
}

/// Field of `kmax` supported on `|k| <= support`.
fn supported(kmax: usize, support: usize, seed: u64) -> SpectralField {
    random_field(support, 1.0, 1.0, seed).resized(kmax)
}

fn nonresonant_params() -> impl Strategy<Value = PhysicalParams> {
    (prop_oneof![Just(1.0), Just(-1.0), Just(2.0), Just(0.5)], -3.0..3.0f64)
        .prop_filter_map("resonant", |(a, b)| PhysicalParams::new(a, b, 1.0).ok().filter(|p| p.is_nonresonant()))
}

fn sub(a: &SpectralField, b: &[C]) -> f64 {
    max_dev(a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nonlinearity_is_l2_orthogonal(u in field(32)) {
        let n = nonlinear_term(&u, ConvolutionMode::Fast);
        let scale = u.l2_norm() * n.l2_norm().max(1e-300);
        prop_assert!(u.inner(&n).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn fast_and_direct_products_agree(u in field(32)) {
        let fast = nonlinear_term(&u, ConvolutionMode::Fast);
        let direct = nonlinear_term(&u, ConvolutionMode::Direct);
        prop_assert!(sub(&fast, direct.coeffs()) < 1e-12);
    }

    #[test]
    fn parseval_on_the_grid(u in field(24)) {
        let nx = default_grid(u.kmax());
        let xs = to_physical(&u, nx).unwrap();
        let mean_sq = xs.iter().map(|v| v * v).sum::<f64>() / nx as f64;
        prop_assert!((mean_sq - u.l2_norm().powi(2)).abs() <= 1e-10 * mean_sq.max(1e-300));
        let back = to_spectral(&xs, u.kmax()).unwrap();
        prop_assert!(sub(&back, u.coeffs()) <= 1e-12 * u.l2_norm().max(1.0));
    }

    #[test]
    fn undamped_flow_is_an_isometry(u in field(32), t in -5.0..5.0f64, s in 0.0..3.0f64, p in nonresonant_params()) {
        let v = linear_propagate(&u, t, &p, false);
        prop_assert!((v.sobolev_norm(s) - u.sobolev_norm(s)).abs() <= 1e-12 * u.sobolev_norm(s));
    }

    #[test]
    fn disabled_nonlinearity_steps_exactly(u in field(16), dt in 1e-4..0.1f64, p in nonresonant_params()) {
        let cfg = StepperConfig::new(dt, u.kmax()).unwrap().with_nonlinearity(Nonlinearity::Disabled);
        let next = step(&u, &SpectralField::zeros(u.kmax()), &cfg, &p).unwrap();
        let exact = linear_propagate(&u, dt, &p, true);
        prop_assert!(sub(&next, exact.coeffs()) <= 1e-14 * u.l2_norm().max(1.0));
    }

    #[test]
    fn resonant_self_is_cubic(u in field(16), lambda in -3.0..3.0f64, p in nonresonant_params()) {
        let a = resonant_self(&u.scaled(lambda), &p).unwrap();
        let b = resonant_self(&u, &p).unwrap().scaled(lambda.powi(3));
        prop_assert!(sub(&a, b.coeffs()) <= 1e-13 * b.l2_norm().max(1e-300) + 1e-300);
    }

    #[test]
    fn operators_commute_with_truncation(kmax in 3usize..12, seed in any::<u64>(), p in nonresonant_params()) {
        let support = kmax / 3;
        let small = supported(kmax, support, seed);
        let large = small.resized(3 * kmax);
        let restrict = |v: SpectralField| v.resized(support);
        let pairs: [(SpectralField, SpectralField); 4] = [
            (normal_form_bilinear(&small, &small, &p).unwrap(), normal_form_bilinear(&large, &large, &p).unwrap()),
            (resonant_self(&small, &p).unwrap(), resonant_self(&large, &p).unwrap()),
            (resonant_pair(&small, &p).unwrap(), resonant_pair(&large, &p).unwrap()),
            (nonresonant_trilinear(&small, &p).unwrap(), nonresonant_trilinear(&large, &p).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!(sub(&restrict(a), restrict(b).coeffs()) < 1e-12);
        }
    }

    #[test]
    fn fast_remainder_matches_literal(u in field(12), p in nonresonant_params()) {
        let a = nonresonant_trilinear(&u, &p).unwrap();
        let b = nonresonant_trilinear_fast(&u, &p).unwrap();
        prop_assert!(sub(&a, b.coeffs()) < 1e-12);
    }

    /// `L B(u,u) - B(Lu,u) - B(u,Lu) = -N(u)` with `L = -i phase`.
    #[test]
    fn bilinear_resolves_the_quadratic_term(seed in any::<u64>(), kmax in 2usize..16, p in nonresonant_params()) {
        let u = supported(kmax, kmax / 2, seed);
        let lu = u.multiplied(|k| C::new(0.0, -p.phase(k)));
        let b = normal_form_bilinear(&u, &u, &p).unwrap();
        let lhs = b.multiplied(|k| C::new(0.0, -p.phase(k)))
            .sub(&normal_form_bilinear(&lu, &u, &p).unwrap())
            .sub(&normal_form_bilinear(&u, &lu, &p).unwrap());
        let n = nonlinear_term(&u, ConvolutionMode::Direct).scaled(-1.0);
        prop_assert!(sub(&lhs, n.coeffs()) <= 1e-12 * n.l2_norm().max(1.0));
    }

    /// The cubic term of the normal form splits as `-2 B(u, N(u)) = rho + sigma + R`
    /// when nothing is lost to truncation.
    #[test]
    fn cubic_terms_split(seed in any::<u64>(), kmax in 3usize..15, p in nonresonant_params()) {
        let u = supported(kmax, kmax / 3, seed);
        let n = nonlinear_term(&u, ConvolutionMode::Direct);
        let lhs = normal_form_bilinear(&u, &n, &p).unwrap().scaled(-2.0);
        let rhs = resonant_self(&u, &p).unwrap()
            .add(&resonant_pair(&u, &p).unwrap())
            .add(&nonresonant_trilinear(&u, &p).unwrap());
        prop_assert!(sub(&lhs, rhs.coeffs()) <= 1e-12 * rhs.l2_norm().max(1.0));
    }

    #[test]
    fn integer_identities(k1 in -5000i64..5000, k2 in -5000i64..5000, k3 in -5000i64..5000,
                          m1 in -1000000i64..1000000, m2 in -1000000i64..1000000, m3 in -1000000i64..1000000) {
        prop_assert!(quintic_identity_check(k1, k2).unwrap());
        let p = PhysicalParams::new(1.0, 0.5, 1.0).unwrap();
        let k = [k1, k2, k3, -(k1 + k2 + k3)];
        let m = [m1, m2, m3, -(m1 + m2 + m3)];
        prop_assert!(four_phase_factorization_check(k, m, &p).unwrap());
    }

    #[test]
    fn triple_classes_follow_pairwise_sums(k1 in -20i64..20, k2 in -20i64..20, k3 in -20i64..20) {
        let class = classify_resonant_triple(k1, k2, k3);
        let degenerate = k1 * k2 * k3 == 0 || k2 + k3 == 0;
        prop_assert_eq!(class == TripleClass::Degenerate, degenerate);
        if class == TripleClass::Nonresonant {
            prop_assert!((k1 + k2) * (k3 + k1) != 0);
            // nonresonant triples carry a nonvanishing cubic phase against their sum
            let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
            let total = kappa(k1, k2, k3, &p) + p.phase(k1 + k2 + k3);
            prop_assert!(total != 0.0);
        }
    }

    #[test]
    fn absorbing_time_is_sharp(g in 0.0..20.0f64, f in 0.01..5.0f64, gamma in 0.05..5.0f64) {
        let t = absorbing_time(g, f, gamma).unwrap();
        let bound = |t: f64| (-gamma * t).exp() * g + f / gamma * (1.0 - (-gamma * t).exp());
        let ball = 2.0 * f / gamma;
        prop_assert!(bound(t) <= ball * (1.0 + 1e-12));
        if t > 0.0 {
            prop_assert!(bound(t * (1.0 - 1e-6)) > ball);
        }
    }

    #[test]
    fn spectrum_and_checkpoint_round_trip(u in field(16), t in 0.0..100.0f64) {
        let back = SpectralField::from_json_str(&u.to_json_string()).unwrap();
        prop_assert_eq!(&back, &u);
        let c = Checkpoint { t, params: PhysicalParams::new(1.0, 0.0, 1.0).unwrap(), field: u, config_digest: None };
        prop_assert_eq!(Checkpoint::from_json_str(&c.to_json_string()).unwrap(), c);
    }

    #[test]
    fn overrides_set_exactly_one_key(key in "[a-z]{1,6}(\\.[a-z]{1,6}){0,2}", n in any::<i32>()) {
        let mut v = json!({});
        apply_override(&mut v, &format!("{key}={n}")).unwrap();
        let mut node = &v;
        for seg in key.split('.') {
            prop_assert_eq!(node.as_object().unwrap().len(), 1);
            node = &node[seg];
        }
        prop_assert_eq!(node, &Value::from(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bilinear_ratio_is_scale_free(seed in 0u64..1000, lambda in 0.1..10.0f64, mu in -10.0..-0.1f64) {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let grid = SampleGrid::default();
        let u1 = random_sample(6, &grid, seed, 0, &p).unwrap();
        let u2 = random_sample(6, &grid, seed, 1, &p).unwrap();
        let a = bilinear_ratio(&u1, &u2, 0.0, &p).unwrap();
        let b = bilinear_ratio(&u1.scaled(lambda), &u2.scaled(mu), 0.0, &p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn restricted_norm_pieces(seed in 0u64..1000, s in 0.0..2.0f64) {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let u = random_sample(6, &SampleGrid::default(), seed, 0, &p).unwrap();
        prop_assert!((xsb_norm(&u, 0.0, 0.0, &p) - u.space_time_l2()).abs() <= 1e-12 * u.space_time_l2());
        prop_assert!(ys_norm(&u, s, &p) >= xsb_norm(&u, s, 0.5, &p));
        prop_assert!(zs_norm(&u, s, &p) >= xsb_norm(&u, s, -0.5, &p));
        prop_assert!(xsb_norm(&u, s, 0.1, &p) <= xsb_norm(&u, s, 0.4, &p));
    }

    #[test]
    fn l6_ratio_ignores_time_shifts(seed in any::<u64>(), t0 in 0.0..10.0f64, kmax in 1usize..6) {
        let p = PhysicalParams::new(1.0, 0.0, 1.0).unwrap();
        let h = random_field(kmax, 0.0, 1.0, seed);
        let a = l6_ratio(&h, 0.1, 2.0 * PI, &p).unwrap();
        let b = l6_ratio(&linear_propagate(&h, t0, &p, false), 0.1, 2.0 * PI, &p).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }
}
