use proptest::prelude::*;

use isotuple::classify::defect_profile;
use isotuple::generators::{random_commuting_instance, random_instance, Profile};
use isotuple::multiindex::{binomial, compositions, multinomial};
use isotuple::transforms::{
    delta, delta_superop, isosym_defect, isosym_defect_swapped, sigma_apply, sigma_power, triangle, triangle_scaled,
    triangle_superop, SigmaMode,
};
use isotuple::tuples::{adjoint_tuple, mix_by_unitary};
use isotuple::{CMatrix, OperatorTuple, Tolerance, C64};

fn close(a: &CMatrix, b: &CMatrix, scale: f64) -> bool {
    (a - b).fro_norm() <= 1e-10 * scale.max(1.0)
}

fn instance(seed: u64) -> (OperatorTuple, OperatorTuple, CMatrix) {
    random_commuting_instance(seed, 4, 3).unwrap()
}

/// Fourier matrix with extra phases on the rows.
fn phased_fourier(d: usize, phases: &[f64]) -> CMatrix {
    let norm = (d as f64).sqrt();
    CMatrix::from_fn(d, |j, k| {
        let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64 + phases[j];
        C64::from_polar(1.0 / norm, angle)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multinomials_sum_to_power(d in 1usize..=4, j in 0u32..=6) {
        let total: u128 = compositions(d, j).unwrap().iter().map(|a| multinomial(j, a).unwrap()).sum();
        prop_assert_eq!(total, (d as u128).pow(j));
    }

    #[test]
    fn composition_count_and_order(d in 1usize..=4, j in 0u32..=6) {
        let all = compositions(d, j).unwrap();
        let expected = binomial(j as u64 + d as u64 - 1, d as u64 - 1).unwrap();
        prop_assert_eq!(all.len() as u64, expected);
        prop_assert!(all.iter().all(|a| a.order() == j && a.len() == d));
        prop_assert!(all.windows(2).all(|w| w[0].entries() > w[1].entries()));
    }

    #[test]
    fn pascal_rule(m in 1u64..=40, j in 1u64..=40) {
        prop_assume!(j <= m);
        prop_assert_eq!(binomial(m, j).unwrap(), binomial(m - 1, j - 1).unwrap() + binomial(m - 1, j).unwrap());
    }

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>()) {
        let (a, _, _) = instance(seed);
        prop_assert_eq!(adjoint_tuple(&adjoint_tuple(&a)), a);
    }

    #[test]
    fn kron_norm_is_multiplicative(seed in any::<u64>()) {
        let (_, _, x) = instance(seed);
        let (_, _, y) = instance(seed.wrapping_add(1));
        let k = x.kron(&y);
        prop_assert!((k.fro_norm() - x.fro_norm() * y.fro_norm()).abs() <= 1e-12 * k.fro_norm().max(1.0));
    }

    #[test]
    fn iterate_matches_expand(seed in any::<u64>(), j in 0u32..=5) {
        let (a, b, x) = instance(seed);
        let it = sigma_power(&a, &b, &x, j, SigmaMode::Iterate).unwrap();
        let ex = sigma_power(&a, &b, &x, j, SigmaMode::Expand).unwrap();
        prop_assert!(close(&it, &ex, it.fro_norm()));
    }

    #[test]
    fn superoperator_agrees(seed in any::<u64>(), m in 0u32..=4) {
        let (a, b, x) = instance(seed);
        let fast = triangle_scaled(&a, &b, &x, m).unwrap();
        prop_assert!(close(&fast.value, &triangle_superop(&a, &b, &x, m).unwrap(), fast.scale));
        let d = delta(&a, &b, &x, m).unwrap();
        prop_assert!(close(&d, &delta_superop(&a, &b, &x, m).unwrap(), fast.scale.max(d.fro_norm()) * 4f64.powi(m as i32)));
    }

    #[test]
    fn telescoping(seed in any::<u64>(), m in 0u32..=4) {
        let (a, b, x) = instance(seed);
        let next = triangle_scaled(&a, &b, &x, m + 1).unwrap();
        let step = &triangle(&a, &b, &x, m).unwrap() - &triangle(&a, &b, &sigma_apply(&a, &b, &x).unwrap(), m).unwrap();
        prop_assert!(close(&next.value, &step, next.scale));
        let dn = delta(&a, &b, &x, m).unwrap();
        let dstep = &(&a.sum_matrix() * &dn) - &(&dn * &b.sum_matrix());
        let dnext = delta(&a, &b, &x, m + 1).unwrap();
        prop_assert!(close(&dnext, &dstep, dnext.fro_norm().max(dstep.fro_norm()) * 10.0));
    }

    #[test]
    fn order_of_defects_is_irrelevant(seed in any::<u64>(), m in 0u32..=3, n in 0u32..=3) {
        let (a, b, x) = instance(seed);
        let one = isosym_defect(&a, &b, &x, m, n).unwrap();
        let two = isosym_defect_swapped(&a, &b, &x, m, n).unwrap();
        prop_assert!(close(&one, &two, one.fro_norm().max(two.fro_norm()) * 100.0));
    }

    #[test]
    fn fixed_points_have_no_defect(angles in proptest::collection::vec(-3.0f64..3.0, 3), w in proptest::collection::vec(-2.0f64..2.0, 3), m in 1u32..=6) {
        let phases: Vec<C64> = angles.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let u = CMatrix::diagonal(&phases);
        let x = CMatrix::diagonal(&w.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
        let (a, b) = (OperatorTuple::single(u.adjoint()), OperatorTuple::single(u));
        prop_assert!(close(&sigma_apply(&a, &b, &x).unwrap(), &x, x.fro_norm()));
        prop_assert!(triangle_scaled(&a, &b, &x, m).unwrap().is_zero(&Tolerance::default()));
    }

    #[test]
    fn unitary_mixing_keeps_defects(seed in any::<u64>(), phases in proptest::collection::vec(-3.0f64..3.0, 3), m in 0u32..=3) {
        let (_, t, x) = instance(seed);
        let u = phased_fourier(t.d(), &phases[..t.d()]);
        let s = mix_by_unitary(&u, &t, &Tolerance::default()).unwrap();
        let before = triangle_scaled(&adjoint_tuple(&t), &t, &x, m).unwrap();
        let after = triangle(&adjoint_tuple(&s), &s, &x, m).unwrap();
        prop_assert!(close(&before.value, &after, before.scale));
    }

    #[test]
    fn pass_sets_are_upward_closed(seed in 0u64..10_000, p in 0usize..Profile::ALL.len()) {
        let bundle = random_instance(Profile::ALL[p], seed).unwrap();
        let json = serde_json::to_value(&bundle).unwrap();
        let data = &json["data"];
        let pick = |k: &str| serde_json::from_value::<OperatorTuple>(data[k].clone()).ok();
        let x = serde_json::from_value::<CMatrix>(data["x"].clone()).ok();
        if let (Some(a), Some(b), Some(x)) = (pick("a"), pick("b"), x) {
            let prof = defect_profile(&a, &b, &x, 12, &Tolerance::default()).unwrap();
            prop_assert_eq!(prof.anomaly_count(), 0);
        }
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), p in 0usize..Profile::ALL.len()) {
        let profile = Profile::ALL[p];
        prop_assert_eq!(random_instance(profile, seed).unwrap(), random_instance(profile, seed).unwrap());
    }
}
