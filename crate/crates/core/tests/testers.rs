use distproof::dist::GrainDistribution;
use distproof::rational::{ratio, Rational};
use distproof::rng::{child_seed, stream_rng, streams};
use distproof::testers::{
    collision_count, exact_tail_count, granular_count, identity_test, mix_pdf, theta, uniformity_test, IdentityParams,
    LocalOracle,
};
use distproof::workload::at_distance;
use num_traits::One;
use proptest::prelude::*;

fn pdfs() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0u64..100, 1..64)
        .prop_filter("positive mass", |c| c.iter().any(|&x| x > 0))
        .prop_map(|c| {
            let g: u64 = c.iter().sum();
            c.iter().map(|&x| ratio(x.into(), g.into())).collect()
        })
}

proptest! {
    #[test]
    fn granularization_identities(p in pdfs()) {
        let n = p.len();
        let m = 6 * n as u64;
        let mut kept = 0u64;
        for &pdf in &p {
            let q = mix_pdf(pdf, n);
            let t = theta(q, m);
            prop_assert!(t >= ratio(2, 3) && t <= Rational::one());
            let mx = t * q * Rational::from_integer(m.into());
            prop_assert!(mx.is_integer());
            prop_assert_eq!(mx.to_integer(), u128::from(granular_count(pdf, n)));
            kept += granular_count(pdf, n);
        }
        prop_assert_eq!(kept + exact_tail_count(&p).unwrap(), m);
    }

    #[test]
    fn collision_count_matches_pair_count(mut keys in prop::collection::vec(0u64..20, 0..60)) {
        let naive = (0..keys.len()).flat_map(|i| (0..i).map(move |j| (i, j))).filter(|&(i, j)| keys[i] == keys[j]).count();
        prop_assert_eq!(collision_count(&mut keys), naive as u64);
    }
}

#[test]
fn collision_tester_on_distinct_keys_and_a_point_mass() {
    let m = 1000;
    let mut spread: Vec<u64> = (0..500).collect();
    assert!(uniformity_test(&mut spread, m, ratio(1, 4)).unwrap().accept);
    let mut point = vec![3u64; 500];
    assert!(!uniformity_test(&mut point, m, ratio(1, 4)).unwrap().accept);
    assert!(uniformity_test(&mut [1], m, ratio(1, 4)).is_err());
}

#[test]
fn identity_test_accepts_equal_and_rejects_far() {
    let params = IdentityParams::default();
    let eps = ratio(1, 4);
    let (mut same, mut far) = (0, 0);
    for t in 0..20 {
        let s = child_seed(5, t);
        let mut w = stream_rng(s, streams::WORKLOAD);
        let q = GrainDistribution::random(200, 1 << 20, &mut w).unwrap();
        let d = at_distance(&q, ratio(1, 2), &mut w).unwrap();
        let mut rng = stream_rng(s, streams::VERIFIER);
        let a = identity_test(&mut LocalOracle::new(&q), &q, eps, &params, &mut rng).unwrap();
        let b = identity_test(&mut LocalOracle::new(&q), &d, eps, &params, &mut rng).unwrap();
        same += u32::from(a.accept);
        far += u32::from(!b.accept);
        assert!(a.d_samples > 0 && a.collisions <= a.pairs as u64);
    }
    assert!(same >= 17, "{same}");
    assert!(far >= 19, "{far}");
}

#[test]
fn tail_of_the_uniform_distribution() {
    // q'(x) = 1/N, m q'(x) = 6 exactly, so nothing is left for the extra element
    let u = vec![ratio(1, 7); 7];
    assert_eq!(exact_tail_count(&u).unwrap(), 0);
}
