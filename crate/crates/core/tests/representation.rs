use distproof::dist::{tv_distance, GrainDistribution};
use distproof::properties::FixedTarget;
use distproof::rational::{ratio, Rational};
use distproof::representation::{
    build_representation, hamming_block_distance, hamming_symbol_distance, query_block, reconstruct_distribution,
    test_pi, BlockCode, RepresentationString,
};
use num_traits::Zero;
use proptest::prelude::*;

/// Two distributions over the same domain with the same number of grains.
fn pair() -> impl Strategy<Value = (GrainDistribution, GrainDistribution)> {
    (2usize..40, 1u64..200).prop_flat_map(|(n, g)| {
        let one = prop::collection::vec(0u64..1000, n).prop_map(move |w| spread(&w, g));
        (one.clone(), one)
    })
}

/// Counts proportional to `w` summing to `g`, remainders to the first elements.
fn spread(w: &[u64], g: u64) -> GrainDistribution {
    let total: u64 = w.iter().sum::<u64>().max(1);
    let mut c: Vec<u64> = w.iter().map(|&x| x * g / total).collect();
    let short = g - c.iter().sum::<u64>();
    for i in 0..short as usize {
        c[i % w.len()] += 1;
    }
    GrainDistribution::new(c, g).unwrap()
}

proptest! {
    #[test]
    fn build_then_reconstruct((q, _) in pair()) {
        let code = BlockCode::for_domain(q.domain_size());
        let x = build_representation(&q, &code);
        prop_assert_eq!(x.num_blocks(), q.grains());
        prop_assert_eq!(reconstruct_distribution(&x).unwrap(), q.clone());
        let back = RepresentationString::from_bytes(&x.to_bytes()).unwrap();
        prop_assert_eq!(back.symbols(), x.symbols());
        for j in 1..=q.grains() {
            prop_assert_eq!(query_block(j, q.grains(), &code, &mut &q).unwrap(), x.block(j).to_vec());
        }
    }

    #[test]
    fn block_distance_at_least_tv((p, q) in pair()) {
        let code = BlockCode::for_domain(p.domain_size());
        let (a, b) = (build_representation(&p, &code), build_representation(&q, &code));
        let tv = tv_distance(&p, &q).unwrap();
        let (d, l) = code.relative_distance();
        prop_assert!(hamming_block_distance(&a, &b).unwrap() >= tv);
        let symbol = hamming_symbol_distance(&a, &b).unwrap();
        prop_assert!(symbol >= tv * ratio(d as u128, l as u128));
        prop_assert!(symbol * 10 >= tv);
    }

    #[test]
    fn corrupted_strings_fail_the_local_test((q, _) in pair(), j in any::<prop::sample::Index>()) {
        let code = BlockCode::for_domain(q.domain_size());
        let mut x = build_representation(&q, &code);
        let target = FixedTarget::new(q.clone());
        prop_assert!(test_pi(&x, &target, Rational::zero(), Rational::zero()));
        let j = j.index(q.grains() as usize) as u64 + 1;
        x.block_mut(j)[0] ^= 1;
        prop_assert!(reconstruct_distribution(&x).is_err());
        prop_assert!(!test_pi(&x, &target, ratio(1, 2), Rational::zero()));
    }
}

#[test]
fn unsorted_blocks_are_rejected() {
    let q = GrainDistribution::from_counts(vec![1, 1]).unwrap();
    let code = BlockCode::for_domain(2);
    let mut x = build_representation(&q, &code);
    let (b1, b2) = (x.block(1).to_vec(), x.block(2).to_vec());
    x.block_mut(1).copy_from_slice(&b2);
    x.block_mut(2).copy_from_slice(&b1);
    assert!(reconstruct_distribution(&x).is_err());
}
