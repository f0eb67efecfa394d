use distproof::commitment::{
    digest, gen, quantile_interval_contains, verify, verify_quantile, Digest, HashKey, OpeningProof, LABEL_LEN,
};
use distproof::dist::GrainDistribution;
use distproof::rational::ratio;
use distproof::rng::{stream_rng, streams};
use proptest::prelude::*;
use sha2::{Digest as _, Sha256};

fn fixed_key() -> HashKey {
    HashKey { salt: std::array::from_fn(|i| i as u8), security_param: 128 }
}

/// Label bytes of the subtree over `masses`, computed directly from the encoding rules.
fn oracle_label(salt: &[u8], masses: &[u64]) -> Vec<u8> {
    let mut h = Sha256::new();
    h.update(salt);
    let mass: u64 = masses.iter().sum();
    if masses.len() == 1 {
        h.update([0u8]);
        h.update(mass.to_le_bytes());
    } else {
        let (l, r) = masses.split_at(masses.len() / 2);
        h.update([1u8]);
        h.update(oracle_label(salt, l));
        h.update(oracle_label(salt, r));
    }
    let mut out = mass.to_le_bytes().to_vec();
    out.extend_from_slice(&h.finalize());
    out
}

fn oracle_digest(salt: &[u8], counts: &[u64]) -> Vec<u8> {
    let p = counts.len().next_power_of_two();
    let mut padded = counts.to_vec();
    padded.resize(p, 0);
    let mut out = oracle_label(salt, &padded);
    out.extend_from_slice(&(p as u64).to_le_bytes());
    out.extend_from_slice(&(counts.len() as u64).to_le_bytes());
    out.extend_from_slice(&counts.iter().sum::<u64>().to_le_bytes());
    out
}

const GOLDEN_DIGEST: &str = "10000000000000002bc92916d46b4c44ad524bb5a43ec5be093fc852ae0ee17e2e7a73cb4c859d25040000000000000004000000000000001000000000000000";
const GOLDEN_OPENING_3: &str = "03000000000000000800000000000000100000000000000002020000000000000000000000000000008f0f69dc2278be8153b5927cf34ac2944621da5aa144c583001f7cc82f812a1e08000000000000007c0d0753d775da875c2074ae53f7687236bf87b5d31d92ca7f636190a8b681dc";

#[test]
fn digest_matches_the_encoding_rules() {
    let key = fixed_key();
    for counts in [vec![4, 4, 8, 0], vec![16], vec![1, 2, 3, 4, 5, 6, 7]] {
        let q = GrainDistribution::from_counts(counts.clone()).unwrap();
        let (d, _) = digest(&key, &q);
        assert_eq!(d.to_bytes(), oracle_digest(&key.salt, &counts), "{counts:?}");
    }
}

#[test]
fn golden_vectors() {
    let q = GrainDistribution::from_counts(vec![4, 4, 8, 0]).unwrap();
    let (d, aux) = digest(&fixed_key(), &q);
    assert_eq!(hex::encode(d.to_bytes()), GOLDEN_DIGEST);
    let proof = aux.open(3).unwrap();
    assert_eq!(hex::encode(proof.to_bytes()), GOLDEN_OPENING_3);
    assert_eq!((proof.claimed_pdf, proof.claimed_cdf), (8, 16));
    let salt = fixed_key().salt;
    assert_eq!(proof.path[0].sibling.to_bytes().to_vec(), oracle_label(&salt, &[0]));
    assert_eq!(proof.path[1].sibling.to_bytes().to_vec(), oracle_label(&salt, &[4, 4]));
}

#[test]
fn quantile_example() {
    let q = GrainDistribution::from_counts(vec![4, 4, 8, 0]).unwrap();
    let key = fixed_key();
    let (d, aux) = digest(&key, &q);
    let (x, proof) = aux.quantile_open(ratio(5, 16)).unwrap();
    assert_eq!(x, 2);
    assert!(verify_quantile(ratio(5, 16), &proof, &key, &d));
    assert_eq!(aux.quantile_open(ratio(1, 1)).unwrap().0, 3);
    // element 2 covers grains 5..=8 only
    assert!(!verify_quantile(ratio(9, 16), &proof, &key, &d));
}

#[test]
fn every_single_bit_flip_of_an_opening_is_rejected() {
    let q = GrainDistribution::from_counts(vec![3, 0, 5, 1, 7]).unwrap();
    let key = fixed_key();
    let (d, aux) = digest(&key, &q);
    for x in 1..=5u64 {
        let bytes = aux.open(x).unwrap().to_bytes();
        for bit in 0..bytes.len() * 8 {
            let mut m = bytes.clone();
            m[bit / 8] ^= 1 << (bit % 8);
            let accepted = OpeningProof::from_bytes(&m).is_ok_and(|p| verify(x, &p, &key, &d));
            assert!(!accepted, "x={x} bit={bit}");
        }
    }
    let digest_bytes = d.to_bytes();
    let proof = aux.open(2).unwrap();
    for bit in 0..digest_bytes.len() * 8 {
        let mut m = digest_bytes.clone();
        m[bit / 8] ^= 1 << (bit % 8);
        let d2 = Digest::from_bytes(&m).unwrap();
        assert!(!(d2.is_well_formed(5) && verify(2, &proof, &key, &d2)), "digest bit {bit}");
    }
}

fn distribution() -> impl Strategy<Value = GrainDistribution> {
    prop::collection::vec(0u64..50, 1..80)
        .prop_filter("positive mass", |c| c.iter().any(|&x| x > 0))
        .prop_map(|c| GrainDistribution::from_counts(c).unwrap())
}

proptest! {
    #[test]
    fn honest_openings_verify_with_true_values(q in distribution(), seed in any::<u64>()) {
        let key = gen(128, q.domain_size(), &mut stream_rng(seed, streams::VERIFIER)).unwrap();
        let (d, aux) = digest(&key, &q);
        let depth = d.depth() as usize;
        for x in 1..=q.domain_size() {
            let p = aux.open(x as u64).unwrap();
            prop_assert!(verify(x as u64, &p, &key, &d));
            prop_assert_eq!(p.claimed_pdf, q.count(x).unwrap());
            prop_assert_eq!(p.claimed_cdf, q.cdf_grains(x).unwrap());
            prop_assert!(p.encoded_len() <= (1 + depth) * LABEL_LEN + 33);
            prop_assert_eq!(OpeningProof::from_bytes(&p.to_bytes()).unwrap(), p);
        }
        prop_assert_eq!(Digest::from_bytes(&d.to_bytes()).unwrap(), d);
    }

    #[test]
    fn every_grain_has_exactly_one_valid_quantile_opening(q in distribution()) {
        let key = fixed_key();
        let (d, aux) = digest(&key, &q);
        for g in 1..=q.grains() {
            let mu = ratio(g as u128, q.grains() as u128);
            let (x, p) = aux.quantile_open(mu).unwrap();
            prop_assert!(verify_quantile(mu, &p, &key, &d));
            let holders = (1..=q.domain_size() as u64)
                .filter(|&y| quantile_interval_contains(g, &aux.open(y).unwrap()))
                .collect::<Vec<_>>();
            prop_assert_eq!(holders, vec![x]);
        }
    }
}
