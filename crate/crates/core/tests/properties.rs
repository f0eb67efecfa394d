use distproof::dist::{tv_distance, GrainDistribution};
use distproof::histogram::{estimate_histogram, exact_histogram};
use distproof::properties::{GeneralProperty, LabelInvariantProperty, SupportSize, Uniformity};
use distproof::rational::{ratio, Rational};
use distproof::rng::{stream_rng, streams};
use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn distribution() -> impl Strategy<Value = GrainDistribution> {
    prop::collection::vec(0u64..40, 2..60)
        .prop_filter("positive mass", |c| c.iter().any(|&x| x > 0))
        .prop_map(|c| GrainDistribution::from_counts(c).unwrap())
}

/// Mass outside the `k` heaviest elements.
fn sparse_distance(d: &GrainDistribution, k: usize) -> Rational {
    let mut c = d.counts().to_vec();
    c.sort_unstable_by(|a, b| b.cmp(a));
    ratio(c.iter().skip(k).sum::<u64>().into(), d.grains().into())
}

fn shuffled(d: &GrainDistribution, seed: u64) -> GrainDistribution {
    let mut perm: Vec<usize> = (1..=d.domain_size()).collect();
    perm.shuffle(&mut stream_rng(seed, streams::WORKLOAD));
    d.permuted(&perm).unwrap()
}

proptest! {
    #[test]
    fn uniformity_find_and_dist(d in distribution(), rho in 0u128..5) {
        let n = d.domain_size();
        let rho = ratio(rho, 10);
        let delta = Uniformity.dist(n, &d, Rational::zero()).unwrap();
        let u = GrainDistribution::uniform(n, n as u64 * d.grains()).unwrap();
        prop_assert_eq!(delta, tv_distance(&d, &u).unwrap());
        let found = Uniformity.find(n, delta, rho, &d);
        prop_assert_eq!(Uniformity.dist(n, &found, Rational::zero()).unwrap(), Rational::zero());
        prop_assert!(tv_distance(&d, &found).unwrap() <= delta + rho);
    }

    #[test]
    fn support_size_find_and_dist(d in distribution(), k in 1usize..10) {
        let n = d.domain_size();
        let p = SupportSize { bound: k };
        let delta = p.dist(n, &d, Rational::zero()).unwrap();
        prop_assert_eq!(delta, sparse_distance(&d, k));
        let found = p.find(n, delta, Rational::zero(), &d);
        prop_assert!(found.support_size() <= k);
        prop_assert_eq!(tv_distance(&d, &found).unwrap(), delta);
    }

    #[test]
    fn histograms_and_decisions_ignore_labels(d in distribution(), seed in any::<u64>(), tau in 1u128..6) {
        let tau = ratio(tau, 10);
        let n = d.domain_size();
        let e = shuffled(&d, seed);
        let (h, h2) = (exact_histogram(&d, tau).unwrap(), exact_histogram(&e, tau).unwrap());
        prop_assert_eq!(&h, &h2);
        prop_assert_eq!(Uniformity.decide(tau, n, &h), Uniformity.decide(tau, n, &h2));
        let p = SupportSize { bound: 3 };
        prop_assert_eq!(p.decide(tau, n, &h), p.decide(tau, n, &h2));
        prop_assert_eq!(Uniformity.dist(n, &d, tau).unwrap(), Uniformity.dist(n, &e, tau).unwrap());
        prop_assert_eq!(p.dist(n, &d, tau).unwrap(), p.dist(n, &e, tau).unwrap());
    }
}

#[test]
fn uniform_samples_fill_one_bucket() {
    let n = 128;
    let u = GrainDistribution::uniform(n, 1024).unwrap();
    let h = estimate_histogram((1..=n).map(|x| (x, u.pdf(x).unwrap())), ratio(1, 5), n).unwrap();
    assert_eq!(h.masses.iter().filter(|m| !m.is_zero()).count(), 1);
    assert!(estimate_histogram(std::iter::empty(), ratio(1, 5), n).is_err());
}

#[test]
fn decide_separates_uniform_from_point_mass() {
    let n = 256;
    let tau = ratio(1, 10);
    let u = exact_histogram(&GrainDistribution::uniform(n, 4096).unwrap(), tau).unwrap();
    let p = exact_histogram(&GrainDistribution::point_mass(n, 7, 4096).unwrap(), tau).unwrap();
    assert!(Uniformity.decide(tau, n, &u));
    assert!(!Uniformity.decide(tau, n, &p));
    let s = SupportSize { bound: 1 };
    assert!(s.decide(tau, n, &p));
    assert!(!s.decide(tau, n, &u));
}
