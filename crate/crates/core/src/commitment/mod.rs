//! Probability-annotated hash tree commitments.
//!
//! Leaves carry grain counts; every internal node carries the mass of its
//! subtree and a keyed hash of its two children's labels. An opening of `x`
//! is the authentication path from leaf `x` to the root; the verifier learns
//! `pdf(x)` from the leaf and `cdf(x)` by adding the masses of left siblings.
//!
//! Hashing is SHA-256 keyed by a 16-byte salt:
//! `leaf = H(salt || 0x00 || mass)`, `node = H(salt || 0x01 || label(l) || label(r))`,
//! where a label is its 64-bit little-endian mass followed by its 32 hash bytes.

mod extract;

pub use extract::{extract, CollisionEvidence, Extraction, ReplayableOpener, EXTRACTOR_RUNS_PER_ELEMENT};

use crate::dist::{grain_threshold, GrainDistribution};
use crate::rational::Rational;
use crate::rng::Rng;
use rand::RngCore;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

pub const SALT_LEN: usize = 16;
pub const HASH_LEN: usize = 32;
/// Encoded size of a [`NodeLabel`].
pub const LABEL_LEN: usize = 8 + HASH_LEN;
/// Encoded size of a [`Digest`].
pub const DIGEST_LEN: usize = LABEL_LEN + 24;
/// Fixed part of an encoded [`OpeningProof`]: element, pdf, cdf, depth, direction bits.
pub const PROOF_HEADER_LEN: usize = 8 + 8 + 8 + 1 + 8;
/// Smallest accepted security parameter.
pub const MIN_KAPPA: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CommitError {
    #[error("security parameter {0} is below {MIN_KAPPA}")]
    WeakKey(u32),
    #[error("element {x} outside [1, {n}]")]
    ElementOutOfRange { x: u64, n: u64 },
    #[error("quantile level must lie in (0, 1]")]
    MuOutOfRange,
    #[error("domain too large for a 64-level tree")]
    DomainTooLarge,
    #[error("malformed encoding: {0}")]
    Decode(&'static str),
}

/// Salt for the keyed hash, drawn fresh by the verifier in every session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HashKey {
    pub salt: [u8; SALT_LEN],
    pub security_param: u32,
}

impl HashKey {
    pub const ENCODED_LEN: usize = SALT_LEN + 4;

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.salt.to_vec();
        out.extend_from_slice(&self.security_param.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CommitError> {
        if bytes.len() != Self::ENCODED_LEN {
            return Err(CommitError::Decode("key length"));
        }
        let salt = bytes[..SALT_LEN].try_into().unwrap();
        let security_param = u32::from_le_bytes(bytes[SALT_LEN..].try_into().unwrap());
        Ok(Self { salt, security_param })
    }

    fn hasher(&self) -> Sha256 {
        Sha256::new_with_prefix(self.salt)
    }

    fn leaf(&self, mass: u64) -> NodeLabel {
        let mut h = self.hasher();
        h.update([0x00]);
        h.update(mass.to_le_bytes());
        NodeLabel { mass, hash: h.finalize().into() }
    }

    /// Parent of two labels, or `None` if the masses overflow.
    fn node(&self, left: &NodeLabel, right: &NodeLabel) -> Option<NodeLabel> {
        let mass = left.mass.checked_add(right.mass)?;
        let mut h = self.hasher();
        h.update([0x01]);
        h.update(left.to_bytes());
        h.update(right.to_bytes());
        Some(NodeLabel { mass, hash: h.finalize().into() })
    }
}

/// Fresh key. `n` is accepted for interface symmetry; the key does not depend on it.
pub fn gen(kappa: u32, _n: usize, rng: &mut Rng) -> Result<HashKey, CommitError> {
    if kappa < MIN_KAPPA {
        return Err(CommitError::WeakKey(kappa));
    }
    let mut salt = [0u8; SALT_LEN];
    rng.fill_bytes(&mut salt);
    Ok(HashKey { salt, security_param: kappa })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeLabel {
    pub mass: u64,
    pub hash: [u8; HASH_LEN],
}

impl NodeLabel {
    pub fn to_bytes(&self) -> [u8; LABEL_LEN] {
        let mut out = [0u8; LABEL_LEN];
        out[..8].copy_from_slice(&self.mass.to_le_bytes());
        out[8..].copy_from_slice(&self.hash);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CommitError> {
        if bytes.len() != LABEL_LEN {
            return Err(CommitError::Decode("label length"));
        }
        Ok(Self {
            mass: u64::from_le_bytes(bytes[..8].try_into().unwrap()),
            hash: bytes[8..].try_into().unwrap(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Digest {
    pub root: NodeLabel,
    pub padded_size: u64,
    pub domain_size: u64,
    pub denominator: u64,
}

impl Digest {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.root.to_bytes().to_vec();
        out.extend_from_slice(&self.padded_size.to_le_bytes());
        out.extend_from_slice(&self.domain_size.to_le_bytes());
        out.extend_from_slice(&self.denominator.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CommitError> {
        if bytes.len() != DIGEST_LEN {
            return Err(CommitError::Decode("digest length"));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[LABEL_LEN + 8 * i..LABEL_LEN + 8 * i + 8].try_into().unwrap());
        Ok(Self {
            root: NodeLabel::from_bytes(&bytes[..LABEL_LEN])?,
            padded_size: word(0),
            domain_size: word(1),
            denominator: word(2),
        })
    }

    /// Structural checks the verifier applies on receipt: root mass is the whole
    /// denominator and the padded size is the power of two the domain requires.
    pub fn is_well_formed(&self, n: usize) -> bool {
        self.domain_size == n as u64
            && self.denominator > 0
            && self.root.mass == self.denominator
            && Some(self.padded_size) == (n as u64).checked_next_power_of_two()
    }

    pub fn depth(&self) -> u32 {
        self.padded_size.trailing_zeros()
    }
}

/// All node labels of a committed tree, heap-indexed: root at 1, children of `i` at `2i` and `2i + 1`.
#[derive(Clone, Debug)]
pub struct TreeAux {
    key: HashKey,
    digest: Digest,
    nodes: Vec<NodeLabel>,
    prefix: Vec<u64>,
}

/// Commit to `q` under `key`.
pub fn digest(key: &HashKey, q: &GrainDistribution) -> (Digest, TreeAux) {
    let n = q.domain_size();
    let p = n.next_power_of_two();
    let mut nodes = vec![NodeLabel { mass: 0, hash: [0; HASH_LEN] }; 2 * p];
    let zero_leaf = key.leaf(0);
    for i in 0..p {
        nodes[p + i] = q.counts().get(i).map_or(zero_leaf, |&c| key.leaf(c));
    }
    for i in (1..p).rev() {
        nodes[i] = key.node(&nodes[2 * i], &nodes[2 * i + 1]).expect("masses sum to G");
    }
    let digest = Digest {
        root: nodes[1],
        padded_size: p as u64,
        domain_size: n as u64,
        denominator: q.grains(),
    };
    let prefix = (1..=n).map(|x| q.cdf_grains(x).unwrap()).collect();
    (digest, TreeAux { key: *key, digest, nodes, prefix })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub sibling: NodeLabel,
    /// The sibling is the left child of the common parent.
    pub sibling_is_left: bool,
}

/// Authentication path for one leaf, ordered from the leaf's sibling up to the root's children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpeningProof {
    pub element: u64,
    pub claimed_pdf: u64,
    pub claimed_cdf: u64,
    pub path: Vec<PathStep>,
}

impl OpeningProof {
    pub fn encoded_len(&self) -> usize {
        PROOF_HEADER_LEN + LABEL_LEN * self.path.len()
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.element.to_le_bytes());
        out.extend_from_slice(&self.claimed_pdf.to_le_bytes());
        out.extend_from_slice(&self.claimed_cdf.to_le_bytes());
        out.push(self.path.len() as u8);
        let dirs = self
            .path
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, s)| acc | (u64::from(s.sibling_is_left) << i));
        out.extend_from_slice(&dirs.to_le_bytes());
        for step in &self.path {
            out.extend_from_slice(&step.sibling.to_bytes());
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.write_to(&mut out);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CommitError> {
        if bytes.len() < PROOF_HEADER_LEN {
            return Err(CommitError::Decode("truncated opening"));
        }
        let word = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
        let depth = bytes[24] as usize;
        if depth > 63 {
            return Err(CommitError::Decode("opening depth"));
        }
        let dirs = u64::from_le_bytes(bytes[25..33].try_into().unwrap());
        if bytes.len() != PROOF_HEADER_LEN + LABEL_LEN * depth {
            return Err(CommitError::Decode("opening length"));
        }
        if dirs >> depth != 0 {
            return Err(CommitError::Decode("direction bits beyond path"));
        }
        let path = (0..depth)
            .map(|i| {
                let at = PROOF_HEADER_LEN + LABEL_LEN * i;
                Ok(PathStep {
                    sibling: NodeLabel::from_bytes(&bytes[at..at + LABEL_LEN])?,
                    sibling_is_left: dirs >> i & 1 == 1,
                })
            })
            .collect::<Result<_, CommitError>>()?;
        Ok(Self { element: word(0), claimed_pdf: word(1), claimed_cdf: word(2), path })
    }
}

impl TreeAux {
    pub fn digest(&self) -> &Digest {
        &self.digest
    }

    pub fn key(&self) -> &HashKey {
        &self.key
    }

    /// Label of heap node `i`.
    pub fn node(&self, i: usize) -> Option<&NodeLabel> {
        self.nodes.get(i).filter(|_| i > 0)
    }

    pub fn open(&self, x: u64) -> Result<OpeningProof, CommitError> {
        let n = self.digest.domain_size;
        if x == 0 || x > n {
            return Err(CommitError::ElementOutOfRange { x, n });
        }
        let p = self.digest.padded_size as usize;
        let mut idx = p + x as usize - 1;
        let mut path = Vec::with_capacity(self.digest.depth() as usize);
        while idx > 1 {
            path.push(PathStep { sibling: self.nodes[idx ^ 1], sibling_is_left: idx & 1 == 1 });
            idx >>= 1;
        }
        Ok(OpeningProof {
            element: x,
            claimed_pdf: self.nodes[p + x as usize - 1].mass,
            claimed_cdf: self.prefix[x as usize - 1],
            path,
        })
    }

    /// Smallest `x` with `cdf(x) >= mu`, with its opening.
    pub fn quantile_open(&self, mu: Rational) -> Result<(u64, OpeningProof), CommitError> {
        let g = grain_threshold(mu, self.digest.denominator).map_err(|_| CommitError::MuOutOfRange)?;
        let x = self.prefix.partition_point(|&c| c < g) as u64 + 1;
        Ok((x, self.open(x)?))
    }
}

/// Checks an opening of `x` against `d`. On success returns every label the
/// path authenticates as `(heap index, label)`, leaf first.
pub fn verify_labels(x: u64, proof: &OpeningProof, key: &HashKey, d: &Digest) -> Option<Vec<(u64, NodeLabel)>> {
    let mut seen = Vec::with_capacity(2 * proof.path.len() + 1);
    verify_inner(x, proof, key, d, Some(&mut seen)).then_some(seen)
}

/// Accepts iff the path recomputes `d.root`, masses add up at every node, and
/// `claimed_cdf` equals the leaf mass plus the masses of all left siblings.
pub fn verify(x: u64, proof: &OpeningProof, key: &HashKey, d: &Digest) -> bool {
    verify_inner(x, proof, key, d, None)
}

fn verify_inner(
    x: u64,
    proof: &OpeningProof,
    key: &HashKey,
    d: &Digest,
    mut seen: Option<&mut Vec<(u64, NodeLabel)>>,
) -> bool {
    let n = d.domain_size;
    let p = d.padded_size;
    if proof.element != x || x == 0 || x > n || !p.is_power_of_two() || p < n {
        return false;
    }
    let depth = p.trailing_zeros() as usize;
    if proof.path.len() != depth || proof.claimed_pdf > d.denominator {
        return false;
    }
    let mut idx = p + x - 1;
    let mut cur = key.leaf(proof.claimed_pdf);
    let mut cdf = proof.claimed_pdf;
    if let Some(s) = seen.as_deref_mut() {
        s.push((idx, cur));
    }
    for (level, step) in proof.path.iter().enumerate() {
        let is_right_child = idx & 1 == 1;
        if step.sibling_is_left != is_right_child {
            return false;
        }
        let sib_idx = idx ^ 1;
        // A sibling subtree made only of padding leaves must be empty.
        let first_leaf = (sib_idx << level) - p;
        if first_leaf >= n && step.sibling.mass != 0 {
            return false;
        }
        let parent = if is_right_child {
            cdf = match cdf.checked_add(step.sibling.mass) {
                Some(c) => c,
                None => return false,
            };
            key.node(&step.sibling, &cur)
        } else {
            key.node(&cur, &step.sibling)
        };
        cur = match parent {
            Some(l) => l,
            None => return false,
        };
        if let Some(s) = seen.as_deref_mut() {
            s.push((sib_idx, step.sibling));
            s.push((idx >> 1, cur));
        }
        idx >>= 1;
    }
    cur == d.root && cdf == proof.claimed_cdf
}

/// Validity of a quantile answer: the opening verifies and `mu` falls in
/// the half-open mass interval `(cdf - pdf, cdf]` of the opened element.
pub fn verify_quantile(mu: Rational, proof: &OpeningProof, key: &HashKey, d: &Digest) -> bool {
    let Ok(g) = grain_threshold(mu, d.denominator) else {
        return false;
    };
    quantile_interval_contains(g, proof) && verify(proof.element, proof, key, d)
}

/// `cdf - pdf < g <= cdf` for grain threshold `g = ceil(mu G)`.
pub fn quantile_interval_contains(g: u64, proof: &OpeningProof) -> bool {
    proof.claimed_cdf >= proof.claimed_pdf && proof.claimed_cdf - proof.claimed_pdf < g && g <= proof.claimed_cdf
}

/// A probe into a committed distribution: an element opening or a quantile opening.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Probe {
    Element(u64),
    Quantile(Rational),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::rng::stream_rng;

    fn setup(counts: Vec<u64>) -> (HashKey, Digest, TreeAux) {
        let q = GrainDistribution::from_counts(counts).unwrap();
        let key = gen(128, q.domain_size(), &mut stream_rng(5, 0)).unwrap();
        let (d, aux) = digest(&key, &q);
        (key, d, aux)
    }

    #[test]
    fn weak_key_rejected() {
        assert_eq!(gen(127, 4, &mut stream_rng(0, 0)), Err(CommitError::WeakKey(127)));
    }

    #[test]
    fn keys_reproducible_and_fresh() {
        let a = gen(128, 4, &mut stream_rng(1, 0)).unwrap();
        let b = gen(128, 4, &mut stream_rng(1, 0)).unwrap();
        let c = gen(128, 4, &mut stream_rng(2, 0)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.salt, c.salt);
    }

    #[test]
    fn root_mass_and_openings() {
        let (key, d, aux) = setup(vec![4, 4, 8, 0]);
        assert_eq!(d.root.mass, 16);
        assert!(d.is_well_formed(4));
        let o3 = aux.open(3).unwrap();
        assert_eq!((o3.claimed_pdf, o3.claimed_cdf), (8, 16));
        let o4 = aux.open(4).unwrap();
        assert_eq!((o4.claimed_pdf, o4.claimed_cdf), (0, 16));
        let o1 = aux.open(1).unwrap();
        assert_eq!(o1.claimed_cdf, o1.claimed_pdf);
        for x in 1..=4 {
            assert!(verify(x, &aux.open(x).unwrap(), &key, &d));
        }
        assert!(aux.open(5).is_err());
    }

    #[test]
    fn digest_deterministic_and_sensitive() {
        let (_, d1, _) = setup(vec![4, 4, 8, 0]);
        let (_, d2, _) = setup(vec![4, 4, 8, 0]);
        let (_, d3, _) = setup(vec![4, 5, 7, 0]);
        assert_eq!(d1, d2);
        assert_ne!(d1, d3);
    }

    #[test]
    fn off_by_one_cdf_rejected() {
        let (key, d, aux) = setup(vec![4, 4, 8, 0]);
        let mut o = aux.open(2).unwrap();
        o.claimed_cdf += 1;
        assert!(!verify(2, &o, &key, &d));
        o.claimed_cdf -= 2;
        assert!(!verify(2, &o, &key, &d));
    }

    #[test]
    fn wrong_element_rejected() {
        let (key, d, aux) = setup(vec![4, 4, 8, 0]);
        let o = aux.open(2).unwrap();
        assert!(!verify(1, &o, &key, &d));
    }

    #[test]
    fn quantile_examples() {
        let (key, d, aux) = setup(vec![4, 4, 8, 0]);
        let (x, o) = aux.quantile_open(ratio(5, 16)).unwrap();
        assert_eq!(x, 2);
        assert!(verify_quantile(ratio(5, 16), &o, &key, &d));
        assert!(!verify_quantile(ratio(9, 16), &o, &key, &d));
        assert_eq!(aux.quantile_open(ratio(1, 1)).unwrap().0, 3);
        assert_eq!(aux.quantile_open(ratio(4, 16)).unwrap().0, 1);
        // The zero-mass element never satisfies the half-open interval.
        let o4 = aux.open(4).unwrap();
        assert!(!verify_quantile(ratio(1, 1), &o4, &key, &d));
    }

    #[test]
    fn every_grain_has_a_valid_quantile_opening() {
        let (key, d, aux) = setup(vec![0, 3, 0, 5, 1, 0, 7]);
        for g in 1..=16u128 {
            let mu = ratio(g, 16);
            let (x, o) = aux.quantile_open(mu).unwrap();
            assert!(verify_quantile(mu, &o, &key, &d));
            let owners = (1..=7).filter(|&y| verify_quantile(mu, &aux.open(y).unwrap(), &key, &d)).count();
            assert_eq!(owners, 1, "g={g} x={x}");
        }
    }

    #[test]
    fn padding_sibling_must_be_empty() {
        let (key, d, aux) = setup(vec![2, 3, 5]);
        let mut o = aux.open(3).unwrap();
        assert!(!o.path[0].sibling_is_left);
        o.path[0].sibling.mass = 1;
        assert!(!verify(3, &o, &key, &d));
    }

    #[test]
    fn encodings_round_trip() {
        let (key, d, aux) = setup(vec![1, 2, 3, 4, 5]);
        assert_eq!(Digest::from_bytes(&d.to_bytes()).unwrap(), d);
        assert_eq!(HashKey::from_bytes(&key.to_bytes()).unwrap(), key);
        let o = aux.open(4).unwrap();
        let bytes = o.to_bytes();
        assert_eq!(bytes.len(), o.encoded_len());
        assert!(bytes.len() <= (1 + 3) * LABEL_LEN + PROOF_HEADER_LEN);
        assert_eq!(OpeningProof::from_bytes(&bytes).unwrap(), o);
        assert!(OpeningProof::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn single_element_domain() {
        let (key, d, aux) = setup(vec![9]);
        assert_eq!(d.padded_size, 1);
        let o = aux.open(1).unwrap();
        assert!(o.path.is_empty());
        assert!(verify(1, &o, &key, &d));
    }
}
