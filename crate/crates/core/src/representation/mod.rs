//! Distributions written as strings: one codeword block per grain, sorted by element.

pub mod code;

pub use code::BlockCode;

use crate::dist::{DistError, GrainDistribution};
use crate::properties::GeneralProperty;
use crate::rational::{ratio, Rational};
use rayon::prelude::*;
use thiserror::Error;

pub const HEADER_LEN: usize = 8 + 1 + 1 + 8 + 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepresentationError {
    #[error("block {0} is not a codeword")]
    NotCodeword(u64),
    #[error("block {0} decodes to element {1}, outside the domain")]
    OutOfDomain(u64, u64),
    #[error("blocks {0} and {1} are out of order")]
    Unsorted(u64, u64),
    #[error("representations have different shapes")]
    Shape,
    #[error("malformed representation bytes")]
    Decode,
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// `B` blocks of `n_c` symbols, with the parameters needed to read them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationString {
    pub n: usize,
    pub grains: u64,
    pub k_c: usize,
    pub n_c: usize,
    symbols: Vec<u8>,
}

impl RepresentationString {
    /// Arbitrary content with the given shape.
    pub fn from_symbols(n: usize, grains: u64, code: &BlockCode, symbols: Vec<u8>) -> Result<Self, RepresentationError> {
        if symbols.len() as u128 != u128::from(grains) * code.codeword_symbols() as u128 {
            return Err(RepresentationError::Shape);
        }
        Ok(Self { n, grains, k_c: code.message_symbols(), n_c: code.codeword_symbols(), symbols })
    }

    pub fn num_blocks(&self) -> u64 {
        self.grains
    }

    /// Block `j`, 1-based.
    pub fn block(&self, j: u64) -> &[u8] {
        let at = (j - 1) as usize * self.n_c;
        &self.symbols[at..at + self.n_c]
    }

    pub fn block_mut(&mut self, j: u64) -> &mut [u8] {
        let at = (j - 1) as usize * self.n_c;
        &mut self.symbols[at..at + self.n_c]
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn code(&self) -> BlockCode {
        BlockCode::new(self.k_c, self.n_c)
    }

    /// Header `B u64 || n_c u8 || k_c u8 || N u64 || G u64`, then the symbols.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.symbols.len());
        out.extend_from_slice(&self.grains.to_le_bytes());
        out.push(self.n_c as u8);
        out.push(self.k_c as u8);
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&self.grains.to_le_bytes());
        out.extend_from_slice(&self.symbols);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, RepresentationError> {
        if bytes.len() < HEADER_LEN {
            return Err(RepresentationError::Decode);
        }
        let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let (b, n_c, k_c, n, g) = (word(0), bytes[8] as usize, bytes[9] as usize, word(10), word(18));
        if b != g || k_c == 0 || k_c > 8 || k_c >= n_c || n == 0 || n > usize::MAX as u64 {
            return Err(RepresentationError::Decode);
        }
        let code = BlockCode::new(k_c, n_c);
        Self::from_symbols(n as usize, g, &code, bytes[HEADER_LEN..].to_vec()).map_err(|_| RepresentationError::Decode)
    }
}

/// Element `x` fills `counts[x]` consecutive blocks with its codeword, in increasing element order.
pub fn build_representation(q: &GrainDistribution, code: &BlockCode) -> RepresentationString {
    let n_c = code.codeword_symbols();
    let words: Vec<Vec<u8>> = (1..=q.domain_size() as u64).map(|x| code.encode_element(x)).collect();
    let mut symbols = vec![0u8; q.grains() as usize * n_c];
    let mut chunks: Vec<&mut [u8]> = Vec::with_capacity(q.domain_size());
    let mut rest = symbols.as_mut_slice();
    for &c in q.counts() {
        let (head, tail) = rest.split_at_mut(c as usize * n_c);
        chunks.push(head);
        rest = tail;
    }
    chunks.into_par_iter().zip(words.par_iter()).for_each(|(chunk, w)| {
        for block in chunk.chunks_exact_mut(n_c) {
            block.copy_from_slice(w);
        }
    });
    RepresentationString { n: q.domain_size(), grains: q.grains(), k_c: code.message_symbols(), n_c, symbols }
}

/// Decodes every block, checks that elements lie in `[N]` and never decrease,
/// and counts them.
pub fn reconstruct_distribution(x: &RepresentationString) -> Result<GrainDistribution, RepresentationError> {
    let code = x.code();
    let mut counts = vec![0u64; x.n];
    let mut prev = 0u64;
    for j in 1..=x.num_blocks() {
        let e = code.decode_element(x.block(j)).ok_or(RepresentationError::NotCodeword(j))?;
        if e == 0 || e > x.n as u64 {
            return Err(RepresentationError::OutOfDomain(j, e));
        }
        if e < prev {
            return Err(RepresentationError::Unsorted(j - 1, j));
        }
        prev = e;
        counts[e as usize - 1] += 1;
    }
    Ok(GrainDistribution::new(counts, x.grains)?)
}

/// Quantile and cdf access to a distribution, as used to read single blocks.
pub trait BlockOracle {
    /// Smallest `x` with `cdf(x) >= mu`.
    fn quantile(&mut self, mu: Rational) -> Result<u64, RepresentationError>;
    /// `cdf(x) * G` and `pdf(x) * G`.
    fn cdf_pdf_grains(&mut self, x: u64) -> Result<(u64, u64), RepresentationError>;
}

impl BlockOracle for &GrainDistribution {
    fn quantile(&mut self, mu: Rational) -> Result<u64, RepresentationError> {
        Ok(GrainDistribution::quantile(self, mu)? as u64)
    }

    fn cdf_pdf_grains(&mut self, x: u64) -> Result<(u64, u64), RepresentationError> {
        Ok((self.cdf_grains(x as usize)?, self.count(x as usize)?))
    }
}

/// Block `j` of the representation of the oracle's distribution, from one
/// quantile query at `j / B` and one cdf query that places `j` inside the
/// element's run of blocks.
pub fn query_block(
    j: u64,
    grains: u64,
    code: &BlockCode,
    oracle: &mut impl BlockOracle,
) -> Result<Vec<u8>, RepresentationError> {
    let x = oracle.quantile(ratio(j.into(), grains.into()))?;
    let (cdf, pdf) = oracle.cdf_pdf_grains(x)?;
    if pdf > cdf || !(cdf - pdf < j && j <= cdf) {
        return Err(RepresentationError::Shape);
    }
    Ok(code.encode_element(x))
}

/// Fraction of block positions where `a` and `b` differ.
pub fn hamming_block_distance(a: &RepresentationString, b: &RepresentationString) -> Result<Rational, RepresentationError> {
    if a.grains != b.grains || a.n_c != b.n_c || a.k_c != b.k_c {
        return Err(RepresentationError::Shape);
    }
    let differ = a.symbols.chunks_exact(a.n_c).zip(b.symbols.chunks_exact(b.n_c)).filter(|(p, q)| p != q).count();
    Ok(ratio(differ as u128, a.grains.into()))
}

/// Fraction of symbol positions where `a` and `b` differ.
pub fn hamming_symbol_distance(
    a: &RepresentationString,
    b: &RepresentationString,
) -> Result<Rational, RepresentationError> {
    if a.grains != b.grains || a.n_c != b.n_c || a.k_c != b.k_c {
        return Err(RepresentationError::Shape);
    }
    let differ = a.symbols.iter().zip(&b.symbols).filter(|(p, q)| p != q).count();
    Ok(ratio(differ as u128, a.symbols.len() as u128))
}

/// Accepts iff every block is a codeword, the decoded elements are sorted,
/// and the decoded distribution is within `delta_c + rho` of the property.
pub fn test_pi(x: &RepresentationString, property: &dyn GeneralProperty, delta_c: Rational, rho: Rational) -> bool {
    match reconstruct_distribution(x) {
        Ok(q) => property.dist(x.n, &q, rho).is_ok_and(|d| d <= delta_c + rho),
        Err(_) => false,
    }
}
