//! Systematic Reed–Solomon codes over GF(256).

use std::sync::OnceLock;

const POLY: u16 = 0x11d;

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut exp = [0u8; 512];
        let mut log = [0u8; 256];
        let mut v: u16 = 1;
        for i in 0..255 {
            exp[i] = v as u8;
            log[v as usize] = i as u8;
            v <<= 1;
            if v & 0x100 != 0 {
                v ^= POLY;
            }
        }
        for i in 255..512 {
            exp[i] = exp[i - 255];
        }
        Tables { exp, log }
    })
}

pub fn gf_mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    let t = tables();
    t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
}

/// `2^i` in GF(256).
pub fn gf_pow2(i: usize) -> u8 {
    tables().exp[i % 255]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCode {
    k: usize,
    n: usize,
    /// Generator polynomial without its leading 1, highest degree first.
    gen: Vec<u8>,
}

impl BlockCode {
    /// `k` message symbols, `n` codeword symbols, `k < n <= 255`.
    pub fn new(k: usize, n: usize) -> Self {
        assert!(k >= 1 && k < n && n <= 255, "need 1 <= k < n <= 255");
        // g(X) = prod_{i < n-k} (X - 2^i), coefficients highest degree first
        let mut g = vec![1u8];
        for i in 0..n - k {
            let root = gf_pow2(i);
            let mut next = vec![0u8; g.len() + 1];
            for (j, &c) in g.iter().enumerate() {
                next[j] ^= c;
                next[j + 1] ^= gf_mul(c, root);
            }
            g = next;
        }
        Self { k, n, gen: g[1..].to_vec() }
    }

    /// The code for elements of `[N]`: `k = ceil(log_256(N + 1))`, `n = max(k + 2, 4)`.
    pub fn for_domain(n: usize) -> Self {
        let mut k = 1;
        while k < 8 && (n as u128 + 1) > 1u128 << (8 * k) {
            k += 1;
        }
        Self::new(k, (k + 2).max(4))
    }

    pub fn message_symbols(&self) -> usize {
        self.k
    }

    pub fn codeword_symbols(&self) -> usize {
        self.n
    }

    /// `(n - k + 1) / n` as a fraction.
    pub fn relative_distance(&self) -> (usize, usize) {
        (self.n - self.k + 1, self.n)
    }

    fn parity(&self, msg: &[u8], out: &mut [u8]) {
        let r = self.n - self.k;
        out[..r].fill(0);
        for &m in msg {
            let f = m ^ out[0];
            out.copy_within(1..r, 0);
            out[r - 1] = 0;
            if f != 0 {
                for (o, &g) in out[..r].iter_mut().zip(&self.gen) {
                    *o ^= gf_mul(f, g);
                }
            }
        }
    }

    /// Message followed by parity symbols.
    pub fn encode(&self, msg: &[u8]) -> Vec<u8> {
        assert_eq!(msg.len(), self.k);
        let mut out = vec![0u8; self.n];
        out[..self.k].copy_from_slice(msg);
        self.parity(msg, &mut out[self.k..]);
        out
    }

    /// The message of a codeword; `None` for anything else.
    pub fn decode<'a>(&self, word: &'a [u8]) -> Option<&'a [u8]> {
        if word.len() != self.n {
            return None;
        }
        let mut parity = [0u8; 255];
        let r = self.n - self.k;
        self.parity(&word[..self.k], &mut parity[..r]);
        (parity[..r] == word[self.k..]).then_some(&word[..self.k])
    }

    /// Codeword for element `x`, little-endian in the message symbols.
    pub fn encode_element(&self, x: u64) -> Vec<u8> {
        self.encode(&x.to_le_bytes()[..self.k])
    }

    pub fn decode_element(&self, word: &[u8]) -> Option<u64> {
        let msg = self.decode(word)?;
        let mut bytes = [0u8; 8];
        bytes[..msg.len()].copy_from_slice(msg);
        Some(u64::from_le_bytes(bytes))
    }
}
