//! Wire messages and frames.
//!
//! A message is a tag byte followed by a fixed-layout body; integers are
//! little-endian. A frame is `u32 length || u64 seq || message`, where the
//! length counts the sequence number and the message.

use crate::commitment::{CommitError, Digest, HashKey, OpeningProof, Probe, DIGEST_LEN};
use crate::rational::Rational;
use crate::verdict::Verdict;
use num_integer::Integer;
use thiserror::Error;

pub const MAX_FRAME: usize = 1 << 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("empty message")]
    Empty,
    #[error("unknown tag {0}")]
    UnknownTag(u8),
    #[error("bad {0} body")]
    Body(&'static str),
    #[error(transparent)]
    Commit(#[from] CommitError),
    #[error("bad frame: {0}")]
    Frame(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Tag {
    Key = 1,
    Digest = 2,
    QuantileProbe = 3,
    ElementProbe = 4,
    Opening = 5,
    QuerySet = 6,
    Verdict = 7,
    Backend = 8,
}

impl Tag {
    pub fn from_byte(b: u8) -> Option<Self> {
        use Tag::*;
        [Key, Digest, QuantileProbe, ElementProbe, Opening, QuerySet, Verdict, Backend]
            .into_iter()
            .find(|t| *t as u8 == b)
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::Key => "key",
            Tag::Digest => "digest",
            Tag::QuantileProbe => "quantile-probe",
            Tag::ElementProbe => "element-probe",
            Tag::Opening => "opening",
            Tag::QuerySet => "query-set",
            Tag::Verdict => "verdict",
            Tag::Backend => "backend",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Key(HashKey),
    Digest(Digest),
    QuantileProbe(Rational),
    ElementProbe(u64),
    Opening(OpeningProof),
    QuerySet(Vec<Probe>),
    Verdict(Verdict),
    /// Proximity-backend traffic, tagged with the backend id.
    Backend { backend: u8, payload: Vec<u8> },
}

const PROBE_ELEMENT: u8 = 0;
const PROBE_QUANTILE: u8 = 1;

fn put_mu(out: &mut Vec<u8>, mu: Rational) {
    let num = u64::try_from(*mu.numer()).expect("quantile levels have 64-bit parts");
    let den = u64::try_from(*mu.denom()).expect("quantile levels have 64-bit parts");
    out.extend_from_slice(&num.to_le_bytes());
    out.extend_from_slice(&den.to_le_bytes());
}

fn get_mu(b: &[u8]) -> Result<Rational, DecodeError> {
    let num = u64::from_le_bytes(b[..8].try_into().unwrap());
    let den = u64::from_le_bytes(b[8..16].try_into().unwrap());
    // canonical form only: reduced, in (0, 1]
    if den == 0 || num == 0 || num > den || num.gcd(&den) != 1 {
        return Err(DecodeError::Body("quantile level"));
    }
    Ok(Rational::new_raw(num.into(), den.into()))
}

fn probe_len(p: &Probe) -> usize {
    match p {
        Probe::Element(_) => 9,
        Probe::Quantile(_) => 17,
    }
}

impl Message {
    pub fn tag(&self) -> Tag {
        match self {
            Message::Key(_) => Tag::Key,
            Message::Digest(_) => Tag::Digest,
            Message::QuantileProbe(_) => Tag::QuantileProbe,
            Message::ElementProbe(_) => Tag::ElementProbe,
            Message::Opening(_) => Tag::Opening,
            Message::QuerySet(_) => Tag::QuerySet,
            Message::Verdict(_) => Tag::Verdict,
            Message::Backend { .. } => Tag::Backend,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = vec![self.tag() as u8];
        match self {
            Message::Key(k) => out.extend_from_slice(&k.to_bytes()),
            Message::Digest(d) => out.extend_from_slice(&d.to_bytes()),
            Message::QuantileProbe(mu) => put_mu(&mut out, *mu),
            Message::ElementProbe(x) => out.extend_from_slice(&x.to_le_bytes()),
            Message::Opening(p) => {
                out.reserve(p.encoded_len());
                p.write_to(&mut out);
            }
            Message::QuerySet(probes) => {
                out.reserve(4 + probes.iter().map(probe_len).sum::<usize>());
                out.extend_from_slice(&(probes.len() as u32).to_le_bytes());
                for p in probes {
                    match p {
                        Probe::Element(x) => {
                            out.push(PROBE_ELEMENT);
                            out.extend_from_slice(&x.to_le_bytes());
                        }
                        Probe::Quantile(mu) => {
                            out.push(PROBE_QUANTILE);
                            put_mu(&mut out, *mu);
                        }
                    }
                }
            }
            Message::Verdict(v) => out.extend_from_slice(&v.to_bytes()),
            Message::Backend { backend, payload } => {
                out.push(*backend);
                out.extend_from_slice(payload);
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let (&tag, body) = bytes.split_first().ok_or(DecodeError::Empty)?;
        let tag = Tag::from_byte(tag).ok_or(DecodeError::UnknownTag(tag))?;
        let exact = |len: usize, what| if body.len() == len { Ok(()) } else { Err(DecodeError::Body(what)) };
        Ok(match tag {
            Tag::Key => Message::Key(HashKey::from_bytes(body)?),
            Tag::Digest => {
                exact(DIGEST_LEN, "digest")?;
                Message::Digest(Digest::from_bytes(body)?)
            }
            Tag::QuantileProbe => {
                exact(16, "quantile probe")?;
                Message::QuantileProbe(get_mu(body)?)
            }
            Tag::ElementProbe => {
                exact(8, "element probe")?;
                Message::ElementProbe(u64::from_le_bytes(body.try_into().unwrap()))
            }
            Tag::Opening => Message::Opening(OpeningProof::from_bytes(body)?),
            Tag::QuerySet => {
                if body.len() < 4 {
                    return Err(DecodeError::Body("query set"));
                }
                let count = u32::from_le_bytes(body[..4].try_into().unwrap()) as usize;
                let mut probes = Vec::with_capacity(count.min(body.len() / 9));
                let mut at = 4;
                for _ in 0..count {
                    match body.get(at) {
                        Some(&PROBE_ELEMENT) if body.len() >= at + 9 => {
                            probes.push(Probe::Element(u64::from_le_bytes(body[at + 1..at + 9].try_into().unwrap())));
                            at += 9;
                        }
                        Some(&PROBE_QUANTILE) if body.len() >= at + 17 => {
                            probes.push(Probe::Quantile(get_mu(&body[at + 1..at + 17])?));
                            at += 17;
                        }
                        _ => return Err(DecodeError::Body("query set")),
                    }
                }
                if at != body.len() {
                    return Err(DecodeError::Body("query set"));
                }
                Message::QuerySet(probes)
            }
            Tag::Verdict => Message::Verdict(Verdict::from_bytes(body).ok_or(DecodeError::Body("verdict"))?),
            Tag::Backend => {
                let (&backend, payload) = body.split_first().ok_or(DecodeError::Body("backend"))?;
                Message::Backend { backend, payload: payload.to_vec() }
            }
        })
    }
}

/// `u32 length || u64 seq || payload`.
pub fn frame(seq: u64, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + payload.len());
    out.extend_from_slice(&((8 + payload.len()) as u32).to_le_bytes());
    out.extend_from_slice(&seq.to_le_bytes());
    out.extend_from_slice(payload);
    out
}

/// Splits one complete frame into its sequence number and payload.
pub fn unframe(bytes: &[u8]) -> Result<(u64, &[u8]), DecodeError> {
    if bytes.len() < 12 {
        return Err(DecodeError::Frame("short"));
    }
    let len = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
    if len + 4 != bytes.len() || len > MAX_FRAME {
        return Err(DecodeError::Frame("length"));
    }
    Ok((u64::from_le_bytes(bytes[4..12].try_into().unwrap()), &bytes[12..]))
}
