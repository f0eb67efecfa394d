//! Session transcripts: the ordered frames of one session plus counters.

use super::message::{Message, Tag};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Verifier,
    Prover,
}

impl Party {
    fn name(self) -> &'static str {
        match self {
            Party::Verifier => "verifier",
            Party::Prover => "prover",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub seq: u64,
    pub from: Party,
    /// Encoded message (tag byte and body).
    pub payload: Vec<u8>,
}

impl Record {
    /// Size on the wire including the frame header.
    pub fn frame_len(&self) -> u64 {
        12 + self.payload.len() as u64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Counters {
    /// Draws the verifier took from `D`. Not visible on the wire.
    pub d_samples: u64,
    /// Probes sent in query sets or as single probe messages.
    pub q_probes: u64,
    pub bytes_sent: u64,
    pub bytes_received: u64,
    /// Maximal runs of consecutive frames from one party.
    pub rounds: u64,
    pub messages: u64,
}

/// Whether payloads are kept or only counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TranscriptMode {
    Full,
    CountersOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionTranscript {
    mode: TranscriptMode,
    records: Vec<Record>,
    counters: Counters,
    last_from: Option<Party>,
}

fn probes_in(payload: &[u8]) -> u64 {
    match payload.first().copied().and_then(Tag::from_byte) {
        Some(Tag::QuantileProbe | Tag::ElementProbe) => 1,
        Some(Tag::QuerySet) if payload.len() >= 5 => u64::from(u32::from_le_bytes(payload[1..5].try_into().unwrap())),
        _ => 0,
    }
}

impl SessionTranscript {
    pub fn new(mode: TranscriptMode) -> Self {
        Self { mode, records: Vec::new(), counters: Counters::default(), last_from: None }
    }

    pub fn mode(&self) -> TranscriptMode {
        self.mode
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    pub fn add_d_samples(&mut self, k: u64) {
        self.counters.d_samples += k;
    }

    pub fn push(&mut self, seq: u64, from: Party, payload: &[u8]) {
        let c = &mut self.counters;
        let len = 12 + payload.len() as u64;
        match from {
            Party::Verifier => {
                c.bytes_sent += len;
                c.q_probes += probes_in(payload);
            }
            Party::Prover => c.bytes_received += len,
        }
        c.messages += 1;
        if self.last_from != Some(from) {
            c.rounds += 1;
            self.last_from = Some(from);
        }
        if self.mode == TranscriptMode::Full {
            self.records.push(Record { seq, from, payload: payload.to_vec() });
        }
    }

    /// Counters recomputed from the records; `d_samples` is carried over.
    /// Only meaningful in [`TranscriptMode::Full`].
    pub fn recount(&self) -> Counters {
        let mut fresh = SessionTranscript::new(TranscriptMode::CountersOnly);
        for r in &self.records {
            fresh.push(r.seq, r.from, &r.payload);
        }
        fresh.counters.d_samples = self.counters.d_samples;
        fresh.counters
    }

    /// One line per record, then the counters.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# distproof transcript v1\n");
        for r in &self.records {
            let tag = r.payload.first().copied().and_then(Tag::from_byte).map_or("unknown", Tag::name);
            let _ = writeln!(
                out,
                "record seq={} from={} tag={} len={} hex={}",
                r.seq,
                r.from.name(),
                tag,
                r.payload.len(),
                hex::encode(&r.payload)
            );
        }
        let c = &self.counters;
        let _ = writeln!(
            out,
            "counters d_samples={} q_probes={} bytes_sent={} bytes_received={} rounds={} messages={}",
            c.d_samples, c.q_probes, c.bytes_sent, c.bytes_received, c.rounds, c.messages
        );
        out
    }

    /// Parses [`to_text`](Self::to_text) output. The stored counters are
    /// returned separately so callers can compare them with a recount.
    pub fn from_text(text: &str) -> Result<(Self, Counters), String> {
        let mut t = SessionTranscript::new(TranscriptMode::Full);
        let mut stored = None;
        for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
            let mut words = line.split_whitespace();
            let kind = words.next().unwrap_or_default();
            let fields: std::collections::HashMap<&str, &str> = words.filter_map(|w| w.split_once('=')).collect();
            let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing {k} in {line:?}"));
            let num = |k: &str| get(k)?.parse::<u64>().map_err(|e| format!("{k}: {e}"));
            match kind {
                "record" => {
                    let from = match get("from")? {
                        "verifier" => Party::Verifier,
                        "prover" => Party::Prover,
                        other => return Err(format!("unknown party {other}")),
                    };
                    let payload = hex::decode(get("hex")?).map_err(|e| e.to_string())?;
                    if payload.len() as u64 != num("len")? {
                        return Err(format!("length mismatch in {line:?}"));
                    }
                    t.push(num("seq")?, from, &payload);
                }
                "counters" => {
                    stored = Some(Counters {
                        d_samples: num("d_samples")?,
                        q_probes: num("q_probes")?,
                        bytes_sent: num("bytes_sent")?,
                        bytes_received: num("bytes_received")?,
                        rounds: num("rounds")?,
                        messages: num("messages")?,
                    });
                }
                other => return Err(format!("unknown record kind {other}")),
            }
        }
        let stored = stored.ok_or("missing counters line")?;
        t.counters.d_samples = stored.d_samples;
        Ok((t, stored))
    }

    /// Decodes every recorded payload.
    pub fn messages(&self) -> Vec<(Party, Result<Message, super::message::DecodeError>)> {
        self.records.iter().map(|r| (r.from, Message::decode(&r.payload))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commitment::Probe;

    #[test]
    fn counters_and_text_round_trip() {
        let mut t = SessionTranscript::new(TranscriptMode::Full);
        t.push(0, Party::Verifier, &Message::QuerySet(vec![Probe::Element(1), Probe::Element(2)]).encode());
        t.push(1, Party::Prover, &[5, 1]);
        t.push(2, Party::Prover, &[5, 2]);
        t.push(3, Party::Verifier, &Message::ElementProbe(3).encode());
        t.add_d_samples(17);
        let c = *t.counters();
        assert_eq!((c.q_probes, c.rounds, c.messages, c.d_samples), (3, 3, 4, 17));
        assert_eq!(c.bytes_received, 2 * 14);
        assert_eq!(t.recount(), c);
        let (back, stored) = SessionTranscript::from_text(&t.to_text()).unwrap();
        assert_eq!(stored, c);
        assert_eq!(back.recount(), c);
        assert_eq!(back.records(), t.records());
    }
}
