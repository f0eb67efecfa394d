use distproof::commitment::{digest, Digest, HashKey, NodeLabel, OpeningProof, PathStep, Probe};
use distproof::dist::GrainDistribution;
use distproof::protocol::message::{frame, unframe};
use distproof::protocol::session::{run_oracle_session, QuantileSampling};
use distproof::protocol::{HonestProver, InProcess, Message, SessionConfig, SessionTranscript, TranscriptMode};
use distproof::rational::{ratio, Rational};
use distproof::rng::stream_rng;
use distproof::verdict::{RejectReason, Verdict};
use proptest::prelude::*;
use sha2::{Digest as _, Sha256};

fn label() -> impl Strategy<Value = NodeLabel> {
    (any::<u64>(), any::<[u8; 32]>()).prop_map(|(mass, hash)| NodeLabel { mass, hash })
}

fn mu() -> impl Strategy<Value = Rational> {
    (1u64..=u64::MAX).prop_flat_map(|d| (1..=d, Just(d))).prop_map(|(n, d)| ratio(n.into(), d.into()))
}

fn probe() -> impl Strategy<Value = Probe> {
    prop_oneof![any::<u64>().prop_map(Probe::Element), mu().prop_map(Probe::Quantile)]
}

fn opening() -> impl Strategy<Value = OpeningProof> {
    (any::<u64>(), any::<u64>(), any::<u64>(), prop::collection::vec((label(), any::<bool>()), 0..12)).prop_map(
        |(element, claimed_pdf, claimed_cdf, path)| OpeningProof {
            element,
            claimed_pdf,
            claimed_cdf,
            path: path.into_iter().map(|(sibling, sibling_is_left)| PathStep { sibling, sibling_is_left }).collect(),
        },
    )
}

fn message() -> impl Strategy<Value = Message> {
    prop_oneof![
        (any::<[u8; 16]>(), 128u32..1024).prop_map(|(salt, security_param)| Message::Key(HashKey { salt, security_param })),
        (label(), any::<u64>(), any::<u64>(), any::<u64>()).prop_map(|(root, padded_size, domain_size, denominator)| {
            Message::Digest(Digest { root, padded_size, domain_size, denominator })
        }),
        mu().prop_map(Message::QuantileProbe),
        any::<u64>().prop_map(Message::ElementProbe),
        opening().prop_map(Message::Opening),
        prop::collection::vec(probe(), 0..20).prop_map(Message::QuerySet),
        prop::sample::select(RejectReason::ALL.to_vec())
            .prop_map(|r| Message::Verdict(Verdict::Reject(r)))
            .boxed(),
        Just(Message::Verdict(Verdict::Accept)),
        (any::<u8>(), prop::collection::vec(any::<u8>(), 0..64))
            .prop_map(|(backend, payload)| Message::Backend { backend, payload }),
    ]
}

proptest! {
    #[test]
    fn messages_round_trip(m in message()) {
        let bytes = m.encode();
        prop_assert_eq!(Message::decode(&bytes).unwrap(), m.clone());
        // canonical: decoding then encoding gives the same bytes
        prop_assert_eq!(Message::decode(&bytes).unwrap().encode(), bytes.clone());
        let framed = frame(7, &bytes);
        prop_assert_eq!(unframe(&framed).unwrap(), (7, bytes.as_slice()));
    }

    #[test]
    fn truncated_messages_do_not_decode(m in message(), cut in any::<prop::sample::Index>()) {
        // backend payloads run to the end of the frame
        prop_assume!(!matches!(m, Message::Backend { .. }));
        let bytes = m.encode();
        let at = cut.index(bytes.len());
        prop_assert!(Message::decode(&bytes[..at]).is_err());
    }
}

#[test]
fn non_canonical_quantile_levels_are_refused() {
    let mut bytes = Message::QuantileProbe(ratio(1, 2)).encode();
    let n = bytes.len();
    // 2/4 instead of 1/2
    bytes[n - 16..n - 8].copy_from_slice(&2u64.to_le_bytes());
    bytes[n - 8..].copy_from_slice(&4u64.to_le_bytes());
    assert!(Message::decode(&bytes).is_err());
}

/// SHA-256 of a short honest session transcript, frozen.
const GOLDEN_TRANSCRIPT_SHA256: &str = "9590d3f1a4bceb909b0a37cea1ad450aeb832da646461c9224217c5360087ffb";

#[test]
fn golden_transcript() {
    let q = GrainDistribution::from_counts(vec![5, 1, 0, 7, 3, 9, 2, 5]).unwrap();
    let cfg = SessionConfig { transcript: TranscriptMode::Full, ..SessionConfig::new(8, ratio(1, 2)) };
    let mut link = InProcess::new(HonestProver::new(q.clone()));
    let out = run_oracle_session(cfg, &QuantileSampling { count: 3 }, &mut link, &q, &mut stream_rng(42, 1)).unwrap();
    assert!(out.verdict.accepted());
    let text = out.transcript.to_text();
    let (parsed, _) = SessionTranscript::from_text(&text).unwrap();
    assert_eq!(parsed.to_text(), text);
    // the recorded digest is the commitment to q under the recorded key
    assert_eq!(Some(digest(&out.key, &q).0), out.digest);
    assert_eq!(hex::encode(Sha256::digest(text.as_bytes())), GOLDEN_TRANSCRIPT_SHA256);
}
