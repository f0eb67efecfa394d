//! The verified-oracle protocol: messages, transcripts, transports, and
//! the prover and verifier state machines.

pub mod message;
pub mod prover;
pub mod scaling;
pub mod session;
pub mod transcript;
pub mod transport;

pub use message::{DecodeError, Message, Tag};
pub use prover::{HonestProver, ProverMachine, Replay};
pub use session::{
    run_oracle_session, AnsweredProbe, Claim, ConfigError, GeneratorContext, ProbePolicy, QueryGenerator,
    SessionConfig, SessionOutcome, VerifierSession,
};
pub use transcript::{Counters, Party, SessionTranscript, TranscriptMode};
pub use transport::{InProcess, StreamTransport, Transport};
