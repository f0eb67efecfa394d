//! Moving frames between the verifier and a prover machine.

use super::message::{frame, unframe, Message, MAX_FRAME};
use super::prover::ProverMachine;
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("frame exceeds {MAX_FRAME} bytes")]
    Oversized,
}

/// The verifier's side of a connection.
pub trait Transport {
    /// Sends one frame and collects exactly `replies` frames back.
    fn exchange(&mut self, frame: &[u8], replies: usize) -> Result<Vec<Vec<u8>>, TransportError>;
}

/// Runs the prover machine in the same process. Frames are still encoded
/// and decoded so the bytes match a stream transport exactly.
pub struct InProcess<P> {
    pub prover: P,
}

impl<P> InProcess<P> {
    pub fn new(prover: P) -> Self {
        Self { prover }
    }
}

/// What a prover endpoint does with one incoming frame: the reply frames.
pub fn answer_frame<P: ProverMachine + ?Sized>(prover: &mut P, incoming: &[u8]) -> Vec<Vec<u8>> {
    let Ok((seq, payload)) = unframe(incoming) else {
        return Vec::new();
    };
    let Ok(msg) = Message::decode(payload) else {
        return Vec::new();
    };
    prover.respond(&msg).iter().enumerate().map(|(i, p)| frame(seq + 1 + i as u64, p)).collect()
}

impl<P: ProverMachine> Transport for InProcess<P> {
    fn exchange(&mut self, frame: &[u8], replies: usize) -> Result<Vec<Vec<u8>>, TransportError> {
        let mut out = answer_frame(&mut self.prover, frame);
        out.truncate(replies);
        Ok(out)
    }
}

/// Reads one length-prefixed frame; `None` on a clean end of stream.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<Vec<u8>>, TransportError> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    let n = u32::from_le_bytes(len) as usize;
    if n > MAX_FRAME {
        return Err(TransportError::Oversized);
    }
    let mut buf = vec![0u8; 4 + n];
    buf[..4].copy_from_slice(&len);
    r.read_exact(&mut buf[4..])?;
    Ok(Some(buf))
}

/// A byte-stream connection to a prover in another thread or process.
pub struct StreamTransport<R, W> {
    reader: R,
    writer: W,
}

impl<R: Read, W: Write> StreamTransport<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self { reader, writer }
    }
}

impl<R: Read, W: Write> Transport for StreamTransport<R, W> {
    fn exchange(&mut self, frame: &[u8], replies: usize) -> Result<Vec<Vec<u8>>, TransportError> {
        self.writer.write_all(frame)?;
        self.writer.flush()?;
        let mut out = Vec::with_capacity(replies);
        for _ in 0..replies {
            match read_frame(&mut self.reader)? {
                Some(f) => out.push(f),
                None => break,
            }
        }
        Ok(out)
    }
}

/// Serves a prover machine over a byte stream until the verdict arrives or
/// the stream ends. Every reply frame is written, even when the verifier
/// expects fewer.
pub fn serve<P: ProverMachine + ?Sized, R: Read, W: Write>(
    prover: &mut P,
    mut reader: R,
    mut writer: W,
) -> Result<(), TransportError> {
    while let Some(incoming) = read_frame(&mut reader)? {
        for f in answer_frame(prover, &incoming) {
            writer.write_all(&f)?;
        }
        writer.flush()?;
        if let Ok((_, payload)) = unframe(&incoming) {
            if let Ok(Message::Verdict(_)) = Message::decode(payload) {
                break;
            }
        }
    }
    Ok(())
}
