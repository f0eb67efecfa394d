//! Session outcomes shared by the protocol layers.

use std::fmt;

/// Why a verifier rejected. The discriminant is the wire code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum RejectReason {
    BadDigest = 1,
    InvalidOpening = 2,
    QuantileValidity = 3,
    IdentityTest = 4,
    Malformed = 5,
    Backend = 6,
    Property = 7,
    Transport = 8,
}

impl RejectReason {
    pub const ALL: [RejectReason; 8] = [
        Self::BadDigest,
        Self::InvalidOpening,
        Self::QuantileValidity,
        Self::IdentityTest,
        Self::Malformed,
        Self::Backend,
        Self::Property,
        Self::Transport,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::BadDigest => "bad-digest",
            Self::InvalidOpening => "invalid-opening",
            Self::QuantileValidity => "quantile-validity",
            Self::IdentityTest => "identity-test",
            Self::Malformed => "malformed-message",
            Self::Backend => "backend",
            Self::Property => "property",
            Self::Transport => "transport",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn accepted(self) -> bool {
        self == Verdict::Accept
    }

    pub fn reason(self) -> Option<RejectReason> {
        match self {
            Verdict::Accept => None,
            Verdict::Reject(r) => Some(r),
        }
    }

    /// Two-byte wire form: accept flag, reason code (0 on accept).
    pub fn to_bytes(self) -> [u8; 2] {
        match self {
            Verdict::Accept => [1, 0],
            Verdict::Reject(r) => [0, r.code()],
        }
    }

    pub fn from_bytes(b: &[u8]) -> Option<Self> {
        match b {
            [1, 0] => Some(Verdict::Accept),
            [0, c] => RejectReason::from_code(*c).map(Verdict::Reject),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept => f.write_str("accept"),
            Verdict::Reject(r) => write!(f, "reject({r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_round_trip() {
        assert_eq!(Verdict::from_bytes(&Verdict::Accept.to_bytes()), Some(Verdict::Accept));
        for r in RejectReason::ALL {
            let v = Verdict::Reject(r);
            assert_eq!(Verdict::from_bytes(&v.to_bytes()), Some(v));
        }
        assert_eq!(Verdict::from_bytes(&[0, 0]), None);
        assert_eq!(Verdict::from_bytes(&[1, 2]), None);
    }
}
