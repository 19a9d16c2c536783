//! One-line `key=value` transcript records.
//!
//! ```text
//! protocol=schnorr p=23 q=11 g=2 y=8 a=9 e=4 z=6
//! protocol=chaum_pedersen p=23 q=11 g=2 h=4 y=8:18 a=9:12 e=4 z=6
//! ```
//! Pair-valued fields are written `u:v`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::group::{GroupError, GroupParams};
use crate::protocol::{ChaumPedersen, ProtocolError, Schnorr, SigmaProtocol, Transcript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("missing field {0:?}")]
    Missing(&'static str),
    #[error("duplicate field {0:?}")]
    Duplicate(String),
    #[error("unknown field {0:?}")]
    Unknown(String),
    #[error("field {field:?}: {value:?} is not a decimal integer")]
    NotDecimal { field: String, value: String },
    #[error("malformed token {0:?}")]
    Token(String),
    #[error("protocol {0:?} does not match")]
    Protocol(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Value(#[from] ProtocolError),
}

/// The decimal content of a transcript record, before any group checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TranscriptRecord {
    pub protocol: String,
    pub p: u64,
    pub q: u64,
    pub g: u64,
    pub h: Option<u64>,
    pub y: Vec<u64>,
    pub a: Vec<u64>,
    pub e: u64,
    pub z: u64,
}

fn join(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(":")
}

impl fmt::Display for TranscriptRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "protocol={} p={} q={} g={}", self.protocol, self.p, self.q, self.g)?;
        if let Some(h) = self.h {
            write!(f, " h={h}")?;
        }
        write!(f, " y={} a={} e={} z={}", join(&self.y), join(&self.a), self.e, self.z)
    }
}

fn decimal(field: &str, value: &str) -> Result<u64, RecordError> {
    let bad = || RecordError::NotDecimal { field: field.to_string(), value: value.to_string() };
    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) || (value.len() > 1 && value.starts_with('0')) {
        return Err(bad());
    }
    value.parse().map_err(|_| bad())
}

impl FromStr for TranscriptRecord {
    type Err = RecordError;

    /// Accepts exactly the canonical form: fields in order, single spaces,
    /// no leading zeros. Anything else is rejected so that parsing then
    /// printing is the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut fields: Vec<(&str, &str)> = Vec::new();
        for token in s.split(' ') {
            let (k, v) = token.split_once('=').ok_or_else(|| RecordError::Token(token.to_string()))?;
            if fields.iter().any(|(seen, _)| *seen == k) {
                return Err(RecordError::Duplicate(k.to_string()));
            }
            if !["protocol", "p", "q", "g", "h", "y", "a", "e", "z"].contains(&k) {
                return Err(RecordError::Unknown(k.to_string()));
            }
            fields.push((k, v));
        }
        let get = |k: &'static str| fields.iter().find(|(f, _)| *f == k).map(|(_, v)| *v).ok_or(RecordError::Missing(k));
        let list = |k: &'static str| -> Result<Vec<u64>, RecordError> {
            get(k)?.split(':').map(|v| decimal(k, v)).collect()
        };
        let protocol = get("protocol")?;
        if protocol.is_empty() {
            return Err(RecordError::Token("protocol=".to_string()));
        }
        let record = TranscriptRecord {
            protocol: protocol.to_string(),
            p: decimal("p", get("p")?)?,
            q: decimal("q", get("q")?)?,
            g: decimal("g", get("g")?)?,
            h: get("h").ok().map(|v| decimal("h", v)).transpose()?,
            y: list("y")?,
            a: list("a")?,
            e: decimal("e", get("e")?)?,
            z: decimal("z", get("z")?)?,
        };
        if record.to_string() != s {
            return Err(RecordError::Token(s.to_string()));
        }
        Ok(record)
    }
}

/// Protocols whose transcripts can be written as records.
pub trait RecordCodec: SigmaProtocol {
    fn second_base_value(&self) -> Option<u64> {
        None
    }

    fn to_record(&self, statement: &Self::Statement, t: &Transcript<Self::Commitment>) -> TranscriptRecord {
        let group = self.group();
        TranscriptRecord {
            protocol: self.name().to_string(),
            p: group.p(),
            q: group.q(),
            g: group.generator().value(),
            h: self.second_base_value(),
            y: self.statement_to_values(statement),
            a: self.commitment_to_values(t.a),
            e: t.e.value(),
            z: t.z.value(),
        }
    }

    /// Checks the record belongs to this protocol instance and decodes it.
    fn decode_record(
        &self,
        record: &TranscriptRecord,
    ) -> Result<(Self::Statement, Transcript<Self::Commitment>), RecordError> {
        let group = self.group();
        if record.protocol != self.name()
            || (record.p, record.q, record.g) != (group.p(), group.q(), group.generator().value())
            || record.h != self.second_base_value()
        {
            return Err(RecordError::Protocol(record.protocol.clone()));
        }
        let statement = self.statement_from_values(&record.y)?;
        let a = self.commitment_from_values(&record.a)?;
        Ok((statement, Transcript { a, e: group.scalar(record.e)?, z: group.scalar(record.z)? }))
    }
}

impl RecordCodec for Schnorr {}

impl RecordCodec for ChaumPedersen {
    fn second_base_value(&self) -> Option<u64> {
        Some(self.second_base().value())
    }
}

/// Group parameters named by a record, validated.
pub fn record_group(record: &TranscriptRecord) -> Result<GroupParams, RecordError> {
    Ok(GroupParams::new(record.p, record.q, record.g)?)
}

/// Rebuilds the protocol a record names and runs its verifier.
pub fn verify_record(record: &TranscriptRecord) -> Result<bool, RecordError> {
    fn run<P: RecordCodec>(proto: &P, record: &TranscriptRecord) -> Result<bool, RecordError> {
        let (statement, t) = proto.decode_record(record)?;
        Ok(proto.verify(&statement, &t))
    }
    let group = record_group(record)?;
    match (record.protocol.as_str(), record.h) {
        ("schnorr", _) => run(&Schnorr::new(group), record),
        ("chaum_pedersen", Some(h)) => run(&ChaumPedersen::with_base(group, h)?, record),
        ("chaum_pedersen", None) => Err(RecordError::Missing("h")),
        (other, _) => Err(RecordError::Protocol(other.to_string())),
    }
}
