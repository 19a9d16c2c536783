//! Three-move protocols producing transcripts `(a, e, z)`.
//!
//! Nonces and challenges are always explicit arguments. Nothing in this
//! module samples randomness, which is what lets the rest of the crate
//! enumerate distributions exactly.

mod chaum_pedersen;
mod schnorr;

use std::fmt::{Debug, Display};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupElement, GroupError, GroupParams, Scalar};

pub use chaum_pedersen::ChaumPedersen;
pub use schnorr::Schnorr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("transcripts use different commitments")]
    CommitmentMismatch,
    #[error("transcripts share the challenge {0}")]
    EqualChallenges(Scalar),
    #[error("transcript does not verify")]
    NotAccepting,
    #[error("extracted value {0} does not open the statement")]
    InconsistentExtraction(Scalar),
    #[error("witness does not match statement")]
    WitnessMismatch,
    #[error("malformed commitment: expected {expected} component(s), got {got}")]
    CommitmentArity { expected: usize, got: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Values a commitment can take. Blanket-implemented.
pub trait CommitmentValue: Copy + Ord + Hash + Debug + Display + Send + Sync + 'static {}

impl<T: Copy + Ord + Hash + Debug + Display + Send + Sync + 'static> CommitmentValue for T {}

/// A prover secret `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub x: Scalar,
}

/// A full conversation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transcript<C> {
    pub a: C,
    pub e: Scalar,
    pub z: Scalar,
}

impl<C: Display> Display for Transcript<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.e, self.z)
    }
}

/// A pair of group elements, used for two-base commitments and statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementPair(pub GroupElement, pub GroupElement);

impl Display for ElementPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}

/// A sigma protocol over a fixed prime-order group.
///
/// Implementors provide the group-specific pieces; the response rule,
/// honest execution and the special-soundness extractor are shared.
pub trait SigmaProtocol: Send + Sync {
    type Statement: Clone + Debug + PartialEq + Send + Sync;
    type Commitment: CommitmentValue;

    fn name(&self) -> &'static str;

    fn group(&self) -> &GroupParams;

    /// The public statement opened by `x`.
    fn statement_of(&self, x: Scalar) -> Self::Statement;

    fn commit(&self, r: Scalar) -> Self::Commitment;

    fn verify(&self, statement: &Self::Statement, t: &Transcript<Self::Commitment>) -> bool;

    /// The unique commitment that makes `(a, e, z)` accept.
    fn simulate(&self, statement: &Self::Statement, e: Scalar, z: Scalar) -> Transcript<Self::Commitment>;

    /// Every commitment value a view may carry, accepting or not.
    fn commitment_domain(&self) -> Vec<Self::Commitment>;

    /// Re-randomizes a commitment by `t`, i.e. `a * commit(t)`.
    fn shift_commitment(&self, a: Self::Commitment, t: Scalar) -> Self::Commitment;

    fn commitment_to_values(&self, a: Self::Commitment) -> Vec<u64>;

    fn commitment_from_values(&self, values: &[u64]) -> Result<Self::Commitment, ProtocolError>;

    fn statement_to_values(&self, statement: &Self::Statement) -> Vec<u64>;

    fn statement_from_values(&self, values: &[u64]) -> Result<Self::Statement, ProtocolError>;

    fn keygen(&self, x: Scalar) -> (Self::Statement, Witness) {
        (self.statement_of(x), Witness { x })
    }

    /// `z = r + e x mod q`.
    fn respond(&self, witness: &Witness, r: Scalar, e: Scalar) -> Scalar {
        let group = self.group();
        group.add(r, group.mul_scalar(e, witness.x))
    }

    fn honest_transcript(&self, witness: &Witness, r: Scalar, e: Scalar) -> Transcript<Self::Commitment> {
        Transcript { a: self.commit(r), e, z: self.respond(witness, r, e) }
    }

    /// Special-soundness extractor: `x = (z1 - z2) / (e1 - e2)`.
    ///
    /// The result is checked against the statement before it is returned.
    fn extract(
        &self,
        statement: &Self::Statement,
        t1: &Transcript<Self::Commitment>,
        t2: &Transcript<Self::Commitment>,
    ) -> Result<Witness, ProtocolError> {
        if t1.a != t2.a {
            return Err(ProtocolError::CommitmentMismatch);
        }
        if t1.e == t2.e {
            return Err(ProtocolError::EqualChallenges(t1.e));
        }
        if !self.verify(statement, t1) || !self.verify(statement, t2) {
            return Err(ProtocolError::NotAccepting);
        }
        let group = self.group();
        let de = group.sub(t1.e, t2.e);
        let dz = group.sub(t1.z, t2.z);
        let x = group.mul_scalar(dz, group.inv_scalar(de)?);
        if self.statement_of(x) != *statement {
            return Err(ProtocolError::InconsistentExtraction(x));
        }
        Ok(Witness { x })
    }

    /// Errors unless `witness` opens `statement`.
    fn check_witness(&self, statement: &Self::Statement, witness: &Witness) -> Result<(), ProtocolError> {
        if self.statement_of(witness.x) == *statement {
            Ok(())
        } else {
            Err(ProtocolError::WitnessMismatch)
        }
    }
}
