use crate::group::{GroupElement, GroupParams, Scalar};

use super::{ProtocolError, SigmaProtocol, Transcript};

/// Proof of knowledge of `x` with `y = g^x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schnorr {
    group: GroupParams,
}

impl Schnorr {
    pub fn new(group: GroupParams) -> Self {
        Schnorr { group }
    }
}

impl SigmaProtocol for Schnorr {
    type Statement = GroupElement;
    type Commitment = GroupElement;

    fn name(&self) -> &'static str {
        "schnorr"
    }

    fn group(&self) -> &GroupParams {
        &self.group
    }

    fn statement_of(&self, x: Scalar) -> GroupElement {
        self.group.exp_g(x)
    }

    fn commit(&self, r: Scalar) -> GroupElement {
        self.group.exp_g(r)
    }

    fn verify(&self, y: &GroupElement, t: &Transcript<GroupElement>) -> bool {
        let g = &self.group;
        g.exp_g(t.z) == g.mul(t.a, g.exp(*y, t.e))
    }

    fn simulate(&self, y: &GroupElement, e: Scalar, z: Scalar) -> Transcript<GroupElement> {
        let g = &self.group;
        let a = g.mul(g.exp_g(z), g.invert(g.exp(*y, e)));
        Transcript { a, e, z }
    }

    fn commitment_domain(&self) -> Vec<GroupElement> {
        let mut elements = self.group.elements();
        elements.sort();
        elements
    }

    fn shift_commitment(&self, a: GroupElement, t: Scalar) -> GroupElement {
        self.group.mul(a, self.group.exp_g(t))
    }

    fn commitment_to_values(&self, a: GroupElement) -> Vec<u64> {
        vec![a.value()]
    }

    fn commitment_from_values(&self, values: &[u64]) -> Result<GroupElement, ProtocolError> {
        match values {
            [a] => Ok(self.group.element(*a)?),
            _ => Err(ProtocolError::CommitmentArity { expected: 1, got: values.len() }),
        }
    }

    fn statement_to_values(&self, y: &GroupElement) -> Vec<u64> {
        vec![y.value()]
    }

    fn statement_from_values(&self, values: &[u64]) -> Result<GroupElement, ProtocolError> {
        self.commitment_from_values(values)
    }
}
