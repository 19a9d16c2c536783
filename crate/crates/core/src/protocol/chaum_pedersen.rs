use crate::group::{GroupElement, GroupParams, Scalar};

use super::{ElementPair, ProtocolError, SigmaProtocol, Transcript};

/// Proof that `y1 = g^x` and `y2 = h^x` share the exponent `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaumPedersen {
    group: GroupParams,
    h: GroupElement,
}

impl ChaumPedersen {
    /// Second base defaults to `g^2`.
    pub fn new(group: GroupParams) -> Self {
        let h = group.exp_g(group.scalar_reduced(2));
        ChaumPedersen { group, h }
    }

    /// Uses an explicit second base, which must lie in the subgroup.
    pub fn with_base(group: GroupParams, h: u64) -> Result<Self, ProtocolError> {
        let h = group.element(h)?;
        Ok(ChaumPedersen { group, h })
    }

    pub fn second_base(&self) -> GroupElement {
        self.h
    }

    fn pair(&self, x: Scalar) -> ElementPair {
        ElementPair(self.group.exp_g(x), self.group.exp(self.h, x))
    }
}

impl SigmaProtocol for ChaumPedersen {
    type Statement = ElementPair;
    type Commitment = ElementPair;

    fn name(&self) -> &'static str {
        "chaum_pedersen"
    }

    fn group(&self) -> &GroupParams {
        &self.group
    }

    fn statement_of(&self, x: Scalar) -> ElementPair {
        self.pair(x)
    }

    fn commit(&self, r: Scalar) -> ElementPair {
        self.pair(r)
    }

    fn verify(&self, y: &ElementPair, t: &Transcript<ElementPair>) -> bool {
        let g = &self.group;
        let first = g.exp_g(t.z) == g.mul(t.a.0, g.exp(y.0, t.e));
        let second = g.exp(self.h, t.z) == g.mul(t.a.1, g.exp(y.1, t.e));
        first && second
    }

    fn simulate(&self, y: &ElementPair, e: Scalar, z: Scalar) -> Transcript<ElementPair> {
        let g = &self.group;
        let a1 = g.mul(g.exp_g(z), g.invert(g.exp(y.0, e)));
        let a2 = g.mul(g.exp(self.h, z), g.invert(g.exp(y.1, e)));
        Transcript { a: ElementPair(a1, a2), e, z }
    }

    /// All of `<g> x <g>`, including pairs with unequal exponents.
    fn commitment_domain(&self) -> Vec<ElementPair> {
        let mut elements = self.group.elements();
        elements.sort();
        let mut out = Vec::with_capacity(elements.len() * elements.len());
        for &u in &elements {
            for &v in &elements {
                out.push(ElementPair(u, v));
            }
        }
        out
    }

    fn shift_commitment(&self, a: ElementPair, t: Scalar) -> ElementPair {
        let shift = self.pair(t);
        ElementPair(self.group.mul(a.0, shift.0), self.group.mul(a.1, shift.1))
    }

    fn commitment_to_values(&self, a: ElementPair) -> Vec<u64> {
        vec![a.0.value(), a.1.value()]
    }

    fn commitment_from_values(&self, values: &[u64]) -> Result<ElementPair, ProtocolError> {
        match values {
            [u, v] => Ok(ElementPair(self.group.element(*u)?, self.group.element(*v)?)),
            _ => Err(ProtocolError::CommitmentArity { expected: 2, got: values.len() }),
        }
    }

    fn statement_to_values(&self, y: &ElementPair) -> Vec<u64> {
        self.commitment_to_values(*y)
    }

    fn statement_from_values(&self, values: &[u64]) -> Result<ElementPair, ProtocolError> {
        self.commitment_from_values(values)
    }
}
