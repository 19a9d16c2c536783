//! Exact arithmetic in a prime-order subgroup of the units mod `p`.
//!
//! Everything here is sized for exhaustive checking: `p < 2^20` and
//! `q < 2^10`, so every product of two residues fits comfortably in a `u64`
//! and the full exponent range can be scanned.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exclusive upper bound on the modulus `p`.
pub const MAX_MODULUS: u64 = 1 << 20;
/// Exclusive upper bound on the subgroup order `q`.
pub const MAX_ORDER: u64 = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("{value} is not a unit modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("{value} is not in the order-{order} subgroup mod {modulus}")]
    NotInSubgroup { value: u64, order: u64, modulus: u64 },
    #[error("{value} is not a residue modulo {order}")]
    ScalarOutOfRange { value: u64, order: u64 },
    #[error("invalid group parameters: {0}")]
    Invalid(GroupReport),
}

/// One failed invariant of a [`GroupParams`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupFailure {
    ModulusOutOfRange,
    OrderOutOfRange,
    ModulusNotPrime,
    OrderNotPrime,
    OrderDoesNotDivide,
    GeneratorOutOfRange,
    GeneratorIsIdentity,
    GeneratorWrongOrder,
}

impl fmt::Display for GroupFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            GroupFailure::ModulusOutOfRange => "p outside desk-scale range [3, 2^20)",
            GroupFailure::OrderOutOfRange => "q outside desk-scale range [2, 2^10)",
            GroupFailure::ModulusNotPrime => "p not prime",
            GroupFailure::OrderNotPrime => "q not prime",
            GroupFailure::OrderDoesNotDivide => "q does not divide p - 1",
            GroupFailure::GeneratorOutOfRange => "g not in [1, p)",
            GroupFailure::GeneratorIsIdentity => "generator is identity",
            GroupFailure::GeneratorWrongOrder => "g^q != 1 mod p",
        };
        f.write_str(msg)
    }
}

/// Outcome of [`GroupParams::validate`]; empty `failures` means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    pub failures: Vec<GroupFailure>,
}

impl GroupReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for GroupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.failures.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// A residue in `Z_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scalar(u64);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);

    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A member of the subgroup generated by `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(u64);

impl GroupElement {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `base^exp mod modulus` by square-and-multiply. The base must be a unit.
pub fn pow_mod(base: u64, exp: u64, modulus: u64) -> Result<u64, GroupError> {
    let base = base % modulus;
    if gcd(base, modulus) != 1 {
        return Err(GroupError::NotInvertible { value: base, modulus });
    }
    Ok(pow_unchecked(base, exp, modulus))
}

fn pow_unchecked(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc: u128 = 1 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Result<u64, GroupError> {
    let a_red = a % m;
    let (mut old_r, mut r) = (a_red as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 || m < 2 {
        return Err(GroupError::NotInvertible { value: a_red, modulus: m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Public parameters `(p, q, g)`: `g` generates the order-`q` subgroup of `Z_p^*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupParams {
    p: u64,
    q: u64,
    g: u64,
}

impl GroupParams {
    /// Validates every invariant and refuses invalid parameters.
    pub fn new(p: u64, q: u64, g: u64) -> Result<Self, GroupError> {
        let params = GroupParams { p, q, g };
        let report = params.validate();
        if report.is_valid() {
            Ok(params)
        } else {
            Err(GroupError::Invalid(report))
        }
    }

    /// Builds parameters without validation, for inspecting bad inputs.
    pub fn unchecked(p: u64, q: u64, g: u64) -> Self {
        GroupParams { p, q, g }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn generator(&self) -> GroupElement {
        GroupElement(self.g)
    }

    /// Lists every failed invariant.
    pub fn validate(&self) -> GroupReport {
        let mut failures = Vec::new();
        let GroupParams { p, q, g } = *self;
        if !(3..MAX_MODULUS).contains(&p) {
            failures.push(GroupFailure::ModulusOutOfRange);
        }
        if !(2..MAX_ORDER).contains(&q) {
            failures.push(GroupFailure::OrderOutOfRange);
        }
        if !is_prime(p) {
            failures.push(GroupFailure::ModulusNotPrime);
        }
        if !is_prime(q) {
            failures.push(GroupFailure::OrderNotPrime);
        }
        if q == 0 || p == 0 || (p - 1) % q != 0 {
            failures.push(GroupFailure::OrderDoesNotDivide);
        }
        if g == 0 || g >= p {
            failures.push(GroupFailure::GeneratorOutOfRange);
        } else if g == 1 {
            failures.push(GroupFailure::GeneratorIsIdentity);
        } else if pow_mod(g, q, p) != Ok(1) {
            failures.push(GroupFailure::GeneratorWrongOrder);
        }
        GroupReport { failures }
    }

    pub fn scalar(&self, value: u64) -> Result<Scalar, GroupError> {
        if value < self.q {
            Ok(Scalar(value))
        } else {
            Err(GroupError::ScalarOutOfRange { value, order: self.q })
        }
    }

    /// Reduces an arbitrary integer into `Z_q`.
    pub fn scalar_reduced(&self, value: u64) -> Scalar {
        Scalar(value % self.q)
    }

    pub fn scalars(&self) -> impl Iterator<Item = Scalar> {
        (0..self.q).map(Scalar)
    }

    /// Checks subgroup membership: `1 <= value < p` and `value^q = 1`.
    pub fn element(&self, value: u64) -> Result<GroupElement, GroupError> {
        if value == 0 || value >= self.p || pow_unchecked(value, self.q, self.p) != 1 {
            return Err(GroupError::NotInSubgroup { value, order: self.q, modulus: self.p });
        }
        Ok(GroupElement(value))
    }

    /// All `q` subgroup elements in the order `g^0, g^1, ...`.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.scalars().map(|r| self.exp(self.generator(), r)).collect()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(1)
    }

    pub fn exp(&self, base: GroupElement, e: Scalar) -> GroupElement {
        GroupElement(pow_unchecked(base.0, e.0, self.p))
    }

    pub fn exp_g(&self, e: Scalar) -> GroupElement {
        self.exp(self.generator(), e)
    }

    pub fn mul(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        GroupElement(((a.0 as u128 * b.0 as u128) % self.p as u128) as u64)
    }

    pub fn invert(&self, a: GroupElement) -> GroupElement {
        // Subgroup members are units, so a^(q-1) is the inverse.
        GroupElement(pow_unchecked(a.0, self.q - 1, self.p))
    }

    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar((a.0 + b.0) % self.q)
    }

    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar((a.0 + self.q - b.0) % self.q)
    }

    pub fn mul_scalar(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(a.0 * b.0 % self.q)
    }

    pub fn inv_scalar(&self, a: Scalar) -> Result<Scalar, GroupError> {
        inv_mod(a.0, self.q).map(Scalar)
    }

    /// Exhaustive discrete log of `h` to base `base`.
    pub fn dlog_base(&self, base: GroupElement, h: GroupElement) -> Result<Scalar, GroupError> {
        let mut acc = self.identity();
        for r in self.scalars() {
            if acc == h {
                return Ok(r);
            }
            acc = self.mul(acc, base);
        }
        Err(GroupError::NotInSubgroup { value: h.0, order: self.q, modulus: self.p })
    }
}

/// The unique `r` in `Z_q` with `g^r = h`, found by scanning.
pub fn dlog_bruteforce(h: u64, params: &GroupParams) -> Result<Scalar, GroupError> {
    let h = params.element(h)?;
    params.dlog_base(params.generator(), h)
}
