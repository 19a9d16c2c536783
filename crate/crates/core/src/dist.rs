//! Exact finite distributions over transcripts and views.
//!
//! Masses are arbitrary-precision rationals. There is no floating point in
//! this module, so every equality claim is checked exactly.

use std::collections::BTreeMap;
use std::fmt::{self, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::Scalar;
use crate::protocol::{SigmaProtocol, Transcript, Witness};
use crate::view::{ViewObject, ViewShape};

/// Largest transcript space the lab will enumerate.
pub const MAX_ENUMERATION: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("view {0} has zero mass")]
    ZeroMass(String),
    #[error("enumeration of {0} outcomes exceeds the desk-scale bound")]
    Scale(u64),
    #[error("malformed rational {0:?}")]
    BadRational(String),
}

/// Parses `num/den` (or a bare integer) into a non-negative rational.
pub fn parse_rational(s: &str) -> Result<BigRational, DistError> {
    let bad = || DistError::BadRational(s.to_string());
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() || num.is_negative() || den.is_negative() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Formats a rational as `num/den` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A finite distribution with exact rational masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistribution<O: Ord> {
    masses: BTreeMap<O, BigRational>,
}

impl<O: Ord + Clone> ExactDistribution<O> {
    /// Uniform over the listed draws; repeated outcomes accumulate mass.
    pub fn uniform_over<I: IntoIterator<Item = O>>(draws: I) -> Self {
        let mut counts: BTreeMap<O, u64> = BTreeMap::new();
        let mut total = 0u64;
        for o in draws {
            *counts.entry(o).or_default() += 1;
            total += 1;
        }
        let masses = counts
            .into_iter()
            .map(|(o, c)| (o, BigRational::new(BigInt::from(c), BigInt::from(total))))
            .collect();
        ExactDistribution { masses }
    }

    pub fn point(outcome: O) -> Self {
        ExactDistribution { masses: BTreeMap::from([(outcome, BigRational::one())]) }
    }

    pub fn mass(&self, outcome: &O) -> BigRational {
        self.masses.get(outcome).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.masses.values().fold(BigRational::zero(), |acc, m| acc + m)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&O, &BigRational)> {
        self.masses.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &O> {
        self.masses.keys()
    }

    /// Mass of the outcomes satisfying `pred`.
    pub fn mass_where(&self, pred: impl Fn(&O) -> bool) -> BigRational {
        self.masses.iter().filter(|(o, _)| pred(o)).fold(BigRational::zero(), |acc, (_, m)| acc + m)
    }

    /// Renormalized restriction to `pred`; `None` when that event has mass zero.
    pub fn condition(&self, pred: impl Fn(&O) -> bool) -> Option<Self> {
        let kept: Vec<(&O, &BigRational)> = self.masses.iter().filter(|(o, _)| pred(o)).collect();
        let total = kept.iter().fold(BigRational::zero(), |acc, (_, m)| acc + *m);
        if total.is_zero() {
            return None;
        }
        let masses = kept.into_iter().map(|(o, m)| (o.clone(), m / &total)).collect();
        Some(ExactDistribution { masses })
    }

    /// Pushforward along `f`.
    pub fn map<T: Ord + Clone>(&self, f: impl Fn(&O) -> T) -> ExactDistribution<T> {
        let mut masses: BTreeMap<T, BigRational> = BTreeMap::new();
        for (o, m) in &self.masses {
            *masses.entry(f(o)).or_insert_with(BigRational::zero) += m;
        }
        ExactDistribution { masses }
    }
}

impl<O: Ord + Clone + Display> ExactDistribution<O> {
    /// One `outcome<TAB>num/den` line per outcome, in outcome order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (o, m) in &self.masses {
            out.push_str(&format!("{o}\t{}\n", format_rational(m)));
        }
        out
    }
}

/// Total variation distance, exactly.
pub fn statistical_distance<O: Ord + Clone>(d1: &ExactDistribution<O>, d2: &ExactDistribution<O>) -> BigRational {
    let mut sum = BigRational::zero();
    for (o, m) in &d1.masses {
        sum += (m - d2.mass(o)).abs();
    }
    for (o, m) in &d2.masses {
        if !d1.masses.contains_key(o) {
            sum += m;
        }
    }
    sum / BigRational::from_integer(BigInt::from(2))
}

/// Which simulator produces the "simulated" side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulatorKind {
    /// `a = g^z y^-e` for uniform `(e, z)`.
    #[default]
    Honest,
    /// Fault injection: ignores the sampled response and always uses `z = 0`.
    ConstantResponse,
}

impl SimulatorKind {
    pub fn run<P: SigmaProtocol>(
        self,
        proto: &P,
        statement: &P::Statement,
        e: Scalar,
        z: Scalar,
    ) -> Transcript<P::Commitment> {
        match self {
            SimulatorKind::Honest => proto.simulate(statement, e, z),
            SimulatorKind::ConstantResponse => proto.simulate(statement, e, Scalar::ZERO),
        }
    }
}

impl Display for SimulatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimulatorKind::Honest => "honest",
            SimulatorKind::ConstantResponse => "constant_response",
        })
    }
}

fn check_scale<P: SigmaProtocol>(proto: &P) -> Result<(), DistError> {
    let q = proto.group().q();
    if q * q > MAX_ENUMERATION {
        return Err(DistError::Scale(q * q));
    }
    Ok(())
}

pub type TranscriptDistribution<C> = ExactDistribution<Transcript<C>>;

/// Honest prover, honest verifier: `(r, e)` uniform over `Z_q^2`.
pub fn real_distribution<P: SigmaProtocol>(
    proto: &P,
    witness: &Witness,
) -> Result<TranscriptDistribution<P::Commitment>, DistError> {
    check_scale(proto)?;
    let group = *proto.group();
    Ok(ExactDistribution::uniform_over(
        group.scalars().flat_map(|r| group.scalars().map(move |e| (r, e))).map(|(r, e)| proto.honest_transcript(witness, r, e)),
    ))
}

/// The honest simulator with `(e, z)` uniform over `Z_q^2`.
pub fn simulated_distribution<P: SigmaProtocol>(
    proto: &P,
    statement: &P::Statement,
) -> Result<TranscriptDistribution<P::Commitment>, DistError> {
    simulated_distribution_with(proto, statement, SimulatorKind::Honest)
}

pub fn simulated_distribution_with<P: SigmaProtocol>(
    proto: &P,
    statement: &P::Statement,
    simulator: SimulatorKind,
) -> Result<TranscriptDistribution<P::Commitment>, DistError> {
    check_scale(proto)?;
    let group = *proto.group();
    Ok(ExactDistribution::uniform_over(
        group
            .scalars()
            .flat_map(|e| group.scalars().map(move |z| (e, z)))
            .map(|(e, z)| simulator.run(proto, statement, e, z)),
    ))
}

/// Conditional distribution of the full transcript given agreement with `view`.
pub fn condition_on_view<C: Copy + Ord + Display>(
    d: &TranscriptDistribution<C>,
    view: &ViewObject<C>,
) -> Result<TranscriptDistribution<C>, DistError> {
    d.condition(|t| view.matches(t)).ok_or_else(|| DistError::ZeroMass(view.to_string()))
}

/// Pushforward along the erasure to `shape`.
pub fn marginal_on_shape<C: Copy + Ord>(d: &TranscriptDistribution<C>, shape: ViewShape) -> ExactDistribution<ViewObject<C>> {
    d.map(|t| ViewObject::of_transcript(t, shape))
}

/// Real and simulated distributions for one statement, plus the tolerance
/// used when comparing them.
#[derive(Debug, Clone)]
pub struct IndistLab<C: Ord> {
    pub real: TranscriptDistribution<C>,
    pub simulated: TranscriptDistribution<C>,
    pub epsilon: BigRational,
    pub simulator: SimulatorKind,
}

impl<C: Copy + Ord + Display> IndistLab<C> {
    pub fn new<P: SigmaProtocol<Commitment = C>>(
        proto: &P,
        statement: &P::Statement,
        witness: &Witness,
        simulator: SimulatorKind,
        epsilon: BigRational,
    ) -> Result<Self, DistError> {
        Ok(IndistLab {
            real: real_distribution(proto, witness)?,
            simulated: simulated_distribution_with(proto, statement, simulator)?,
            epsilon,
            simulator,
        })
    }

    pub fn hvzk_distance(&self) -> BigRational {
        statistical_distance(&self.real, &self.simulated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupParams;
    use crate::protocol::{ChaumPedersen, Schnorr};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn setup() -> (Schnorr, GroupParams) {
        let group = GroupParams::new(23, 11, 2).unwrap();
        (Schnorr::new(group), group)
    }

    #[test]
    fn real_distribution_is_uniform_on_accepting_transcripts() {
        let (p, group) = setup();
        let (y, w) = p.keygen(group.scalar(3).unwrap());
        let real = real_distribution(&p, &w).unwrap();
        assert_eq!(real.len(), 121);
        assert!(real.iter().all(|(_, m)| *m == rat(1, 121)));
        assert!(real.support().all(|t| p.verify(&y, t)));
        assert_eq!(real.total(), BigRational::one());

        let tiny = Schnorr::new(GroupParams::new(5, 2, 4).unwrap());
        let (_, w) = tiny.keygen(Scalar::ZERO);
        assert_eq!(real_distribution(&tiny, &w).unwrap().len(), 4);
    }

    #[test]
    fn simulated_matches_real_exactly() {
        let (p, group) = setup();
        for x in [0, 3] {
            let (y, w) = p.keygen(group.scalar(x).unwrap());
            let sim = simulated_distribution(&p, &y).unwrap();
            assert_eq!(sim.len(), 121);
            assert!(statistical_distance(&real_distribution(&p, &w).unwrap(), &sim).is_zero());
        }
        let cp = ChaumPedersen::new(group);
        let (y, w) = cp.keygen(group.scalar(3).unwrap());
        let d = statistical_distance(&real_distribution(&cp, &w).unwrap(), &simulated_distribution(&cp, &y).unwrap());
        assert!(d.is_zero());
    }

    #[test]
    fn conditioning_examples() {
        let (p, group) = setup();
        let (_, w) = p.keygen(group.scalar(3).unwrap());
        let real = real_distribution(&p, &w).unwrap();
        let nine = group.element(9).unwrap();

        let given_a = condition_on_view(&real, &ViewObject::commitment(nine)).unwrap();
        assert_eq!(given_a.len(), 11);
        for (t, m) in given_a.iter() {
            assert_eq!(*m, rat(1, 11));
            // r = 5 pinned, z = 5 + 3e
            assert_eq!(t.z, group.scalar_reduced(5 + 3 * t.e.value()));
        }

        assert_eq!(condition_on_view(&real, &ViewObject::EMPTY).unwrap(), real);

        let ae = ViewObject { a: Some(nine), e: Some(group.scalar(4).unwrap()), z: None };
        let point = condition_on_view(&real, &ae).unwrap();
        assert_eq!(point.len(), 1);
        assert_eq!(point.support().next().unwrap().z.value(), 6);

        let bad = ViewObject { a: Some(nine), e: Some(group.scalar(4).unwrap()), z: Some(group.scalar(7).unwrap()) };
        assert!(matches!(condition_on_view(&real, &bad), Err(DistError::ZeroMass(_))));
    }

    #[test]
    fn marginal_examples() {
        let (p, group) = setup();
        let (_, w) = p.keygen(group.scalar(3).unwrap());
        let real = real_distribution(&p, &w).unwrap();
        let on_a = marginal_on_shape(&real, ViewShape::A);
        assert_eq!(on_a.len(), 11);
        assert!(on_a.iter().all(|(_, m)| *m == rat(1, 11)));
        assert_eq!(marginal_on_shape(&real, ViewShape::FULL).len(), 121);
        let on_ez = marginal_on_shape(&real, ViewShape::EZ);
        assert_eq!(on_ez.len(), 121);
    }

    #[test]
    fn condition_then_marginal_is_point_mass() {
        let (p, group) = setup();
        let (_, w) = p.keygen(group.scalar(3).unwrap());
        let real = real_distribution(&p, &w).unwrap();
        for shape in ViewShape::all() {
            for t in real.support().take(20) {
                let view = ViewObject::of_transcript(t, shape);
                let back = marginal_on_shape(&condition_on_view(&real, &view).unwrap(), shape);
                assert_eq!(back, ExactDistribution::point(view));
            }
        }
    }

    #[test]
    fn distance_edge_cases() {
        let d1 = ExactDistribution::point(1u32);
        let d2 = ExactDistribution::point(2u32);
        assert_eq!(statistical_distance(&d1, &d2), BigRational::one());
        assert!(statistical_distance(&d1, &d1).is_zero());
        // constant response vs uniform over 11 values
        let uniform = ExactDistribution::uniform_over(0u32..11);
        assert_eq!(statistical_distance(&uniform, &ExactDistribution::point(0)), rat(10, 11));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0/1").unwrap(), BigRational::zero());
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("-1/2").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(10, 11)), "10/11");
    }

    fn weights() -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..6, 1..6)
    }

    fn from_weights(w: &[u8]) -> ExactDistribution<usize> {
        let draws: Vec<usize> = w.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize)).collect();
        if draws.is_empty() {
            ExactDistribution::point(0)
        } else {
            ExactDistribution::uniform_over(draws)
        }
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(a in weights(), b in weights(), c in weights()) {
            let (da, db, dc) = (from_weights(&a), from_weights(&b), from_weights(&c));
            prop_assert_eq!(da.total(), BigRational::one());
            let ab = statistical_distance(&da, &db);
            prop_assert_eq!(&ab, &statistical_distance(&db, &da));
            prop_assert!(!ab.is_negative());
            prop_assert!(ab <= BigRational::one());
            prop_assert!(ab <= statistical_distance(&da, &dc) + statistical_distance(&dc, &db));
            prop_assert_eq!(ab.is_zero(), da == db);
        }
    }
}
