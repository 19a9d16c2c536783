//! The transcript presheaf over an attacker site.
//!
//! A section over a view is an internal prover state `(r, e)` whose honest
//! transcript `(g^r, e, r + e x)` agrees with the view. Along an erasure
//! `X -> U` the stored map is the inclusion `F(X) -> F(U)`.

mod global;
mod gluing;
mod torsor;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::group::Scalar;
use crate::protocol::{CommitmentValue, ProtocolError, SigmaProtocol, Witness};
use crate::site::SiteDecl;
use crate::view::ViewObject;

pub use global::{global_section_analysis, local_triviality_witness, GlobalSectionReport, TrivializationReport};
pub use gluing::{
    check_sheaf_distributional, check_sheaf_literal, CoveringGluing, DistributionalReport, FiberReading,
    LiteralGluingReport,
};
pub use torsor::{check_torsor, rerandomize_view, BaseChangeReport, FiberwiseShapeReport, RerandAction, TorsorReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("object index {0} out of range")]
    UnknownObject(usize),
}

/// Prover randomness plus challenge: the data a section carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InternalState {
    pub nonce: Scalar,
    pub challenge: Scalar,
}

impl fmt::Display for InternalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={}, e={})", self.nonce, self.challenge)
    }
}

/// Fibers per object plus a restriction map per morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresheafTable {
    fibers: Vec<Vec<InternalState>>,
    /// `(source, target)` -> index in `F(source)` mapped to index in `F(target)`.
    restrictions: HashMap<(usize, usize), Vec<Option<usize>>>,
    morphisms: Vec<(usize, usize)>,
}

impl PresheafTable {
    /// Builds restriction maps as inclusions. Entries with no image stay `None`.
    pub fn from_fibers<C: CommitmentValue>(site: &SiteDecl<C>, mut fibers: Vec<Vec<InternalState>>) -> Self {
        for f in &mut fibers {
            f.sort();
            f.dedup();
        }
        let mut restrictions = HashMap::new();
        let mut morphisms = Vec::new();
        for u in 0..site.objects().len() {
            for &x in site.refinements(u) {
                let map = fibers[x].iter().map(|s| fibers[u].binary_search(s).ok()).collect();
                restrictions.insert((x, u), map);
                morphisms.push((x, u));
            }
        }
        morphisms.sort_unstable();
        PresheafTable { fibers, restrictions, morphisms }
    }

    pub fn fiber(&self, object: usize) -> &[InternalState] {
        &self.fibers[object]
    }

    pub fn fibers(&self) -> &[Vec<InternalState>] {
        &self.fibers
    }

    /// The stored map along `source -> target`, if that morphism exists.
    pub fn restriction(&self, source: usize, target: usize) -> Option<&[Option<usize>]> {
        self.restrictions.get(&(source, target)).map(Vec::as_slice)
    }

    pub fn morphisms(&self) -> &[(usize, usize)] {
        &self.morphisms
    }

    /// Overwrites one entry of a restriction map (fault injection).
    pub fn corrupt_restriction(&mut self, source: usize, target: usize, index: usize, image: Option<usize>) -> bool {
        match self.restrictions.get_mut(&(source, target)).and_then(|m| m.get_mut(index)) {
            Some(slot) => {
                *slot = image;
                true
            }
            None => false,
        }
    }

    /// The same fibers with the listed objects emptied, maps rebuilt.
    pub fn with_emptied<C: CommitmentValue>(&self, site: &SiteDecl<C>, objects: &[usize]) -> Self {
        let mut fibers = self.fibers.clone();
        for &o in objects {
            fibers[o].clear();
        }
        PresheafTable::from_fibers(site, fibers)
    }
}

/// `F(U) = {(r, e) : honest_transcript(x, r, e) agrees with U}`.
pub fn build_presheaf<P: SigmaProtocol>(
    proto: &P,
    statement: &P::Statement,
    witness: &Witness,
    site: &SiteDecl<P::Commitment>,
) -> Result<PresheafTable, SheafError> {
    proto.check_witness(statement, witness)?;
    let group = *proto.group();
    let mut fibers = vec![Vec::new(); site.objects().len()];
    let shapes: Vec<_> = crate::view::ViewShape::all().collect();
    for r in group.scalars() {
        for e in group.scalars() {
            let t = proto.honest_transcript(witness, r, e);
            for &shape in &shapes {
                if let Some(id) = site.id_of(&ViewObject::of_transcript(&t, shape)) {
                    fibers[id].push(InternalState { nonce: r, challenge: e });
                }
            }
        }
    }
    Ok(PresheafTable::from_fibers(site, fibers))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FunctorialityReport {
    pub morphisms: usize,
    pub composable_pairs: usize,
    pub identity_violations: Vec<String>,
    pub composition_violations: Vec<String>,
    /// Maps that do not send a state to the same state (not an inclusion).
    pub inclusion_violations: Vec<String>,
}

impl FunctorialityReport {
    pub fn passed(&self) -> bool {
        self.identity_violations.is_empty() && self.composition_violations.is_empty() && self.inclusion_violations.is_empty()
    }
}

/// Identity and composition laws over every composable pair of morphisms.
pub fn check_functoriality<C: CommitmentValue>(table: &PresheafTable, site: &SiteDecl<C>) -> FunctorialityReport {
    let mut report = FunctorialityReport { morphisms: table.morphisms.len(), ..Default::default() };
    let name = |o: usize| site.object(o).to_string();
    let map = |x: usize, u: usize| table.restrictions.get(&(x, u));

    for u in 0..site.objects().len() {
        let identity = (0..table.fibers[u].len()).map(Some).collect::<Vec<_>>();
        if map(u, u) != Some(&identity) {
            report.identity_violations.push(name(u));
        }
    }
    for &(x, u) in &table.morphisms {
        let Some(m) = map(x, u) else { continue };
        let ok = m.len() == table.fibers[x].len()
            && m.iter().enumerate().all(|(i, img)| img.and_then(|j| table.fibers[u].get(j)) == Some(&table.fibers[x][i]));
        if !ok {
            report.inclusion_violations.push(format!("{} -> {}", name(x), name(u)));
        }
    }
    // Y -> X -> U
    for u in 0..site.objects().len() {
        for &x in site.refinements(u) {
            let Some(xu) = map(x, u) else { continue };
            for &y in site.refinements(x) {
                report.composable_pairs += 1;
                let (Some(yx), Some(yu)) = (map(y, x), map(y, u)) else {
                    report.composition_violations.push(format!("{} -> {} -> {}: missing map", name(y), name(x), name(u)));
                    continue;
                };
                let composed: Vec<Option<usize>> = yx.iter().map(|i| i.and_then(|i| xu.get(i).copied().flatten())).collect();
                if &composed != yu {
                    report.composition_violations.push(format!("{} -> {} -> {}", name(y), name(x), name(u)));
                }
            }
        }
    }
    report
}

/// The nonce projection of a fiber: the sets `{r}` that forget the challenge.
pub fn nonce_fiber(table: &PresheafTable, object: usize) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = table.fibers[object].iter().map(|s| s.nonce).collect();
    out.sort();
    out.dedup();
    out
}
