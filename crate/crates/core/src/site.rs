//! The category of attacker views and its declared coverings.
//!
//! Objects are consistent partial transcripts; there is a (unique) morphism
//! `X -> U` exactly when `X` refines `U`. Families are stored by object index.
//!
//! Axiom semantics, on this thin category:
//! - identity: every object carries the family `{U -> U}`;
//! - stability: for a declared family on `U` and `W -> U`, the base-changed
//!   family `{W /\ V_i -> W}` (meets that exist) is itself declared;
//! - transitivity: composing a declared family with declared families on its
//!   members yields a sieve containing some declared family on `U`.
//!
//! Covering sieves only grow when a member family is replaced by a coarser
//! one, so transitivity only needs the inclusion-minimal member sieves.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::dist::{self, IndistLab};
use crate::protocol::{CommitmentValue, SigmaProtocol, Transcript};
use crate::view::{ViewMorphism, ViewObject, ViewShape};

/// Upper bound on candidate views scanned while enumerating a site.
pub const MAX_CANDIDATE_VIEWS: u64 = 1 << 22;

/// Caps the member-family choices tried per family during transitivity checks.
const MAX_TRANSITIVITY_CHOICES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiteError {
    #[error("site would scan {0} candidate views, beyond the desk-scale bound")]
    Scale(u64),
    #[error("family member {member} does not refine target {target}")]
    NotARefinement { member: String, target: String },
    #[error("object index {0} out of range")]
    UnknownObject(usize),
}

/// Member family choice and the composite sieve it generates.
type CompositeFailure = (Vec<usize>, BTreeSet<usize>);

/// Where a family came from. Only used for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Identity,
    /// `{(a,e) -> a} u {(a,z) -> a}` over all hidden values.
    Commitment,
    /// `{(a,e,z) -> (a,e)}`.
    Refinement,
    Pullback,
    Composite,
    Declared,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoveringFamily {
    pub target: usize,
    /// Sorted, deduplicated sources of the member morphisms.
    pub members: Vec<usize>,
    pub kind: FamilyKind,
}

impl CoveringFamily {
    pub fn new(target: usize, members: impl IntoIterator<Item = usize>, kind: FamilyKind) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        CoveringFamily { target, members, kind }
    }

    pub fn is_identity(&self) -> bool {
        self.members == [self.target]
    }
}

/// Consistent views plus the quarantined (inconsistent) candidates.
#[derive(Debug, Clone)]
pub struct ViewEnumeration<C> {
    pub objects: Vec<ViewObject<C>>,
    pub quarantine: Vec<ViewObject<C>>,
}

impl<C: CommitmentValue> ViewEnumeration<C> {
    pub fn count_by_shape(&self) -> [usize; 8] {
        let mut counts = [0; 8];
        for v in &self.objects {
            counts[shape_index(v.shape())] += 1;
        }
        counts
    }
}

fn shape_index(s: ViewShape) -> usize {
    ViewShape::all().position(|t| t == s).unwrap_or(0)
}

/// Every view that extends to an accepting transcript, for every shape.
pub fn enumerate_views<P: SigmaProtocol>(
    proto: &P,
    statement: &P::Statement,
) -> Result<ViewEnumeration<P::Commitment>, SiteError> {
    let group = *proto.group();
    let q = group.q();
    let domain = proto.commitment_domain();
    let d = domain.len() as u64;
    let candidates = 1 + 3 * q + d + 2 * d * q + q * q + d * q * q;
    if candidates > MAX_CANDIDATE_VIEWS {
        return Err(SiteError::Scale(candidates));
    }

    let mut accepting = Vec::new();
    let mut quarantine = Vec::new();
    for &a in &domain {
        for e in group.scalars() {
            for z in group.scalars() {
                let t = Transcript { a, e, z };
                if proto.verify(statement, &t) {
                    accepting.push(t);
                } else {
                    quarantine.push(ViewObject::full(&t));
                }
            }
        }
    }

    let mut consistent: BTreeSet<ViewObject<P::Commitment>> = BTreeSet::new();
    for t in &accepting {
        for shape in ViewShape::all() {
            consistent.insert(ViewObject::of_transcript(t, shape));
        }
    }

    // Partial candidates that carry a commitment and never extend.
    let opt_scalars = || std::iter::once(None).chain(group.scalars().map(Some));
    for &a in &domain {
        for e in opt_scalars() {
            for z in opt_scalars() {
                if e.is_some() && z.is_some() {
                    continue;
                }
                let v = ViewObject { a: Some(a), e, z };
                if !consistent.contains(&v) {
                    quarantine.push(v);
                }
            }
        }
    }
    quarantine.sort();

    Ok(ViewEnumeration { objects: consistent.into_iter().collect(), quarantine })
}

/// A finite site: objects, refinement order, declared families.
#[derive(Debug, Clone)]
pub struct SiteDecl<C> {
    objects: Vec<ViewObject<C>>,
    index: HashMap<ViewObject<C>, usize>,
    below: Vec<Vec<usize>>,
    families: Vec<CoveringFamily>,
    by_target: Vec<Vec<usize>>,
    quarantine: Vec<ViewObject<C>>,
}

impl<C: CommitmentValue> SiteDecl<C> {
    /// Builds a site from explicit objects and families. Objects are sorted;
    /// family indices refer to the sorted order.
    pub fn new(mut objects: Vec<ViewObject<C>>, families: Vec<CoveringFamily>) -> Result<Self, SiteError> {
        let sorted = objects.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            objects.sort();
            objects.dedup();
        }
        let index: HashMap<_, _> = objects.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let below = (0..objects.len())
            .map(|u| (0..objects.len()).filter(|&x| objects[x].refines(&objects[u])).collect())
            .collect();
        let mut site =
            SiteDecl { objects, index, below, families: Vec::new(), by_target: Vec::new(), quarantine: Vec::new() };
        for f in &families {
            site.check_family(f)?;
        }
        site.set_families(families);
        Ok(site)
    }

    /// Only identity coverings.
    pub fn discrete(objects: Vec<ViewObject<C>>) -> Self {
        let mut site = SiteDecl::new(objects, Vec::new()).expect("no families to validate");
        let ids = (0..site.objects.len()).map(|u| CoveringFamily::new(u, [u], FamilyKind::Identity)).collect();
        site.set_families(ids);
        site
    }

    fn check_family(&self, f: &CoveringFamily) -> Result<(), SiteError> {
        let target = self.objects.get(f.target).ok_or(SiteError::UnknownObject(f.target))?;
        for &m in &f.members {
            let member = self.objects.get(m).ok_or(SiteError::UnknownObject(m))?;
            if !member.refines(target) {
                return Err(SiteError::NotARefinement { member: member.to_string(), target: target.to_string() });
            }
        }
        Ok(())
    }

    fn set_families(&mut self, families: Vec<CoveringFamily>) {
        let mut seen = HashSet::new();
        let mut families: Vec<CoveringFamily> =
            families.into_iter().filter(|f| seen.insert((f.target, f.members.clone()))).collect();
        families.sort_by(|x, y| (x.target, &x.members).cmp(&(y.target, &y.members)));
        let mut by_target = vec![Vec::new(); self.objects.len()];
        for (i, f) in families.iter().enumerate() {
            by_target[f.target].push(i);
        }
        self.families = families;
        self.by_target = by_target;
    }

    pub fn objects(&self) -> &[ViewObject<C>] {
        &self.objects
    }

    pub fn object(&self, id: usize) -> &ViewObject<C> {
        &self.objects[id]
    }

    pub fn id_of(&self, view: &ViewObject<C>) -> Option<usize> {
        self.index.get(view).copied()
    }

    pub fn families(&self) -> &[CoveringFamily] {
        &self.families
    }

    pub fn families_on(&self, target: usize) -> impl Iterator<Item = (usize, &CoveringFamily)> {
        self.by_target[target].iter().map(move |&i| (i, &self.families[i]))
    }

    pub fn quarantine(&self) -> &[ViewObject<C>] {
        &self.quarantine
    }

    /// Every `X` with a morphism `X -> u`, including `u` itself.
    pub fn refinements(&self, u: usize) -> &[usize] {
        &self.below[u]
    }

    pub fn has_morphism(&self, source: usize, target: usize) -> bool {
        self.objects[source].refines(&self.objects[target])
    }

    pub fn morphism(&self, source: usize, target: usize) -> Option<ViewMorphism<C>> {
        self.has_morphism(source, target)
            .then(|| ViewMorphism { source: self.objects[source], target: self.objects[target] })
    }

    /// Number of morphisms (pairs `X -> U`).
    pub fn morphism_count(&self) -> usize {
        self.below.iter().map(Vec::len).sum()
    }

    /// The greatest common refinement of two objects, when it is an object.
    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        self.objects[x].merge(&self.objects[y]).and_then(|m| self.id_of(&m))
    }

    /// The sieve generated by a family: everything below some member.
    pub fn sieve(&self, family: &CoveringFamily) -> BTreeSet<usize> {
        family.members.iter().flat_map(|&m| self.below[m].iter().copied()).collect()
    }

    /// The same site with one family removed.
    pub fn without_family(&self, family: usize) -> Self {
        let mut out = self.clone();
        let families = self.families.iter().enumerate().filter(|&(i, _)| i != family).map(|(_, f)| f.clone()).collect();
        out.set_families(families);
        out
    }

    /// The same site with one more family (validated).
    pub fn with_family(&self, family: CoveringFamily) -> Result<Self, SiteError> {
        self.check_family(&family)?;
        let mut out = self.clone();
        let mut families = self.families.clone();
        families.push(family);
        out.set_families(families);
        Ok(out)
    }

    /// Base change of `family` along `w -> family.target`.
    pub fn pullback(&self, family: &CoveringFamily, w: usize) -> CoveringFamily {
        CoveringFamily::new(w, family.members.iter().filter_map(|&m| self.meet(w, m)), FamilyKind::Pullback)
    }

    fn is_declared(&self, target: usize, members: &[usize]) -> bool {
        self.families_on(target).any(|(_, f)| f.members == members)
    }

    fn sieve_contains_declared(&self, target: usize, sieve: &BTreeSet<usize>) -> bool {
        self.families_on(target).any(|(_, f)| f.members.iter().all(|m| sieve.contains(m)))
    }

    /// Inclusion-minimal sieves among the families declared on `v`, deduplicated.
    fn minimal_sieves(&self, v: usize) -> Vec<(usize, BTreeSet<usize>)> {
        let sieves: Vec<(usize, BTreeSet<usize>)> = self.families_on(v).map(|(i, f)| (i, self.sieve(f))).collect();
        let mut out: Vec<(usize, BTreeSet<usize>)> = Vec::new();
        for (i, s) in &sieves {
            let dominated = sieves.iter().any(|(_, t)| t.len() < s.len() && t.is_subset(s));
            if !dominated && !out.iter().any(|(_, t)| t == s) {
                out.push((*i, s.clone()));
            }
        }
        out
    }

    /// Composite sieves of `family` with minimal member coverings that contain
    /// no declared family. Returns `(choice, composite sieve)` pairs and
    /// whether enumeration was truncated.
    fn transitivity_failures(
        &self,
        family: &CoveringFamily,
        minimal: &mut HashMap<usize, Vec<(usize, BTreeSet<usize>)>>,
    ) -> (Vec<CompositeFailure>, bool) {
        let options: Vec<Vec<(usize, BTreeSet<usize>)>> =
            family.members.iter().map(|&m| minimal.entry(m).or_insert_with(|| self.minimal_sieves(m)).clone()).collect();
        if options.iter().any(Vec::is_empty) {
            return (Vec::new(), false);
        }
        let mut failures = Vec::new();
        let mut cursor = vec![0usize; options.len()];
        let mut tried = 0usize;
        loop {
            let mut composite = BTreeSet::new();
            for (opts, &c) in options.iter().zip(&cursor) {
                composite.extend(opts[c].1.iter().copied());
            }
            if !self.sieve_contains_declared(family.target, &composite) {
                let choice = options.iter().zip(&cursor).map(|(opts, &c)| opts[c].0).collect();
                failures.push((choice, composite));
            }
            tried += 1;
            if tried >= MAX_TRANSITIVITY_CHOICES {
                return (failures, true);
            }
            // odometer
            let mut k = 0;
            loop {
                if k == cursor.len() {
                    return (failures, false);
                }
                cursor[k] += 1;
                if cursor[k] < options[k].len() {
                    break;
                }
                cursor[k] = 0;
                k += 1;
            }
        }
    }

    fn describe(&self, family: &CoveringFamily) -> FamilyRef {
        FamilyRef {
            target: self.objects[family.target].to_string(),
            kind: family.kind,
            members: family.members.len(),
        }
    }
}

/// Declares the standard attacker coverings and closes them under base
/// change and composition.
pub fn declare_standard_coverings<C: CommitmentValue>(views: ViewEnumeration<C>) -> SiteDecl<C> {
    let mut site = SiteDecl::new(views.objects, Vec::new()).expect("no families to validate");
    site.quarantine = views.quarantine;
    let n = site.objects.len();

    let mut families: Vec<CoveringFamily> = (0..n).map(|u| CoveringFamily::new(u, [u], FamilyKind::Identity)).collect();
    for u in 0..n {
        let shape = site.objects[u].shape();
        if shape == ViewShape::A {
            let members = site.below[u].iter().copied().filter(|&m| {
                let s = site.objects[m].shape();
                s == ViewShape::AE || s == ViewShape::AZ
            });
            families.push(CoveringFamily::new(u, members, FamilyKind::Commitment));
        } else if shape == ViewShape::AE {
            let members = site.below[u].iter().copied().filter(|&m| site.objects[m].shape() == ViewShape::FULL);
            families.push(CoveringFamily::new(u, members, FamilyKind::Refinement));
        }
    }
    site.set_families(families);

    loop {
        let mut added: Vec<CoveringFamily> = Vec::new();
        let mut pending: HashSet<(usize, Vec<usize>)> = HashSet::new();
        let mut minimal = HashMap::new();
        for f in site.families.clone() {
            for &w in &site.below[f.target] {
                let pb = site.pullback(&f, w);
                if !site.is_declared(w, &pb.members) && pending.insert((w, pb.members.clone())) {
                    added.push(pb);
                }
            }
            let (failures, _) = site.transitivity_failures(&f, &mut minimal);
            for (choice, _) in failures {
                let members = choice.iter().flat_map(|&i| site.families[i].members.iter().copied());
                let composite = CoveringFamily::new(f.target, members, FamilyKind::Composite);
                if pending.insert((composite.target, composite.members.clone())) {
                    added.push(composite);
                }
            }
        }
        if added.is_empty() {
            break;
        }
        let mut families = site.families.clone();
        families.extend(added);
        site.set_families(families);
    }
    site
}

/// Names a family in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyRef {
    pub target: String,
    pub kind: FamilyKind,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityViolation {
    pub family: FamilyRef,
    /// Source of the morphism the family was pulled back along.
    pub along: String,
    pub pullback_members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityViolation {
    pub family: FamilyRef,
    pub member_families: Vec<FamilyRef>,
    pub composite_sieve_size: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub objects: usize,
    pub morphisms: usize,
    pub families: usize,
    pub identity_violations: Vec<String>,
    pub stability_violations: Vec<StabilityViolation>,
    pub transitivity_violations: Vec<TransitivityViolation>,
    /// Families whose member choices exceeded the enumeration cap.
    pub transitivity_truncated: usize,
}

impl AxiomReport {
    pub fn identity_ok(&self) -> bool {
        self.identity_violations.is_empty()
    }

    pub fn stability_ok(&self) -> bool {
        self.stability_violations.is_empty()
    }

    pub fn transitivity_ok(&self) -> bool {
        self.transitivity_violations.is_empty() && self.transitivity_truncated == 0
    }

    pub fn passed(&self) -> bool {
        self.identity_ok() && self.stability_ok() && self.transitivity_ok()
    }
}

/// Checks identity, stability and transitivity over every declared family.
pub fn check_topology_axioms<C: CommitmentValue>(site: &SiteDecl<C>) -> AxiomReport {
    let mut report = AxiomReport {
        objects: site.objects.len(),
        morphisms: site.morphism_count(),
        families: site.families.len(),
        ..AxiomReport::default()
    };
    for u in 0..site.objects.len() {
        if !site.is_declared(u, &[u]) {
            report.identity_violations.push(site.objects[u].to_string());
        }
    }
    let mut minimal = HashMap::new();
    for f in &site.families {
        for &w in &site.below[f.target] {
            let pb = site.pullback(f, w);
            if !site.is_declared(w, &pb.members) {
                report.stability_violations.push(StabilityViolation {
                    family: site.describe(f),
                    along: site.objects[w].to_string(),
                    pullback_members: pb.members.iter().map(|&m| site.objects[m].to_string()).collect(),
                });
            }
        }
        let (failures, truncated) = site.transitivity_failures(f, &mut minimal);
        if truncated {
            report.transitivity_truncated += 1;
        }
        for (choice, sieve) in failures {
            report.transitivity_violations.push(TransitivityViolation {
                family: site.describe(f),
                member_families: choice.iter().map(|&i| site.describe(&site.families[i])).collect(),
                composite_sieve_size: sieve.len(),
            });
        }
    }
    report
}

/// Result of comparing real and simulator-reconstructed data on a covering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringVerdict {
    pub distance: BigRational,
    /// Every real transcript consistent with the target is seen by a member.
    pub covers_support: bool,
    pub pass: bool,
}

/// Decides whether a family covers its target in the simulation sense.
///
/// Conditioned on the target view, the real transcript distribution and the
/// simulator's distribution are both pushed to the information the members
/// jointly reveal, and compared by statistical distance against `lab.epsilon`.
pub fn validate_covering_by_simulation<C: CommitmentValue>(
    site: &SiteDecl<C>,
    family: &CoveringFamily,
    lab: &IndistLab<C>,
) -> CoveringVerdict {
    let target = site.object(family.target);
    let shape = family.members.iter().fold(target.shape(), |s, &m| s.union(site.object(m).shape()));
    let fail = |distance| CoveringVerdict { distance, covers_support: false, pass: false };
    let Ok(real) = dist::condition_on_view(&lab.real, target) else {
        return fail(BigRational::one());
    };
    let covers_support = real.support().all(|t| family.members.iter().any(|&m| site.object(m).matches(t)));
    let Ok(sim) = dist::condition_on_view(&lab.simulated, target) else {
        return fail(BigRational::one());
    };
    let distance =
        dist::statistical_distance(&dist::marginal_on_shape(&real, shape), &dist::marginal_on_shape(&sim, shape));
    let pass = covers_support && distance <= lab.epsilon;
    CoveringVerdict { distance, covers_support, pass }
}

/// Stable, diffable listing of objects per shape and families per object.
pub fn dump_site<C: CommitmentValue>(site: &SiteDecl<C>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# objects {}", site.objects.len());
    for shape in ViewShape::all() {
        let of_shape: Vec<&ViewObject<C>> = site.objects.iter().filter(|v| v.shape() == shape).collect();
        let _ = writeln!(out, "shape {shape} count {}", of_shape.len());
        for v in of_shape {
            let _ = writeln!(out, "  object {v}");
        }
    }
    let _ = writeln!(out, "# families {}", site.families.len());
    for f in &site.families {
        let members: Vec<String> = f.members.iter().map(|&m| site.objects[m].to_string()).collect();
        let _ = writeln!(out, "family {} {:?} <- [{}]", site.objects[f.target], f.kind, members.join(", "));
    }
    let _ = writeln!(out, "# quarantined {}", site.quarantine.len());
    out
}

#[cfg(test)]
mod tests;
