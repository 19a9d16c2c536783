use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{nonce_fiber, PresheafTable};
use crate::dist::{format_rational, IndistLab};
use crate::group::Scalar;
use crate::protocol::CommitmentValue;
use crate::site::{validate_covering_by_simulation, FamilyKind, SiteDecl};
use crate::view::ViewShape;

/// Literal gluing on one declared covering, in one fiber reading.
///
/// Sections are compared through their nonce `r`. A section over `V`
/// restricts to a refinement `W` when `r` lies in the fiber over `W`; two
/// member sections are compatible when they agree on every common refinement
/// both restrict to. Counts are decimal strings since they overflow `u64`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringGluing {
    pub target: String,
    pub kind: FamilyKind,
    pub members: usize,
    pub matching_families: String,
    /// Families with exactly one amalgamation.
    pub unique: String,
    /// Families with several amalgamations.
    pub multi: String,
    /// Families with no amalgamation.
    pub none: String,
    /// Internal states over the target carrying a glued nonce. More than
    /// one per glued family means the challenge is left undetermined.
    pub state_lifts: u64,
}

impl CoveringGluing {
    pub fn holds(&self) -> bool {
        self.multi == "0" && self.none == "0"
    }
}

/// Which nonce sets stand for the fibers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberReading {
    /// Nonces of the internal-state fibers.
    Strict,
    /// As strict, except that a view revealing the commitment and exactly one
    /// of `e`, `z` does not constrain `r` by the commitment.
    Displayed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiteralGluingReport {
    pub reading: FiberReading,
    pub coverings: Vec<CoveringGluing>,
    pub matching_families: String,
    pub unique: String,
    pub multi: String,
    pub none: String,
    /// Coverings on which every matching family glues uniquely.
    pub coverings_holding: usize,
}

impl LiteralGluingReport {
    /// The literal sheaf condition on every declared covering.
    pub fn holds(&self) -> bool {
        self.coverings_holding == self.coverings.len()
    }
}

fn reading_fibers<C: CommitmentValue>(table: &PresheafTable, site: &SiteDecl<C>, reading: FiberReading) -> Vec<Vec<Scalar>> {
    (0..site.objects().len())
        .map(|o| {
            let v = site.object(o);
            let shape = v.shape();
            let relaxed = match reading {
                FiberReading::Displayed if shape == ViewShape::AE => site.id_of(&v.project(ViewShape::E)),
                FiberReading::Displayed if shape == ViewShape::AZ => site.id_of(&v.project(ViewShape::Z)),
                _ => None,
            };
            nonce_fiber(table, relaxed.unwrap_or(o))
        })
        .collect()
}

/// Checks the literal sheaf condition on every declared covering.
pub fn check_sheaf_literal<C: CommitmentValue>(
    table: &PresheafTable,
    site: &SiteDecl<C>,
    reading: FiberReading,
) -> LiteralGluingReport {
    let lit = reading_fibers(table, site, reading);
    let mut totals = [BigUint::zero(), BigUint::zero(), BigUint::zero(), BigUint::zero()];
    let mut coverings = Vec::new();
    let mut coverings_holding = 0;
    for family in site.families() {
        let m = &family.members;
        let doms: Vec<Vec<Scalar>> = m.iter().map(|&o| lit[o].clone()).collect();
        let mut edges = Vec::new();
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if let Some(w) = site.meet(m[i], m[j]) {
                    edges.push((i, j, lit[w].clone()));
                }
            }
        }
        let vars: Vec<usize> = (0..m.len()).collect();
        let matching = count_matching(&vars, &doms, &edges);

        // a glued family has every member section equal to the amalgamation
        let glued: Vec<Scalar> =
            lit[family.target].iter().copied().filter(|r| doms.iter().all(|d| d.contains(r))).collect();
        let (unique, multi) = match (m.is_empty(), glued.len()) {
            (true, 0) => (0u32, 0u32),
            (true, 1) => (1, 0),
            (true, _) => (0, 1),
            (false, n) => (n as u32, 0),
        };
        let (unique, multi) = (BigUint::from(unique), BigUint::from(multi));
        let none = &matching - &unique - &multi;
        let state_lifts = table.fiber(family.target).iter().filter(|s| glued.contains(&s.nonce)).count() as u64;
        let g = CoveringGluing {
            target: site.object(family.target).to_string(),
            kind: family.kind,
            members: m.len(),
            matching_families: matching.to_string(),
            unique: unique.to_string(),
            multi: multi.to_string(),
            none: none.to_string(),
            state_lifts,
        };
        coverings_holding += g.holds() as usize;
        for (t, v) in totals.iter_mut().zip([&matching, &unique, &multi, &none]) {
            *t += v;
        }
        coverings.push(g);
    }
    let [matching_families, unique, multi, none] = totals.map(|t| t.to_string());
    LiteralGluingReport { reading, coverings, matching_families, unique, multi, none, coverings_holding }
}

/// Counts choices `c_i` in `doms[i]` such that for every edge `(i, j, S)`,
/// `c_i, c_j in S` implies `c_i = c_j`.
fn count_matching(vars: &[usize], doms: &[Vec<Scalar>], edges: &[(usize, usize, Vec<Scalar>)]) -> BigUint {
    if vars.iter().any(|&v| doms[v].is_empty()) {
        return BigUint::zero();
    }
    let vacuous = |(i, j, s): &(usize, usize, Vec<Scalar>)| {
        let a: Vec<&Scalar> = doms[*i].iter().filter(|x| s.contains(x)).collect();
        let b: Vec<&Scalar> = doms[*j].iter().filter(|x| s.contains(x)).collect();
        a.is_empty() || b.is_empty() || (a.len() == 1 && a == b)
    };
    let live: Vec<(usize, usize, Vec<Scalar>)> = edges.iter().filter(|e| !vacuous(e)).cloned().collect();

    let mut comp_of: BTreeMap<usize, usize> = vars.iter().map(|&v| (v, v)).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for (i, j, _) in &live {
            let (ci, cj) = (comp_of[i], comp_of[j]);
            if ci != cj {
                let low = ci.min(cj);
                for c in comp_of.values_mut() {
                    if *c == ci || *c == cj {
                        *c = low;
                    }
                }
                changed = true;
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&v, &c) in &comp_of {
        components.entry(c).or_default().push(v);
    }

    let mut total = BigUint::one();
    for (root, comp) in components {
        let comp_edges: Vec<(usize, usize, Vec<Scalar>)> =
            live.iter().filter(|(i, _, _)| comp_of[i] == root).cloned().collect();
        if comp_edges.is_empty() {
            total *= BigUint::from(doms[comp[0]].len());
            continue;
        }
        let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, j, _) in &comp_edges {
            *degree.entry(*i).or_default() += 1;
            *degree.entry(*j).or_default() += 1;
        }
        let pivot = degree.iter().max_by_key(|&(&v, &d)| (d, std::cmp::Reverse(v))).map_or(comp[0], |(&v, _)| v);
        let mut sum = BigUint::zero();
        for value in doms[pivot].clone() {
            let mut local = doms.to_vec();
            local[pivot] = vec![value];
            for (i, j, s) in &comp_edges {
                let other = if *i == pivot { *j } else if *j == pivot { *i } else { continue };
                if s.contains(&value) {
                    local[other].retain(|x| !s.contains(x) || *x == value);
                }
            }
            sum += count_matching(&comp, &local, &comp_edges);
        }
        total *= sum;
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistributionalFailure {
    pub target: String,
    pub kind: FamilyKind,
    pub distance: String,
    pub covers_support: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistributionalReport {
    pub coverings: usize,
    pub passed: usize,
    pub max_distance: String,
    /// Largest distance among the commitment coverings.
    pub commitment_distance: String,
    pub failures: Vec<DistributionalFailure>,
}

impl DistributionalReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Real conditional data on each covered view against data glued from the
/// simulator, compared at `lab.epsilon`.
pub fn check_sheaf_distributional<C: CommitmentValue>(
    table: &PresheafTable,
    site: &SiteDecl<C>,
    lab: &IndistLab<C>,
) -> DistributionalReport {
    let mut max = BigRational::zero();
    let mut commitment = BigRational::zero();
    let mut failures = Vec::new();
    let mut passed = 0;
    for family in site.families() {
        let mut verdict = validate_covering_by_simulation(site, family, lab);
        if table.fiber(family.target).is_empty() {
            verdict.pass = false;
        }
        if verdict.distance > max {
            max = verdict.distance.clone();
        }
        if family.kind == FamilyKind::Commitment && verdict.distance > commitment {
            commitment = verdict.distance.clone();
        }
        if verdict.pass {
            passed += 1;
        } else {
            failures.push(DistributionalFailure {
                target: site.object(family.target).to_string(),
                kind: family.kind,
                distance: format_rational(&verdict.distance),
                covers_support: verdict.covers_support,
            });
        }
    }
    DistributionalReport {
        coverings: site.families().len(),
        passed,
        max_distance: format_rational(&max),
        commitment_distance: format_rational(&commitment),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupParams;
    use proptest::prelude::*;

    fn brute(doms: &[Vec<Scalar>], edges: &[(usize, usize, Vec<Scalar>)]) -> u64 {
        fn go(i: usize, doms: &[Vec<Scalar>], edges: &[(usize, usize, Vec<Scalar>)], pick: &mut Vec<Scalar>) -> u64 {
            if i == doms.len() {
                let ok = edges.iter().all(|(a, b, s)| !(s.contains(&pick[*a]) && s.contains(&pick[*b])) || pick[*a] == pick[*b]);
                return ok as u64;
            }
            let mut n = 0;
            for &v in &doms[i] {
                pick.push(v);
                n += go(i + 1, doms, edges, pick);
                pick.pop();
            }
            n
        }
        go(0, doms, edges, &mut Vec::new())
    }

    fn set(mask: u8) -> Vec<Scalar> {
        let group = GroupParams::new(23, 11, 2).unwrap();
        (0..5).filter(|b| mask & (1 << b) != 0).map(|b| group.scalar(b).unwrap()).collect()
    }

    proptest! {
        #[test]
        fn matching_count_agrees_with_enumeration(
            masks in proptest::collection::vec(0u8..32, 1..6),
            raw_edges in proptest::collection::vec((0usize..6, 0usize..6, 0u8..32), 0..8),
        ) {
            let doms: Vec<Vec<Scalar>> = masks.iter().map(|&m| set(m)).collect();
            let n = doms.len();
            let edges: Vec<(usize, usize, Vec<Scalar>)> = raw_edges
                .into_iter()
                .map(|(i, j, m)| (i % n, j % n, set(m)))
                .filter(|(i, j, _)| i != j)
                .collect();
            let vars: Vec<usize> = (0..n).collect();
            prop_assert_eq!(count_matching(&vars, &doms, &edges), BigUint::from(brute(&doms, &edges)));
        }
    }
}
