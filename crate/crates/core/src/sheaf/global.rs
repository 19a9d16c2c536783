use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{InternalState, PresheafTable};
use crate::dist::SimulatorKind;
use crate::group::Scalar;
use crate::protocol::{SigmaProtocol, Transcript};
use crate::site::SiteDecl;
use crate::view::ViewShape;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivializationEntry {
    pub target: String,
    pub member: String,
    pub e: Scalar,
    pub z: Scalar,
    pub transcript: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TrivializationReport {
    pub members_checked: usize,
    pub members_trivialized: usize,
    pub entries: Vec<TrivializationEntry>,
    pub failures: Vec<String>,
}

impl TrivializationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.members_checked == self.members_trivialized
    }
}

/// For every member of every covering of a commitment view, finds simulator
/// inputs `(e, z)` whose output agrees with the member and verifies publicly.
pub fn local_triviality_witness<P: SigmaProtocol>(
    proto: &P,
    statement: &P::Statement,
    site: &SiteDecl<P::Commitment>,
    simulator: SimulatorKind,
) -> TrivializationReport {
    let group = *proto.group();
    let mut report = TrivializationReport::default();
    for family in site.families().iter().filter(|f| site.object(f.target).shape() == ViewShape::A) {
        let target = site.object(family.target);
        for &m in &family.members {
            let member = site.object(m);
            report.members_checked += 1;
            let es: Vec<Scalar> = member.e.map_or_else(|| group.scalars().collect(), |e| vec![e]);
            let zs: Vec<Scalar> = member.z.map_or_else(|| group.scalars().collect(), |z| vec![z]);
            let found = es.iter().flat_map(|&e| zs.iter().map(move |&z| (e, z))).find_map(|(e, z)| {
                let t = simulator.run(proto, statement, e, z);
                (member.matches(&t) && target.matches(&t) && proto.verify(statement, &t)).then_some((e, z, t))
            });
            match found {
                Some((e, z, t)) => {
                    report.members_trivialized += 1;
                    report.entries.push(TrivializationEntry {
                        target: target.to_string(),
                        member: member.to_string(),
                        e,
                        z,
                        transcript: t.to_string(),
                    });
                }
                None => report.failures.push(format!("{} over {}", member, target)),
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalSectionReport {
    /// Exact count as a decimal string.
    pub global_sections: String,
    /// Full views whose value is forced in every global section.
    pub pinned_full_views: usize,
    pub extraction_pairs: usize,
    pub recoveries: usize,
    pub witnesses: Vec<Scalar>,
    /// No pair of full views with a shared commitment exists.
    pub degenerate: bool,
}

impl GlobalSectionReport {
    /// Either nothing to check, or every extraction returned `expected`.
    pub fn reveals(&self, expected: Scalar) -> bool {
        self.global_sections == "0"
            || self.degenerate
            || (self.recoveries == self.extraction_pairs && self.witnesses == [expected])
    }
}

/// Counts compatible assignments `s_U` in `F(U)` over every object, where
/// compatibility along `X -> U` means `s_U in F(X)` forces `s_X = s_U`, and
/// runs the extractor on every pair of full views sharing a commitment.
pub fn global_section_analysis<P: SigmaProtocol>(
    proto: &P,
    statement: &P::Statement,
    table: &PresheafTable,
    site: &SiteDecl<P::Commitment>,
) -> GlobalSectionReport {
    let count = count_global_sections(table, site);
    let full: Vec<usize> = (0..site.objects().len()).filter(|&o| site.object(o).shape() == ViewShape::FULL).collect();
    let pinned_full_views = full.iter().filter(|&&o| table.fiber(o).len() == 1).count();

    let mut by_commitment: BTreeMap<P::Commitment, Vec<Transcript<P::Commitment>>> = BTreeMap::new();
    for &o in &full {
        if let Some(t) = site.object(o).to_full_transcript() {
            by_commitment.entry(t.a).or_default().push(t);
        }
    }
    let mut pairs = 0;
    let mut recoveries = 0;
    let mut witnesses = BTreeSet::new();
    if !count.is_zero() {
        for ts in by_commitment.values() {
            for t1 in ts {
                for t2 in ts.iter().filter(|t2| t2.e != t1.e) {
                    pairs += 1;
                    if let Ok(w) = proto.extract(statement, t1, t2) {
                        recoveries += 1;
                        witnesses.insert(w.x);
                    }
                }
            }
        }
    }
    GlobalSectionReport {
        global_sections: count.to_string(),
        pinned_full_views,
        extraction_pairs: pairs,
        recoveries,
        witnesses: witnesses.into_iter().collect(),
        degenerate: pairs == 0,
    }
}

struct Problem<'a> {
    fibers: &'a [Vec<InternalState>],
    /// `(finer, coarser)` pairs.
    edges: Vec<(usize, usize)>,
}

impl Problem<'_> {
    fn in_fiber(&self, o: usize, s: &InternalState) -> bool {
        self.fibers[o].binary_search(s).is_ok()
    }

    fn vacuous(&self, doms: &[Vec<InternalState>], (x, u): (usize, usize)) -> bool {
        doms[u].iter().filter(|s| self.in_fiber(x, s)).all(|s| doms[x].len() == 1 && doms[x][0] == *s)
    }

    /// Number of solutions over `vars` given current domains.
    fn count(&self, vars: &[usize], doms: &[Vec<InternalState>], edges: &[(usize, usize)]) -> BigUint {
        if vars.iter().any(|&v| doms[v].is_empty()) {
            return BigUint::zero();
        }
        let live: Vec<(usize, usize)> = edges.iter().copied().filter(|&e| !self.vacuous(doms, e)).collect();

        // connected components over the live constraints
        let mut parent: BTreeMap<usize, usize> = vars.iter().map(|&v| (v, v)).collect();
        fn find(parent: &mut BTreeMap<usize, usize>, v: usize) -> usize {
            let p = parent[&v];
            if p == v {
                return v;
            }
            let root = find(parent, p);
            parent.insert(v, root);
            root
        }
        for &(x, u) in &live {
            let (rx, ru) = (find(&mut parent, x), find(&mut parent, u));
            if rx != ru {
                parent.insert(rx, ru);
            }
        }
        let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in vars {
            let r = find(&mut parent, v);
            components.entry(r).or_default().push(v);
        }

        let mut total = BigUint::one();
        for (root, comp) in components {
            let comp_edges: Vec<(usize, usize)> =
                live.iter().copied().filter(|&(x, _)| find(&mut parent, x) == root).collect();
            if comp_edges.is_empty() {
                total *= BigUint::from(doms[comp[0]].len());
                continue;
            }
            let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
            for &(x, u) in &comp_edges {
                *degree.entry(x).or_default() += 1;
                *degree.entry(u).or_default() += 1;
            }
            let pivot = degree.iter().max_by_key(|&(&v, &d)| (d, std::cmp::Reverse(v))).map_or(comp[0], |(&v, _)| v);
            let mut sum = BigUint::zero();
            for value in doms[pivot].clone() {
                let mut local = doms.to_vec();
                local[pivot] = vec![value];
                for &(x, u) in &comp_edges {
                    if u == pivot && self.in_fiber(x, &value) {
                        local[x].retain(|s| *s == value);
                    } else if x == pivot {
                        local[u].retain(|s| !self.in_fiber(pivot, s) || *s == value);
                    }
                }
                sum += self.count(&comp, &local, &comp_edges);
            }
            total *= sum;
            if total.is_zero() {
                return total;
            }
        }
        total
    }
}

fn count_global_sections<C: crate::protocol::CommitmentValue>(table: &PresheafTable, site: &SiteDecl<C>) -> BigUint {
    let n = site.objects().len();
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| site.refinements(u).iter().filter(move |&&x| x != u).map(move |&x| (x, u))).collect();
    let problem = Problem { fibers: table.fibers(), edges };
    let vars: Vec<usize> = (0..n).collect();
    problem.count(&vars, table.fibers(), &problem.edges)
}
