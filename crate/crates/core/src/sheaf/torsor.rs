use std::collections::BTreeSet;

use serde::Serialize;

use super::{InternalState, PresheafTable};
use crate::group::{GroupParams, Scalar};
use crate::protocol::SigmaProtocol;
use crate::site::SiteDecl;
use crate::view::{ViewObject, ViewShape};

/// Counterexamples kept per category.
const MAX_EXAMPLES: usize = 8;

/// The nonce shift `t . (r, e) = (r + t, e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RerandAction {
    group: GroupParams,
}

impl RerandAction {
    pub fn new(group: GroupParams) -> Self {
        RerandAction { group }
    }

    pub fn shifts(&self) -> impl Iterator<Item = Scalar> {
        self.group.scalars()
    }

    pub fn act(&self, t: Scalar, s: InternalState) -> InternalState {
        InternalState { nonce: self.group.add(s.nonce, t), challenge: s.challenge }
    }

    pub fn compose(&self, t: Scalar, s: Scalar) -> Scalar {
        self.group.add(t, s)
    }
}

/// `sigma_t (a, e, z) = (a g^t, e, z + t)` on whatever the view reveals.
pub fn rerandomize_view<P: SigmaProtocol>(
    proto: &P,
    view: &ViewObject<P::Commitment>,
    t: Scalar,
) -> ViewObject<P::Commitment> {
    let group = proto.group();
    ViewObject { a: view.a.map(|a| proto.shift_commitment(a, t)), e: view.e, z: view.z.map(|z| group.add(z, t)) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberwiseShapeReport {
    pub shape: String,
    pub views: usize,
    pub preserved: usize,
    pub free: usize,
    pub transitive: usize,
    /// Transitive once the challenge is held fixed.
    pub transitive_within_challenge: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BaseChangeReport {
    pub shifts: usize,
    pub object_failures: Vec<String>,
    pub morphism_failures: Vec<String>,
    pub family_failures: Vec<String>,
    pub fiber_failures: Vec<String>,
    pub composition_failures: Vec<String>,
    pub identity_failures: Vec<String>,
}

impl BaseChangeReport {
    pub fn passed(&self) -> bool {
        self.object_failures.is_empty()
            && self.morphism_failures.is_empty()
            && self.family_failures.is_empty()
            && self.fiber_failures.is_empty()
            && self.composition_failures.is_empty()
            && self.identity_failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsorReport {
    pub fiberwise: Vec<FiberwiseShapeReport>,
    pub base_change: BaseChangeReport,
}

impl TorsorReport {
    pub fn shape(&self, shape: ViewShape) -> Option<&FiberwiseShapeReport> {
        let name = shape.to_string();
        self.fiberwise.iter().find(|r| r.shape == name)
    }

    /// Free and transitive on every fiber whose shape fixes the challenge and
    /// hides the commitment; base change an automorphism.
    pub fn passed(&self) -> bool {
        let fixed_e = self.shape(ViewShape::E).is_some_and(|r| r.free == r.views && r.transitive == r.views);
        fixed_e && self.base_change.passed()
    }
}

fn push(list: &mut Vec<String>, msg: impl FnOnce() -> String) {
    if list.len() < MAX_EXAMPLES {
        list.push(msg());
    }
}

fn fiber_stats(action: &RerandAction, fiber: &[InternalState]) -> (bool, bool, bool, bool) {
    let set: BTreeSet<InternalState> = fiber.iter().copied().collect();
    let preserved = action.shifts().all(|t| set.iter().all(|&s| set.contains(&action.act(t, s))));
    if !preserved {
        return (false, false, false, false);
    }
    let free = set.iter().all(|&s| action.shifts().filter(|&t| action.act(t, s) == s).count() == 1);
    let relating = |s1: InternalState, s2: InternalState| action.shifts().filter(|&t| action.act(t, s1) == s2).count();
    let transitive = set.iter().all(|&s1| set.iter().all(|&s2| relating(s1, s2) == 1));
    let within = set
        .iter()
        .all(|&s1| set.iter().filter(|s2| s2.challenge == s1.challenge).all(|&s2| relating(s1, s2) == 1));
    (preserved, free, transitive, within)
}

pub fn check_torsor<P: SigmaProtocol>(
    proto: &P,
    table: &PresheafTable,
    action: &RerandAction,
    site: &SiteDecl<P::Commitment>,
) -> TorsorReport {
    let mut fiberwise = Vec::new();
    for shape in ViewShape::all().filter(|s| !s.has_a()) {
        let mut r = FiberwiseShapeReport {
            shape: shape.to_string(),
            views: 0,
            preserved: 0,
            free: 0,
            transitive: 0,
            transitive_within_challenge: 0,
        };
        for (id, _) in site.objects().iter().enumerate().filter(|(_, v)| v.shape() == shape) {
            let (p, f, t, w) = fiber_stats(action, table.fiber(id));
            r.views += 1;
            r.preserved += p as usize;
            r.free += f as usize;
            r.transitive += t as usize;
            r.transitive_within_challenge += w as usize;
        }
        fiberwise.push(r);
    }
    TorsorReport { fiberwise, base_change: base_change(proto, table, action, site) }
}

fn base_change<P: SigmaProtocol>(
    proto: &P,
    table: &PresheafTable,
    action: &RerandAction,
    site: &SiteDecl<P::Commitment>,
) -> BaseChangeReport {
    let n = site.objects().len();
    let mut report = BaseChangeReport { shifts: action.shifts().count(), ..Default::default() };
    let name = |o: usize| site.object(o).to_string();
    let mut images: Vec<Vec<Option<usize>>> = Vec::new();

    for t in action.shifts() {
        let image: Vec<Option<usize>> =
            site.objects().iter().map(|v| site.id_of(&rerandomize_view(proto, v, t))).collect();
        let hit: BTreeSet<usize> = image.iter().flatten().copied().collect();
        if hit.len() != n || image.iter().any(Option::is_none) {
            push(&mut report.object_failures, || format!("t={t}: not a bijection on objects"));
            images.push(image);
            continue;
        }
        let sigma = |o: usize| image[o].unwrap_or(o);
        if t == Scalar::ZERO && (0..n).any(|o| sigma(o) != o) {
            push(&mut report.identity_failures, || "t=0 moves an object".to_string());
        }
        // a bijection on objects sending morphisms to morphisms is a bijection
        // on morphisms since both sides have the same finite count
        for u in 0..n {
            for &x in site.refinements(u) {
                if !site.has_morphism(sigma(x), sigma(u)) {
                    push(&mut report.morphism_failures, || format!("t={t}: {} -> {}", name(x), name(u)));
                }
            }
        }
        for f in site.families() {
            let mut members: Vec<usize> = f.members.iter().map(|&m| sigma(m)).collect();
            members.sort_unstable();
            if !site.families_on(sigma(f.target)).any(|(_, g)| g.members == members) {
                push(&mut report.family_failures, || format!("t={t}: {:?} family on {}", f.kind, name(f.target)));
            }
        }
        for o in 0..n {
            let mut moved: Vec<InternalState> = table.fiber(o).iter().map(|&s| action.act(t, s)).collect();
            moved.sort();
            if moved != table.fiber(sigma(o)) {
                push(&mut report.fiber_failures, || format!("t={t}: F({}) -> F({})", name(o), name(sigma(o))));
            }
        }
        images.push(image);
    }

    let shifts: Vec<Scalar> = action.shifts().collect();
    for (i, &t) in shifts.iter().enumerate() {
        for (j, &s) in shifts.iter().enumerate() {
            let k = shifts.iter().position(|&u| u == action.compose(t, s)).unwrap_or(0);
            let ok = (0..n).all(|o| images[j][o].and_then(|so| images[i][so]) == images[k][o]);
            if !ok {
                push(&mut report.composition_failures, || format!("sigma_{t} . sigma_{s} != sigma_{}", shifts[k]));
            }
        }
    }
    report
}
