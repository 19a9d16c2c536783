use super::*;
use crate::dist::SimulatorKind;
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::protocol::Schnorr;
use num_traits::Zero;

fn schnorr() -> (Schnorr, GroupParams, GroupElement) {
    let group = GroupParams::new(23, 11, 2).unwrap();
    let p = Schnorr::new(group);
    let y = p.keygen(group.scalar(3).unwrap()).0;
    (p, group, y)
}

fn sc(group: &GroupParams, v: u64) -> Scalar {
    group.scalar(v).unwrap()
}

fn standard() -> SiteDecl<GroupElement> {
    let (p, _, y) = schnorr();
    declare_standard_coverings(enumerate_views(&p, &y).unwrap())
}

fn lab(simulator: SimulatorKind) -> IndistLab<GroupElement> {
    let (p, group, y) = schnorr();
    let w = p.keygen(group.scalar(3).unwrap()).1;
    IndistLab::new(&p, &y, &w, simulator, BigRational::zero()).unwrap()
}

#[test]
fn view_counts_match_brute_force() {
    let (p, group, y) = schnorr();
    let views = enumerate_views(&p, &y).unwrap();
    assert_eq!(views.count_by_shape(), [1, 11, 11, 121, 11, 121, 121, 121]);
    assert_eq!(views.objects.len(), 518);

    // oracle: a candidate is consistent iff some accepting (a, e, z) agrees with it
    let elements = group.elements();
    let accepting: Vec<Transcript<GroupElement>> = elements
        .iter()
        .flat_map(|&a| group.scalars().flat_map(move |e| group.scalars().map(move |z| Transcript { a, e, z })))
        .filter(|t| p.verify(&y, t))
        .collect();
    let opt = |v: Vec<Scalar>| std::iter::once(None).chain(v.into_iter().map(Some)).collect::<Vec<_>>();
    let scalars: Vec<Scalar> = group.scalars().collect();
    let mut brute = 0;
    for a in std::iter::once(None).chain(elements.iter().copied().map(Some)) {
        for &e in &opt(scalars.clone()) {
            for &z in &opt(scalars.clone()) {
                let v = ViewObject { a, e, z };
                if accepting.iter().any(|t| v.matches(t)) {
                    brute += 1;
                    assert!(views.objects.contains(&v), "missing {v}");
                }
            }
        }
    }
    assert_eq!(brute, 518);
    // only full-shape candidates are inconsistent for Schnorr
    assert_eq!(views.quarantine.len(), 11 * 121 - 121);
}

#[test]
fn full_view_membership() {
    let (p, group, y) = schnorr();
    let views = enumerate_views(&p, &y).unwrap();
    let nine = group.element(9).unwrap();
    let good = ViewObject { a: Some(nine), e: Some(sc(&group, 4)), z: Some(sc(&group, 6)) };
    let bad = ViewObject { a: Some(nine), e: Some(sc(&group, 4)), z: Some(sc(&group, 7)) };
    assert!(views.objects.contains(&good));
    assert!(!views.objects.contains(&bad));
    assert!(views.quarantine.contains(&bad));
    assert_eq!(views.objects.iter().filter(|v| v.shape() == ViewShape::EMPTY).count(), 1);
}

#[test]
fn standard_families_examples() {
    let (_, group, _) = schnorr();
    let site = standard();
    let nine = group.element(9).unwrap();
    let a9 = site.id_of(&ViewObject::commitment(nine)).unwrap();

    let commitment: Vec<&CoveringFamily> =
        site.families_on(a9).map(|(_, f)| f).filter(|f| f.kind == FamilyKind::Commitment).collect();
    assert_eq!(commitment.len(), 1);
    let members = &commitment[0].members;
    assert_eq!(members.len(), 22);
    assert_eq!(members.iter().filter(|&&m| site.object(m).shape() == ViewShape::AE).count(), 11);
    assert_eq!(members.iter().filter(|&&m| site.object(m).shape() == ViewShape::AZ).count(), 11);

    for u in 0..site.objects().len() {
        assert!(site.families_on(u).any(|(_, f)| f.is_identity()));
    }

    let ae = site.id_of(&ViewObject { a: Some(nine), e: Some(sc(&group, 4)), z: None }).unwrap();
    let refinement: Vec<&CoveringFamily> =
        site.families_on(ae).map(|(_, f)| f).filter(|f| f.kind == FamilyKind::Refinement).collect();
    assert_eq!(refinement.len(), 1);
    assert_eq!(refinement[0].members.len(), 1);
    assert_eq!(site.object(refinement[0].members[0]).z, Some(sc(&group, 6)));
}

#[test]
fn closure_contents() {
    let site = standard();
    let count = |k: FamilyKind| site.families().iter().filter(|f| f.kind == k).count();
    assert_eq!(count(FamilyKind::Identity), 518);
    assert_eq!(count(FamilyKind::Commitment), 11);
    assert_eq!(count(FamilyKind::Refinement), 121);
    // base change of the commitment covering along (a,e) -> a and (a,z) -> a
    assert_eq!(count(FamilyKind::Pullback), 242);
    // the commitment covering composed with the refinements
    assert_eq!(count(FamilyKind::Composite), 11);
}

#[test]
fn thin_category() {
    let site = standard();
    for u in 0..site.objects().len() {
        for &x in site.refinements(u) {
            let m = site.morphism(x, u).unwrap();
            assert_eq!(m.source, *site.object(x));
            assert_eq!(m.target, *site.object(u));
            if x != u {
                assert!(site.morphism(u, x).is_none(), "antisymmetry");
            }
        }
    }
}

#[test]
fn standard_site_passes_axioms() {
    let report = check_topology_axioms(&standard());
    assert_eq!(report.objects, 518);
    assert!(report.passed(), "{report:?}");
}

#[test]
fn discrete_site_passes_axioms() {
    let site = SiteDecl::discrete(standard().objects().to_vec());
    assert!(check_topology_axioms(&site).passed());
}

#[test]
fn missing_pullback_is_a_stability_violation() {
    let (_, group, _) = schnorr();
    let site = standard();
    let nine = group.element(9).unwrap();
    let ae = site.id_of(&ViewObject { a: Some(nine), e: Some(sc(&group, 4)), z: None }).unwrap();
    let (idx, _) = site.families_on(ae).find(|(_, f)| f.kind == FamilyKind::Pullback).unwrap();
    let report = check_topology_axioms(&site.without_family(idx));
    assert!(!report.stability_ok());
    assert!(report.stability_violations.iter().any(|v| v.family.kind == FamilyKind::Commitment));
}

#[test]
fn missing_identity_is_reported() {
    let site = standard();
    let idx = site.families().iter().position(CoveringFamily::is_identity).unwrap();
    assert_eq!(check_topology_axioms(&site.without_family(idx)).identity_violations.len(), 1);
}

#[test]
fn missing_composite_is_a_transitivity_violation() {
    let site = standard();
    let idx = site.families().iter().position(|f| f.kind == FamilyKind::Composite).unwrap();
    let report = check_topology_axioms(&site.without_family(idx));
    assert!(!report.transitivity_ok());
    assert!(report.stability_ok());
}

#[test]
fn family_validation_rejects_non_refinements() {
    let site = standard();
    let empty = site.id_of(&ViewObject::EMPTY).unwrap();
    let bad = CoveringFamily::new(1, [empty], FamilyKind::Declared);
    assert!(matches!(site.with_family(bad), Err(SiteError::NotARefinement { .. })));
}

#[test]
fn covering_validation_examples() {
    let (_, group, _) = schnorr();
    let site = standard();
    let honest = lab(SimulatorKind::Honest);
    let nine = group.element(9).unwrap();
    let a9 = site.id_of(&ViewObject::commitment(nine)).unwrap();
    let (_, commitment) = site.families_on(a9).find(|(_, f)| f.kind == FamilyKind::Commitment).unwrap();
    let verdict = validate_covering_by_simulation(&site, commitment, &honest);
    assert!(verdict.pass && verdict.covers_support);
    assert!(verdict.distance.is_zero());

    for f in site.families() {
        let v = validate_covering_by_simulation(&site, f, &honest);
        assert!(v.pass && v.distance.is_zero(), "family on {}", site.object(f.target));
    }

    let faulty = lab(SimulatorKind::ConstantResponse);
    let verdict = validate_covering_by_simulation(&site, commitment, &faulty);
    assert!(!verdict.pass);
    assert_eq!(verdict.distance, BigRational::new(10.into(), 11.into()));
}

#[test]
fn partial_family_does_not_cover() {
    let (_, group, _) = schnorr();
    let site = standard();
    let nine = group.element(9).unwrap();
    let a9 = site.id_of(&ViewObject::commitment(nine)).unwrap();
    let ae = site.id_of(&ViewObject { a: Some(nine), e: Some(sc(&group, 4)), z: None }).unwrap();
    let lone = CoveringFamily::new(a9, [ae], FamilyKind::Declared);
    let verdict = validate_covering_by_simulation(&site, &lone, &lab(SimulatorKind::Honest));
    assert!(!verdict.covers_support);
    assert!(!verdict.pass);
}

#[test]
fn dump_is_stable() {
    let site = standard();
    let text = dump_site(&site);
    assert_eq!(text, dump_site(&standard()));
    assert!(text.starts_with("# objects 518\nshape {} count 1\n"));
    assert!(text.contains("shape {a,e,z} count 121"));
}
