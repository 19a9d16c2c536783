//! Runs every configured check and assembles a report.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{CheckName, EmitFormat, ProtocolName, SuiteConfig};
use crate::dist::{format_rational, DistError, IndistLab};
use crate::group::{GroupError, Scalar};
use crate::protocol::{ChaumPedersen, ProtocolError, Schnorr, SigmaProtocol, Witness};
use crate::sheaf::{self, FiberReading, PresheafTable, RerandAction, SheafError};
use crate::site::{self, FamilyKind, SiteDecl, SiteError};
use crate::sweep;

const MAX_EXAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Site(#[from] SiteError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Informational,
}

impl Verdict {
    fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Informational => "informational",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub verdict: Verdict,
    pub details: Value,
    pub counterexamples: Vec<String>,
    /// Wall-clock time; never part of the machine report.
    #[serde(skip)]
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameters {
    pub p: u64,
    pub q: u64,
    pub g: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    pub x: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub protocol: ProtocolName,
    pub parameters: Parameters,
    pub epsilon: String,
    pub simulator: String,
    pub checks: Vec<CheckRecord>,
    pub overall: Verdict,
    /// No check was selected.
    pub degenerate: bool,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn check(&self, name: CheckName) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name.as_str())
    }
}

fn examples<I: IntoIterator<Item = String>>(items: I) -> Vec<String> {
    items.into_iter().take(MAX_EXAMPLES).collect()
}

/// Lazily built shared state, so that later checks reuse earlier work.
struct Context<'a, P: SigmaProtocol> {
    proto: &'a P,
    statement: P::Statement,
    witness: Witness,
    config: &'a SuiteConfig,
    lab: Option<IndistLab<P::Commitment>>,
    site: Option<SiteDecl<P::Commitment>>,
    table: Option<PresheafTable>,
}

impl<P: SigmaProtocol> Context<'_, P> {
    fn lab(&mut self) -> Result<&IndistLab<P::Commitment>, SuiteError> {
        if self.lab.is_none() {
            self.lab = Some(IndistLab::new(
                self.proto,
                &self.statement,
                &self.witness,
                self.config.simulator,
                self.config.epsilon.clone(),
            )?);
        }
        Ok(self.lab.as_ref().expect("just built"))
    }

    fn site(&mut self) -> Result<&SiteDecl<P::Commitment>, SuiteError> {
        if self.site.is_none() {
            let views = site::enumerate_views(self.proto, &self.statement)?;
            self.site = Some(site::declare_standard_coverings(views));
        }
        Ok(self.site.as_ref().expect("just built"))
    }

    fn table(&mut self) -> Result<&PresheafTable, SuiteError> {
        if self.table.is_none() {
            self.site()?;
            let site = self.site.as_ref().expect("built above");
            self.table = Some(sheaf::build_presheaf(self.proto, &self.statement, &self.witness, site)?);
        }
        Ok(self.table.as_ref().expect("just built"))
    }

    fn prepare(&mut self) -> Result<(&SiteDecl<P::Commitment>, &PresheafTable), SuiteError> {
        self.table()?;
        Ok((self.site.as_ref().expect("built"), self.table.as_ref().expect("built")))
    }

    fn run(&mut self, check: CheckName) -> Result<(Verdict, Value, Vec<String>), SuiteError> {
        let proto = self.proto;
        let x = self.witness.x;
        Ok(match check {
            CheckName::Group => {
                let report = proto.group().validate();
                let failures: Vec<String> = report.failures.iter().map(ToString::to_string).collect();
                let g = proto.group();
                (
                    Verdict::of(report.is_valid()),
                    json!({"p": g.p(), "q": g.q(), "g": g.generator().value(), "failures": failures.len()}),
                    failures,
                )
            }
            CheckName::Completeness => {
                let s = sweep::completeness_sweep(proto, &self.statement, &self.witness);
                (Verdict::of(s.passed()), json!({"transcripts": s.cases, "rejected": s.failures}), s.examples)
            }
            CheckName::Tamper => {
                let s = sweep::tamper_sweep(proto, &self.statement, &self.witness);
                (Verdict::of(s.passed()), json!({"substitutions": s.cases, "false_accepts": s.failures}), s.examples)
            }
            CheckName::Hvzk => {
                let lab = self.lab()?;
                let d = lab.hvzk_distance();
                let ok = d <= lab.epsilon;
                let cx = if ok { vec![] } else { vec![format!("distance {} exceeds epsilon", format_rational(&d))] };
                (Verdict::of(ok), json!({"distance": format_rational(&d), "support_real": lab.real.len(), "support_simulated": lab.simulated.len()}), cx)
            }
            CheckName::Topology => {
                let site = self.site()?;
                let r = site::check_topology_axioms(site);
                let cx = examples(
                    r.identity_violations
                        .iter()
                        .map(|v| format!("identity: {v}"))
                        .chain(r.stability_violations.iter().map(|v| format!("stability: {} along {}", v.family.target, v.along)))
                        .chain(r.transitivity_violations.iter().map(|v| format!("transitivity: {}", v.family.target))),
                );
                (
                    Verdict::of(r.passed()),
                    json!({
                        "objects": r.objects,
                        "morphisms": r.morphisms,
                        "families": r.families,
                        "quarantined": site.quarantine().len(),
                        "identity_violations": r.identity_violations.len(),
                        "stability_violations": r.stability_violations.len(),
                        "transitivity_violations": r.transitivity_violations.len(),
                        "transitivity_truncated": r.transitivity_truncated,
                    }),
                    cx,
                )
            }
            CheckName::Coverings => {
                self.lab()?;
                self.site()?;
                let (site, lab) = (self.site.as_ref().expect("built"), self.lab.as_ref().expect("built"));
                let mut passed = 0;
                let mut worst = <num_rational::BigRational as num_traits::Zero>::zero();
                let mut commitment = <num_rational::BigRational as num_traits::Zero>::zero();
                let mut cx = Vec::new();
                for f in site.families() {
                    let v = site::validate_covering_by_simulation(site, f, lab);
                    if v.distance > worst {
                        worst = v.distance.clone();
                    }
                    if f.kind == FamilyKind::Commitment && v.distance > commitment {
                        commitment = v.distance.clone();
                    }
                    if v.pass {
                        passed += 1;
                    } else if cx.len() < MAX_EXAMPLES {
                        cx.push(format!("{:?} on {}: distance {}", f.kind, site.object(f.target), format_rational(&v.distance)));
                    }
                }
                let total = site.families().len();
                (
                    Verdict::of(passed == total),
                    json!({"families": total, "passed": passed, "max_distance": format_rational(&worst), "commitment_distance": format_rational(&commitment)}),
                    cx,
                )
            }
            CheckName::Functoriality => {
                let (site, table) = self.prepare()?;
                let r = sheaf::check_functoriality(table, site);
                let cx = examples(
                    r.identity_violations
                        .iter()
                        .chain(&r.composition_violations)
                        .chain(&r.inclusion_violations)
                        .cloned(),
                );
                let fibers = fiber_summary(site, table);
                (
                    Verdict::of(r.passed()),
                    json!({
                        "morphisms": r.morphisms,
                        "composable_pairs": r.composable_pairs,
                        "violations": r.identity_violations.len() + r.composition_violations.len() + r.inclusion_violations.len(),
                        "fiber_sizes": fibers,
                    }),
                    cx,
                )
            }
            CheckName::LiteralGluing => {
                let (site, table) = self.prepare()?;
                let r = sheaf::check_sheaf_literal(table, site, FiberReading::Displayed);
                let strict = sheaf::check_sheaf_literal(table, site, FiberReading::Strict);
                let commitment: Vec<_> = r.coverings.iter().filter(|g| g.kind == FamilyKind::Commitment).collect();
                let glued_once = commitment.iter().filter(|g| g.unique == "1" && g.multi == "0").count();
                let cx = examples(
                    r.coverings
                        .iter()
                        .filter(|g| !g.holds())
                        .map(|g| format!("{:?} on {}: {} of {} matching families glue", g.kind, g.target, g.unique, g.matching_families)),
                );
                (
                    Verdict::Informational,
                    json!({
                        "reading": r.reading,
                        "coverings": r.coverings.len(),
                        "coverings_holding": r.coverings_holding,
                        "matching_families": r.matching_families,
                        "unique": r.unique,
                        "multi": r.multi,
                        "none": r.none,
                        "literal_condition_holds": r.holds(),
                        "strict_reading_holds": strict.holds(),
                        "commitment_coverings": commitment.len(),
                        "commitment_glued_exactly_once": glued_once,
                        "commitment_matching_families": commitment.first().map(|g| g.matching_families.clone()),
                        "commitment_state_lifts": commitment.iter().map(|g| g.state_lifts).sum::<u64>(),
                    }),
                    cx,
                )
            }
            CheckName::DistributionalGluing => {
                self.lab()?;
                self.table()?;
                let (site, table) = (self.site.as_ref().expect("built"), self.table.as_ref().expect("built"));
                let r = sheaf::check_sheaf_distributional(table, site, self.lab.as_ref().expect("built"));
                let cx = examples(r.failures.iter().map(|f| format!("{:?} on {}: distance {}", f.kind, f.target, f.distance)));
                (
                    Verdict::of(r.holds()),
                    json!({"coverings": r.coverings, "passed": r.passed, "max_distance": r.max_distance, "commitment_distance": r.commitment_distance}),
                    cx,
                )
            }
            CheckName::Torsor => {
                let (site, table) = self.prepare()?;
                let r = sheaf::check_torsor(proto, table, &RerandAction::new(*proto.group()), site);
                let b = &r.base_change;
                let cx = examples(
                    b.object_failures
                        .iter()
                        .chain(&b.morphism_failures)
                        .chain(&b.family_failures)
                        .chain(&b.fiber_failures)
                        .chain(&b.composition_failures)
                        .chain(&b.identity_failures)
                        .cloned(),
                );
                (
                    Verdict::of(r.passed()),
                    json!({
                        "fiberwise": r.fiberwise,
                        "shifts": b.shifts,
                        "base_change_violations": b.object_failures.len() + b.morphism_failures.len() + b.family_failures.len()
                            + b.fiber_failures.len() + b.composition_failures.len() + b.identity_failures.len(),
                    }),
                    cx,
                )
            }
            CheckName::LocalTriviality => {
                let statement = self.statement.clone();
                let simulator = self.config.simulator;
                let site = self.site()?;
                let r = sheaf::local_triviality_witness(proto, &statement, site, simulator);
                (
                    Verdict::of(r.passed()),
                    json!({"members": r.members_checked, "trivialized": r.members_trivialized}),
                    examples(r.failures.iter().cloned()),
                )
            }
            CheckName::GlobalSections => {
                let statement = self.statement.clone();
                let (site, table) = self.prepare()?;
                let r = sheaf::global_section_analysis(proto, &statement, table, site);
                let sweep = sweep::extraction_sweep(proto, &statement, &self.witness);
                let ok = r.reveals(x) && sweep.passed(x);
                let mut cx = sweep.examples.clone();
                if !r.reveals(x) {
                    cx.push(format!("global sections extracted {:?}", r.witnesses.iter().map(|w| w.value()).collect::<Vec<_>>()));
                }
                (
                    Verdict::of(ok),
                    json!({
                        "global_sections": r.global_sections,
                        "pinned_full_views": r.pinned_full_views,
                        "extraction_pairs": r.extraction_pairs,
                        "recoveries": r.recoveries,
                        "witnesses": r.witnesses.iter().map(|w: &Scalar| w.value()).collect::<Vec<_>>(),
                        "degenerate": r.degenerate,
                        "sweep_pairs": sweep.pairs,
                        "sweep_recoveries": sweep.recoveries,
                    }),
                    examples(cx),
                )
            }
        })
    }
}

fn fiber_summary<C: crate::protocol::CommitmentValue>(site: &SiteDecl<C>, table: &PresheafTable) -> Value {
    let mut out = serde_json::Map::new();
    for shape in crate::view::ViewShape::all() {
        let mut sizes: Vec<usize> =
            (0..site.objects().len()).filter(|&o| site.object(o).shape() == shape).map(|o| table.fiber(o).len()).collect();
        sizes.sort_unstable();
        sizes.dedup();
        out.insert(shape.to_string(), json!(sizes));
    }
    Value::Object(out)
}

fn run_with<P: SigmaProtocol>(proto: &P, config: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let x = config.witness_value();
    let (statement, witness) = proto.keygen(proto.group().scalar(x)?);
    let mut ctx = Context { proto, statement, witness, config, lab: None, site: None, table: None };
    let mut checks = Vec::new();
    for &check in &config.checks {
        let start = Instant::now();
        let (verdict, details, counterexamples) = ctx.run(check)?;
        checks.push(CheckRecord {
            name: check.as_str().to_string(),
            verdict,
            details,
            counterexamples,
            elapsed_ms: start.elapsed().as_millis(),
        });
    }
    let overall = Verdict::of(checks.iter().all(|c| c.verdict != Verdict::Fail));
    Ok(SuiteReport {
        protocol: config.protocol,
        parameters: Parameters {
            p: proto.group().p(),
            q: proto.group().q(),
            g: proto.group().generator().value(),
            h: None,
            x,
            seed: config.seed(),
        },
        epsilon: config.epsilon_string(),
        simulator: config.simulator.to_string(),
        degenerate: checks.is_empty(),
        checks,
        overall,
    })
}

/// Runs the configured checks in their fixed order.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    match config.protocol {
        ProtocolName::Schnorr => run_with(&Schnorr::new(config.group), config),
        ProtocolName::ChaumPedersen => {
            let proto = match config.h {
                Some(h) => ChaumPedersen::with_base(config.group, h)?,
                None => ChaumPedersen::new(config.group),
            };
            let mut report = run_with(&proto, config)?;
            report.parameters.h = Some(proto.second_base().value());
            Ok(report)
        }
    }
}

/// Machine output is pretty JSON with a fixed key order and no timings.
pub fn emit_report(report: &SuiteReport, format: EmitFormat) -> String {
    match format {
        EmitFormat::Machine => {
            let mut text = serde_json::to_string_pretty(report).expect("report serializes");
            text.push('\n');
            text
        }
        EmitFormat::Human => human(report),
    }
}

fn human(report: &SuiteReport) -> String {
    let mut out = String::new();
    let p = &report.parameters;
    let _ = write!(out, "{} over p={} q={} g={}", report.protocol, p.p, p.q, p.g);
    if let Some(h) = p.h {
        let _ = write!(out, " h={h}");
    }
    let _ = writeln!(out, " x={} epsilon={} simulator={}", p.x, report.epsilon, report.simulator);
    for c in &report.checks {
        let _ = writeln!(out, "[{:<13}] {:<22} {:>6} ms  {}", c.verdict.as_str(), c.name, c.elapsed_ms, flatten(&c.details));
        for ex in &c.counterexamples {
            let _ = writeln!(out, "    {ex}");
        }
    }
    if report.degenerate {
        let _ = writeln!(out, "no checks selected");
    }
    let _ = writeln!(out, "overall: {}", report.overall.as_str());
    out
}

fn flatten(details: &Value) -> String {
    match details {
        Value::Object(map) => map
            .iter()
            .filter(|(_, v)| !v.is_object() && !v.is_array())
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests;
