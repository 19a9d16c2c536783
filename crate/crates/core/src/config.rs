//! Suite configuration, read from TOML.
//!
//! ```toml
//! protocol = "schnorr"
//! p = 23
//! q = 11
//! g = 2
//! x = 3              # or x = "random" together with seed = <n>
//! epsilon = "0/1"
//! checks = ["completeness", "hvzk"]
//! emit = "machine"
//! simulator = "honest"
//! ```
//! Integers may be written as TOML integers or as decimal strings.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{format_rational, parse_rational, SimulatorKind};
use crate::group::GroupParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolName {
    Schnorr,
    ChaumPedersen,
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolName::Schnorr => "schnorr",
            ProtocolName::ChaumPedersen => "chaum_pedersen",
        })
    }
}

/// The checks a suite can run, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Group,
    Completeness,
    Tamper,
    Hvzk,
    Topology,
    Coverings,
    Functoriality,
    LiteralGluing,
    DistributionalGluing,
    Torsor,
    LocalTriviality,
    GlobalSections,
}

impl CheckName {
    pub const ALL: [CheckName; 12] = [
        CheckName::Group,
        CheckName::Completeness,
        CheckName::Tamper,
        CheckName::Hvzk,
        CheckName::Topology,
        CheckName::Coverings,
        CheckName::Functoriality,
        CheckName::LiteralGluing,
        CheckName::DistributionalGluing,
        CheckName::Torsor,
        CheckName::LocalTriviality,
        CheckName::GlobalSections,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Group => "group",
            CheckName::Completeness => "completeness",
            CheckName::Tamper => "tamper",
            CheckName::Hvzk => "hvzk",
            CheckName::Topology => "topology",
            CheckName::Coverings => "coverings",
            CheckName::Functoriality => "functoriality",
            CheckName::LiteralGluing => "literal_gluing",
            CheckName::DistributionalGluing => "distributional_gluing",
            CheckName::Torsor => "torsor",
            CheckName::LocalTriviality => "local_triviality",
            CheckName::GlobalSections => "global_sections",
        }
    }
}

impl FromStr for CheckName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckName::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown check {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmitFormat {
    #[default]
    Machine,
    Human,
}

impl FromStr for EmitFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "machine" => Ok(EmitFormat::Machine),
            "human" => Ok(EmitFormat::Human),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSpec {
    Fixed(u64),
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub protocol: ProtocolName,
    pub group: GroupParams,
    /// Second base for Chaum-Pedersen; `None` means `g^2`.
    pub h: Option<u64>,
    pub witness: WitnessSpec,
    pub epsilon: BigRational,
    pub checks: Vec<CheckName>,
    pub emit: EmitFormat,
    pub simulator: SimulatorKind,
}

impl SuiteConfig {
    /// The default example: Schnorr over `p = 23, q = 11, g = 2` with `x = 3`.
    pub fn example() -> Self {
        SuiteConfig {
            protocol: ProtocolName::Schnorr,
            group: GroupParams::new(23, 11, 2).expect("valid example group"),
            h: None,
            witness: WitnessSpec::Fixed(3),
            epsilon: BigRational::zero(),
            checks: CheckName::ALL.to_vec(),
            emit: EmitFormat::Machine,
            simulator: SimulatorKind::Honest,
        }
    }

    /// The secret exponent, drawn from `[1, q)` when random.
    pub fn witness_value(&self) -> u64 {
        match self.witness {
            WitnessSpec::Fixed(x) => x,
            WitnessSpec::Random { seed } => ChaCha8Rng::seed_from_u64(seed).gen_range(1..self.group.q()),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.witness {
            WitnessSpec::Random { seed } => Some(seed),
            WitnessSpec::Fixed(_) => None,
        }
    }

    pub fn epsilon_string(&self) -> String {
        format_rational(&self.epsilon)
    }
}

/// One problem with a config, tagged with where it was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

impl ConfigError {
    fn single(location: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { issues: vec![ConfigIssue { location: location.into(), message: message.into() }] }
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.issues.iter().any(|i| i.message.contains(needle))
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.issues.iter().map(ToString::to_string).collect();
        f.write_str(&lines.join("\n"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum IntField {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    protocol: ProtocolName,
    p: IntField,
    q: IntField,
    g: IntField,
    h: Option<IntField>,
    x: IntField,
    seed: Option<IntField>,
    epsilon: Option<String>,
    checks: Option<Vec<String>>,
    emit: Option<EmitFormat>,
    simulator: Option<SimulatorKind>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, col)
}

fn integer(key: &str, field: &IntField, issues: &mut Vec<ConfigIssue>) -> Option<u64> {
    let value = match field {
        IntField::Int(v) => u64::try_from(*v).ok(),
        IntField::Text(s) if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) => s.parse().ok(),
        IntField::Text(_) => None,
    };
    if value.is_none() {
        issues.push(ConfigIssue { location: key.to_string(), message: "expected a non-negative decimal integer".into() });
    }
    value
}

/// Parses and validates a config. Every problem found is reported.
pub fn parse_config(text: &str) -> Result<SuiteConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let location = match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                format!("line {line}, column {col}")
            }
            None => "config".to_string(),
        };
        ConfigError::single(location, e.message().to_string())
    })?;

    let mut issues = Vec::new();
    let p = integer("p", &raw.p, &mut issues);
    let q = integer("q", &raw.q, &mut issues);
    let g = integer("g", &raw.g, &mut issues);
    let h = raw.h.as_ref().and_then(|h| integer("h", h, &mut issues));
    let seed = raw.seed.as_ref().and_then(|s| integer("seed", s, &mut issues));

    let group = match (p, q, g) {
        (Some(p), Some(q), Some(g)) => {
            let report = GroupParams::unchecked(p, q, g).validate();
            for failure in &report.failures {
                issues.push(ConfigIssue { location: "group".into(), message: failure.to_string() });
            }
            report.is_valid().then(|| GroupParams::unchecked(p, q, g))
        }
        _ => None,
    };

    let witness = match &raw.x {
        IntField::Text(s) if s == "random" => match seed {
            Some(seed) => Some(WitnessSpec::Random { seed }),
            None => {
                if raw.seed.is_none() {
                    issues.push(ConfigIssue { location: "x".into(), message: "seed required when x is \"random\"".into() });
                }
                None
            }
        },
        field => integer("x", field, &mut issues).map(WitnessSpec::Fixed),
    };
    if let (Some(WitnessSpec::Fixed(x)), Some(group)) = (witness, group) {
        if x >= group.q() {
            issues.push(ConfigIssue { location: "x".into(), message: format!("x must lie in [0, {})", group.q()) });
        }
    }

    match (raw.protocol, h, group) {
        (ProtocolName::Schnorr, Some(_), _) => {
            issues.push(ConfigIssue { location: "h".into(), message: "h only applies to chaum_pedersen".into() })
        }
        (ProtocolName::ChaumPedersen, Some(h), Some(group)) => match group.element(h) {
            Ok(e) if e == group.identity() => {
                issues.push(ConfigIssue { location: "h".into(), message: "h must not be the identity".into() })
            }
            Ok(_) => {}
            Err(_) => issues.push(ConfigIssue {
                location: "h".into(),
                message: format!("h not in the order-{} subgroup", group.q()),
            }),
        },
        _ => {}
    }

    let epsilon = match raw.epsilon.as_deref() {
        None => Some(BigRational::zero()),
        Some(s) => match parse_rational(s) {
            Ok(e) => Some(e),
            Err(_) => {
                issues.push(ConfigIssue {
                    location: "epsilon".into(),
                    message: format!("{s:?} is not a non-negative rational num/den"),
                });
                None
            }
        },
    };

    let mut checks = Vec::new();
    match &raw.checks {
        None => checks = CheckName::ALL.to_vec(),
        Some(names) => {
            for name in names {
                match name.parse::<CheckName>() {
                    Ok(c) if !checks.contains(&c) => checks.push(c),
                    Ok(c) => issues.push(ConfigIssue { location: "checks".into(), message: format!("duplicate check {:?}", c.as_str()) }),
                    Err(msg) => issues.push(ConfigIssue { location: "checks".into(), message: msg }),
                }
            }
            checks.sort();
        }
    }

    match (group, witness, epsilon) {
        (Some(group), Some(witness), Some(epsilon)) if issues.is_empty() => Ok(SuiteConfig {
            protocol: raw.protocol,
            group,
            h,
            witness,
            epsilon,
            checks,
            emit: raw.emit.unwrap_or_default(),
            simulator: raw.simulator.unwrap_or_default(),
        }),
        _ => Err(ConfigError { issues }),
    }
}
