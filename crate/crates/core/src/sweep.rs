//! Exhaustive sweeps over every honest execution `(r, e)`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::group::Scalar;
use crate::protocol::{SigmaProtocol, Transcript, Witness};

const MAX_EXAMPLES: usize = 8;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub cases: usize,
    pub failures: usize,
    pub examples: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool, example: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(example());
            }
        }
    }
}

fn honest<P: SigmaProtocol>(proto: &P, witness: &Witness) -> Vec<Transcript<P::Commitment>> {
    let group = *proto.group();
    group.scalars().flat_map(|r| group.scalars().map(move |e| (r, e))).map(|(r, e)| proto.honest_transcript(witness, r, e)).collect()
}

/// Every honest transcript verifies.
pub fn completeness_sweep<P: SigmaProtocol>(proto: &P, statement: &P::Statement, witness: &Witness) -> SweepReport {
    let mut report = SweepReport::default();
    for t in honest(proto, witness) {
        report.record(proto.verify(statement, &t), || format!("rejected {t}"));
    }
    report
}

/// Every single-component substitution of an honest transcript is rejected.
/// Commitments are replaced by every other honest commitment.
pub fn tamper_sweep<P: SigmaProtocol>(proto: &P, statement: &P::Statement, witness: &Witness) -> SweepReport {
    let group = *proto.group();
    let commitments: BTreeSet<P::Commitment> = group.scalars().map(|r| proto.commit(r)).collect();
    let mut report = SweepReport::default();
    for t in honest(proto, witness) {
        for other in group.scalars() {
            if other != t.z {
                let u = Transcript { z: other, ..t };
                report.record(!proto.verify(statement, &u), || format!("accepted {u}"));
            }
            if other != t.e {
                let u = Transcript { e: other, ..t };
                report.record(!proto.verify(statement, &u), || format!("accepted {u}"));
            }
        }
        for &a in commitments.iter().filter(|&&a| a != t.a) {
            let u = Transcript { a, ..t };
            report.record(!proto.verify(statement, &u), || format!("accepted {u}"));
        }
    }
    report
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtractionSweep {
    pub commitments: usize,
    pub pairs: usize,
    pub recoveries: usize,
    pub witnesses: Vec<Scalar>,
    pub examples: Vec<String>,
}

impl ExtractionSweep {
    pub fn passed(&self, expected: Scalar) -> bool {
        self.pairs > 0 && self.recoveries == self.pairs && self.witnesses == [expected]
    }
}

/// For every nonce and every ordered pair of distinct challenges, extracts
/// from the two honest transcripts sharing that commitment.
pub fn extraction_sweep<P: SigmaProtocol>(proto: &P, statement: &P::Statement, witness: &Witness) -> ExtractionSweep {
    let group = *proto.group();
    let mut sweep = ExtractionSweep::default();
    let mut witnesses = BTreeSet::new();
    for r in group.scalars() {
        sweep.commitments += 1;
        for e1 in group.scalars() {
            for e2 in group.scalars().filter(|&e2| e2 != e1) {
                sweep.pairs += 1;
                let t1 = proto.honest_transcript(witness, r, e1);
                let t2 = proto.honest_transcript(witness, r, e2);
                match proto.extract(statement, &t1, &t2) {
                    Ok(w) if w == *witness => {
                        sweep.recoveries += 1;
                        witnesses.insert(w.x);
                    }
                    Ok(w) => {
                        witnesses.insert(w.x);
                        if sweep.examples.len() < MAX_EXAMPLES {
                            sweep.examples.push(format!("{t1} {t2} gave x={}", w.x));
                        }
                    }
                    Err(err) => {
                        if sweep.examples.len() < MAX_EXAMPLES {
                            sweep.examples.push(format!("{t1} {t2}: {err}"));
                        }
                    }
                }
            }
        }
    }
    sweep.witnesses = witnesses.into_iter().collect();
    sweep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupParams;
    use crate::protocol::{ChaumPedersen, Schnorr};

    #[test]
    fn schnorr_sweeps() {
        let group = GroupParams::new(23, 11, 2).unwrap();
        let proto = Schnorr::new(group);
        let (y, w) = proto.keygen(group.scalar(3).unwrap());
        let c = completeness_sweep(&proto, &y, &w);
        assert_eq!((c.cases, c.failures), (121, 0));
        let t = tamper_sweep(&proto, &y, &w);
        assert_eq!((t.cases, t.failures), (121 * 30, 0));
        let x = extraction_sweep(&proto, &y, &w);
        assert_eq!((x.commitments, x.pairs, x.recoveries), (11, 1210, 1210));
        assert!(x.passed(group.scalar(3).unwrap()));
    }

    #[test]
    fn wrong_statement_fails_every_sweep() {
        let group = GroupParams::new(23, 11, 2).unwrap();
        let proto = ChaumPedersen::new(group);
        let (_, w) = proto.keygen(group.scalar(3).unwrap());
        let (other, _) = proto.keygen(group.scalar(4).unwrap());
        // e = 0 never involves the statement
        assert_eq!(completeness_sweep(&proto, &other, &w).failures, 110);
        let x = extraction_sweep(&proto, &other, &w);
        assert_eq!(x.recoveries, 0);
        assert!(!x.examples.is_empty());
    }
}
