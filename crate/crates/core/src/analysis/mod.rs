//! Good sets of lifts, their classification by characters of C_D(E), and
//! the structural checks behind it.

mod checks;

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

pub use checks::{
    check_conjugacy_forcing, check_stable_chars, ext_quiver, stable_chars_of, ConjugacyReport, ExtQuiver,
    StableCharReport,
};

use crate::error::{Error, Result};
use crate::ext::{ExtEngine, ExtMode};
use crate::ring::{OModuleClass, Valuation};

/// Default cap on the number of candidate sets examined.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 1_000_000;

/// One lift per Brauer character: `members[psi]` is a block character index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CandidateSet {
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairExt {
    pub first: usize,
    pub second: usize,
    pub ext2: OModuleClass,
    pub conforming: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodnessReport {
    pub set: CandidateSet,
    pub good: bool,
    pub pairs: Vec<PairExt>,
    /// first failing pair, if any
    pub witness: Option<(usize, usize)>,
    /// theta in Irr(D_2) (D_2 coordinates) when every member restricts to
    /// 1 on D_1 and to a common theta on D_2
    pub theta: Option<usize>,
}

/// Whether an Ext^2 class is a sum of O/p^m with m >= 1 (m >= 2 when p = 2).
pub fn conforms_to_good(class: &OModuleClass, p: u64) -> bool {
    let least = Valuation::integer(if p == 2 { 2 } else { 1 });
    class.free_rank == 0 && class.torsion().iter().all(|v| v.is_integer() && *v >= least)
}

/// Ext^2 for ordered pairs, computed in parallel and kept for reuse.
pub struct Ext2Table<'e, 'a> {
    engine: &'e ExtEngine<'a>,
    mode: ExtMode,
    table: HashMap<(usize, usize), OModuleClass>,
}

impl<'e, 'a> Ext2Table<'e, 'a> {
    pub fn new(engine: &'e ExtEngine<'a>, mode: ExtMode) -> Self {
        Ext2Table { engine, mode, table: HashMap::new() }
    }

    /// Computes every missing ordered pair drawn from `chars`.
    pub fn fill(&mut self, chars: &[usize]) -> Result<()> {
        let block = self.engine.block;
        let missing: Vec<(usize, usize)> = chars
            .iter()
            .cartesian_product(chars)
            .map(|(&a, &b)| (a, b))
            .filter(|k| !self.table.contains_key(k))
            .collect();
        let computed = missing
            .par_iter()
            .map(|&(a, b)| {
                let class = self.engine.ext(&block.chars[a], &block.chars[b], 2, self.mode)?;
                Ok(((a, b), class))
            })
            .collect::<Result<Vec<_>>>()?;
        self.table.extend(computed);
        Ok(())
    }

    pub fn get(&mut self, a: usize, b: usize) -> Result<OModuleClass> {
        if !self.table.contains_key(&(a, b)) {
            self.fill(&[a, b])?;
        }
        Ok(self.table[&(a, b)].clone())
    }

    pub fn is_good(&mut self, set: &CandidateSet) -> Result<GoodnessReport> {
        self.fill(&set.members)?;
        let p = self.engine.prime();
        let mut pairs = Vec::new();
        let mut witness = None;
        for (&a, &b) in set.members.iter().cartesian_product(&set.members) {
            let ext2 = self.table[&(a, b)].clone();
            let conforming = conforms_to_good(&ext2, p);
            if !conforming && witness.is_none() {
                witness = Some((a, b));
            }
            pairs.push(PairExt { first: a, second: b, ext2, conforming });
        }
        Ok(GoodnessReport {
            set: set.clone(),
            good: witness.is_none(),
            pairs,
            witness,
            theta: common_theta(self.engine, set),
        })
    }
}

fn common_theta(engine: &ExtEngine, set: &CandidateSet) -> Option<usize> {
    let block = engine.block;
    let chars: Vec<_> = set.members.iter().map(|&i| &block.chars[i]).collect();
    if chars.iter().any(|c| block.alpha(c) != 0) {
        return None;
    }
    chars.iter().map(|c| block.theta(c)).all_equal_value().ok()
}

/// Checks the goodness property for one candidate set.
pub fn is_good(engine: &ExtEngine, set: &CandidateSet, mode: ExtMode) -> Result<GoodnessReport> {
    validate_candidate(engine, set)?;
    Ext2Table::new(engine, mode).is_good(set)
}

fn validate_candidate(engine: &ExtEngine, set: &CandidateSet) -> Result<()> {
    let block = engine.block;
    if set.members.len() != block.brauer.len() {
        return Err(Error::InvalidInput(format!(
            "a candidate set needs {} members, got {}",
            block.brauer.len(),
            set.members.len()
        )));
    }
    for (psi, &c) in set.members.iter().enumerate() {
        if !block.lifts_of(psi).contains(&c) {
            return Err(Error::InvalidInput(format!("character {c} does not lift Brauer character {psi}")));
        }
    }
    Ok(())
}

/// Number of candidate sets: the product of the lift counts.
pub fn candidate_count(engine: &ExtEngine) -> u128 {
    (0..engine.block.brauer.len()).map(|psi| engine.block.lifts_of(psi).len() as u128).product()
}

/// Every good candidate set, by exhaustive search.
pub fn enumerate_good_sets(engine: &ExtEngine, bound: u128, mode: ExtMode) -> Result<Vec<GoodnessReport>> {
    let block = engine.block;
    let count = candidate_count(engine);
    if count > bound {
        return Err(Error::EnumerationBoundExceeded { count, bound });
    }
    let lifts: Vec<Vec<usize>> = (0..block.brauer.len()).map(|psi| block.lifts_of(psi)).collect();
    let mut table = Ext2Table::new(engine, mode);
    table.fill(&lifts.concat())?;
    let mut good = Vec::new();
    for members in lifts.iter().multi_cartesian_product() {
        let set = CandidateSet { members: members.into_iter().copied().collect() };
        let report = table.is_good(&set)?;
        if report.good {
            good.push(report);
        }
    }
    // with no Brauer characters the empty choice is the only candidate
    if lifts.is_empty() && good.is_empty() {
        good.push(table.is_good(&CandidateSet { members: Vec::new() })?);
    }
    Ok(good)
}

/// For each theta in Irr(D_2), the lifts lying over 1_{D_1} x theta, ordered
/// by Brauer character.
pub fn predicted_good_sets(engine: &ExtEngine) -> Result<Vec<(usize, CandidateSet)>> {
    let block = engine.block;
    let d2 = &block.group.d2.group;
    (0..d2.size())
        .map(|theta| {
            let members = (0..block.brauer.len())
                .map(|psi| {
                    block
                        .lifts_of(psi)
                        .into_iter()
                        .find(|&i| {
                            let c = &block.chars[i];
                            block.alpha(c) == 0 && block.theta(c) == theta
                        })
                        .ok_or_else(|| {
                            Error::DimensionCheck(format!("no lift of {psi} lies over 1 x theta_{theta}"))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((theta, CandidateSet { members }))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub holds: bool,
    pub enumerated: Vec<CandidateSet>,
    pub predicted: Vec<CandidateSet>,
    /// predicted but not found good, with the evidence
    pub missing: Vec<GoodnessReport>,
    /// found good but not predicted
    pub unexpected: Vec<GoodnessReport>,
}

/// Compares the exhaustive search with the predicted good sets.
pub fn verify_classification(engine: &ExtEngine, bound: u128, mode: ExtMode) -> Result<ClassificationReport> {
    let found = enumerate_good_sets(engine, bound, mode)?;
    let predicted: Vec<CandidateSet> = predicted_good_sets(engine)?.into_iter().map(|(_, s)| s).collect();
    let found_sets: BTreeSet<&CandidateSet> = found.iter().map(|r| &r.set).collect();
    let predicted_sets: BTreeSet<&CandidateSet> = predicted.iter().collect();
    let mut table = Ext2Table::new(engine, mode);
    let missing = predicted
        .iter()
        .filter(|s| !found_sets.contains(s))
        .map(|s| table.is_good(s))
        .collect::<Result<Vec<_>>>()?;
    let unexpected: Vec<GoodnessReport> = found.iter().filter(|r| !predicted_sets.contains(&r.set)).cloned().collect();
    Ok(ClassificationReport {
        holds: missing.is_empty() && unexpected.is_empty(),
        enumerated: found.iter().map(|r| r.set.clone()).sorted().collect(),
        predicted: predicted.into_iter().sorted().collect(),
        missing,
        unexpected,
    })
}
