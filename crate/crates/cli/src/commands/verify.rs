//! The verification harness over one spec or a corpus directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use blockext_core::analysis::{self, check_conjugacy_forcing, check_stable_chars, ext_quiver};
use blockext_core::chars::build_irr_b;
use blockext_core::ext::{ExtEngine, ExtMode};
use blockext_core::ring::verify_cyclotomic_identity;
use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::{document, ext_cached, load, Document, Overrides, Settings};
use crate::error::CliError;

const CYCLOTOMIC_CASES: [(u64, u32); 6] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    /// "pass", "fail" or "skipped"
    pub status: &'static str,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name, status: if passed { "pass" } else { "fail" }, detail: detail.into() }
    }

    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, status: "skipped", detail: detail.into() }
    }

    fn failed(&self) -> bool {
        self.status == "fail"
    }
}

/// The part of a spec's results that is pinned by its golden file.
#[derive(Debug, Serialize)]
pub struct Summary {
    pub decomposition_matrix: Vec<Vec<u64>>,
    pub degrees: Vec<u64>,
    /// `first second degree: class`, every ordered pair, degrees 0 to 2
    pub ext: Vec<String>,
    pub good_sets: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Serialize)]
pub struct SpecReport {
    pub spec: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    /// "match", "mismatch", "absent" or "written"
    pub golden: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CyclotomicCase {
    pub p: u64,
    pub n: u32,
    pub holds: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyBody {
    pub passed: bool,
    pub specs: Vec<SpecReport>,
    pub cyclotomic: Vec<CyclotomicCase>,
}

fn corpus(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = fs::read_dir(path).map_err(|e| CliError::io(path, e))?;
    let mut specs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "spec"))
        .collect();
    specs.sort();
    if specs.is_empty() {
        return Err(CliError::Usage(format!("no .spec files in {}", path.display())));
    }
    Ok(specs)
}

fn golden_path(spec: &Path) -> PathBuf {
    let stem = spec.file_stem().unwrap_or_default().to_string_lossy();
    spec.with_file_name(format!("{stem}.golden.json"))
}

pub fn cmd_verify(path: &Path, over: &Overrides, bless: bool) -> Result<(Document<VerifyBody>, bool), CliError> {
    let started = Instant::now();
    let specs = corpus(path)?;
    let mut reports = Vec::new();
    for spec in &specs {
        reports.push(verify_one(spec, over, bless)?);
    }
    let cyclotomic = CYCLOTOMIC_CASES
        .iter()
        .map(|&(p, n)| Ok(CyclotomicCase { p, n, holds: verify_cyclotomic_identity(p, n)? }))
        .collect::<Result<Vec<_>, CliError>>()?;
    let passed = reports.iter().all(|r| r.passed) && cyclotomic.iter().all(|c| c.holds);
    let settings = Settings::resolve(over, &Default::default());
    let body = VerifyBody { passed, specs: reports, cyclotomic };
    Ok((document("verify", &settings, started, body), passed))
}

fn verify_one(spec: &Path, over: &Overrides, bless: bool) -> Result<SpecReport, CliError> {
    let l = load(spec, over)?;
    let g = &l.group;
    let block = build_irr_b(g)?;
    let engine = ExtEngine::new(&block, l.settings.oracle_options())?;
    let cache = l.cache()?;
    let mode = l.settings.mode;
    let p = g.p;
    let mut checks = Vec::new();

    let expected = (g.d().size() * g.e().order() / g.z.len()) as u64;
    checks.push(CheckResult::new(
        "degree_square_sum",
        block.degree_square_sum() == expected,
        format!("{} against |G|/|Z| = {expected}", block.degree_square_sum()),
    ));

    let stable = check_stable_chars(g)?;
    checks.push(CheckResult::new("stable_chars", stable.holds, format!("fixed characters of D_1: {:?}", stable.fixed)));

    // closed form against the oracle on every ordered pair and degree
    let n = block.chars.len();
    let jobs: Vec<(usize, usize, u32)> =
        (0..n).cartesian_product(0..n).cartesian_product(0..=2u32).map(|((a, b), i)| (a, b, i)).collect();
    let sweep: Vec<Result<_, _>> = jobs
        .par_iter()
        .map(|&(a, b, i)| ext_cached(&engine, cache.as_ref(), l.settings.precision, a, b, i, ExtMode::Crosscheck))
        .collect();
    let mut ext_lines = Vec::new();
    let mut mismatches = Vec::new();
    let mut ext2 = vec![None; n * n];
    for (&(a, b, i), r) in jobs.iter().zip(sweep) {
        match r {
            Ok(class) => {
                ext_lines.push(format!("{a} {b} {i}: {}", class.pretty(p)));
                if i == 2 {
                    ext2[a * n + b] = Some(class);
                }
            }
            Err(e @ blockext_core::Error::CrossCheckMismatch { .. }) => mismatches.push(format!("({a},{b}) degree {i}: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    checks.push(CheckResult::new(
        "closed_vs_oracle",
        mismatches.is_empty(),
        if mismatches.is_empty() { format!("{} computations agree", jobs.len()) } else { mismatches.join("; ") },
    ));

    // k (x) Ext^2 against Ext^1 over k when the reductions are disjoint
    let uct_pairs: Vec<(usize, usize)> = (0..n)
        .cartesian_product(0..n)
        .filter(|&(a, b)| !block.reductions_overlap(&block.chars[a], &block.chars[b]))
        .collect();
    let uct = uct_pairs
        .par_iter()
        .map(|&(a, b)| Ok((a, b, engine.ext1_modp(&block.chars[a], &block.chars[b])?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let uct_failures: Vec<String> = uct
        .iter()
        .filter_map(|&(a, b, dim)| {
            let lhs = ext2[a * n + b].as_ref().map(|c| c.residue_dimension());
            (lhs != Some(dim)).then(|| format!("({a},{b}): {lhs:?} against {dim}"))
        })
        .collect();
    checks.push(CheckResult::new(
        "uct",
        uct_failures.is_empty(),
        if uct_failures.is_empty() { format!("{} pairs", uct.len()) } else { uct_failures.join("; ") },
    ));

    let quiver = ext_quiver(&engine)?;
    checks.push(if !quiver.hypothesis_applies {
        CheckResult::skipped("quiver", "trivial defect group with several simple modules")
    } else {
        CheckResult::new(
            "quiver",
            quiver.connected,
            format!("{} vertices, {} edges", quiver.vertices, quiver.edges.len()),
        )
    });

    let mut good_sets = None;
    if g.assumption_holds {
        let forcing = check_conjugacy_forcing(&engine, mode)?;
        checks.push(CheckResult::new(
            "conjugacy_forcing",
            forcing.violations.is_empty(),
            format!("{} pairs, {} triggered, {} violations", forcing.pairs_checked, forcing.triggered, forcing.violations.len()),
        ));
        let classification = analysis::verify_classification(&engine, l.settings.enum_bound, mode)?;
        checks.push(CheckResult::new(
            "classification",
            classification.holds,
            format!(
                "{} good, {} predicted, {} missing, {} unexpected",
                classification.enumerated.len(),
                classification.predicted.len(),
                classification.missing.len(),
                classification.unexpected.len()
            ),
        ));
        good_sets = Some(classification.enumerated.into_iter().map(|s| s.members).collect());
    } else {
        let why = "D has a cyclic factor of order 2; no classification claim is made";
        checks.push(CheckResult::skipped("conjugacy_forcing", why));
        checks.push(CheckResult::skipped("classification", why));
    }

    let summary = Summary {
        decomposition_matrix: block.decomposition_matrix(),
        degrees: block.chars.iter().map(|c| c.degree).collect(),
        ext: ext_lines,
        good_sets,
    };
    let summary = serde_json::to_value(&summary).expect("summary serializes");
    let golden_file = golden_path(spec);
    let golden = if bless {
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
        fs::write(&golden_file, text).map_err(|e| CliError::io(&golden_file, e))?;
        "written"
    } else {
        match fs::read_to_string(&golden_file) {
            Err(_) => "absent",
            Ok(text) => match serde_json::from_str::<serde_json::Value>(&text) {
                Ok(v) if v == summary => "match",
                _ => "mismatch",
            },
        }
    };

    let passed = golden != "mismatch" && !checks.iter().any(CheckResult::failed);
    Ok(SpecReport { spec: spec.file_name().unwrap_or_default().to_string_lossy().into_owned(), passed, checks, golden })
}
