//! End-to-end acceptance suite. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line; exits nonzero if any
//! criterion fails.

use std::time::Instant;

use blockext_core::analysis::{check_conjugacy_forcing, ext_quiver, verify_classification, DEFAULT_ENUMERATION_BOUND};
use blockext_core::chars::{build_irr_b, char_table, check_orthogonality, ClassFunction};
use blockext_core::ext::{
    default_policy, ext_abelian_closed, ext_oracle, ExtEngine, ExtMode, ExtProblem, ModuleSpec, OracleOptions,
    ShapiroOrder, Side,
};
use blockext_core::group::{
    examples, validate_block_spec, AbelianPGroup, ActionMatrix, BlockSpec, FiniteGroup, SplitGroup,
    DEFAULT_ORDER_BOUND,
};
use blockext_core::ring::{verify_cyclotomic_identity, CycloNumber, PrecisionPolicy};
use blockext_core::Result;
use itertools::Itertools;
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }

    /// Passes when `failures` is empty; otherwise lists the first few.
    fn from_failures(failures: Vec<String>, checked: usize, what: &str) -> Self {
        if failures.is_empty() {
            Outcome::new(true, format!("{checked} {what}"))
        } else {
            let shown = failures.iter().take(5).join("; ");
            Outcome::new(false, format!("{} of {checked} {what} failed: {shown}", failures.len()))
        }
    }
}

fn worked_examples() -> Vec<(&'static str, BlockSpec)> {
    vec![
        ("inverting_c3", examples::inverting_c3()),
        ("inverting_c3_times_c3", examples::inverting_c3_times_c3()),
        ("rotating_c4_squared", examples::rotating_c4_squared()),
    ]
}

fn pure_defect(p: u64, defect: Vec<u32>) -> BlockSpec {
    BlockSpec { p, defect, generators: vec![], actions: vec![], phi: None, order_bound: DEFAULT_ORDER_BOUND }
}

/// The worked examples and the blocks with trivial E shipped in the corpus.
fn corpus() -> Vec<(&'static str, BlockSpec)> {
    let mut all = worked_examples();
    all.push(("pure_c9", pure_defect(3, vec![2])));
    all.push(("pure_c3xc3", pure_defect(3, vec![1, 1])));
    all.push(("pure_c8", pure_defect(2, vec![3])));
    all
}

fn abelian_split(p: u64, orders: Vec<u32>) -> Result<SplitGroup> {
    let d = AbelianPGroup::new(p, orders)?;
    let f = FiniteGroup::from_permutations(&[], 8)?;
    let id = ActionMatrix::identity(&d);
    Ok(SplitGroup::new(d, f, vec![id]))
}

fn closed_equals_oracle() -> Result<Outcome> {
    let cases = [(3, vec![2]), (3, vec![1, 1]), (3, vec![1, 2]), (2, vec![3]), (2, vec![2, 2])];
    let mut failures = Vec::new();
    let mut checked = 0;
    for (p, orders) in cases {
        let g = abelian_split(p, orders)?;
        let n = g.normal.size();
        let lines = (0..n)
            .map(|l| ModuleSpec::new(&g, l, &[0], ClassFunction::new(vec![CycloNumber::one(1)])))
            .collect::<Result<Vec<_>>>()?;
        let jobs: Vec<(usize, usize, u32)> =
            (0..n).cartesian_product(0..n).cartesian_product(0..=2).map(|((a, b), i)| (a, b, i)).collect();
        let found = jobs
            .par_iter()
            .map(|&(a, b, i)| {
                let problem = ExtProblem { target: &g, left: Side::Here(&lines[a]), right: Side::Here(&lines[b]) };
                let oracle = ext_oracle(&problem, i, &OracleOptions::default())?;
                let closed = ext_abelian_closed(&g.normal, a, b, i)?;
                Ok((oracle != closed).then(|| format!("{:?} ({a},{b}) i={i}: {closed} vs {oracle}", g.normal.orders())))
            })
            .collect::<Result<Vec<_>>>()?;
        checked += jobs.len();
        failures.extend(found.into_iter().flatten());
    }
    Ok(Outcome::from_failures(failures, checked, "closed/oracle comparisons"))
}

fn kunneth_consistency() -> Result<Outcome> {
    let g = validate_block_spec(&examples::inverting_c3_times_c3())?;
    let block = build_irr_b(&g)?;
    let engine = ExtEngine::new(&block, OracleOptions::default())?;
    let n = block.chars.len();
    let pairs: Vec<(usize, usize)> = (0..n).cartesian_product(0..n).collect();
    let found = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (c1, c2) = (&block.chars[a], &block.chars[b]);
            let closed = engine.ext(c1, c2, 2, ExtMode::Closed)?;
            let oracle = engine.ext(c1, c2, 2, ExtMode::Oracle)?;
            Ok((closed != oracle).then(|| format!("({a},{b}): {closed} vs {oracle}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::from_failures(found.into_iter().flatten().collect(), pairs.len(), "degree-2 pairs"))
}

fn classification() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    for ((name, spec), expected) in worked_examples().into_iter().zip([1, 3, 1]) {
        let g = validate_block_spec(&spec)?;
        let block = build_irr_b(&g)?;
        let engine = ExtEngine::new(&block, OracleOptions::default())?;
        let report = verify_classification(&engine, DEFAULT_ENUMERATION_BOUND, ExtMode::Crosscheck)?;
        counts.push(report.enumerated.len());
        if !report.holds || report.enumerated.len() != expected {
            failures.push(format!("{name}: holds={} with {} good sets", report.holds, report.enumerated.len()));
        }
    }
    let mut outcome = Outcome::from_failures(failures, 3, "blocks");
    outcome.detail += &format!(", good-set counts {counts:?}");
    Ok(outcome)
}

fn universal_coefficients() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, spec) in worked_examples() {
        let g = validate_block_spec(&spec)?;
        let block = build_irr_b(&g)?;
        let engine = ExtEngine::new(&block, OracleOptions::default())?;
        let n = block.chars.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .cartesian_product(0..n)
            .filter(|&(a, b)| !block.reductions_overlap(&block.chars[a], &block.chars[b]))
            .collect();
        checked += pairs.len();
        let found = pairs
            .par_iter()
            .map(|&(a, b)| {
                let (c1, c2) = (&block.chars[a], &block.chars[b]);
                let lhs = engine.ext(c1, c2, 2, ExtMode::Crosscheck)?.residue_dimension();
                let rhs = engine.ext1_modp(c1, c2)?;
                Ok((lhs != rhs).then(|| format!("{name} ({a},{b}): {lhs} vs {rhs}")))
            })
            .collect::<Result<Vec<_>>>()?;
        failures.extend(found.into_iter().flatten());
    }
    Ok(Outcome::from_failures(failures, checked, "pairs with disjoint reductions"))
}

fn quiver_connectivity() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut shapes = Vec::new();
    for (name, spec) in worked_examples() {
        let g = validate_block_spec(&spec)?;
        let block = build_irr_b(&g)?;
        let engine = ExtEngine::new(&block, OracleOptions::default())?;
        let q = ext_quiver(&engine)?;
        shapes.push(format!("{name}: {} vertices/{} edges", q.vertices, q.edges.len()));
        if !q.connected {
            failures.push(format!("{name} is disconnected"));
        }
    }
    let mut outcome = Outcome::from_failures(failures, 3, "quivers connected");
    outcome.detail += &format!(" ({})", shapes.join(", "));
    Ok(outcome)
}

fn conjugacy_forcing() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut triggered = 0;
    for (name, spec) in worked_examples() {
        let g = validate_block_spec(&spec)?;
        let block = build_irr_b(&g)?;
        let engine = ExtEngine::new(&block, OracleOptions::default())?;
        let report = check_conjugacy_forcing(&engine, ExtMode::Crosscheck)?;
        checked += report.pairs_checked;
        triggered += report.triggered;
        failures.extend(report.violations.iter().map(|v| format!("{name} ({},{}): {}", v.first, v.second, v.ext2)));
    }
    let mut outcome = Outcome::from_failures(failures, checked, "pairs");
    outcome.detail += &format!(", {triggered} with conforming nonzero Ext^2");
    Ok(outcome)
}

fn cyclotomic_identity() -> Result<Outcome> {
    let cases = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)];
    let mut failures = Vec::new();
    for (p, n) in cases {
        if !verify_cyclotomic_identity(p, n)? {
            failures.push(format!("(p, n) = ({p}, {n})"));
        }
    }
    Ok(Outcome::from_failures(failures, cases.len(), "cases"))
}

/// The regular representation of Q_8 on {+-1, +-i, +-j, +-k}, index
/// unit + 4 * (sign is negative).
fn quaternion_group() -> Result<FiniteGroup> {
    // unit products as (unit, negate) for left factor i, then j
    let i_times = [(1, false), (0, true), (3, false), (2, true)];
    let j_times = [(2, false), (3, true), (0, true), (1, false)];
    let left = |table: [(u32, bool); 4]| -> Vec<u32> {
        (0..8)
            .map(|x| {
                let (unit, neg) = table[x % 4];
                unit + 4 * u32::from(neg ^ (x >= 4))
            })
            .collect()
    };
    FiniteGroup::from_permutations(&[left(i_times), left(j_times)], 64)
}

/// SL(2, 3) acting on the eight nonzero vectors of F_3^2.
fn sl23() -> Result<FiniteGroup> {
    let vectors: Vec<(i64, i64)> = (0..3).cartesian_product(0..3).filter(|&v| v != (0, 0)).collect();
    let act = |m: [[i64; 2]; 2]| -> Vec<u32> {
        vectors
            .iter()
            .map(|&(a, b)| {
                let image = ((m[0][0] * a + m[0][1] * b).rem_euclid(3), (m[1][0] * a + m[1][1] * b).rem_euclid(3));
                vectors.iter().position(|&v| v == image).unwrap() as u32
            })
            .collect()
    };
    FiniteGroup::from_permutations(&[act([[1, 1], [0, 1]]), act([[0, 2], [1, 0]])], 64)
}

fn character_sanity() -> Result<Outcome> {
    let groups = [
        ("C_4", FiniteGroup::from_permutations(&[vec![1, 2, 3, 0]], 8)?, 4, 4),
        ("S_3", FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![1, 2, 0]], 8)?, 6, 3),
        ("Q_8", quaternion_group()?, 8, 5),
        ("SL(2,3)", sl23()?, 24, 7),
    ];
    let mut failures = Vec::new();
    for (name, g, order, classes) in &groups {
        let table = char_table(g)?;
        if g.order() != *order || table.chars.len() != *classes {
            failures.push(format!("{name}: order {} with {} characters", g.order(), table.chars.len()));
        }
        if let Err(e) = check_orthogonality(g, &table.chars) {
            failures.push(format!("{name}: {e}"));
        }
    }
    let corpus = corpus();
    for (name, spec) in &corpus {
        let g = validate_block_spec(spec)?;
        let block = build_irr_b(&g)?;
        let expected = (g.d().size() * g.e().order() / g.z.len()) as u64;
        if block.degree_square_sum() != expected {
            failures.push(format!("{name}: sum of squared degrees {} vs {expected}", block.degree_square_sum()));
        }
    }
    Ok(Outcome::from_failures(failures, groups.len() + corpus.len(), "tables and blocks"))
}

fn precision_stability() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, spec) in corpus() {
        let g = validate_block_spec(&spec)?;
        let block = build_irr_b(&g)?;
        let base = default_policy(&g.g);
        let at = |precision: u32| OracleOptions {
            policy: Some(PrecisionPolicy { precision, ..base }),
            ..OracleOptions::default()
        };
        let low = ExtEngine::new(&block, at(base.precision))?;
        let high = ExtEngine::new(&block, at(base.precision + 2))?;
        let n = block.chars.len();
        let jobs: Vec<(usize, usize, u32)> =
            (0..n).cartesian_product(0..n).cartesian_product(0..=2).map(|((a, b), i)| (a, b, i)).collect();
        checked += jobs.len();
        let found = jobs
            .par_iter()
            .map(|&(a, b, i)| {
                let (c1, c2) = (&block.chars[a], &block.chars[b]);
                let x = low.ext(c1, c2, i, ExtMode::Oracle)?;
                let y = high.ext(c1, c2, i, ExtMode::Oracle)?;
                Ok((x != y).then(|| format!("{name} ({a},{b}) i={i}: {x} vs {y}")))
            })
            .collect::<Result<Vec<_>>>()?;
        failures.extend(found.into_iter().flatten());
    }
    Ok(Outcome::from_failures(failures, checked, "oracle classes stable at N and N+2"))
}

fn shapiro_order() -> Result<Outcome> {
    let g = validate_block_spec(&examples::inverting_c3())?;
    let block = build_irr_b(&g)?;
    let engine = ExtEngine::new(&block, OracleOptions::default())?;
    let n = block.chars.len();
    let mut failures = Vec::new();
    let mut checked = 0;
    for ((a, b), i) in (0..n).cartesian_product(0..n).cartesian_product(0..=2) {
        let (c1, c2) = (&block.chars[a], &block.chars[b]);
        let first = engine.ext_shapiro(c1, c2, i, ShapiroOrder::FirstArgument)?;
        let second = engine.ext_shapiro(c1, c2, i, ShapiroOrder::SecondArgument)?;
        checked += 1;
        if first != second {
            failures.push(format!("({a},{b}) i={i}: {first} vs {second}"));
        }
    }
    Ok(Outcome::from_failures(failures, checked, "pairs agree under both reductions"))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("closed form equals oracle on abelian D", closed_equals_oracle),
        ("Kunneth closed mode equals oracle on C_4 x| (C_3 x C_3)", kunneth_consistency),
        ("good-set classification", classification),
        ("universal coefficients: k (x) Ext^2 vs Ext^1 over k", universal_coefficients),
        ("Ext^1 quiver connectivity", quiver_connectivity),
        ("Ext^2 forces conjugacy", conjugacy_forcing),
        ("cyclotomic product identity", cyclotomic_identity),
        ("character table orthogonality and degree sums", character_sanity),
        ("precision stability", precision_stability),
        ("Shapiro reduction order", shapiro_order),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let secs = started.elapsed().as_secs_f64();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {name} ({}; {secs:.1}s)", k + 1, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
