//! Ext between linear-source modules as F-fixed bar cohomology of P.
//!
//! Torsion is read from the Smith form of the incoming differential over a
//! chain ring, at two precisions that must agree. Ranks over K are computed
//! over a large prime field l = 1 (mod exponent), where the same modules
//! exist and the cohomology of P vanishes in positive degree as it does
//! over K.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use parking_lot::Mutex;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cochain::{BarShape, FixedComplex};
use super::module::{realize, ModuleRep, ModuleSpec};
use crate::error::{Error, Result};
use crate::group::SplitGroup;
use crate::ring::{
    classify_exponents, homology_class, snf_exponents, ChainRing, FieldRank, OModuleClass, PrecisionPolicy,
    PrimeField, Ring, Valuation,
};

/// Default cap on (|P| - 1)^(i+1) * rank C.
pub const DEFAULT_SIZE_GUARD: usize = 500_000;

/// Highest degree the oracle computes.
pub const MAX_ORACLE_DEGREE: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// explicit precision policy; by default N = (log_p exp P) + 2
    pub policy: Option<PrecisionPolicy>,
    pub size_guard: usize,
    pub memoize: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { policy: None, size_guard: DEFAULT_SIZE_GUARD, memoize: true }
    }
}

/// One argument of an Ext computation: a module built on the target group,
/// or built on a larger group P x| F and restricted along `embed`.
#[derive(Debug, Clone, Copy)]
pub enum Side<'a> {
    Here(&'a ModuleSpec),
    Restricted { base: &'a SplitGroup, embed: &'a [usize], spec: &'a ModuleSpec },
}

impl Side<'_> {
    fn realize<R: Ring>(&self, ring: &R, target: &SplitGroup) -> Result<ModuleRep<R::Elem>> {
        match *self {
            Side::Here(spec) => realize(ring, target, spec),
            Side::Restricted { base, embed, spec } => Ok(realize(ring, base, spec)?.restrict(base, target, embed)),
        }
    }

    fn rank(&self, target: &SplitGroup) -> usize {
        match *self {
            Side::Here(spec) => spec.rank(target),
            Side::Restricted { base, spec, .. } => spec.rank(base),
        }
    }

    fn conductor(&self, target: &SplitGroup) -> u64 {
        let f = match *self {
            Side::Here(_) => &target.complement,
            Side::Restricted { base, .. } => &base.complement,
        };
        num_integer::lcm(target.normal.exponent(), f.exponent())
    }

    fn key(&self) -> String {
        match *self {
            Side::Here(spec) => format!("here[{}]", spec.key()),
            Side::Restricted { base, embed, spec } => {
                format!("res[{:x};{embed:?};{}]", group_fingerprint(base), spec.key())
            }
        }
    }
}

/// Ext^i_{O(P x| F)}(left, right).
#[derive(Debug, Clone, Copy)]
pub struct ExtProblem<'a> {
    pub target: &'a SplitGroup,
    pub left: Side<'a>,
    pub right: Side<'a>,
}

impl ExtProblem<'_> {
    pub fn coefficient_rank(&self) -> usize {
        self.left.rank(self.target) * self.right.rank(self.target)
    }

    fn conductor(&self) -> u64 {
        num_integer::lcm(self.left.conductor(self.target), self.right.conductor(self.target))
    }

    fn coefficients<R: Ring>(&self, ring: &R) -> Result<ModuleRep<R::Elem>> {
        let m1 = self.left.realize(ring, self.target)?;
        let m2 = self.right.realize(ring, self.target)?;
        Ok(m1.dual(self.target).tensor(ring, &m2))
    }

    fn key(&self, i: u32, policy: &PrecisionPolicy) -> String {
        format!(
            "{:x}|{}|{}|{i}|{:?}",
            group_fingerprint(self.target),
            self.left.key(),
            self.right.key(),
            policy
        )
    }
}

fn group_fingerprint(g: &SplitGroup) -> u64 {
    let mut h = DefaultHasher::new();
    g.normal.prime().hash(&mut h);
    g.normal.orders().hash(&mut h);
    let n = g.complement.order();
    for a in 0..n {
        for b in 0..n {
            g.complement.mul(a, b).hash(&mut h);
        }
        g.actions[a].entries().hash(&mut h);
    }
    h.finish()
}

fn memo() -> &'static Mutex<HashMap<String, OModuleClass>> {
    static MEMO: OnceLock<Mutex<HashMap<String, OModuleClass>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The default precision policy for a target group: torsion in Ext of degree
/// at most 3 is killed by exp(P), so N = log_p exp(P) + 2 with a one-level
/// margin leaves room above every genuine invariant factor.
pub fn default_policy(target: &SplitGroup) -> PrecisionPolicy {
    PrecisionPolicy { precision: target.normal.exponent_log() + 2, margin: 1, retry: 2 }
}

/// Ext^i as an O-module class.
pub fn ext_oracle(problem: &ExtProblem, i: u32, options: &OracleOptions) -> Result<OModuleClass> {
    if i > MAX_ORACLE_DEGREE {
        return Err(Error::DegreeOutOfRange(i));
    }
    let policy = options.policy.unwrap_or_else(|| default_policy(problem.target));
    let key = options.memoize.then(|| problem.key(i, &policy));
    if let Some(k) = &key {
        if let Some(hit) = memo().lock().get(k) {
            return Ok(hit.clone());
        }
    }
    let target = problem.target;
    let q = target.normal.size() - 1;
    let needed = q.saturating_pow(i + 1).saturating_mul(problem.coefficient_rank());
    if needed > options.size_guard {
        return Err(Error::SizeGuard { needed, limit: options.size_guard });
    }

    let i = i as usize;
    let shape = BarShape::new(target, i + 1);
    let conductor = problem.conductor();

    // ranks over K, via F_l
    let field = PrimeField::large(conductor)?;
    let coeff_f = problem.coefficients(&field)?;
    let cx_f = FixedComplex::new(&field, &shape, target, &coeff_f)?;
    let dim = cx_f.dim(i);
    let rank_in = if i > 0 { field_rank_of(&field, &cx_f, i - 1, usize::MAX) } else { 0 };
    let rank_out = field_rank_of(&field, &cx_f, i, dim - rank_in);

    // torsion over the chain ring, confirmed one retry step higher
    let mut precision = policy.precision;
    let mut attempts = 0;
    let torsion = loop {
        let first = torsion_at(problem, &shape, i, precision, policy.margin, rank_in);
        let second = first
            .clone()
            .and_then(|_| torsion_at(problem, &shape, i, precision + policy.retry, policy.margin, rank_in));
        match (first, second) {
            (Ok(a), Ok(b)) if a == b => break a,
            (Ok(a), Ok(b)) => {
                return Err(Error::PrecisionUnstable(format!(
                    "torsion differs between precision {precision} ({a:?}) and {} ({b:?})",
                    precision + policy.retry
                )))
            }
            (Err(Error::PrecisionUnstable(msg)), _) | (_, Err(Error::PrecisionUnstable(msg))) => {
                attempts += 1;
                if attempts > 2 {
                    return Err(Error::PrecisionUnstable(msg));
                }
                precision += policy.retry;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    };
    let class = homology_class(1, dim, rank_out, rank_in, &[])?;
    let class = OModuleClass::new(class.free_rank, torsion);
    if let Some(k) = key {
        memo().lock().insert(k, class.clone());
    }
    Ok(class)
}

/// Torsion valuations of H^i at one precision, with the reliable rank of
/// d^{i-1} checked against its rank over K.
fn torsion_at(
    problem: &ExtProblem,
    shape: &BarShape,
    i: usize,
    precision: u32,
    margin: u32,
    rank_in: usize,
) -> Result<Vec<Valuation>> {
    if i == 0 {
        return Ok(Vec::new());
    }
    let target = problem.target;
    let ring = ChainRing::new(target.normal.prime(), problem.conductor(), precision)?;
    let coeff = problem.coefficients(&ring)?;
    let cx = FixedComplex::new(&ring, shape, target, &coeff)?;
    let exps = snf_exponents(&ring, &cx.differential(i - 1));
    let (torsion, rank) = classify_exponents(&exps, ring.ceiling(), margin * ring.ramification())?;
    if rank != rank_in {
        return Err(Error::PrecisionUnstable(format!(
            "d^{} has rank {rank} at precision {precision} but rank {rank_in} over K",
            i - 1
        )));
    }
    let e = u64::from(ring.ramification());
    Ok(torsion.into_iter().map(|k| Valuation::new(u64::from(k), e)).collect())
}

/// Rank of d^m over the field, stopping once `bound` is reached. Row blocks
/// are visited in a fixed pseudo-random order so that independent rows turn
/// up early.
fn field_rank_of(field: &PrimeField, cx: &FixedComplex<'_, PrimeField>, m: usize, bound: usize) -> usize {
    let cols = cx.dim(m);
    let bound = bound.min(cols);
    if bound == 0 {
        return 0;
    }
    let mut order: Vec<usize> = (0..cx.row_blocks(m)).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed + m as u64));
    let mut fr = FieldRank::new(field.clone(), cols);
    cx.for_each_row(m, &order, |row| {
        fr.push(row);
        fr.rank() < bound
    });
    fr.rank()
}

/// The dimension of Ext^i over a residue field, from the same fixed complex
/// over the chain ring of length one.
pub fn ext_dimension_mod_p(problem: &ExtProblem, i: u32, options: &OracleOptions) -> Result<usize> {
    if i > MAX_ORACLE_DEGREE {
        return Err(Error::DegreeOutOfRange(i));
    }
    let target = problem.target;
    let q = target.normal.size() - 1;
    let needed = q.saturating_pow(i + 1).saturating_mul(problem.coefficient_rank());
    if needed > options.size_guard {
        return Err(Error::SizeGuard { needed, limit: options.size_guard });
    }
    let i = i as usize;
    let shape = BarShape::new(target, i + 1);
    let k = ChainRing::residue_field(target.normal.prime(), problem.conductor())?;
    let coeff = problem.coefficients(&k)?;
    let cx = FixedComplex::new(&k, &shape, target, &coeff)?;
    let rank_out = snf_exponents(&k, &cx.differential(i)).len();
    let rank_in = if i > 0 { snf_exponents(&k, &cx.differential(i - 1)).len() } else { 0 };
    cx.dim(i)
        .checked_sub(rank_out + rank_in)
        .ok_or_else(|| Error::DimensionCheck("ranks exceed the cochain dimension".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::ClassFunction;
    use crate::group::{AbelianPGroup, ActionMatrix, FiniteGroup};
    use crate::ring::CycloNumber;

    fn abelian(p: u64, orders: Vec<u32>) -> SplitGroup {
        let d = AbelianPGroup::new(p, orders).unwrap();
        let f = FiniteGroup::from_permutations(&[], 8).unwrap();
        let id = ActionMatrix::identity(&d);
        SplitGroup::new(d, f, vec![id])
    }

    fn line(g: &SplitGroup, lambda: usize) -> ModuleSpec {
        ModuleSpec::new(g, lambda, &[0], ClassFunction::new(vec![CycloNumber::one(1)])).unwrap()
    }

    fn ext(g: &SplitGroup, a: usize, b: usize, i: u32) -> OModuleClass {
        let (x, y) = (line(g, a), line(g, b));
        let problem = ExtProblem { target: g, left: Side::Here(&x), right: Side::Here(&y) };
        ext_oracle(&problem, i, &OracleOptions { memoize: false, ..Default::default() }).unwrap()
    }

    #[test]
    fn cyclic_three_trivial_coefficients() {
        let g = abelian(3, vec![1]);
        assert_eq!(ext(&g, 0, 0, 0), OModuleClass::free(1));
        assert!(ext(&g, 0, 0, 1).is_zero());
        assert_eq!(ext(&g, 0, 0, 2), OModuleClass::cyclic(Valuation::integer(1)));
        assert!(ext(&g, 0, 0, 3).is_zero());
    }

    #[test]
    fn cyclic_nine_twisted() {
        let g = abelian(3, vec![2]);
        // lambda of order 9: O/(1 - zeta_9) in degree 1, nothing in degree 2
        assert_eq!(ext(&g, 0, 1, 1), OModuleClass::cyclic(Valuation::new(1, 6)));
        assert!(ext(&g, 0, 1, 2).is_zero());
        assert!(ext(&g, 0, 1, 0).is_zero());
        assert_eq!(ext(&g, 0, 3, 1), OModuleClass::cyclic(Valuation::new(1, 2)));
        assert_eq!(ext(&g, 2, 2, 2), OModuleClass::cyclic(Valuation::integer(2)));
    }

    #[test]
    fn size_guard_trips() {
        let g = abelian(3, vec![1, 1]);
        let x = line(&g, 0);
        let problem = ExtProblem { target: &g, left: Side::Here(&x), right: Side::Here(&x) };
        let opts = OracleOptions { size_guard: 100, memoize: false, ..Default::default() };
        assert!(matches!(ext_oracle(&problem, 2, &opts), Err(Error::SizeGuard { needed: 512, limit: 100 })));
        assert!(matches!(ext_oracle(&problem, 4, &opts), Err(Error::DegreeOutOfRange(4))));
    }

    #[test]
    fn mod_p_dimensions() {
        // H^1(C_3 x C_3, F_3) has dimension 2; twisted coefficients give 1
        let g = abelian(3, vec![1, 1]);
        let (x, y) = (line(&g, 0), line(&g, 1));
        let same = ExtProblem { target: &g, left: Side::Here(&x), right: Side::Here(&x) };
        assert_eq!(ext_dimension_mod_p(&same, 1, &OracleOptions::default()).unwrap(), 2);
        // over k every line reduces to the trivial one
        let twisted = ExtProblem { target: &g, left: Side::Here(&x), right: Side::Here(&y) };
        assert_eq!(ext_dimension_mod_p(&twisted, 1, &OracleOptions::default()).unwrap(), 2);
    }
}
