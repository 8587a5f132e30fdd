use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{AbelianPGroup, ActionMatrix, EmbeddedSubgroup, FiniteGroup};
use crate::error::{Error, Result};

pub const DEFAULT_ORDER_BOUND: usize = 512;

/// Raw description of a block: D, generators of E, and the matrix by which
/// each generator acts on D.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub p: u64,
    /// exponents n_i with D = prod C_{p^{n_i}}
    pub defect: Vec<u32>,
    /// permutations of 0..degree
    pub generators: Vec<Vec<u32>>,
    /// one t x t integer matrix per generator
    pub actions: Vec<Vec<Vec<i64>>>,
    /// phi sends the designated generator of Z to zeta_{|Z|}^phi
    pub phi: Option<u64>,
    pub order_bound: usize,
}

/// P x| F for an abelian p-group P and a group F acting by automorphisms.
/// Element (x, f) has index x + |P| f and (x1, f1)(x2, f2) = (x1 + f1.x2, f1 f2).
#[derive(Debug)]
pub struct SplitGroup {
    pub normal: AbelianPGroup,
    pub complement: FiniteGroup,
    /// action matrix of each complement element
    pub actions: Vec<ActionMatrix>,
    /// act[f][x] = f.x
    act: Vec<Vec<usize>>,
    full: OnceLock<FiniteGroup>,
}

impl Clone for SplitGroup {
    fn clone(&self) -> Self {
        SplitGroup::new(self.normal.clone(), self.complement.clone(), self.actions.clone())
    }
}

impl SplitGroup {
    pub fn new(normal: AbelianPGroup, complement: FiniteGroup, actions: Vec<ActionMatrix>) -> Self {
        let act = actions
            .iter()
            .map(|a| (0..normal.size()).map(|x| a.apply(&normal, x)).collect())
            .collect();
        SplitGroup { normal, complement, actions, act, full: OnceLock::new() }
    }

    #[inline]
    pub fn act(&self, f: usize, x: usize) -> usize {
        self.act[f][x]
    }

    /// Character action (f.lambda)(x) = lambda(f^{-1}.x).
    pub fn act_on_char(&self, f: usize, lambda: usize) -> usize {
        let finv = self.complement.inv(f);
        self.actions[finv].pull_back_char(&self.normal, lambda)
    }

    pub fn order(&self) -> usize {
        self.normal.size() * self.complement.order()
    }

    #[inline]
    pub fn element(&self, x: usize, f: usize) -> usize {
        x + self.normal.size() * f
    }

    #[inline]
    pub fn split(&self, g: usize) -> (usize, usize) {
        (g % self.normal.size(), g / self.normal.size())
    }

    /// The semidirect product as an abstract group (built on first use).
    pub fn full_group(&self) -> &FiniteGroup {
        self.full.get_or_init(|| {
            let n = self.order();
            let mut table = vec![0u32; n * n];
            for g in 0..n {
                let (x1, f1) = self.split(g);
                for h in 0..n {
                    let (x2, f2) = self.split(h);
                    let x = self.normal.add(x1, self.act(f1, x2));
                    let f = self.complement.mul(f1, f2);
                    table[g * n + h] = self.element(x, f) as u32;
                }
            }
            let mut gens: Vec<usize> = self.complement.generators().iter().map(|&f| self.element(0, f)).collect();
            for i in 0..self.normal.rank() {
                let mut unit = vec![0u64; self.normal.rank()];
                unit[i] = 1;
                gens.push(self.element(self.normal.index(&unit), 0));
            }
            FiniteGroup::from_table(table, gens).expect("semidirect product table is a group")
        })
    }

    /// P x| F' for a subgroup F' of the complement.
    pub fn restrict_complement(&self, elems: &[usize]) -> Result<(SplitGroup, Vec<usize>)> {
        let (sub, embed) = self.complement.subgroup(elems)?;
        let actions = embed.iter().map(|&f| self.actions[f].clone()).collect();
        Ok((SplitGroup::new(self.normal.clone(), sub, actions), embed))
    }

    /// Orbits of the complement on Irr(P), least index first.
    pub fn char_orbits(&self) -> Vec<CharOrbit> {
        let n = self.normal.size();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for lambda in 0..n {
            if seen[lambda] {
                continue;
            }
            let mut members = Vec::new();
            let mut stabilizer = Vec::new();
            for f in 0..self.complement.order() {
                let image = self.act_on_char(f, lambda);
                if image == lambda {
                    stabilizer.push(f);
                }
                if !seen[image] {
                    seen[image] = true;
                    members.push(image);
                }
            }
            members.sort_unstable();
            out.push(CharOrbit { representative: lambda, members, stabilizer });
        }
        out
    }

    pub fn are_conjugate_chars(&self, a: usize, b: usize) -> bool {
        (0..self.complement.order()).any(|f| self.act_on_char(f, a) == b)
    }
}

/// An orbit of E on Irr(D) with its least representative and the stabilizer
/// of that representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharOrbit {
    pub representative: usize,
    pub members: Vec<usize>,
    pub stabilizer: Vec<usize>,
}

/// A validated block: G = D x| E, the faithful character phi of Z = C_E(D),
/// and the decomposition D = [D, E] x C_D(E).
#[derive(Debug, Clone)]
pub struct SemidirectGroup {
    pub spec: BlockSpec,
    pub p: u64,
    pub g: SplitGroup,
    /// elements of Z, sorted
    pub z: Vec<usize>,
    pub z_generator: usize,
    pub phi_exponent: u64,
    pub d1: EmbeddedSubgroup,
    pub d2: EmbeddedSubgroup,
    pub assumption_holds: bool,
    pub warnings: Vec<String>,
}

impl SemidirectGroup {
    pub fn d(&self) -> &AbelianPGroup {
        &self.g.normal
    }

    pub fn e(&self) -> &FiniteGroup {
        &self.g.complement
    }

    pub fn z_order(&self) -> u64 {
        self.z.len() as u64
    }

    /// phi(z) as a power of zeta_{|Z|}, or None if z is not in Z.
    pub fn phi_value(&self, z: usize) -> Option<u64> {
        if self.z.binary_search(&z).is_err() {
            return None;
        }
        let e = self.e();
        let order = self.z_order();
        let mut x = 0;
        for k in 0..order {
            if x == z {
                return Some(k * self.phi_exponent % order);
            }
            x = e.mul(x, self.z_generator);
        }
        None
    }

    /// Exponent of G; the conductor that carries every character value.
    pub fn exponent(&self) -> u64 {
        num_integer::lcm(self.d().exponent(), self.e().exponent())
    }

    pub fn orbits(&self) -> Vec<CharOrbit> {
        self.g.char_orbits()
    }

    /// The characters of D that are trivial on D_1: 1_{D_1} x theta.
    pub fn stable_chars(&self) -> Vec<usize> {
        (0..self.d().size())
            .filter(|&lam| self.d1.restrict_char(self.d(), lam) == 0)
            .collect()
    }

    /// D_1 x| E with D_1 in its own coordinates.
    pub fn d1_split(&self) -> Result<SplitGroup> {
        let actions = self
            .g
            .actions
            .iter()
            .map(|a| self.d1.restrict_action(self.d(), a))
            .collect::<Result<Vec<_>>>()?;
        Ok(SplitGroup::new(self.d1.group.clone(), self.e().clone(), actions))
    }
}

/// Validates a block specification and derives Z, phi, D_1 and D_2.
pub fn validate_block_spec(spec: &BlockSpec) -> Result<SemidirectGroup> {
    let d = AbelianPGroup::new(spec.p, spec.defect.clone())?;
    let p = spec.p;
    let e = FiniteGroup::from_permutations(&spec.generators, spec.order_bound)?;
    if (e.order() as u64).is_multiple_of(p) {
        return Err(Error::PDividesE { p, order: e.order() });
    }
    if spec.actions.len() != spec.generators.len() {
        return Err(Error::ActionInvalid(format!(
            "{} generators but {} action matrices",
            spec.generators.len(),
            spec.actions.len()
        )));
    }
    let gen_actions = spec
        .actions
        .iter()
        .map(|m| ActionMatrix::new(&d, m.clone()))
        .collect::<Result<Vec<_>>>()?;
    let actions = extend_action(&d, &e, &gen_actions)?;

    let identity = ActionMatrix::identity(&d);
    let z: Vec<usize> = (0..e.order()).filter(|&g| actions[g] == identity).collect();
    if !z.iter().all(|&g| e.is_central(g)) {
        return Err(Error::ZNotCentral);
    }
    let z_generator = z
        .iter()
        .copied()
        .find(|&g| e.element_order(g) == z.len() as u64)
        .ok_or(Error::ZNotCyclic)?;
    let phi_exponent = spec.phi.unwrap_or(1) % (z.len() as u64).max(1);
    if num_integer::gcd(phi_exponent, z.len() as u64) != 1 && z.len() > 1 {
        return Err(Error::PhiNotFaithful { exponent: spec.phi.unwrap_or(1), order: z.len() });
    }

    // D_1 = [D, E] and D_2 = C_D(E)
    let mut commutators = Vec::new();
    for &g in e.generators() {
        for x in 0..d.size() {
            let y = actions[g].apply(&d, x);
            commutators.push(d.add(y, d.neg(x)));
        }
    }
    commutators.sort_unstable();
    commutators.dedup();
    let d1_elems = d.span(&commutators);
    let d2_elems: Vec<usize> = (0..d.size())
        .filter(|&x| e.generators().iter().all(|&g| actions[g].apply(&d, x) == x))
        .collect();
    let meet = d1_elems.iter().filter(|x| d2_elems.binary_search(x).is_ok()).count();
    if meet != 1 || d1_elems.len() * d2_elems.len() != d.size() {
        return Err(Error::DecompositionFailed(format!(
            "|[D,E]| = {}, |C_D(E)| = {}, |D| = {}",
            d1_elems.len(),
            d2_elems.len(),
            d.size()
        )));
    }
    let d1 = d.embedded_subgroup(&d1_elems)?;
    let d2 = d.embedded_subgroup(&d2_elems)?;

    let assumption_holds = d.satisfies_assumption();
    let mut warnings = Vec::new();
    if !assumption_holds {
        warnings.push(format!(
            "D = {} has a cyclic factor of order 2; classification results do not apply",
            describe_defect(&d)
        ));
    }

    Ok(SemidirectGroup {
        spec: spec.clone(),
        p,
        g: SplitGroup::new(d, e, actions),
        z,
        z_generator,
        phi_exponent,
        d1,
        d2,
        assumption_holds,
        warnings,
    })
}

/// Like [`validate_block_spec`], but turns the C_2-factor warning into an
/// error for callers that need the classification hypotheses.
pub fn validate_strict(spec: &BlockSpec) -> Result<SemidirectGroup> {
    let g = validate_block_spec(spec)?;
    if !g.assumption_holds {
        return Err(Error::AssumptionViolated(g.warnings.join("; ")));
    }
    Ok(g)
}

pub fn describe_defect(d: &AbelianPGroup) -> String {
    if d.rank() == 0 {
        return "1".into();
    }
    d.moduli().iter().map(|m| format!("C_{m}")).collect::<Vec<_>>().join(" x ")
}

/// Extends generator matrices to all of E and checks the homomorphism
/// property against the multiplication table.
fn extend_action(d: &AbelianPGroup, e: &FiniteGroup, gens: &[ActionMatrix]) -> Result<Vec<ActionMatrix>> {
    let mut actions: Vec<Option<ActionMatrix>> = vec![None; e.order()];
    actions[0] = Some(ActionMatrix::identity(d));
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (k, &g) in e.generators().iter().enumerate() {
            let y = e.mul(x, g);
            if actions[y].is_none() {
                actions[y] = Some(actions[x].as_ref().unwrap().compose(d, &gens[k]));
                queue.push_back(y);
            }
        }
    }
    let actions: Vec<ActionMatrix> = actions.into_iter().map(|a| a.expect("E is generated")).collect();
    for (k, &g) in e.generators().iter().enumerate() {
        if actions[g] != gens[k] {
            return Err(Error::ActionInvalid(format!("generator {} acts inconsistently", k + 1)));
        }
        if !gens[k].is_automorphism(d) {
            return Err(Error::ActionInvalid(format!("matrix of generator {} is not an automorphism of D", k + 1)));
        }
    }
    for a in 0..e.order() {
        for b in 0..e.order() {
            if actions[e.mul(a, b)] != actions[a].compose(d, &actions[b]) {
                return Err(Error::ActionInvalid("the action does not respect the relations of E".into()));
            }
        }
    }
    Ok(actions)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::group::examples::*;

    #[test]
    fn inverting_c3_structure() {
        let g = validate_block_spec(&inverting_c3()).unwrap();
        assert_eq!(g.z.len(), 2);
        assert_eq!(g.d1.group.orders(), &[1]);
        assert_eq!(g.d2.group.size(), 1);
        let orbits = g.orbits();
        assert_eq!(orbits.len(), 2);
        assert_eq!(orbits[1].members, vec![1, 2]);
        assert_eq!(orbits[1].stabilizer, g.z);
        assert_eq!(g.phi_value(g.z_generator), Some(1));
    }

    #[test]
    fn inverting_c3_times_c3_structure() {
        let g = validate_block_spec(&inverting_c3_times_c3()).unwrap();
        assert_eq!(g.z.len(), 2);
        assert_eq!(g.d1.group.orders(), &[1]);
        assert_eq!(g.d2.group.orders(), &[1]);
        // D_1 is the first factor
        assert_eq!(g.d1.basis.len(), 1);
        assert_eq!(g.d().coords(g.d1.basis[0])[1], 0);
        assert_eq!(g.stable_chars().len(), 3);
    }

    #[test]
    fn rotating_c4_squared_structure() {
        let g = validate_block_spec(&rotating_c4_squared()).unwrap();
        assert_eq!(g.z.len(), 1);
        assert_eq!(g.d1.group.size(), 16);
        let orbits = g.orbits();
        let sizes: Vec<usize> = orbits.iter().map(|o| o.members.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 16);
        assert_eq!(sizes.iter().filter(|&&s| s == 1).count(), 1);
        for o in &orbits {
            assert_eq!(o.members.len() * o.stabilizer.len(), 3);
        }
    }

    #[test]
    fn rejections() {
        let mut s = inverting_c3();
        s.p = 2;
        s.defect = vec![2];
        assert!(matches!(validate_block_spec(&s), Err(Error::PDividesE { .. })));

        let mut s = inverting_c3();
        s.actions = vec![vec![vec![0]]];
        assert!(matches!(validate_block_spec(&s), Err(Error::ActionInvalid(_))));

        // an order-3 matrix cannot represent a generator of order 5
        let mut s = rotating_c4_squared();
        s.generators = vec![vec![1, 2, 3, 4, 0]];
        assert!(matches!(validate_block_spec(&s), Err(Error::ActionInvalid(_))));

        let mut s = inverting_c3();
        s.phi = Some(2);
        assert!(matches!(validate_block_spec(&s), Err(Error::PhiNotFaithful { .. })));

        let s = BlockSpec {
            p: 2,
            defect: vec![1, 2],
            generators: vec![],
            actions: vec![],
            phi: None,
            order_bound: DEFAULT_ORDER_BOUND,
        };
        let g = validate_block_spec(&s).unwrap();
        assert!(!g.assumption_holds);
        assert!(matches!(validate_strict(&s), Err(Error::AssumptionViolated(_))));
    }

    #[test]
    fn trivial_action() {
        let s = BlockSpec {
            p: 3,
            defect: vec![1, 1],
            generators: vec![vec![1, 0]],
            actions: vec![vec![vec![1, 0], vec![0, 1]]],
            phi: None,
            order_bound: DEFAULT_ORDER_BOUND,
        };
        let g = validate_block_spec(&s).unwrap();
        assert_eq!(g.z.len(), 2);
        let orbits = g.orbits();
        assert_eq!(orbits.len(), 9);
        assert!(orbits.iter().all(|o| o.stabilizer.len() == 2));
    }

    #[test]
    fn semidirect_table() {
        let g = validate_block_spec(&inverting_c3()).unwrap();
        let full = g.g.full_group();
        assert_eq!(full.order(), 12);
        assert!(full.check_associative());
        assert!(!full.is_abelian());
    }
}
