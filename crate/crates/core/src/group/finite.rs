use std::collections::{HashMap, VecDeque};

use itertools::Itertools;

use crate::error::{Error, Result};

/// A finite group given by its full multiplication table. Element 0 is the
/// identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
    generators: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    orders: Vec<u64>,
}

impl FiniteGroup {
    /// Closure of permutation generators on points 0..degree. Elements are
    /// numbered breadth-first from the identity, generators in the given
    /// order.
    pub fn from_permutations(generators: &[Vec<u32>], order_bound: usize) -> Result<Self> {
        let degree = generators.iter().map(Vec::len).max().unwrap_or(0);
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            let mut full: Vec<u32> = (0..degree as u32).collect();
            full[..g.len()].copy_from_slice(g);
            if full.iter().any(|&x| x as usize >= degree) || !full.iter().all_unique() {
                return Err(Error::InvalidInput(format!("generator {g:?} is not a permutation")));
            }
            gens.push(full);
        }
        let identity: Vec<u32> = (0..degree as u32).collect();
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let prod = compose(&elements[i], g);
                if !index.contains_key(&prod) {
                    if elements.len() >= order_bound {
                        return Err(Error::OrderBoundExceeded(order_bound));
                    }
                    index.insert(prod.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(prod);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                table[i * n + j] = index[&compose(a, b)] as u32;
            }
        }
        let gen_idx = gens.iter().map(|g| index[g]).collect();
        FiniteGroup::from_table(table, gen_idx)
    }

    /// A group from a multiplication table whose element 0 is the identity.
    pub fn from_table(table: Vec<u32>, generators: Vec<usize>) -> Result<Self> {
        let n = (table.len() as f64).sqrt() as usize;
        if n * n != table.len() || n == 0 {
            return Err(Error::InvalidInput("multiplication table is not square".into()));
        }
        let at = |i: usize, j: usize| table[i * n + j] as usize;
        if (0..n).any(|i| at(0, i) != i || at(i, 0) != i) {
            return Err(Error::InvalidInput("element 0 is not the identity".into()));
        }
        let mut inverses = vec![0u32; n];
        for i in 0..n {
            let inv = (0..n)
                .find(|&j| at(i, j) == 0)
                .ok_or_else(|| Error::InvalidInput(format!("element {i} has no inverse")))?;
            inverses[i] = inv as u32;
        }
        let mut group = FiniteGroup {
            n,
            table,
            inverses,
            generators,
            classes: Vec::new(),
            class_of: Vec::new(),
            orders: Vec::new(),
        };
        group.orders = (0..n).map(|g| group.compute_order(g)).collect();
        group.compute_classes();
        Ok(group)
    }

    /// Full associativity check; O(n^3), used in tests and validation of
    /// hand-built tables.
    pub fn check_associative(&self) -> bool {
        (0..self.n).all(|a| {
            (0..self.n).all(|b| {
                let ab = self.mul(a, b);
                (0..self.n).all(|c| self.mul(ab, c) == self.mul(a, self.mul(b, c)))
            })
        })
    }

    fn compute_order(&self, g: usize) -> u64 {
        let mut k = 1;
        let mut x = g;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    fn compute_classes(&mut self) {
        let mut class_of = vec![usize::MAX; self.n];
        let mut classes = Vec::new();
        for g in 0..self.n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> = (0..self.n).map(|h| self.conjugate(g, h)).unique().collect();
            members.sort_unstable();
            for &m in &members {
                class_of[m] = classes.len();
            }
            classes.push(members);
        }
        self.classes = classes;
        self.class_of = class_of;
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let k = k % self.orders[a];
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    /// h g h^{-1}
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(h, g), self.inv(h))
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn element_order(&self, g: usize) -> u64 {
        self.orders[g]
    }

    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &o| num_integer::lcm(acc, o))
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_central(&self, g: usize) -> bool {
        (0..self.n).all(|h| self.mul(g, h) == self.mul(h, g))
    }

    /// Closure of a set of elements, sorted.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut out = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        let mut member = vec![false; self.n];
        for &e in elems {
            if e >= self.n {
                return false;
            }
            member[e] = true;
        }
        member[0] && elems.iter().all(|&a| elems.iter().all(|&b| member[self.mul(a, b)]))
    }

    /// The subgroup on `elems` as a group of its own, plus the embedding
    /// (new index -> old index). Elements keep their relative order.
    pub fn subgroup(&self, elems: &[usize]) -> Result<(FiniteGroup, Vec<usize>)> {
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if !self.is_subgroup(&sorted) {
            return Err(Error::NotSubgroup(format!("{sorted:?}")));
        }
        let pos: HashMap<usize, usize> = sorted.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let m = sorted.len();
        let mut table = vec![0u32; m * m];
        for (i, &a) in sorted.iter().enumerate() {
            for (j, &b) in sorted.iter().enumerate() {
                table[i * m + j] = pos[&self.mul(a, b)] as u32;
            }
        }
        let gens = minimal_generators(self, &sorted).into_iter().map(|g| pos[&g]).collect();
        Ok((FiniteGroup::from_table(table, gens)?, sorted))
    }

    /// Representatives of H\G/K, the least element of each double coset.
    pub fn double_cosets(&self, h: &[usize], k: &[usize]) -> Result<Vec<usize>> {
        for s in [h, k] {
            if !self.is_subgroup(s) {
                return Err(Error::NotSubgroup(format!("{s:?}")));
            }
        }
        let mut seen = vec![false; self.n];
        let mut reps = Vec::new();
        for g in 0..self.n {
            if seen[g] {
                continue;
            }
            reps.push(g);
            for &a in h {
                let ag = self.mul(a, g);
                for &b in k {
                    seen[self.mul(ag, b)] = true;
                }
            }
        }
        Ok(reps)
    }

    /// Left transversal of a subgroup H: least element of each coset gH.
    pub fn left_transversal(&self, h: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut reps = Vec::new();
        for g in 0..self.n {
            if seen[g] {
                continue;
            }
            reps.push(g);
            for &x in h {
                seen[self.mul(g, x)] = true;
            }
        }
        reps
    }

    /// Sum over the class of (a, b) with a in class i, b in class j, ab = z_k,
    /// for each class triple: `structure[i][j][k]`.
    pub fn class_structure_constants(&self) -> Vec<Vec<Vec<u64>>> {
        let r = self.classes.len();
        let mut out = vec![vec![vec![0u64; r]; r]; r];
        for (k, ck) in self.classes.iter().enumerate() {
            let z = ck[0];
            for (i, ci) in self.classes.iter().enumerate() {
                for &x in ci {
                    let y = self.mul(self.inv(x), z);
                    out[i][self.class_of[y]][k] += 1;
                }
            }
        }
        out
    }
}

/// (a * b)(x) = a(b(x))
fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter().map(|&x| a[x as usize]).collect()
}

/// A small generating set: elements added greedily in index order.
fn minimal_generators(g: &FiniteGroup, elems: &[usize]) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = vec![0usize];
    for &e in elems {
        if span.binary_search(&e).is_err() {
            gens.push(e);
            span = g.generated(&gens);
            if span.len() == elems.len() {
                break;
            }
        }
    }
    gens
}
