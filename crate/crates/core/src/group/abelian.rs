use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::arith::is_prime;

/// C_{p^{n_1}} x ... x C_{p^{n_t}}. Elements and linear characters are both
/// exponent vectors, indexed in mixed radix with the first coordinate most
/// significant (so index order is lexicographic order).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianPGroup {
    p: u64,
    orders: Vec<u32>,
    #[serde(skip)]
    moduli: Vec<u64>,
    #[serde(skip)]
    strides: Vec<usize>,
    #[serde(skip)]
    size: usize,
}

impl AbelianPGroup {
    pub fn new(p: u64, orders: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if orders.contains(&0) {
            return Err(Error::InvalidInput("cyclic factors must have order p^n with n >= 1".into()));
        }
        let moduli: Vec<u64> = orders.iter().map(|&n| p.pow(n)).collect();
        let mut strides = vec![1usize; orders.len()];
        for i in (0..orders.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1] as usize;
        }
        let size = moduli.iter().product::<u64>() as usize;
        Ok(AbelianPGroup { p, orders, moduli, strides, size })
    }

    pub fn trivial(p: u64) -> Result<Self> {
        AbelianPGroup::new(p, Vec::new())
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The exponents n_i.
    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// m with p^m the exponent of the group.
    pub fn exponent_log(&self) -> u32 {
        self.orders.iter().copied().max().unwrap_or(0)
    }

    pub fn exponent(&self) -> u64 {
        self.p.pow(self.exponent_log())
    }

    /// No cyclic factor of order 2.
    pub fn satisfies_assumption(&self) -> bool {
        self.p != 2 || self.orders.iter().all(|&n| n > 1)
    }

    pub fn index(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.moduli)
            .zip(&self.strides)
            .map(|((&c, &m), &s)| (c % m) as usize * s)
            .sum()
    }

    pub fn coords(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.rank()];
        for i in 0..self.rank() {
            out[i] = (idx / self.strides[i]) as u64;
            idx %= self.strides[i];
        }
        out
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.coords(a), self.coords(b));
        let sum: Vec<u64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        self.index(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let x = self.coords(a);
        let neg: Vec<u64> = x.iter().zip(&self.moduli).map(|(&u, &m)| (m - u) % m).collect();
        self.index(&neg)
    }

    pub fn scale(&self, a: usize, k: u64) -> usize {
        let x = self.coords(a);
        let out: Vec<u64> = x.iter().zip(&self.moduli).map(|(&u, &m)| (u * (k % m)) % m).collect();
        self.index(&out)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let x = self.coords(a);
        x.iter()
            .zip(&self.moduli)
            .map(|(&u, &m)| if u == 0 { 1 } else { m / num_integer::gcd(u, m) })
            .max()
            .unwrap_or(1)
    }

    /// lambda_a(x) as a power of zeta_{p^m}, m = exponent_log.
    pub fn pairing(&self, a: usize, x: usize) -> u64 {
        let m = self.exponent();
        let (ca, cx) = (self.coords(a), self.coords(x));
        ca.iter()
            .zip(&cx)
            .zip(&self.moduli)
            .map(|((&u, &v), &mi)| ((u * v) % mi) * (m / mi))
            .sum::<u64>()
            % m
    }

    /// Sorted subgroup generated by some elements.
    pub fn span(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.size];
        member[0] = true;
        let mut out = vec![0usize];
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.add(x, g);
                if !member[y] {
                    member[y] = true;
                    out.push(y);
                    frontier.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Exponents n_i (descending) of a subgroup, read off from the sizes of
    /// its p^k-torsion layers.
    pub fn subgroup_type(&self, elems: &[usize]) -> Vec<u32> {
        let top = self.exponent_log();
        let layer = |k: u32| elems.iter().filter(|&&x| self.element_order(x) <= self.p.pow(k)).count();
        let mut at_least = Vec::new();
        for k in 1..=top {
            let mut ratio = layer(k) / layer(k - 1);
            let mut c = 0u32;
            while ratio > 1 {
                ratio /= self.p as usize;
                c += 1;
            }
            at_least.push(c);
        }
        // at_least[k-1] = #{i : n_i >= k}
        let count = at_least.first().copied().unwrap_or(0) as usize;
        let mut out: Vec<u32> = (0..count)
            .map(|i| at_least.iter().filter(|&&c| c as usize > i).count() as u32)
            .collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// A subgroup presented in its own coordinates.
    pub fn embedded_subgroup(&self, elems: &[usize]) -> Result<EmbeddedSubgroup> {
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.first() != Some(&0) || self.span(&sorted).len() != sorted.len() {
            return Err(Error::NotSubgroup(format!("{sorted:?}")));
        }
        let ty = self.subgroup_type(&sorted);
        let mut basis = Vec::new();
        if !self.find_basis(&sorted, &ty, &mut basis, &[0]) {
            return Err(Error::DecompositionFailed("no basis found for subgroup".into()));
        }
        let group = AbelianPGroup::new(self.p, ty)?;
        let mut embed = vec![0usize; group.size()];
        for (idx, slot) in embed.iter_mut().enumerate() {
            let c = group.coords(idx);
            *slot = c
                .iter()
                .zip(&basis)
                .fold(0, |acc, (&k, &b)| self.add(acc, self.scale(b, k)));
        }
        let lookup = embed.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        Ok(EmbeddedSubgroup { group, basis, embed, lookup })
    }

    fn find_basis(&self, elems: &[usize], ty: &[u32], basis: &mut Vec<usize>, span: &[usize]) -> bool {
        let k = basis.len();
        if k == ty.len() {
            return span.len() == elems.len();
        }
        let want = self.p.pow(ty[k]);
        for &g in elems {
            if self.element_order(g) != want {
                continue;
            }
            basis.push(g);
            let next = self.span(basis);
            if next.len() == span.len() * want as usize && self.find_basis(elems, ty, basis, &next) {
                return true;
            }
            basis.pop();
        }
        false
    }
}

/// A subgroup H of an abelian p-group with an isomorphism from a standard
/// AbelianPGroup.
#[derive(Debug, Clone)]
pub struct EmbeddedSubgroup {
    pub group: AbelianPGroup,
    /// parent elements forming the basis
    pub basis: Vec<usize>,
    /// child index -> parent index
    pub embed: Vec<usize>,
    /// parent index -> child index
    pub lookup: HashMap<usize, usize>,
}

impl EmbeddedSubgroup {
    /// The action of a parent automorphism on H, in H's coordinates.
    pub fn restrict_action(&self, parent: &AbelianPGroup, a: &ActionMatrix) -> Result<ActionMatrix> {
        let t = self.group.rank();
        let mut entries = vec![vec![0i64; t]; t];
        for (j, &b) in self.basis.iter().enumerate() {
            let image = a.apply(parent, b);
            let child = self
                .lookup
                .get(&image)
                .ok_or_else(|| Error::ActionInvalid("subgroup is not stable under the action".into()))?;
            for (i, c) in self.group.coords(*child).into_iter().enumerate() {
                entries[i][j] = c as i64;
            }
        }
        ActionMatrix::new(&self.group, entries)
    }

    /// Restriction of a parent character (exponent vector index) to H, in H's
    /// character coordinates.
    pub fn restrict_char(&self, parent: &AbelianPGroup, lambda: usize) -> usize {
        let m = parent.exponent();
        let coords: Vec<u64> = self
            .basis
            .iter()
            .zip(self.group.moduli())
            .map(|(&b, &mj)| parent.pairing(lambda, b) / (m / mj))
            .collect();
        self.group.index(&coords)
    }
}

/// An endomorphism of D as an integer matrix acting on column exponent
/// vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ActionMatrix {
    entries: Vec<Vec<i64>>,
}

impl ActionMatrix {
    /// Validates well-definedness: p^{max(0, n_i - n_j)} divides entry (i, j).
    pub fn new(d: &AbelianPGroup, entries: Vec<Vec<i64>>) -> Result<Self> {
        let t = d.rank();
        if entries.len() != t || entries.iter().any(|r| r.len() != t) {
            return Err(Error::ActionInvalid(format!("action matrix must be {t} x {t}")));
        }
        let mut reduced = entries;
        for i in 0..t {
            for j in 0..t {
                let mi = d.moduli()[i] as i64;
                let need = d.p.pow(d.orders[i].saturating_sub(d.orders[j])) as i64;
                reduced[i][j] = reduced[i][j].rem_euclid(mi);
                if reduced[i][j] % need != 0 {
                    return Err(Error::ActionInvalid(format!(
                        "entry ({}, {}) must be divisible by {need} to respect the factor orders",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(ActionMatrix { entries: reduced })
    }

    pub fn identity(d: &AbelianPGroup) -> Self {
        let t = d.rank();
        let entries = (0..t).map(|i| (0..t).map(|j| i64::from(i == j)).collect()).collect();
        ActionMatrix { entries }
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn apply(&self, d: &AbelianPGroup, x: usize) -> usize {
        let c = d.coords(x);
        let image: Vec<u64> = self
            .entries
            .iter()
            .zip(d.moduli())
            .map(|(row, &m)| {
                row.iter()
                    .zip(&c)
                    .map(|(&a, &v)| (a as u64 % m) * v % m)
                    .sum::<u64>()
                    % m
            })
            .collect();
        d.index(&image)
    }

    /// self * other (apply other first).
    pub fn compose(&self, d: &AbelianPGroup, other: &ActionMatrix) -> ActionMatrix {
        let t = d.rank();
        let mut entries = vec![vec![0i64; t]; t];
        for i in 0..t {
            let m = d.moduli()[i] as i128;
            for j in 0..t {
                let s: i128 = (0..t).map(|k| self.entries[i][k] as i128 * other.entries[k][j] as i128).sum();
                entries[i][j] = s.rem_euclid(m) as i64;
            }
        }
        ActionMatrix { entries }
    }

    /// Whether x -> Ax is a bijection of D.
    pub fn is_automorphism(&self, d: &AbelianPGroup) -> bool {
        (1..d.size()).all(|x| self.apply(d, x) != 0)
    }

    /// The character lambda o A.
    pub fn pull_back_char(&self, d: &AbelianPGroup, lambda: usize) -> usize {
        let m = d.exponent();
        let coords: Vec<u64> = (0..d.rank())
            .map(|j| {
                let mut unit = vec![0u64; d.rank()];
                unit[j] = 1;
                let image = self.apply(d, d.index(&unit));
                d.pairing(lambda, image) / (m / d.moduli()[j])
            })
            .collect();
        d.index(&coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let d = AbelianPGroup::new(3, vec![1, 2]).unwrap();
        assert_eq!(d.size(), 27);
        for x in 0..27 {
            assert_eq!(d.index(&d.coords(x)), x);
        }
        assert_eq!(d.coords(1), vec![0, 1]);
        assert_eq!(d.element_order(1), 9);
        assert_eq!(d.element_order(9), 3);
        assert_eq!(d.add(d.neg(5), 5), 0);
    }

    #[test]
    fn subgroup_types_and_bases() {
        let d = AbelianPGroup::new(2, vec![2, 2]).unwrap();
        let all: Vec<usize> = (0..16).collect();
        assert_eq!(d.subgroup_type(&all), vec![2, 2]);
        // <(2,0), (1,1)> has type C_4 x C_2
        let h = d.span(&[d.index(&[2, 0]), d.index(&[1, 1])]);
        assert_eq!(h.len(), 8);
        assert_eq!(d.subgroup_type(&h), vec![2, 1]);
        let emb = d.embedded_subgroup(&h).unwrap();
        assert_eq!(emb.group.orders(), &[2, 1]);
        let mut image = emb.embed.clone();
        image.sort_unstable();
        assert_eq!(image, h);

        let e = AbelianPGroup::new(3, vec![1, 2]).unwrap();
        let all: Vec<usize> = (0..27).collect();
        assert_eq!(e.subgroup_type(&all), vec![2, 1]);
    }

    #[test]
    fn action_checks() {
        let d = AbelianPGroup::new(3, vec![1, 2]).unwrap();
        // entry (2,1) maps a C_3 coordinate into C_9 and must be divisible by 3
        assert!(ActionMatrix::new(&d, vec![vec![1, 0], vec![1, 1]]).is_err());
        let a = ActionMatrix::new(&d, vec![vec![1, 0], vec![3, 1]]).unwrap();
        assert!(a.is_automorphism(&d));
        let z = ActionMatrix::new(&d, vec![vec![0, 0], vec![0, 1]]).unwrap();
        assert!(!z.is_automorphism(&d));
    }

    #[test]
    fn character_pullback() {
        // inversion on C_3 maps lambda to lambda^2
        let d = AbelianPGroup::new(3, vec![1]).unwrap();
        let inv = ActionMatrix::new(&d, vec![vec![-1]]).unwrap();
        assert_eq!(inv.pull_back_char(&d, 1), 2);
        for lam in 0..3 {
            for x in 0..3 {
                assert_eq!(d.pairing(inv.pull_back_char(&d, lam), x), d.pairing(lam, inv.apply(&d, x)));
            }
        }
    }
}
