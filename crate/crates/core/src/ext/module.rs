//! Explicit O-forms of the linear-source modules: V_chi cut out of a
//! monomial module by the central idempotent, extended by lambda-scalars
//! and induced up, plus duals, tensor products and restriction.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_rational::BigRational;

use crate::chars::{char_table, inner_product, restrict, BlockCharacter, BlockData, ClassFunction};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, SplitGroup};
use crate::ring::{image_basis, CycloNumber, Matrix, Ring};

/// How a representation was obtained; carried for diagnostics only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Linear,
    Irreducible,
    Induced,
    Restricted,
    HomSpace,
}

/// A representation of a split group P x| F over a ring: one matrix per
/// group element, indexed as in `SplitGroup::element`.
#[derive(Debug, Clone)]
pub struct ModuleRep<E> {
    pub rank: usize,
    pub mats: Vec<Matrix<E>>,
    pub provenance: Provenance,
}

impl<E: Clone + PartialEq> ModuleRep<E> {
    /// The contragredient: g acts by the transpose of rho(g^-1).
    pub fn dual(&self, group: &SplitGroup) -> ModuleRep<E> {
        let mats = (0..group.order()).map(|g| self.mats[split_inverse(group, g)].transpose()).collect();
        ModuleRep { rank: self.rank, mats, provenance: Provenance::HomSpace }
    }

    pub fn tensor<R: Ring<Elem = E>>(&self, ring: &R, other: &ModuleRep<E>) -> ModuleRep<E> {
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| a.kron(ring, b)).collect();
        ModuleRep { rank: self.rank * other.rank, mats, provenance: Provenance::HomSpace }
    }

    /// Restriction from `base` = P x| F to `target` = P x| F', where `embed`
    /// sends F' into F.
    pub fn restrict(&self, base: &SplitGroup, target: &SplitGroup, embed: &[usize]) -> ModuleRep<E> {
        let n = target.normal.size();
        let mats = (0..target.order())
            .map(|g| {
                let (x, f) = (g % n, g / n);
                self.mats[base.element(x, embed[f])].clone()
            })
            .collect();
        ModuleRep { rank: self.rank, mats, provenance: Provenance::Restricted }
    }

    /// rho(g) rho(s) = rho(gs) for every g and every generator s.
    pub fn check_relations<R: Ring<Elem = E>>(&self, ring: &R, group: &SplitGroup) -> bool {
        let full = group.full_group();
        (0..group.order()).all(|g| {
            full.generators()
                .iter()
                .all(|&s| self.mats[g].mul(ring, &self.mats[s]) == self.mats[full.mul(g, s)])
        })
    }

    pub fn trace<R: Ring<Elem = E>>(&self, ring: &R, g: usize) -> E {
        self.mats[g].trace(ring)
    }
}

fn split_inverse(group: &SplitGroup, g: usize) -> usize {
    let (x, f) = group.split(g);
    let finv = group.complement.inv(f);
    group.element(group.normal.neg(group.act(finv, x)), finv)
}

/// Ind_{P x| S}^{P x| F} (lambda (x) V_chi) described exactly, so that it can
/// be realized over any ring carrying the needed roots of unity.
#[derive(Debug, Clone)]
pub struct ModuleSpec {
    pub lambda: usize,
    /// S, a subgroup of F fixing lambda, as sorted elements of F
    pub stabilizer: Vec<usize>,
    /// chi on the group `F.subgroup(stabilizer)`
    pub chi: ClassFunction,
    /// a subgroup H of S (in S's indexing) and a linear character mu of H
    /// occurring exactly once in chi restricted to H
    source: Vec<usize>,
    source_values: Vec<CycloNumber>,
}

impl ModuleSpec {
    pub fn new(group: &SplitGroup, lambda: usize, stabilizer: &[usize], chi: ClassFunction) -> Result<Self> {
        let (s, embed) = group.complement.subgroup(stabilizer)?;
        if embed.iter().any(|&f| group.act_on_char(f, lambda) != lambda) {
            return Err(Error::InvalidInput(format!("character {lambda} is not fixed by the given stabilizer")));
        }
        if chi.values().len() != s.class_count() {
            return Err(Error::InvalidInput("chi does not live on the stabilizer".into()));
        }
        let (source, source_values) = multiplicity_one_source(&s, &chi)?;
        Ok(ModuleSpec { lambda, stabilizer: embed, chi, source, source_values })
    }

    /// The module M_c of a block character on G = D x| E.
    pub fn for_block_char(block: &BlockData, c: &BlockCharacter) -> Result<Self> {
        ModuleSpec::new(&block.group.g, c.lambda, &block.stabilizer(c).orbit.stabilizer, block.chi(c).clone())
    }

    pub fn rank(&self, group: &SplitGroup) -> usize {
        (group.complement.order() / self.stabilizer.len()) * self.chi.degree() as usize
    }

    /// Stable text identifying the module, used in memo keys.
    pub fn key(&self) -> String {
        let mut s = format!("l{};s{:?};c", self.lambda, self.stabilizer);
        for v in self.chi.values() {
            let _ = write!(s, "{v},");
        }
        s
    }
}

/// Finds H <= F and a linear mu of H with <chi|_H, mu> = 1, preferring large H.
fn multiplicity_one_source(f: &FiniteGroup, chi: &ClassFunction) -> Result<(Vec<usize>, Vec<CycloNumber>)> {
    if chi.degree() == 1 {
        let values = (0..f.order()).map(|x| chi.at(f, x).clone()).collect();
        return Ok(((0..f.order()).collect(), values));
    }
    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for a in 0..f.order() {
        for b in a..f.order() {
            let h = f.generated(&[a, b]);
            if h.len() < f.order() && seen.insert(h.clone()) {
                candidates.push(h);
            }
        }
    }
    candidates.sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
    let one = BigRational::from_integer(1.into());
    for h in candidates {
        let (sub, embed) = f.subgroup(&h)?;
        let res = restrict(f, chi, &sub, &embed);
        for mu in char_table(&sub)?.chars.iter().filter(|m| m.degree() == 1) {
            if inner_product(&sub, &res, mu)? == one {
                let values = (0..sub.order()).map(|y| mu.at(&sub, y).clone()).collect();
                return Ok((embed, values));
            }
        }
    }
    Err(Error::IdempotentNotSplit(format!(
        "no subgroup carries a multiplicity-one linear constituent of a degree {} character",
        chi.degree()
    )))
}

fn to_ring<R: Ring>(ring: &R, x: &CycloNumber) -> Result<R::Elem> {
    x.to_ring(ring)
        .ok_or(Error::ConductorMismatch { needed: x.conductor(), available: ring.conductor() })
}

/// Matrices of Ind_H^F mu, one per element of F, on the basis of cosets.
fn monomial_module<R: Ring>(
    ring: &R,
    f: &FiniteGroup,
    h: &[usize],
    mu: &[CycloNumber],
) -> Result<Vec<Matrix<R::Elem>>> {
    let transversal = f.left_transversal(h);
    let k = transversal.len();
    let mut coset = vec![0usize; f.order()];
    for (j, &t) in transversal.iter().enumerate() {
        for &x in h {
            coset[f.mul(t, x)] = j;
        }
    }
    let pos: HashMap<usize, usize> = h.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mu_ring = mu.iter().map(|v| to_ring(ring, v)).collect::<Result<Vec<_>>>()?;
    Ok((0..f.order())
        .map(|g| {
            let mut m = Matrix::zeros(ring, k, k);
            for (j, &t) in transversal.iter().enumerate() {
                let gt = f.mul(g, t);
                let jj = coset[gt];
                let inside = f.mul(f.inv(transversal[jj]), gt);
                m[(jj, j)] = mu_ring[pos[&inside]].clone();
            }
            m
        })
        .collect())
}

/// A representation of F affording the irreducible chi, over the ring.
fn irreducible_rep<R: Ring>(
    ring: &R,
    f: &FiniteGroup,
    chi: &ClassFunction,
    source: &[usize],
    source_values: &[CycloNumber],
) -> Result<Vec<Matrix<R::Elem>>> {
    let chi_ring = chi.values().iter().map(|v| to_ring(ring, v)).collect::<Result<Vec<_>>>()?;
    let degree = chi.degree() as usize;
    if source.len() == f.order() {
        // chi is linear
        return Ok((0..f.order())
            .map(|g| Matrix::from_vec(1, 1, vec![chi_ring[f.class_of(g)].clone()]))
            .collect());
    }
    let monomial = monomial_module(ring, f, source, source_values)?;
    let k = monomial[0].rows();
    let scale = ring
        .from_rational(degree as i64, f.order() as i64)
        .ok_or_else(|| Error::IdempotentNotSplit("|F| is not invertible".into()))?;
    let mut idem = Matrix::zeros(ring, k, k);
    for (g, m) in monomial.iter().enumerate() {
        let c = ring.mul(&scale, &chi_ring[f.class_of(f.inv(g))]);
        for i in 0..k {
            for j in 0..k {
                if !ring.is_zero(&m[(i, j)]) {
                    let t = ring.mul(&c, &m[(i, j)]);
                    ring.add_assign(&mut idem[(i, j)], &t);
                }
            }
        }
    }
    let image = image_basis(ring, &idem);
    if image.dim() != degree {
        return Err(Error::IdempotentNotSplit(format!(
            "image of the idempotent has rank {} instead of {degree}",
            image.dim()
        )));
    }
    let rep: Vec<Matrix<R::Elem>> = monomial
        .iter()
        .map(|m| {
            let moved = m.mul(ring, &image.basis);
            image.inverse.mul(ring, &moved.select_rows(&image.rows))
        })
        .collect();
    for (g, m) in rep.iter().enumerate() {
        if m.trace(ring) != chi_ring[f.class_of(g)] {
            return Err(Error::IdempotentNotSplit(format!("trace mismatch at element {g}")));
        }
    }
    Ok(rep)
}

/// Realizes the module over `ring` as a representation of `group`.
pub fn realize<R: Ring>(ring: &R, group: &SplitGroup, spec: &ModuleSpec) -> Result<ModuleRep<R::Elem>> {
    let f = &group.complement;
    let p = &group.normal;
    let (s, embed) = f.subgroup(&spec.stabilizer)?;
    let v = irreducible_rep(ring, &s, &spec.chi, &spec.source, &spec.source_values)?;
    let d = v[0].rows();
    let exp_p = p.exponent();
    let lambda: Vec<R::Elem> = (0..p.size())
        .map(|x| {
            ring.root_of_order(exp_p, p.pairing(spec.lambda, x))
                .ok_or(Error::ConductorMismatch { needed: exp_p, available: ring.conductor() })
        })
        .collect::<Result<_>>()?;

    let transversal = f.left_transversal(&spec.stabilizer);
    let k = transversal.len();
    let mut coset = vec![0usize; f.order()];
    for (j, &t) in transversal.iter().enumerate() {
        for &x in &spec.stabilizer {
            coset[f.mul(t, x)] = j;
        }
    }
    let mut pos = vec![usize::MAX; f.order()];
    for (i, &x) in embed.iter().enumerate() {
        pos[x] = i;
    }
    let mut mats = Vec::with_capacity(group.order());
    for g in 0..group.order() {
        let (x, fe) = group.split(g);
        let mut m = Matrix::zeros(ring, k * d, k * d);
        for (j, &t) in transversal.iter().enumerate() {
            let ft = f.mul(fe, t);
            let jj = coset[ft];
            let back = f.inv(transversal[jj]);
            let inside = pos[f.mul(back, ft)];
            let scalar = &lambda[group.act(back, x)];
            for a in 0..d {
                for b in 0..d {
                    m[(jj * d + a, j * d + b)] = ring.mul(scalar, &v[inside][(a, b)]);
                }
            }
        }
        mats.push(m);
    }
    let provenance = match (k, d) {
        (1, 1) => Provenance::Linear,
        (1, _) => Provenance::Irreducible,
        _ => Provenance::Induced,
    };
    Ok(ModuleRep { rank: k * d, mats, provenance })
}

/// The O-form M_c of a block character on D x| E.
pub fn build_module_rep<R: Ring>(ring: &R, block: &BlockData, c: &BlockCharacter) -> Result<ModuleRep<R::Elem>> {
    realize(ring, &block.group.g, &ModuleSpec::for_block_char(block, c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::build_irr_b;
    use crate::group::{inverting_c3, rotating_c4_squared, validate_block_spec};
    use crate::ring::{ChainRing, PrimeField};

    #[test]
    fn inverting_c3_modules() {
        let g = validate_block_spec(&inverting_c3()).unwrap();
        let b = build_irr_b(&g).unwrap();
        let r = ChainRing::new(3, g.exponent(), 3).unwrap();
        for c in &b.chars {
            let m = build_module_rep(&r, &b, c).unwrap();
            assert_eq!(m.rank as u64, c.degree);
            assert!(m.check_relations(&r, &g.g));
        }
        let m = build_module_rep(&r, &b, &b.chars[2]).unwrap();
        assert_eq!(m.provenance, Provenance::Induced);
        // on D the character is lambda + lambda^2 = -1 at a generator
        let x = g.d().index(&[1]);
        assert_eq!(m.trace(&r, g.g.element(x, 0)), r.from_int(-1));
    }

    #[test]
    fn rotating_c4_squared_linear_modules() {
        let g = validate_block_spec(&rotating_c4_squared()).unwrap();
        let b = build_irr_b(&g).unwrap();
        let field = PrimeField::large(g.exponent()).unwrap();
        for c in b.chars.iter().filter(|c| c.degree == 1) {
            let m = build_module_rep(&field, &b, c).unwrap();
            assert_eq!(m.provenance, Provenance::Linear);
            for x in 0..g.d().size() {
                assert_eq!(m.mats[g.g.element(x, 0)][(0, 0)], 1);
            }
            let gen = g.e().generators()[0];
            let v = m.mats[g.g.element(0, gen)][(0, 0)];
            assert_eq!(field.pow(&v, 3), 1);
        }
        for c in b.chars.iter().filter(|c| c.degree == 3) {
            let m = build_module_rep(&field, &b, c).unwrap();
            assert!(m.check_relations(&field, &g.g));
        }
    }

    #[test]
    fn nonlinear_v_chi_from_quaternions() {
        use crate::chars::dixon_tests_sl23;
        let f = dixon_tests_sl23();
        let table = char_table(&f).unwrap();
        let ring = ChainRing::new(5, f.exponent(), 2).unwrap();
        for chi in table.chars.iter().filter(|c| c.degree() > 1) {
            let (src, vals) = multiplicity_one_source(&f, chi).unwrap();
            let rep = irreducible_rep(&ring, &f, chi, &src, &vals).unwrap();
            for a in 0..f.order() {
                for bb in 0..f.order() {
                    assert_eq!(rep[a].mul(&ring, &rep[bb]), rep[f.mul(a, bb)]);
                }
            }
        }
    }

    #[test]
    fn dual_and_tensor() {
        let g = validate_block_spec(&inverting_c3()).unwrap();
        let b = build_irr_b(&g).unwrap();
        let r = ChainRing::new(3, g.exponent(), 3).unwrap();
        let m = build_module_rep(&r, &b, &b.chars[2]).unwrap();
        let c = m.dual(&g.g).tensor(&r, &m);
        assert_eq!(c.rank, 4);
        assert!(c.check_relations(&r, &g.g));
    }
}
