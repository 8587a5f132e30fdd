use std::collections::HashMap;

use num_traits::ToPrimitive;

use super::{char_table, induce, inner_product, CharacterTable, ClassFunction};
use crate::error::{Error, Result};
use crate::group::{CharOrbit, FiniteGroup, SemidirectGroup};
use crate::ring::CycloNumber;

/// Indices of the characters chi of F with chi(z) = chi(1) phi(z), tested on
/// a generator z of Z; phi(z) = zeta_{|Z|}^phi_exponent.
pub fn irr_over_phi(
    f: &FiniteGroup,
    table: &CharacterTable,
    z_generator: usize,
    z_order: u64,
    phi_exponent: u64,
) -> Result<Vec<usize>> {
    if !f.is_central(z_generator) {
        return Err(Error::ZNotCentral);
    }
    let phi = CycloNumber::root(z_order.max(1), phi_exponent as i64);
    Ok(table
        .chars
        .iter()
        .enumerate()
        .filter(|(_, chi)| {
            let want = phi.scale(&num_rational::BigRational::from_integer((chi.degree() as i64).into()));
            *chi.at(f, z_generator) == want
        })
        .map(|(i, _)| i)
        .collect())
}

/// The stabilizer E_lambda of an orbit representative with its table.
#[derive(Debug, Clone)]
pub struct StabilizerData {
    pub orbit: CharOrbit,
    pub group: FiniteGroup,
    /// stabilizer index -> E index
    pub embed: Vec<usize>,
    pub table: CharacterTable,
    /// rows of `table` lying over phi
    pub over_phi: Vec<usize>,
}

/// An element (lambda, chi) of Irr(B): lambda an orbit representative,
/// chi in Irr(E_lambda | phi).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCharacter {
    pub index: usize,
    pub orbit: usize,
    pub lambda: usize,
    /// row of the stabilizer's character table
    pub chi: usize,
    pub degree: u64,
    /// multiplicity of each Brauer character in the reduction
    pub reduction: Vec<u64>,
}

/// Irr(B), IBr(B) = Irr(E | phi), and the decomposition map.
#[derive(Debug, Clone)]
pub struct BlockData {
    pub group: SemidirectGroup,
    pub e_table: CharacterTable,
    /// rows of `e_table` forming Irr(E | phi)
    pub brauer: Vec<usize>,
    pub stabilizers: Vec<StabilizerData>,
    pub chars: Vec<BlockCharacter>,
}

impl BlockData {
    pub fn chi(&self, c: &BlockCharacter) -> &ClassFunction {
        &self.stabilizers[c.orbit].table.chars[c.chi]
    }

    pub fn stabilizer(&self, c: &BlockCharacter) -> &StabilizerData {
        &self.stabilizers[c.orbit]
    }

    pub fn brauer_char(&self, psi: usize) -> &ClassFunction {
        &self.e_table.chars[self.brauer[psi]]
    }

    pub fn decomposition_matrix(&self) -> Vec<Vec<u64>> {
        self.chars.iter().map(|c| c.reduction.clone()).collect()
    }

    /// Block characters reducing to exactly the Brauer character psi.
    pub fn lifts_of(&self, psi: usize) -> Vec<usize> {
        self.chars
            .iter()
            .filter(|c| c.reduction.iter().enumerate().all(|(j, &m)| m == u64::from(j == psi)))
            .map(|c| c.index)
            .collect()
    }

    /// The restriction of lambda to D_2, in D_2's character coordinates.
    pub fn theta(&self, c: &BlockCharacter) -> usize {
        self.group.d2.restrict_char(self.group.d(), c.lambda)
    }

    /// The restriction of lambda to D_1, in D_1's character coordinates.
    pub fn alpha(&self, c: &BlockCharacter) -> usize {
        self.group.d1.restrict_char(self.group.d(), c.lambda)
    }

    /// Whether the Brauer reductions of two characters share a constituent.
    pub fn reductions_overlap(&self, a: &BlockCharacter, b: &BlockCharacter) -> bool {
        a.reduction.iter().zip(&b.reduction).any(|(&x, &y)| x > 0 && y > 0)
    }

    /// The ordinary character (lambda, chi) induced to G, on G's classes.
    pub fn induced_character(&self, c: &BlockCharacter) -> Result<ClassFunction> {
        let split = &self.group.g;
        let full = split.full_group();
        let stab = self.stabilizer(c);
        let d = self.group.d();
        let elems: Vec<usize> = stab
            .embed
            .iter()
            .flat_map(|&f| (0..d.size()).map(move |x| split.element(x, f)))
            .collect();
        let (h, h_embed) = full.subgroup(&elems)?;
        let pos: HashMap<usize, usize> = stab.embed.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let chi = self.chi(c);
        let exp_d = d.exponent();
        let value = ClassFunction::from_elements(&h, |y| {
            let (x, f) = split.split(h_embed[y]);
            let lam = CycloNumber::root(exp_d, d.pairing(c.lambda, x) as i64);
            lam.mul(chi.at(&stab.group, pos[&f]))
        });
        Ok(induce(full, &h, &h_embed, &value))
    }

    /// Sum of squared degrees, which must equal |G| / |Z|.
    pub fn degree_square_sum(&self) -> u64 {
        self.chars.iter().map(|c| c.degree * c.degree).sum()
    }

    /// Checks that the induced characters are irreducible and pairwise
    /// distinct by comparing values on G.
    pub fn check_distinct(&self) -> Result<()> {
        let full = self.group.g.full_group();
        let induced = self.chars.iter().map(|c| self.induced_character(c)).collect::<Result<Vec<_>>>()?;
        for (i, a) in induced.iter().enumerate() {
            if inner_product(full, a, a)? != num_rational::BigRational::from_integer(1.into()) {
                return Err(Error::DimensionCheck(format!("block character {i} is not irreducible")));
            }
            if induced[..i].contains(a) {
                return Err(Error::DimensionCheck(format!("block character {i} repeats an earlier one")));
            }
        }
        Ok(())
    }
}

/// Parametrizes Irr(B) by orbit representatives and characters of their
/// stabilizers over phi, and computes the reduction to Irr(E | phi).
pub fn build_irr_b(group: &SemidirectGroup) -> Result<BlockData> {
    let e = group.e();
    let e_table = char_table(e)?;
    let z_order = group.z_order();
    let brauer = irr_over_phi(e, &e_table, group.z_generator, z_order, group.phi_exponent)?;

    let mut tables: HashMap<Vec<usize>, (FiniteGroup, Vec<usize>, CharacterTable)> = HashMap::new();
    let mut stabilizers = Vec::new();
    let mut chars = Vec::new();
    for (o, orbit) in group.orbits().into_iter().enumerate() {
        if !tables.contains_key(&orbit.stabilizer) {
            let (sub, embed) = e.subgroup(&orbit.stabilizer)?;
            let table = char_table(&sub)?;
            tables.insert(orbit.stabilizer.clone(), (sub, embed, table));
        }
        let (sub, embed, table) = tables[&orbit.stabilizer].clone();
        let z_local = embed
            .iter()
            .position(|&x| x == group.z_generator)
            .ok_or_else(|| Error::DimensionCheck("Z is not contained in a stabilizer".into()))?;
        let over_phi = irr_over_phi(&sub, &table, z_local, z_order, group.phi_exponent)?;
        let index_factor = (e.order() / sub.order()) as u64;
        for &chi in &over_phi {
            let induced = induce(e, &sub, &embed, &table.chars[chi]);
            let reduction = brauer
                .iter()
                .map(|&psi| {
                    let m = inner_product(e, &induced, &e_table.chars[psi])?;
                    m.to_integer()
                        .to_u64()
                        .filter(|_| m.is_integer())
                        .ok_or_else(|| Error::DimensionCheck(format!("non-integral multiplicity {m}")))
                })
                .collect::<Result<Vec<_>>>()?;
            chars.push(BlockCharacter {
                index: chars.len(),
                orbit: o,
                lambda: orbit.representative,
                chi,
                degree: table.chars[chi].degree() * index_factor,
                reduction,
            });
        }
        stabilizers.push(StabilizerData { orbit, group: sub, embed, table, over_phi });
    }

    let data = BlockData { group: group.clone(), e_table, brauer, stabilizers, chars };
    let want = (group.g.order() as u64) / z_order;
    if data.degree_square_sum() != want {
        return Err(Error::DimensionCheck(format!(
            "squared degrees sum to {} instead of |G|/|Z| = {want}",
            data.degree_square_sum()
        )));
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{inverting_c3, inverting_c3_times_c3, rotating_c4_squared, validate_block_spec, BlockSpec, DEFAULT_ORDER_BOUND};

    #[test]
    fn inverting_c3_irr_b() {
        let g = validate_block_spec(&inverting_c3()).unwrap();
        let b = build_irr_b(&g).unwrap();
        let degrees: Vec<u64> = b.chars.iter().map(|c| c.degree).collect();
        assert_eq!(degrees, vec![1, 1, 2]);
        assert_eq!(b.decomposition_matrix(), vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(b.lifts_of(0), vec![0]);
        assert_eq!(b.lifts_of(1), vec![1]);
        b.check_distinct().unwrap();
        // the Brauer characters send the generator of C_4 to +-i
        let gen = g.e().generators()[0];
        for psi in 0..2 {
            let v = b.brauer_char(psi).at(g.e(), gen);
            assert_eq!(v.mul(v), CycloNumber::from_int(4, -1));
        }
    }

    #[test]
    fn inverting_c3_times_c3_irr_b() {
        let g = validate_block_spec(&inverting_c3_times_c3()).unwrap();
        let b = build_irr_b(&g).unwrap();
        assert_eq!(b.chars.len(), 9);
        assert_eq!(b.chars.iter().filter(|c| c.degree == 1).count(), 6);
        assert_eq!(b.chars.iter().filter(|c| c.degree == 2).count(), 3);
        for psi in 0..2 {
            let lifts = b.lifts_of(psi);
            assert_eq!(lifts.len(), 3);
            let mut thetas: Vec<usize> = lifts.iter().map(|&i| b.theta(&b.chars[i])).collect();
            thetas.sort_unstable();
            assert_eq!(thetas, vec![0, 1, 2]);
        }
        b.check_distinct().unwrap();
    }

    #[test]
    fn rotating_c4_squared_irr_b() {
        let g = validate_block_spec(&rotating_c4_squared()).unwrap();
        let b = build_irr_b(&g).unwrap();
        assert_eq!(b.degree_square_sum(), 48);
        let degrees: Vec<u64> = b.chars.iter().map(|c| c.degree).collect();
        assert_eq!(degrees.iter().filter(|&&d| d == 1).count(), 3);
        assert_eq!(degrees.iter().filter(|&&d| d == 3).count(), 5);
        for psi in 0..3 {
            assert_eq!(b.lifts_of(psi).len(), 1);
        }
        b.check_distinct().unwrap();
    }

    #[test]
    fn trivial_action_is_abelian() {
        let s = BlockSpec {
            p: 3,
            defect: vec![1],
            generators: vec![vec![1, 0]],
            actions: vec![vec![vec![1]]],
            phi: None,
            order_bound: DEFAULT_ORDER_BOUND,
        };
        let g = validate_block_spec(&s).unwrap();
        let b = build_irr_b(&g).unwrap();
        assert_eq!(b.chars.len(), 3);
        assert!(b.chars.iter().all(|c| c.degree == 1));
        assert_eq!(b.lifts_of(0).len(), 3);
    }
}
