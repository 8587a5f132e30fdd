//! Exact character theory: tables, class functions, induction and
//! restriction, and the parametrization of the ordinary and Brauer
//! characters of the block.

mod block;
mod dixon;

use num_rational::BigRational;
use serde::Serialize;

pub use block::{build_irr_b, irr_over_phi, BlockCharacter, BlockData, StabilizerData};
pub use dixon::{char_table, check_orthogonality, CharacterTable};
#[cfg(test)]
pub(crate) use dixon::tests::sl23 as dixon_tests_sl23;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::ring::CycloNumber;

/// A class function: one exact value per conjugacy class, in the group's
/// class order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    values: Vec<CycloNumber>,
}

impl ClassFunction {
    pub fn new(values: Vec<CycloNumber>) -> Self {
        ClassFunction { values }
    }

    pub fn values(&self) -> &[CycloNumber] {
        &self.values
    }

    /// Value at the identity, assumed a non-negative integer.
    pub fn degree(&self) -> u64 {
        self.values[0].as_integer().unwrap_or(0).max(0) as u64
    }

    pub fn at(&self, g: &FiniteGroup, x: usize) -> &CycloNumber {
        &self.values[g.class_of(x)]
    }

    pub fn add(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn mul(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction::new(self.values.iter().zip(&other.values).map(|(a, b)| a.mul(b)).collect())
    }

    pub fn conj(&self) -> ClassFunction {
        ClassFunction::new(self.values.iter().map(CycloNumber::conj).collect())
    }

    pub fn scale_int(&self, k: i64) -> ClassFunction {
        let r = BigRational::from_integer(k.into());
        ClassFunction::new(self.values.iter().map(|v| v.scale(&r)).collect())
    }

    pub fn zero(g: &FiniteGroup) -> ClassFunction {
        ClassFunction::new(vec![CycloNumber::zero(1); g.class_count()])
    }

    pub fn trivial(g: &FiniteGroup) -> ClassFunction {
        ClassFunction::new(vec![CycloNumber::one(1); g.class_count()])
    }

    /// A class function from its values on every element.
    pub fn from_elements(g: &FiniteGroup, f: impl Fn(usize) -> CycloNumber) -> ClassFunction {
        ClassFunction::new(g.classes().iter().map(|c| f(c[0])).collect())
    }

    /// Exact values as (conductor, coefficient strings) for serialization.
    pub fn serialized(&self) -> Vec<SerializedValue> {
        self.values.iter().map(SerializedValue::from).collect()
    }
}

/// A cyclotomic number as its conductor and rational coefficients in the
/// power basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SerializedValue {
    pub conductor: u64,
    pub coefficients: Vec<String>,
}

impl From<&CycloNumber> for SerializedValue {
    fn from(x: &CycloNumber) -> Self {
        SerializedValue {
            conductor: x.conductor(),
            coefficients: x.coefficients().iter().map(ToString::to_string).collect(),
        }
    }
}

/// (1/|G|) sum_g a(g) conj(b(g)), required to be rational.
pub fn inner_product(g: &FiniteGroup, a: &ClassFunction, b: &ClassFunction) -> Result<BigRational> {
    if a.values.len() != g.class_count() || b.values.len() != g.class_count() {
        return Err(Error::InvalidInput("class function does not match the group".into()));
    }
    let mut acc = CycloNumber::zero(1);
    for (k, class) in g.classes().iter().enumerate() {
        let term = a.values[k].mul(&b.values[k].conj());
        acc = acc.add(&term.scale(&BigRational::from_integer((class.len() as i64).into())));
    }
    let sum = acc
        .as_rational()
        .ok_or_else(|| Error::InvalidInput(format!("inner product {acc} is not rational")))?;
    Ok(sum / BigRational::from_integer((g.order() as i64).into()))
}

/// Restriction along an embedding H -> G (H index -> G index).
pub fn restrict(g: &FiniteGroup, chi: &ClassFunction, h: &FiniteGroup, embed: &[usize]) -> ClassFunction {
    ClassFunction::from_elements(h, |x| chi.at(g, embed[x]).clone())
}

/// Induction from H (embedded in G) to G.
pub fn induce(g: &FiniteGroup, h: &FiniteGroup, embed: &[usize], chi: &ClassFunction) -> ClassFunction {
    let mut member = vec![None; g.order()];
    for (i, &x) in embed.iter().enumerate() {
        member[x] = Some(i);
    }
    let transversal = g.left_transversal(&{
        let mut s = embed.to_vec();
        s.sort_unstable();
        s
    });
    ClassFunction::from_elements(g, |x| {
        // sum over cosets tH: chi(t^{-1} x t) when it lies in H
        let mut acc = CycloNumber::zero(1);
        for &t in &transversal {
            let y = g.mul(g.mul(g.inv(t), x), t);
            if let Some(i) = member[y] {
                acc = acc.add(chi.at(h, i));
            }
        }
        acc
    })
}

/// One Mackey summand: the double coset representative g and the class
/// function Ind_{H cap gKg^-1}^H of the conjugated character.
#[derive(Debug, Clone)]
pub struct MackeyPiece {
    pub representative: usize,
    pub character: ClassFunction,
}

/// Decomposes Res_H Ind_K^G chi over the double cosets H g K and checks that
/// the pieces sum to the direct computation.
pub fn mackey_restrict_induced(
    g: &FiniteGroup,
    h_elems: &[usize],
    k_elems: &[usize],
    chi: &ClassFunction,
) -> Result<Vec<MackeyPiece>> {
    let (h, h_embed) = g.subgroup(h_elems)?;
    let (k, k_embed) = g.subgroup(k_elems)?;
    let mut k_index = vec![None; g.order()];
    for (i, &x) in k_embed.iter().enumerate() {
        k_index[x] = Some(i);
    }
    let mut pieces = Vec::new();
    let mut total = ClassFunction::zero(&h);
    for rep in g.double_cosets(&h_embed, &k_embed)? {
        // H cap rep K rep^{-1}, as indices in h
        let inter: Vec<usize> = (0..h.order())
            .filter(|&i| k_index[g.conjugate(h_embed[i], g.inv(rep))].is_some())
            .collect();
        let (sub, sub_embed) = h.subgroup(&inter)?;
        let conjugated = ClassFunction::from_elements(&sub, |y| {
            let x = g.conjugate(h_embed[sub_embed[y]], g.inv(rep));
            chi.at(&k, k_index[x].unwrap()).clone()
        });
        let piece = induce(&h, &sub, &sub_embed, &conjugated);
        total = total.add(&piece);
        pieces.push(MackeyPiece { representative: rep, character: piece });
    }
    let direct = restrict(g, &induce(g, &k, &k_embed, chi), &h, &h_embed);
    if direct != total {
        return Err(Error::DimensionCheck("Mackey pieces do not sum to the restriction".into()));
    }
    Ok(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> FiniteGroup {
        FiniteGroup::from_permutations(&[vec![1, 2, 3, 0]], 512).unwrap()
    }

    #[test]
    fn regular_character() {
        let g = c4();
        let triv_sub = FiniteGroup::from_permutations(&[], 512).unwrap();
        let one = ClassFunction::trivial(&triv_sub);
        let reg = induce(&g, &triv_sub, &[0], &one);
        assert_eq!(reg.values()[0].as_integer(), Some(4));
        assert!(reg.values()[1..].iter().all(CycloNumber::is_zero));
    }

    #[test]
    fn frobenius_reciprocity() {
        let g = dixon::tests::sl23();
        let tg = char_table(&g).unwrap();
        let center: Vec<usize> = (0..g.order()).filter(|&x| g.is_central(x)).collect();
        let q8: Vec<usize> = (0..g.order()).filter(|&x| [1, 2, 4].contains(&g.element_order(x))).collect();
        for sub in [center, q8] {
            let (h, emb) = g.subgroup(&sub).unwrap();
            let th = char_table(&h).unwrap();
            for a in &th.chars {
                for b in &tg.chars {
                    let lhs = inner_product(&g, &induce(&g, &h, &emb, a), b).unwrap();
                    let rhs = inner_product(&h, a, &restrict(&g, b, &h, &emb)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn mackey_examples() {
        let g = c4();
        let all: Vec<usize> = (0..4).collect();
        let t = char_table(&g).unwrap();
        let pieces = mackey_restrict_induced(&g, &all, &all, &t.chars[2]).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].character, t.chars[2]);
        let one = ClassFunction::trivial(&FiniteGroup::from_permutations(&[], 512).unwrap());
        let center = g.generated(&[g.pow(g.generators()[0], 2)]);
        let pieces = mackey_restrict_induced(&g, &center, &[0], &one).unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|p| p.character.values()[0].as_integer() == Some(2)));
    }
}
