//! Valuations on the DVR O (normalized so v(p) = 1) and isomorphism classes
//! of finitely generated O-modules.

use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::arith::is_prime;
use crate::error::{Error, Result};

/// A non-negative exact valuation, v(p) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation(Ratio<u64>);

impl Valuation {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "valuation denominator must be positive");
        Valuation(Ratio::new(num, den))
    }

    pub fn integer(k: u64) -> Self {
        Valuation(Ratio::from_integer(k))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn as_ratio(&self) -> Ratio<u64> {
        self.0
    }

    /// `Some(n)` when this is v(1 - zeta) for a primitive p^n-th root of unity.
    pub fn as_one_minus_zeta(&self, p: u64) -> Option<u32> {
        (1..=40u32).find(|&n| {
            let den = p.checked_pow(n - 1).and_then(|q| q.checked_mul(p - 1));
            matches!(den, Some(d) if self.0 == Ratio::new(1, d))
        })
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Valuation", 2)?;
        st.serialize_field("num", self.0.numer())?;
        st.serialize_field("den", self.0.denom())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            num: u64,
            den: u64,
        }
        let raw = Raw::deserialize(d)?;
        if raw.den == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Valuation::new(raw.num, raw.den))
    }
}

/// v(1 - zeta) for zeta a primitive p^n-th root of unity: 1 / (p^{n-1}(p-1)).
///
/// Note that 1 - zeta lies in pO exactly when this is >= 1, i.e. for
/// (p, n) = (2, 1) only; the case (2, 2) gives 1/2.
pub fn val_one_minus_zeta(p: u64, n: u32) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidInput("root of unity order exponent must be >= 1".into()));
    }
    let den = p
        .checked_pow(n - 1)
        .and_then(|q| q.checked_mul(p - 1))
        .ok_or_else(|| Error::InvalidInput("root of unity order too large".into()))?;
    Ok(Valuation::new(1, den))
}

/// Isomorphism class of a finitely generated O-module:
/// O^free_rank plus a sum of O/aO with v(a) in `torsion`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OModuleClass {
    pub free_rank: usize,
    torsion: Vec<Valuation>,
}

impl OModuleClass {
    /// Builds a class; zero valuations (units) are dropped and the torsion is sorted.
    pub fn new(free_rank: usize, torsion: impl IntoIterator<Item = Valuation>) -> Self {
        let mut torsion: Vec<_> = torsion.into_iter().filter(|v| !v.is_zero()).collect();
        torsion.sort();
        OModuleClass { free_rank, torsion }
    }

    pub fn zero() -> Self {
        OModuleClass::new(0, [])
    }

    pub fn free(rank: usize) -> Self {
        OModuleClass::new(rank, [])
    }

    pub fn cyclic(v: Valuation) -> Self {
        OModuleClass::new(0, [v])
    }

    pub fn torsion(&self) -> &[Valuation] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &OModuleClass) -> OModuleClass {
        OModuleClass::new(
            self.free_rank + other.free_rank,
            self.torsion.iter().chain(&other.torsion).copied(),
        )
    }

    pub fn repeat(&self, times: usize) -> OModuleClass {
        (0..times).fold(OModuleClass::zero(), |acc, _| acc.direct_sum(self))
    }

    /// dim_k (k tensor M) = free rank + number of cyclic torsion summands.
    pub fn residue_dimension(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Pretty form such as `O^2 + O/p^2 + O/(1-zeta_9)`, `0` for the zero module.
    pub fn pretty(&self, p: u64) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("O".to_string()),
            r => parts.push(format!("O^{r}")),
        }
        for v in &self.torsion {
            parts.push(pretty_cyclic(*v, p));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn pretty_cyclic(v: Valuation, p: u64) -> String {
    if v.is_integer() {
        match v.numer() {
            1 => "O/p".into(),
            k => format!("O/p^{k}"),
        }
    } else if let Some(n) = v.as_one_minus_zeta(p) {
        format!("O/(1-zeta_{})", p.pow(n))
    } else {
        format!("O/pi^({v})")
    }
}

impl fmt::Display for OModuleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tors: Vec<String> = self.torsion.iter().map(|v| v.to_string()).collect();
        write!(f, "({}, {{{}}})", self.free_rank, tors.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorOrTor {
    Tensor,
    Tor1,
}

/// Tensor product or Tor_1 over O of two module classes, computed summand-wise.
pub fn tensor_tor(a: &OModuleClass, b: &OModuleClass, which: TensorOrTor) -> OModuleClass {
    let mut torsion = Vec::new();
    let mut free = 0;
    match which {
        TensorOrTor::Tensor => {
            free = a.free_rank * b.free_rank;
            for _ in 0..a.free_rank {
                torsion.extend_from_slice(&b.torsion);
            }
            for _ in 0..b.free_rank {
                torsion.extend_from_slice(&a.torsion);
            }
        }
        TensorOrTor::Tor1 => {}
    }
    // O/aO (x) O/bO = Tor_1(O/aO, O/bO) = O/cO with v(c) = min(v(a), v(b))
    for x in &a.torsion {
        for y in &b.torsion {
            torsion.push(*x.min(y));
        }
    }
    OModuleClass::new(free, torsion)
}

/// The middle term of the split Künneth sequence in degree n:
/// sum over i+j=n of left_i (x) right_j, plus sum over i+j=n+1 of Tor_1(left_i, right_j).
pub fn kunneth_assemble(left: &[OModuleClass], right: &[OModuleClass], n: usize) -> Result<OModuleClass> {
    for side in [left, right] {
        if side.len() < n + 2 {
            return Err(Error::MissingDegree(side.len()));
        }
    }
    let mut acc = OModuleClass::zero();
    for i in 0..=n {
        acc = acc.direct_sum(&tensor_tor(&left[i], &right[n - i], TensorOrTor::Tensor));
    }
    for i in 0..=n + 1 {
        acc = acc.direct_sum(&tensor_tor(&left[i], &right[n + 1 - i], TensorOrTor::Tor1));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(n: u64, d: u64) -> Valuation {
        Valuation::new(n, d)
    }

    #[test]
    fn one_minus_zeta_examples() {
        assert_eq!(val_one_minus_zeta(2, 1).unwrap(), v(1, 1));
        assert_eq!(val_one_minus_zeta(3, 1).unwrap(), v(1, 2));
        assert_eq!(val_one_minus_zeta(2, 2).unwrap(), v(1, 2));
        assert!(val_one_minus_zeta(4, 1).is_err());
        assert!(val_one_minus_zeta(3, 0).is_err());
    }

    #[test]
    fn one_minus_zeta_integral_only_for_2_1() {
        for p in [2u64, 3, 5, 7] {
            let mut prev = None;
            for n in 1..6 {
                let val = val_one_minus_zeta(p, n).unwrap();
                assert_eq!(val.is_integer(), (p, n) == (2, 1));
                // 1 - zeta in pO iff v >= 1
                assert_eq!(val >= Valuation::integer(1), (p, n) == (2, 1));
                if let Some(pr) = prev {
                    assert!(val < pr);
                }
                prev = Some(val);
            }
        }
    }

    #[test]
    fn tensor_tor_examples() {
        let o = OModuleClass::free(1);
        let t_half = OModuleClass::cyclic(v(1, 2));
        assert_eq!(tensor_tor(&o, &t_half, TensorOrTor::Tensor), t_half);
        assert_eq!(
            tensor_tor(&o, &OModuleClass::cyclic(v(3, 1)), TensorOrTor::Tor1),
            OModuleClass::zero()
        );
        assert_eq!(
            tensor_tor(&OModuleClass::cyclic(v(1, 1)), &OModuleClass::cyclic(v(2, 1)), TensorOrTor::Tor1),
            OModuleClass::cyclic(v(1, 1))
        );
    }

    #[test]
    fn kunneth_c3_times_c3() {
        // H^*(C_3, O): O, 0, O/3, 0
        let h = vec![
            OModuleClass::free(1),
            OModuleClass::zero(),
            OModuleClass::cyclic(v(1, 1)),
            OModuleClass::zero(),
        ];
        assert_eq!(
            kunneth_assemble(&h, &h, 2).unwrap(),
            OModuleClass::new(0, [v(1, 1), v(1, 1)])
        );
        let zeros = vec![OModuleClass::zero(); 4];
        assert!(kunneth_assemble(&h, &zeros, 2).unwrap().is_zero());
        assert!(matches!(kunneth_assemble(&h[..2], &h, 2), Err(Error::MissingDegree(_))));
    }

    #[test]
    fn kunneth_c9_twisted_times_c3() {
        // H^*(C_9, O_mu), mu of order 3: 0, O/(1-zeta_3), 0, O/(1-zeta_3)
        let left = vec![
            OModuleClass::zero(),
            OModuleClass::cyclic(v(1, 2)),
            OModuleClass::zero(),
            OModuleClass::cyclic(v(1, 2)),
        ];
        let right = vec![
            OModuleClass::free(1),
            OModuleClass::zero(),
            OModuleClass::cyclic(v(1, 1)),
            OModuleClass::zero(),
        ];
        assert_eq!(kunneth_assemble(&left, &right, 2).unwrap(), OModuleClass::cyclic(v(1, 2)));
    }

    #[test]
    fn pretty_forms() {
        let c = OModuleClass::new(1, [v(2, 1), v(1, 6), v(1, 1)]);
        assert_eq!(c.pretty(3), "O + O/(1-zeta_9) + O/p + O/p^2");
        assert_eq!(OModuleClass::zero().pretty(3), "0");
        assert_eq!(OModuleClass::cyclic(v(1, 2)).pretty(2), "O/(1-zeta_4)");
    }

    fn arb_class() -> impl Strategy<Value = OModuleClass> {
        (
            0usize..3,
            proptest::collection::vec((1u64..7, prop::sample::select(vec![1u64, 2, 4, 6])), 0..3),
        )
            .prop_map(|(r, ts)| OModuleClass::new(r, ts.into_iter().map(|(n, d)| v(n, d))))
    }

    proptest! {
        #[test]
        fn tensor_commutative_associative(a in arb_class(), b in arb_class(), c in arb_class()) {
            use TensorOrTor::*;
            prop_assert_eq!(tensor_tor(&a, &b, Tensor), tensor_tor(&b, &a, Tensor));
            prop_assert_eq!(tensor_tor(&a, &b, Tor1), tensor_tor(&b, &a, Tor1));
            prop_assert_eq!(
                tensor_tor(&tensor_tor(&a, &b, Tensor), &c, Tensor),
                tensor_tor(&a, &tensor_tor(&b, &c, Tensor), Tensor)
            );
            if a.free_rank == 0 && b.free_rank == 0 {
                prop_assert_eq!(tensor_tor(&a, &b, Tor1), tensor_tor(&a, &b, Tensor));
            }
        }
    }
}
