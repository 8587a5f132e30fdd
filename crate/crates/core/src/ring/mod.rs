//! Exact arithmetic: cyclotomic numbers, valuations and O-module classes,
//! the truncated chain ring O/pi^L, prime fields, and linear algebra and
//! homology over them.

pub mod arith;
mod chain;
mod complex;
mod cyclo;
mod field;
mod matrix;
mod snf;
mod valuation;

use std::fmt::Debug;

pub use chain::{ChainRing, ChainRingParams};
pub use complex::{classify_exponents, homology_class, ChainComplex, PrecisionPolicy};
pub use cyclo::{verify_cyclotomic_identity, CycloNumber};
pub use field::PrimeField;
pub use matrix::Matrix;
pub use snf::{field_rank, image_basis, snf, snf_exponents, FieldRank, ImageBasis, Snf};
pub use valuation::{
    kunneth_assemble, tensor_tor, val_one_minus_zeta, OModuleClass, TensorOrTor, Valuation,
};

/// A commutative local principal ring with a fixed uniformizer pi and a
/// primitive root of unity of order `conductor()`.
///
/// Elements are plain values; every operation goes through the ring object,
/// which owns the runtime parameters (modulus, defining polynomials).
pub trait Ring: Sync + Send {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// `acc -= a * b`
    fn sub_mul_assign(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem) {
        *acc = self.sub(acc, &self.mul(a, b));
    }

    fn add_assign(&self, acc: &mut Self::Elem, a: &Self::Elem) {
        *acc = self.add(acc, a);
    }

    /// Order M of the distinguished primitive root of unity.
    fn conductor(&self) -> u64;

    /// zeta_M^k.
    fn root_power(&self, k: u64) -> Self::Elem;

    /// pi-adic valuation; zero has valuation `ceiling()`.
    fn valuation(&self, a: &Self::Elem) -> u32;

    /// Length of the ring: pi^ceiling = 0.
    fn ceiling(&self) -> u32;

    /// Ramification index: v(p) = `ramification()` in pi-units.
    fn ramification(&self) -> u32;

    fn inverse_unit(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// Some q with q * b = a, when v(a) >= v(b).
    fn divide(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.valuation(a) == 0
    }

    fn from_rational(&self, num: i64, den: i64) -> Option<Self::Elem> {
        let inv = self.inverse_unit(&self.from_int(den))?;
        Some(self.mul(&self.from_int(num), &inv))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// zeta_m^k for m dividing the conductor.
    fn root_of_order(&self, m: u64, k: u64) -> Option<Self::Elem> {
        let big = self.conductor();
        if m == 0 || !big.is_multiple_of(m) {
            return None;
        }
        Some(self.root_power((big / m) * (k % m)))
    }
}
