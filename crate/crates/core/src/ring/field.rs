use super::arith::{factorize, inverse_mod, is_prime, mul_mod, pow_mod};
use super::Ring;
use crate::error::{Error, Result};

/// The prime field F_l with a distinguished primitive M-th root of unity.
#[derive(Debug, Clone)]
pub struct PrimeField {
    ell: u64,
    conductor: u64,
    zeta: u64,
}

impl PrimeField {
    /// F_l for a prime l = 1 (mod conductor).
    pub fn new(ell: u64, conductor: u64) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        if !(ell - 1).is_multiple_of(conductor) {
            return Err(Error::ConductorMismatch { needed: conductor, available: ell - 1 });
        }
        let g = primitive_root(ell);
        let zeta = pow_mod(g, (ell - 1) / conductor, ell);
        Ok(PrimeField { ell, conductor, zeta })
    }

    /// The least prime l = 1 (mod conductor) with l > lower_bound.
    pub fn first_above(lower_bound: u64, conductor: u64) -> Result<Self> {
        let mut k = lower_bound / conductor + 1;
        loop {
            let ell = conductor * k + 1;
            if ell > lower_bound && is_prime(ell) {
                return PrimeField::new(ell, conductor);
            }
            k += 1;
        }
    }

    /// A large field (l about 2^30) used for generic rank computations.
    pub fn large(conductor: u64) -> Result<Self> {
        PrimeField::first_above(1 << 30, conductor)
    }

    pub fn modulus(&self) -> u64 {
        self.ell
    }

    pub fn zeta(&self) -> u64 {
        self.zeta
    }

    /// Products of reduced residues fit in a u64 whenever l < 2^32.
    #[inline]
    fn mul_raw(&self, a: u64, b: u64) -> u64 {
        if self.ell <= u32::MAX as u64 {
            a * b % self.ell
        } else {
            mul_mod(a, b, self.ell)
        }
    }

    #[inline]
    pub fn reduce_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.ell as i64) as u64
    }
}

fn primitive_root(ell: u64) -> u64 {
    if ell == 2 {
        return 1;
    }
    let factors = factorize(ell - 1);
    (2..ell)
        .find(|&g| factors.iter().all(|&(q, _)| pow_mod(g, (ell - 1) / q, ell) != 1))
        .expect("prime fields have primitive roots")
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_int(&self, n: i64) -> u64 {
        self.reduce_i64(n)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.ell {
            s - self.ell
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.ell - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.ell - a
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mul_raw(*a, *b)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    #[inline]
    fn sub_mul_assign(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = self.sub(acc, &self.mul_raw(*a, *b));
    }
    fn conductor(&self) -> u64 {
        self.conductor
    }
    fn root_power(&self, k: u64) -> u64 {
        pow_mod(self.zeta, k % self.conductor, self.ell)
    }
    fn valuation(&self, a: &u64) -> u32 {
        u32::from(*a == 0)
    }
    fn ceiling(&self) -> u32 {
        1
    }
    fn ramification(&self) -> u32 {
        1
    }
    fn inverse_unit(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        inverse_mod(*a as i128, self.ell as i128).map(|x| x as u64)
    }
    fn divide(&self, a: &u64, b: &u64) -> Option<u64> {
        if *b == 0 {
            return if *a == 0 { Some(0) } else { None };
        }
        Some(self.mul(a, &self.inverse_unit(b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_have_exact_order() {
        let f = PrimeField::first_above(100, 12).unwrap();
        assert_eq!((f.modulus() - 1) % 12, 0);
        assert_eq!(f.root_power(12), 1);
        for d in [2, 3, 4, 6] {
            assert_ne!(f.pow(&f.zeta(), 12 / d), 1);
        }
        let big = PrimeField::large(36).unwrap();
        assert!(big.modulus() > 1 << 30);
        assert_eq!(big.mul(&big.inverse_unit(&7).unwrap(), &7), 1);
    }
}
