use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::Mutex;

use super::arith::{cyclotomic_polynomial, euler_phi, is_prime, lcm};
use super::Ring;
use crate::error::{Error, Result};

fn cyclotomic_cached(m: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().get(&m) {
        return hit.clone();
    }
    let poly = Arc::new(cyclotomic_polynomial(m));
    cache.lock().insert(m, poly.clone());
    poly
}

/// An exact element of Q(zeta_m), stored in the power basis modulo Phi_m.
#[derive(Clone)]
pub struct CycloNumber {
    conductor: u64,
    coeffs: Vec<BigRational>,
}

impl CycloNumber {
    pub fn zero(conductor: u64) -> Self {
        CycloNumber { conductor, coeffs: vec![BigRational::zero(); euler_phi(conductor) as usize] }
    }

    pub fn from_rational(conductor: u64, value: BigRational) -> Self {
        let mut out = CycloNumber::zero(conductor);
        out.coeffs[0] = value;
        out
    }

    pub fn from_int(conductor: u64, value: i64) -> Self {
        CycloNumber::from_rational(conductor, BigRational::from_integer(value.into()))
    }

    pub fn one(conductor: u64) -> Self {
        CycloNumber::from_int(conductor, 1)
    }

    /// zeta_m^k.
    pub fn root(conductor: u64, k: i64) -> Self {
        let mut full = vec![BigRational::zero(); conductor as usize];
        full[k.rem_euclid(conductor as i64) as usize] = BigRational::one();
        CycloNumber::reduce(conductor, full)
    }

    /// Sum of multiplicity[t] * zeta_m^t.
    pub fn from_root_multiplicities(conductor: u64, mult: &[i64]) -> Self {
        let mut full = vec![BigRational::zero(); conductor as usize];
        for (t, &m) in mult.iter().enumerate() {
            let slot = &mut full[t % conductor as usize];
            *slot += BigRational::from_integer(m.into());
        }
        CycloNumber::reduce(conductor, full)
    }

    /// Reduces an arbitrary polynomial in zeta_m modulo Phi_m.
    fn reduce(conductor: u64, mut poly: Vec<BigRational>) -> Self {
        let phi = cyclotomic_cached(conductor);
        let d = phi.len() - 1;
        for k in (d..poly.len()).rev() {
            if poly[k].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut poly[k]);
            for (j, &pj) in phi.iter().enumerate().take(d) {
                if pj != 0 {
                    poly[k - d + j] -= &c * BigRational::from_integer(pj.into());
                }
            }
        }
        poly.resize(d, BigRational::zero());
        CycloNumber { conductor, coeffs: poly }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The same number viewed in Q(zeta_n) for a multiple n of the conductor.
    pub fn embed(&self, conductor: u64) -> Result<Self> {
        if !conductor.is_multiple_of(self.conductor) {
            return Err(Error::ConductorMismatch { needed: self.conductor, available: conductor });
        }
        if conductor == self.conductor {
            return Ok(self.clone());
        }
        let step = (conductor / self.conductor) as usize;
        let mut full = vec![BigRational::zero(); conductor as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            full[k * step] = c.clone();
        }
        Ok(CycloNumber::reduce(conductor, full))
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = lcm(self.conductor, other.conductor);
        (self.embed(m).unwrap(), other.embed(m).unwrap())
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.common(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CycloNumber { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let n = a.coeffs.len();
        let mut full = vec![BigRational::zero(); (2 * n).saturating_sub(1).max(1)];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    full[i + j] += x * y;
                }
            }
        }
        CycloNumber::reduce(a.conductor, full)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycloNumber { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// The Galois automorphism zeta -> zeta^k, k coprime to the conductor.
    pub fn galois(&self, k: i64) -> Self {
        let m = self.conductor as i64;
        let mut full = vec![BigRational::zero(); self.conductor as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            full[(j as i64 * k).rem_euclid(m) as usize] += c;
        }
        CycloNumber::reduce(self.conductor, full)
    }

    /// Complex conjugation, zeta -> zeta^{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        let r = self.as_rational()?;
        if r.is_integer() {
            r.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Image under zeta_m -> the ring's zeta_m; None if the conductor does
    /// not divide the ring's or a denominator is not invertible.
    pub fn to_ring<R: Ring>(&self, ring: &R) -> Option<R::Elem> {
        let z = ring.root_of_order(self.conductor, 1)?;
        let mut acc = ring.zero();
        let mut power = ring.one();
        for c in &self.coeffs {
            if !c.is_zero() {
                let num = reduce_big(c.numer(), ring)?;
                let den = reduce_big(c.denom(), ring)?;
                let term = ring.mul(&num, &ring.inverse_unit(&den)?);
                ring.add_assign(&mut acc, &ring.mul(&term, &power));
            }
            power = ring.mul(&power, &z);
        }
        Some(acc)
    }

    /// Canonical sort key in a fixed conductor.
    pub fn sort_key(&self, conductor: u64) -> Vec<BigRational> {
        self.embed(conductor).map(|x| x.coeffs).unwrap_or_default()
    }
}

fn reduce_big<R: Ring>(n: &BigInt, ring: &R) -> Option<R::Elem> {
    if let Some(v) = n.to_i64() {
        return Some(ring.from_int(v));
    }
    let base = ring.from_int(1 << 32);
    let mut acc = ring.zero();
    let (sign, digits) = n.to_u32_digits();
    for d in digits.iter().rev() {
        acc = ring.mul(&acc, &base);
        acc = ring.add(&acc, &ring.from_int(*d as i64));
    }
    if sign == num_bigint::Sign::Minus {
        acc = ring.neg(&acc);
    }
    Some(acc)
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNumber {}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            match k {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    write!(f, "z{}", self.conductor)?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Checks prod_{1 <= i < p^n, p does not divide i} (1 - zeta_{p^n}^i) = p exactly.
pub fn verify_cyclotomic_identity(p: u64, n: u32) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let m = p
        .checked_pow(n)
        .filter(|&m| m <= 1 << 12)
        .ok_or_else(|| Error::InvalidInput(format!("{p}^{n} is too large")))?;
    let one = CycloNumber::one(m);
    let mut prod = one.clone();
    for i in (1..m).filter(|i| i % p != 0) {
        prod = prod.mul(&one.sub(&CycloNumber::root(m, i as i64)));
    }
    Ok(prod == CycloNumber::from_int(m, p as i64))
}
