//! The finite chain ring standing in for O at finite precision.
//!
//! R = W[pi] / (E(pi), pi^L) where W = (Z/p^N)[x]/(phibar(x)) is the Galois
//! ring of degree f and E(pi) = Phi_{p^a}(1 + pi) is Eisenstein of degree
//! e = (p-1)p^{a-1}. Elements are stored in the pi-power basis, so the
//! valuation is read off coefficient-wise: v(sum w_j pi^j) = min(e v_p(w_j) + j).

use smallvec::SmallVec;

use super::arith::{cyclotomic_polynomial, inverse_mod, is_prime, multiplicative_order, p_adic_valuation, split_p_part};
use super::Ring;
use crate::error::{Error, Result};

pub type ChainElem = SmallVec<[u64; 8]>;

/// Parameters sufficient to rebuild a chain ring at another precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainRingParams {
    pub p: u64,
    pub conductor: u64,
    /// p-adic precision N: the ring is O/p^N.
    pub precision: u32,
}

#[derive(Debug, Clone)]
pub struct ChainRing {
    p: u64,
    f: usize,
    e: usize,
    a: u32,
    conductor: u64,
    /// p-adic precision of the representatives
    n: u32,
    q: u64,
    level: u32,
    /// modulus p^{N_j} of the pi^j coefficient after truncation at pi^level
    coeff_mod: Vec<u64>,
    /// low coefficients of the monic phibar
    phibar: Vec<u64>,
    /// low coefficients c_0..c_{e-1} of E(pi)
    eis: Vec<u64>,
    /// inverse of c_0 / p
    eis_unit_inv: u64,
    zeta: ChainElem,
}

impl ChainRing {
    /// O/p^N carrying a primitive `conductor`-th root of unity.
    pub fn new(p: u64, conductor: u64, precision: u32) -> Result<Self> {
        let (a, _) = split_p_part(conductor, p);
        let e = ramification_for(p, a);
        ChainRing::build(p, conductor, precision, precision * e as u32)
    }

    pub fn from_params(params: ChainRingParams) -> Result<Self> {
        ChainRing::new(params.p, params.conductor, params.precision)
    }

    /// The residue field O/pi.
    pub fn residue_field(p: u64, conductor: u64) -> Result<Self> {
        ChainRing::build(p, conductor, 1, 1)
    }

    /// O/pi^level.
    pub fn with_level(p: u64, conductor: u64, level: u32) -> Result<Self> {
        let (a, _) = split_p_part(conductor, p);
        let e = ramification_for(p, a) as u32;
        ChainRing::build(p, conductor, level.div_ceil(e), level)
    }

    fn build(p: u64, conductor: u64, n: u32, level: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 || level == 0 {
            return Err(Error::InvalidInput("chain ring precision must be >= 1".into()));
        }
        let q = p
            .checked_pow(n)
            .filter(|&q| q < (1u64 << 31))
            .ok_or_else(|| Error::InvalidInput(format!("p^N = {p}^{n} too large for the chain ring")))?;
        let (a, mprime) = split_p_part(conductor, p);
        let e = ramification_for(p, a);
        let f = multiplicative_order(p % mprime.max(1), mprime.max(1)) as usize;
        let phibar = smallest_factor(p, mprime, f);

        let coeff_mod = (0..e)
            .map(|j| {
                let nj = (level as i64 - j as i64).max(0) as u64;
                let nj = nj.div_ceil(e as u64) as u32;
                p.pow(nj.min(n))
            })
            .collect();

        let (eis, eis_unit) = if a == 0 {
            // E(pi) = pi - p
            (vec![(q - p) % q], q - 1)
        } else {
            let eis_full = eisenstein_coefficients(p, a, q);
            (eis_full, 1)
        };
        let eis_unit_inv = inverse_mod(eis_unit as i128, q as i128).unwrap() as u64;

        let mut ring = ChainRing {
            p,
            f,
            e,
            a,
            conductor,
            n,
            q,
            level,
            coeff_mod,
            phibar,
            eis,
            eis_unit_inv,
            zeta: SmallVec::new(),
        };
        ring.zeta = ring.primitive_root();
        Ok(ring)
    }

    fn primitive_root(&self) -> ChainElem {
        // y = 1 + pi has order p^a; the Teichmüller lift of x has order m'
        let y = if self.a == 0 {
            self.one()
        } else {
            let mut pi = self.zero();
            if self.e > 1 {
                pi[self.f] = 1;
            } else {
                pi[0] = self.p % self.q;
            }
            self.add(&self.one(), &pi)
        };
        let mut x = self.zero();
        if self.f >= 2 {
            x[1] = 1;
        } else {
            x[0] = (self.q - self.phibar[0]) % self.q;
        }
        let x = self.truncate(x);
        let residue_size = self.p.pow(self.f as u32);
        let mut omega = x;
        for _ in 0..self.n {
            omega = self.pow(&omega, residue_size);
        }
        self.mul(&y, &omega)
    }

    pub fn params(&self) -> ChainRingParams {
        ChainRingParams { p: self.p, conductor: self.conductor, precision: self.n }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn unramified_degree(&self) -> usize {
        self.f
    }

    pub fn p_level(&self) -> u32 {
        self.a
    }

    /// The uniformizer: y - 1 for the p-power root y, or p when unramified.
    pub fn pi(&self) -> ChainElem {
        let mut out = self.zero();
        if self.e > 1 {
            out[self.f] = 1;
            out
        } else {
            out[0] = self.p % self.q;
            self.truncate(out)
        }
    }

    #[inline]
    fn idx(&self, j: usize, i: usize) -> usize {
        j * self.f + i
    }

    fn truncate(&self, mut x: ChainElem) -> ChainElem {
        for j in 0..self.e {
            let m = self.coeff_mod[j];
            for i in 0..self.f {
                let k = self.idx(j, i);
                x[k] %= m;
            }
        }
        x
    }

    /// Multiplication of two W-polynomials (length f), reduced mod phibar.
    fn reduce_x(&self, poly: &mut [u64]) -> SmallVec<[u64; 8]> {
        let q = self.q;
        let f = self.f;
        for d in (f..poly.len()).rev() {
            let c = poly[d] % q;
            if c == 0 {
                continue;
            }
            poly[d] = 0;
            for (i, &pc) in self.phibar.iter().enumerate() {
                let idx = d - f + i;
                poly[idx] = (poly[idx] + q - (c * pc) % q) % q;
            }
        }
        poly[..f].iter().map(|&c| c % q).collect()
    }

    /// x / pi for x with v(x) >= 1.
    fn div_pi(&self, x: &ChainElem) -> ChainElem {
        let q = self.q;
        let (e, f) = (self.e, self.f);
        let mut out = self.zero();
        // shift: sum_{j>=1} w_j pi^{j-1}
        for j in 1..e {
            for i in 0..f {
                out[self.idx(j - 1, i)] = x[self.idx(j, i)];
            }
        }
        // w_0 = p w0', contributes -s^{-1} w0' Q(pi), Q = pi^{e-1} + sum_{j>=1} c_j pi^{j-1}
        let w0p: Vec<u64> = (0..f).map(|i| x[self.idx(0, i)] / self.p).collect();
        for k in 0..e {
            let qk = if k == e - 1 { 1 } else { self.eis[k + 1] };
            if qk == 0 {
                continue;
            }
            let scale = (qk * self.eis_unit_inv) % q;
            for i in 0..f {
                let t = (w0p[i] * scale) % q;
                let slot = &mut out[self.idx(k, i)];
                *slot = (*slot + q - t) % q;
            }
        }
        self.truncate(out)
    }
}

fn ramification_for(p: u64, a: u32) -> usize {
    if a == 0 {
        1
    } else {
        ((p - 1) * p.pow(a - 1)) as usize
    }
}

/// Low coefficients of Phi_{p^a}(1 + pi) modulo q.
fn eisenstein_coefficients(p: u64, a: u32, q: u64) -> Vec<u64> {
    let step = p.pow(a - 1) as usize;
    let e = (p as usize - 1) * step;
    // binomial rows mod q up to e
    let mut total = vec![0u64; e + 1];
    let mut row = vec![1u64];
    for k in 0..=e {
        if k % step == 0 {
            for (i, &b) in row.iter().enumerate() {
                total[i] = (total[i] + b) % q;
            }
        }
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = (row[i - 1] + row[i]) % q;
        }
        row = next;
    }
    debug_assert_eq!(total[e], 1);
    total.truncate(e);
    total
}

/// Smallest (in base-p digit order of the low coefficients) monic degree-f
/// polynomial over F_p dividing Phi_{m'} mod p.
fn smallest_factor(p: u64, mprime: u64, f: usize) -> Vec<u64> {
    if mprime <= 1 {
        return vec![p - 1]; // x - 1
    }
    let phi: Vec<u64> = cyclotomic_polynomial(mprime)
        .into_iter()
        .map(|c| c.rem_euclid(p as i64) as u64)
        .collect();
    let count = p.pow(f as u32);
    for code in 0..count {
        let mut cand = Vec::with_capacity(f + 1);
        let mut c = code;
        for _ in 0..f {
            cand.push(c % p);
            c /= p;
        }
        cand.push(1);
        if divides_mod_p(&cand, &phi, p) {
            cand.pop();
            return cand;
        }
    }
    unreachable!("Phi_m' has degree-f factors mod p")
}

fn divides_mod_p(den: &[u64], num: &[u64], p: u64) -> bool {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return rem.iter().all(|&c| c == 0);
    }
    for k in (0..rem.len() - dd).rev() {
        let c = rem[k + dd] % p;
        if c == 0 {
            continue;
        }
        for (j, &dj) in den.iter().enumerate() {
            rem[k + j] = (rem[k + j] + p * p - (c * dj) % p) % p;
        }
    }
    rem.iter().all(|&c| c % p == 0)
}

impl Ring for ChainRing {
    type Elem = ChainElem;

    fn zero(&self) -> ChainElem {
        SmallVec::from_elem(0, self.e * self.f)
    }

    fn one(&self) -> ChainElem {
        self.from_int(1)
    }

    fn from_int(&self, n: i64) -> ChainElem {
        let mut out = self.zero();
        out[0] = n.rem_euclid(self.q as i64) as u64;
        self.truncate(out)
    }

    fn add(&self, a: &ChainElem, b: &ChainElem) -> ChainElem {
        let mut out = a.clone();
        self.add_assign(&mut out, b);
        out
    }

    fn add_assign(&self, acc: &mut ChainElem, b: &ChainElem) {
        for j in 0..self.e {
            let m = self.coeff_mod[j];
            for i in 0..self.f {
                let k = j * self.f + i;
                acc[k] = (acc[k] + b[k]) % m;
            }
        }
    }

    fn sub(&self, a: &ChainElem, b: &ChainElem) -> ChainElem {
        let mut out = a.clone();
        for j in 0..self.e {
            let m = self.coeff_mod[j];
            for i in 0..self.f {
                let k = j * self.f + i;
                out[k] = (out[k] + m - b[k] % m) % m;
            }
        }
        out
    }

    fn neg(&self, a: &ChainElem) -> ChainElem {
        self.sub(&self.zero(), a)
    }

    fn mul(&self, a: &ChainElem, b: &ChainElem) -> ChainElem {
        let (e, f, q) = (self.e, self.f, self.q);
        // 2D convolution in (pi, x)
        let wx = 2 * f - 1;
        let mut conv: SmallVec<[u64; 64]> = SmallVec::from_elem(0, (2 * e - 1) * wx);
        for j1 in 0..e {
            for i1 in 0..f {
                let av = a[j1 * f + i1];
                if av == 0 {
                    continue;
                }
                for j2 in 0..e {
                    let row = (j1 + j2) * wx + i1;
                    for i2 in 0..f {
                        let bv = b[j2 * f + i2];
                        if bv != 0 {
                            let slot = &mut conv[row + i2];
                            *slot = (*slot + av * bv) % q;
                        }
                    }
                }
            }
        }
        // reduce x-degree
        let mut w: Vec<SmallVec<[u64; 8]>> = (0..2 * e - 1)
            .map(|j| self.reduce_x(&mut conv[j * wx..(j + 1) * wx]))
            .collect();
        // reduce pi-degree: pi^e = -sum c_j pi^j
        for k in (e..2 * e - 1).rev() {
            let top = std::mem::take(&mut w[k]);
            if top.iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..e {
                let c = self.eis[j];
                if c == 0 {
                    continue;
                }
                let target = &mut w[k - e + j];
                for i in 0..f {
                    target[i] = (target[i] + q - (c * top[i]) % q) % q;
                }
            }
        }
        let mut out = self.zero();
        for j in 0..e {
            let m = self.coeff_mod[j];
            for i in 0..f {
                out[j * f + i] = w[j][i] % m;
            }
        }
        out
    }

    fn is_zero(&self, a: &ChainElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn conductor(&self) -> u64 {
        self.conductor
    }

    fn root_power(&self, k: u64) -> ChainElem {
        self.pow(&self.zeta, k % self.conductor)
    }

    fn valuation(&self, a: &ChainElem) -> u32 {
        let mut best = self.level;
        for j in 0..self.e {
            for i in 0..self.f {
                let c = a[j * self.f + i];
                if c != 0 {
                    let v = self.e as u32 * p_adic_valuation(c, self.p) + j as u32;
                    best = best.min(v);
                }
            }
        }
        best
    }

    fn ceiling(&self) -> u32 {
        self.level
    }

    fn ramification(&self) -> u32 {
        self.e as u32
    }

    fn inverse_unit(&self, a: &ChainElem) -> Option<ChainElem> {
        if self.valuation(a) != 0 {
            return None;
        }
        let residue_size = self.p.pow(self.f as u32);
        let mut z = self.pow(a, residue_size - 2);
        let two = self.from_int(2);
        for _ in 0..64 {
            let az = self.mul(a, &z);
            if az == self.one() {
                return Some(z);
            }
            z = self.mul(&z, &self.sub(&two, &az));
        }
        None
    }

    fn divide(&self, a: &ChainElem, b: &ChainElem) -> Option<ChainElem> {
        let vb = self.valuation(b);
        if vb == self.level {
            return if self.is_zero(a) { Some(self.zero()) } else { None };
        }
        if self.valuation(a) < vb {
            return None;
        }
        let (mut a2, mut b2) = (a.clone(), b.clone());
        for _ in 0..vb {
            a2 = self.div_pi(&a2);
            b2 = self.div_pi(&b2);
        }
        Some(self.mul(&a2, &self.inverse_unit(&b2)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eisenstein_phi9() {
        // Phi_9(1+pi) = pi^6 + 6pi^5 + 15pi^4 + 21pi^3 + 18pi^2 + 9pi + 3
        let c = eisenstein_coefficients(3, 2, 3u64.pow(6));
        assert_eq!(c, vec![3, 9, 18, 21, 15, 6]);
    }

    #[test]
    fn valuations_and_roots() {
        let r = ChainRing::new(3, 36, 4).unwrap();
        assert_eq!(r.ramification(), 6);
        assert_eq!(r.unramified_degree(), 2);
        assert_eq!(r.ceiling(), 24);
        assert_eq!(r.valuation(&r.from_int(3)), 6);
        assert_eq!(r.valuation(&r.from_int(9)), 12);
        assert_eq!(r.valuation(&r.pi()), 1);
        assert_eq!(r.valuation(&r.from_int(81)), 24);
        let z = r.root_power(1);
        assert_eq!(r.pow(&z, 36), r.one());
        for d in [2u64, 3] {
            assert_ne!(r.pow(&z, 36 / d), r.one());
        }
        // v(1 - zeta_9) = 1/6 in p-units = 1 pi-level
        let z9 = r.root_of_order(9, 1).unwrap();
        assert_eq!(r.valuation(&r.sub(&r.one(), &z9)), 1);
        let z3 = r.root_of_order(3, 1).unwrap();
        assert_eq!(r.valuation(&r.sub(&r.one(), &z3)), 3);
        // i exists with i^2 = -1
        let i = r.root_of_order(4, 1).unwrap();
        assert_eq!(r.mul(&i, &i), r.from_int(-1));
    }

    #[test]
    fn division_is_exact() {
        let r = ChainRing::new(2, 12, 5).unwrap();
        let pi = r.pi();
        let u = r.add(&r.one(), &r.root_power(1));
        for k in 0..4u64 {
            let b = r.mul(&r.root_power(k + 1), &r.pow(&pi, k));
            let a = r.mul(&r.mul(&b, &u), &r.from_int(6));
            let q = r.divide(&a, &b).unwrap();
            assert_eq!(r.mul(&q, &b), a);
        }
        assert!(r.divide(&r.one(), &pi).is_none());
        let inv = r.inverse_unit(&r.from_int(3)).unwrap();
        assert_eq!(r.mul(&inv, &r.from_int(3)), r.one());
    }

    #[test]
    fn residue_field_is_a_field() {
        let k = ChainRing::residue_field(3, 12).unwrap();
        assert_eq!(k.ceiling(), 1);
        let i = k.root_of_order(4, 1).unwrap();
        assert_eq!(k.mul(&i, &i), k.from_int(-1));
        assert!(k.is_zero(&k.sub(&k.one(), &k.root_of_order(3, 1).unwrap())));
        let x = k.add(&k.one(), &i);
        let inv = k.inverse_unit(&x).unwrap();
        assert_eq!(k.mul(&x, &inv), k.one());
    }

    #[test]
    fn unramified_ring() {
        let r = ChainRing::new(3, 4, 3).unwrap();
        assert_eq!(r.ramification(), 1);
        assert_eq!(r.valuation(&r.from_int(18)), 2);
        assert_eq!(r.divide(&r.from_int(18), &r.from_int(9)).unwrap(), r.from_int(2));
    }
}
