//! Smith normal form over chain rings and rank computations over fields.

use super::{Matrix, PrimeField, Ring};

/// Diagonal of a Smith normal form: the pi-adic valuations of the nonzero
/// invariant factors, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub exponents: Vec<u32>,
    pub rows: usize,
    pub cols: usize,
}

impl Snf {
    /// Number of invariant factors that are units or nonzero non-units.
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }
}

/// Invariant factors of `m` over a chain ring.
///
/// Every step picks an entry of least valuation; in a chain ring it divides
/// every other entry, so clearing its column by row operations and then
/// deleting its row and column leaves an equivalent smaller problem.
pub fn snf<R: Ring>(ring: &R, m: &Matrix<R::Elem>) -> Snf {
    let ceiling = ring.ceiling();
    let mut rows: Vec<Vec<R::Elem>> = (0..m.rows())
        .map(|i| m.row(i).to_vec())
        .filter(|r| r.iter().any(|x| !ring.is_zero(x)))
        .collect();
    let mut live_cols: Vec<usize> = (0..m.cols()).collect();
    let mut exponents = Vec::new();

    loop {
        // locate a pivot of least valuation
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for (i, row) in rows.iter().enumerate() {
            for (slot, &c) in live_cols.iter().enumerate() {
                let x = &row[c];
                if ring.is_zero(x) {
                    continue;
                }
                let v = ring.valuation(x);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, slot));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((v, pr, slot)) = best else { break };
        if v >= ceiling {
            break;
        }
        exponents.push(v);
        let pc = live_cols.swap_remove(slot);
        let pivot_row = rows.swap_remove(pr);
        let pivot = pivot_row[pc].clone();
        for row in rows.iter_mut() {
            if ring.is_zero(&row[pc]) {
                continue;
            }
            let factor = ring.divide(&row[pc], &pivot).expect("least valuation pivot divides");
            for &c in &live_cols {
                if !ring.is_zero(&pivot_row[c]) {
                    ring.sub_mul_assign(&mut row[c], &factor, &pivot_row[c]);
                }
            }
            row[pc] = ring.zero();
        }
        rows.retain(|r| live_cols.iter().any(|&c| !ring.is_zero(&r[c])));
    }
    exponents.sort_unstable();
    Snf { exponents, rows: m.rows(), cols: m.cols() }
}

pub fn snf_exponents<R: Ring>(ring: &R, m: &Matrix<R::Elem>) -> Vec<u32> {
    snf(ring, m).exponents
}

/// A basis of a free direct summand spanned by some matrix columns, together
/// with a coordinate map.
#[derive(Debug, Clone)]
pub struct ImageBasis<E> {
    /// n x r matrix whose columns form the basis
    pub basis: Matrix<E>,
    /// rows I with basis restricted to I invertible
    pub rows: Vec<usize>,
    /// inverse of the r x r block on `rows`
    pub inverse: Matrix<E>,
}

impl<E: Clone + PartialEq> ImageBasis<E> {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Coordinates of a vector known to lie in the span.
    pub fn coordinates<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        let restricted: Vec<E> = self.rows.iter().map(|&i| v[i].clone()).collect();
        self.inverse.mul_vec(ring, &restricted)
    }
}

/// Picks columns of `m` that stay independent modulo pi. When `m` is an
/// idempotent its image is free and these columns are a basis of it.
pub fn image_basis<R: Ring>(ring: &R, m: &Matrix<R::Elem>) -> ImageBasis<R::Elem> {
    let n = m.rows();
    let mut chosen = Vec::new();
    let mut pivots: Vec<(usize, Vec<R::Elem>)> = Vec::new();
    for c in 0..m.cols() {
        let mut v: Vec<R::Elem> = (0..n).map(|i| m[(i, c)].clone()).collect();
        for (pr, u) in &pivots {
            if ring.is_zero(&v[*pr]) {
                continue;
            }
            let factor = ring.divide(&v[*pr], &u[*pr]).expect("unit pivot");
            for i in 0..n {
                if !ring.is_zero(&u[i]) {
                    ring.sub_mul_assign(&mut v[i], &factor, &u[i]);
                }
            }
        }
        if let Some(pr) = (0..n).find(|&i| ring.is_unit(&v[i])) {
            chosen.push(c);
            pivots.push((pr, v));
        }
    }
    let basis = m.select_cols(&chosen);
    let rows: Vec<usize> = pivots.iter().map(|(pr, _)| *pr).collect();
    let block = basis.select_rows(&rows);
    let inverse = block.inverse(ring).expect("pivot block is invertible");
    ImageBasis { basis, rows, inverse }
}

/// Incremental row-echelon rank over a prime field.
///
/// Rows are reduced with Barrett reduction on 32-bit residues, so this needs
/// l < 2^31; larger moduli fall back to the field's own arithmetic.
#[derive(Debug, Clone)]
pub struct FieldRank {
    field: PrimeField,
    cols: usize,
    /// floor(2^64 / l), or 0 when l is too large for the fast path
    barrett: u64,
    pivots: Vec<(usize, Vec<u32>)>,
    wide: Vec<(usize, Vec<u64>)>,
}

impl FieldRank {
    pub fn new(field: PrimeField, cols: usize) -> Self {
        let ell = field.modulus();
        let barrett = if ell < 1 << 31 { u64::MAX / ell } else { 0 };
        FieldRank { field, cols, barrett, pivots: Vec::new(), wide: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len() + self.wide.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.cols
    }

    /// t mod l for t < 2^62.
    #[inline(always)]
    fn reduce(&self, t: u64) -> u64 {
        let ell = self.field.modulus();
        let q = ((t as u128 * self.barrett as u128) >> 64) as u64;
        let r = t - q * ell;
        if r >= ell {
            r - ell
        } else {
            r
        }
    }

    /// Adds a row; returns whether it raised the rank.
    pub fn push(&mut self, row: Vec<u64>) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        if self.barrett == 0 {
            return self.push_wide(row);
        }
        let ell = self.field.modulus();
        let mut row: Vec<u32> = row.into_iter().map(|x| x as u32).collect();
        for (pc, prow) in &self.pivots {
            let c = row[*pc];
            if c == 0 {
                continue;
            }
            let neg = ell - u64::from(c);
            for (x, &y) in row[*pc..].iter_mut().zip(&prow[*pc..]) {
                *x = self.reduce(u64::from(*x) + neg * u64::from(y)) as u32;
            }
        }
        let Some(pc) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inverse_unit(&u64::from(row[pc])).unwrap();
        for x in row[pc..].iter_mut() {
            *x = self.reduce(u64::from(*x) * inv) as u32;
        }
        self.pivots.push((pc, row));
        true
    }

    fn push_wide(&mut self, mut row: Vec<u64>) -> bool {
        let f = &self.field;
        for (pc, prow) in &self.wide {
            let c = row[*pc];
            if c == 0 {
                continue;
            }
            for (x, y) in row.iter_mut().zip(prow).skip(*pc) {
                if *y != 0 {
                    f.sub_mul_assign(x, &c, y);
                }
            }
        }
        let Some(pc) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inverse_unit(&row[pc]).unwrap();
        for x in row.iter_mut().skip(pc) {
            *x = f.mul(x, &inv);
        }
        self.wide.push((pc, row));
        true
    }
}

/// Rank of a matrix over a prime field.
pub fn field_rank(field: &PrimeField, m: &Matrix<u64>) -> usize {
    let mut fr = FieldRank::new(field.clone(), m.cols());
    for i in 0..m.rows() {
        fr.push(m.row(i).to_vec());
        if fr.is_full() {
            break;
        }
    }
    fr.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ChainRing;
    use proptest::prelude::*;

    #[test]
    fn snf_over_z_mod_27() {
        let r = ChainRing::new(3, 1, 3).unwrap();
        let m = Matrix::from_rows(
            vec![
                vec![r.from_int(3), r.from_int(6), r.from_int(0)],
                vec![r.from_int(9), r.from_int(0), r.from_int(9)],
                vec![r.from_int(0), r.from_int(0), r.from_int(0)],
            ],
            3,
        );
        // det of the top-left 2x2 block is -54, gcd of entries 3
        assert_eq!(snf_exponents(&r, &m), vec![1, 2]);
        let ident = Matrix::identity(&r, 3);
        assert_eq!(snf(&r, &ident).rank(), 3);
    }

    #[test]
    fn snf_ramified() {
        // over Z_3[zeta_3]/3^2: diag(1 - zeta, 3) has exponents 1, 2
        let r = ChainRing::new(3, 3, 2).unwrap();
        let a = r.sub(&r.one(), &r.root_power(1));
        let m = Matrix::from_rows(
            vec![vec![a.clone(), r.from_int(3)], vec![r.mul(&a, &r.root_power(2)), r.zero()]],
            2,
        );
        assert_eq!(snf_exponents(&r, &m), vec![1, 2]);
    }

    #[test]
    fn image_of_idempotent() {
        let f = PrimeField::new(13, 12).unwrap();
        // projection onto span of (1,1) along (1,-1), with 1/2 = 7 mod 13
        let e = Matrix::from_rows(vec![vec![7, 7], vec![7, 7]], 2);
        let ib = image_basis(&f, &e);
        assert_eq!(ib.dim(), 1);
        assert_eq!(ib.coordinates(&f, &[3, 3]), vec![f.mul(&3, &f.inverse_unit(&7).unwrap())]);
    }

    #[test]
    fn streaming_rank() {
        let f = PrimeField::new(13, 12).unwrap();
        let m = Matrix::from_rows(vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]], 3);
        assert_eq!(field_rank(&f, &m), 2);
    }

    proptest! {
        #[test]
        fn barrett_rank_matches_wide_rank(entries in prop::collection::vec(0u64..5, 36)) {
            // the same matrix over l = 2^30 + 3 (fast path) and a prime above 2^31
            let small = PrimeField::new(1_073_741_827, 2).unwrap();
            let big = PrimeField::new(2_147_483_659, 2).unwrap();
            let m = Matrix::from_rows(entries.chunks(6).map(|r| r.to_vec()).collect(), 6);
            prop_assert_eq!(field_rank(&small, &m), field_rank(&big, &m));
        }
    }
}
