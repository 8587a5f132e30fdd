//! Character tables by the Dixon-Schneider method: common eigenvectors of
//! the class matrices over a prime field, lifted to exact cyclotomic values.

use std::cmp::Ordering;

use num_rational::BigRational;

use super::{inner_product, ClassFunction};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::ring::{PrimeField, Ring};

/// The irreducible characters of a group, rows sorted by degree and then by
/// values in class order.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub conductor: u64,
    pub chars: Vec<ClassFunction>,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.chars.iter().map(ClassFunction::degree).collect()
    }
}

pub fn char_table(g: &FiniteGroup) -> Result<CharacterTable> {
    let n = g.order() as u64;
    let e = g.exponent();
    let r = g.class_count();
    let start = 2 * (n as f64).sqrt().ceil() as u64 + 1;
    let field = PrimeField::first_above(start - 1, e)?;
    let ell = field.modulus();
    if ell > 1 << 20 {
        return Err(Error::NoDixonPrime(1 << 20));
    }

    let constants = g.class_structure_constants();
    let class_mats: Vec<Vec<Vec<u64>>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| (0..r).map(|k| constants[i][j][k] % ell).collect())
                .collect()
        })
        .collect();

    // split F^r into common eigenspaces
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..r).map(|i| unit(r, i)).collect()];
    for mat in class_mats.iter().skip(1) {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for space in spaces {
            if space.len() == 1 {
                next.push(space);
                continue;
            }
            next.extend(split_space(&field, mat, &space));
        }
        spaces = next;
    }
    if spaces.len() != r || spaces.iter().any(|s| s.len() != 1) {
        return Err(Error::OrthogonalityFailure(format!(
            "class matrices did not separate {r} characters"
        )));
    }

    let sizes: Vec<u64> = g.classes().iter().map(|c| c.len() as u64).collect();
    let inverse_class: Vec<usize> = g.classes().iter().map(|c| g.class_of(g.inv(c[0]))).collect();
    let mut chars = Vec::with_capacity(r);
    for space in &spaces {
        let v = &space[0];
        let scale = field.inverse_unit(&v[0]).ok_or_else(|| {
            Error::OrthogonalityFailure("central character vanishes at the identity".into())
        })?;
        let omega: Vec<u64> = v.iter().map(|x| field.mul(x, &scale)).collect();
        // chi(1)^2 = |G| / sum_k omega_k omega_{k*} / |C_k|
        let mut s = 0u64;
        for k in 0..r {
            let term = field.mul(&omega[k], &omega[inverse_class[k]]);
            let term = field.mul(&term, &field.inverse_unit(&(sizes[k] % ell)).unwrap());
            s = field.add(&s, &term);
        }
        let deg_sq = field.mul(&(n % ell), &field.inverse_unit(&s).ok_or_else(|| {
            Error::OrthogonalityFailure("degenerate central character".into())
        })?);
        let degree = (1..=n)
            .take_while(|d| d * d <= n)
            .find(|d| n.is_multiple_of(*d) && (d * d) % ell == deg_sq)
            .ok_or_else(|| Error::OrthogonalityFailure("no integral degree".into()))?;
        let modular: Vec<u64> = (0..r)
            .map(|k| {
                let x = field.mul(&omega[k], &(degree % ell));
                field.mul(&x, &field.inverse_unit(&(sizes[k] % ell)).unwrap())
            })
            .collect();
        chars.push(lift_values(g, &field, &modular, e, degree)?);
    }

    chars.sort_by(|a, b| compare_rows(a, b, e));
    check_orthogonality(g, &chars)?;
    Ok(CharacterTable { conductor: e, chars })
}

fn unit(r: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; r];
    v[i] = 1;
    v
}

/// Splits an invariant subspace (rows = basis vectors) of `mat` acting on
/// column vectors into eigenspaces.
fn split_space(field: &PrimeField, mat: &[Vec<u64>], basis: &[Vec<u64>]) -> Vec<Vec<Vec<u64>>> {
    let d = basis.len();
    let r = mat.len();
    // echelon form of the basis for coordinate extraction
    let (ech, pivots) = echelon(field, basis);
    let coords = |v: &[u64]| -> Vec<u64> {
        let mut v = v.to_vec();
        let mut out = vec![0u64; ech.len()];
        for (b, (row, &pc)) in ech.iter().zip(&pivots).enumerate() {
            let c = v[pc];
            if c != 0 {
                out[b] = c;
                for (x, y) in v.iter_mut().zip(row) {
                    field.sub_mul_assign(x, &c, y);
                }
            }
        }
        out
    };
    // restricted matrix: column b = coords of mat * ech[b]
    let mut restricted = vec![vec![0u64; d]; d];
    for (b, w) in ech.iter().enumerate() {
        let image: Vec<u64> = (0..r)
            .map(|j| (0..r).fold(0, |acc, k| field.add(&acc, &field.mul(&mat[j][k], &w[k]))))
            .collect();
        for (a, c) in coords(&image).into_iter().enumerate() {
            restricted[a][b] = c;
        }
    }
    let mut out = Vec::new();
    let mut found = 0;
    for c in 0..field.modulus() {
        let shifted: Vec<Vec<u64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { field.sub(&restricted[i][j], &c) } else { restricted[i][j] }).collect())
            .collect();
        let null = nullspace(field, &shifted);
        if null.is_empty() {
            continue;
        }
        found += null.len();
        // back to F^r
        let vecs: Vec<Vec<u64>> = null
            .iter()
            .map(|y| {
                let mut v = vec![0u64; r];
                for (b, coef) in y.iter().enumerate() {
                    for (x, w) in v.iter_mut().zip(&ech[b]) {
                        *x = field.add(x, &field.mul(coef, w));
                    }
                }
                v
            })
            .collect();
        out.push(vecs);
        if found == d {
            break;
        }
    }
    out
}

fn echelon(field: &PrimeField, rows: &[Vec<u64>]) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut pivots = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for (prow, &pc) in out.iter().zip(&pivots) {
            let c = v[pc];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(prow) {
                    field.sub_mul_assign(x, &c, y);
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = field.inverse_unit(&v[pc]).unwrap();
            v.iter_mut().for_each(|x| *x = field.mul(x, &inv));
            // keep earlier rows reduced at the new pivot
            for prow in out.iter_mut() {
                let c = prow[pc];
                if c != 0 {
                    for (x, y) in prow.iter_mut().zip(&v) {
                        field.sub_mul_assign(x, &c, y);
                    }
                }
            }
            out.push(v);
            pivots.push(pc);
        }
    }
    (out, pivots)
}

/// Basis of {y : m y = 0}.
fn nullspace(field: &PrimeField, m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let d = m.first().map_or(0, Vec::len);
    let (ech, pivots) = echelon(field, m);
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut y = vec![0u64; d];
            y[fc] = 1;
            for (row, &pc) in ech.iter().zip(&pivots) {
                y[pc] = field.neg(&row[fc]);
            }
            y
        })
        .collect()
}

/// chi(g) = sum_t m_t zeta_e^t with m_t = (1/e) sum_j chi(g^j) zeta^{-jt}.
fn lift_values(g: &FiniteGroup, field: &PrimeField, modular: &[u64], e: u64, degree: u64) -> Result<ClassFunction> {
    let ell = field.modulus();
    let e_inv = field.inverse_unit(&(e % ell)).unwrap();
    let values = g
        .classes()
        .iter()
        .map(|class| {
            let x = class[0];
            let powers: Vec<u64> = (0..e).map(|j| modular[g.class_of(g.pow(x, j))]).collect();
            let mut mult = Vec::with_capacity(e as usize);
            for t in 0..e {
                let mut acc = 0u64;
                for (j, val) in powers.iter().enumerate() {
                    let z = field.root_power((e - (j as u64 * t) % e) % e);
                    acc = field.add(&acc, &field.mul(val, &z));
                }
                let m = field.mul(&acc, &e_inv);
                if m > degree {
                    return Err(Error::OrthogonalityFailure(format!(
                        "eigenvalue multiplicity {m} exceeds the degree {degree}"
                    )));
                }
                mult.push(m as i64);
            }
            Ok(crate::ring::CycloNumber::from_root_multiplicities(e, &mult))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassFunction::new(values))
}

fn compare_rows(a: &ClassFunction, b: &ClassFunction, e: u64) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        for (x, y) in a.values().iter().zip(b.values()) {
            let ord = x.sort_key(e).cmp(&y.sort_key(e));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    })
}

/// Exact first and second orthogonality.
pub fn check_orthogonality(g: &FiniteGroup, chars: &[ClassFunction]) -> Result<()> {
    let r = g.class_count();
    if chars.len() != r {
        return Err(Error::OrthogonalityFailure(format!("{} characters for {r} classes", chars.len())));
    }
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate().skip(i) {
            let ip = inner_product(g, a, b)?;
            let want = BigRational::from_integer(i64::from(i == j).into());
            if ip != want {
                return Err(Error::OrthogonalityFailure(format!("<chi_{i}, chi_{j}> = {ip}")));
            }
        }
    }
    let n = g.order() as i64;
    for k in 0..r {
        for l in k..r {
            let mut acc = crate::ring::CycloNumber::zero(1);
            for c in chars {
                acc = acc.add(&c.values()[k].mul(&c.values()[l].conj()));
            }
            let want = if k == l { n / g.classes()[k].len() as i64 } else { 0 };
            if acc.as_integer() != Some(want) {
                return Err(Error::OrthogonalityFailure(format!("columns {k} and {l} give {acc}")));
            }
        }
    }
    if chars.iter().map(|c| c.degree().pow(2)).sum::<u64>() != n as u64 {
        return Err(Error::OrthogonalityFailure("degrees do not square-sum to |G|".into()));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ring::CycloNumber;

    fn perms(gens: &[&[u32]]) -> FiniteGroup {
        let gens: Vec<Vec<u32>> = gens.iter().map(|g| g.to_vec()).collect();
        FiniteGroup::from_permutations(&gens, 512).unwrap()
    }

    #[test]
    fn cyclic_four() {
        let g = perms(&[&[1, 2, 3, 0]]);
        let t = char_table(&g).unwrap();
        assert_eq!(t.degrees(), vec![1, 1, 1, 1]);
        let allowed: Vec<CycloNumber> = (0..4).map(|k| CycloNumber::root(4, k)).collect();
        for c in &t.chars {
            assert!(c.values().iter().all(|v| allowed.contains(v)));
        }
    }

    #[test]
    fn quaternion_and_s3_and_sl23() {
        let q8 = perms(&[&[1, 4, 3, 6, 5, 0, 7, 2], &[2, 7, 4, 1, 6, 3, 0, 5]]);
        assert_eq!(char_table(&q8).unwrap().degrees(), vec![1, 1, 1, 1, 2]);
        let s3 = perms(&[&[1, 2, 0], &[1, 0, 2]]);
        assert_eq!(char_table(&s3).unwrap().degrees(), vec![1, 1, 2]);
        // SL(2,3) on the 8 nonzero vectors of F_3^2
        let sl = sl23();
        assert_eq!(sl.order(), 24);
        let t = char_table(&sl).unwrap();
        assert_eq!(t.degrees(), vec![1, 1, 1, 2, 2, 2, 3]);
    }

    pub(crate) fn sl23() -> FiniteGroup {
        // vectors (a, b) in F_3^2 \ 0 numbered by 3a + b - 1
        let vecs: Vec<(i64, i64)> = (0..9).map(|k| (k / 3, k % 3)).filter(|&v| v != (0, 0)).collect();
        let idx = |v: (i64, i64)| vecs.iter().position(|&w| w == v).unwrap() as u32;
        let act = |m: [[i64; 2]; 2]| -> Vec<u32> {
            vecs.iter()
                .map(|&(a, b)| {
                    idx(((m[0][0] * a + m[0][1] * b).rem_euclid(3), (m[1][0] * a + m[1][1] * b).rem_euclid(3)))
                })
                .collect()
        };
        FiniteGroup::from_permutations(&[act([[1, 1], [0, 1]]), act([[1, 0], [1, 1]])], 512).unwrap()
    }
}
