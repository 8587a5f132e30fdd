use super::{snf, Matrix, OModuleClass, Ring, Valuation};
use crate::error::{Error, Result};

/// How precision is chosen and checked when reading torsion off an SNF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    /// p-adic precision N of the first computation
    pub precision: u32,
    /// exponents within `margin` of the ceiling are treated as unreliable
    pub margin: u32,
    /// the computation is repeated at precision + retry and must agree
    pub retry: u32,
}

impl PrecisionPolicy {
    /// Default for modules whose torsion exponents are at most p^max_exponent.
    pub fn for_exponent(max_exponent: u32) -> Self {
        PrecisionPolicy { precision: max_exponent + 2, margin: 2, retry: 2 }
    }

    pub fn with_precision(self, precision: u32) -> Self {
        PrecisionPolicy { precision, ..self }
    }
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy::for_exponent(1)
    }
}

/// A cochain complex C^0 -> C^1 -> ...; `diffs[i]` maps C^i to C^{i+1} and
/// has shape dim C^{i+1} x dim C^i.
#[derive(Debug, Clone)]
pub struct ChainComplex<E> {
    diffs: Vec<Matrix<E>>,
}

impl<E: Clone + PartialEq> ChainComplex<E> {
    pub fn new<R: Ring<Elem = E>>(ring: &R, diffs: Vec<Matrix<E>>) -> Result<Self> {
        for (i, w) in diffs.windows(2).enumerate() {
            if w[1].cols() != w[0].rows() {
                return Err(Error::DimensionCheck(format!("differentials {i} and {} do not compose", i + 1)));
            }
            if !w[1].mul(ring, &w[0]).is_zero(ring) {
                return Err(Error::DimensionCheck(format!("d^{} d^{i} is not zero", i + 1)));
            }
        }
        Ok(ChainComplex { diffs })
    }

    pub fn len(&self) -> usize {
        self.diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }

    pub fn differential(&self, i: usize) -> &Matrix<E> {
        &self.diffs[i]
    }

    pub fn dim(&self, i: usize) -> usize {
        if i < self.diffs.len() {
            self.diffs[i].cols()
        } else {
            self.diffs[i - 1].rows()
        }
    }

    /// H^i from the SNFs of d^{i-1} and d^i over a chain ring. Free rank is
    /// read from the reliable exponents, so the ring must be precise enough
    /// for all genuine invariant factors to sit below the margin.
    pub fn cohomology<R: Ring<Elem = E>>(&self, ring: &R, i: usize, margin: u32) -> Result<OModuleClass> {
        let ceiling = ring.ceiling();
        let outgoing = if i < self.diffs.len() {
            classify_exponents(&snf(ring, &self.diffs[i]).exponents, ceiling, margin)?.1
        } else {
            0
        };
        let (torsion, incoming) = if i > 0 {
            classify_exponents(&snf(ring, &self.diffs[i - 1]).exponents, ceiling, margin)?
        } else {
            (Vec::new(), 0)
        };
        homology_class(ring.ramification(), self.dim(i), outgoing, incoming, &torsion)
    }
}

/// Splits SNF exponents into (positive torsion exponents, rank), rejecting
/// any exponent that lies within `margin` of the ceiling.
pub fn classify_exponents(exponents: &[u32], ceiling: u32, margin: u32) -> Result<(Vec<u32>, usize)> {
    let limit = ceiling.saturating_sub(margin);
    if let Some(&bad) = exponents.iter().find(|&&k| k >= limit && k < ceiling) {
        return Err(Error::PrecisionUnstable(format!(
            "invariant factor pi^{bad} is within {margin} of the precision ceiling pi^{ceiling}"
        )));
    }
    let reliable: Vec<u32> = exponents.iter().copied().filter(|&k| k < limit).collect();
    let torsion = reliable.iter().copied().filter(|&k| k > 0).collect();
    Ok((torsion, reliable.len()))
}

/// H = O^{dim - rank_out - rank_in} + sum O/pi^k, valuations in units of v(p).
pub fn homology_class(
    ramification: u32,
    dim: usize,
    rank_out: usize,
    rank_in: usize,
    torsion_exponents: &[u32],
) -> Result<OModuleClass> {
    let free = dim
        .checked_sub(rank_out + rank_in)
        .ok_or_else(|| Error::DimensionCheck(format!("ranks {rank_out} + {rank_in} exceed dimension {dim}")))?;
    Ok(OModuleClass::new(
        free,
        torsion_exponents.iter().map(|&k| Valuation::new(k as u64, ramification as u64)),
    ))
}
