//! Stable characters of [D,E], Ext^2 forcing conjugacy, and the Ext^1 quiver.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::conforms_to_good;
use crate::error::Result;
use crate::ext::{ExtEngine, ExtMode};
use crate::group::{SemidirectGroup, SplitGroup};
use crate::ring::OModuleClass;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableCharReport {
    /// E-fixed characters of D_1, in D_1 coordinates
    pub fixed: Vec<usize>,
    /// whether the trivial character is the only one
    pub holds: bool,
}

/// E-fixed linear characters of P for an arbitrary P x| E.
pub fn stable_chars_of(split: &SplitGroup) -> StableCharReport {
    let fixed: Vec<usize> = split
        .char_orbits()
        .into_iter()
        .filter(|o| o.members.len() == 1)
        .map(|o| o.representative)
        .collect();
    StableCharReport { holds: fixed == [0], fixed }
}

/// Only the trivial character of D_1 = [D, E] is E-stable.
pub fn check_stable_chars(group: &SemidirectGroup) -> Result<StableCharReport> {
    Ok(stable_chars_of(&group.d1_split()?))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyViolation {
    pub first: usize,
    pub second: usize,
    pub ext2: OModuleClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyReport {
    pub pairs_checked: usize,
    /// pairs whose Ext^2 is nonzero with good-shaped torsion
    pub triggered: usize,
    pub violations: Vec<ConjugacyViolation>,
}

/// For every ordered pair whose Ext^2 is a nonzero sum of O/p^m (m >= 2 for
/// p = 2), checks that the underlying characters of D are E-conjugate.
pub fn check_conjugacy_forcing(engine: &ExtEngine, mode: ExtMode) -> Result<ConjugacyReport> {
    let block = engine.block;
    let p = engine.prime();
    let pairs: Vec<(usize, usize)> = (0..block.chars.len()).cartesian_product(0..block.chars.len()).collect();
    let classes = pairs
        .par_iter()
        .map(|&(a, b)| engine.ext(&block.chars[a], &block.chars[b], 2, mode))
        .collect::<Result<Vec<_>>>()?;
    let mut triggered = 0;
    let mut violations = Vec::new();
    for (&(a, b), ext2) in pairs.iter().zip(classes) {
        if ext2.is_zero() || !conforms_to_good(&ext2, p) {
            continue;
        }
        triggered += 1;
        let (l1, l2) = (block.chars[a].lambda, block.chars[b].lambda);
        if !block.group.g.are_conjugate_chars(l1, l2) {
            violations.push(ConjugacyViolation { first: a, second: b, ext2 });
        }
    }
    Ok(ConjugacyReport { pairs_checked: pairs.len(), triggered, violations })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuiverEdge {
    pub from: usize,
    pub to: usize,
    pub dimension: usize,
}

/// Vertices are the Brauer characters; an edge records a nonzero Ext^1
/// between the simple modules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtQuiver {
    pub vertices: usize,
    pub edges: Vec<QuiverEdge>,
    pub connected: bool,
    /// false for a trivial defect group with several simples, where
    /// connectivity is not expected
    pub hypothesis_applies: bool,
}

/// The Ext^1 quiver of the simple modules, each realized as the reduction
/// of its lift over the trivial character of D.
pub fn ext_quiver(engine: &ExtEngine) -> Result<ExtQuiver> {
    let block = engine.block;
    let n = block.brauer.len();
    let simples: Vec<usize> = (0..n)
        .map(|psi| {
            block
                .lifts_of(psi)
                .into_iter()
                .find(|&i| block.chars[i].lambda == 0)
                .expect("every Brauer character lifts over the trivial character of D")
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n).cartesian_product(0..n).collect();
    let dims = pairs
        .par_iter()
        .map(|&(a, b)| engine.ext1_modp(&block.chars[simples[a]], &block.chars[simples[b]]))
        .collect::<Result<Vec<_>>>()?;
    let edges: Vec<QuiverEdge> = pairs
        .iter()
        .zip(dims)
        .filter(|(_, d)| *d > 0)
        .map(|(&(from, to), dimension)| QuiverEdge { from, to, dimension })
        .collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &edges {
        let (a, b) = (root(&mut parent, e.from), root(&mut parent, e.to));
        parent[a] = b;
    }
    let components = (0..n).filter(|&x| root(&mut parent, x) == x).count();
    let trivial_defect = block.group.d().size() == 1;
    Ok(ExtQuiver {
        vertices: n,
        edges,
        connected: components <= 1,
        hypothesis_applies: !(trivial_defect && n > 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::build_irr_b;
    use crate::ext::OracleOptions;
    use crate::group::{
        inverting_c3, inverting_c3_times_c3, rotating_c4_squared, validate_block_spec, AbelianPGroup, ActionMatrix, FiniteGroup,
    };

    #[test]
    fn stable_characters() {
        for spec in [inverting_c3(), inverting_c3_times_c3(), rotating_c4_squared()] {
            let g = validate_block_spec(&spec).unwrap();
            assert!(check_stable_chars(&g).unwrap().holds);
        }
        // negative control: a trivial action fixes every character
        let d = AbelianPGroup::new(3, vec![1]).unwrap();
        let e = FiniteGroup::from_permutations(&[vec![1, 0]], 8).unwrap();
        let id = ActionMatrix::identity(&d);
        let broken = SplitGroup::new(d, e, vec![id.clone(), id]);
        let report = stable_chars_of(&broken);
        assert!(!report.holds);
        assert_eq!(report.fixed, vec![0, 1, 2]);
    }

    #[test]
    fn conjugacy_and_quiver_on_examples() {
        for (spec, vertices) in [(inverting_c3(), 2), (inverting_c3_times_c3(), 2), (rotating_c4_squared(), 3)] {
            let g = validate_block_spec(&spec).unwrap();
            let b = build_irr_b(&g).unwrap();
            let eng = ExtEngine::new(&b, OracleOptions::default()).unwrap();
            let report = check_conjugacy_forcing(&eng, ExtMode::Crosscheck).unwrap();
            assert!(report.violations.is_empty(), "{report:?}");
            assert!(report.triggered > 0);
            let q = ext_quiver(&eng).unwrap();
            assert_eq!(q.vertices, vertices);
            assert!(q.connected, "{q:?}");
        }
    }
}
