//! Ext groups between the linear-source lattices of a block: closed forms
//! over abelian p-groups, the fixed bar-complex oracle, the Künneth-based
//! fast path, and Ext^1 over the residue field.

mod cochain;
mod module;
mod oracle;

use serde::{Deserialize, Serialize};

pub use cochain::{BarShape, FixedComplex};
pub use module::{build_module_rep, realize, ModuleRep, ModuleSpec, Provenance};
pub use oracle::{
    default_policy, ext_dimension_mod_p, ext_oracle, ExtProblem, OracleOptions, Side, DEFAULT_SIZE_GUARD,
    MAX_ORACLE_DEGREE,
};

use crate::chars::{BlockCharacter, BlockData};
use crate::error::{Error, Result};
use crate::group::{AbelianPGroup, SplitGroup};
use crate::ring::{kunneth_assemble, tensor_tor, val_one_minus_zeta, OModuleClass, TensorOrTor, Valuation};

/// Ext^i_{OD}(O_lambda1, O_lambda2) for an abelian p-group D, i <= 2.
pub fn ext_abelian_closed(d: &AbelianPGroup, lambda1: usize, lambda2: usize, i: u32) -> Result<OModuleClass> {
    let equal = lambda1 == lambda2;
    let twist = || {
        let mu = d.add(d.neg(lambda1), lambda2);
        val_one_minus_zeta(d.prime(), log_p(d.element_order(mu), d.prime()))
    };
    Ok(match (i, equal) {
        (0, true) => OModuleClass::free(1),
        (0, false) | (1, true) => OModuleClass::zero(),
        (1, false) => OModuleClass::cyclic(twist()?),
        (2, true) => OModuleClass::new(0, d.orders().iter().map(|&n| Valuation::integer(n.into()))),
        (2, false) => OModuleClass::cyclic(twist()?).repeat(d.rank() - 1),
        _ => return Err(Error::DegreeOutOfRange(i)),
    })
}

fn log_p(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= p;
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtMode {
    Closed,
    Oracle,
    Crosscheck,
}

impl std::str::FromStr for ExtMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(ExtMode::Closed),
            "oracle" => Ok(ExtMode::Oracle),
            "crosscheck" => Ok(ExtMode::Crosscheck),
            other => Err(Error::InvalidInput(format!("unknown mode {other:?}"))),
        }
    }
}

/// Which argument Shapiro's lemma moves down to its stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapiroOrder {
    FirstArgument,
    SecondArgument,
}

/// Ext computations for one block, with module descriptions prepared once.
pub struct ExtEngine<'a> {
    pub block: &'a BlockData,
    pub options: OracleOptions,
    d1: SplitGroup,
    /// M_c on G
    global: Vec<ModuleSpec>,
    /// lambda (x) V_chi on D x| E_lambda, indexed by character
    local: Vec<ModuleSpec>,
    /// (alpha, chi) on D_1 x| E
    d1_specs: Vec<ModuleSpec>,
    /// D x| E_lambda with the embedding of E_lambda, per orbit
    stabilizer_groups: Vec<(SplitGroup, Vec<usize>)>,
}

impl<'a> ExtEngine<'a> {
    pub fn new(block: &'a BlockData, options: OracleOptions) -> Result<Self> {
        let g = &block.group.g;
        let d1 = block.group.d1_split()?;
        let stabilizer_groups = block
            .stabilizers
            .iter()
            .map(|s| g.restrict_complement(&s.orbit.stabilizer))
            .collect::<Result<Vec<_>>>()?;
        let mut global = Vec::new();
        let mut local = Vec::new();
        let mut d1_specs = Vec::new();
        for c in &block.chars {
            let stab = block.stabilizer(c);
            let chi = block.chi(c).clone();
            global.push(ModuleSpec::for_block_char(block, c)?);
            let (target, _) = &stabilizer_groups[c.orbit];
            let everything: Vec<usize> = (0..target.complement.order()).collect();
            local.push(ModuleSpec::new(target, c.lambda, &everything, chi.clone())?);
            d1_specs.push(ModuleSpec::new(&d1, block.alpha(c), &stab.orbit.stabilizer, chi)?);
        }
        Ok(ExtEngine { block, options, d1, global, local, d1_specs, stabilizer_groups })
    }

    pub fn prime(&self) -> u64 {
        self.block.group.p
    }

    pub fn ext(&self, c1: &BlockCharacter, c2: &BlockCharacter, i: u32, mode: ExtMode) -> Result<OModuleClass> {
        if i > 2 {
            return Err(Error::DegreeOutOfRange(i));
        }
        match mode {
            ExtMode::Closed => self.ext_closed(c1, c2, i),
            ExtMode::Oracle => self.ext_shapiro(c1, c2, i, ShapiroOrder::FirstArgument),
            ExtMode::Crosscheck => {
                let closed = self.ext_closed(c1, c2, i)?;
                let oracle = self.ext_shapiro(c1, c2, i, ShapiroOrder::FirstArgument)?;
                if closed != oracle {
                    return Err(Error::CrossCheckMismatch {
                        closed: closed.pretty(self.prime()),
                        oracle: oracle.pretty(self.prime()),
                    });
                }
                Ok(closed)
            }
        }
    }

    /// Ext^i_{OG}(M_c1, M_c2) computed over the stabilizer of one argument's
    /// character, the other module restricted to it.
    pub fn ext_shapiro(
        &self,
        c1: &BlockCharacter,
        c2: &BlockCharacter,
        i: u32,
        order: ShapiroOrder,
    ) -> Result<OModuleClass> {
        let g = &self.block.group.g;
        let problem = match order {
            ShapiroOrder::FirstArgument => {
                let (target, embed) = &self.stabilizer_groups[c1.orbit];
                ExtProblem {
                    target,
                    left: Side::Here(&self.local[c1.index]),
                    right: Side::Restricted { base: g, embed, spec: &self.global[c2.index] },
                }
            }
            ShapiroOrder::SecondArgument => {
                let (target, embed) = &self.stabilizer_groups[c2.orbit];
                ExtProblem {
                    target,
                    left: Side::Restricted { base: g, embed, spec: &self.global[c1.index] },
                    right: Side::Here(&self.local[c2.index]),
                }
            }
        };
        ext_oracle(&problem, i, &self.options)
    }

    /// Ext^j over D_1 x| E between the D_1-parts of two characters.
    pub fn ext_d1(&self, c1: &BlockCharacter, c2: &BlockCharacter, j: u32) -> Result<OModuleClass> {
        let problem = ExtProblem {
            target: &self.d1,
            left: Side::Here(&self.d1_specs[c1.index]),
            right: Side::Here(&self.d1_specs[c2.index]),
        };
        ext_oracle(&problem, j, &self.options)
    }

    /// The Künneth fast path along G = (D_1 x| E) x D_2.
    pub fn ext_closed(&self, c1: &BlockCharacter, c2: &BlockCharacter, i: u32) -> Result<OModuleClass> {
        let d2 = &self.block.group.d2.group;
        let (t1, t2) = (self.block.theta(c1), self.block.theta(c2));
        if i < 2 {
            let top = i + 1;
            let left = (0..=top).map(|j| self.ext_d1(c1, c2, j)).collect::<Result<Vec<_>>>()?;
            let right = (0..=top).map(|j| ext_abelian_closed(d2, t1, t2, j)).collect::<Result<Vec<_>>>()?;
            return kunneth_assemble(&left, &right, i as usize);
        }
        if i > 2 {
            return Err(Error::DegreeOutOfRange(i));
        }
        let e: Vec<OModuleClass> = (0..=2).map(|j| self.ext_d1(c1, c2, j)).collect::<Result<_>>()?;
        let tensor = |a: &OModuleClass, b: &OModuleClass| tensor_tor(a, b, TensorOrTor::Tensor);
        Ok(if t1 == t2 {
            let cyclic = OModuleClass::new(0, d2.orders().iter().map(|&n| Valuation::integer(n.into())));
            tensor(&cyclic, &e[0]).direct_sum(&e[2]).direct_sum(&tensor(&cyclic, &e[1]))
        } else {
            let rank = d2.rank();
            let mu = d2.add(d2.neg(t1), t2);
            let z = OModuleClass::cyclic(val_one_minus_zeta(self.prime(), log_p(d2.element_order(mu), self.prime()))?);
            tensor(&z, &e[0])
                .repeat(rank - 1)
                .direct_sum(&tensor(&z, &e[1]).repeat(rank))
                .direct_sum(&tensor(&z, &e[2]))
        })
    }

    /// dim_k Ext^1_{kG} between the reductions of M_c1 and M_c2.
    pub fn ext1_modp(&self, c1: &BlockCharacter, c2: &BlockCharacter) -> Result<usize> {
        let (target, embed) = &self.stabilizer_groups[c1.orbit];
        let problem = ExtProblem {
            target,
            left: Side::Here(&self.local[c1.index]),
            right: Side::Restricted { base: &self.block.group.g, embed, spec: &self.global[c2.index] },
        };
        ext_dimension_mod_p(&problem, 1, &self.options)
    }
}

/// Whether an Ext class has the shape guaranteed in its degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeReport {
    pub degree: u32,
    pub conforming: bool,
    pub violations: Vec<String>,
}

/// Degree 0: free only. Degree 1: torsion with every valuation that of some
/// 1 - zeta. Degree 2: torsion only.
pub fn ext_shape_classify(e: &OModuleClass, i: u32, p: u64) -> ShapeReport {
    let mut violations = Vec::new();
    if i > 0 && e.free_rank > 0 {
        violations.push(format!("free summand O^{} in degree {i}", e.free_rank));
    }
    match i {
        0 if !e.torsion().is_empty() => violations.push("torsion in degree 0".into()),
        1 => {
            for v in e.torsion() {
                if v.as_one_minus_zeta(p).is_none() {
                    violations.push(format!("valuation {v} is not that of 1 - zeta for a p-power root zeta"));
                }
            }
        }
        _ => {}
    }
    ShapeReport { degree: i, conforming: violations.is_empty(), violations }
}
