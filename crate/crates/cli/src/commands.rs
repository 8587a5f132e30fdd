//! Command implementations. Each returns a serializable document; the
//! caller prints it and maps errors to exit codes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use blockext_core::analysis::{
    self, check_stable_chars, predicted_good_sets, CandidateSet, GoodnessReport, StableCharReport,
    DEFAULT_ENUMERATION_BOUND,
};
use blockext_core::chars::{build_irr_b, BlockData};
use blockext_core::ext::{default_policy, ExtEngine, ExtMode, OracleOptions, DEFAULT_SIZE_GUARD};
use blockext_core::group::{describe_defect, validate_block_spec, SemidirectGroup};
use blockext_core::ring::{CycloNumber, OModuleClass, PrecisionPolicy, Valuation};
use blockext_core::Error as EngineError;
use serde::Serialize;

use crate::cache::{ExtCache, ENGINE_VERSION};
use crate::error::CliError;
use crate::spec_file::{mode_name, SpecFile, SpecOptions, FORMAT_VERSION};

/// Values given on the command line or through the environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub precision: Option<u32>,
    pub order_bound: Option<usize>,
    pub enum_bound: Option<u128>,
    pub size_guard: Option<usize>,
    pub mode: Option<ExtMode>,
    pub cache_dir: Option<PathBuf>,
    pub timing: bool,
}

/// Effective settings: overrides first, then the spec's [options], then
/// defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub precision: Option<u32>,
    pub order_bound: Option<usize>,
    pub enum_bound: u128,
    pub size_guard: usize,
    pub mode: ExtMode,
    pub cache_dir: Option<PathBuf>,
    pub timing: bool,
}

impl Settings {
    pub fn resolve(over: &Overrides, spec: &SpecOptions) -> Settings {
        Settings {
            precision: over.precision.or(spec.precision),
            order_bound: over.order_bound,
            enum_bound: over.enum_bound.or(spec.enum_bound).unwrap_or(DEFAULT_ENUMERATION_BOUND),
            size_guard: over.size_guard.or(spec.size_guard).unwrap_or(DEFAULT_SIZE_GUARD),
            mode: over.mode.or(spec.mode).unwrap_or(ExtMode::Closed),
            cache_dir: over.cache_dir.clone(),
            timing: over.timing,
        }
    }

    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions {
            policy: self.precision.map(|n| PrecisionPolicy { precision: n, margin: 1, retry: 2 }),
            size_guard: self.size_guard,
            memoize: true,
        }
    }
}

/// Common envelope of every result document.
#[derive(Debug, Serialize)]
pub struct Document<T> {
    pub format: u32,
    pub command: &'static str,
    pub version: &'static str,
    #[serde(flatten)]
    pub body: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

fn document<T>(command: &'static str, settings: &Settings, started: Instant, body: T) -> Document<T> {
    Document {
        format: FORMAT_VERSION,
        command,
        version: ENGINE_VERSION,
        body,
        timing_ms: settings.timing.then(|| started.elapsed().as_millis()),
    }
}

pub fn read_spec(path: &Path) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    SpecFile::parse(&text)
}

struct Loaded {
    file: SpecFile,
    group: SemidirectGroup,
    settings: Settings,
}

fn load(path: &Path, over: &Overrides) -> Result<Loaded, CliError> {
    let file = read_spec(path)?;
    let settings = Settings::resolve(over, &file.options);
    let group = validate_block_spec(&file.block_spec(settings.order_bound))?;
    Ok(Loaded { file, group, settings })
}

impl Loaded {
    fn cache(&self) -> Result<Option<ExtCache>, CliError> {
        let Some(dir) = &self.settings.cache_dir else { return Ok(None) };
        let mut canonical = self.file.clone();
        canonical.options = SpecOptions::default();
        ExtCache::new(dir.clone(), canonical.serialize()).map(Some).map_err(|e| CliError::io(dir, e))
    }

    fn precision_used(&self) -> u32 {
        self.settings.precision.unwrap_or_else(|| default_policy(&self.group.g).precision)
    }
}

fn ext_cached(
    engine: &ExtEngine,
    cache: Option<&ExtCache>,
    precision: Option<u32>,
    c1: usize,
    c2: usize,
    degree: u32,
    mode: ExtMode,
) -> Result<OModuleClass, EngineError> {
    if let Some(hit) = cache.and_then(|c| c.get(c1, c2, degree, precision, mode_name(mode))) {
        return Ok(hit);
    }
    let block = engine.block;
    let class = engine.ext(&block.chars[c1], &block.chars[c2], degree, mode)?;
    if let Some(c) = cache {
        c.put(c1, c2, degree, precision, mode_name(mode), &class);
    }
    Ok(class)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDoc {
    pub free_rank: usize,
    pub torsion: Vec<Valuation>,
    pub pretty: String,
}

impl ClassDoc {
    pub fn new(class: &OModuleClass, p: u64) -> Self {
        ClassDoc { free_rank: class.free_rank, torsion: class.torsion().to_vec(), pretty: class.pretty(p) }
    }
}

// ---- validate ----

#[derive(Debug, Serialize)]
pub struct ValidateBody {
    pub valid: bool,
    pub p: u64,
    pub defect: String,
    pub e_order: usize,
    pub g_order: usize,
    pub z_order: usize,
    pub phi_exponent: u64,
    pub d1: String,
    pub d2: String,
    pub assumption_holds: bool,
    pub warnings: Vec<String>,
    pub stable_chars: StableCharReport,
}

pub fn cmd_validate(path: &Path, over: &Overrides) -> Result<Document<ValidateBody>, CliError> {
    let started = Instant::now();
    let l = load(path, over)?;
    let g = &l.group;
    let body = ValidateBody {
        valid: true,
        p: g.p,
        defect: describe_defect(g.d()),
        e_order: g.e().order(),
        g_order: g.d().size() * g.e().order(),
        z_order: g.z.len(),
        phi_exponent: g.phi_exponent,
        d1: describe_defect(&g.d1.group),
        d2: describe_defect(&g.d2.group),
        assumption_holds: g.assumption_holds,
        warnings: g.warnings.clone(),
        stable_chars: check_stable_chars(g)?,
    };
    Ok(document("validate", &l.settings, started, body))
}

// ---- chars ----

#[derive(Debug, Serialize)]
pub struct ValuesDoc {
    pub conductor: u64,
    /// power-basis coefficients in zeta_conductor, one vector per class
    pub classes: Vec<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct CharRow {
    pub index: usize,
    /// lambda in the coordinates of the dual of D
    pub lambda: Vec<u64>,
    pub orbit: usize,
    pub orbit_size: usize,
    /// index of chi in the character table of the stabilizer
    pub chi: usize,
    pub degree: u64,
    pub reduction: Vec<u64>,
    /// values of chi on the stabilizer's classes
    pub chi_values: ValuesDoc,
}

#[derive(Debug, Serialize)]
pub struct BrauerRow {
    pub index: usize,
    pub degree: u64,
    pub lifts: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct CharsBody {
    pub characters: Vec<CharRow>,
    pub brauer: Vec<BrauerRow>,
    pub decomposition_matrix: Vec<Vec<u64>>,
    pub degree_square_sum: u64,
    pub expected_square_sum: u64,
    pub degree_check: bool,
}

fn values_doc(values: &[CycloNumber]) -> ValuesDoc {
    let conductor = values.iter().map(CycloNumber::conductor).fold(1, num_integer::lcm);
    let classes = values
        .iter()
        .map(|v| {
            let v = v.embed(conductor).expect("the lcm conductor contains every value");
            v.coefficients().iter().map(|c| c.to_string()).collect()
        })
        .collect();
    ValuesDoc { conductor, classes }
}

fn chars_body(block: &BlockData) -> CharsBody {
    let g = &block.group;
    let expected = (g.d().size() * g.e().order() / g.z.len()) as u64;
    let characters = block
        .chars
        .iter()
        .map(|c| CharRow {
            index: c.index,
            lambda: g.d().coords(c.lambda),
            orbit: c.orbit,
            orbit_size: block.stabilizer(c).orbit.members.len(),
            chi: c.chi,
            degree: c.degree,
            reduction: c.reduction.clone(),
            chi_values: values_doc(block.chi(c).values()),
        })
        .collect();
    let brauer = (0..block.brauer.len())
        .map(|psi| BrauerRow { index: psi, degree: block.brauer_char(psi).degree(), lifts: block.lifts_of(psi) })
        .collect();
    CharsBody {
        characters,
        brauer,
        decomposition_matrix: block.decomposition_matrix(),
        degree_square_sum: block.degree_square_sum(),
        expected_square_sum: expected,
        degree_check: block.degree_square_sum() == expected,
    }
}

pub fn cmd_chars(path: &Path, over: &Overrides) -> Result<Document<CharsBody>, CliError> {
    let started = Instant::now();
    let l = load(path, over)?;
    let block = build_irr_b(&l.group)?;
    Ok(document("chars", &l.settings, started, chars_body(&block)))
}

// ---- ext ----

#[derive(Debug, Serialize)]
pub struct ExtBody {
    pub first: usize,
    pub second: usize,
    pub degree: u32,
    pub mode: ExtMode,
    pub precision: u32,
    pub class: ClassDoc,
}

pub fn cmd_ext(
    path: &Path,
    over: &Overrides,
    first: usize,
    second: usize,
    degree: u32,
) -> Result<Document<ExtBody>, CliError> {
    let started = Instant::now();
    let l = load(path, over)?;
    let block = build_irr_b(&l.group)?;
    let n = block.chars.len();
    if first >= n || second >= n {
        return Err(CliError::Usage(format!("character indices must be below {n}")));
    }
    let engine = ExtEngine::new(&block, l.settings.oracle_options())?;
    let cache = l.cache()?;
    let mode = l.settings.mode;
    let class = ext_cached(&engine, cache.as_ref(), l.settings.precision, first, second, degree, mode)?;
    let body = ExtBody {
        first,
        second,
        degree,
        mode,
        precision: l.precision_used(),
        class: ClassDoc::new(&class, l.group.p),
    };
    Ok(document("ext", &l.settings, started, body))
}

// ---- goodsets ----

#[derive(Debug, Serialize)]
pub struct PredictedSet {
    pub theta: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct GoodsetsBody {
    pub mode: ExtMode,
    pub candidate_count: u128,
    pub good_sets: Vec<Vec<usize>>,
    pub predicted: Vec<PredictedSet>,
    pub holds: bool,
    pub missing: Vec<GoodnessReport>,
    pub unexpected: Vec<GoodnessReport>,
}

fn require_assumption(g: &SemidirectGroup) -> Result<(), CliError> {
    if g.assumption_holds {
        Ok(())
    } else {
        Err(EngineError::AssumptionViolated(g.warnings.join("; ")).into())
    }
}

pub fn cmd_goodsets(path: &Path, over: &Overrides) -> Result<Document<GoodsetsBody>, CliError> {
    let started = Instant::now();
    let l = load(path, over)?;
    require_assumption(&l.group)?;
    let block = build_irr_b(&l.group)?;
    let engine = ExtEngine::new(&block, l.settings.oracle_options())?;
    let mode = l.settings.mode;
    let report = analysis::verify_classification(&engine, l.settings.enum_bound, mode)?;
    let predicted = predicted_good_sets(&engine)?
        .into_iter()
        .map(|(theta, s)| PredictedSet { theta, members: s.members })
        .collect();
    let body = GoodsetsBody {
        mode,
        candidate_count: analysis::candidate_count(&engine),
        good_sets: report.enumerated.into_iter().map(|s: CandidateSet| s.members).collect(),
        predicted,
        holds: report.holds,
        missing: report.missing,
        unexpected: report.unexpected,
    };
    Ok(document("goodsets", &l.settings, started, body))
}

pub(crate) use verify::cmd_verify;

mod verify;
