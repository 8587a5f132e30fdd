//! The block specification file format.
//!
//! ```text
//! format: 1
//!
//! [block]
//! p: 3
//! defect: 1 1          # D = C_3 x C_3
//! phi: 1               # optional
//!
//! [complement]
//! degree: 4            # E acts on the points 0..degree
//! generator: (0 1 2 3)
//! order_bound: 512     # optional
//!
//! [action]
//! matrix: -1 0; 0 1    # one per generator, rows separated by ';'
//!
//! [options]            # every key optional
//! precision: 4
//! enum_bound: 1000000
//! size_guard: 500000
//! mode: crosscheck
//! ```
//!
//! `#` starts a comment. Keys may appear only in their own section, and
//! every key except `generator` and `matrix` at most once.

use std::fmt::Write as _;

use blockext_core::ext::ExtMode;
use blockext_core::group::{BlockSpec, DEFAULT_ORDER_BOUND};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecOptions {
    pub precision: Option<u32>,
    pub enum_bound: Option<u128>,
    pub size_guard: Option<usize>,
    pub mode: Option<ExtMode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub p: u64,
    pub defect: Vec<u32>,
    pub phi: Option<u64>,
    /// number of points the generators permute
    pub degree: usize,
    /// generator images of 0..degree
    pub generators: Vec<Vec<u32>>,
    pub order_bound: Option<usize>,
    pub actions: Vec<Vec<Vec<i64>>>,
    pub options: SpecOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Block,
    Complement,
    Action,
    Options,
}

impl Section {
    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::Preamble => &["format"],
            Section::Block => &["p", "defect", "phi"],
            Section::Complement => &["degree", "generator", "order_bound"],
            Section::Action => &["matrix"],
            Section::Options => &["precision", "enum_bound", "size_guard", "mode"],
        }
    }
}

struct Located<'a> {
    line: usize,
    col: usize,
    text: &'a str,
}

impl Located<'_> {
    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::Parse { line: self.line, col: self.col, message: message.into() }
    }

    fn number<T: std::str::FromStr>(&self) -> Result<T, CliError> {
        self.text.parse().map_err(|_| self.err(format!("expected a number, found {:?}", self.text)))
    }

    /// Whitespace-separated tokens with their own columns.
    fn tokens(&self) -> Vec<Located<'_>> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in self.text.char_indices().chain(std::iter::once((self.text.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    out.push(Located { line: self.line, col: self.col + s, text: &self.text[s..i] });
                    start = None;
                }
                _ => {}
            }
        }
        out
    }
}

impl SpecFile {
    pub fn parse(input: &str) -> Result<SpecFile, CliError> {
        let mut section = Section::Preamble;
        let mut format = None;
        let mut p = None;
        let mut defect = None;
        let mut phi = None;
        let mut degree = None;
        let mut generators: Vec<Located> = Vec::new();
        let mut order_bound = None;
        let mut actions = Vec::new();
        let mut options = SpecOptions::default();
        let mut seen: Vec<(Section, &str)> = Vec::new();

        for (n, raw) in input.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            let here = Located { line, col: indent + 1, text: trimmed };
            if let Some(name) = trimmed.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| here.err("unterminated section header"))?;
                section = match name.trim() {
                    "block" => Section::Block,
                    "complement" => Section::Complement,
                    "action" => Section::Action,
                    "options" => Section::Options,
                    other => return Err(here.err(format!("unknown section [{other}]"))),
                };
                if seen.iter().any(|(s, k)| *s == section && k.is_empty()) {
                    return Err(here.err(format!("section [{}] repeated", name.trim())));
                }
                seen.push((section, ""));
                continue;
            }
            let colon = trimmed.find(':').ok_or_else(|| here.err("expected `key: value`"))?;
            let key = trimmed[..colon].trim();
            let after = &trimmed[colon + 1..];
            let value_off = colon + 1 + (after.len() - after.trim_start().len());
            let value = Located { line, col: here.col + value_off, text: after.trim() };
            if !section.keys().contains(&key) {
                return Err(here.err(format!("unknown key {key:?} in this section")));
            }
            let repeatable = matches!(key, "generator" | "matrix");
            if !repeatable && seen.contains(&(section, key)) {
                return Err(here.err(format!("key {key:?} repeated")));
            }
            seen.push((section, key));
            if value.text.is_empty() && key != "generator" {
                return Err(value.err(format!("missing value for {key:?}")));
            }
            match key {
                "format" => format = Some((value.number::<u32>()?, value.line, value.col)),
                "p" => p = Some(value.number::<u64>()?),
                "defect" => defect = Some(value.tokens().iter().map(|t| t.number::<u32>()).collect::<Result<Vec<_>, _>>()?),
                "phi" => phi = Some(value.number::<u64>()?),
                "degree" => degree = Some(value.number::<usize>()?),
                "generator" => generators.push(value),
                "order_bound" => order_bound = Some(value.number::<usize>()?),
                "matrix" => actions.push(parse_matrix(&value)?),
                "precision" => options.precision = Some(value.number()?),
                "enum_bound" => options.enum_bound = Some(value.number()?),
                "size_guard" => options.size_guard = Some(value.number()?),
                "mode" => {
                    options.mode = Some(value.text.parse().map_err(|_| {
                        value.err(format!("mode must be closed, oracle or crosscheck, found {:?}", value.text))
                    })?)
                }
                _ => unreachable!("keys are checked against the section"),
            }
        }

        let eof = |message: &str| CliError::Parse { line: input.lines().count().max(1), col: 1, message: message.into() };
        match format {
            None => return Err(eof("missing `format: 1`")),
            Some((v, line, col)) if v != FORMAT_VERSION => {
                return Err(CliError::Parse { line, col, message: format!("unsupported format version {v}") })
            }
            _ => {}
        }
        let p = p.ok_or_else(|| eof("missing `p` in [block]"))?;
        let defect = defect.ok_or_else(|| eof("missing `defect` in [block]"))?;

        let cycles = generators.iter().map(parse_cycles).collect::<Result<Vec<_>, _>>()?;
        let degree = match degree {
            Some(d) => d,
            None => cycles.iter().flatten().flatten().map(|&x| x as usize + 1).max().unwrap_or(1),
        };
        let generators = cycles
            .iter()
            .zip(&generators)
            .map(|(c, at)| cycles_to_images(c, degree).map_err(|m| at.err(m)))
            .collect::<Result<Vec<_>, _>>()?;
        if actions.len() != generators.len() {
            return Err(eof(&format!("{} generators but {} matrices", generators.len(), actions.len())));
        }
        Ok(SpecFile { p, defect, phi, degree, generators, order_bound, actions, options })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format: {FORMAT_VERSION}\n\n[block]\np: {}", self.p);
        let _ = writeln!(out, "defect: {}", join(&self.defect, " "));
        if let Some(phi) = self.phi {
            let _ = writeln!(out, "phi: {phi}");
        }
        let _ = writeln!(out, "\n[complement]\ndegree: {}", self.degree);
        for g in &self.generators {
            let _ = writeln!(out, "generator: {}", images_to_cycles(g));
        }
        if let Some(b) = self.order_bound {
            let _ = writeln!(out, "order_bound: {b}");
        }
        let _ = writeln!(out, "\n[action]");
        for m in &self.actions {
            let rows: Vec<String> = m.iter().map(|r| join(r, " ")).collect();
            let _ = writeln!(out, "matrix: {}", rows.join("; "));
        }
        let o = &self.options;
        if *o != SpecOptions::default() {
            let _ = writeln!(out, "\n[options]");
            if let Some(v) = o.precision {
                let _ = writeln!(out, "precision: {v}");
            }
            if let Some(v) = o.enum_bound {
                let _ = writeln!(out, "enum_bound: {v}");
            }
            if let Some(v) = o.size_guard {
                let _ = writeln!(out, "size_guard: {v}");
            }
            if let Some(v) = o.mode {
                let _ = writeln!(out, "mode: {}", mode_name(v));
            }
        }
        out
    }

    pub fn block_spec(&self, order_bound: Option<usize>) -> BlockSpec {
        BlockSpec {
            p: self.p,
            defect: self.defect.clone(),
            generators: self.generators.clone(),
            actions: self.actions.clone(),
            phi: self.phi,
            order_bound: order_bound.or(self.order_bound).unwrap_or(DEFAULT_ORDER_BOUND),
        }
    }
}

pub fn mode_name(mode: ExtMode) -> &'static str {
    match mode {
        ExtMode::Closed => "closed",
        ExtMode::Oracle => "oracle",
        ExtMode::Crosscheck => "crosscheck",
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn parse_matrix(value: &Located) -> Result<Vec<Vec<i64>>, CliError> {
    let mut rows = Vec::new();
    let mut offset = 0;
    for part in value.text.split(';') {
        let row = Located { line: value.line, col: value.col + offset, text: part };
        offset += part.len() + 1;
        let entries = row.tokens().iter().map(|t| t.number::<i64>()).collect::<Result<Vec<_>, _>>()?;
        if entries.is_empty() {
            return Err(row.err("empty matrix row"));
        }
        rows.push(entries);
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(value.err("matrix rows have different lengths"));
    }
    Ok(rows)
}

/// Cycle notation such as `(0 1 2)(3 4)`; `()` or an empty value is the
/// identity.
fn parse_cycles(value: &Located) -> Result<Vec<Vec<u32>>, CliError> {
    let mut cycles = Vec::new();
    let mut rest = value.text;
    let mut col = value.col;
    loop {
        let skipped = rest.len() - rest.trim_start().len();
        rest = rest.trim_start();
        col += skipped;
        if rest.is_empty() {
            return Ok(cycles);
        }
        let here = Located { line: value.line, col, text: rest };
        let body = rest.strip_prefix('(').ok_or_else(|| here.err("expected '(' to open a cycle"))?;
        let close = body.find(')').ok_or_else(|| here.err("unterminated cycle"))?;
        let inner = Located { line: value.line, col: col + 1, text: &body[..close] };
        let cycle = inner.tokens().iter().map(|t| t.number::<u32>()).collect::<Result<Vec<_>, _>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = &body[close + 1..];
        col += close + 2;
    }
}

fn cycles_to_images(cycles: &[Vec<u32>], degree: usize) -> Result<Vec<u32>, String> {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    let mut moved = vec![false; degree];
    for cycle in cycles {
        for (i, &x) in cycle.iter().enumerate() {
            let x = x as usize;
            if x >= degree {
                return Err(format!("point {x} is outside 0..{degree}"));
            }
            if moved[x] {
                return Err(format!("point {x} appears twice"));
            }
            moved[x] = true;
            images[x] = cycle[(i + 1) % cycle.len()];
        }
    }
    Ok(images)
}

fn images_to_cycles(images: &[u32]) -> String {
    let mut seen = vec![false; images.len()];
    let mut out = String::new();
    for start in 0..images.len() {
        if seen[start] || images[start] as usize == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = images[x] as usize;
        }
        let _ = write!(out, "({})", join(&cycle, " "));
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}
