//! Table files, construction and search configs, and property reports.
//!
//! A table file is
//!
//! ```text
//! # comment
//! loop 6 base=0 name=table1
//! 0 1 2 3 4 5
//! ...
//! ```
//!
//! The header line is optional. Symbols are shifted down by the header's
//! `base`, or by the least symbol when no base is given. Everything printed
//! back to the user is shifted up again, so witnesses read in the file's own
//! symbols.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constructions::{
    central_extension, middle_bol_from_left_bol, wedge_loop, Cocycle, CocycleSampler, ConstructionError,
    WedgeParams,
};
use crate::identity::{property_report, CheckResult};
use crate::property::Property;
use crate::search::SearchSpec;
use crate::table::{Element, LoopError, LoopTable};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error("cannot read {}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

fn syntax(line: usize, message: impl Into<String>) -> IoError {
    IoError::Syntax {
        line,
        message: message.into(),
    }
}

/// A parsed table together with how its symbols were written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableFile {
    pub name: Option<String>,
    /// Symbol of element 0.
    pub base: usize,
    pub table: LoopTable,
}

impl TableFile {
    pub fn new(table: LoopTable) -> Self {
        TableFile {
            name: None,
            base: 0,
            table,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn symbol(&self, e: Element) -> usize {
        e + self.base
    }

    /// The element written as `symbol`, if any.
    pub fn element(&self, symbol: usize) -> Option<Element> {
        symbol
            .checked_sub(self.base)
            .filter(|&e| e < self.table.order())
    }

    /// Serializes in the format [`parse_table`] reads, keeping the base.
    pub fn to_text(&self) -> String {
        let n = self.table.order();
        let mut out = format!("loop {n} base={}", self.base);
        if let Some(name) = &self.name {
            write!(out, " name={name}").unwrap();
        }
        out.push('\n');
        let width = self.symbol(n - 1).to_string().len();
        for x in self.table.elements() {
            let row: Vec<String> = self
                .table
                .row(x)
                .map(|v| format!("{:>width$}", self.symbol(v)))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Rewrites a witness into file symbols.
    pub fn witness_symbols(&self, r: &CheckResult) -> IndexMap<String, usize> {
        r.witness
            .iter()
            .flatten()
            .map(|(name, e)| (name.clone(), self.symbol(*e)))
            .collect()
    }
}

pub fn parse_table(text: &str) -> Result<TableFile, IoError> {
    let mut header: Option<(usize, usize)> = None;
    let mut name = None;
    let mut base = None;
    let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        if line.starts_with("loop") {
            if header.is_some() || !rows.is_empty() {
                return Err(syntax(lineno, "header must come before the table body"));
            }
            words.next();
            let order = words
                .next()
                .ok_or_else(|| syntax(lineno, "header needs the order"))?
                .parse::<usize>()
                .map_err(|e| syntax(lineno, format!("bad order: {e}")))?;
            for word in words {
                match word.split_once('=') {
                    Some(("base", v)) => {
                        base = Some(v.parse::<usize>().map_err(|e| syntax(lineno, format!("bad base: {e}")))?)
                    }
                    Some(("name", v)) if !v.is_empty() => name = Some(v.to_string()),
                    _ => return Err(syntax(lineno, format!("unknown header field {word:?}"))),
                }
            }
            header = Some((order, lineno));
            continue;
        }
        let row = words
            .map(|w| w.parse::<usize>().map_err(|_| syntax(lineno, format!("{w:?} is not a symbol"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((lineno, row));
    }
    if rows.is_empty() {
        return Err(syntax(text.lines().count().max(1), "no table rows"));
    }
    let order = match header {
        Some((order, lineno)) => {
            if order == 0 {
                return Err(syntax(lineno, "order must be positive"));
            }
            order
        }
        None => rows.len(),
    };
    for (lineno, row) in &rows {
        if row.len() != order {
            return Err(syntax(
                *lineno,
                format!("row has {} entries, expected {order}", row.len()),
            ));
        }
    }
    if rows.len() != order {
        let line = rows.last().map_or(1, |(l, _)| *l);
        return Err(syntax(line, format!("{} rows, expected {order}", rows.len())));
    }
    let least = rows.iter().flat_map(|(_, r)| r.iter().copied()).min().unwrap_or(0);
    let base = base.unwrap_or(least);
    let mut body = Vec::with_capacity(order);
    for (lineno, row) in &rows {
        let shifted = row
            .iter()
            .map(|&s| {
                s.checked_sub(base)
                    .ok_or_else(|| syntax(*lineno, format!("symbol {s} is below base {base}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        body.push(shifted);
    }
    Ok(TableFile {
        name,
        base,
        table: LoopTable::from_rows(&body)?,
    })
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_table(path: impl AsRef<Path>) -> Result<TableFile, IoError> {
    parse_table(&read_text(path.as_ref())?)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// SHA-256 of raw bytes, lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Digest of the table alone: the hash of its 0-based serialization without
/// a name, so it ignores comments, spacing, base and name.
pub fn table_digest(l: &LoopTable) -> String {
    sha256_hex(TableFile::new(l.clone()).to_text().as_bytes())
}

/// Properties reported beyond the identity catalog, in report order.
pub const REPORT_EXTRAS: &[&str] = &[
    "UF(FLEX)",
    "left-SUF(FLEX)",
    "right-SUF(FLEX)",
    "DIASSOC",
    "POWER-ASSOC",
    "STEPPING-UP",
    "RL-AUT",
    "SIMPLE",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub property: String,
    pub holds: bool,
    /// In file symbols.
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub witness: IndexMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub name: Option<String>,
    pub order: usize,
    pub base: usize,
    pub digest: String,
    pub properties: Vec<ReportEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl ReportDocument {
    /// Every catalog identity, the derived predicates, then [`REPORT_EXTRAS`].
    pub fn build(file: &TableFile, timing: bool) -> Self {
        let start = Instant::now();
        let mut checks: Vec<(String, CheckResult)> = property_report(&file.table).entries.into_iter().collect();
        for text in REPORT_EXTRAS {
            let p: Property = text.parse().expect("report properties parse");
            let r = p.check(&file.table).expect("report properties stay under the cost guard");
            checks.push((p.to_string(), r));
        }
        let properties = checks
            .into_iter()
            .map(|(property, r)| ReportEntry {
                property,
                holds: r.holds,
                witness: file.witness_symbols(&r),
                detail: r.detail,
            })
            .collect();
        ReportDocument {
            name: file.name.clone(),
            order: file.table.order(),
            base: file.base,
            digest: table_digest(&file.table),
            properties,
            seconds: timing.then(|| start.elapsed().as_secs_f64()),
        }
    }

    pub fn get(&self, property: &str) -> Option<&ReportEntry> {
        self.properties.iter().find(|e| e.property == property)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = self.name.as_deref().unwrap_or("(unnamed)");
        writeln!(out, "{name}: order {}, base {}, sha256 {}", self.order, self.base, self.digest).unwrap();
        let width = self.properties.iter().map(|e| e.property.len()).max().unwrap_or(0);
        for e in &self.properties {
            write!(out, "{:<width$}  {}", e.property, if e.holds { "holds" } else { "fails" }).unwrap();
            if !e.witness.is_empty() {
                out.push_str("  ");
                out.push_str(&format_witness(&e.witness));
            }
            if let Some(d) = &e.detail {
                write!(out, "  ({d})").unwrap();
            }
            out.push('\n');
        }
        if let Some(s) = self.seconds {
            writeln!(out, "elapsed {s:.3}s").unwrap();
        }
        out
    }
}

pub fn format_witness(w: &IndexMap<String, usize>) -> String {
    w.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

/// Resolves `cyclic:<n>` or a table file path relative to `dir`.
pub fn resolve_table(reference: &str, dir: &Path) -> Result<TableFile, IoError> {
    if let Some(n) = reference.strip_prefix("cyclic:") {
        let n: usize = n
            .parse()
            .map_err(|_| IoError::Config(format!("bad cyclic order in {reference:?}")))?;
        if n == 0 {
            return Err(IoError::Config("cyclic order must be positive".into()));
        }
        return Ok(TableFile::new(LoopTable::cyclic(n)).named(format!("Z{n}")));
    }
    load_table(dir.join(reference))
}

/// `base` and `fiber` are table references; `cocycle` rows are 0-based fiber
/// elements. With `seed` and no `cocycle`, a random normalized cocycle is
/// drawn; with neither, the cocycle is zero.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralExtConfig {
    pub base: String,
    pub fiber: String,
    pub cocycle: Option<Vec<Vec<usize>>>,
    pub seed: Option<u64>,
}

/// Missing fields fall back to [`WedgeParams::default_instance`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeConfig {
    pub p: Option<usize>,
    pub d: Option<usize>,
    pub ell: Option<Vec<usize>>,
    pub n: Option<Vec<Vec<usize>>>,
}

impl WedgeConfig {
    pub fn params(&self) -> WedgeParams {
        let def = WedgeParams::default_instance();
        WedgeParams {
            p: self.p.unwrap_or(def.p),
            d: self.d.unwrap_or(def.d),
            ell: self.ell.clone().unwrap_or(def.ell),
            n: self.n.clone().unwrap_or(def.n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiddleBolConfig {
    pub input: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionKind {
    CentralExt,
    Wedge,
    MiddleBol,
}

impl std::str::FromStr for ConstructionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "central-ext" => Ok(ConstructionKind::CentralExt),
            "wedge" => Ok(ConstructionKind::Wedge),
            "middle-bol" => Ok(ConstructionKind::MiddleBol),
            other => Err(format!("unknown construction {other:?}; expected central-ext, wedge or middle-bol")),
        }
    }
}

fn from_toml<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, IoError> {
    toml::from_str(text).map_err(|e| IoError::Config(e.to_string()))
}

/// Builds a construction from config text; table references resolve against `dir`.
pub fn build_construction(kind: ConstructionKind, text: &str, dir: &Path) -> Result<TableFile, IoError> {
    match kind {
        ConstructionKind::CentralExt => {
            let c: CentralExtConfig = from_toml(text)?;
            let base = resolve_table(&c.base, dir)?;
            let fiber = resolve_table(&c.fiber, dir)?;
            let (q, a) = (base.table, fiber.table);
            let cocycle = match (c.cocycle, c.seed) {
                (Some(_), Some(_)) => return Err(IoError::Config("give either cocycle or seed, not both".into())),
                (Some(rows), None) => Cocycle::new(q, a, rows.into_iter().flatten().collect())?,
                (None, Some(seed)) => CocycleSampler::new(q, a, seed)?.next().expect("endless"),
                (None, None) => Cocycle::zero(q, a)?,
            };
            Ok(TableFile::new(central_extension(&cocycle)).named("central-ext"))
        }
        ConstructionKind::Wedge => {
            let c: WedgeConfig = from_toml(text)?;
            Ok(TableFile::new(wedge_loop(&c.params())?).named("wedge"))
        }
        ConstructionKind::MiddleBol => {
            let c: MiddleBolConfig = from_toml(text)?;
            let input = resolve_table(&c.input, dir)?;
            let table = middle_bol_from_left_bol(&input.table)?;
            Ok(TableFile {
                name: Some("middle-bol".into()),
                base: input.base,
                table,
            })
        }
    }
}

pub fn parse_search_spec(text: &str) -> Result<SearchSpec, IoError> {
    from_toml(text)
}

pub fn search_spec_to_toml(spec: &SearchSpec) -> String {
    toml::to_string(spec).expect("search specs serialize")
}
