//! Project bundles: a flat set of data-module files plus `manifest.json`,
//! stored as a directory or a zip archive.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Cursor, Read, Write};
use std::path::{Path, PathBuf};

use catsd_core::sdfunc::{format_sd_rows, parse_sd_rows, DomainKind};
use catsd_core::{
    validate_model, validate_performances, Action, CategoryId, CategoryModel, Criterion, CriterionId, DecisionModel,
    Direction, FunctionId, InteractionCoefficient, InteractionKind, IssueCode, PerformanceTable, ReferenceAction,
    Scale, SdFunction, ValidationReport,
};
use serde::{Deserialize, Serialize};

use crate::table::{Cell, Format, Record, Sheet, Table};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    Criteria,
    Actions,
    Performance,
    ReferenceActions,
    SdFunctions,
    Weights,
    Interactions,
    Thresholds,
}

impl Module {
    pub const ALL: [Module; 8] = [
        Module::Criteria,
        Module::Actions,
        Module::Performance,
        Module::ReferenceActions,
        Module::SdFunctions,
        Module::Weights,
        Module::Interactions,
        Module::Thresholds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Module::Criteria => "criteria",
            Module::Actions => "actions",
            Module::Performance => "performance",
            Module::ReferenceActions => "reference_actions",
            Module::SdFunctions => "sd_functions",
            Module::Weights => "weights",
            Module::Interactions => "interactions",
            Module::Thresholds => "thresholds",
        }
    }

    pub fn from_name(name: &str) -> Option<Module> {
        Module::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Modules that may be left out; they read as empty.
    pub fn optional(self) -> bool {
        matches!(self, Module::Actions | Module::Performance | Module::Interactions)
    }

    pub fn file_name(self, format: Format) -> String {
        format!("{}.{}", self.name(), format.extension())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub modules: BTreeMap<Module, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dummy_category_name: Option<String>,
}

/// Raw bundle contents keyed by relative path (`/`-separated), manifest excluded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bundle {
    pub manifest: Option<Manifest>,
    pub files: BTreeMap<String, Vec<u8>>,
}

/// Everything a classification run needs.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub model: DecisionModel,
    pub actions: Vec<Action>,
    pub performances: PerformanceTable,
}

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Archive { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> BundleError + '_ {
    move |source| BundleError::Io {
        path: path.to_owned(),
        source,
    }
}

impl Bundle {
    /// The manifest in force: the stored one, or one built from the fixed file names present.
    pub fn effective_manifest(&self) -> Manifest {
        if let Some(m) = &self.manifest {
            return m.clone();
        }
        let mut modules = BTreeMap::new();
        for m in Module::ALL {
            for format in [Format::Csv, Format::Json] {
                let name = m.file_name(format);
                if self.files.contains_key(&name) {
                    modules.insert(m, name);
                    break;
                }
            }
        }
        Manifest {
            format_version: FORMAT_VERSION,
            modules,
            dummy_category_name: None,
        }
    }

    /// Files the manifest does not reference.
    pub fn extras(&self) -> BTreeMap<String, Vec<u8>> {
        let referenced: BTreeSet<String> = self.effective_manifest().modules.into_values().collect();
        self.files
            .iter()
            .filter(|(k, _)| !referenced.contains(*k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn read(path: &Path) -> Result<Bundle, BundleError> {
        if path.is_dir() {
            Bundle::read_dir(path)
        } else {
            let bytes = fs::read(path).map_err(io_err(path))?;
            Bundle::from_zip(&bytes).map_err(|message| BundleError::Archive {
                path: path.to_owned(),
                message,
            })
        }
    }

    pub fn read_dir(root: &Path) -> Result<Bundle, BundleError> {
        fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) -> Result<(), BundleError> {
            for entry in fs::read_dir(dir).map_err(io_err(dir))? {
                let entry = entry.map_err(io_err(dir))?;
                let path = entry.path();
                if path.is_dir() {
                    walk(root, &path, out)?;
                } else {
                    let rel = path.strip_prefix(root).expect("inside root");
                    let key = rel
                        .components()
                        .map(|c| c.as_os_str().to_string_lossy())
                        .collect::<Vec<_>>()
                        .join("/");
                    out.insert(key, fs::read(&path).map_err(io_err(&path))?);
                }
            }
            Ok(())
        }
        let mut files = BTreeMap::new();
        walk(root, root, &mut files)?;
        Bundle::from_files(files).map_err(|message| BundleError::Archive {
            path: root.to_owned(),
            message,
        })
    }

    pub fn from_zip(bytes: &[u8]) -> Result<Bundle, String> {
        let mut archive = zip::ZipArchive::new(Cursor::new(bytes)).map_err(|e| e.to_string())?;
        let mut files = BTreeMap::new();
        for i in 0..archive.len() {
            let mut f = archive.by_index(i).map_err(|e| e.to_string())?;
            if f.is_dir() {
                continue;
            }
            let Some(name) = f.enclosed_name() else {
                return Err(format!("unsafe path `{}` in archive", f.name()));
            };
            let key = name
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            let mut data = Vec::new();
            f.read_to_end(&mut data).map_err(|e| e.to_string())?;
            files.insert(key, data);
        }
        Bundle::from_files(files)
    }

    fn from_files(mut files: BTreeMap<String, Vec<u8>>) -> Result<Bundle, String> {
        let manifest = match files.remove(MANIFEST) {
            None => None,
            Some(bytes) => Some(serde_json::from_slice(&bytes).map_err(|e| format!("{MANIFEST}: {e}"))?),
        };
        Ok(Bundle { manifest, files })
    }

    fn all_files(&self) -> BTreeMap<String, Vec<u8>> {
        let mut files = self.files.clone();
        let mut manifest = serde_json::to_vec_pretty(&self.effective_manifest()).expect("serializable");
        manifest.push(b'\n');
        files.insert(MANIFEST.into(), manifest);
        files
    }

    /// Deterministic archive: sorted entries, fixed timestamps and permissions.
    pub fn to_zip(&self) -> Vec<u8> {
        let mut w = zip::ZipWriter::new(Cursor::new(Vec::new()));
        let options = zip::write::SimpleFileOptions::default()
            .compression_method(zip::CompressionMethod::Deflated)
            .last_modified_time(zip::DateTime::default())
            .unix_permissions(0o644);
        for (name, data) in self.all_files() {
            w.start_file(name, options).expect("in-memory archive");
            w.write_all(&data).expect("in-memory archive");
        }
        w.finish().expect("in-memory archive").into_inner()
    }

    /// Writes a zip when `path` ends in `.zip`, otherwise a directory.
    pub fn write(&self, path: &Path) -> Result<(), BundleError> {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("zip")) {
            return write_atomic(path, &self.to_zip());
        }
        for (name, data) in self.all_files() {
            write_atomic(&path.join(name), &data)?;
        }
        Ok(())
    }
}

/// Write-temp-then-rename in the target's directory.
pub fn write_atomic(path: &Path, data: &[u8]) -> Result<(), BundleError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(data).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| BundleError::Io {
        path: path.to_owned(),
        source: e.error,
    })?;
    Ok(())
}

/// Reads and fully validates a bundle.
pub fn decode(bundle: &Bundle) -> Result<Dataset, ValidationReport> {
    let (dataset, mut report) = decode_unvalidated(bundle);
    let dataset = match dataset {
        Some(d) if report.is_ok() => d,
        _ => return Err(report),
    };
    report.extend(validate_model(&dataset.model));
    report.extend(validate_performances(
        &dataset.model,
        &dataset.actions,
        &dataset.performances,
    ));
    if report.is_ok() {
        Ok(dataset)
    } else {
        Err(report)
    }
}

/// Parses every module, reading absent ones as empty; the dataset is `None` when a file does not parse.
pub fn decode_unvalidated(bundle: &Bundle) -> (Option<Dataset>, ValidationReport) {
    let mut report = ValidationReport::default();
    let manifest = bundle.effective_manifest();
    if manifest.format_version != FORMAT_VERSION {
        report.push(
            IssueCode::UnsupportedFormat,
            MANIFEST,
            format!(
                "format version {} is not supported (expected {FORMAT_VERSION})",
                manifest.format_version
            ),
        );
        return (None, report);
    }
    let mut tables: BTreeMap<Module, Table> = BTreeMap::new();
    let mut missing = ValidationReport::default();
    for m in Module::ALL {
        let Some(file) = manifest.modules.get(&m) else {
            if !m.optional() {
                missing.push(
                    IssueCode::MissingModule,
                    m.name(),
                    format!("the bundle has no `{}` module", m.name()),
                );
            }
            continue;
        };
        let Some(bytes) = bundle.files.get(file) else {
            report.push(
                IssueCode::MissingModule,
                MANIFEST,
                format!("manifest lists `{file}`, which is not in the bundle"),
            );
            continue;
        };
        let Some(format) = Format::from_path(file) else {
            report.push(
                IssueCode::UnsupportedFormat,
                file.as_str(),
                "expected a .csv or .json file",
            );
            continue;
        };
        match Table::parse(file, format, bytes) {
            Ok(t) => {
                tables.insert(m, t);
            }
            Err(r) => report.extend(r),
        }
    }
    if !report.is_ok() {
        report.extend(missing);
        return (None, report);
    }
    report.extend(missing);
    let dummy = manifest
        .dummy_category_name
        .unwrap_or_else(|| catsd_core::model::DEFAULT_DUMMY_NAME.into());
    let dataset = Decoder::new(&mut report).run(&tables, dummy);
    (dataset, report)
}

struct Decoder<'r> {
    report: &'r mut ValidationReport,
}

fn parse_direction(s: &str) -> Option<Direction> {
    match s.to_ascii_lowercase().as_str() {
        "maximize" | "max" => Some(Direction::Maximize),
        "minimize" | "min" => Some(Direction::Minimize),
        _ => None,
    }
}

fn parse_kind(s: &str) -> Option<InteractionKind> {
    match s.to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
        "mutual_strengthening" | "strengthening" => Some(InteractionKind::MutualStrengthening),
        "mutual_weakening" | "weakening" => Some(InteractionKind::MutualWeakening),
        "antagonistic" | "antagonism" => Some(InteractionKind::Antagonistic),
        _ => None,
    }
}

fn parse_domain(s: &str) -> Option<DomainKind> {
    match s.to_ascii_lowercase().as_str() {
        "cardinal" => Some(DomainKind::Cardinal),
        "ordinal" => Some(DomainKind::Ordinal),
        _ => None,
    }
}

impl<'r> Decoder<'r> {
    fn new(report: &'r mut ValidationReport) -> Self {
        Decoder { report }
    }

    fn bad(&mut self, rec: &Record<'_>, message: String) {
        self.report.push(IssueCode::BadValue, rec.location(), message);
    }

    fn unknown(&mut self, location: String, message: String) {
        self.report.push(IssueCode::UnknownReference, location, message);
    }

    fn run(mut self, tables: &BTreeMap<Module, Table>, dummy: String) -> Option<Dataset> {
        let empty = |m: Module| Table {
            file: m.file_name(Format::Csv),
            headers: Vec::new(),
            rows: Vec::new(),
        };
        let get = |m: Module| tables.get(&m).cloned().unwrap_or_else(|| empty(m));

        let functions = self.functions(&get(Module::SdFunctions));
        let (criteria, bound) = self.criteria(&get(Module::Criteria), &functions);
        let criterion_ids: Vec<CriterionId> = criteria.iter().map(|c| c.id.clone()).collect();

        let mut categories = self.categories(&get(Module::Thresholds));
        self.weights(&get(Module::Weights), &criterion_ids, &mut categories);
        self.references(&get(Module::ReferenceActions), &criteria, &mut categories);
        self.interactions(&get(Module::Interactions), &criterion_ids, &mut categories);

        let actions = self.actions(&get(Module::Actions));
        let performances = self.performances(&get(Module::Performance), &criteria, &actions);

        let mut bindings = BTreeMap::new();
        for (c, f) in criteria.iter().zip(bound) {
            let f = f.or_else(|| {
                let same: FunctionId = c.id.as_str().into();
                functions.iter().any(|g| g.id() == &same).then_some(same)
            });
            if let Some(f) = f {
                bindings.insert(c.id.clone(), f);
            }
        }
        let model = DecisionModel {
            criteria,
            sd_functions: functions,
            bindings,
            categories: {
                let mut v: Vec<(usize, CategoryModel)> = categories.into_values().collect();
                v.sort_by_key(|(i, _)| *i);
                v.into_iter().map(|(_, c)| c).collect()
            },
            dummy_category_name: dummy,
        };
        Some(Dataset {
            model,
            actions,
            performances,
        })
    }

    fn functions(&mut self, t: &Table) -> Vec<SdFunction> {
        if t.headers.is_empty() || !t.require(&["function", "condition", "value"], self.report) {
            return Vec::new();
        }
        let mut order: Vec<String> = Vec::new();
        let mut groups: BTreeMap<String, Vec<Record<'_>>> = BTreeMap::new();
        for rec in t.records() {
            let Some(id) = rec.text("function", self.report) else {
                continue;
            };
            if !groups.contains_key(id) {
                order.push(id.to_owned());
            }
            groups.entry(id.to_owned()).or_default().push(rec);
        }
        let mut out = Vec::new();
        for id in order {
            let recs = &groups[&id];
            let mut domain = None;
            for rec in recs {
                if let Some(d) = rec.opt("domain") {
                    match parse_domain(d) {
                        Some(d) => domain = Some(d),
                        None => self.bad(rec, format!("domain must be `cardinal` or `ordinal`, got `{d}`")),
                    }
                }
            }
            let rows: Vec<(&str, &str)> = recs
                .iter()
                .map(|r| (r.opt("condition").unwrap_or(""), r.opt("value").unwrap_or("")))
                .collect();
            match parse_sd_rows(id.as_str(), domain, &rows) {
                Ok(f) => out.push(f),
                Err(e) => {
                    let line = match &e {
                        catsd_core::SdError::Parse { row, .. } => recs.get(*row).map_or(recs[0].line(), |r| r.line()),
                        _ => recs[0].line(),
                    };
                    self.report.push(
                        IssueCode::BadValue,
                        format!("{}:{line}", t.file),
                        format!("function `{id}`: {e} ({})", e.code()),
                    );
                }
            }
        }
        out
    }

    fn criteria(&mut self, t: &Table, functions: &[SdFunction]) -> (Vec<Criterion>, Vec<Option<FunctionId>>) {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        if t.headers.is_empty() || !t.require(&["id", "direction", "scale_type"], self.report) {
            return (out, bound);
        }
        for rec in t.records() {
            let Some(id) = rec.text("id", self.report) else {
                continue;
            };
            let Some(dir_text) = rec.text("direction", self.report) else {
                continue;
            };
            let Some(direction) = parse_direction(dir_text) else {
                self.bad(
                    &rec,
                    format!("direction must be `maximize` or `minimize`, got `{dir_text}`"),
                );
                continue;
            };
            let Some(kind) = rec.text("scale_type", self.report) else {
                continue;
            };
            let scale = match kind.to_ascii_lowercase().as_str() {
                "cardinal" => {
                    let (min, max) = (rec.number("min", self.report), rec.number("max", self.report));
                    let (Some(min), Some(max)) = (min, max) else { continue };
                    Scale::Cardinal { min, max }
                }
                "ordinal" => {
                    let Some(n) = rec.number("num_levels", self.report) else {
                        continue;
                    };
                    if n.fract() != 0.0 || n < 0.0 || n > f64::from(u32::MAX) {
                        self.bad(&rec, format!("num_levels must be a whole number, got {n}"));
                        continue;
                    }
                    Scale::Ordinal { levels: n as u32 }
                }
                other => {
                    self.bad(
                        &rec,
                        format!("scale_type must be `cardinal` or `ordinal`, got `{other}`"),
                    );
                    continue;
                }
            };
            let f = rec.opt("sd_function").map(FunctionId::from);
            if let Some(f) = &f {
                if !functions.iter().any(|g| g.id() == f) {
                    self.unknown(rec.location(), format!("SD function `{f}` is not defined"));
                }
            }
            out.push(Criterion {
                name: rec.opt("name").unwrap_or(id).to_owned(),
                description: rec.opt("description").map(str::to_owned),
                ..Criterion::new(id, direction, scale)
            });
            bound.push(f);
        }
        (out, bound)
    }

    /// Categories in declaration order, keyed by id.
    fn categories(&mut self, t: &Table) -> BTreeMap<CategoryId, (usize, CategoryModel)> {
        let mut out: Vec<CategoryModel> = Vec::new();
        if !t.headers.is_empty() && t.require(&["category", "value"], self.report) {
            for rec in t.records() {
                let Some(id) = rec.text("category", self.report) else {
                    continue;
                };
                let Some(lambda) = rec.number("value", self.report) else {
                    continue;
                };
                out.push(CategoryModel {
                    id: id.into(),
                    name: rec.opt("category_name").unwrap_or(id).to_owned(),
                    reference_actions: Vec::new(),
                    weights: BTreeMap::new(),
                    interactions: Vec::new(),
                    likeness_threshold: lambda,
                });
            }
        }
        // Keeping duplicates lets validation report them.
        let mut map = BTreeMap::new();
        for (i, c) in out.into_iter().enumerate() {
            let key = if map.contains_key(&c.id) {
                format!("{}#{i}", c.id).into()
            } else {
                c.id.clone()
            };
            map.insert(key, (i, c));
        }
        map
    }

    fn criterion_columns(&mut self, t: &Table, known: &[&str], criteria: &[CriterionId]) -> Vec<(usize, CriterionId)> {
        let mut out = Vec::new();
        for (i, h) in t.extra_columns(known) {
            match criteria.iter().find(|c| c.as_str() == h) {
                Some(c) => out.push((i, c.clone())),
                None => self.unknown(format!("{}:1", t.file), format!("column `{h}` is not a criterion")),
            }
        }
        out
    }

    fn category<'m>(
        &mut self,
        rec: &Record<'_>,
        categories: &'m mut BTreeMap<CategoryId, (usize, CategoryModel)>,
    ) -> Option<&'m mut CategoryModel> {
        let id = rec.text("category", self.report)?;
        match categories.get_mut(id) {
            Some((_, c)) => Some(c),
            None => {
                self.unknown(
                    rec.location(),
                    format!("category `{id}` is not declared in the thresholds module"),
                );
                None
            }
        }
    }

    fn weights(
        &mut self,
        t: &Table,
        criteria: &[CriterionId],
        categories: &mut BTreeMap<CategoryId, (usize, CategoryModel)>,
    ) {
        if t.headers.is_empty() || !t.require(&["category"], self.report) {
            return;
        }
        let columns = self.criterion_columns(t, &["category"], criteria);
        let mut seen = BTreeSet::new();
        for rec in t.records() {
            let values: Vec<(CriterionId, f64)> = columns
                .iter()
                .filter(|(i, _)| !rec.cell(*i).trim().is_empty())
                .filter_map(|(i, c)| rec.number_at(*i, self.report).map(|v| (c.clone(), v)))
                .collect();
            let Some(cat) = self.category(&rec, categories) else {
                continue;
            };
            if !seen.insert(cat.id.clone()) {
                let id = cat.id.clone();
                self.bad(&rec, format!("category `{id}` has a second weights row"));
                continue;
            }
            cat.weights.extend(values);
        }
    }

    fn scaled_row(
        &mut self,
        rec: &Record<'_>,
        columns: &[(usize, CriterionId)],
        criteria: &[Criterion],
    ) -> BTreeMap<CriterionId, f64> {
        let mut row = BTreeMap::new();
        for (i, c) in columns {
            if rec.cell(*i).trim().is_empty() {
                continue;
            }
            let Some(v) = rec.number_at(*i, self.report) else {
                continue;
            };
            let scale = criteria
                .iter()
                .find(|x| &x.id == c)
                .expect("column resolved to a criterion")
                .scale;
            if !scale.contains(v) {
                self.bad(rec, format!("{v} on `{c}` is outside its scale {scale}"));
                continue;
            }
            row.insert(c.clone(), v);
        }
        row
    }

    fn references(
        &mut self,
        t: &Table,
        criteria: &[Criterion],
        categories: &mut BTreeMap<CategoryId, (usize, CategoryModel)>,
    ) {
        if t.headers.is_empty() || !t.require(&["category", "id"], self.report) {
            return;
        }
        let ids: Vec<CriterionId> = criteria.iter().map(|c| c.id.clone()).collect();
        let columns = self.criterion_columns(t, &["category", "id"], &ids);
        for rec in t.records() {
            let row = self.scaled_row(&rec, &columns, criteria);
            let Some(id) = rec.text("id", self.report) else {
                continue;
            };
            let Some(cat) = self.category(&rec, categories) else {
                continue;
            };
            cat.reference_actions.push(ReferenceAction {
                id: id.into(),
                performances: row,
            });
        }
    }

    fn interactions(
        &mut self,
        t: &Table,
        criteria: &[CriterionId],
        categories: &mut BTreeMap<CategoryId, (usize, CategoryModel)>,
    ) {
        if t.headers.is_empty() || !t.require(&["category", "criterion1", "criterion2", "type", "value"], self.report) {
            return;
        }
        for rec in t.records() {
            let (Some(a), Some(b), Some(kind), Some(value)) = (
                rec.text("criterion1", self.report),
                rec.text("criterion2", self.report),
                rec.text("type", self.report),
                rec.number("value", self.report),
            ) else {
                continue;
            };
            let Some(kind_v) = parse_kind(kind) else {
                self.bad(
                    &rec,
                    format!("type must be mutual_strengthening, mutual_weakening or antagonistic, got `{kind}`"),
                );
                continue;
            };
            let mut ok = true;
            for c in [a, b] {
                if !criteria.iter().any(|x| x.as_str() == c) {
                    self.unknown(rec.location(), format!("criterion `{c}` is not defined"));
                    ok = false;
                }
            }
            let Some(cat) = self.category(&rec, categories) else {
                continue;
            };
            if ok {
                cat.interactions.push(InteractionCoefficient::new(kind_v, a, b, value));
            }
        }
    }

    fn actions(&mut self, t: &Table) -> Vec<Action> {
        if t.headers.is_empty() || !t.require(&["id"], self.report) {
            return Vec::new();
        }
        t.records()
            .filter_map(|rec| {
                let id = rec.text("id", self.report)?;
                Some(Action {
                    name: rec.opt("name").unwrap_or(id).to_owned(),
                    description: rec.opt("description").map(str::to_owned),
                    ..Action::new(id)
                })
            })
            .collect()
    }

    fn performances(&mut self, t: &Table, criteria: &[Criterion], actions: &[Action]) -> PerformanceTable {
        let mut table = PerformanceTable::default();
        if t.headers.is_empty() || !t.require(&["action"], self.report) {
            return table;
        }
        let ids: Vec<CriterionId> = criteria.iter().map(|c| c.id.clone()).collect();
        let columns = self.criterion_columns(t, &["action"], &ids);
        for rec in t.records() {
            let row = self.scaled_row(&rec, &columns, criteria);
            let Some(id) = rec.text("action", self.report) else {
                continue;
            };
            if !actions.iter().any(|a| a.id.as_str() == id) {
                self.unknown(
                    rec.location(),
                    format!("action `{id}` is not declared in the actions module"),
                );
                continue;
            }
            if table.rows.contains_key(id) {
                self.bad(&rec, format!("action `{id}` has a second performance row"));
                continue;
            }
            table.rows.insert(id.into(), row);
        }
        table
    }
}

/// Canonical files for a dataset; `extras` are carried over unchanged.
pub fn encode(data: &Dataset, format: Format, extras: &BTreeMap<String, Vec<u8>>) -> Bundle {
    let sheets = sheets(data);
    let mut files = extras.clone();
    let mut modules = BTreeMap::new();
    for (m, sheet) in sheets {
        let name = m.file_name(format);
        files.insert(name.clone(), sheet.render(format));
        modules.insert(m, name);
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        modules,
        dummy_category_name: Some(data.model.dummy_category_name.clone()),
    };
    Bundle {
        manifest: Some(manifest),
        files,
    }
}

fn num(v: Option<f64>) -> Cell {
    v.map_or(Cell::Empty, Cell::Number)
}

/// One sheet per module, in canonical column order.
pub fn sheets(data: &Dataset) -> Vec<(Module, Sheet)> {
    let model = &data.model;
    let ids: Vec<&str> = model.criteria.iter().map(|c| c.id.as_str()).collect();

    let mut criteria = Sheet::new([
        "id",
        "name",
        "description",
        "direction",
        "scale_type",
        "min",
        "max",
        "num_levels",
        "sd_function",
    ]);
    for c in &model.criteria {
        let (kind, min, max, levels) = match c.scale {
            Scale::Cardinal { min, max } => ("cardinal", Some(min), Some(max), None),
            Scale::Ordinal { levels } => ("ordinal", None, None, Some(f64::from(levels))),
        };
        let direction = match c.direction {
            Direction::Maximize => "maximize",
            Direction::Minimize => "minimize",
        };
        criteria.push(vec![
            c.id.as_str().into(),
            c.name.clone().into(),
            c.description.clone().into(),
            direction.into(),
            kind.into(),
            num(min),
            num(max),
            num(levels),
            model.bindings.get(&c.id).map(|f| f.to_string()).into(),
        ]);
    }

    let mut actions = Sheet::new(["id", "name", "description"]);
    for a in &data.actions {
        actions.push(vec![
            a.id.as_str().into(),
            a.name.clone().into(),
            a.description.clone().into(),
        ]);
    }

    let mut performance = Sheet::new(std::iter::once("action").chain(ids.iter().copied()));
    for a in &data.actions {
        let Some(row) = data.performances.rows.get(&a.id) else {
            continue;
        };
        let mut cells = vec![Cell::from(a.id.as_str())];
        cells.extend(model.criteria.iter().map(|c| num(row.get(&c.id).copied())));
        performance.push(cells);
    }

    let mut references = Sheet::new(["category", "id"].into_iter().chain(ids.iter().copied()));
    let mut weights = Sheet::new(std::iter::once("category").chain(ids.iter().copied()));
    let mut interactions = Sheet::new(["category", "criterion1", "criterion2", "type", "value"]);
    let mut thresholds = Sheet::new(["category", "category_name", "value"]);
    for cat in &model.categories {
        for r in &cat.reference_actions {
            let mut cells = vec![Cell::from(cat.id.as_str()), r.id.as_str().into()];
            cells.extend(model.criteria.iter().map(|c| num(r.performances.get(&c.id).copied())));
            references.push(cells);
        }
        let mut cells = vec![Cell::from(cat.id.as_str())];
        cells.extend(model.criteria.iter().map(|c| num(cat.weights.get(&c.id).copied())));
        weights.push(cells);
        for k in &cat.interactions {
            interactions.push(vec![
                cat.id.as_str().into(),
                k.first.as_str().into(),
                k.second.as_str().into(),
                k.kind.as_str().into(),
                k.value.into(),
            ]);
        }
        thresholds.push(vec![
            cat.id.as_str().into(),
            cat.name.clone().into(),
            cat.likeness_threshold.into(),
        ]);
    }

    let mut functions = Sheet::new(["function", "domain", "condition", "value"]);
    for f in &model.sd_functions {
        let domain = match f.domain() {
            DomainKind::Cardinal => "cardinal",
            DomainKind::Ordinal => "ordinal",
        };
        for (condition, value) in format_sd_rows(f) {
            functions.push(vec![
                f.id().as_str().into(),
                domain.into(),
                condition.into(),
                value.into(),
            ]);
        }
    }

    vec![
        (Module::Criteria, criteria),
        (Module::Actions, actions),
        (Module::Performance, performance),
        (Module::ReferenceActions, references),
        (Module::SdFunctions, functions),
        (Module::Weights, weights),
        (Module::Interactions, interactions),
        (Module::Thresholds, thresholds),
    ]
}
