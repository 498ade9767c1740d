//! Criteria, categories and the decision model, with cross-field validation.
//!
//! Differences are always oriented so that "better than the reference" is
//! positive: for a [`Direction::Minimize`] criterion `Δ = g(b) − g(a)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::ids::{ActionId, CategoryId, CriterionId, FunctionId};
use crate::sdfunc::{DomainKind, SdFunction};
use crate::TOLERANCE;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Scale {
    Cardinal {
        min: f64,
        max: f64,
    },
    /// Levels are the integers `1..=levels`.
    Ordinal {
        levels: u32,
    },
}

impl Scale {
    /// Largest reachable `|Δ|`.
    pub fn span(&self) -> f64 {
        match *self {
            Scale::Cardinal { min, max } => max - min,
            Scale::Ordinal { levels } => f64::from(levels.saturating_sub(1)),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        match *self {
            Scale::Cardinal { min, max } => value >= min && value <= max,
            Scale::Ordinal { levels } => libm::trunc(value) == value && value >= 1.0 && value <= f64::from(levels),
        }
    }

    pub fn domain(&self) -> DomainKind {
        match self {
            Scale::Cardinal { .. } => DomainKind::Cardinal,
            Scale::Ordinal { .. } => DomainKind::Ordinal,
        }
    }

    fn check(&self) -> Option<String> {
        match *self {
            Scale::Cardinal { min, max } if !(min.is_finite() && max.is_finite() && min < max) => {
                Some(format!("cardinal scale needs finite min < max (got [{min}, {max}])"))
            }
            Scale::Ordinal { levels } if levels < 2 => {
                Some(format!("ordinal scale needs at least 2 levels (got {levels})"))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Scale::Cardinal { min, max } => write!(f, "[{min}, {max}]"),
            Scale::Ordinal { levels } => write!(f, "1..{levels}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: CriterionId,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub direction: Direction,
    pub scale: Scale,
}

impl Criterion {
    pub fn new(id: impl Into<CriterionId>, direction: Direction, scale: Scale) -> Self {
        let id = id.into();
        Criterion {
            name: id.to_string(),
            id,
            description: None,
            direction,
            scale,
        }
    }

    /// `Δ(a, b)`, flipped for minimized criteria.
    pub fn delta(&self, a: f64, b: f64) -> f64 {
        match self.direction {
            Direction::Maximize => a - b,
            Direction::Minimize => b - a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub id: ActionId,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl Action {
    pub fn new(id: impl Into<ActionId>) -> Self {
        let id = id.into();
        Action {
            name: id.to_string(),
            id,
            description: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PerformanceTable {
    pub rows: BTreeMap<ActionId, BTreeMap<CriterionId, f64>>,
}

impl PerformanceTable {
    pub fn get(&self, action: &ActionId, criterion: &CriterionId) -> Option<f64> {
        self.rows.get(action)?.get(criterion).copied()
    }

    pub fn insert(&mut self, action: impl Into<ActionId>, criterion: impl Into<CriterionId>, value: f64) {
        self.rows
            .entry(action.into())
            .or_default()
            .insert(criterion.into(), value);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    MutualStrengthening,
    MutualWeakening,
    /// `first` similar while `second` dissimilar.
    Antagonistic,
}

impl InteractionKind {
    pub fn is_mutual(self) -> bool {
        !matches!(self, InteractionKind::Antagonistic)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InteractionKind::MutualStrengthening => "mutual_strengthening",
            InteractionKind::MutualWeakening => "mutual_weakening",
            InteractionKind::Antagonistic => "antagonistic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionCoefficient {
    pub kind: InteractionKind,
    pub first: CriterionId,
    pub second: CriterionId,
    pub value: f64,
}

impl InteractionCoefficient {
    pub fn new(
        kind: InteractionKind,
        first: impl Into<CriterionId>,
        second: impl Into<CriterionId>,
        value: f64,
    ) -> Self {
        InteractionCoefficient {
            kind,
            first: first.into(),
            second: second.into(),
            value,
        }
    }

    fn involves(&self, a: &CriterionId, b: &CriterionId) -> bool {
        (&self.first == a && &self.second == b) || (&self.first == b && &self.second == a)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceAction {
    pub id: ActionId,
    pub performances: BTreeMap<CriterionId, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryModel {
    pub id: CategoryId,
    pub name: String,
    pub reference_actions: Vec<ReferenceAction>,
    /// Non-normalized; the similarity normalizer rescales them.
    pub weights: BTreeMap<CriterionId, f64>,
    #[serde(default)]
    pub interactions: Vec<InteractionCoefficient>,
    pub likeness_threshold: f64,
}

impl CategoryModel {
    /// `k_jℓ = k_ℓj`.
    pub fn mutual_coefficient(&self, a: &CriterionId, b: &CriterionId) -> Option<f64> {
        self.interactions
            .iter()
            .find(|c| c.kind.is_mutual() && c.involves(a, b))
            .map(|c| c.value)
    }

    /// `k_j|p`, order-sensitive.
    pub fn antagonistic_coefficient(&self, first: &CriterionId, second: &CriterionId) -> Option<f64> {
        self.interactions
            .iter()
            .find(|c| c.kind == InteractionKind::Antagonistic && &c.first == first && &c.second == second)
            .map(|c| c.value)
    }
}

pub const DEFAULT_DUMMY_NAME: &str = "Non-assigned";

fn default_dummy() -> String {
    DEFAULT_DUMMY_NAME.into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionModel {
    pub criteria: Vec<Criterion>,
    pub sd_functions: Vec<SdFunction>,
    /// Criterion → function; one function may serve several criteria.
    pub bindings: BTreeMap<CriterionId, FunctionId>,
    pub categories: Vec<CategoryModel>,
    #[serde(default = "default_dummy")]
    pub dummy_category_name: String,
}

impl DecisionModel {
    pub fn criterion(&self, id: &CriterionId) -> Option<&Criterion> {
        self.criteria.iter().find(|c| &c.id == id)
    }

    pub fn sd_function(&self, id: &FunctionId) -> Option<&SdFunction> {
        self.sd_functions.iter().find(|f| f.id() == id)
    }

    pub fn function_for(&self, criterion: &CriterionId) -> Option<&SdFunction> {
        self.sd_function(self.bindings.get(criterion)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    NoCriteria,
    DuplicateId,
    InvalidScale,
    UnknownCriterion,
    UnknownAction,
    MissingSdFunction,
    UnknownSdFunction,
    SdDomainMismatch,
    CoverageGap,
    NoCategories,
    EmptyReferenceActions,
    MissingPerformance,
    PerformanceOutOfScale,
    MissingWeight,
    NonPositiveWeight,
    InvalidInteraction,
    ConflictingInteraction,
    ThresholdOutOfRange,
    NonNegativityViolation,
    MissingColumn,
    BadValue,
    UnknownReference,
    MissingModule,
    UnsupportedFormat,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::NoCriteria => "NO_CRITERIA",
            IssueCode::DuplicateId => "DUPLICATE_ID",
            IssueCode::InvalidScale => "INVALID_SCALE",
            IssueCode::UnknownCriterion => "UNKNOWN_CRITERION",
            IssueCode::UnknownAction => "UNKNOWN_ACTION",
            IssueCode::MissingSdFunction => "MISSING_SD_FUNCTION",
            IssueCode::UnknownSdFunction => "UNKNOWN_SD_FUNCTION",
            IssueCode::SdDomainMismatch => "SD_DOMAIN_MISMATCH",
            IssueCode::CoverageGap => "COVERAGE_GAP",
            IssueCode::NoCategories => "NO_CATEGORIES",
            IssueCode::EmptyReferenceActions => "EMPTY_REFERENCE_ACTIONS",
            IssueCode::MissingPerformance => "MISSING_PERFORMANCE",
            IssueCode::PerformanceOutOfScale => "PERFORMANCE_OUT_OF_SCALE",
            IssueCode::MissingWeight => "MISSING_WEIGHT",
            IssueCode::NonPositiveWeight => "NON_POSITIVE_WEIGHT",
            IssueCode::InvalidInteraction => "INVALID_INTERACTION",
            IssueCode::ConflictingInteraction => "CONFLICTING_INTERACTION",
            IssueCode::ThresholdOutOfRange => "THRESHOLD_OUT_OF_RANGE",
            IssueCode::NonNegativityViolation => "NON_NEGATIVITY_VIOLATION",
            IssueCode::MissingColumn => "MISSING_COLUMN",
            IssueCode::BadValue => "BAD_VALUE",
            IssueCode::UnknownReference => "UNKNOWN_REFERENCE",
            IssueCode::MissingModule => "MISSING_MODULE",
            IssueCode::UnsupportedFormat => "UNSUPPORTED_FORMAT",
        }
    }

    /// Structural problems versus method-level ones (bad parameter values).
    pub fn is_semantic(self) -> bool {
        matches!(
            self,
            IssueCode::NonNegativityViolation
                | IssueCode::ThresholdOutOfRange
                | IssueCode::ConflictingInteraction
                | IssueCode::InvalidInteraction
                | IssueCode::NonPositiveWeight
                | IssueCode::CoverageGap
                | IssueCode::SdDomainMismatch
        )
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    /// Dotted path into the model, e.g. `categories.commandos.weights.g7`.
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn push(&mut self, code: IssueCode, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            code,
            location: location.into(),
            message: message.into(),
        });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.issues.extend(other.issues);
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    pub fn codes(&self) -> Vec<IssueCode> {
        self.issues.iter().map(|i| i.code).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(CriterionId),
    #[error("no weight for criterion `{0}`")]
    MissingWeight(CriterionId),
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::UnknownCriterion(_) => "UNKNOWN_CRITERION",
            ModelError::MissingWeight(_) => "MISSING_WEIGHT",
        }
    }
}

/// `k_j − Σ|weakening k_jℓ| − Σ|antagonistic k_j|p|` for every criterion, in criteria order.
pub fn non_negativity_slacks(
    category: &CategoryModel,
    criteria: &[Criterion],
) -> Result<Vec<(CriterionId, f64)>, ModelError> {
    let known: BTreeSet<&CriterionId> = criteria.iter().map(|c| &c.id).collect();
    for c in &category.interactions {
        for id in [&c.first, &c.second] {
            if !known.contains(id) {
                return Err(ModelError::UnknownCriterion(id.clone()));
            }
        }
    }
    criteria
        .iter()
        .map(|criterion| {
            let j = &criterion.id;
            let k = *category
                .weights
                .get(j)
                .ok_or_else(|| ModelError::MissingWeight(j.clone()))?;
            let mut penalty = 0.0;
            for c in &category.interactions {
                let counts = match c.kind {
                    InteractionKind::MutualWeakening => &c.first == j || &c.second == j,
                    InteractionKind::Antagonistic => &c.first == j,
                    InteractionKind::MutualStrengthening => false,
                };
                if counts {
                    penalty += libm::fabs(c.value);
                }
            }
            Ok((j.clone(), k - penalty))
        })
        .collect()
}

/// Criteria whose slack is negative (beyond [`TOLERANCE`]); empty means the condition holds.
pub fn check_non_negativity(
    category: &CategoryModel,
    criteria: &[Criterion],
) -> Result<Vec<(CriterionId, f64)>, ModelError> {
    Ok(non_negativity_slacks(category, criteria)?
        .into_iter()
        .filter(|&(_, slack)| slack < -TOLERANCE)
        .collect())
}

fn check_in_scale(
    report: &mut ValidationReport,
    criteria: &[Criterion],
    values: &BTreeMap<CriterionId, f64>,
    location: &str,
) {
    for c in criteria {
        match values.get(&c.id) {
            None => report.push(
                IssueCode::MissingPerformance,
                format!("{location}.{}", c.id),
                format!("no performance on criterion `{}`", c.id),
            ),
            Some(&v) if !c.scale.contains(v) => report.push(
                IssueCode::PerformanceOutOfScale,
                format!("{location}.{}", c.id),
                format!("{v} is outside the scale {} of `{}`", c.scale, c.id),
            ),
            _ => {}
        }
    }
    for id in values.keys() {
        if !criteria.iter().any(|c| &c.id == id) {
            report.push(
                IssueCode::UnknownCriterion,
                format!("{location}.{id}"),
                format!("unknown criterion `{id}`"),
            );
        }
    }
}

fn duplicates<'a, T: Ord + fmt::Display + 'a>(ids: impl Iterator<Item = &'a T>) -> Vec<&'a T> {
    let mut seen = BTreeSet::new();
    ids.filter(|id| !seen.insert(*id)).collect()
}

fn check_interactions(report: &mut ValidationReport, category: &CategoryModel, criteria: &[Criterion], at: &str) {
    let known = |id: &CriterionId| criteria.iter().any(|c| &c.id == id);
    let mut mutual_pairs = BTreeSet::new();
    let mut antagonistic_pairs = BTreeSet::new();
    for (i, c) in category.interactions.iter().enumerate() {
        let loc = format!("{at}.interactions[{i}]");
        for id in [&c.first, &c.second] {
            if !known(id) {
                report.push(
                    IssueCode::UnknownCriterion,
                    loc.clone(),
                    format!("unknown criterion `{id}`"),
                );
            }
        }
        if c.first == c.second {
            report.push(
                IssueCode::InvalidInteraction,
                loc.clone(),
                format!("`{}` interacts with itself", c.first),
            );
        }
        let sign_ok = match c.kind {
            InteractionKind::MutualStrengthening => c.value > 0.0,
            InteractionKind::MutualWeakening | InteractionKind::Antagonistic => c.value < 0.0,
        };
        if !(sign_ok && c.value.is_finite()) {
            report.push(
                IssueCode::InvalidInteraction,
                loc.clone(),
                format!("{} coefficient has the wrong sign ({})", c.kind.as_str(), c.value),
            );
        }
        let unordered = if c.first <= c.second {
            (c.first.clone(), c.second.clone())
        } else {
            (c.second.clone(), c.first.clone())
        };
        let fresh = if c.kind.is_mutual() {
            mutual_pairs.insert(unordered)
        } else {
            antagonistic_pairs.insert((c.first.clone(), c.second.clone()))
        };
        if !fresh {
            report.push(
                IssueCode::ConflictingInteraction,
                loc,
                format!(
                    "pair ({}, {}) already has a coefficient of this kind",
                    c.first, c.second
                ),
            );
        }
    }
    for (a, b) in &antagonistic_pairs {
        let key = if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        if mutual_pairs.contains(&key) {
            report.push(
                IssueCode::ConflictingInteraction,
                format!("{at}.interactions"),
                format!("pair ({a}, {b}) is both antagonistic and mutual"),
            );
        }
    }
}

/// Collects every invariant violation; an empty report means the model can be executed.
pub fn validate_model(model: &DecisionModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    if model.criteria.is_empty() {
        report.push(IssueCode::NoCriteria, "criteria", "the model has no criteria");
    }
    for id in duplicates(model.criteria.iter().map(|c| &c.id)) {
        report.push(
            IssueCode::DuplicateId,
            format!("criteria.{id}"),
            format!("criterion `{id}` is declared twice"),
        );
    }
    for id in duplicates(model.sd_functions.iter().map(|f| f.id())) {
        report.push(
            IssueCode::DuplicateId,
            format!("sd_functions.{id}"),
            format!("function `{id}` is declared twice"),
        );
    }
    for id in duplicates(model.categories.iter().map(|c| &c.id)) {
        report.push(
            IssueCode::DuplicateId,
            format!("categories.{id}"),
            format!("category `{id}` is declared twice"),
        );
    }

    for c in &model.criteria {
        let at = format!("criteria.{}", c.id);
        if let Some(msg) = c.scale.check() {
            report.push(IssueCode::InvalidScale, at.clone(), msg);
            continue;
        }
        let Some(fid) = model.bindings.get(&c.id) else {
            report.push(
                IssueCode::MissingSdFunction,
                at,
                format!("criterion `{}` has no SD function", c.id),
            );
            continue;
        };
        let Some(f) = model.sd_function(fid) else {
            report.push(
                IssueCode::UnknownSdFunction,
                at,
                format!("SD function `{fid}` is not defined"),
            );
            continue;
        };
        if f.domain() == DomainKind::Ordinal && c.scale.domain() == DomainKind::Cardinal {
            report.push(
                IssueCode::SdDomainMismatch,
                at.clone(),
                format!("ordinal function `{fid}` is bound to cardinal criterion `{}`", c.id),
            );
        } else if !f.covers_span(c.scale.span()) {
            let span = c.scale.span();
            report.push(
                IssueCode::CoverageGap,
                at,
                format!("function `{fid}` does not cover every difference in [-{span}, {span}]"),
            );
        }
    }
    for id in model.bindings.keys() {
        if model.criterion(id).is_none() {
            report.push(
                IssueCode::UnknownCriterion,
                format!("bindings.{id}"),
                format!("unknown criterion `{id}`"),
            );
        }
    }

    if model.categories.is_empty() {
        report.push(IssueCode::NoCategories, "categories", "the model has no categories");
    }
    for cat in &model.categories {
        let at = format!("categories.{}", cat.id);
        if cat.reference_actions.is_empty() {
            report.push(
                IssueCode::EmptyReferenceActions,
                at.clone(),
                format!("category `{}` has no reference actions", cat.id),
            );
        }
        for id in duplicates(cat.reference_actions.iter().map(|r| &r.id)) {
            report.push(
                IssueCode::DuplicateId,
                format!("{at}.reference_actions.{id}"),
                format!("reference action `{id}` is declared twice"),
            );
        }
        for r in &cat.reference_actions {
            check_in_scale(
                &mut report,
                &model.criteria,
                &r.performances,
                &format!("{at}.reference_actions.{}", r.id),
            );
        }
        let mut weights_complete = true;
        for c in &model.criteria {
            match cat.weights.get(&c.id) {
                None => {
                    weights_complete = false;
                    report.push(
                        IssueCode::MissingWeight,
                        format!("{at}.weights.{}", c.id),
                        format!("no weight for `{}`", c.id),
                    );
                }
                Some(&k) if !(k > 0.0 && k.is_finite()) => report.push(
                    IssueCode::NonPositiveWeight,
                    format!("{at}.weights.{}", c.id),
                    format!("weight of `{}` must be positive (got {k})", c.id),
                ),
                _ => {}
            }
        }
        for id in cat.weights.keys() {
            if model.criterion(id).is_none() {
                report.push(
                    IssueCode::UnknownCriterion,
                    format!("{at}.weights.{id}"),
                    format!("unknown criterion `{id}`"),
                );
            }
        }
        let lambda = cat.likeness_threshold;
        if !(0.5..=1.0).contains(&lambda) {
            report.push(
                IssueCode::ThresholdOutOfRange,
                format!("{at}.likeness_threshold"),
                format!("likeness threshold {lambda} is outside [0.5, 1]"),
            );
        }
        let before = report.issues.len();
        check_interactions(&mut report, cat, &model.criteria, &at);
        let interactions_ok = report.issues[before..]
            .iter()
            .all(|i| i.code != IssueCode::UnknownCriterion);
        if weights_complete && interactions_ok {
            if let Ok(violations) = check_non_negativity(cat, &model.criteria) {
                for (id, slack) in violations {
                    report.push(
                        IssueCode::NonNegativityViolation,
                        format!("{at}.interactions.{id}"),
                        format!("weight of `{id}` minus its negative coefficients is {slack:.4} < 0"),
                    );
                }
            }
        }
    }
    report
}

/// Checks a dataset against a model: ids, coverage and scale membership.
pub fn validate_performances(model: &DecisionModel, actions: &[Action], table: &PerformanceTable) -> ValidationReport {
    let mut report = ValidationReport::default();
    for id in duplicates(actions.iter().map(|a| &a.id)) {
        report.push(
            IssueCode::DuplicateId,
            format!("actions.{id}"),
            format!("action `{id}` is declared twice"),
        );
    }
    for a in actions {
        match table.rows.get(&a.id) {
            None => report.push(
                IssueCode::MissingPerformance,
                format!("performance.{}", a.id),
                format!("action `{}` has no performances", a.id),
            ),
            Some(row) => check_in_scale(&mut report, &model.criteria, row, &format!("performance.{}", a.id)),
        }
    }
    for id in table.rows.keys() {
        if !actions.iter().any(|a| &a.id == id) {
            report.push(
                IssueCode::UnknownAction,
                format!("performance.{id}"),
                format!("unknown action `{id}`"),
            );
        }
    }
    report
}
