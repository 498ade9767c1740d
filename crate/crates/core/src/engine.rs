//! Similarity, dissimilarity and likeness between actions and reference
//! actions, and the assignment of actions to nominal categories.
//!
//! Every comparison keeps its full trace so a result can be audited cell by cell.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::ids::{ActionId, CategoryId, CriterionId};
use crate::model::{
    validate_model, validate_performances, Action, CategoryModel, Criterion, DecisionModel, InteractionKind,
    PerformanceTable, ReferenceAction, ValidationReport,
};
use crate::TOLERANCE;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("similarity normalizer K = {value} is not positive ({action} vs {reference} in {category})")]
    DegenerateNormalizer {
        category: CategoryId,
        action: ActionId,
        reference: ActionId,
        value: f64,
    },
    #[error("difference {delta} on criterion `{criterion}` is outside its SD function domain")]
    OutOfDomain { criterion: CriterionId, delta: f64 },
    #[error("no performance of `{action}` on `{criterion}`")]
    MissingPerformance { action: ActionId, criterion: CriterionId },
    #[error("criterion `{0}` is referenced but has no weight or SD function")]
    UnknownCriterion(CriterionId),
    #[error("the model is invalid ({} issue(s))", .0.issues.len())]
    InvalidModel(ValidationReport),
    #[error("the performance data is invalid ({} issue(s))", .0.issues.len())]
    InvalidData(ValidationReport),
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::DegenerateNormalizer { .. } => "DEGENERATE_NORMALIZER",
            EngineError::OutOfDomain { .. } => "OUT_OF_DOMAIN",
            EngineError::MissingPerformance { .. } => "MISSING_PERFORMANCE",
            EngineError::UnknownCriterion(_) => "UNKNOWN_CRITERION",
            EngineError::InvalidModel(_) => "INVALID_MODEL",
            EngineError::InvalidData(_) => "INVALID_DATA",
        }
    }

    pub fn report(&self) -> Option<&ValidationReport> {
        match self {
            EngineError::InvalidModel(r) | EngineError::InvalidData(r) => Some(r),
            _ => None,
        }
    }
}

/// `Δ_j(a, b)`; ordinal levels are integers so the same difference counts levels.
pub fn delta_j(criterion: &Criterion, a: f64, b: f64) -> f64 {
    criterion.delta(a, b)
}

/// `(s^h, K^h)` from per-criterion `(id, s_j, d_j)` with `z(x, y) = xy`.
pub fn comprehensive_similarity(
    category: &CategoryModel,
    parts: &[(CriterionId, f64, f64)],
) -> Result<(f64, f64), EngineError> {
    let lookup = |id: &CriterionId| {
        parts
            .iter()
            .find(|(c, _, _)| c == id)
            .map(|&(_, s, d)| (s, d))
            .ok_or_else(|| EngineError::UnknownCriterion(id.clone()))
    };
    let mut numerator = 0.0;
    let mut normalizer = 0.0;
    for (id, s, _) in parts {
        let k = *category
            .weights
            .get(id)
            .ok_or_else(|| EngineError::UnknownCriterion(id.clone()))?;
        numerator += k * s;
        normalizer += k;
    }
    for c in &category.interactions {
        let (s1, _) = lookup(&c.first)?;
        let (s2, d2) = lookup(&c.second)?;
        let z = match c.kind {
            InteractionKind::MutualStrengthening | InteractionKind::MutualWeakening => s1 * s2,
            InteractionKind::Antagonistic => s1 * libm::fabs(d2),
        };
        numerator += z * c.value;
        normalizer += z * c.value;
    }
    Ok((numerator / normalizer, normalizer))
}

/// `∏(1 + d_j) − 1`.
pub fn comprehensive_dissimilarity(d: &[f64]) -> f64 {
    d.iter().map(|&dj| 1.0 + dj).product::<f64>() - 1.0
}

/// `δ = s^h (1 + d)`.
pub fn likeness(s_h: f64, d: f64) -> f64 {
    s_h * (1.0 + d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionTrace {
    pub criterion: CriterionId,
    pub action_value: f64,
    pub reference_value: f64,
    pub delta: f64,
    pub f: f64,
    pub s: f64,
    pub d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTrace {
    pub action: ActionId,
    pub reference: ActionId,
    pub criteria: Vec<CriterionTrace>,
    pub s_h: f64,
    pub k_h: f64,
    pub d: f64,
    pub likeness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryOutcome {
    pub category: CategoryId,
    /// `δ(a, B_h)`
    pub likeness: f64,
    pub best_reference: ActionId,
    pub threshold: f64,
    pub accepted: bool,
    pub comparisons: Vec<ComparisonTrace>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionAssignment {
    pub action: ActionId,
    pub accepted: Vec<CategoryId>,
    pub assigned_to_dummy: bool,
    pub categories: Vec<CategoryOutcome>,
}

impl ActionAssignment {
    pub fn outcome(&self, category: &CategoryId) -> Option<&CategoryOutcome> {
        self.categories.iter().find(|c| &c.category == category)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryHeader {
    pub id: CategoryId,
    pub name: String,
    pub likeness_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignmentReport {
    pub categories: Vec<CategoryHeader>,
    pub dummy_category_name: String,
    pub epsilon: f64,
    /// In input order.
    pub actions: Vec<ActionAssignment>,
}

impl AssignmentReport {
    pub fn action(&self, id: &ActionId) -> Option<&ActionAssignment> {
        self.actions.iter().find(|a| &a.action == id)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Added to `δ` before the comparison with `λ`; widens acceptance.
    #[serde(default)]
    pub epsilon: f64,
}

/// `round₁₂(δ) + ε ≥ λ`.
pub fn accepts(likeness: f64, threshold: f64, epsilon: f64) -> bool {
    let rounded = libm::round(likeness * 1e12) / 1e12;
    rounded + epsilon >= threshold
}

/// Compares one action against one reference action of `category`.
pub fn compare(
    model: &DecisionModel,
    category: &CategoryModel,
    action: &ActionId,
    performances: &BTreeMap<CriterionId, f64>,
    reference: &ReferenceAction,
) -> Result<ComparisonTrace, EngineError> {
    let mut criteria = Vec::with_capacity(model.criteria.len());
    for c in &model.criteria {
        let a = *performances.get(&c.id).ok_or_else(|| EngineError::MissingPerformance {
            action: action.clone(),
            criterion: c.id.clone(),
        })?;
        let b = *reference
            .performances
            .get(&c.id)
            .ok_or_else(|| EngineError::MissingPerformance {
                action: reference.id.clone(),
                criterion: c.id.clone(),
            })?;
        let f = model
            .function_for(&c.id)
            .ok_or_else(|| EngineError::UnknownCriterion(c.id.clone()))?;
        let delta = delta_j(c, a, b);
        let value = f.eval(delta).map_err(|_| EngineError::OutOfDomain {
            criterion: c.id.clone(),
            delta,
        })?;
        criteria.push(CriterionTrace {
            criterion: c.id.clone(),
            action_value: a,
            reference_value: b,
            delta,
            f: value,
            s: value.max(0.0),
            d: value.min(0.0),
        });
    }
    let parts: Vec<(CriterionId, f64, f64)> = criteria.iter().map(|t| (t.criterion.clone(), t.s, t.d)).collect();
    let (s_h, k_h) = comprehensive_similarity(category, &parts)?;
    if k_h.is_nan() || k_h <= TOLERANCE {
        return Err(EngineError::DegenerateNormalizer {
            category: category.id.clone(),
            action: action.clone(),
            reference: reference.id.clone(),
            value: k_h,
        });
    }
    let d_values: Vec<f64> = criteria.iter().map(|t| t.d).collect();
    let d = comprehensive_dissimilarity(&d_values);
    Ok(ComparisonTrace {
        action: action.clone(),
        reference: reference.id.clone(),
        criteria,
        s_h,
        k_h,
        d,
        likeness: likeness(s_h, d),
    })
}

/// `δ(a, B_h)` as the best comparison over the reference actions (first one wins ties).
pub fn category_outcome(
    model: &DecisionModel,
    category: &CategoryModel,
    action: &ActionId,
    performances: &BTreeMap<CriterionId, f64>,
    options: &ClassifyOptions,
) -> Result<CategoryOutcome, EngineError> {
    let comparisons = category
        .reference_actions
        .iter()
        .map(|r| compare(model, category, action, performances, r))
        .collect::<Result<Vec<_>, _>>()?;
    let best = comparisons
        .iter()
        .fold(None::<&ComparisonTrace>, |best, c| match best {
            Some(b) if b.likeness >= c.likeness => Some(b),
            _ => Some(c),
        })
        .ok_or_else(|| EngineError::InvalidModel(empty_reference_report(category)))?;
    let (likeness, best_reference) = (best.likeness, best.reference.clone());
    Ok(CategoryOutcome {
        category: category.id.clone(),
        likeness,
        best_reference,
        threshold: category.likeness_threshold,
        accepted: accepts(likeness, category.likeness_threshold, options.epsilon),
        comparisons,
    })
}

fn empty_reference_report(category: &CategoryModel) -> ValidationReport {
    let mut r = ValidationReport::default();
    r.push(
        crate::model::IssueCode::EmptyReferenceActions,
        format!("categories.{}", category.id),
        format!("category `{}` has no reference actions", category.id),
    );
    r
}

/// Assigns every action to each category whose λ it reaches, or to the dummy category.
///
/// The model and data are validated first; invalid input is an error carrying the report.
pub fn classify(
    model: &DecisionModel,
    actions: &[Action],
    table: &PerformanceTable,
    options: ClassifyOptions,
) -> Result<AssignmentReport, EngineError> {
    let report = validate_model(model);
    if !report.is_ok() {
        return Err(EngineError::InvalidModel(report));
    }
    let data = validate_performances(model, actions, table);
    if !data.is_ok() {
        return Err(EngineError::InvalidData(data));
    }
    let empty = BTreeMap::new();
    let mut out = Vec::with_capacity(actions.len());
    for a in actions {
        let row = table.rows.get(&a.id).unwrap_or(&empty);
        let categories = model
            .categories
            .iter()
            .map(|cat| category_outcome(model, cat, &a.id, row, &options))
            .collect::<Result<Vec<_>, _>>()?;
        let accepted: Vec<CategoryId> = categories
            .iter()
            .filter(|c| c.accepted)
            .map(|c| c.category.clone())
            .collect();
        out.push(ActionAssignment {
            action: a.id.clone(),
            assigned_to_dummy: accepted.is_empty(),
            accepted,
            categories,
        });
    }
    Ok(AssignmentReport {
        categories: model
            .categories
            .iter()
            .map(|c| CategoryHeader {
                id: c.id.clone(),
                name: c.name.clone(),
                likeness_threshold: c.likeness_threshold,
            })
            .collect(),
        dummy_category_name: model.dummy_category_name.clone(),
        epsilon: options.epsilon,
        actions: out,
    })
}
