//! Request and response shapes for the stateless elicitation helpers, shared by
//! the command line and the HTTP service.

use std::collections::BTreeMap;

use catsd_core::sdfunc::{
    deck_intensities, fit_affine_threshold, Component, DeckRanking, ThresholdKind, ThresholdSet, ThresholdValue,
};
use catsd_core::{srf_weights, CriterionId, Exact, IssueCode, ValidationReport, WeightElicitation};
use serde::{Deserialize, Serialize};

use crate::table::Table;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ElicitError {
    pub code: String,
    pub message: String,
}

impl ElicitError {
    fn new(code: &str, message: impl Into<String>) -> Self {
        ElicitError {
            code: code.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRow {
    pub criterion: CriterionId,
    /// 1 for the least important subset.
    pub subset: usize,
    pub weight: Exact,
    /// Two decimals, as printed in weight tables.
    pub display: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrfResponse {
    pub unit: Exact,
    pub subset_weights: Vec<Exact>,
    /// In ranking order.
    pub weights: Vec<WeightRow>,
}

pub fn compute_srf(request: &WeightElicitation) -> Result<SrfResponse, ElicitError> {
    let w = srf_weights(request).map_err(|e| ElicitError::new(e.code(), e.to_string()))?;
    let weights = request
        .ranking
        .subsets
        .iter()
        .enumerate()
        .flat_map(|(i, subset)| {
            let k = w.subset_weights[i];
            subset.iter().map(move |c| WeightRow {
                criterion: c.clone(),
                subset: i + 1,
                weight: k,
                display: k.format_dp(2),
            })
        })
        .collect();
    Ok(SrfResponse {
        unit: w.unit,
        subset_weights: w.subset_weights,
        weights,
    })
}

/// Groups `(criterion, position)` rows into subsets; a gap of `n` positions leaves `n − 1` blank cards.
pub fn ranking_from_positions(rows: &[(CriterionId, u32)]) -> Result<DeckRanking<CriterionId>, ElicitError> {
    let mut by_position: BTreeMap<u32, Vec<CriterionId>> = BTreeMap::new();
    for (c, p) in rows {
        if *p == 0 {
            return Err(ElicitError::new(
                "BAD_VALUE",
                format!("position of `{c}` must be at least 1"),
            ));
        }
        by_position.entry(*p).or_default().push(c.clone());
    }
    let positions: Vec<u32> = by_position.keys().copied().collect();
    let blanks = positions.windows(2).map(|w| w[1] - w[0] - 1).collect();
    Ok(DeckRanking::new(by_position.into_values().collect(), blanks))
}

/// Reads a `criterion,position` table.
pub fn ranking_from_table(t: &Table) -> Result<DeckRanking<CriterionId>, ValidationReport> {
    let mut report = ValidationReport::default();
    if !t.require(&["criterion", "position"], &mut report) {
        return Err(report);
    }
    let mut rows = Vec::new();
    for rec in t.records() {
        let (Some(c), Some(p)) = (rec.text("criterion", &mut report), rec.number("position", &mut report)) else {
            continue;
        };
        if p.fract() != 0.0 || p < 1.0 || p > f64::from(u32::MAX) {
            report.push(
                IssueCode::BadValue,
                rec.location(),
                format!("position must be a whole number ≥ 1, got {p}"),
            );
            continue;
        }
        rows.push((CriterionId::from(c), p as u32));
    }
    if !report.is_ok() {
        return Err(report);
    }
    ranking_from_positions(&rows).map_err(|e| {
        let mut r = ValidationReport::default();
        r.push(IssueCode::BadValue, t.file.clone(), e.message);
        r
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub threshold: ThresholdKind,
    /// `g(b)`
    pub level: Exact,
    /// The difference at which the DM's answer changed.
    pub difference: Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitRequest {
    pub points: Vec<ThresholdPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FittedThreshold {
    pub threshold: ThresholdKind,
    pub value: ThresholdValue,
    pub constant: bool,
    pub display: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitResponse {
    pub thresholds: Vec<FittedThreshold>,
    /// Present when all six thresholds were given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<ThresholdSet>,
}

pub fn parse_threshold_kind(s: &str) -> Option<ThresholdKind> {
    let key = s.trim().to_ascii_lowercase().replace(['′', '\''], "_prime");
    ThresholdKind::ALL.into_iter().find(|k| {
        let name = k.name().replace('\'', "_prime");
        name == key || name.replace('_', "") == key.replace('_', "")
    })
}

/// One point per threshold gives a constant; two give the affine fit.
pub fn fit_thresholds(request: &FitRequest) -> Result<FitResponse, ElicitError> {
    let mut thresholds = Vec::new();
    let mut values: BTreeMap<&'static str, ThresholdValue> = BTreeMap::new();
    for kind in ThresholdKind::ALL {
        let pts: Vec<&ThresholdPoint> = request.points.iter().filter(|p| p.threshold == kind).collect();
        let value = match pts.as_slice() {
            [] => continue,
            [p] => {
                if p.difference.is_negative() {
                    return Err(ElicitError::new(
                        "INVALID_THRESHOLD_INPUT",
                        "threshold differences must be non-negative",
                    ));
                }
                ThresholdValue::Constant { value: p.difference }
            }
            [a, b] => fit_affine_threshold(a.level, a.difference, b.level, b.difference)
                .map_err(|e| ElicitError::new(e.code(), format!("{}: {e}", kind.name())))?,
            _ => {
                return Err(ElicitError::new(
                    "INVALID_THRESHOLD_INPUT",
                    format!("{} has {} points; give one or two", kind.name(), pts.len()),
                ))
            }
        };
        values.insert(kind.name(), value);
        thresholds.push(FittedThreshold {
            threshold: kind,
            value,
            constant: value.is_constant(),
            display: value.to_string(),
        });
    }
    let set = if values.len() == 6 {
        let [t, t_prime, u, u_prime, v, v_prime] = ThresholdKind::ALL.map(|k| values[k.name()]);
        let set = ThresholdSet {
            t,
            t_prime,
            u,
            u_prime,
            v,
            v_prime,
        };
        for p in &request.points {
            set.at(p.level).map_err(|e| ElicitError::new(e.code(), e.to_string()))?;
        }
        Some(set)
    } else {
        None
    };
    Ok(FitResponse { thresholds, set })
}

/// Reads a `threshold,level,difference` table.
pub fn fit_request_from_table(t: &Table) -> Result<FitRequest, ValidationReport> {
    let mut report = ValidationReport::default();
    if !t.require(&["threshold", "level", "difference"], &mut report) {
        return Err(report);
    }
    let mut points = Vec::new();
    for rec in t.records() {
        let Some(name) = rec.text("threshold", &mut report) else {
            continue;
        };
        let Some(threshold) = parse_threshold_kind(name) else {
            report.push(
                IssueCode::BadValue,
                rec.location(),
                format!("unknown threshold `{name}` (use t, t', u, u', v, v')"),
            );
            continue;
        };
        let mut exact = |col: &str| {
            let text = rec.text(col, &mut report)?;
            match text.parse::<Exact>() {
                Ok(v) => Some(v),
                Err(e) => {
                    report.push(IssueCode::BadValue, rec.location(), e.to_string());
                    None
                }
            }
        };
        let (Some(level), Some(difference)) = (exact("level"), exact("difference")) else {
            continue;
        };
        points.push(ThresholdPoint {
            threshold,
            level,
            difference,
        });
    }
    if report.is_ok() {
        Ok(FitRequest { points })
    } else {
        Err(report)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckRequest {
    pub component: Component,
    /// Cards are Δ values, ascending from subset to subset.
    pub ranking: DeckRanking<Exact>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckResponse {
    pub unit: Exact,
    pub intensities: Vec<Exact>,
}

pub fn compute_deck(request: &DeckRequest) -> Result<DeckResponse, ElicitError> {
    let intensities =
        deck_intensities(&request.ranking, request.component).map_err(|e| ElicitError::new(e.code(), e.to_string()))?;
    let h = request.ranking.cumulative_units().last().copied().unwrap_or(1).max(1);
    Ok(DeckResponse {
        unit: Exact::new(1, i128::from(h)),
        intensities,
    })
}
