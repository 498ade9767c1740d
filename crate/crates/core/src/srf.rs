//! Criteria weights from a deck-of-cards ranking (revised Simos).
//!
//! With `S¹` the least important subset, `eⁱ` blank cards after `Sⁱ` and the
//! ratio `z = k(S^r) / k(S¹)`:
//!
//! ```text
//! e      = Σ_{i=1}^{r−1} (eⁱ + 1)
//! u      = (z − 1) / e
//! k(S^k) = 1 + u · Σ_{i=1}^{k−1} (eⁱ + 1)
//! ```
//!
//! Both sums stop one short of the index (`r − 1`, `k − 1`), so `k(S^r) = z`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::exact::Exact;
use crate::ids::CriterionId;
use crate::sdfunc::{DeckRanking, SdError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightElicitation {
    /// Least important subset first.
    pub ranking: DeckRanking<CriterionId>,
    pub z: Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SrfError {
    #[error("the ranking has no criteria")]
    EmptyRanking,
    #[error("subset {index} is empty")]
    EmptySubset { index: usize },
    #[error("z = {0} must be greater than 1")]
    ZOutOfRange(Exact),
    #[error("criterion `{0}` appears more than once")]
    DuplicateCriterion(CriterionId),
    #[error("expected {expected} blank counts between subsets, found {found}")]
    BlankCountMismatch { expected: usize, found: usize },
}

impl SrfError {
    pub fn code(&self) -> &'static str {
        match self {
            SrfError::EmptyRanking | SrfError::EmptySubset { .. } => "EMPTY_RANKING",
            SrfError::ZOutOfRange(_) => "Z_OUT_OF_RANGE",
            SrfError::DuplicateCriterion(_) => "DUPLICATE_CRITERION",
            SrfError::BlankCountMismatch { .. } => "BLANK_COUNT_MISMATCH",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrfWeights {
    /// `u`; zero for a single subset.
    pub unit: Exact,
    /// `k(S¹) … k(S^r)`.
    pub subset_weights: Vec<Exact>,
    pub weights: BTreeMap<CriterionId, Exact>,
}

impl SrfWeights {
    pub fn get(&self, id: &CriterionId) -> Option<Exact> {
        self.weights.get(id).copied()
    }

    /// Weights rounded half away from zero, as printed in reports.
    pub fn rounded(&self, places: u32) -> BTreeMap<CriterionId, Exact> {
        self.weights
            .iter()
            .map(|(k, v)| (k.clone(), v.round_dp(places)))
            .collect()
    }
}

pub fn srf_weights(e: &WeightElicitation) -> Result<SrfWeights, SrfError> {
    let ranking = &e.ranking;
    if ranking.subsets.is_empty() {
        return Err(SrfError::EmptyRanking);
    }
    ranking.check_shape().map_err(|err| match err {
        SdError::EmptySubset { index } => SrfError::EmptySubset { index },
        SdError::BlankCountMismatch { expected, found } => SrfError::BlankCountMismatch { expected, found },
        _ => SrfError::EmptyRanking,
    })?;
    let mut seen = BTreeSet::new();
    for id in ranking.subsets.iter().flatten() {
        if !seen.insert(id) {
            return Err(SrfError::DuplicateCriterion(id.clone()));
        }
    }
    let units = ranking.cumulative_units();
    let total = *units.last().unwrap_or(&0);
    let unit = if total == 0 {
        Exact::ZERO
    } else {
        if e.z <= Exact::ONE {
            return Err(SrfError::ZOutOfRange(e.z));
        }
        (e.z - Exact::ONE) / Exact::integer(i128::from(total))
    };
    let subset_weights: Vec<Exact> = units
        .iter()
        .map(|&k| Exact::ONE + unit * Exact::integer(i128::from(k)))
        .collect();
    let weights = ranking
        .subsets
        .iter()
        .zip(&subset_weights)
        .flat_map(|(subset, &w)| subset.iter().map(move |id| (id.clone(), w)))
        .collect();
    Ok(SrfWeights {
        unit,
        subset_weights,
        weights,
    })
}
