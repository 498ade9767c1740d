use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SdError;
use crate::exact::Exact;

/// Subsets `S¹ … S^r` with `blanks[i]` blank cards between `S^(i+1)` and `S^(i+2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckRanking<T> {
    pub subsets: Vec<Vec<T>>,
    #[serde(default)]
    pub blanks: Vec<u32>,
}

impl<T> DeckRanking<T> {
    pub fn new(subsets: Vec<Vec<T>>, blanks: Vec<u32>) -> Self {
        DeckRanking { subsets, blanks }
    }

    /// Checks subset and blank counts (not item uniqueness).
    pub fn check_shape(&self) -> Result<(), SdError> {
        if let Some(index) = self.subsets.iter().position(Vec::is_empty) {
            return Err(SdError::EmptySubset { index });
        }
        let expected = self.subsets.len().saturating_sub(1);
        if self.blanks.len() != expected {
            return Err(SdError::BlankCountMismatch {
                expected,
                found: self.blanks.len(),
            });
        }
        Ok(())
    }

    /// `Σ_{i<k} (eⁱ + 1)` for each subset `k`; starts at 0.
    pub fn cumulative_units(&self) -> Vec<u64> {
        let mut acc = 0u64;
        let mut out = Vec::with_capacity(self.subsets.len());
        out.push(0);
        for &e in self.blanks.iter().take(self.subsets.len().saturating_sub(1)) {
            acc += u64::from(e) + 1;
            out.push(acc);
        }
        out.truncate(self.subsets.len());
        out
    }
}

/// The four parts of an SD function, from the far negative side to the far positive side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    /// Dissimilarity on `]−v′, −u′[`.
    F1,
    /// Similarity on `]−t′, 0[`.
    F2,
    /// Similarity on `]0, t[`.
    F3,
    /// Dissimilarity on `]u, v[`.
    F4,
}

impl Component {
    pub fn name(self) -> &'static str {
        match self {
            Component::F1 => "f1",
            Component::F2 => "f2",
            Component::F3 => "f3",
            Component::F4 => "f4",
        }
    }

    /// Intensities of `S¹` and `S^r`.
    pub fn endpoints(self) -> (Exact, Exact) {
        let (z, one) = (Exact::ZERO, Exact::ONE);
        match self {
            Component::F1 => (-one, z),
            Component::F2 => (z, one),
            Component::F3 => (one, z),
            Component::F4 => (z, -one),
        }
    }
}

/// One intensity per subset, exact; the unit is `1 / Σ(eⁱ + 1)`.
pub fn deck_intensities<T>(ranking: &DeckRanking<T>, component: Component) -> Result<Vec<Exact>, SdError> {
    if ranking.subsets.len() < 2 {
        return Err(SdError::DegenerateRanking);
    }
    ranking.check_shape()?;
    let units = ranking.cumulative_units();
    let h = *units.last().unwrap_or(&1);
    let alpha = Exact::new(1, i128::from(h));
    let (first, _) = component.endpoints();
    let rising = matches!(component, Component::F1 | Component::F2);
    Ok(units
        .iter()
        .map(|&k| {
            let step = alpha * Exact::integer(i128::from(k));
            if rising {
                first + step
            } else {
                first - step
            }
        })
        .collect())
}
