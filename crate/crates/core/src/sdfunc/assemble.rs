use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::deck::{deck_intensities, Component, DeckRanking};
use super::threshold::ThresholdSet;
use super::{DomainKind, Piece, PieceValue, SdError, SdFunction};
use crate::exact::Exact;
use crate::ids::FunctionId;

/// Piecewise-linear pieces through `knots`: `[k₀, k₁]`, then `(kᵢ, kᵢ₊₁]`.
pub fn interpolate_linear(knots: &[(f64, f64)]) -> Result<Vec<Piece>, SdError> {
    if knots.len() < 2 {
        return Err(SdError::TooFewKnots);
    }
    for pair in knots.windows(2) {
        if pair[1].0.is_nan() || pair[1].0 <= pair[0].0 {
            return Err(SdError::DuplicateKnot { at: pair[1].0 });
        }
    }
    Ok(knots
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let ((x0, v0), (x1, v1)) = (pair[0], pair[1]);
            let value = if v0 == v1 {
                PieceValue::Constant { value: v0 }
            } else {
                let slope = (v1 - v0) / (x1 - x0);
                PieceValue::Affine {
                    slope,
                    intercept: v0 - slope * x0,
                }
            };
            Piece::new(Some(x0), i == 0, Some(x1), true, value)
        })
        .collect())
}

/// Deck-of-cards judgements per component; cards are performance differences.
///
/// A missing component uses its two interval end points as the only cards.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRankings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<DeckRanking<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<DeckRanking<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f3: Option<DeckRanking<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f4: Option<DeckRanking<Exact>>,
}

impl ComponentRankings {
    pub fn get(&self, component: Component) -> Option<&DeckRanking<Exact>> {
        match component {
            Component::F1 => self.f1.as_ref(),
            Component::F2 => self.f2.as_ref(),
            Component::F3 => self.f3.as_ref(),
            Component::F4 => self.f4.as_ref(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: Exact,
    b: Exact,
    va: Exact,
    vb: Exact,
}

fn component_knots(
    component: Component,
    lo: Exact,
    hi: Exact,
    cards: Option<&DeckRanking<Exact>>,
) -> Result<Vec<(Exact, Exact)>, SdError> {
    let invalid = |message: alloc::string::String| SdError::InvalidCards {
        component: component.name(),
        message,
    };
    if lo == hi {
        return match cards {
            None => Ok(Vec::new()),
            Some(_) => Err(invalid(format!("the interval collapses to the single point {lo}"))),
        };
    }
    let Some(ranking) = cards else {
        let (first, last) = component.endpoints();
        return Ok(alloc::vec![(lo, first), (hi, last)]);
    };
    let intensities = deck_intensities(ranking, component)?;
    let mut knots = Vec::new();
    for (subset, &value) in ranking.subsets.iter().zip(&intensities) {
        let mut cards: Vec<Exact> = subset.clone();
        cards.sort();
        for &card in &cards {
            if card < lo || card > hi {
                return Err(invalid(format!("card {card} lies outside [{lo}, {hi}]")));
            }
            if let Some(&(prev, _)) = knots.last() {
                if card <= prev {
                    return Err(invalid(format!(
                        "cards must be distinct and subsets ordered by increasing difference (at {card})"
                    )));
                }
            }
            knots.push((card, value));
        }
    }
    if knots.first().map(|k| k.0) != Some(lo) || knots.last().map(|k| k.0) != Some(hi) {
        return Err(invalid(format!("the end points {lo} and {hi} must both be cards")));
    }
    Ok(knots)
}

fn exact_piece(seg: &Segment, lower_closed: bool, upper_closed: bool) -> Piece {
    let slope = (seg.vb - seg.va) / (seg.b - seg.a);
    let value = if slope.is_zero() {
        PieceValue::Constant { value: seg.va.to_f64() }
    } else {
        PieceValue::Affine {
            slope: slope.to_f64(),
            intercept: (seg.va - slope * seg.a).to_f64(),
        }
    };
    Piece::new(
        Some(seg.a.to_f64()),
        lower_closed,
        Some(seg.b.to_f64()),
        upper_closed,
        value,
    )
}

/// Builds the Δ-only function at `reference_level`.
///
/// Layout, left to right: `−1` up to `−v′`, the `f1` cards, `0` on `(−u′, −t′]`,
/// the `f2` and `f3` cards, `0` on `(t, u]`, the `f4` cards, `−1` beyond `v`.
/// Pieces are lower-open and upper-closed; at a jump on `Δ = 0` the higher side
/// owns the point.
pub fn assemble_sd(
    id: impl Into<FunctionId>,
    thresholds: &ThresholdSet,
    reference_level: Exact,
    cards: &ComponentRankings,
) -> Result<SdFunction, SdError> {
    let l = thresholds.at(reference_level)?;
    let zero = Exact::ZERO;
    let zones = [
        component_knots(Component::F1, -l.v_prime, -l.u_prime, cards.get(Component::F1))?,
        if l.u_prime > l.t_prime {
            alloc::vec![(-l.u_prime, zero), (-l.t_prime, zero)]
        } else {
            Vec::new()
        },
        component_knots(Component::F2, -l.t_prime, zero, cards.get(Component::F2))?,
        component_knots(Component::F3, zero, l.t, cards.get(Component::F3))?,
        if l.u > l.t {
            alloc::vec![(l.t, zero), (l.u, zero)]
        } else {
            Vec::new()
        },
        component_knots(Component::F4, l.u, l.v, cards.get(Component::F4))?,
    ];
    let segments: Vec<Segment> = zones
        .iter()
        .flat_map(|z| {
            z.windows(2).map(|w| Segment {
                a: w[0].0,
                b: w[1].0,
                va: w[0].1,
                vb: w[1].1,
            })
        })
        .collect();

    // Ownership of each shared bound: `true` when the left piece keeps it.
    let left_owns = |x: Exact, left_end: Exact, right_start: Exact| !(x.is_zero() && right_start > left_end);
    let minus_one = -Exact::ONE;

    let mut pieces = Vec::with_capacity(segments.len() + 2);
    let first_start = segments.first().map_or(minus_one, |s| s.va);
    let tail_closed = left_owns(-l.v_prime, minus_one, first_start);
    pieces.push(Piece::new(
        None,
        false,
        Some((-l.v_prime).to_f64()),
        tail_closed,
        PieceValue::Constant { value: -1.0 },
    ));
    let mut lower_closed = !tail_closed;
    for (i, seg) in segments.iter().enumerate() {
        let next_start = segments.get(i + 1).map_or(minus_one, |s| s.va);
        let upper_closed = left_owns(seg.b, seg.vb, next_start);
        pieces.push(exact_piece(seg, lower_closed, upper_closed));
        lower_closed = !upper_closed;
    }
    pieces.push(Piece::new(
        Some(l.v.to_f64()),
        lower_closed,
        None,
        false,
        PieceValue::Constant { value: -1.0 },
    ));
    SdFunction::new(id, DomainKind::Cardinal, pieces)
}
