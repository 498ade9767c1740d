//! Per-criterion similarity-dissimilarity (SD) functions.
//!
//! An [`SdFunction`] maps a performance difference `Δ = diff{g(a), g(b)}` to
//! an intensity in `[-1, 1]`: positive values are similarity, negative values
//! dissimilarity. Functions are stored as ordered, pairwise disjoint
//! [`Piece`]s, each either constant or affine in `Δ`.
//!
//! Construction always goes through [`SdFunction::new`], which enforces the
//! shape rules: no overlap, no coverage gap, values within `[-1, 1]`,
//! `f(0) >= 0`, non-decreasing for `Δ <= 0` and non-increasing for `Δ >= 0`.
//! On an ordinal domain only integer differences are reachable, so coverage
//! and monotonicity are checked at integer points only.

mod assemble;
mod deck;
mod parse;
mod threshold;

pub use assemble::{assemble_sd, interpolate_linear, ComponentRankings};
pub use deck::{deck_intensities, Component, DeckRanking};
pub use parse::{format_sd_rows, parse_sd_rows};
pub use threshold::{fit_affine_threshold, ThresholdKind, ThresholdLevels, ThresholdSet, ThresholdValue};

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::ids::FunctionId;
use crate::TOLERANCE;

/// Whether Δ ranges over the reals or over signed level counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Cardinal,
    Ordinal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PieceValue {
    Constant {
        value: f64,
    },
    /// `slope * Δ + intercept`
    Affine {
        slope: f64,
        intercept: f64,
    },
}

impl PieceValue {
    pub fn at(&self, delta: f64) -> f64 {
        match *self {
            PieceValue::Constant { value } => value,
            PieceValue::Affine { slope, intercept } => slope * delta + intercept,
        }
    }

    fn slope(&self) -> f64 {
        match *self {
            PieceValue::Constant { .. } => 0.0,
            PieceValue::Affine { slope, .. } => slope,
        }
    }
}

/// One interval of an SD function. `None` bounds are infinite (and then open).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lower: Option<f64>,
    pub lower_closed: bool,
    pub upper: Option<f64>,
    pub upper_closed: bool,
    pub value: PieceValue,
}

impl Piece {
    pub fn new(
        lower: Option<f64>,
        lower_closed: bool,
        upper: Option<f64>,
        upper_closed: bool,
        value: PieceValue,
    ) -> Self {
        Piece {
            lower,
            lower_closed: lower_closed && lower.is_some(),
            upper,
            upper_closed: upper_closed && upper.is_some(),
            value,
        }
    }

    /// The closed single point `{x}`.
    pub fn point(x: f64, value: f64) -> Self {
        Piece::new(Some(x), true, Some(x), true, PieceValue::Constant { value })
    }

    pub fn is_point(&self) -> bool {
        matches!((self.lower, self.upper), (Some(l), Some(u)) if l == u)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = match self.lower {
            None => true,
            Some(l) => x > l || (self.lower_closed && x == l),
        };
        let below = match self.upper {
            None => true,
            Some(u) => x < u || (self.upper_closed && x == u),
        };
        above && below
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.value.at(x)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SdError {
    #[error("row {row}, column {position}: {message}")]
    Parse {
        row: usize,
        position: usize,
        message: String,
    },
    #[error("function has no pieces")]
    EmptyFunction,
    #[error("piece {index} has an empty or malformed interval")]
    InvalidPiece { index: usize },
    #[error("pieces overlap at Δ = {at}")]
    OverlappingPieces { at: f64 },
    #[error("no piece covers Δ = {at}")]
    CoverageGap { at: f64 },
    #[error("value outside [-1, 1] near Δ = {at}")]
    ValueOutOfRange { at: f64 },
    #[error("function is not monotone around Δ = {at}")]
    NonMonotone { at: f64 },
    #[error("f(0) = {value} is negative")]
    NegativeAtZero { value: f64 },
    #[error("Δ = {delta} is outside the function domain")]
    OutOfDomain { delta: f64 },
    #[error("knots must have strictly increasing Δ (repeated at {at})")]
    DuplicateKnot { at: f64 },
    #[error("at least two knots are required")]
    TooFewKnots,
    #[error("a ranking needs at least two subsets")]
    DegenerateRanking,
    #[error("ranking subset {index} is empty")]
    EmptySubset { index: usize },
    #[error("expected {expected} blank counts between subsets, found {found}")]
    BlankCountMismatch { expected: usize, found: usize },
    #[error("threshold ordering violated: {0}")]
    ThresholdOrderViolation(String),
    #[error("invalid threshold input: {0}")]
    InvalidThresholdInput(String),
    #[error("invalid cards for component {component}: {message}")]
    InvalidCards { component: &'static str, message: String },
}

impl SdError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SdError::Parse { .. } => "PARSE_ERROR",
            SdError::EmptyFunction => "EMPTY_FUNCTION",
            SdError::InvalidPiece { .. } => "INVALID_PIECE",
            SdError::OverlappingPieces { .. } => "OVERLAPPING_PIECES",
            SdError::CoverageGap { .. } => "COVERAGE_GAP",
            SdError::ValueOutOfRange { .. } => "VALUE_OUT_OF_RANGE",
            SdError::NonMonotone { .. } => "NON_MONOTONE",
            SdError::NegativeAtZero { .. } => "NEGATIVE_AT_ZERO",
            SdError::OutOfDomain { .. } => "OUT_OF_DOMAIN",
            SdError::DuplicateKnot { .. } => "DUPLICATE_KNOT",
            SdError::TooFewKnots => "TOO_FEW_KNOTS",
            SdError::DegenerateRanking | SdError::EmptySubset { .. } => "DEGENERATE_RANKING",
            SdError::BlankCountMismatch { .. } => "BLANK_COUNT_MISMATCH",
            SdError::ThresholdOrderViolation(_) => "THRESHOLD_ORDER_VIOLATION",
            SdError::InvalidThresholdInput(_) => "INVALID_THRESHOLD_INPUT",
            SdError::InvalidCards { .. } => "INVALID_CARDS",
        }
    }
}

/// A validated per-criterion similarity-dissimilarity function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSdFunction")]
pub struct SdFunction {
    id: FunctionId,
    domain: DomainKind,
    pieces: Vec<Piece>,
}

#[derive(Deserialize)]
struct RawSdFunction {
    id: FunctionId,
    domain: DomainKind,
    pieces: Vec<Piece>,
}

impl TryFrom<RawSdFunction> for SdFunction {
    type Error = SdError;

    fn try_from(raw: RawSdFunction) -> Result<Self, SdError> {
        SdFunction::new(raw.id, raw.domain, raw.pieces)
    }
}

impl SdFunction {
    /// Sorts and validates `pieces`.
    pub fn new(id: impl Into<FunctionId>, domain: DomainKind, mut pieces: Vec<Piece>) -> Result<Self, SdError> {
        if pieces.is_empty() {
            return Err(SdError::EmptyFunction);
        }
        for (index, p) in pieces.iter_mut().enumerate() {
            *p = Piece::new(p.lower, p.lower_closed, p.upper, p.upper_closed, p.value);
            check_piece(index, p)?;
        }
        pieces.sort_by(|a, b| {
            let key = |p: &Piece| (p.lower.unwrap_or(f64::NEG_INFINITY), !p.lower_closed);
            let (ka, kb) = (key(a), key(b));
            ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1))
        });
        let f = SdFunction {
            id: id.into(),
            domain,
            pieces,
        };
        f.check_layout()?;
        let at_zero = f.eval(0.0).map_err(|_| SdError::CoverageGap { at: 0.0 })?;
        if at_zero < -TOLERANCE {
            return Err(SdError::NegativeAtZero { value: at_zero });
        }
        f.check_monotone()?;
        Ok(f)
    }

    pub fn id(&self) -> &FunctionId {
        &self.id
    }

    pub fn domain(&self) -> DomainKind {
        self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Same pieces under another id.
    pub fn renamed(&self, id: impl Into<FunctionId>) -> Self {
        SdFunction {
            id: id.into(),
            ..self.clone()
        }
    }

    /// Values within [`TOLERANCE`] of a breakpoint are evaluated at the breakpoint.
    pub fn eval(&self, delta: f64) -> Result<f64, SdError> {
        if delta.is_nan() {
            return Err(SdError::OutOfDomain { delta });
        }
        let x = self.snap(delta);
        self.pieces
            .iter()
            .find(|p| p.contains(x))
            .map(|p| p.eval(x).clamp(-1.0, 1.0))
            .ok_or(SdError::OutOfDomain { delta })
    }

    /// Splits `f(Δ)` into the similarity part `s ∈ [0, 1]` and the dissimilarity part `d ∈ [-1, 0]`.
    pub fn split(&self, delta: f64) -> Result<(f64, f64), SdError> {
        let v = self.eval(delta)?;
        Ok((v.max(0.0), v.min(0.0)))
    }

    /// Whether every reachable difference in `[-span, span]` has a value.
    pub fn covers_span(&self, span: f64) -> bool {
        match self.domain {
            DomainKind::Cardinal => self.eval(-span).is_ok() && self.eval(span).is_ok(),
            DomainKind::Ordinal => {
                let n = span as i64;
                (-n..=n).all(|k| self.eval(k as f64).is_ok())
            }
        }
    }

    fn snap(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| [p.lower, p.upper])
            .flatten()
            .find(|b| libm::fabs(x - b) <= TOLERANCE)
            .unwrap_or(x)
    }

    fn check_layout(&self) -> Result<(), SdError> {
        for pair in self.pieces.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let (Some(au), Some(bl)) = (a.upper, b.lower) else {
                let at = a.upper.or(b.lower).unwrap_or(0.0);
                return Err(SdError::OverlappingPieces { at });
            };
            if au > bl || (au == bl && a.upper_closed && b.lower_closed) {
                return Err(SdError::OverlappingPieces { at: bl });
            }
            if let Some(at) = self.gap_between(a, b, au, bl) {
                return Err(SdError::CoverageGap { at });
            }
        }
        Ok(())
    }

    fn gap_between(&self, a: &Piece, b: &Piece, au: f64, bl: f64) -> Option<f64> {
        match self.domain {
            DomainKind::Cardinal => {
                let touching = au == bl && (a.upper_closed || b.lower_closed);
                (!touching).then_some(au)
            }
            DomainKind::Ordinal => {
                let lo = libm::ceil(au);
                let hi = libm::floor(bl);
                if hi - lo > 2.0 {
                    return Some(lo + 1.0);
                }
                let mut k = lo;
                while k <= hi {
                    if !a.contains(k) && !b.contains(k) {
                        return Some(k);
                    }
                    k += 1.0;
                }
                None
            }
        }
    }

    fn check_monotone(&self) -> Result<(), SdError> {
        let samples = match self.domain {
            DomainKind::Cardinal => self.cardinal_samples(),
            DomainKind::Ordinal => self.ordinal_samples(),
        };
        let f0 = self.eval(0.0)?;
        for &(x, v) in &samples {
            if x == 0.0 && v > f0 + TOLERANCE {
                return Err(SdError::NonMonotone { at: 0.0 });
            }
        }
        for pair in samples.windows(2) {
            let ((x1, v1), (x2, v2)) = (pair[0], pair[1]);
            if x1 == 0.0 && x2 == 0.0 {
                continue;
            }
            if x2 <= 0.0 && v2 < v1 - TOLERANCE {
                return Err(SdError::NonMonotone { at: x2 });
            }
            if x1 >= 0.0 && v2 > v1 + TOLERANCE {
                return Err(SdError::NonMonotone { at: x1 });
            }
        }
        Ok(())
    }

    /// End-point values of every piece (limits for open ends), plus Δ = 0 inside a piece.
    fn cardinal_samples(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for p in &self.pieces {
            if let Some(l) = p.lower {
                out.push((l, p.eval(l)));
            }
            let inner_zero = p.lower.is_none_or(|l| l < 0.0) && p.upper.is_none_or(|u| u > 0.0);
            if inner_zero {
                out.push((0.0, p.eval(0.0)));
            }
            if let Some(u) = p.upper {
                out.push((u, p.eval(u)));
            }
        }
        out
    }

    fn ordinal_samples(&self) -> Vec<(f64, f64)> {
        let bounds = self.pieces.iter().flat_map(|p| [p.lower, p.upper]).flatten();
        let (lo, hi) = bounds.fold((0.0f64, 0.0f64), |(lo, hi), b| (lo.min(b), hi.max(b)));
        let lo = libm::floor(lo) - 1.0;
        let hi = libm::ceil(hi) + 1.0;
        if hi - lo > 100_000.0 {
            return self.cardinal_samples();
        }
        let mut out = Vec::new();
        let mut k = lo;
        while k <= hi {
            if let Some(p) = self.pieces.iter().find(|p| p.contains(k)) {
                out.push((k, p.eval(k)));
            }
            k += 1.0;
        }
        out
    }
}

fn check_piece(index: usize, p: &Piece) -> Result<(), SdError> {
    let finite = |b: Option<f64>| b.is_none_or(f64::is_finite);
    if !finite(p.lower) || !finite(p.upper) {
        return Err(SdError::InvalidPiece { index });
    }
    let values_finite = match p.value {
        PieceValue::Constant { value } => value.is_finite(),
        PieceValue::Affine { slope, intercept } => slope.is_finite() && intercept.is_finite(),
    };
    if !values_finite {
        return Err(SdError::InvalidPiece { index });
    }
    if let (Some(l), Some(u)) = (p.lower, p.upper) {
        if l > u || (l == u && !(p.lower_closed && p.upper_closed)) {
            return Err(SdError::InvalidPiece { index });
        }
    }
    let in_range = |v: f64| (-1.0 - TOLERANCE..=1.0 + TOLERANCE).contains(&v);
    for end in [p.lower, p.upper] {
        match end {
            Some(x) if !in_range(p.eval(x)) => return Err(SdError::ValueOutOfRange { at: x }),
            None if p.value.slope() != 0.0 => {
                let at = p.lower.or(p.upper).unwrap_or(0.0);
                return Err(SdError::ValueOutOfRange { at });
            }
            None if !in_range(p.eval(0.0)) => {
                let at = p.lower.or(p.upper).unwrap_or(0.0);
                return Err(SdError::ValueOutOfRange { at });
            }
            _ => {}
        }
    }
    Ok(())
}
