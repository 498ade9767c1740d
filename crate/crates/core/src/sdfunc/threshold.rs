use alloc::format;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::SdError;
use crate::exact::Exact;

/// A threshold as a function of the reference level `g(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdValue {
    Constant {
        value: Exact,
    },
    /// `alpha * g(b) + beta`
    Affine {
        alpha: Exact,
        beta: Exact,
    },
}

impl ThresholdValue {
    pub fn constant(value: impl Into<Exact>) -> Self {
        ThresholdValue::Constant { value: value.into() }
    }

    pub fn at(&self, level: Exact) -> Exact {
        match *self {
            ThresholdValue::Constant { value } => value,
            ThresholdValue::Affine { alpha, beta } => alpha * level + beta,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ThresholdValue::Constant { .. })
    }
}

/// `2/13·g(b) − 10/13`, `20`, `g(b) + 1`.
impl fmt::Display for ThresholdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ThresholdValue::Constant { value } => write!(f, "{value}"),
            ThresholdValue::Affine { alpha, beta } => {
                if alpha == Exact::ONE {
                    f.write_str("g(b)")?;
                } else if alpha == -Exact::ONE {
                    f.write_str("−g(b)")?;
                } else if alpha.is_negative() {
                    write!(f, "−{}·g(b)", alpha.abs())?;
                } else {
                    write!(f, "{alpha}·g(b)")?;
                }
                if beta.is_negative() {
                    write!(f, " − {}", beta.abs())
                } else if !beta.is_zero() {
                    write!(f, " + {beta}")
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Solves `low_diff = low_level·α + β`, `high_diff = high_level·α + β`.
///
/// Equal differences give a constant threshold.
pub fn fit_affine_threshold(
    low_level: Exact,
    low_diff: Exact,
    high_level: Exact,
    high_diff: Exact,
) -> Result<ThresholdValue, SdError> {
    if low_level == high_level {
        return Err(SdError::InvalidThresholdInput(format!(
            "the two reference levels must differ (both are {low_level})"
        )));
    }
    if low_diff.is_negative() || high_diff.is_negative() {
        return Err(SdError::InvalidThresholdInput(
            "threshold differences must be non-negative".into(),
        ));
    }
    if low_diff == high_diff {
        return Ok(ThresholdValue::Constant { value: low_diff });
    }
    let alpha = (high_diff - low_diff) / (high_level - low_level);
    let beta = low_diff - low_level * alpha;
    Ok(ThresholdValue::Affine { alpha, beta })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    T,
    TPrime,
    U,
    UPrime,
    V,
    VPrime,
}

impl ThresholdKind {
    pub const ALL: [ThresholdKind; 6] = [
        ThresholdKind::T,
        ThresholdKind::TPrime,
        ThresholdKind::U,
        ThresholdKind::UPrime,
        ThresholdKind::V,
        ThresholdKind::VPrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThresholdKind::T => "t",
            ThresholdKind::TPrime => "t'",
            ThresholdKind::U => "u",
            ThresholdKind::UPrime => "u'",
            ThresholdKind::V => "v",
            ThresholdKind::VPrime => "v'",
        }
    }
}

/// Unprimed thresholds bound positive differences, primed ones negative differences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub t: ThresholdValue,
    pub t_prime: ThresholdValue,
    pub u: ThresholdValue,
    pub u_prime: ThresholdValue,
    pub v: ThresholdValue,
    pub v_prime: ThresholdValue,
}

/// A [`ThresholdSet`] evaluated at one reference level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdLevels {
    pub t: Exact,
    pub t_prime: Exact,
    pub u: Exact,
    pub u_prime: Exact,
    pub v: Exact,
    pub v_prime: Exact,
}

impl ThresholdSet {
    /// Symmetric constant thresholds.
    pub fn constant(t: Exact, u: Exact, v: Exact) -> Self {
        let c = ThresholdValue::constant;
        ThresholdSet {
            t: c(t),
            t_prime: c(t),
            u: c(u),
            u_prime: c(u),
            v: c(v),
            v_prime: c(v),
        }
    }

    pub fn get(&self, kind: ThresholdKind) -> ThresholdValue {
        match kind {
            ThresholdKind::T => self.t,
            ThresholdKind::TPrime => self.t_prime,
            ThresholdKind::U => self.u,
            ThresholdKind::UPrime => self.u_prime,
            ThresholdKind::V => self.v,
            ThresholdKind::VPrime => self.v_prime,
        }
    }

    /// Evaluates every threshold and checks `v ≥ u ≥ t ≥ 0` on both sides.
    pub fn at(&self, level: Exact) -> Result<ThresholdLevels, SdError> {
        let l = ThresholdLevels {
            t: self.t.at(level),
            t_prime: self.t_prime.at(level),
            u: self.u.at(level),
            u_prime: self.u_prime.at(level),
            v: self.v.at(level),
            v_prime: self.v_prime.at(level),
        };
        for (name, t, u, v) in [("", l.t, l.u, l.v), ("'", l.t_prime, l.u_prime, l.v_prime)] {
            if t.is_negative() {
                return Err(SdError::ThresholdOrderViolation(format!(
                    "t{name} = {t} < 0 at g(b) = {level}"
                )));
            }
            if u < t {
                return Err(SdError::ThresholdOrderViolation(format!(
                    "u{name} = {u} < t{name} = {t} at g(b) = {level}"
                )));
            }
            if v < u {
                return Err(SdError::ThresholdOrderViolation(format!(
                    "v{name} = {v} < u{name} = {u} at g(b) = {level}"
                )));
            }
        }
        Ok(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn x(n: i64) -> Exact {
        Exact::from(n)
    }

    #[test]
    fn fits_affine_and_constant() {
        let t = fit_affine_threshold(x(70), x(10), x(135), x(25)).unwrap();
        assert_eq!(
            t,
            ThresholdValue::Affine {
                alpha: Exact::new(3, 13),
                beta: Exact::new(-80, 13)
            }
        );
        assert_eq!(t.at(x(70)), x(10));
        assert_eq!(t.at(x(135)), x(25));
        assert_eq!(
            fit_affine_threshold(x(70), x(20), x(135), x(20)).unwrap(),
            ThresholdValue::constant(20)
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            fit_affine_threshold(x(5), x(1), x(5), x(2)).unwrap_err().code(),
            "INVALID_THRESHOLD_INPUT"
        );
        assert_eq!(
            fit_affine_threshold(x(5), x(-1), x(6), x(2)).unwrap_err().code(),
            "INVALID_THRESHOLD_INPUT"
        );
    }

    #[test]
    fn display() {
        let t = ThresholdValue::Affine {
            alpha: Exact::new(2, 13),
            beta: Exact::new(-10, 13),
        };
        assert_eq!(t.to_string(), "2/13·g(b) − 10/13");
        assert_eq!(ThresholdValue::constant(20).to_string(), "20");
        let g = ThresholdValue::Affine {
            alpha: Exact::ONE,
            beta: Exact::ONE,
        };
        assert_eq!(g.to_string(), "g(b) + 1");
    }

    #[test]
    fn ordering() {
        let ok = ThresholdSet::constant(x(1), x(2), x(3));
        assert_eq!(ok.at(x(0)).unwrap().u_prime, x(2));
        let mut bad = ok;
        bad.u = ThresholdValue::constant(0);
        assert_eq!(bad.at(x(0)).unwrap_err().code(), "THRESHOLD_ORDER_VIOLATION");
        let mut varying = ok;
        varying.t_prime = ThresholdValue::Affine {
            alpha: Exact::ONE,
            beta: x(-10),
        };
        assert!(varying.at(x(11)).is_ok());
        assert!(varying.at(x(5)).is_err());
        assert!(varying.at(x(13)).is_err());
    }
}
