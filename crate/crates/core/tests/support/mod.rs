//! Test oracles and generators shared by the core tests and the acceptance suite.
//!
//! Oracles are written from the method's formulas directly, with plain
//! indices and loops, and never call the engine's own aggregation code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use catsd_core::engine::AssignmentReport;
use catsd_core::sdfunc::{assemble_sd, Component, ComponentRankings, DeckRanking, ThresholdSet, ThresholdValue};
use catsd_core::{
    Action, CategoryModel, Criterion, DecisionModel, Direction, Exact, InteractionCoefficient, InteractionKind,
    PerformanceTable, ReferenceAction, Scale, SdFunction,
};
use proptest::prelude::*;

pub mod case_study;
pub mod props;

/// Symmetric-shape SD function parameters: the linear default of every component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tent {
    pub tp: f64,
    pub t: f64,
    pub up: f64,
    pub u: f64,
    pub vp: f64,
    pub v: f64,
}

impl Tent {
    /// Direct case analysis of the threshold zones.
    pub fn eval(&self, x: f64) -> f64 {
        if x == 0.0 {
            let left = if self.tp > 0.0 {
                1.0
            } else if self.vp > 0.0 {
                0.0
            } else {
                -1.0
            };
            let right = if self.t > 0.0 {
                1.0
            } else if self.v > 0.0 {
                0.0
            } else {
                -1.0
            };
            return f64::max(left, right);
        }
        if x < 0.0 {
            if x <= -self.vp {
                -1.0
            } else if x <= -self.up {
                -1.0 + (x + self.vp) / (self.vp - self.up)
            } else if x <= -self.tp {
                0.0
            } else {
                (x + self.tp) / self.tp
            }
        } else if x <= self.t {
            1.0 - x / self.t
        } else if x <= self.u {
            0.0
        } else if x <= self.v {
            -(x - self.u) / (self.v - self.u)
        } else {
            -1.0
        }
    }

    pub fn thresholds(&self) -> ThresholdSet {
        let c = |x: f64| ThresholdValue::Constant {
            value: Exact::from_f64(x).unwrap(),
        };
        ThresholdSet {
            t: c(self.t),
            t_prime: c(self.tp),
            u: c(self.u),
            u_prime: c(self.up),
            v: c(self.v),
            v_prime: c(self.vp),
        }
    }

    pub fn function(&self, id: &str) -> SdFunction {
        assemble_sd(id, &self.thresholds(), Exact::ZERO, &ComponentRankings::default()).unwrap()
    }
}

/// Half-unit thresholds with `f(0) = 1`.
pub fn arb_tent() -> impl Strategy<Value = Tent> {
    (1u8..=6, 0u8..=4, 0u8..=4, 1u8..=6, 0u8..=4, 0u8..=4).prop_map(|(a, b, c, d, e, f)| {
        let h = |n: u8| f64::from(n) / 2.0;
        Tent {
            tp: h(a),
            up: h(a + b),
            vp: h(a + b + c),
            t: h(d),
            u: h(d + e),
            v: h(d + e + f),
        }
    })
}

/// A small random model whose SD functions are [`Tent`]s.
#[derive(Clone, Debug)]
pub struct SmallCase {
    pub model: DecisionModel,
    pub actions: Vec<Action>,
    pub table: PerformanceTable,
    pub tents: Vec<Tent>,
}

pub fn crit_id(j: usize) -> String {
    format!("g{}", j + 1)
}

#[derive(Clone, Debug)]
struct RawCategory {
    refs: Vec<Vec<u8>>,
    weights: Vec<u8>,
    pair_kinds: Vec<(u8, u8)>,
    lambda: u8,
}

fn arb_category(n: usize) -> impl Strategy<Value = RawCategory> {
    (
        prop::collection::vec(prop::collection::vec(0u8..=20, n), 1..=2),
        prop::collection::vec(2u8..=20, n),
        prop::collection::vec((0u8..5, 1u8..=10), n * (n - 1) / 2),
        50u8..=100,
    )
        .prop_map(|(refs, weights, pair_kinds, lambda)| RawCategory {
            refs,
            weights,
            pair_kinds,
            lambda,
        })
}

fn value_on(ordinal: bool, raw: u8) -> f64 {
    if ordinal {
        f64::from(raw % 5 + 1)
    } else {
        f64::from(raw) / 2.0
    }
}

pub fn arb_small_case() -> impl Strategy<Value = SmallCase> {
    (1usize..=3, 1usize..=3, 0usize..=4)
        .prop_flat_map(|(n, q, m)| {
            (
                prop::collection::vec((any::<bool>(), arb_tent()), n),
                prop::collection::vec(arb_category(n), q),
                prop::collection::vec(prop::collection::vec(0u8..=20, n), m),
            )
        })
        .prop_map(|(crits, cats, perfs)| build_case(&crits, &cats, &perfs))
}

fn build_case(crits: &[(bool, Tent)], cats: &[RawCategory], perfs: &[Vec<u8>]) -> SmallCase {
    let n = crits.len();
    let criteria: Vec<Criterion> = crits
        .iter()
        .enumerate()
        .map(|(j, &(ordinal, _))| {
            let scale = if ordinal {
                Scale::Ordinal { levels: 5 }
            } else {
                Scale::Cardinal { min: 0.0, max: 10.0 }
            };
            Criterion::new(crit_id(j), Direction::Maximize, scale)
        })
        .collect();
    let tents: Vec<Tent> = crits.iter().map(|c| c.1).collect();
    let sd_functions = tents
        .iter()
        .enumerate()
        .map(|(j, t)| t.function(&format!("f{}", j + 1)))
        .collect();
    let bindings = (0..n)
        .map(|j| (crit_id(j).into(), format!("f{}", j + 1).into()))
        .collect();
    let row = |raw: &[u8]| -> BTreeMap<_, _> {
        raw.iter()
            .enumerate()
            .map(|(j, &r)| (crit_id(j).into(), value_on(crits[j].0, r)))
            .collect()
    };
    let categories = cats
        .iter()
        .enumerate()
        .map(|(h, raw)| {
            let weights: Vec<f64> = raw.weights.iter().map(|&w| f64::from(w) / 4.0).collect();
            let min_w = weights.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut interactions = Vec::new();
            let mut pair = 0;
            for j in 0..n {
                for l in j + 1..n {
                    let (kind, mag) = raw.pair_kinds[pair];
                    pair += 1;
                    let frac = f64::from(mag) / 10.0;
                    let negative = -frac * 0.3 * min_w;
                    let (a, b) = (crit_id(j), crit_id(l));
                    match kind {
                        1 => interactions.push(InteractionCoefficient::new(
                            InteractionKind::MutualStrengthening,
                            a,
                            b,
                            frac * 2.0,
                        )),
                        2 => interactions.push(InteractionCoefficient::new(
                            InteractionKind::MutualWeakening,
                            a,
                            b,
                            negative,
                        )),
                        3 => interactions.push(InteractionCoefficient::new(
                            InteractionKind::Antagonistic,
                            a,
                            b,
                            negative,
                        )),
                        4 => interactions.push(InteractionCoefficient::new(
                            InteractionKind::Antagonistic,
                            b,
                            a,
                            negative,
                        )),
                        _ => {}
                    }
                }
            }
            CategoryModel {
                id: format!("c{}", h + 1).into(),
                name: format!("Category {}", h + 1),
                reference_actions: raw
                    .refs
                    .iter()
                    .enumerate()
                    .map(|(i, r)| ReferenceAction {
                        id: format!("b{}{}", h + 1, i + 1).into(),
                        performances: row(r),
                    })
                    .collect(),
                weights: weights
                    .iter()
                    .enumerate()
                    .map(|(j, &w)| (crit_id(j).into(), w))
                    .collect(),
                interactions,
                likeness_threshold: f64::from(raw.lambda) / 100.0,
            }
        })
        .collect();
    let actions: Vec<Action> = (0..perfs.len()).map(|i| Action::new(format!("a{}", i + 1))).collect();
    let mut table = PerformanceTable::default();
    for (a, raw) in actions.iter().zip(perfs) {
        table.rows.insert(a.id.clone(), row(raw));
    }
    let model = DecisionModel {
        criteria,
        sd_functions,
        bindings,
        categories,
        dummy_category_name: "Non-assigned".into(),
    };
    SmallCase {
        model,
        actions,
        table,
        tents,
    }
}

/// `s^h`, `K^h`, `d`, `δ` for one pair, written with index loops over coefficient matrices.
#[derive(Clone, Copy, Debug)]
pub struct OracleComparison {
    pub s_h: f64,
    pub k_h: f64,
    pub d: f64,
    pub likeness: f64,
}

pub fn oracle_compare(
    weights: &[f64],
    s: &[f64],
    d: &[f64],
    mutual: &[Vec<f64>],
    antagonistic: &[Vec<f64>],
) -> OracleComparison {
    let n = weights.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        num += weights[j] * s[j];
        den += weights[j];
    }
    for j in 0..n {
        for l in (j + 1)..n {
            num += s[j] * s[l] * mutual[j][l];
            den += s[j] * s[l] * mutual[j][l];
        }
    }
    for j in 0..n {
        for p in 0..n {
            num += s[j] * d[p].abs() * antagonistic[j][p];
            den += s[j] * d[p].abs() * antagonistic[j][p];
        }
    }
    let s_h = num / den;
    let mut prod = 1.0;
    for &dj in d {
        prod *= 1.0 + dj;
    }
    let dd = prod - 1.0;
    OracleComparison {
        s_h,
        k_h: den,
        d: dd,
        likeness: s_h * (1.0 + dd),
    }
}

/// `δ(a, B_h)` per category for each action, straight from the case's tents.
pub fn oracle_likeness(case: &SmallCase) -> Vec<Vec<f64>> {
    let m = &case.model;
    let n = m.criteria.len();
    let index = |id: &str| (0..n).find(|&j| crit_id(j) == id).unwrap();
    case.actions
        .iter()
        .map(|a| {
            m.categories
                .iter()
                .map(|cat| {
                    let weights: Vec<f64> = (0..n).map(|j| cat.weights[crit_id(j).as_str()]).collect();
                    let mut mutual = vec![vec![0.0; n]; n];
                    let mut antagonistic = vec![vec![0.0; n]; n];
                    for c in &cat.interactions {
                        let (j, l) = (index(c.first.as_str()), index(c.second.as_str()));
                        match c.kind {
                            InteractionKind::Antagonistic => antagonistic[j][l] = c.value,
                            _ => {
                                mutual[j.min(l)][j.max(l)] = c.value;
                            }
                        }
                    }
                    let mut best = f64::NEG_INFINITY;
                    for r in &cat.reference_actions {
                        let mut s = vec![0.0; n];
                        let mut d = vec![0.0; n];
                        for j in 0..n {
                            let ga = case.table.rows[&a.id][crit_id(j).as_str()];
                            let gb = r.performances[crit_id(j).as_str()];
                            let f = case.tents[j].eval(ga - gb);
                            if f > 0.0 {
                                s[j] = f;
                            } else {
                                d[j] = f;
                            }
                        }
                        let o = oracle_compare(&weights, &s, &d, &mutual, &antagonistic);
                        if o.likeness > best {
                            best = o.likeness;
                        }
                    }
                    best
                })
                .collect()
        })
        .collect()
}

/// Engine likeness matrix in the same layout as [`oracle_likeness`].
pub fn engine_likeness(report: &AssignmentReport) -> Vec<Vec<f64>> {
    report
        .actions
        .iter()
        .map(|a| a.categories.iter().map(|c| c.likeness).collect())
        .collect()
}

/// Revised Simos weights as reduced `(numerator, denominator)` pairs, from integer `z`.
///
/// `k(S^k) = 1 + (z−1)/e · Σ_{i<k}(eⁱ+1)` expanded to `(e + (z−1)·c_k) / e`.
pub fn oracle_srf(blanks: &[u32], z: i128) -> Vec<(i128, i128)> {
    let r = blanks.len() + 1;
    let mut e: i128 = 0;
    for i in 0..r - 1 {
        e += i128::from(blanks[i]) + 1;
    }
    let mut out = Vec::new();
    for k in 0..r {
        let mut c: i128 = 0;
        for i in 0..k {
            c += i128::from(blanks[i]) + 1;
        }
        if e == 0 {
            out.push((1, 1));
        } else {
            out.push(reduce(e + (z - 1) * c, e));
        }
    }
    out
}

/// Deck intensities as reduced fractions, step by step from the endpoint table.
pub fn oracle_deck(blanks: &[u32], component: Component) -> Vec<(i128, i128)> {
    let r = blanks.len() + 1;
    let mut h: i128 = 0;
    for i in 0..r - 1 {
        h += i128::from(blanks[i]) + 1;
    }
    let (start, sign) = match component {
        Component::F1 => (-1, 1),
        Component::F2 => (0, 1),
        Component::F3 => (1, -1),
        Component::F4 => (0, -1),
    };
    let mut out = Vec::new();
    for k in 0..r {
        let mut c: i128 = 0;
        for i in 0..k {
            c += i128::from(blanks[i]) + 1;
        }
        // start + sign·c/h
        out.push(reduce(start * h + sign * c, h));
    }
    out
}

pub fn reduce(n: i128, d: i128) -> (i128, i128) {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(n, d).max(1);
    let s = if d < 0 { -1 } else { 1 };
    (s * n / g, s * d / g)
}

pub fn as_pair(x: Exact) -> (i128, i128) {
    (x.numerator(), x.denominator())
}

/// Random deck ranking over `r` singleton subsets.
pub fn arb_blanks(max_r: usize, max_blank: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max_blank, 1..max_r)
}

/// Cards on the half-unit grid of `[lo, hi]`, both ends included, at least two subsets.
pub fn arb_cards(lo: i64, hi: i64) -> BoxedStrategy<Option<DeckRanking<Exact>>> {
    if hi - lo < 1 {
        return Just(None).boxed();
    }
    let interior = (hi - lo - 1) as usize;
    (
        prop::collection::vec(any::<bool>(), interior),
        prop::collection::vec(any::<bool>(), interior + 1),
        prop::collection::vec(0u32..=3, interior + 1),
        any::<bool>(),
    )
        .prop_map(move |(keep, cut, blank, use_cards)| {
            if !use_cards {
                return None;
            }
            let mut points = vec![lo];
            points.extend((lo + 1..hi).zip(&keep).filter(|(_, &k)| k).map(|(p, _)| p));
            points.push(hi);
            let mut subsets: Vec<Vec<Exact>> = vec![vec![Exact::new(i128::from(lo), 2)]];
            let mut blanks = Vec::new();
            for (i, &p) in points.iter().enumerate().skip(1) {
                let last = i == points.len() - 1;
                if cut[i - 1] || last {
                    subsets.push(Vec::new());
                    blanks.push(blank[i - 1]);
                }
                subsets.last_mut().unwrap().push(Exact::new(i128::from(p), 2));
            }
            Some(DeckRanking::new(subsets, blanks))
        })
        .boxed()
}

/// Threshold set plus per-component cards on the half-unit grid.
pub fn arb_assembled() -> impl Strategy<Value = (ThresholdSet, ComponentRankings)> {
    arb_tent().prop_flat_map(|tent| {
        let h = |x: f64| (x * 2.0) as i64;
        (
            Just(tent),
            arb_cards(-h(tent.vp), -h(tent.up)),
            arb_cards(-h(tent.tp), 0),
            arb_cards(0, h(tent.t)),
            arb_cards(h(tent.u), h(tent.v)),
        )
            .prop_map(|(tent, f1, f2, f3, f4)| (tent.thresholds(), ComponentRankings { f1, f2, f3, f4 }))
    })
}
