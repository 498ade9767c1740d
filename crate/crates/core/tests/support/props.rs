//! Property suites as plain functions, so they run both under `cargo test` and from
//! the acceptance harness.

use catsd_core::sdfunc::{
    assemble_sd, deck_intensities, fit_affine_threshold, format_sd_rows, parse_sd_rows, Component, DeckRanking,
    ThresholdValue,
};
use catsd_core::{
    check_non_negativity, classify, non_negativity_slacks, srf_weights, ClassifyOptions, CriterionId, DecisionModel,
    Exact, ReferenceAction, Scale, WeightElicitation,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use super::*;

pub const TOL: f64 = 1e-9;
pub const CASES: u32 = 1000;

/// Number of cases that passed, or the failure with its minimal input.
pub type Outcome = Result<u32, String>;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    let passed = std::cell::Cell::new(0u32);
    runner
        .run(&strategy, |v| {
            test(v)?;
            passed.set(passed.get() + 1);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(passed.get())
}

pub fn likeness_in_unit_interval(cases: u32) -> Outcome {
    run(cases, arb_small_case(), |case| {
        let report = classify(&case.model, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
        for a in &report.actions {
            prop_assert_eq!(a.assigned_to_dummy, a.accepted.is_empty());
            for c in &a.categories {
                for t in &c.comparisons {
                    prop_assert!(t.likeness >= -TOL && t.likeness <= 1.0 + TOL);
                    prop_assert!(t.s_h >= -TOL && t.s_h <= 1.0 + TOL);
                    prop_assert!(t.d >= -1.0 - TOL && t.d <= TOL);
                    for j in &t.criteria {
                        prop_assert!(j.s >= 0.0 && j.s <= 1.0 && j.d <= 0.0 && j.d >= -1.0);
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn classify_matches_oracle(cases: u32) -> Outcome {
    run(cases, arb_small_case(), |case| {
        let report = classify(&case.model, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
        let oracle = oracle_likeness(&case);
        let engine = engine_likeness(&report);
        for (i, a) in report.actions.iter().enumerate() {
            for (h, cat) in case.model.categories.iter().enumerate() {
                prop_assert!(
                    (oracle[i][h] - engine[i][h]).abs() <= TOL,
                    "{} {}: {} vs {}",
                    a.action,
                    cat.id,
                    oracle[i][h],
                    engine[i][h]
                );
                if (oracle[i][h] - cat.likeness_threshold).abs() > TOL {
                    prop_assert_eq!(a.categories[h].accepted, oracle[i][h] >= cat.likeness_threshold);
                }
            }
        }
        Ok(())
    })
}

pub fn interaction_free_is_weighted_mean(cases: u32) -> Outcome {
    run(cases, arb_small_case(), |case| {
        let mut model = case.model.clone();
        for c in &mut model.categories {
            c.interactions.clear();
        }
        let report = classify(&model, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
        for a in &report.actions {
            for (c, cat) in a.categories.iter().zip(&model.categories) {
                for t in &c.comparisons {
                    let num: f64 = t.criteria.iter().map(|j| cat.weights[&j.criterion] * j.s).sum();
                    let den: f64 = cat.weights.values().sum();
                    prop_assert!((t.s_h - num / den).abs() <= TOL);
                }
            }
        }
        Ok(())
    })
}

pub fn veto_forces_dummy(cases: u32) -> Outcome {
    run(cases, (arb_small_case(), 0usize..=20), |(case, pick)| {
        let mut case = case;
        prop_assume!(!case.actions.is_empty());
        let g1: CriterionId = crit_id(0).into();
        case.model.criteria[0].scale = Scale::Cardinal { min: 0.0, max: 10.0 };
        let veto = Tent {
            tp: 0.0,
            t: 0.0,
            up: 0.0,
            u: 0.0,
            vp: 0.5,
            v: 0.5,
        };
        let fid = case.model.bindings[&g1].clone();
        let slot = case.model.sd_functions.iter().position(|f| f.id() == &fid).unwrap();
        case.model.sd_functions[slot] = veto.function(fid.as_str());
        let refs: Vec<f64> = case
            .model
            .categories
            .iter()
            .flat_map(|c| c.reference_actions.iter().map(|r| r.performances[&g1]))
            .collect();
        let free: Vec<f64> = (0..=20)
            .map(|k| f64::from(k) / 2.0)
            .filter(|x| refs.iter().all(|r| (x - r).abs() > 0.5))
            .collect();
        let x = free[pick % free.len()];
        let a = case.actions[0].id.clone();
        case.table.insert(a.clone(), g1, x);
        let report = classify(&case.model, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
        let outcome = report.action(&a).unwrap();
        prop_assert!(outcome.assigned_to_dummy);
        prop_assert!(outcome.categories.iter().all(|c| c.likeness == 0.0));
        Ok(())
    })
}

pub fn rescaling_a_category_changes_nothing(cases: u32) -> Outcome {
    run(
        cases,
        (arb_small_case(), 0usize..3, 0.1f64..10.0),
        |(case, which, factor)| {
            let h = which % case.model.categories.len();
            let mut scaled = case.model.clone();
            let cat = &mut scaled.categories[h];
            for w in cat.weights.values_mut() {
                *w *= factor;
            }
            for c in &mut cat.interactions {
                c.value *= factor;
            }
            let before = classify(&case.model, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
            let after = classify(&scaled, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
            for (x, y) in before.actions.iter().zip(&after.actions) {
                for (cx, cy) in x.categories.iter().zip(&y.categories) {
                    prop_assert!((cx.likeness - cy.likeness).abs() <= TOL);
                    if (cx.likeness - cx.threshold).abs() > TOL {
                        prop_assert_eq!(cx.accepted, cy.accepted);
                    }
                }
            }
            Ok(())
        },
    )
}

pub fn raising_lambda_never_adds(cases: u32) -> Outcome {
    run(cases, (arb_small_case(), 0usize..3, 0u8..=50), |(case, which, bump)| {
        let h = which % case.model.categories.len();
        let mut strict = case.model.clone();
        let lam = &mut strict.categories[h].likeness_threshold;
        *lam = (*lam + f64::from(bump) / 100.0).min(1.0);
        let loose = classify(&case.model, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
        let tight = classify(&strict, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
        for (x, y) in loose.actions.iter().zip(&tight.actions) {
            prop_assert!(y.accepted.iter().all(|c| x.accepted.contains(c)));
        }
        Ok(())
    })
}

pub fn extra_reference_never_lowers_likeness(cases: u32) -> Outcome {
    run(
        cases,
        (arb_small_case(), 0usize..3, prop::collection::vec(0u8..=20, 3)),
        |(case, which, raw)| {
            let h = which % case.model.categories.len();
            let mut bigger = case.model.clone();
            let performances = bigger
                .criteria
                .iter()
                .zip(&raw)
                .map(|(c, &r)| {
                    let v = match c.scale {
                        Scale::Ordinal { levels } => f64::from(u32::from(r) % levels + 1),
                        _ => f64::from(r) / 2.0,
                    };
                    (c.id.clone(), v)
                })
                .collect();
            bigger.categories[h].reference_actions.push(ReferenceAction {
                id: "extra".into(),
                performances,
            });
            let before = classify(&case.model, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
            let after = classify(&bigger, &case.actions, &case.table, ClassifyOptions::default()).unwrap();
            for (x, y) in before.actions.iter().zip(&after.actions) {
                prop_assert!(y.categories[h].likeness >= x.categories[h].likeness);
            }
            Ok(())
        },
    )
}

pub fn non_negativity_ignores_listing_order(cases: u32) -> Outcome {
    run(cases, (arb_small_case(), any::<u64>()), |(case, seed)| {
        for cat in &case.model.categories {
            let mut shuffled = cat.clone();
            let n = shuffled.interactions.len();
            if n > 1 {
                shuffled.interactions.rotate_left((seed as usize) % n);
                shuffled.interactions.reverse();
            }
            let a = non_negativity_slacks(cat, &case.model.criteria).unwrap();
            let b = non_negativity_slacks(&shuffled, &case.model.criteria).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for ((ia, sa), (ib, sb)) in a.iter().zip(&b) {
                prop_assert_eq!(ia, ib);
                prop_assert!((sa - sb).abs() <= TOL);
            }
            let ca: Vec<_> = check_non_negativity(cat, &case.model.criteria)
                .unwrap()
                .into_iter()
                .map(|x| x.0)
                .collect();
            let cb: Vec<_> = check_non_negativity(&shuffled, &case.model.criteria)
                .unwrap()
                .into_iter()
                .map(|x| x.0)
                .collect();
            prop_assert_eq!(ca, cb);
            for x in &case.model.criteria {
                for y in &case.model.criteria {
                    prop_assert_eq!(
                        cat.mutual_coefficient(&x.id, &y.id),
                        cat.mutual_coefficient(&y.id, &x.id)
                    );
                }
            }
        }
        Ok(())
    })
}

pub fn model_serialization_round_trips(cases: u32) -> Outcome {
    run(cases, arb_small_case(), |case| {
        let text = serde_json::to_string(&case.model).unwrap();
        let back: DecisionModel = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, case.model);
        Ok(())
    })
}

pub fn assembled_functions_are_monotone_and_bounded(cases: u32) -> Outcome {
    run(
        cases,
        (arb_assembled(), prop::collection::vec(-40i32..=40, 2..20)),
        |((set, cards), xs)| {
            let f = assemble_sd("f", &set, Exact::ZERO, &cards).unwrap();
            let mut xs: Vec<f64> = xs.into_iter().map(|x| f64::from(x) / 4.0).collect();
            xs.sort_by(f64::total_cmp);
            for w in xs.windows(2) {
                let (a, b) = (f.eval(w[0]).unwrap(), f.eval(w[1]).unwrap());
                prop_assert!((-1.0..=1.0).contains(&a));
                if w[1] <= 0.0 {
                    prop_assert!(a <= b + TOL);
                }
                if w[0] >= 0.0 {
                    prop_assert!(a + TOL >= b);
                }
            }
            Ok(())
        },
    )
}

pub fn format_then_parse_is_identity(cases: u32) -> Outcome {
    run(cases, arb_assembled(), |(set, cards)| {
        let f = assemble_sd("f", &set, Exact::ZERO, &cards).unwrap();
        let rows = format_sd_rows(&f);
        let back = parse_sd_rows("f", Some(f.domain()), &rows).unwrap();
        prop_assert_eq!(back, f);
        Ok(())
    })
}

pub fn affine_fit_hits_both_levels(cases: u32) -> Outcome {
    run(
        cases,
        (-500i64..500, -500i64..500, 0i64..200, 0i64..200, 1i64..20),
        |(l1, l2, d1, d2, den)| {
            prop_assume!(l1 != l2);
            let ex = |n: i64| Exact::new(i128::from(n), i128::from(den));
            let fit = fit_affine_threshold(ex(l1), ex(d1), ex(l2), ex(d2)).unwrap();
            prop_assert_eq!(fit.at(ex(l1)), ex(d1));
            prop_assert_eq!(fit.at(ex(l2)), ex(d2));
            prop_assert_eq!(matches!(fit, ThresholdValue::Constant { .. }), d1 == d2);
            Ok(())
        },
    )
}

pub fn deck_matches_oracle(cases: u32) -> Outcome {
    run(cases, (arb_blanks(8, 4), 0usize..4), |(blanks, which)| {
        let component = [Component::F1, Component::F2, Component::F3, Component::F4][which];
        let ranking = DeckRanking::new((0..=blanks.len()).map(|i| vec![i]).collect(), blanks.clone());
        let got = deck_intensities(&ranking, component).unwrap();
        let want = oracle_deck(&blanks, component);
        prop_assert_eq!(got.iter().map(|&x| as_pair(x)).collect::<Vec<_>>(), want);
        let (first, last) = component.endpoints();
        prop_assert_eq!(got[0], first);
        prop_assert_eq!(*got.last().unwrap(), last);
        let h: u32 = blanks.iter().map(|b| b + 1).sum();
        for (k, w) in got.windows(2).enumerate() {
            let step = Exact::new(i128::from(blanks[k] + 1), i128::from(h));
            prop_assert_eq!((w[1] - w[0]).abs(), step);
        }
        Ok(())
    })
}

pub fn srf_top_is_z_and_increasing(cases: u32) -> Outcome {
    run(cases, (arb_blanks(7, 5), 2i64..40, 1i64..4), |(blanks, zn, zd)| {
        let z = Exact::new(i128::from(zn), i128::from(zd));
        prop_assume!(z > Exact::ONE);
        let ranking = DeckRanking::new(
            (0..=blanks.len())
                .map(|i| vec![CriterionId::new(format!("c{i}"))])
                .collect(),
            blanks.clone(),
        );
        let w = srf_weights(&WeightElicitation {
            ranking: ranking.clone(),
            z,
        })
        .unwrap();
        prop_assert_eq!(w.subset_weights[0], Exact::ONE);
        prop_assert_eq!(*w.subset_weights.last().unwrap(), z);
        prop_assert!(w.subset_weights.windows(2).all(|p| p[0] < p[1]));
        let padded = DeckRanking::new(ranking.subsets.clone(), blanks.iter().map(|b| b + 1).collect());
        let p = srf_weights(&WeightElicitation { ranking: padded, z }).unwrap();
        prop_assert_eq!(p.subset_weights[0], Exact::ONE);
        prop_assert_eq!(*p.subset_weights.last().unwrap(), z);
        Ok(())
    })
}

fn blank_grid(r: usize, max_blank: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 1..r {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=max_blank).map(move |b| {
                    let mut v = prefix.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    out
}

/// Every ranking of up to four subsets with at most two blanks per gap, z from 2 to 8.
/// The case count is fixed by the grid.
pub fn srf_exhaustive_grid(_cases: u32) -> Outcome {
    let mut checked = 0;
    for r in 1..=4usize {
        for blanks in blank_grid(r, 2) {
            for z in 2..=8i128 {
                let subsets: Vec<Vec<CriterionId>> = (0..r).map(|i| vec![format!("g{i}").into()]).collect();
                let e = WeightElicitation {
                    ranking: DeckRanking::new(subsets, blanks.clone()),
                    z: Exact::integer(z),
                };
                let w = srf_weights(&e).map_err(|e| e.to_string())?;
                let got: Vec<(i128, i128)> = w.subset_weights.iter().map(|&k| as_pair(k)).collect();
                if got != oracle_srf(&blanks, z) {
                    return Err(format!(
                        "blanks {blanks:?}, z {z}: {got:?} vs {:?}",
                        oracle_srf(&blanks, z)
                    ));
                }
                if r > 1 && *w.subset_weights.last().unwrap() != Exact::integer(z) {
                    return Err(format!("blanks {blanks:?}, z {z}: top weight is not z"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

pub type Suite = fn(u32) -> Outcome;

pub const SUITES: &[(&str, Suite)] = &[
    ("likeness_in_unit_interval", likeness_in_unit_interval),
    ("classify_matches_oracle", classify_matches_oracle),
    ("interaction_free_is_weighted_mean", interaction_free_is_weighted_mean),
    ("veto_forces_dummy", veto_forces_dummy),
    (
        "rescaling_a_category_changes_nothing",
        rescaling_a_category_changes_nothing,
    ),
    ("raising_lambda_never_adds", raising_lambda_never_adds),
    (
        "extra_reference_never_lowers_likeness",
        extra_reference_never_lowers_likeness,
    ),
    (
        "non_negativity_ignores_listing_order",
        non_negativity_ignores_listing_order,
    ),
    ("model_serialization_round_trips", model_serialization_round_trips),
    (
        "assembled_functions_are_monotone_and_bounded",
        assembled_functions_are_monotone_and_bounded,
    ),
    ("format_then_parse_is_identity", format_then_parse_is_identity),
    ("affine_fit_hits_both_levels", affine_fit_hits_both_levels),
    ("deck_matches_oracle", deck_matches_oracle),
    ("srf_top_is_z_and_increasing", srf_top_is_z_and_increasing),
    ("srf_exhaustive_grid", srf_exhaustive_grid),
];
