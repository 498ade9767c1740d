//! The Special Forces recruitment case, written out in code.

use std::collections::BTreeMap;

use catsd_core::sdfunc::{parse_sd_rows, DomainKind};
use catsd_core::{
    Action, CategoryModel, Criterion, DecisionModel, Direction, InteractionCoefficient, InteractionKind,
    PerformanceTable, ReferenceAction, Scale, SdFunction,
};

pub const CRITERIA: [(&str, &str); 9] = [
    ("g1", "PF"),
    ("g2", "Intel"),
    ("g3", "NR"),
    ("g4", "SA"),
    ("g5", "MechR"),
    ("g6", "VP"),
    ("g7", "PmA"),
    ("g8", "Pers"),
    ("g9", "Med"),
];

pub const F1_ROWS: [(&str, &str); 10] = [
    ("d <= -6", "-1"),
    ("-6 < d <= -3", "d/3 + 1"),
    ("-3 < d <= -2", "0"),
    ("-2 < d <= 0", "d/2 + 1"),
    ("0 < d <= 1", "-d/2 + 1"),
    ("1 < d <= 2", "0.5"),
    ("2 < d <= 3", "-d/2 + 3/2"),
    ("3 < d <= 4", "0"),
    ("4 < d <= 5", "-d/2 + 2"),
    ("d > 5", "-0.5"),
];

pub const F2_ROWS: [(&str, &str); 6] = [
    ("d <= -2", "-1"),
    ("d == -1", "0.4"),
    ("d == 0", "1"),
    ("d == 1", "0.8"),
    ("d == 2", "0.6"),
    ("d > 2", "-0.5"),
];

/// As printed: the tail beyond 40 rises back to −0.5.
pub const F3_ROWS_PRINTED: [(&str, &str); 8] = [
    ("d <= -30", "-1"),
    ("-30 < d <= -20", "d/10 + 2"),
    ("-20 < d <= -15", "0"),
    ("-15 < d <= 0", "d/15 + 1"),
    ("0 < d <= 20", "-d/20 + 1"),
    ("20 < d <= 30", "0"),
    ("30 < d <= 40", "-d/10 + 3"),
    ("d > 40", "-0.5"),
];

/// The printed pieces with the tail held at −1.
pub const F3_ROWS: [(&str, &str); 8] = [
    ("d <= -30", "-1"),
    ("-30 < d <= -20", "d/10 + 2"),
    ("-20 < d <= -15", "0"),
    ("-15 < d <= 0", "d/15 + 1"),
    ("0 < d <= 20", "-d/20 + 1"),
    ("20 < d <= 30", "0"),
    ("30 < d <= 40", "-d/10 + 3"),
    ("d > 40", "-1"),
];

pub const PERFORMANCES: [(&str, [f64; 9]); 20] = [
    ("a1", [17.25, 4.0, 65.0, 75.0, 70.0, 75.0, 4.0, 4.0, 4.0]),
    ("a2", [16.05, 4.0, 85.0, 85.0, 90.0, 80.0, 4.0, 5.0, 5.0]),
    ("a3", [14.91, 4.0, 60.0, 75.0, 85.0, 55.0, 4.0, 5.0, 4.0]),
    ("a4", [15.00, 3.0, 65.0, 85.0, 80.0, 65.0, 4.0, 4.0, 5.0]),
    ("a5", [13.73, 4.0, 75.0, 96.0, 75.0, 70.0, 4.0, 4.0, 3.0]),
    ("a6", [18.28, 3.0, 70.0, 75.0, 60.0, 70.0, 4.0, 5.0, 4.0]),
    ("a7", [12.83, 5.0, 80.0, 60.0, 75.0, 85.0, 4.0, 4.0, 3.0]),
    ("a8", [14.50, 4.0, 75.0, 80.0, 96.0, 80.0, 5.0, 5.0, 5.0]),
    ("a9", [15.75, 4.0, 55.0, 65.0, 75.0, 97.0, 5.0, 5.0, 5.0]),
    ("a10", [15.86, 4.0, 90.0, 80.0, 75.0, 80.0, 2.0, 5.0, 4.0]),
    ("a11", [19.12, 3.0, 50.0, 75.0, 65.0, 75.0, 4.0, 4.0, 5.0]),
    ("a12", [14.35, 2.0, 80.0, 85.0, 85.0, 70.0, 4.0, 3.0, 4.0]),
    ("a13", [11.65, 4.0, 75.0, 85.0, 96.0, 65.0, 4.0, 4.0, 4.0]),
    ("a14", [16.00, 5.0, 80.0, 55.0, 65.0, 75.0, 3.0, 4.0, 4.0]),
    ("a15", [18.00, 3.0, 75.0, 70.0, 50.0, 75.0, 4.0, 4.0, 5.0]),
    ("a16", [17.22, 4.0, 60.0, 70.0, 75.0, 85.0, 3.0, 4.0, 5.0]),
    ("a17", [13.85, 4.0, 90.0, 85.0, 80.0, 90.0, 5.0, 5.0, 4.0]),
    ("a18", [15.10, 3.0, 70.0, 90.0, 95.0, 60.0, 5.0, 4.0, 4.0]),
    ("a19", [12.45, 5.0, 80.0, 65.0, 70.0, 70.0, 4.0, 5.0, 4.0]),
    ("a20", [14.32, 4.0, 85.0, 80.0, 85.0, 75.0, 5.0, 5.0, 5.0]),
];

/// `(id, name, reference id, reference performances, weights, λ)`.
pub type CategoryRow = (&'static str, &'static str, &'static str, [f64; 9], [f64; 9], f64);

pub const CATEGORIES: [CategoryRow; 4] = [
    (
        "commandos",
        "Commandos",
        "b11",
        [17.00, 3.0, 65.0, 70.0, 70.0, 80.0, 4.0, 5.0, 5.0],
        [1.0, 3.4, 2.2, 2.2, 2.2, 2.2, 2.2, 4.0, 4.0],
        0.65,
    ),
    (
        "paratroopers",
        "Paratroopers",
        "b21",
        [14.00, 3.0, 60.0, 80.0, 80.0, 70.0, 4.0, 4.0, 4.0],
        [1.83, 1.0, 3.08, 3.08, 3.08, 3.08, 1.83, 4.33, 6.0],
        0.50,
    ),
    (
        "special_operations",
        "Special Operations",
        "b31",
        [16.00, 4.0, 70.0, 70.0, 70.0, 75.0, 4.0, 4.0, 4.0],
        [2.5, 3.5, 1.0, 2.5, 3.5, 3.5, 2.5, 5.0, 6.0],
        0.65,
    ),
    (
        "snipers",
        "Snipers",
        "b41",
        [15.00, 4.0, 80.0, 85.0, 85.0, 85.0, 5.0, 5.0, 5.0],
        [1.0, 5.0, 3.4, 3.4, 3.4, 1.8, 3.4, 5.0, 5.0],
        0.80,
    ),
];

/// Memberships in category order, then the dummy column.
pub const MEMBERSHIPS: [(&str, [bool; 4], bool); 20] = [
    ("a1", [true, true, true, false], false),
    ("a2", [true, true, true, true], false),
    ("a3", [false, true, true, false], false),
    ("a4", [false, true, false, false], false),
    ("a5", [false, true, false, false], false),
    ("a6", [true, true, true, false], false),
    ("a7", [false, false, false, false], true),
    ("a8", [true, true, true, true], false),
    ("a9", [true, true, true, false], false),
    ("a10", [false, false, false, false], true),
    ("a11", [true, false, true, false], false),
    ("a12", [false, true, false, false], false),
    ("a13", [false, true, false, false], false),
    ("a14", [false, false, true, false], false),
    ("a15", [true, false, true, false], false),
    ("a16", [true, true, true, false], false),
    ("a17", [false, true, false, false], false),
    ("a18", [false, true, false, false], false),
    ("a19", [false, true, false, false], false),
    ("a20", [true, true, true, true], false),
];

pub const DUMMY: &str = "Unsuitable Candidates";

pub fn interactions() -> Vec<InteractionCoefficient> {
    use InteractionKind::*;
    vec![
        InteractionCoefficient::new(MutualStrengthening, "g1", "g7", 1.0),
        InteractionCoefficient::new(MutualStrengthening, "g1", "g9", 2.0),
        InteractionCoefficient::new(MutualWeakening, "g5", "g7", -1.0),
        InteractionCoefficient::new(MutualWeakening, "g6", "g7", -0.4),
    ]
}

pub fn functions() -> Vec<SdFunction> {
    vec![
        parse_sd_rows("f1", Some(DomainKind::Cardinal), &F1_ROWS).unwrap(),
        parse_sd_rows("f2", Some(DomainKind::Ordinal), &F2_ROWS).unwrap(),
        parse_sd_rows("f3", Some(DomainKind::Cardinal), &F3_ROWS).unwrap(),
    ]
}

fn row(values: &[f64; 9]) -> BTreeMap<catsd_core::CriterionId, f64> {
    CRITERIA
        .iter()
        .zip(values)
        .map(|(&(id, _), &v)| (id.into(), v))
        .collect()
}

pub fn model() -> DecisionModel {
    let criteria = CRITERIA
        .iter()
        .map(|&(id, name)| {
            let scale = match id {
                "g1" => Scale::Cardinal { min: 10.0, max: 20.0 },
                "g2" | "g7" | "g8" | "g9" => Scale::Ordinal { levels: 5 },
                _ => Scale::Cardinal { min: 30.0, max: 99.0 },
            };
            Criterion {
                name: name.into(),
                ..Criterion::new(id, Direction::Maximize, scale)
            }
        })
        .collect();
    let bindings = CRITERIA
        .iter()
        .map(|&(id, _)| {
            let f = match id {
                "g1" => "f1",
                "g2" | "g7" | "g8" | "g9" => "f2",
                _ => "f3",
            };
            (id.into(), f.into())
        })
        .collect();
    let categories = CATEGORIES
        .iter()
        .map(|&(id, name, ref_id, ref_values, weights, lambda)| CategoryModel {
            id: id.into(),
            name: name.into(),
            reference_actions: vec![ReferenceAction {
                id: ref_id.into(),
                performances: row(&ref_values),
            }],
            weights: row(&weights),
            interactions: interactions(),
            likeness_threshold: lambda,
        })
        .collect();
    DecisionModel {
        criteria,
        sd_functions: functions(),
        bindings,
        categories,
        dummy_category_name: DUMMY.into(),
    }
}

pub fn actions() -> Vec<Action> {
    PERFORMANCES.iter().map(|&(id, _)| Action::new(id)).collect()
}

pub fn table() -> PerformanceTable {
    PerformanceTable {
        rows: PERFORMANCES.iter().map(|(id, v)| ((*id).into(), row(v))).collect(),
    }
}
