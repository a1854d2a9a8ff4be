//! Verdict rules and the shipped table of expected verdicts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use clap::ValueEnum;
use isopar::quartic::FocalSign;
use serde::{Deserialize, Serialize};

use crate::analysis::Aggregate;

pub const EINSTEIN_TOL: f64 = 1e-6;
pub const NOT_EINSTEIN_MIN: f64 = 0.5;
pub const WILLMORE_TOL: f64 = 1e-7;
pub const BLOCK_TOL: f64 = 1e-7;
pub const SPLIT_TOL: f64 = 1e-6;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Einstein,
    Willmore,
    ConditionA,
    Blocks,
    Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Einstein,
    NotEinstein,
    Inconclusive,
    Willmore,
    NotWillmore,
    Pass,
    Fail,
    Holds,
    Fails,
    Mixed,
    Full,
    Deficient,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

/// Applies the rule for `kind` to an aggregate. Returns `None` when the
/// quantity was not computed (span off `M+` of an FKM case).
pub fn decide(kind: CheckKind, agg: &Aggregate) -> Option<Verdict> {
    Some(match kind {
        CheckKind::Einstein => {
            if agg.max_einstein_defect < EINSTEIN_TOL {
                Verdict::Einstein
            } else if agg.max_einstein_defect >= NOT_EINSTEIN_MIN {
                Verdict::NotEinstein
            } else {
                Verdict::Inconclusive
            }
        }
        CheckKind::Willmore => {
            if agg.max_willmore_residual < WILLMORE_TOL {
                Verdict::Willmore
            } else {
                Verdict::NotWillmore
            }
        }
        CheckKind::Blocks => match &agg.blocks {
            Some(b)
                if b.max_diagonal_norm < BLOCK_TOL
                    && b.max_bc_norm_gap < BLOCK_TOL
                    && b.max_bc_singular_gap < BLOCK_TOL
                    && b.ricci_split_gap < SPLIT_TOL =>
            {
                Verdict::Pass
            }
            _ => Verdict::Fail,
        },
        CheckKind::ConditionA => {
            if agg.condition_a_holds == agg.points {
                Verdict::Holds
            } else if agg.condition_a_holds == 0 {
                Verdict::Fails
            } else {
                Verdict::Mixed
            }
        }
        CheckKind::Span => {
            let [_, hi] = agg.span_range?;
            if hi < agg.dim? {
                Verdict::Deficient
            } else {
                Verdict::Full
            }
        }
    })
}

type Table = BTreeMap<String, BTreeMap<String, BTreeMap<CheckKind, Verdict>>>;

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        serde_json::from_str(include_str!("../data/expected_verdicts.json"))
            .expect("valid expected-verdict table")
    })
}

pub fn expected(key: &str, sign: FocalSign, kind: CheckKind) -> Option<Verdict> {
    table().get(key)?.get(sign.symbol())?.get(&kind).copied()
}
