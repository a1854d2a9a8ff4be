//! Command implementations. Each returns the report text and an exit code.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use isopar::clifford::{
    build_clifford_system, trace_invariant, verify_clifford, CliffordReport, CliffordSystem,
    TraceInvariant,
};
use isopar::quartic::{
    sphere_restriction_check, verify_cartan_munzner, FocalSign, IdentityReport, Multiplicities,
};
use isopar::random::{label_hash, stream_rng};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyse_focal_set, Aggregate, PointRecord};
use crate::cases::{table_cases, Case, CaseSpec, PointKind};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult, EXIT_MATCH, EXIT_MISMATCH};
use crate::verdicts::{decide, expected, CheckKind, Verdict};

pub const CLIFFORD_TOL: f64 = 1e-12;
pub const CM_TOL: f64 = 1e-8;

#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub exit: i32,
}

fn json<T: Serialize>(value: &T, exit: i32) -> CliResult<Outcome> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(Outcome { text, exit })
}

fn exit_for(ok: bool) -> i32 {
    if ok {
        EXIT_MATCH
    } else {
        EXIT_MISMATCH
    }
}

/// Clifford system as stored on disk; matrices are row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemDoc {
    pub m: usize,
    pub l: usize,
    pub k: usize,
    pub signs: Option<Vec<i8>>,
    pub matrices: Vec<Vec<Vec<f64>>>,
}

impl SystemDoc {
    pub fn from_system(sys: &CliffordSystem<i32>) -> Self {
        let matrices = sys
            .matrices()
            .iter()
            .map(|p| {
                p.row_iter()
                    .map(|r| r.iter().map(|&v| f64::from(v)).collect())
                    .collect()
            })
            .collect();
        Self {
            m: sys.m(),
            l: sys.l(),
            k: sys.k(),
            signs: sys.signs().map(<[i8]>::to_vec),
            matrices,
        }
    }

    pub fn to_system(&self) -> CliResult<CliffordSystem<f64>> {
        let mut mats = Vec::with_capacity(self.matrices.len());
        for rows in &self.matrices {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(CliError::input("matrices must be square"));
            }
            mats.push(DMatrix::from_fn(n, n, |i, j| rows[i][j]));
        }
        let sys = CliffordSystem::from_parts(mats, self.k, self.signs.clone())?;
        if sys.m() != self.m || sys.l() != self.l {
            return Err(CliError::input(format!(
                "header says m = {}, l = {} but the matrices give m = {}, l = {}",
                self.m,
                self.l,
                sys.m(),
                sys.l()
            )));
        }
        Ok(sys)
    }
}

#[derive(Debug, Serialize)]
struct CliffordDoc {
    config: RunConfig,
    system: SystemDoc,
    verification: CliffordReport,
    trace_invariant: TraceInvariant,
    multiplicities: Option<Multiplicities>,
}

pub fn clifford_build(m: usize, k: usize, signs: Option<Vec<i8>>) -> CliResult<Outcome> {
    let sys = build_clifford_system(m, k, signs.as_deref())?;
    let f = sys.cast::<f64>();
    let multiplicities = f.multiplicities();
    let verification = verify_clifford(&f, CLIFFORD_TOL);
    let mut config = RunConfig::new("clifford build");
    config.case = Some(CaseSpec::fkm(m, k, signs));
    config.tol = Some(CLIFFORD_TOL);
    let exit = exit_for(verification.pass);
    json(
        &CliffordDoc {
            config,
            system: SystemDoc::from_system(&sys),
            verification,
            trace_invariant: trace_invariant(&f),
            multiplicities,
        },
        exit,
    )
}

#[derive(Debug, Serialize)]
struct VerifyDoc {
    config: RunConfig,
    m: usize,
    l: usize,
    verification: CliffordReport,
    trace_invariant: TraceInvariant,
}

/// Accepts either the document written by `clifford build` or a bare
/// system object.
pub fn clifford_verify(contents: &str) -> CliResult<Outcome> {
    let value: serde_json::Value = serde_json::from_str(contents)?;
    let body = value.get("system").cloned().unwrap_or(value);
    let doc: SystemDoc = serde_json::from_value(body)?;
    let sys = doc.to_system()?;
    let verification = verify_clifford(&sys, CLIFFORD_TOL);
    let mut config = RunConfig::new("clifford verify");
    config.tol = Some(CLIFFORD_TOL);
    let exit = exit_for(verification.pass);
    json(
        &VerifyDoc {
            config,
            m: sys.m(),
            l: sys.l(),
            verification,
            trace_invariant: trace_invariant(&sys),
        },
        exit,
    )
}

#[derive(Debug, Serialize)]
struct CaseInfo {
    key: String,
    spec: CaseSpec,
    multiplicities: Multiplicities,
    ambient_dim: usize,
}

impl CaseInfo {
    fn new(case: &Case) -> Self {
        Self {
            key: case.spec.key(),
            spec: case.spec.clone(),
            multiplicities: case.multiplicities(),
            ambient_dim: case.form.dim(),
        }
    }
}

#[derive(Debug, Serialize)]
struct CmDoc {
    config: RunConfig,
    case: CaseInfo,
    cartan_munzner: IdentityReport,
    sphere: IdentityReport,
    max_grad_residual: f64,
    max_lap_residual: f64,
    pass: bool,
}

pub fn cm(spec: CaseSpec, samples: usize, tol: f64, seed: u64) -> CliResult<Outcome> {
    let case = Case::build(&spec)?;
    let mult = case.multiplicities();
    let mut rng = stream_rng(seed, label_hash(&format!("{}/cm", spec.key())));
    let cmr = verify_cartan_munzner(&case.form, mult.m1, mult.m2, samples, tol, &mut rng)?;
    let sphere = sphere_restriction_check(&case.form, mult.m1, mult.m2, samples, tol, &mut rng)?;
    let pass = cmr.pass && sphere.pass;
    let config = RunConfig {
        case: Some(spec),
        seed: Some(seed),
        samples: Some(samples),
        tol: Some(tol),
        ..RunConfig::new("cm")
    };
    json(
        &CmDoc {
            config,
            case: CaseInfo::new(&case),
            max_grad_residual: cmr.max_grad_residual.max(sphere.max_grad_residual),
            max_lap_residual: cmr.max_lap_residual.max(sphere.max_lap_residual),
            cartan_munzner: cmr,
            sphere,
            pass,
        },
        exit_for(pass),
    )
}

/// Condition (A) and the span test are read off the special points when a
/// case has them.
fn aggregate_for(kind: CheckKind, records: &[PointRecord]) -> Aggregate {
    let special: Vec<PointRecord> = records
        .iter()
        .filter(|r| r.kind == PointKind::Special)
        .cloned()
        .collect();
    match kind {
        CheckKind::ConditionA | CheckKind::Span if !special.is_empty() => {
            Aggregate::from_records(&special)
        }
        _ => Aggregate::from_records(records),
    }
}

fn validate_check(case: &Case, kind: CheckKind, sign: FocalSign) -> CliResult<()> {
    if kind == CheckKind::Span && (case.fkm.is_none() || sign == FocalSign::Minus) {
        return Err(CliError::input(
            "the span test is defined on M+ of FKM cases only",
        ));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CheckDoc {
    config: RunConfig,
    case: CaseInfo,
    focal: FocalSign,
    focal_multiplicities: Multiplicities,
    per_point: Vec<PointRecord>,
    aggregate: Aggregate,
    verdict: Verdict,
    expected: Option<Verdict>,
    #[serde(rename = "match")]
    matches: Option<bool>,
}

pub fn check(
    kind: CheckKind,
    spec: CaseSpec,
    sign: FocalSign,
    samples: usize,
    seed: u64,
) -> CliResult<Outcome> {
    if samples == 0 {
        return Err(CliError::input("--samples must be at least 1"));
    }
    let case = Case::build(&spec)?;
    validate_check(&case, kind, sign)?;
    let records = analyse_focal_set(&case, sign, samples, seed)?;
    let aggregate = aggregate_for(kind, &records);
    let verdict = decide(kind, &aggregate)
        .ok_or_else(|| CliError::input("quantity not available for this case"))?;
    let exp = expected(&spec.key(), sign, kind);
    let matches = exp.map(|e| e == verdict);
    let config = RunConfig {
        check: Some(kind),
        case: Some(spec),
        focal: Some(sign),
        seed: Some(seed),
        samples: Some(samples),
        ..RunConfig::new("check")
    };
    json(
        &CheckDoc {
            config,
            focal_multiplicities: case.form.oriented(sign).multiplicities().expect("built-in"),
            case: CaseInfo::new(&case),
            focal: sign,
            per_point: records,
            aggregate,
            verdict,
            expected: exp,
            matches,
        },
        exit_for(matches != Some(false)),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub verdict: Option<Verdict>,
    pub expected: Option<Verdict>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub case: String,
    pub multiplicities: Multiplicities,
    pub focal: FocalSign,
    pub focal_multiplicities: Multiplicities,
    pub checks: BTreeMap<CheckKind, Cell>,
    pub aggregate: Aggregate,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Serialize)]
pub struct TableDoc {
    pub config: RunConfig,
    pub rows: Vec<TableRow>,
    pub mismatches: Vec<String>,
    #[serde(rename = "match")]
    pub matches: bool,
}

const TABLE_CHECKS: [CheckKind; 5] = [
    CheckKind::Einstein,
    CheckKind::Willmore,
    CheckKind::Blocks,
    CheckKind::ConditionA,
    CheckKind::Span,
];

fn table_row(case: &Case, sign: FocalSign, samples: usize, seed: u64) -> CliResult<TableRow> {
    let key = case.spec.key();
    let records = analyse_focal_set(case, sign, samples, seed)?;
    let mut checks = BTreeMap::new();
    for kind in TABLE_CHECKS {
        let exp = expected(&key, sign, kind);
        if exp.is_none() && !matches!(kind, CheckKind::Einstein | CheckKind::Willmore) {
            continue;
        }
        let verdict = decide(kind, &aggregate_for(kind, &records));
        checks.insert(
            kind,
            Cell {
                verdict,
                expected: exp,
                matches: exp.map(|e| verdict == Some(e)),
            },
        );
    }
    let matches = checks.values().all(|c| c.matches != Some(false));
    let mut aggregate = Aggregate::from_records(&records);
    aggregate.witness = None;
    Ok(TableRow {
        case: key,
        multiplicities: case.multiplicities(),
        focal: sign,
        focal_multiplicities: case.form.oriented(sign).multiplicities().expect("built-in"),
        checks,
        aggregate,
        matches,
    })
}

pub fn build_table(samples: usize, seed: u64) -> CliResult<TableDoc> {
    if samples == 0 {
        return Err(CliError::input("--samples must be at least 1"));
    }
    let mut rows = Vec::new();
    for spec in table_cases() {
        let case = Case::build(&spec)?;
        for sign in [FocalSign::Plus, FocalSign::Minus] {
            rows.push(table_row(&case, sign, samples, seed)?);
        }
    }
    let mismatches: Vec<String> = rows
        .iter()
        .filter(|r| !r.matches)
        .map(|r| format!("{} M{}", r.case, r.focal))
        .collect();
    let config = RunConfig {
        seed: Some(seed),
        samples: Some(samples),
        ..RunConfig::new("table")
    };
    Ok(TableDoc {
        config,
        matches: mismatches.is_empty(),
        rows,
        mismatches,
    })
}

fn cell_text(cell: Option<&Cell>) -> String {
    match cell {
        None => "-".into(),
        Some(c) => {
            let got = c.verdict.map_or("n/a".to_string(), |v| v.to_string());
            match c.expected {
                Some(e) if Some(e) == c.verdict => got,
                Some(e) => format!("{got} (expected {e})"),
                None => format!("{got} (no reference)"),
            }
        }
    }
}

pub fn render_table_text(doc: &TableDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<8} {:<3} {:<14} {:<10} {:>10} {:>10}  {:<6} {:<10} {:<10} match",
        "case",
        "(m1,m2)",
        "M",
        "einstein",
        "willmore",
        "defect",
        "willmore",
        "blocks",
        "cond-a",
        "span"
    );
    for r in &doc.rows {
        let _ = writeln!(
            out,
            "{:<12} {:<8} {:<3} {:<14} {:<10} {:>10.3e} {:>10.3e}  {:<6} {:<10} {:<10} {}",
            r.case,
            r.multiplicities.to_string(),
            r.focal.symbol(),
            cell_text(r.checks.get(&CheckKind::Einstein)),
            cell_text(r.checks.get(&CheckKind::Willmore)),
            r.aggregate.max_einstein_defect,
            r.aggregate.max_willmore_residual,
            cell_text(r.checks.get(&CheckKind::Blocks)),
            cell_text(r.checks.get(&CheckKind::ConditionA)),
            cell_text(r.checks.get(&CheckKind::Span)),
            if r.matches { "yes" } else { "NO" },
        );
    }
    let _ = writeln!(
        out,
        "{}",
        if doc.matches {
            "all rows match the reference verdicts".to_string()
        } else {
            format!("mismatches: {}", doc.mismatches.join(", "))
        }
    );
    out
}

pub fn table(samples: usize, seed: u64, text: bool) -> CliResult<Outcome> {
    let doc = build_table(samples, seed)?;
    let exit = exit_for(doc.matches);
    if text {
        Ok(Outcome {
            text: render_table_text(&doc),
            exit,
        })
    } else {
        json(&doc, exit)
    }
}
