//! Per-point curvature analysis and its aggregation over a sample.

use isopar::curvature::{
    condition_a_check, einstein_defect, isoparametric_blocks, principal_curvature_spectrum,
    ricci_sum_split, willmore_residuals, KERNEL_TOL,
};
use isopar::fkm::span_dimension;
use isopar::homogeneous::{closed_form_subspace, pair_index, SkewCase};
use isopar::linalg::{self, max_abs};
use isopar::quartic::{focal_frame, second_fundamental_form, FocalSign};
use isopar::random::{label_hash, stream_rng, unit_vector};
use isopar::ShapeOperatorSet64;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::cases::{Case, PointKind};
use crate::error::CliResult;

const FRAME_TOL: f64 = 1e-9;
/// Random unit normals tested per point on top of the basis normals.
const EXTRA_NORMALS: usize = 3;

#[derive(Debug, Clone, Serialize)]
pub struct BlockSummary {
    pub max_diagonal_norm: f64,
    pub max_bc_norm_gap: f64,
    pub max_bc_singular_gap: f64,
    pub ricci_split_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionASummary {
    pub holds: bool,
    pub kernel_dims: Vec<usize>,
    pub intersection_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanSummary {
    pub span: usize,
    pub dim: usize,
}

/// An eigenpair of `Σ S_α^2`, the direction given in ambient coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct Direction {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<String>,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub low: Direction,
    pub high: Direction,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub kind: PointKind,
    pub tangent_dim: usize,
    pub normal_dim: usize,
    pub einstein_defect: f64,
    pub einstein_mean: f64,
    pub willmore_max: f64,
    pub spectrum_residual: f64,
    pub blocks: Option<BlockSummary>,
    pub condition_a: ConditionASummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SpanSummary>,
    /// `max |Σ S^2 - expected|` on the closed-form directions of a
    /// reference point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_residual: Option<f64>,
    #[serde(skip)]
    pub witness: Witness,
}

/// Sorted `{0^a, (±1)^b}`.
fn expected_spectrum(zero: usize, pm: usize) -> Vec<f64> {
    let mut v = vec![-1.0; pm];
    v.extend(std::iter::repeat_n(0.0, zero));
    v.extend(std::iter::repeat_n(1.0, pm));
    v
}

fn spectrum_residual(
    shape: &ShapeOperatorSet64,
    expected: &[f64],
    rng: &mut isopar::random::SeededRng,
) -> CliResult<f64> {
    let p = shape.len();
    let mut coeff_sets: Vec<Vec<f64>> = (0..p)
        .map(|i| (0..p).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..EXTRA_NORMALS {
        let c: DVector<f64> = unit_vector(rng, p);
        coeff_sets.push(c.as_slice().to_vec());
    }
    let mut worst = 0.0f64;
    for c in &coeff_sets {
        let eig = principal_curvature_spectrum(shape, c)?;
        if eig.len() != expected.len() {
            return Ok(f64::INFINITY);
        }
        for (a, b) in eig.iter().zip(expected) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Name of an ambient coordinate of a homogeneous case: `a12` for the real
/// case, `X12`/`Y12` for the real and imaginary parts in the complex case.
pub fn coordinate_name(case: SkewCase, index: usize) -> Option<String> {
    let (prefix, k) = match case {
        SkewCase::Real => ("a", index),
        SkewCase::Complex if index < 10 => ("X", index),
        SkewCase::Complex => ("Y", index - 10),
    };
    for i in 1..=5 {
        for j in i + 1..=5 {
            if pair_index(i, j).ok()? == k {
                return Some(format!("{prefix}{i}{j}"));
            }
        }
    }
    None
}

/// Names `v` after a coordinate when it is a signed unit coordinate vector.
fn dominant_coordinate(case: Option<SkewCase>, v: &DVector<f64>) -> Option<String> {
    let case = case?;
    let idx = v.iamax();
    if (v[idx].abs() - 1.0).abs() < 1e-8 {
        coordinate_name(case, idx)
    } else {
        None
    }
}

fn direction(case: Option<SkewCase>, value: f64, v: DVector<f64>) -> Direction {
    let v = if v.iter().find(|c| c.abs() > 1e-12).is_some_and(|&c| c < 0.0) {
        -v
    } else {
        v
    };
    Direction {
        value,
        coordinate: dominant_coordinate(case, &v),
        vector: v.as_slice().to_vec(),
    }
}

pub fn analyse_point(
    case: &Case,
    sign: FocalSign,
    kind: PointKind,
    index: usize,
    x: &DVector<f64>,
    rng: &mut isopar::random::SeededRng,
) -> CliResult<PointRecord> {
    let form = case.form.oriented(sign);
    let mult = form
        .multiplicities()
        .expect("built-in forms carry multiplicities");
    let frame = focal_frame(&form, x, FRAME_TOL)?;
    let shape = second_fundamental_form(&form, &frame)?;
    let tangent = frame.tangent();

    let e = einstein_defect(&shape);
    let willmore_max = willmore_residuals(&shape)?
        .iter()
        .map(|r| r.abs())
        .fold(0.0, f64::max);
    let spectrum = spectrum_residual(&shape, &expected_spectrum(mult.m1, mult.m2), rng)?;

    let blocks = isoparametric_blocks(&shape, 0).ok().and_then(|b| {
        let split = ricci_sum_split(&shape, &b).ok()?;
        Some(BlockSummary {
            max_diagonal_norm: b.max_diagonal_norm(),
            max_bc_norm_gap: b.max_bc_norm_gap(),
            max_bc_singular_gap: b.max_bc_singular_gap(),
            ricci_split_gap: split.gap(),
        })
    });
    let a = condition_a_check(&shape, KERNEL_TOL);

    let span = match (&case.fkm, sign) {
        (Some(ctx), FocalSign::Plus) => Some(SpanSummary {
            span: span_dimension(ctx, x)?,
            dim: ctx.dim_m_plus(),
        }),
        _ => None,
    };

    let skew = case.skew_case();
    let square_sum = shape.square_sum();
    let (values, vectors) = linalg::sym_eigen(&square_sum);
    let last = values.len() - 1;
    let mut low = direction(skew, values[0], tangent * vectors.column(0));
    let high = direction(skew, values[last], tangent * vectors.column(last));

    let mut closed_form_residual = None;
    if let (Some(skew_case), PointKind::Reference) = (skew, kind) {
        let (dirs, expected): (DMatrix<f64>, DMatrix<f64>) = closed_form_subspace(skew_case, sign);
        let coords = tangent.tr_mul(&dirs);
        let restricted = coords.transpose() * &square_sum * &coords;
        closed_form_residual = Some(max_abs(&(restricted - &expected)));
        let j = (0..expected.nrows())
            .min_by(|&p, &q| expected[(p, p)].total_cmp(&expected[(q, q)]))
            .expect("non-empty closed-form subspace");
        let v = dirs.column(j).into_owned();
        let c = tangent.tr_mul(&v);
        low = direction(skew, (c.transpose() * &square_sum * &c)[(0, 0)], v);
    }

    Ok(PointRecord {
        index,
        kind,
        tangent_dim: frame.dim_tangent(),
        normal_dim: frame.dim_normal(),
        einstein_defect: e.defect,
        einstein_mean: e.mean,
        willmore_max,
        spectrum_residual: spectrum,
        blocks,
        condition_a: ConditionASummary {
            holds: a.holds,
            kernel_dims: a.kernel_dims,
            intersection_dim: a.intersection_dim,
        },
        span,
        closed_form_residual,
        witness: Witness { low, high },
    })
}

fn stream_id(case: &Case, sign: FocalSign, kind: &str) -> u64 {
    label_hash(&format!("{}/{}/{}", case.spec.key(), sign.symbol(), kind))
}

/// Analyses `samples` generic points and, on `M+` of cases that have them,
/// `samples` special points. Results are ordered by kind, then index.
pub fn analyse_focal_set(
    case: &Case,
    sign: FocalSign,
    samples: usize,
    seed: u64,
) -> CliResult<Vec<PointRecord>> {
    let generic = stream_id(case, sign, "generic");
    let mut records: Vec<PointRecord> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, generic.wrapping_add(i as u64));
            let (kind, x) = case.generic_point(sign, i, &mut rng)?;
            analyse_point(case, sign, kind, i, &x, &mut rng)
        })
        .collect::<CliResult<_>>()?;
    if case.has_special_points(sign) {
        let special = stream_id(case, sign, "special");
        let extra: Vec<PointRecord> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, special.wrapping_add(i as u64));
                let x = case.special_point(&mut rng)?;
                analyse_point(case, sign, PointKind::Special, i, &x, &mut rng)
            })
            .collect::<CliResult<_>>()?;
        records.extend(extra);
    }
    Ok(records)
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub points: usize,
    pub special_points: usize,
    pub max_einstein_defect: f64,
    pub min_einstein_defect: f64,
    pub einstein_mean_range: [f64; 2],
    pub max_willmore_residual: f64,
    pub max_spectrum_residual: f64,
    /// `None` when the block decomposition failed at some point.
    pub blocks: Option<BlockSummary>,
    pub condition_a_holds: usize,
    pub span_range: Option<[usize; 2]>,
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_closed_form_residual: Option<f64>,
    /// Extreme eigenpairs of `Σ S^2` at the reference point, or else at the
    /// point with the largest defect.
    pub witness: Option<Witness>,
}

fn fold_max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

impl Aggregate {
    pub fn from_records(records: &[PointRecord]) -> Self {
        let defects = records.iter().map(|r| r.einstein_defect);
        let blocks = records
            .iter()
            .map(|r| r.blocks.clone())
            .collect::<Option<Vec<_>>>()
            .map(|bs| BlockSummary {
                max_diagonal_norm: fold_max(bs.iter().map(|b| b.max_diagonal_norm)),
                max_bc_norm_gap: fold_max(bs.iter().map(|b| b.max_bc_norm_gap)),
                max_bc_singular_gap: fold_max(bs.iter().map(|b| b.max_bc_singular_gap)),
                ricci_split_gap: fold_max(bs.iter().map(|b| b.ricci_split_gap)),
            });
        let spans: Vec<&SpanSummary> = records.iter().filter_map(|r| r.span.as_ref()).collect();
        let closed: Vec<f64> = records
            .iter()
            .filter_map(|r| r.closed_form_residual)
            .collect();
        let witness_point = records
            .iter()
            .find(|r| r.kind == PointKind::Reference)
            .or_else(|| {
                records
                    .iter()
                    .max_by(|a, b| a.einstein_defect.total_cmp(&b.einstein_defect))
            });
        Self {
            points: records.len(),
            special_points: records
                .iter()
                .filter(|r| r.kind == PointKind::Special)
                .count(),
            max_einstein_defect: fold_max(defects.clone()),
            min_einstein_defect: defects.fold(f64::INFINITY, f64::min),
            einstein_mean_range: [
                records
                    .iter()
                    .map(|r| r.einstein_mean)
                    .fold(f64::INFINITY, f64::min),
                records
                    .iter()
                    .map(|r| r.einstein_mean)
                    .fold(f64::NEG_INFINITY, f64::max),
            ],
            max_willmore_residual: fold_max(records.iter().map(|r| r.willmore_max)),
            max_spectrum_residual: fold_max(records.iter().map(|r| r.spectrum_residual)),
            blocks,
            condition_a_holds: records.iter().filter(|r| r.condition_a.holds).count(),
            span_range: (!spans.is_empty()).then(|| {
                [
                    spans.iter().map(|s| s.span).min().unwrap_or(0),
                    spans.iter().map(|s| s.span).max().unwrap_or(0),
                ]
            }),
            dim: spans.first().map(|s| s.dim),
            max_closed_form_residual: (!closed.is_empty()).then(|| fold_max(closed.into_iter())),
            witness: witness_point.map(|r| r.witness.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_names() {
        assert_eq!(coordinate_name(SkewCase::Real, 0).as_deref(), Some("a12"));
        assert_eq!(
            coordinate_name(SkewCase::Complex, 10).as_deref(),
            Some("Y12")
        );
        assert_eq!(
            coordinate_name(SkewCase::Complex, 19).as_deref(),
            Some("Y45")
        );
    }

    #[test]
    fn spectrum_template_is_sorted() {
        assert_eq!(expected_spectrum(1, 2), vec![-1.0, -1.0, 0.0, 1.0, 1.0]);
    }
}
