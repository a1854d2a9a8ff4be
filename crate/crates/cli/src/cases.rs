//! Built-in cases and how points are drawn on their focal submanifolds.

use std::fmt;

use clap::ValueEnum;
use isopar::clifford::{build_clifford_system, build_extended_system};
use isopar::fkm::{self, FkmContext, NewtonOptions};
use isopar::homogeneous::{self, SkewCase};
use isopar::quartic::{FocalSign, Multiplicities};
use isopar::random::SeededRng;
use isopar::{FkmContext64, QuarticForm64};
use nalgebra::DVector;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseName {
    Fkm,
    FkmExt,
    So5Real,
    So5Complex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CaseSpec {
    Fkm {
        m: usize,
        k: usize,
        signs: Vec<i8>,
    },
    /// The `m = 8`, `l = 16` system that extends to `m = 9`.
    FkmExt,
    So5Real,
    So5Complex,
}

impl CaseSpec {
    pub fn fkm(m: usize, k: usize, signs: Option<Vec<i8>>) -> Self {
        CaseSpec::Fkm {
            m,
            k,
            signs: signs.unwrap_or_else(|| vec![1; k]),
        }
    }

    pub fn from_args(
        name: CaseName,
        m: Option<usize>,
        k: Option<usize>,
        signs: Option<&str>,
    ) -> CliResult<Self> {
        match name {
            CaseName::Fkm => {
                let m = m.ok_or_else(|| CliError::input("--case fkm needs --m"))?;
                let k = k.unwrap_or(1);
                let signs = signs.map(parse_signs).transpose()?;
                Ok(Self::fkm(m, k, signs))
            }
            _ if m.is_some() || k.is_some() || signs.is_some() => Err(CliError::input(
                "--m, --k and --signs only apply to --case fkm",
            )),
            CaseName::FkmExt => Ok(CaseSpec::FkmExt),
            CaseName::So5Real => Ok(CaseSpec::So5Real),
            CaseName::So5Complex => Ok(CaseSpec::So5Complex),
        }
    }

    /// Key used in the expected-verdict table. For `m ≡ 0 (mod 4)` the
    /// family also depends on `|q| = |Σ signs|`.
    pub fn key(&self) -> String {
        match self {
            CaseSpec::Fkm { m, k, signs } => {
                if m % 4 == 0 {
                    let q: i32 = signs.iter().map(|&s| i32::from(s)).sum();
                    format!("fkm-{m}-{k}-q{}", q.abs())
                } else {
                    format!("fkm-{m}-{k}")
                }
            }
            CaseSpec::FkmExt => "fkm-ext".into(),
            CaseSpec::So5Real => "so5-real".into(),
            CaseSpec::So5Complex => "so5-complex".into(),
        }
    }
}

impl fmt::Display for CaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Accepts `++`, `+-`, `+,-` or `1,-1`.
pub fn parse_signs(s: &str) -> CliResult<Vec<i8>> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.contains('1') {
        return cleaned
            .split(',')
            .map(|t| match t {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                _ => Err(CliError::input(format!("bad sign {t:?} in {s:?}"))),
            })
            .collect();
    }
    cleaned
        .chars()
        .filter(|&c| c != ',')
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            _ => Err(CliError::input(format!("bad sign {c:?} in {s:?}"))),
        })
        .collect()
}

pub fn parse_focal(s: &str) -> CliResult<FocalSign> {
    match s {
        "+" | "plus" | "M+" => Ok(FocalSign::Plus),
        "-" | "minus" | "M-" => Ok(FocalSign::Minus),
        _ => Err(CliError::input(format!(
            "focal set must be + or -, got {s:?}"
        ))),
    }
}

/// How a point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    /// Newton projection (`M+`) or Clifford-sphere sampling (`M-`).
    Sampled,
    /// Common eigenvector of commuting four-fold products.
    Special,
    /// The explicit reference point of a homogeneous case.
    Reference,
    /// Group-orbit image of the reference point.
    Orbit,
}

pub fn pairs_of_five() -> Vec<[usize; 4]> {
    let mut ops = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            ops.push([2 * i, 2 * i + 1, 2 * j, 2 * j + 1]);
        }
    }
    ops
}

pub const SEVEN_OPS: [[usize; 4]; 4] = [[0, 1, 2, 3], [0, 1, 4, 5], [0, 1, 6, 7], [0, 2, 4, 6]];
pub const TEN_OPS: [[usize; 4]; 5] = [
    [0, 1, 2, 3],
    [4, 5, 6, 7],
    [0, 1, 8, 9],
    [2, 3, 8, 9],
    [0, 2, 8, 10],
];

/// A built case ready for sampling.
pub struct Case {
    pub spec: CaseSpec,
    pub form: QuarticForm64,
    pub fkm: Option<FkmContext64>,
    /// Context whose common eigenvectors give the special points of `M+`.
    special_ctx: Option<FkmContext64>,
    special_ops: Vec<[usize; 4]>,
}

impl Case {
    pub fn build(spec: &CaseSpec) -> CliResult<Self> {
        match spec {
            CaseSpec::Fkm { m, k, signs } => {
                let ctx = FkmContext::new(
                    build_clifford_system(*m, *k, Some(signs.as_slice()))?.cast::<f64>(),
                )?;
                let ops = match (*m, *k) {
                    (7, 2) => SEVEN_OPS.to_vec(),
                    (9, 1) => pairs_of_five(),
                    (10, 1) => TEN_OPS.to_vec(),
                    _ => Vec::new(),
                };
                let special_ctx = (!ops.is_empty()).then(|| ctx.clone());
                Ok(Self {
                    spec: spec.clone(),
                    form: ctx.form().clone(),
                    fkm: Some(ctx),
                    special_ctx,
                    special_ops: ops,
                })
            }
            CaseSpec::FkmExt => {
                let ext = build_extended_system()?;
                let base = FkmContext::new(ext.base.cast::<f64>())?;
                let full = FkmContext::new(ext.full.cast::<f64>())?;
                Ok(Self {
                    spec: spec.clone(),
                    form: base.form().clone(),
                    fkm: Some(base),
                    special_ctx: Some(full),
                    special_ops: pairs_of_five(),
                })
            }
            CaseSpec::So5Real | CaseSpec::So5Complex => Ok(Self {
                spec: spec.clone(),
                form: self_skew(spec).polynomial(),
                fkm: None,
                special_ctx: None,
                special_ops: Vec::new(),
            }),
        }
    }

    pub fn multiplicities(&self) -> Multiplicities {
        self.form
            .multiplicities()
            .expect("built-in forms carry multiplicities")
    }

    pub fn skew_case(&self) -> Option<SkewCase> {
        match self.spec {
            CaseSpec::So5Real => Some(SkewCase::Real),
            CaseSpec::So5Complex => Some(SkewCase::Complex),
            _ => None,
        }
    }

    pub fn has_special_points(&self, sign: FocalSign) -> bool {
        sign == FocalSign::Plus && self.special_ctx.is_some()
    }

    /// Draws one generic point of the requested focal set. Homogeneous
    /// cases return the reference point for `index == 0`.
    pub fn generic_point(
        &self,
        sign: FocalSign,
        index: usize,
        rng: &mut SeededRng,
    ) -> CliResult<(PointKind, DVector<f64>)> {
        if let Some(skew) = self.skew_case() {
            let base = homogeneous::reference_point(skew, sign);
            if index == 0 {
                return Ok((PointKind::Reference, base));
            }
            return Ok((
                PointKind::Orbit,
                homogeneous::adjoint_orbit_sample(skew, &base, rng)?,
            ));
        }
        let ctx = self.fkm.as_ref().expect("FKM case");
        let x = match sign {
            FocalSign::Plus => fkm::sample_m_plus(ctx, rng, &NewtonOptions::default())?,
            FocalSign::Minus => fkm::sample_m_minus(ctx, rng)?.point,
        };
        Ok((PointKind::Sampled, x))
    }

    /// Common eigenvector point of `M+`, when the case has one.
    pub fn special_point(&self, rng: &mut SeededRng) -> CliResult<DVector<f64>> {
        let ctx = self
            .special_ctx
            .as_ref()
            .ok_or_else(|| CliError::input(format!("{} has no special points", self.spec)))?;
        Ok(fkm::common_eigenvector(ctx, &self.special_ops, None, rng)?.point)
    }
}

fn self_skew(spec: &CaseSpec) -> SkewCase {
    match spec {
        CaseSpec::So5Complex => SkewCase::Complex,
        _ => SkewCase::Real,
    }
}

/// Rows of the verdict table, in output order.
pub fn table_cases() -> Vec<CaseSpec> {
    vec![
        CaseSpec::fkm(1, 3, None),
        CaseSpec::fkm(2, 2, None),
        CaseSpec::fkm(4, 2, Some(vec![1, 1])),
        CaseSpec::fkm(4, 2, Some(vec![1, -1])),
        CaseSpec::fkm(5, 1, None),
        CaseSpec::fkm(6, 1, None),
        CaseSpec::fkm(7, 2, None),
        CaseSpec::FkmExt,
        CaseSpec::fkm(9, 1, None),
        CaseSpec::fkm(10, 1, None),
        CaseSpec::So5Real,
        CaseSpec::So5Complex,
    ]
}
