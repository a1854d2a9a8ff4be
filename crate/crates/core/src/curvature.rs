//! Intrinsic curvature of a minimal submanifold of the unit sphere from its
//! shape operators.
//!
//! With an orthonormal normal frame and shape operators `S_α`, the Gauss
//! equation gives `Ric = (n-1) I - Σ_α S_α^2`. The submanifold is Einstein at
//! a point iff `E = Σ_α S_α^2` is a multiple of the identity, and for
//! minimal submanifolds with constant `|h|^2` the Willmore condition reduces
//! to `Trace(Ric · S_α) = 0` for every normal.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::Real;

/// Symmetry tolerance enforced by [`ricci_operator`].
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Singular values below this count as kernel.
pub const KERNEL_TOL: f64 = 1e-7;
/// Nearest-target window for assigning eigenvalues to {-1, 0, 1}.
pub const CLUSTER_WINDOW: f64 = 0.3;

/// Shape operators `S_1..S_p` of one point, in an orthonormal tangent basis,
/// one per orthonormal normal.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeOperatorSet<T: Real> {
    dim: usize,
    operators: Vec<DMatrix<T>>,
    labels: Vec<String>,
}

impl<T: Real> ShapeOperatorSet<T> {
    pub fn new(operators: Vec<DMatrix<T>>, labels: Vec<String>) -> Result<Self> {
        let dim = operators.first().map_or(0, |s| s.nrows());
        for s in &operators {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.ncols().max(s.nrows()),
                });
            }
        }
        if labels.len() != operators.len() {
            return Err(Error::input("one label per shape operator required"));
        }
        Ok(Self {
            dim,
            operators,
            labels,
        })
    }

    pub fn unlabeled(operators: Vec<DMatrix<T>>) -> Result<Self> {
        let labels = (0..operators.len()).map(|i| format!("n{i}")).collect();
        Self::new(operators, labels)
    }

    /// Tangent dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[DMatrix<T>] {
        &self.operators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn max_symmetry_residual(&self) -> f64 {
        self.operators
            .iter()
            .map(linalg::symmetry_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_abs_trace(&self) -> f64 {
        self.operators
            .iter()
            .map(|s| s.trace().abs().as_f64())
            .fold(0.0, f64::max)
    }

    /// `Σ_α S_α^2`.
    pub fn square_sum(&self) -> DMatrix<T> {
        let mut e = DMatrix::zeros(self.dim, self.dim);
        for s in &self.operators {
            e += s * s;
        }
        e
    }

    /// `Σ_α |S_α X|^2`.
    pub fn square_sum_at(&self, x: &DVector<T>) -> T {
        self.operators
            .iter()
            .fold(T::zero(), |acc, s| acc + (s * x).norm_squared())
    }

    /// Operators for the rotated normal frame `n'_a = Σ_b R_{ab} n_b`.
    pub fn rotate_normals(&self, rotation: &DMatrix<T>) -> Result<Self> {
        let p = self.len();
        if rotation.nrows() != p || rotation.ncols() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: rotation.nrows(),
            });
        }
        let ops = (0..p)
            .map(|a| {
                let mut s = DMatrix::zeros(self.dim, self.dim);
                for b in 0..p {
                    s += &self.operators[b] * rotation[(a, b)];
                }
                s
            })
            .collect();
        Self::unlabeled(ops)
    }

    /// `Σ_α c_α S_α`.
    pub fn combination(&self, coeffs: &[T]) -> Result<DMatrix<T>> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coeffs.len(),
            });
        }
        let mut s = DMatrix::zeros(self.dim, self.dim);
        for (op, &c) in self.operators.iter().zip(coeffs) {
            s += op * c;
        }
        Ok(s)
    }
}

/// `Ric = (n-1) I - Σ_α S_α^2`.
pub fn ricci_operator<T: Real>(shape: &ShapeOperatorSet<T>) -> Result<DMatrix<T>> {
    let sym = shape.max_symmetry_residual();
    if sym > SYMMETRY_TOL {
        return Err(Error::input(format!(
            "shape operators are not symmetric (residual {sym:e})"
        )));
    }
    let n = shape.dim();
    let ident: DMatrix<T> = DMatrix::identity(n, n);
    Ok(ident * T::lit(n as f64 - 1.0) - shape.square_sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EinsteinDefect {
    /// `Trace(Σ S_α^2) / n`.
    pub mean: f64,
    /// `max |eig(Σ S_α^2) - mean|`; zero iff Einstein at the point.
    pub defect: f64,
    pub eigenvalues: Vec<f64>,
}

pub fn einstein_defect<T: Real>(shape: &ShapeOperatorSet<T>) -> EinsteinDefect {
    let n = shape.dim();
    if n == 0 {
        return EinsteinDefect {
            mean: 0.0,
            defect: 0.0,
            eigenvalues: Vec::new(),
        };
    }
    let e = shape.square_sum();
    let mean = e.trace().as_f64() / n as f64;
    let eigenvalues: Vec<f64> = linalg::sym_eigenvalues(&e)
        .into_iter()
        .map(Real::as_f64)
        .collect();
    let defect = eigenvalues
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0, f64::max);
    EinsteinDefect {
        mean,
        defect,
        eigenvalues,
    }
}

/// `r_α = Trace(Ric · S_α)`.
pub fn willmore_residuals<T: Real>(shape: &ShapeOperatorSet<T>) -> Result<Vec<T>> {
    let ric = ricci_operator(shape)?;
    Ok(shape
        .operators()
        .iter()
        .map(|s| ric.component_mul(s).sum())
        .collect())
}

/// Sorted eigenvalues of `Σ c_α S_α`.
pub fn principal_curvature_spectrum<T: Real>(
    shape: &ShapeOperatorSet<T>,
    coeffs: &[T],
) -> Result<Vec<T>> {
    let s = shape.combination(coeffs)?;
    Ok(linalg::sym_eigenvalues(&s))
}

/// Eigenvalue counts near `-1`, `0`, `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumCounts {
    pub minus: usize,
    pub zero: usize,
    pub plus: usize,
}

/// Assigns each eigenvalue to the nearest of `{-1, 0, 1}` within
/// [`CLUSTER_WINDOW`] and returns the counts together with the largest
/// distance to the assigned target.
pub fn classify_spectrum<T: Real>(eigenvalues: &[T]) -> Result<(SpectrumCounts, f64)> {
    let mut counts = SpectrumCounts {
        minus: 0,
        zero: 0,
        plus: 0,
    };
    let mut worst = 0.0f64;
    for &v in eigenvalues {
        let v = v.as_f64();
        let target = v.round();
        let dist = (v - target).abs();
        if dist > CLUSTER_WINDOW || target.abs() > 1.0 {
            return Err(Error::Clustering(format!(
                "eigenvalue {v} is not within {CLUSTER_WINDOW} of -1, 0 or 1"
            )));
        }
        match target as i64 {
            -1 => counts.minus += 1,
            0 => counts.zero += 1,
            _ => counts.plus += 1,
        }
        worst = worst.max(dist);
    }
    Ok((counts, worst))
}

/// Blocks of one shape operator `S_a` relative to the eigenspaces
/// `V_+ ⊕ V_- ⊕ V_0` of the base operator.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalBlocks<T: Real> {
    pub index: usize,
    /// `V_- → V_+`.
    pub a: DMatrix<T>,
    /// `V_0 → V_+`.
    pub b: DMatrix<T>,
    /// `V_0 → V_-`.
    pub c: DMatrix<T>,
    /// Largest Frobenius norm among the three diagonal blocks.
    pub diagonal_norm: f64,
}

impl<T: Real> NormalBlocks<T> {
    pub fn norm_a(&self) -> f64 {
        self.a.norm().as_f64()
    }

    pub fn norm_b(&self) -> f64 {
        self.b.norm().as_f64()
    }

    pub fn norm_c(&self) -> f64 {
        self.c.norm().as_f64()
    }

    pub fn singular_values_b(&self) -> Vec<f64> {
        sorted_singular_values(&self.b)
    }

    pub fn singular_values_c(&self) -> Vec<f64> {
        sorted_singular_values(&self.c)
    }
}

fn sorted_singular_values<T: Real>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = m.singular_values().iter().map(|s| s.as_f64()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition<T: Real> {
    pub base_index: usize,
    pub plus_basis: DMatrix<T>,
    pub minus_basis: DMatrix<T>,
    pub zero_basis: DMatrix<T>,
    pub blocks: Vec<NormalBlocks<T>>,
}

impl<T: Real> BlockDecomposition<T> {
    pub fn max_diagonal_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.diagonal_norm)
            .fold(0.0, f64::max)
    }

    /// `max_a | ‖B_a‖_F - ‖C_a‖_F |`.
    pub fn max_bc_norm_gap(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b.norm_b() - b.norm_c()).abs())
            .fold(0.0, f64::max)
    }

    /// Largest difference between the sorted singular values of `B_a` and `C_a`.
    pub fn max_bc_singular_gap(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let sb = b.singular_values_b();
                let sc = b.singular_values_c();
                if sb.len() != sc.len() {
                    return f64::INFINITY;
                }
                sb.iter()
                    .zip(&sc)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Expresses every `S_a` (`a ≠ base`) in the eigenbasis of `S_base`.
pub fn isoparametric_blocks<T: Real>(
    shape: &ShapeOperatorSet<T>,
    base_index: usize,
) -> Result<BlockDecomposition<T>> {
    let base = shape
        .operators()
        .get(base_index)
        .ok_or_else(|| Error::input(format!("base normal index {base_index} out of range")))?;
    let (vals, vecs) = linalg::sym_eigen(base);
    let (mut plus, mut minus, mut zero) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &v) in vals.iter().enumerate() {
        let v = v.as_f64();
        if (v - 1.0).abs() < CLUSTER_WINDOW {
            plus.push(i);
        } else if (v + 1.0).abs() < CLUSTER_WINDOW {
            minus.push(i);
        } else if v.abs() < CLUSTER_WINDOW {
            zero.push(i);
        } else {
            return Err(Error::input(format!(
                "base operator eigenvalue {v} not clustered at 0 or ±1"
            )));
        }
    }
    let vp = linalg::select_columns(&vecs, &plus);
    let vm = linalg::select_columns(&vecs, &minus);
    let v0 = linalg::select_columns(&vecs, &zero);
    let blocks = shape
        .operators()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != base_index)
        .map(|(i, s)| {
            let block = |l: &DMatrix<T>, r: &DMatrix<T>| l.tr_mul(&(s * r));
            let diag = [block(&vp, &vp), block(&vm, &vm), block(&v0, &v0)]
                .iter()
                .map(|d| d.norm().as_f64())
                .fold(0.0, f64::max);
            NormalBlocks {
                index: i,
                a: block(&vp, &vm),
                b: block(&vp, &v0),
                c: block(&vm, &v0),
                diagonal_norm: diag,
            }
        })
        .collect();
    Ok(BlockDecomposition {
        base_index,
        plus_basis: vp,
        minus_basis: vm,
        zero_basis: v0,
        blocks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciSplit {
    /// `Σ_α Ric(e_α)` over an orthonormal basis of `V_+`.
    pub plus_sum: f64,
    /// `Σ_μ Ric(e_μ)` over an orthonormal basis of `V_-`.
    pub minus_sum: f64,
}

impl RicciSplit {
    pub fn gap(&self) -> f64 {
        (self.plus_sum - self.minus_sum).abs()
    }
}

pub fn ricci_sum_split<T: Real>(
    shape: &ShapeOperatorSet<T>,
    blocks: &BlockDecomposition<T>,
) -> Result<RicciSplit> {
    let ric = ricci_operator(shape)?;
    Ok(RicciSplit {
        plus_sum: linalg::compress(&ric, &blocks.plus_basis).trace().as_f64(),
        minus_sum: linalg::compress(&ric, &blocks.minus_basis).trace().as_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionA {
    pub holds: bool,
    pub kernel_dims: Vec<usize>,
    pub intersection_dim: usize,
}

/// Condition (A): the kernels of all shape operators coincide. Holds iff
/// every `Ker S_α` has the same dimension `d` and their intersection also
/// has dimension `d`.
pub fn condition_a_check<T: Real>(shape: &ShapeOperatorSet<T>, tol: f64) -> ConditionA {
    let kernel_dims: Vec<usize> = shape
        .operators()
        .iter()
        .map(|s| linalg::null_space(s, tol).ncols())
        .collect();
    let n = shape.dim();
    let p = shape.len();
    let mut stacked = DMatrix::zeros(n * p, n);
    for (i, s) in shape.operators().iter().enumerate() {
        stacked.view_mut((i * n, 0), (n, n)).copy_from(s);
    }
    let intersection_dim = linalg::null_space(&stacked, tol).ncols();
    let holds = match kernel_dims.first() {
        None => true,
        Some(&d) => kernel_dims.iter().all(|&k| k == d) && intersection_dim == d,
    };
    ConditionA {
        holds,
        kernel_dims,
        intersection_dim,
    }
}

/// Everything the verdict tables need at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport<T: Real> {
    pub ricci: DMatrix<T>,
    pub einstein: EinsteinDefect,
    pub willmore_residuals: Vec<f64>,
    pub spectra: Vec<Vec<f64>>,
    /// `(‖A_a‖, ‖B_a‖, ‖C_a‖)` relative to normal 0, when its spectrum
    /// clusters at {0, ±1}.
    pub block_norms: Option<Vec<(f64, f64, f64)>>,
}

impl<T: Real> CurvatureReport<T> {
    pub fn compute(shape: &ShapeOperatorSet<T>) -> Result<Self> {
        let ricci = ricci_operator(shape)?;
        let einstein = einstein_defect(shape);
        let willmore_residuals = shape
            .operators()
            .iter()
            .map(|s| ricci.component_mul(s).sum().as_f64())
            .collect();
        let spectra = shape
            .operators()
            .iter()
            .map(|s| {
                linalg::sym_eigenvalues(s)
                    .into_iter()
                    .map(Real::as_f64)
                    .collect()
            })
            .collect();
        let block_norms = if shape.is_empty() {
            None
        } else {
            isoparametric_blocks(shape, 0).ok().map(|d| {
                d.blocks
                    .iter()
                    .map(|b| (b.norm_a(), b.norm_b(), b.norm_c()))
                    .collect()
            })
        };
        Ok(Self {
            ricci,
            einstein,
            willmore_residuals,
            spectra,
            block_norms,
        })
    }

    pub fn max_willmore_residual(&self) -> f64 {
        self.willmore_residuals
            .iter()
            .map(|r| r.abs())
            .fold(0.0, f64::max)
    }
}
