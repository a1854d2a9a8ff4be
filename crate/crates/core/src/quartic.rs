//! Quartic forms given by their fully symmetric 4-linear polarization, and
//! the generic extraction of focal frames and fundamental forms from them.
//!
//! A focal point `x` of a Cartan–Münzner quartic `F` (with `F(x) = 1`,
//! `|x| = 1`) has the expansion
//!
//! ```text
//! F(t x + y + w) = t^4 + (2|y|^2 - 6|w|^2) t^2 + 8 t Σ p_i(y) w_i
//!                + |y|^4 - 2 Σ p_i(y)^2 + 8 Σ q_i(y) w_i
//!                + 2 Σ <∇p_i, ∇p_j> w_i w_j - 6 |y|^2 |w|^2 + |w|^4
//! ```
//!
//! for `y` tangent and `w = Σ w_i n_i` normal. Matching multinomial
//! coefficients of the polarization `T` gives `6 T(x,x,u,u) = 2|u|^2` on
//! tangent and `-6|u|^2` on normal directions, `p_i(y) = (3/2) T(x,n_i,y,y)`
//! and `q_i(y) = (1/2) T(n_i,y,y,y)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::ShapeOperatorSet;
use crate::error::{Error, Result};
use crate::linalg;
use crate::random::{gaussian, gaussian_vector, unit_vector};
use crate::Real;

/// Fully symmetric 4-linear form `T` on `R^N` with `F(x) = T(x,x,x,x)`.
pub trait Polarization<T: Real>: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn tensor(&self, u: &DVector<T>, v: &DVector<T>, w: &DVector<T>, z: &DVector<T>) -> T;

    /// Matrix of the bilinear form `(a, b) ↦ T(u, v, a, b)`.
    fn contract_pair(&self, u: &DVector<T>, v: &DVector<T>) -> DMatrix<T> {
        let n = self.dim();
        let basis: Vec<DVector<T>> = (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = T::one();
                e
            })
            .collect();
        let mut out = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let val = self.tensor(u, v, &basis[a], &basis[b]);
                out[(a, b)] = val;
                out[(b, a)] = val;
            }
        }
        out
    }
}

/// The pair `(m1, m2)` of principal-curvature multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multiplicities {
    pub m1: usize,
    pub m2: usize,
}

impl Multiplicities {
    pub fn new(m1: usize, m2: usize) -> Self {
        Self { m1, m2 }
    }

    pub fn swapped(self) -> Self {
        Self {
            m1: self.m2,
            m2: self.m1,
        }
    }
}

impl fmt::Display for Multiplicities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m1, self.m2)
    }
}

/// Which focal variety: `Plus` is `F = 1`, `Minus` is `F = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FocalSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl FocalSign {
    pub fn symbol(self) -> &'static str {
        match self {
            FocalSign::Plus => "+",
            FocalSign::Minus => "-",
        }
    }
}

impl fmt::Display for FocalSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A homogeneous quartic polynomial on `R^N` with its exact polarization.
///
/// Negation is carried as a flag so that `M-` of `F` is handled as `M+` of
/// `-F`; negating also swaps the multiplicity pair.
#[derive(Clone)]
pub struct QuarticForm<T: Real> {
    polar: Arc<dyn Polarization<T>>,
    negated: bool,
    multiplicities: Option<Multiplicities>,
    label: String,
}

impl<T: Real> fmt::Debug for QuarticForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuarticForm")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("negated", &self.negated)
            .field("multiplicities", &self.multiplicities)
            .finish()
    }
}

impl<T: Real> QuarticForm<T> {
    pub fn new(
        polar: impl Polarization<T> + 'static,
        multiplicities: Option<Multiplicities>,
        label: impl Into<String>,
    ) -> Self {
        Self {
            polar: Arc::new(polar),
            negated: false,
            multiplicities,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.polar.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn multiplicities(&self) -> Option<Multiplicities> {
        self.multiplicities
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// `-F`, whose `M+` is the `M-` of `F`.
    pub fn negated(&self) -> Self {
        Self {
            polar: Arc::clone(&self.polar),
            negated: !self.negated,
            multiplicities: self.multiplicities.map(Multiplicities::swapped),
            label: self.label.clone(),
        }
    }

    /// The form whose `M+` is the requested focal variety of `self`.
    pub fn oriented(&self, sign: FocalSign) -> Self {
        match sign {
            FocalSign::Plus => self.clone(),
            FocalSign::Minus => self.negated(),
        }
    }

    fn sign(&self) -> T {
        if self.negated {
            -T::one()
        } else {
            T::one()
        }
    }

    fn check_dim(&self, v: &DVector<T>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn tensor(
        &self,
        u: &DVector<T>,
        v: &DVector<T>,
        w: &DVector<T>,
        z: &DVector<T>,
    ) -> Result<T> {
        for a in [u, v, w, z] {
            self.check_dim(a)?;
        }
        Ok(self.tensor_unchecked(u, v, w, z))
    }

    pub(crate) fn tensor_unchecked(
        &self,
        u: &DVector<T>,
        v: &DVector<T>,
        w: &DVector<T>,
        z: &DVector<T>,
    ) -> T {
        self.sign() * self.polar.tensor(u, v, w, z)
    }

    /// Matrix of `(a, b) ↦ T(u, v, a, b)`.
    pub fn contract_pair(&self, u: &DVector<T>, v: &DVector<T>) -> Result<DMatrix<T>> {
        self.check_dim(u)?;
        self.check_dim(v)?;
        Ok(self.contract_pair_unchecked(u, v))
    }

    pub(crate) fn contract_pair_unchecked(&self, u: &DVector<T>, v: &DVector<T>) -> DMatrix<T> {
        self.polar.contract_pair(u, v) * self.sign()
    }

    /// `F(x) = T(x,x,x,x)`.
    pub fn evaluate(&self, x: &DVector<T>) -> Result<T> {
        self.tensor(x, x, x, x)
    }

    /// `∇F(x) = 4 T(x,x,x,·)`.
    pub fn gradient(&self, x: &DVector<T>) -> Result<DVector<T>> {
        let c = self.contract_pair(x, x)?;
        Ok(c * x * T::lit(4.0))
    }

    /// Hessian `12 T(x,x,·,·)`.
    pub fn hessian(&self, x: &DVector<T>) -> Result<DMatrix<T>> {
        Ok(self.contract_pair(x, x)? * T::lit(12.0))
    }

    /// `ΔF(x) = 12 Σ_i T(x,x,e_i,e_i)`.
    pub fn laplacian(&self, x: &DVector<T>) -> Result<T> {
        Ok(self.contract_pair(x, x)?.trace() * T::lit(12.0))
    }
}

/// `F(x) = |x|^4`. Satisfies the gradient identity of a Cartan–Münzner
/// polynomial but not the Laplacian one; used as a negative control.
#[derive(Debug, Clone)]
pub struct NormQuartic {
    dim: usize,
}

impl NormQuartic {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl<T: Real> Polarization<T> for NormQuartic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn tensor(&self, u: &DVector<T>, v: &DVector<T>, w: &DVector<T>, z: &DVector<T>) -> T {
        (u.dot(v) * w.dot(z) + u.dot(w) * v.dot(z) + u.dot(z) * v.dot(w)) / T::lit(3.0)
    }

    fn contract_pair(&self, u: &DVector<T>, v: &DVector<T>) -> DMatrix<T> {
        let n = self.dim;
        let mut m = DMatrix::identity(n, n) * u.dot(v);
        m += u * v.transpose() + v * u.transpose();
        m / T::lit(3.0)
    }
}

/// Outcome of a sampled identity check. Failures are reported, not raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub max_grad_residual: f64,
    pub max_lap_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `|∇F|^2 = 16|x|^6` and `ΔF = 8(m2 - m1)|x|^2` at Gaussian
/// directions rescaled to radii in `[0.5, 1.5]`.
pub fn verify_cartan_munzner<T: Real, R: Rng + ?Sized>(
    form: &QuarticForm<T>,
    m1: usize,
    m2: usize,
    sample_count: usize,
    tol: f64,
    rng: &mut R,
) -> Result<IdentityReport> {
    if sample_count == 0 {
        return Err(Error::input("sample_count must be at least 1"));
    }
    let n = form.dim();
    let lap_coeff = T::lit(8.0 * (m2 as f64 - m1 as f64));
    let mut max_grad = 0.0f64;
    let mut max_lap = 0.0f64;
    for _ in 0..sample_count {
        let radius = T::lit(rng.random_range(0.5..1.5));
        let x = unit_vector::<T, _>(rng, n) * radius;
        let r2 = x.norm_squared();
        let c = form.contract_pair_unchecked(&x, &x);
        let grad = &c * &x * T::lit(4.0);
        let lap = c.trace() * T::lit(12.0);
        let grad_res = grad.norm_squared() - T::lit(16.0) * r2 * r2 * r2;
        let lap_res = lap - lap_coeff * r2;
        max_grad = max_grad.max(grad_res.abs().as_f64());
        max_lap = max_lap.max(lap_res.abs().as_f64());
    }
    Ok(IdentityReport {
        samples: sample_count,
        max_grad_residual: max_grad,
        max_lap_residual: max_lap,
        tol,
        pass: max_grad < tol && max_lap < tol,
    })
}

/// Intrinsic gradient and Laplacian of `f = F|_S` at a unit vector `x`.
///
/// The Laplacian is the trace of the Hessian over `x^⊥` minus
/// `(N-1) <∇F, x>`, the second-fundamental-form correction of the unit
/// sphere.
pub fn sphere_derivatives<T: Real>(
    form: &QuarticForm<T>,
    x: &DVector<T>,
) -> Result<(DVector<T>, T)> {
    form.check_dim(x)?;
    let n = form.dim();
    let c = form.contract_pair_unchecked(x, x);
    let grad = &c * x * T::lit(4.0);
    let radial = grad.dot(x);
    let sphere_grad = &grad - x * radial;
    let xb = linalg::columns_to_matrix(n, std::slice::from_ref(x));
    let perp = linalg::orthogonal_complement(&xb);
    let hess = c * T::lit(12.0);
    let tangential_trace = linalg::compress(&hess, &perp).trace();
    let sphere_lap = tangential_trace - T::lit((n - 1) as f64) * radial;
    Ok((sphere_grad, sphere_lap))
}

/// Checks `|∇_S f|^2 = 16(1 - f^2)` and `Δ_S f = 8(m2 - m1) - 4(N + 2) f`
/// on uniform samples of the unit sphere.
pub fn sphere_restriction_check<T: Real, R: Rng + ?Sized>(
    form: &QuarticForm<T>,
    m1: usize,
    m2: usize,
    sample_count: usize,
    tol: f64,
    rng: &mut R,
) -> Result<IdentityReport> {
    if sample_count == 0 {
        return Err(Error::input("sample_count must be at least 1"));
    }
    let n = form.dim();
    let mut max_grad = 0.0f64;
    let mut max_lap = 0.0f64;
    for _ in 0..sample_count {
        let x = unit_vector::<T, _>(rng, n);
        let f = form.tensor_unchecked(&x, &x, &x, &x);
        let (g, lap) = sphere_derivatives(form, &x)?;
        let grad_res = g.norm_squared() - T::lit(16.0) * (T::one() - f * f);
        let lap_res =
            lap - (T::lit(8.0 * (m2 as f64 - m1 as f64)) - T::lit(4.0 * (n as f64 + 2.0)) * f);
        max_grad = max_grad.max(grad_res.abs().as_f64());
        max_lap = max_lap.max(lap_res.abs().as_f64());
    }
    Ok(IdentityReport {
        samples: sample_count,
        max_grad_residual: max_grad,
        max_lap_residual: max_lap,
        tol,
        pass: max_grad < tol && max_lap < tol,
    })
}

/// Tangent/normal split at a point of a focal variety. Columns of
/// `tangent` and `normal` are orthonormal and orthogonal to `base_point`.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalFrame<T: Real> {
    base_point: DVector<T>,
    sign: FocalSign,
    tangent: DMatrix<T>,
    normal: DMatrix<T>,
}

/// Residuals of the [`FocalFrame`] invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameCheck {
    pub norm_residual: f64,
    pub value_residual: f64,
    pub gram_residual: f64,
    pub tangent_form_residual: f64,
    pub normal_form_residual: f64,
}

impl FrameCheck {
    pub fn max(&self) -> f64 {
        [
            self.norm_residual,
            self.value_residual,
            self.gram_residual,
            self.tangent_form_residual,
            self.normal_form_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl<T: Real> FocalFrame<T> {
    pub fn base_point(&self) -> &DVector<T> {
        &self.base_point
    }

    pub fn sign(&self) -> FocalSign {
        self.sign
    }

    pub fn tangent(&self) -> &DMatrix<T> {
        &self.tangent
    }

    pub fn normal(&self) -> &DMatrix<T> {
        &self.normal
    }

    pub fn dim_tangent(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn dim_normal(&self) -> usize {
        self.normal.ncols()
    }

    /// Replaces the normal basis by another orthonormal basis of the same
    /// normal space (for instance the Clifford normals `P_i x`).
    pub fn with_normal_basis(&self, normals: DMatrix<T>, tol: f64) -> Result<Self> {
        if normals.nrows() != self.base_point.len() || normals.ncols() != self.dim_normal() {
            return Err(Error::InvalidNormal(format!(
                "expected {}x{} normal basis, got {}x{}",
                self.base_point.len(),
                self.dim_normal(),
                normals.nrows(),
                normals.ncols()
            )));
        }
        let gram = linalg::gram_identity_residual(&normals);
        if gram > tol {
            return Err(Error::InvalidNormal(format!(
                "normal basis not orthonormal (residual {gram:e})"
            )));
        }
        let angle = linalg::max_principal_angle_sin(&self.normal, &normals);
        if angle > tol {
            return Err(Error::InvalidNormal(format!(
                "normal basis spans a different space (sin angle {angle:e})"
            )));
        }
        Ok(Self {
            normal: normals,
            ..self.clone()
        })
    }

    /// Residuals of the frame invariants with respect to `form` (the
    /// orientation whose `M+` contains the base point).
    pub fn check(&self, form: &QuarticForm<T>) -> FrameCheck {
        let x = &self.base_point;
        let n = x.len();
        let norm_residual = (x.norm() - T::one()).abs().as_f64();
        let value_residual = (form.tensor_unchecked(x, x, x, x) - T::one())
            .abs()
            .as_f64();
        let xb = linalg::columns_to_matrix(n, std::slice::from_ref(x));
        let all = linalg::hstack(&[&xb, &self.tangent, &self.normal]);
        let gram_residual = if all.ncols() == n {
            linalg::gram_identity_residual(&all)
        } else {
            f64::INFINITY
        };
        let a = form.contract_pair_unchecked(x, x) * T::lit(6.0);
        let at = linalg::compress(&a, &self.tangent);
        let an = linalg::compress(&a, &self.normal);
        let tangent_form_residual = linalg::max_abs(
            &(at - DMatrix::identity(self.dim_tangent(), self.dim_tangent()) * T::lit(2.0)),
        );
        let normal_form_residual = linalg::max_abs(
            &(an + DMatrix::identity(self.dim_normal(), self.dim_normal()) * T::lit(6.0)),
        );
        FrameCheck {
            norm_residual,
            value_residual,
            gram_residual,
            tangent_form_residual,
            normal_form_residual,
        }
    }
}

/// Window around the exact eigenvalues 2 (tangent) and -6 (normal).
pub const FRAME_CLUSTER_WINDOW: f64 = 0.5;

/// Splits `x^⊥` into tangent and normal spaces of the focal variety `F = 1`
/// through the eigenvalues of `A(u,v) = 6 T(x,x,u,v)`, which are exactly 2
/// on tangent and -6 on normal directions. Pass `form.negated()` for `M-`.
pub fn focal_frame<T: Real>(
    form: &QuarticForm<T>,
    x: &DVector<T>,
    tol: f64,
) -> Result<FocalFrame<T>> {
    form.check_dim(x)?;
    let n = form.dim();
    let norm_res = (x.norm() - T::one()).abs().as_f64();
    if norm_res >= tol {
        return Err(Error::input(format!(
            "|x| - 1 = {norm_res:e} exceeds tolerance {tol:e}"
        )));
    }
    let value = form.tensor_unchecked(x, x, x, x);
    let value_res = (value - T::one()).abs().as_f64();
    if value_res >= tol {
        return Err(Error::input(format!(
            "F(x) = {} is not within {tol:e} of 1",
            value.as_f64()
        )));
    }
    let xb = linalg::columns_to_matrix(n, std::slice::from_ref(x));
    let perp = linalg::orthogonal_complement(&xb);
    let a = form.contract_pair_unchecked(x, x) * T::lit(6.0);
    let (vals, vecs) = linalg::sym_eigen(&linalg::compress(&a, &perp));
    let mut tangent_idx = Vec::new();
    let mut normal_idx = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        let v = v.as_f64();
        if (v - 2.0).abs() < FRAME_CLUSTER_WINDOW {
            tangent_idx.push(i);
        } else if (v + 6.0).abs() < FRAME_CLUSTER_WINDOW {
            normal_idx.push(i);
        } else {
            return Err(Error::NotOnFocalVariety(format!(
                "eigenvalue {v} of 6T(x,x,.,.) is not clustered at 2 or -6"
            )));
        }
    }
    let rotated = perp * vecs;
    Ok(FocalFrame {
        base_point: x.clone(),
        sign: if form.is_negated() {
            FocalSign::Minus
        } else {
            FocalSign::Plus
        },
        tangent: linalg::select_columns(&rotated, &tangent_idx),
        normal: linalg::select_columns(&rotated, &normal_idx),
    })
}

/// Shape operators `(S_i)_{jk} = (3/2) T(x, n_i, e_j, e_k)` in the tangent
/// basis of the frame.
pub fn second_fundamental_form<T: Real>(
    form: &QuarticForm<T>,
    frame: &FocalFrame<T>,
) -> Result<ShapeOperatorSet<T>> {
    form.check_dim(&frame.base_point)?;
    let x = &frame.base_point;
    let mut ops = Vec::with_capacity(frame.dim_normal());
    for i in 0..frame.dim_normal() {
        let ni: DVector<T> = frame.normal.column(i).into_owned();
        let m = form.contract_pair_unchecked(x, &ni);
        ops.push(linalg::compress(&m, &frame.tangent) * T::lit(1.5));
    }
    let labels = (0..ops.len()).map(|i| format!("n{i}")).collect();
    ShapeOperatorSet::new(ops, labels)
}

/// Symmetric 3-tensor on `R^d`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicForm<T: Real> {
    dim: usize,
    coeffs: Vec<T>,
}

impl<T: Real> CubicForm<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, a: usize, b: usize, c: usize) -> T {
        self.coeffs[(a * self.dim + b) * self.dim + c]
    }

    pub fn evaluate(&self, y: &DVector<T>) -> T {
        let d = self.dim;
        let mut acc = T::zero();
        for a in 0..d {
            for b in 0..d {
                let yab = y[a] * y[b];
                let row = (a * d + b) * d;
                for c in 0..d {
                    acc += self.coeffs[row + c] * yab * y[c];
                }
            }
        }
        acc
    }
}

/// Third fundamental form `q_i(y) = (1/2) T(n_i, y, y, y)` as symmetric
/// 3-tensors in the tangent basis.
pub fn third_fundamental_form<T: Real>(
    form: &QuarticForm<T>,
    frame: &FocalFrame<T>,
) -> Result<Vec<CubicForm<T>>> {
    form.check_dim(&frame.base_point)?;
    let d = frame.dim_tangent();
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(frame.dim_normal());
    for i in 0..frame.dim_normal() {
        let ni: DVector<T> = frame.normal.column(i).into_owned();
        let mut coeffs = vec![T::zero(); d * d * d];
        for a in 0..d {
            let ea: DVector<T> = frame.tangent.column(a).into_owned();
            let m = linalg::compress(&form.contract_pair_unchecked(&ni, &ea), &frame.tangent);
            for b in 0..d {
                for c in 0..d {
                    coeffs[(a * d + b) * d + c] = m[(b, c)] * half;
                }
            }
        }
        out.push(CubicForm { dim: d, coeffs });
    }
    Ok(out)
}

/// Pieces of the focal expansion extracted at one frame.
#[derive(Debug, Clone)]
pub struct ExpansionPieces<T: Real> {
    pub shape: ShapeOperatorSet<T>,
    pub cubics: Vec<CubicForm<T>>,
}

impl<T: Real> ExpansionPieces<T> {
    pub fn extract(form: &QuarticForm<T>, frame: &FocalFrame<T>) -> Result<Self> {
        Ok(Self {
            shape: second_fundamental_form(form, frame)?,
            cubics: third_fundamental_form(form, frame)?,
        })
    }

    /// Right-hand side of the expansion with `y`, `w` in frame coordinates.
    /// `<∇p_i, ∇p_j>(y)` is evaluated as `4 <S_i y, S_j y>`.
    pub fn evaluate(&self, t: T, y: &DVector<T>, w: &DVector<T>) -> T {
        let c = T::lit;
        let y2 = y.norm_squared();
        let w2 = w.norm_squared();
        let sy: Vec<DVector<T>> = self.shape.operators().iter().map(|s| s * y).collect();
        let p: Vec<T> = sy.iter().map(|v| v.dot(y)).collect();
        let q: Vec<T> = self.cubics.iter().map(|cf| cf.evaluate(y)).collect();
        let pw = p
            .iter()
            .zip(w.iter())
            .fold(T::zero(), |a, (&pi, &wi)| a + pi * wi);
        let qw = q
            .iter()
            .zip(w.iter())
            .fold(T::zero(), |a, (&qi, &wi)| a + qi * wi);
        let p2 = p.iter().fold(T::zero(), |a, &pi| a + pi * pi);
        let mut grad_term = T::zero();
        for i in 0..sy.len() {
            for j in 0..sy.len() {
                grad_term += c(4.0) * sy[i].dot(&sy[j]) * w[i] * w[j];
            }
        }
        let t2 = t * t;
        t2 * t2 + (c(2.0) * y2 - c(6.0) * w2) * t2 + c(8.0) * pw * t + y2 * y2 - c(2.0) * p2
            + c(8.0) * qw
            + c(2.0) * grad_term
            - c(6.0) * y2 * w2
            + w2 * w2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub samples: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `F(t x + y + w)` evaluated directly against the expansion
/// rebuilt from the extracted `p_i`, `q_i`. Residuals are relative to
/// `max(1, (t^2 + |y|^2 + |w|^2)^2)`.
pub fn reconstruct_expansion_check<T: Real, R: Rng + ?Sized>(
    form: &QuarticForm<T>,
    frame: &FocalFrame<T>,
    sample_count: usize,
    tol: f64,
    rng: &mut R,
) -> Result<ExpansionReport> {
    let pieces = ExpansionPieces::extract(form, frame)?;
    let dt = frame.dim_tangent();
    let dn = frame.dim_normal();
    let mut worst = 0.0f64;
    for s in 0..sample_count {
        let (t, y, w) = match s {
            0 => (T::one(), DVector::zeros(dt), DVector::zeros(dn)),
            _ => {
                let t: T = gaussian(rng);
                let y: DVector<T> = gaussian_vector::<T, _>(rng, dt) / T::lit((dt as f64).sqrt());
                let w: DVector<T> = gaussian_vector::<T, _>(rng, dn) / T::lit((dn as f64).sqrt());
                (t, y, w)
            }
        };
        let point = frame.base_point() * t + frame.tangent() * &y + frame.normal() * &w;
        let lhs = form.tensor_unchecked(&point, &point, &point, &point);
        let rhs = pieces.evaluate(t, &y, &w);
        let scale = (t * t + y.norm_squared() + w.norm_squared())
            .as_f64()
            .powi(2)
            .max(1.0);
        worst = worst.max((lhs - rhs).abs().as_f64() / scale);
    }
    Ok(ExpansionReport {
        samples: sample_count,
        max_residual: worst,
        tol,
        pass: worst < tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;

    fn norm_form(n: usize) -> QuarticForm<f64> {
        QuarticForm::new(NormQuartic::new(n), None, "norm4")
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let f = norm_form(4);
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_eq!(
            f.evaluate(&x),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        );
        assert!(f.gradient(&x).is_err());
        assert!(f.laplacian(&x).is_err());
    }

    #[test]
    fn zero_has_zero_gradient_and_laplacian() {
        let f = norm_form(5);
        let z = DVector::zeros(5);
        assert_eq!(f.gradient(&z).unwrap().norm(), 0.0);
        assert_eq!(f.laplacian(&z).unwrap(), 0.0);
    }

    #[test]
    fn norm_quartic_fails_laplacian_identity() {
        let f = norm_form(6);
        let mut rng = seeded(3);
        let report = verify_cartan_munzner(&f, 1, 1, 20, 1e-8, &mut rng).unwrap();
        assert!(report.max_grad_residual < 1e-10);
        assert!(report.max_lap_residual > 1.0);
        assert!(!report.pass);
        // ΔF = (8 + 4N)|x|^2 for |x|^4
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((f.laplacian(&x).unwrap() - 32.0).abs() < 1e-12);
    }

    #[test]
    fn zero_samples_is_an_input_error() {
        let f = norm_form(3);
        assert!(verify_cartan_munzner(&f, 1, 1, 0, 1e-8, &mut seeded(1)).is_err());
        assert!(sphere_restriction_check(&f, 1, 1, 0, 1e-8, &mut seeded(1)).is_err());
    }

    #[test]
    fn negation_swaps_multiplicities_and_flips_values() {
        let f = QuarticForm::new(NormQuartic::new(3), Some(Multiplicities::new(1, 2)), "n");
        let g = f.negated();
        let x: DVector<f64> = DVector::from_vec(vec![0.3, -0.2, 0.9]);
        assert_eq!(g.multiplicities(), Some(Multiplicities::new(2, 1)));
        assert!((f.evaluate(&x).unwrap() + g.evaluate(&x).unwrap()).abs() < 1e-15);
        assert!(!g.negated().is_negated());
    }

    #[test]
    fn frame_rejects_points_off_level_one() {
        let f = norm_form(4);
        let x = DVector::from_vec(vec![0.5, 0.5, 0.5, 0.5]);
        // |x| = 1, F(x) = 1, but the spectrum of 6T(x,x,.,.) on x^⊥ is {2,2,2}:
        // all tangent, no normal directions; accepted as a degenerate frame.
        let frame = focal_frame(&f, &x, 1e-8).unwrap();
        assert_eq!(frame.dim_normal(), 0);
        let y = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            focal_frame(&f, &y, 1e-8),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            focal_frame(&f.negated(), &x, 1e-8),
            Err(Error::InvalidInput(_))
        ));
    }
}
