//! The quartic `F(x) = |x|^4 - 2 Σ <P_i x, x>^2` of a Clifford system and
//! the Clifford-specific geometry of its focal submanifolds.
//!
//! `M+` is `{<P_i x, x> = 0 for all i, |x| = 1}` with normal space spanned
//! by the `P_i x`; `M-` is the union over the Clifford sphere of the unit
//! spheres of `E_+(P)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::clifford::{self, CliffordSystem};
use crate::curvature::ShapeOperatorSet;
use crate::error::{Error, Result};
use crate::linalg;
use crate::quartic::{Multiplicities, Polarization, QuarticForm};
use crate::random::{gaussian_vector, unit_vector};
use crate::Real;

/// Relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;
/// Gram residual above which a point is rejected as off `M+`.
pub const GRAM_TOL: f64 = 1e-8;
/// Tolerance for involution and commutation checks on eigen-operators.
pub const OPERATOR_TOL: f64 = 1e-10;
/// Membership tolerance for common eigenvectors.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Exact polarization of the FKM quartic:
///
/// ```text
/// T(u,v,w,z) = (1/3)[<u,v><w,z> + <u,w><v,z> + <u,z><v,w>]
///            - (2/3) Σ_i [<P_i u,v><P_i w,z> + <P_i u,w><P_i v,z> + <P_i u,z><P_i v,w>]
/// ```
#[derive(Debug, Clone)]
pub struct FkmPolarization<T: Real> {
    matrices: Vec<DMatrix<T>>,
}

impl<T: Real> FkmPolarization<T> {
    pub fn new(system: &CliffordSystem<T>) -> Self {
        Self {
            matrices: system.matrices().to_vec(),
        }
    }
}

impl<T: Real> Polarization<T> for FkmPolarization<T> {
    fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    fn tensor(&self, u: &DVector<T>, v: &DVector<T>, w: &DVector<T>, z: &DVector<T>) -> T {
        let third = T::lit(1.0 / 3.0);
        let mut acc = (u.dot(v) * w.dot(z) + u.dot(w) * v.dot(z) + u.dot(z) * v.dot(w)) * third;
        let mut sum = T::zero();
        for p in &self.matrices {
            let pu = p * u;
            let pv = p * v;
            sum += pu.dot(v) * (p * w).dot(z) + pu.dot(w) * pv.dot(z) + pu.dot(z) * pv.dot(w);
        }
        acc -= sum * T::lit(2.0 / 3.0);
        acc
    }

    /// `(1/3)[<x,y> I + x yᵀ + y xᵀ] - (2/3) Σ [<P x, y> P + (P x)(P y)ᵀ + (P y)(P x)ᵀ]`.
    fn contract_pair(&self, x: &DVector<T>, y: &DVector<T>) -> DMatrix<T> {
        let n = self.dim();
        let mut base = DMatrix::identity(n, n) * x.dot(y);
        base += x * y.transpose() + y * x.transpose();
        let mut corr = DMatrix::zeros(n, n);
        for p in &self.matrices {
            let px = p * x;
            let py = p * y;
            corr += p * px.dot(y);
            corr += &px * py.transpose() + &py * px.transpose();
        }
        base * T::lit(1.0 / 3.0) - corr * T::lit(2.0 / 3.0)
    }
}

pub fn fkm_polynomial<T: Real>(system: &CliffordSystem<T>) -> QuarticForm<T> {
    let label = format!("fkm(m={},l={})", system.m(), system.l());
    QuarticForm::new(FkmPolarization::new(system), system.multiplicities(), label)
}

/// A Clifford system with its FKM quartic.
#[derive(Debug, Clone)]
pub struct FkmContext<T: Real> {
    system: CliffordSystem<T>,
    form: QuarticForm<T>,
    multiplicities: Multiplicities,
}

impl<T: Real> FkmContext<T> {
    pub fn new(system: CliffordSystem<T>) -> Result<Self> {
        let multiplicities = match system.multiplicities() {
            Some(mult) if mult.m2 >= 1 => mult,
            _ => {
                return Err(Error::DegenerateMultiplicity {
                    m2: system.l() as i64 - system.m() as i64 - 1,
                })
            }
        };
        let form = fkm_polynomial(&system);
        Ok(Self {
            system,
            form,
            multiplicities,
        })
    }

    pub fn system(&self) -> &CliffordSystem<T> {
        &self.system
    }

    pub fn form(&self) -> &QuarticForm<T> {
        &self.form
    }

    pub fn multiplicities(&self) -> Multiplicities {
        self.multiplicities
    }

    pub fn m(&self) -> usize {
        self.system.m()
    }

    pub fn l(&self) -> usize {
        self.system.l()
    }

    pub fn ambient_dim(&self) -> usize {
        self.system.ambient_dim()
    }

    /// `2l - m - 2`.
    pub fn dim_m_plus(&self) -> usize {
        2 * self.l() - self.m() - 2
    }

    /// `l + m - 1`.
    pub fn dim_m_minus(&self) -> usize {
        self.l() + self.m() - 1
    }

    fn matrices(&self) -> &[DMatrix<T>] {
        self.system.matrices()
    }

    fn check_point(&self, x: &DVector<T>) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `max_i |<P_i x, x>|`.
    pub fn constraint_residual(&self, x: &DVector<T>) -> f64 {
        self.matrices()
            .iter()
            .map(|p| (p * x).dot(x).abs().as_f64())
            .fold(0.0, f64::max)
    }
}

/// A point of `M-` with the Clifford-sphere element fixing it.
#[derive(Debug, Clone, PartialEq)]
pub struct MinusSample<T: Real> {
    pub point: DVector<T>,
    pub coeffs: Vec<T>,
    pub involution: DMatrix<T>,
}

/// Random `P` in the Clifford sphere and a random unit `y` in `E_+(P)`.
pub fn sample_m_minus<T: Real, R: Rng + ?Sized>(
    ctx: &FkmContext<T>,
    rng: &mut R,
) -> Result<MinusSample<T>> {
    let coeffs: Vec<T> = unit_vector::<T, _>(rng, ctx.m() + 1)
        .iter()
        .copied()
        .collect();
    minus_point_for(ctx, &coeffs, rng)
}

/// Random unit `y` in `E_+(Σ c_i P_i)`.
pub fn minus_point_for<T: Real, R: Rng + ?Sized>(
    ctx: &FkmContext<T>,
    coeffs: &[T],
    rng: &mut R,
) -> Result<MinusSample<T>> {
    let p = clifford::clifford_sphere_element(&ctx.system, coeffs)?;
    let (plus, _) = clifford::involution_eigenspaces(&p);
    let c: DVector<T> = unit_vector(rng, plus.ncols());
    Ok(MinusSample {
        point: plus * c,
        coeffs: coeffs.to_vec(),
        involution: p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            restarts: 5,
        }
    }
}

/// Minimum-norm Gauss–Newton projection of `x0` onto
/// `{<P_i x, x> = 0, |x|^2 = 1}`: `Δ = -Jᵀ (J Jᵀ)^{-1} c`.
pub fn project_to_m_plus<T: Real>(
    ctx: &FkmContext<T>,
    x0: &DVector<T>,
    opts: &NewtonOptions,
) -> Result<DVector<T>> {
    ctx.check_point(x0)?;
    let n = ctx.ambient_dim();
    let rows = ctx.m() + 2;
    let two = T::lit(2.0);
    let mut x = x0.clone();
    let mut last = f64::INFINITY;
    for _ in 0..=opts.max_iter {
        let mut c = DVector::zeros(rows);
        let mut jac = DMatrix::zeros(rows, n);
        for (i, p) in ctx.matrices().iter().enumerate() {
            let px = p * &x;
            c[i] = px.dot(&x);
            jac.set_row(i, &(px * two).transpose());
        }
        c[rows - 1] = x.norm_squared() - T::one();
        jac.set_row(rows - 1, &(&x * two).transpose());
        last = c.iter().fold(0.0f64, |a, v| a.max(v.abs().as_f64()));
        if last < opts.tol {
            return Ok(x);
        }
        let gram = &jac * jac.transpose();
        let solved = gram.cholesky().map(|ch| ch.solve(&c));
        let Some(lambda) = solved else {
            break;
        };
        x -= jac.transpose() * lambda;
    }
    Err(Error::SamplingFailed {
        attempts: 1,
        reason: format!("Newton projection stalled at residual {last:e}"),
    })
}

/// Projects Gaussian starts onto `M+`, retrying `opts.restarts` times.
pub fn sample_m_plus<T: Real, R: Rng + ?Sized>(
    ctx: &FkmContext<T>,
    rng: &mut R,
    opts: &NewtonOptions,
) -> Result<DVector<T>> {
    let attempts = opts.restarts.max(1);
    let mut reason = String::new();
    for _ in 0..attempts {
        let start: DVector<T> = gaussian_vector(rng, ctx.ambient_dim());
        match project_to_m_plus(ctx, &start, opts) {
            Ok(x) => return Ok(x),
            Err(e) => reason = e.to_string(),
        }
    }
    Err(Error::SamplingFailed { attempts, reason })
}

/// Columns `P_0 x, …, P_m x`, checked orthonormal and orthogonal to `x`.
pub fn normal_basis_m_plus<T: Real>(ctx: &FkmContext<T>, x: &DVector<T>) -> Result<DMatrix<T>> {
    ctx.check_point(x)?;
    let cols: Vec<DVector<T>> = ctx.matrices().iter().map(|p| p * x).collect();
    let mut with_x = cols.clone();
    with_x.push(x.clone());
    let gram = linalg::gram_identity_residual(&linalg::columns_to_matrix(x.len(), &with_x));
    if gram > GRAM_TOL {
        return Err(Error::OffFocalSet(format!(
            "Gram residual of {{P_i x, x}} is {gram:e}"
        )));
    }
    Ok(linalg::columns_to_matrix(x.len(), &cols))
}

/// Orthonormal tangent basis of `M+` at `x`: the complement of `{x, P_i x}`.
pub fn tangent_basis_m_plus<T: Real>(ctx: &FkmContext<T>, x: &DVector<T>) -> Result<DMatrix<T>> {
    let normals = normal_basis_m_plus(ctx, x)?;
    let xb = linalg::columns_to_matrix(x.len(), std::slice::from_ref(x));
    Ok(linalg::orthogonal_complement(&linalg::hstack(&[
        &xb, &normals,
    ])))
}

/// `(S_i)_{jk} = -<P_i e_j, e_k>` for the normals `n_i = P_i x`.
pub fn shape_operators_direct<T: Real>(
    ctx: &FkmContext<T>,
    x: &DVector<T>,
    tangent: &DMatrix<T>,
) -> Result<ShapeOperatorSet<T>> {
    ctx.check_point(x)?;
    if tangent.nrows() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: tangent.nrows(),
        });
    }
    let ops = ctx
        .matrices()
        .iter()
        .map(|p| -linalg::compress(p, tangent))
        .collect::<Vec<_>>();
    let labels = (0..ops.len()).map(|i| format!("P{i}x")).collect();
    ShapeOperatorSet::new(ops, labels)
}

/// Columns `P_i P_j x` for `i < j`.
pub fn pipj_vectors<T: Real>(ctx: &FkmContext<T>, x: &DVector<T>) -> DMatrix<T> {
    let ps = ctx.matrices();
    let mut cols = Vec::new();
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            cols.push(&ps[i] * (&ps[j] * x));
        }
    }
    linalg::columns_to_matrix(x.len(), &cols)
}

/// `Ric(X) = 2(l - m - 2) + 2 Σ_{i<j} <X, P_i P_j x>^2` for a unit tangent
/// `X` at `x ∈ M+`.
pub fn ricci_via_pipj<T: Real>(ctx: &FkmContext<T>, x: &DVector<T>, v: &DVector<T>) -> Result<T> {
    ctx.check_point(x)?;
    ctx.check_point(v)?;
    let unit = (v.norm() - T::one()).abs().as_f64();
    let off = ctx
        .matrices()
        .iter()
        .map(|p| v.dot(&(p * x)).abs().as_f64())
        .fold(v.dot(x).abs().as_f64(), f64::max);
    if unit > 1e-8 || off > 1e-8 {
        return Err(Error::input(format!(
            "X is not a unit tangent vector (|X|-1 = {unit:e}, normal part {off:e})"
        )));
    }
    let q = pipj_vectors(ctx, x).tr_mul(v).norm_squared();
    Ok(T::lit(2.0 * (ctx.l() as f64 - ctx.m() as f64 - 2.0)) + q * T::lit(2.0))
}

/// Rank of `{P_i P_j x : i < j}` with relative threshold [`RANK_TOL`].
pub fn span_dimension<T: Real>(ctx: &FkmContext<T>, x: &DVector<T>) -> Result<usize> {
    ctx.check_point(x)?;
    Ok(linalg::numerical_rank(&pipj_vectors(ctx, x), RANK_TOL))
}

/// Product `P_a P_b P_c P_d` of four distinct Clifford matrices.
pub fn four_product<T: Real>(ctx: &FkmContext<T>, idx: [usize; 4]) -> Result<DMatrix<T>> {
    let ps = ctx.matrices();
    for (a, &i) in idx.iter().enumerate() {
        if i >= ps.len() {
            return Err(Error::input(format!(
                "index {i} out of range 0..={}",
                ctx.m()
            )));
        }
        if idx[a + 1..].contains(&i) {
            return Err(Error::input(format!("indices {idx:?} are not distinct")));
        }
    }
    Ok(&ps[idx[0]] * &ps[idx[1]] * &ps[idx[2]] * &ps[idx[3]])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommonEigenvector<T: Real> {
    pub point: DVector<T>,
    pub signs: Vec<i8>,
    /// Sign patterns tried before one survived.
    pub patterns_tried: usize,
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Unit vector in the joint `±1` eigenspace of the commuting symmetric
/// involutions `P_a P_b P_c P_d` listed in `ops`, obtained by successive
/// projections `x ← (x + s O x) / 2`. When the requested pattern collapses,
/// sign patterns are enumerated in Gray-code order from it.
pub fn common_eigenvector<T: Real, R: Rng + ?Sized>(
    ctx: &FkmContext<T>,
    ops: &[[usize; 4]],
    signs: Option<&[i8]>,
    rng: &mut R,
) -> Result<CommonEigenvector<T>> {
    if ops.is_empty() || ops.len() >= usize::BITS as usize {
        return Err(Error::input("need between 1 and 63 operators"));
    }
    let n = ctx.ambient_dim();
    let ident: DMatrix<T> = DMatrix::identity(n, n);
    let mats: Vec<DMatrix<T>> = ops
        .iter()
        .map(|&o| four_product(ctx, o))
        .collect::<Result<_>>()?;
    for (a, oa) in mats.iter().enumerate() {
        let sym = linalg::symmetry_residual(oa);
        let inv = linalg::max_abs(&(oa * oa - &ident));
        if sym > OPERATOR_TOL || inv > OPERATOR_TOL {
            return Err(Error::input(format!(
                "operator {:?} is not a symmetric involution",
                ops[a]
            )));
        }
        for (b, ob) in mats.iter().enumerate().skip(a + 1) {
            let comm = linalg::max_abs(&(oa * ob - ob * oa));
            if comm > OPERATOR_TOL {
                return Err(Error::input(format!(
                    "operators {:?} and {:?} do not commute (residual {comm:e})",
                    ops[a], ops[b]
                )));
            }
        }
    }
    let initial: Vec<i8> = match signs {
        Some(s) if s.len() == ops.len() && s.iter().all(|&v| v == 1 || v == -1) => s.to_vec(),
        Some(_) => return Err(Error::input("one sign in {+1, -1} per operator required")),
        None => vec![1; ops.len()],
    };
    let start: DVector<T> = unit_vector(rng, n);
    let half = T::lit(0.5);
    let total = 1usize << ops.len();
    for step in 0..total {
        let flip = gray(step);
        let pattern: Vec<i8> = initial
            .iter()
            .enumerate()
            .map(|(i, &s)| if flip >> i & 1 == 1 { -s } else { s })
            .collect();
        let mut x = start.clone();
        for (o, &s) in mats.iter().zip(&pattern) {
            x = (&x + o * &x * T::lit(f64::from(s))) * half;
        }
        let norm = x.norm();
        if norm.as_f64() < 1e-6 {
            continue;
        }
        let x = x / norm;
        let res = ctx.constraint_residual(&x);
        if res > MEMBERSHIP_TOL {
            return Err(Error::OffFocalSet(format!(
                "common eigenvector for signs {pattern:?} has max |<P_i x, x>| = {res:e}"
            )));
        }
        return Ok(CommonEigenvector {
            point: x,
            signs: pattern,
            patterns_tried: step + 1,
        });
    }
    Err(Error::SamplingFailed {
        attempts: total,
        reason: "every sign pattern gives an empty joint eigenspace".into(),
    })
}

/// Orthonormal basis of the linear span of `Σ_P`, the Clifford-sphere
/// elements orthogonal to `P = Σ c_i P_i`.
pub fn orthogonal_sphere_basis<T: Real>(
    ctx: &FkmContext<T>,
    coeffs: &[T],
) -> Result<Vec<DMatrix<T>>> {
    clifford::clifford_sphere_element(&ctx.system, coeffs)?;
    let c = DVector::from_column_slice(coeffs);
    let cb = linalg::columns_to_matrix(coeffs.len(), &[c]);
    let comp = linalg::orthogonal_complement(&cb);
    let n = ctx.ambient_dim();
    Ok((0..comp.ncols())
        .map(|j| {
            let mut q = DMatrix::zeros(n, n);
            for (i, pi) in ctx.matrices().iter().enumerate() {
                q += pi * comp[(i, j)];
            }
            q
        })
        .collect())
}

/// Orthonormal normal basis of `M-` at `y` (with `P y = y`): the
/// complement of `Σ_P y` inside `E_-(P)`.
pub fn normal_basis_m_minus<T: Real>(
    ctx: &FkmContext<T>,
    y: &DVector<T>,
    coeffs: &[T],
) -> Result<DMatrix<T>> {
    ctx.check_point(y)?;
    let p = clifford::clifford_sphere_element(&ctx.system, coeffs)?;
    let fix = (&p * y - y).norm().as_f64();
    if fix > GRAM_TOL {
        return Err(Error::NotOnFocalVariety(format!("|P y - y| = {fix:e}")));
    }
    let (_, minus) = clifford::involution_eigenspaces(&p);
    let qs = orthogonal_sphere_basis(ctx, coeffs)?;
    let qy: Vec<DVector<T>> = qs.iter().map(|q| minus.tr_mul(&(q * y))).collect();
    let coords = linalg::columns_to_matrix(minus.ncols(), &qy);
    let ns = linalg::null_space(&coords.transpose(), 1e-7);
    Ok(minus * ns)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinusEigenspaces<T: Real> {
    pub kernel: DMatrix<T>,
    pub plus: DMatrix<T>,
    pub minus: DMatrix<T>,
}

/// Eigenspaces of `S_N` at `y ∈ M-` for a unit normal `N`:
/// `E_±(S_N) = span{Q(y ± N) : Q ∈ Σ_P}` and
/// `Ker S_N = {v ∈ E_+(P) : v ⊥ y, v ⊥ Σ_P N}`, as orthonormal bases of
/// dimensions `(l - m - 1, m, m)`.
pub fn m_minus_eigenspaces<T: Real>(
    ctx: &FkmContext<T>,
    y: &DVector<T>,
    coeffs: &[T],
    normal: &DVector<T>,
) -> Result<MinusEigenspaces<T>> {
    ctx.check_point(normal)?;
    let nb = normal_basis_m_minus(ctx, y, coeffs)?;
    let unit = (normal.norm() - T::one()).abs().as_f64();
    let outside = (normal - &nb * nb.tr_mul(normal)).norm().as_f64();
    if unit > GRAM_TOL || outside > GRAM_TOL {
        return Err(Error::InvalidNormal(format!(
            "N is not a unit normal at y (|N|-1 = {unit:e}, tangential part {outside:e})"
        )));
    }
    let (m, l) = (ctx.m(), ctx.l());
    let qs = orthogonal_sphere_basis(ctx, coeffs)?;
    let n = ctx.ambient_dim();
    let span = |v: DVector<T>| {
        let cols: Vec<DVector<T>> = qs.iter().map(|q| q * &v).collect();
        linalg::column_space(&linalg::columns_to_matrix(n, &cols), RANK_TOL)
    };
    let plus = span(y + normal);
    let minus = span(y - normal);
    let p = clifford::clifford_sphere_element(&ctx.system, coeffs)?;
    let (eplus, _) = clifford::involution_eigenspaces(&p);
    let mut constraints = vec![y.clone()];
    constraints.extend(qs.iter().map(|q| q * normal));
    let coords = eplus.tr_mul(&linalg::columns_to_matrix(n, &constraints));
    let kernel = &eplus * linalg::null_space(&coords.transpose(), 1e-7);
    let dims = (kernel.ncols(), plus.ncols(), minus.ncols());
    if dims != (l - m - 1, m, m) {
        return Err(Error::InvalidNormal(format!(
            "eigenspace dimensions {dims:?}, expected {:?}",
            (l - m - 1, m, m)
        )));
    }
    Ok(MinusEigenspaces {
        kernel,
        plus,
        minus,
    })
}
