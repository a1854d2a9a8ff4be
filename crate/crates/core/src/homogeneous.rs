//! Cartan–Münzner quartics of the adjoint orbits of `so(5, R)` on `R^10`
//! (multiplicities `(2,2)`) and of `U(5)` on `so(5, C) ≅ R^20`
//! (multiplicities `(4,5)`).
//!
//! Both are `F(Z) = (3/4)(Trace Z Z̄)^2 - 2 Trace (Z Z̄)^2` on skew matrices,
//! written through the real matrix `R(Z)`: `Z` itself in the real case and
//! `[[X, -Y], [Y, X]]` for `Z = X + iY` in the complex case. With
//! `c = 1` (real) or `c = 1/2` (complex), `b(A,B) = c Trace(A Bᵀ)` and
//! `G(A,B) = (A Bᵀ + B Aᵀ)/2`, the polarization is
//!
//! ```text
//! T = (3/4) Sym[b(U,V) b(W,Z)] - 2c Sym[Trace G(U,V) G(W,Z)]
//! ```
//!
//! where `Sym` averages over the three pairings of the four arguments.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::ShapeOperatorSet;
use crate::error::{Error, Result};
use crate::linalg;
use crate::quartic::{self, FocalFrame, FocalSign, Multiplicities, Polarization, QuarticForm};
use crate::random::gaussian;
use crate::Real;

/// Pass threshold for the reference quadratic matching.
pub const MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkewCase {
    Real,
    Complex,
}

impl SkewCase {
    /// Flat dimension: 10 or 20.
    pub fn dim(self) -> usize {
        match self {
            SkewCase::Real => 10,
            SkewCase::Complex => 20,
        }
    }

    pub fn multiplicities(self) -> Multiplicities {
        match self {
            SkewCase::Real => Multiplicities::new(2, 2),
            SkewCase::Complex => Multiplicities::new(4, 5),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SkewCase::Real => "so5-real",
            SkewCase::Complex => "so5-complex",
        }
    }

    fn trace_scale(self) -> f64 {
        match self {
            SkewCase::Real => 1.0,
            SkewCase::Complex => 0.5,
        }
    }

    pub fn polynomial<T: Real>(self) -> QuarticForm<T> {
        QuarticForm::new(
            TraceQuartic::new(self),
            Some(self.multiplicities()),
            self.label(),
        )
    }
}

impl fmt::Display for SkewCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Flat index of the entry `(i, j)`, `1 <= i < j <= 5`, in lexicographic
/// order of pairs.
pub fn pair_index(i: usize, j: usize) -> Result<usize> {
    if !(1..=5).contains(&i) || !(1..=5).contains(&j) || i >= j {
        return Err(Error::input(format!(
            "({i},{j}) is not a pair 1 <= i < j <= 5"
        )));
    }
    let (i, j) = (i - 1, j - 1);
    Ok(i * 5 - i * (i + 1) / 2 + (j - i - 1))
}

fn pair_of(k: usize) -> (usize, usize) {
    let mut k = k;
    for i in 0..4 {
        let row = 4 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair index out of range")
}

/// Index maps between flat vectors and skew matrices. Complex flat vectors
/// hold the ten real parts `x_ij` followed by the ten imaginary parts `y_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkewCoordinates {
    pub case: SkewCase,
}

impl SkewCoordinates {
    pub fn new(case: SkewCase) -> Self {
        Self { case }
    }

    fn check<T: Real>(&self, flat: &DVector<T>) -> Result<()> {
        if flat.len() != self.case.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.case.dim(),
                found: flat.len(),
            });
        }
        Ok(())
    }

    fn skew_from<T: Real>(values: &[T]) -> DMatrix<T> {
        let mut z = DMatrix::zeros(5, 5);
        for (k, &v) in values.iter().enumerate() {
            let (i, j) = pair_of(k);
            z[(i, j)] = v;
            z[(j, i)] = -v;
        }
        z
    }

    /// Flat vector as a complex skew matrix (zero imaginary part in the
    /// real case).
    pub fn to_matrix<T: Real>(&self, flat: &DVector<T>) -> Result<DMatrix<Complex<T>>> {
        self.check(flat)?;
        let re = Self::skew_from(&flat.as_slice()[..10]);
        let im = match self.case {
            SkewCase::Real => DMatrix::zeros(5, 5),
            SkewCase::Complex => Self::skew_from(&flat.as_slice()[10..]),
        };
        Ok(DMatrix::from_fn(5, 5, |r, c| {
            Complex::new(re[(r, c)], im[(r, c)])
        }))
    }

    /// Upper-triangular entries of `z` as a flat vector. The real case keeps
    /// only real parts.
    pub fn to_flat<T: Real>(&self, z: &DMatrix<Complex<T>>) -> Result<DVector<T>> {
        if z.nrows() != 5 || z.ncols() != 5 {
            return Err(Error::DimensionMismatch {
                expected: 5,
                found: z.nrows().max(z.ncols()),
            });
        }
        let mut flat = DVector::zeros(self.case.dim());
        for k in 0..10 {
            let (i, j) = pair_of(k);
            flat[k] = z[(i, j)].re;
            if self.case == SkewCase::Complex {
                flat[10 + k] = z[(i, j)].im;
            }
        }
        Ok(flat)
    }

    /// The real matrix `R(Z)`: 5x5 in the real case, `[[X,-Y],[Y,X]]` in
    /// the complex case.
    pub fn realify<T: Real>(&self, flat: &DVector<T>) -> Result<DMatrix<T>> {
        self.check(flat)?;
        Ok(self.realify_unchecked(flat))
    }

    fn realify_unchecked<T: Real>(&self, flat: &DVector<T>) -> DMatrix<T> {
        let x = Self::skew_from(&flat.as_slice()[..10]);
        match self.case {
            SkewCase::Real => x,
            SkewCase::Complex => {
                let y = Self::skew_from(&flat.as_slice()[10..]);
                let mut r = DMatrix::zeros(10, 10);
                r.view_mut((0, 0), (5, 5)).copy_from(&x);
                r.view_mut((0, 5), (5, 5)).copy_from(&-&y);
                r.view_mut((5, 0), (5, 5)).copy_from(&y);
                r.view_mut((5, 5), (5, 5)).copy_from(&x);
                r
            }
        }
    }
}

/// Polarization of `(3/4)(Trace Z Z̄)^2 - 2 Trace (Z Z̄)^2`.
#[derive(Debug, Clone)]
pub struct TraceQuartic<T: Real> {
    coords: SkewCoordinates,
    basis: Vec<DMatrix<T>>,
    scale: T,
}

impl<T: Real> TraceQuartic<T> {
    pub fn new(case: SkewCase) -> Self {
        let coords = SkewCoordinates::new(case);
        let n = case.dim();
        let basis = (0..n)
            .map(|a| {
                coords.realify_unchecked(&DVector::from_fn(n, |i, _| {
                    if i == a {
                        T::one()
                    } else {
                        T::zero()
                    }
                }))
            })
            .collect();
        Self {
            coords,
            basis,
            scale: T::lit(case.trace_scale()),
        }
    }

    fn gmat(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
        (a * b.transpose() + b * a.transpose()) * T::lit(0.5)
    }

    fn frob(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
        a.component_mul(b).sum()
    }
}

impl<T: Real> Polarization<T> for TraceQuartic<T> {
    fn dim(&self) -> usize {
        self.coords.case.dim()
    }

    fn tensor(&self, u: &DVector<T>, v: &DVector<T>, w: &DVector<T>, z: &DVector<T>) -> T {
        let [ru, rv, rw, rz] = [u, v, w, z].map(|a| self.coords.realify_unchecked(a));
        let c = self.scale;
        let b = |a: &DMatrix<T>, bb: &DMatrix<T>| Self::frob(a, bb) * c;
        let third = T::lit(1.0 / 3.0);
        let q2 =
            (b(&ru, &rv) * b(&rw, &rz) + b(&ru, &rw) * b(&rv, &rz) + b(&ru, &rz) * b(&rv, &rw))
                * third;
        let g = Self::gmat;
        let q4 = (Self::frob(&g(&ru, &rv), &g(&rw, &rz))
            + Self::frob(&g(&ru, &rw), &g(&rv, &rz))
            + Self::frob(&g(&ru, &rz), &g(&rv, &rw)))
            * c
            * third;
        q2 * T::lit(0.75) - q4 * T::lit(2.0)
    }

    /// Uses `b(E_a, E_b) = 2 δ_ab` and `Trace(G R_a R_bᵀ) = <G R_a, R_b>_F`
    /// for symmetric `G`.
    fn contract_pair(&self, u: &DVector<T>, v: &DVector<T>) -> DMatrix<T> {
        let n = self.dim();
        let ru = self.coords.realify_unchecked(u);
        let rv = self.coords.realify_unchecked(v);
        let guv = Self::gmat(&ru, &rv);
        let gu: Vec<DMatrix<T>> = self.basis.iter().map(|ra| Self::gmat(&ru, ra)).collect();
        let gv: Vec<DMatrix<T>> = self.basis.iter().map(|ra| Self::gmat(&rv, ra)).collect();
        let wa: Vec<DMatrix<T>> = self.basis.iter().map(|ra| &guv * ra).collect();
        let c = self.scale;
        let factor = c * T::lit(2.0 / 3.0);
        let mut out = DMatrix::identity(n, n) * u.dot(v);
        out += u * v.transpose() + v * u.transpose();
        for a in 0..n {
            for bi in a..n {
                let q4 = Self::frob(&wa[a], &self.basis[bi])
                    + Self::frob(&gu[a], &gv[bi])
                    + Self::frob(&gu[bi], &gv[a]);
                let val = q4 * factor;
                out[(a, bi)] -= val;
                if a != bi {
                    out[(bi, a)] -= val;
                }
            }
        }
        out
    }
}

/// The `(2,2)` quartic on `so(5, R) ≅ R^10`.
pub fn so5_real_polynomial<T: Real>() -> QuarticForm<T> {
    SkewCase::Real.polynomial()
}

/// The `(4,5)` quartic on `so(5, C) ≅ R^20`.
pub fn so5_complex_polynomial<T: Real>() -> QuarticForm<T> {
    SkewCase::Complex.polynomial()
}

fn unit<T: Real>(n: usize, entries: &[(usize, f64)]) -> DVector<T> {
    let mut v = DVector::zeros(n);
    for &(i, c) in entries {
        v[i] += T::lit(c);
    }
    v
}

fn x_coord(i: usize, j: usize) -> usize {
    pair_index(i, j).expect("static pair")
}

fn y_coord(i: usize, j: usize) -> usize {
    10 + x_coord(i, j)
}

/// Reference points: `M-` of the real case is `a_12 = 1`, `M+` of the real
/// case is `a_12 = a_34 = 1/√2`; the complex case has `M+` at
/// `x_12 = x_34 = 1/√2` and `M-` at `x_12 = 1`.
pub fn reference_point<T: Real>(case: SkewCase, sign: FocalSign) -> DVector<T> {
    let n = case.dim();
    let h = FRAC_1_SQRT_2;
    match (case, sign) {
        (SkewCase::Real, FocalSign::Minus) | (SkewCase::Complex, FocalSign::Minus) => {
            unit(n, &[(x_coord(1, 2), 1.0)])
        }
        (_, FocalSign::Plus) => unit(n, &[(x_coord(1, 2), h), (x_coord(3, 4), h)]),
    }
}

/// Haar-random element of `SO(5)` (real) or `U(5)` (complex) via QR of a
/// Gaussian matrix with sign or phase correction.
pub fn haar_matrix<T: Real, R: Rng + ?Sized>(case: SkewCase, rng: &mut R) -> DMatrix<Complex<T>> {
    let g = DMatrix::from_fn(5, 5, |_, _| match case {
        SkewCase::Real => Complex::new(gaussian::<T, _>(rng), T::zero()),
        SkewCase::Complex => Complex::new(gaussian::<T, _>(rng), gaussian::<T, _>(rng)),
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..5 {
        let d = r[(j, j)];
        let norm = (d.re * d.re + d.im * d.im).sqrt();
        if norm > T::zero() {
            let phase = d / Complex::new(norm, T::zero());
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    if case == SkewCase::Real && q.map(|z| z.re).determinant() < T::zero() {
        let mut col = q.column_mut(0);
        col *= Complex::new(-T::one(), T::zero());
    }
    if case == SkewCase::Real {
        q = q.map(|z| Complex::new(z.re, T::zero()));
    }
    q
}

/// `g·Z = ḡ Z ḡᵀ` (which is `g Z gᵀ` for real `g`).
pub fn act<T: Real>(
    case: SkewCase,
    g: &DMatrix<Complex<T>>,
    flat: &DVector<T>,
) -> Result<DVector<T>> {
    let coords = SkewCoordinates::new(case);
    let z = coords.to_matrix(flat)?;
    let gb = g.map(|c| c.conj());
    let moved = &gb * z * gb.transpose();
    coords.to_flat(&moved)
}

/// `g·base` for a Haar-random `g`.
pub fn adjoint_orbit_sample<T: Real, R: Rng + ?Sized>(
    case: SkewCase,
    base: &DVector<T>,
    rng: &mut R,
) -> Result<DVector<T>> {
    let g = haar_matrix(case, rng);
    act(case, &g, base)
}

/// A symmetric matrix of a quadratic form from `(coeff, a, b)` monomials.
fn quadratic<T: Real>(n: usize, terms: &[(f64, usize, usize)]) -> DMatrix<T> {
    let mut m = DMatrix::zeros(n, n);
    for &(c, a, b) in terms {
        if a == b {
            m[(a, a)] += T::lit(c);
        } else {
            m[(a, b)] += T::lit(c / 2.0);
            m[(b, a)] += T::lit(c / 2.0);
        }
    }
    m
}

/// Explicit second-fundamental-form data at a reference point: named
/// tangent coordinates (as flat vectors), the quadratics `p_i` in those
/// coordinates, and the expected `Σ S_i^2` on a coordinate subset.
struct Fixture<T: Real> {
    tangent: Vec<DVector<T>>,
    forms: Vec<DMatrix<T>>,
    subset: Vec<usize>,
    expected_square_sum: DMatrix<T>,
}

fn fixture<T: Real>(case: SkewCase, sign: FocalSign) -> Fixture<T> {
    let n = case.dim();
    let h = FRAC_1_SQRT_2;
    let r2 = std::f64::consts::SQRT_2;
    let ax = |i, j| unit::<T>(n, &[(x_coord(i, j), 1.0)]);
    let ay = |i, j| unit::<T>(n, &[(y_coord(i, j), 1.0)]);
    match (case, sign) {
        (SkewCase::Real, FocalSign::Minus) => {
            // a13, a14, a15, a23, a24, a25
            let tangent = vec![ax(1, 3), ax(1, 4), ax(1, 5), ax(2, 3), ax(2, 4), ax(2, 5)];
            let forms = vec![
                quadratic(6, &[(2.0, 4, 0), (-2.0, 3, 1)]),
                quadratic(6, &[(2.0, 5, 0), (-2.0, 3, 2)]),
                quadratic(6, &[(2.0, 5, 1), (-2.0, 4, 2)]),
            ];
            Fixture {
                tangent,
                forms,
                subset: (0..6).collect(),
                expected_square_sum: DMatrix::identity(6, 6) * T::lit(2.0),
            }
        }
        (SkewCase::Real, FocalSign::Plus) => {
            // x1, x2, y1, y2, z1, z2
            let tangent = vec![
                ax(3, 5),
                ax(4, 5),
                ax(1, 5),
                ax(2, 5),
                unit(n, &[(x_coord(1, 4), h), (x_coord(2, 3), h)]),
                unit(n, &[(x_coord(1, 3), -h), (x_coord(2, 4), h)]),
            ];
            let forms = vec![
                quadratic(6, &[(1.0, 0, 0), (1.0, 1, 1), (-1.0, 2, 2), (-1.0, 3, 3)]),
                quadratic(6, &[(2.0, 0, 2), (2.0, 1, 3)]),
                quadratic(6, &[(2.0, 1, 2), (-2.0, 0, 3)]),
            ];
            let expected = DMatrix::from_diagonal(&DVector::from_vec(
                [3.0, 3.0, 3.0, 3.0, 0.0, 0.0].map(T::lit).to_vec(),
            ));
            Fixture {
                tangent,
                forms,
                subset: (0..6).collect(),
                expected_square_sum: expected,
            }
        }
        (SkewCase::Complex, FocalSign::Plus) => {
            // x1..x5, y1..y5, z1..z4
            let tangent = vec![
                ax(3, 5),
                ay(3, 5),
                ax(4, 5),
                ay(4, 5),
                ay(3, 4),
                ax(1, 5),
                ay(1, 5),
                ax(2, 5),
                ay(2, 5),
                ay(1, 2),
                unit(n, &[(y_coord(1, 4), h), (y_coord(2, 3), -h)]),
                unit(n, &[(x_coord(1, 4), h), (x_coord(2, 3), h)]),
                unit(n, &[(y_coord(1, 3), -h), (y_coord(2, 4), -h)]),
                unit(n, &[(x_coord(1, 3), -h), (x_coord(2, 4), h)]),
            ];
            let x = |a: usize| a - 1;
            let y = |a: usize| 4 + a;
            let z = |a: usize| 9 + a;
            let zt = |k: usize| [(r2, x(5), z(k)), (r2, y(5), z(k))];
            let mut p0: Vec<(f64, usize, usize)> = (1..=5).map(|a| (1.0, x(a), x(a))).collect();
            p0.extend((1..=5).map(|a| (-1.0, y(a), y(a))));
            let mut p1: Vec<(f64, usize, usize)> = (1..=4).map(|a| (2.0, x(a), y(a))).collect();
            p1.extend(zt(1));
            let mut p2 = vec![
                (2.0, x(2), y(1)),
                (-2.0, x(1), y(2)),
                (2.0, x(3), y(4)),
                (-2.0, x(4), y(3)),
            ];
            p2.extend(zt(2));
            let mut p3 = vec![
                (2.0, x(3), y(1)),
                (-2.0, x(1), y(3)),
                (2.0, x(4), y(2)),
                (-2.0, x(2), y(4)),
            ];
            p3.extend(zt(3));
            let mut p4 = vec![
                (2.0, x(2), y(3)),
                (-2.0, x(3), y(2)),
                (2.0, x(4), y(1)),
                (-2.0, x(1), y(4)),
            ];
            p4.extend(zt(4));
            let forms = [p0, p1, p2, p3, p4]
                .iter()
                .map(|t| quadratic(14, t))
                .collect();
            let expected = DMatrix::from_diagonal(&DVector::from_vec(
                [5.0, 5.0, 5.0, 5.0, 3.0].map(T::lit).to_vec(),
            ));
            Fixture {
                tangent,
                forms,
                subset: (0..5).collect(),
                expected_square_sum: expected,
            }
        }
        (SkewCase::Complex, FocalSign::Minus) => {
            let names: [(char, usize, usize); 13] = [
                ('y', 1, 2),
                ('x', 1, 3),
                ('y', 1, 3),
                ('x', 1, 4),
                ('y', 1, 4),
                ('x', 1, 5),
                ('y', 1, 5),
                ('x', 2, 3),
                ('y', 2, 3),
                ('x', 2, 4),
                ('y', 2, 4),
                ('x', 2, 5),
                ('y', 2, 5),
            ];
            let tangent = names
                .iter()
                .map(|&(c, i, j)| if c == 'x' { ax(i, j) } else { ay(i, j) })
                .collect();
            let at = |c: char, i: usize, j: usize| {
                names
                    .iter()
                    .position(|&t| t == (c, i, j))
                    .expect("listed tangent coordinate")
            };
            let pair = |c: f64, a: (char, usize, usize), b: (char, usize, usize)| {
                (c, at(a.0, a.1, a.2), at(b.0, b.1, b.2))
            };
            let (x, y) = (|i, j| ('x', i, j), |i, j| ('y', i, j));
            let forms = [
                [
                    pair(-2.0, x(1, 4), x(2, 3)),
                    pair(2.0, x(1, 3), x(2, 4)),
                    pair(2.0, y(1, 4), y(2, 3)),
                    pair(-2.0, y(1, 3), y(2, 4)),
                ],
                [
                    pair(-2.0, x(1, 5), x(2, 3)),
                    pair(2.0, x(1, 3), x(2, 5)),
                    pair(2.0, y(1, 5), y(2, 3)),
                    pair(-2.0, y(1, 3), y(2, 5)),
                ],
                [
                    pair(-2.0, x(1, 5), x(2, 4)),
                    pair(2.0, x(1, 4), x(2, 5)),
                    pair(2.0, y(1, 5), y(2, 4)),
                    pair(-2.0, y(1, 4), y(2, 5)),
                ],
                [
                    pair(-2.0, x(1, 4), y(2, 3)),
                    pair(2.0, x(1, 3), y(2, 4)),
                    pair(-2.0, y(1, 4), x(2, 3)),
                    pair(2.0, y(1, 3), x(2, 4)),
                ],
                [
                    pair(-2.0, x(1, 5), y(2, 3)),
                    pair(2.0, x(1, 3), y(2, 5)),
                    pair(-2.0, y(1, 5), x(2, 3)),
                    pair(2.0, y(1, 3), x(2, 5)),
                ],
                [
                    pair(-2.0, x(1, 5), y(2, 4)),
                    pair(2.0, x(1, 4), y(2, 5)),
                    pair(-2.0, y(1, 5), x(2, 4)),
                    pair(2.0, y(1, 4), x(2, 5)),
                ],
            ]
            .iter()
            .map(|t| quadratic(13, t))
            .collect();
            Fixture {
                tangent,
                forms,
                subset: vec![0],
                expected_square_sum: DMatrix::zeros(1, 1),
            }
        }
    }
}

/// Outcome of matching the extracted shape operators at a reference point
/// against the explicit quadratics there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PFormReport {
    pub case: SkewCase,
    pub sign: FocalSign,
    pub tangent_dim: usize,
    pub normal_dim: usize,
    /// How far the listed tangent coordinates are from the extracted
    /// tangent space.
    pub tangent_residual: f64,
    /// Largest least-squares residual when writing each listed quadratic in
    /// terms of the extracted `p_i`.
    pub span_residual: f64,
    /// `max |R Rᵀ - I|` for the fitted change of normal basis `R`.
    pub orthogonality_residual: f64,
    /// `max |Σ S_i^2 - expected|` on the listed coordinate subset.
    pub square_sum_residual: f64,
    /// Largest eigenvalue of `Σ S_i^2`, with a unit tangent attaining it.
    pub max_square_sum: f64,
    pub max_direction: Vec<f64>,
    pub pass: bool,
}

/// Orthonormal tangent directions at the reference point (as flat vectors,
/// one per column) on which `Σ S_i^2` has a known closed form, together
/// with that closed form.
pub fn closed_form_subspace<T: Real>(case: SkewCase, sign: FocalSign) -> (DMatrix<T>, DMatrix<T>) {
    let fx = fixture::<T>(case, sign);
    let cols: Vec<DVector<T>> = fx.subset.iter().map(|&i| fx.tangent[i].clone()).collect();
    (
        linalg::columns_to_matrix(case.dim(), &cols),
        fx.expected_square_sum,
    )
}

/// Frame and shape operators at the reference point of `(case, sign)`.
pub fn reference_shape<T: Real>(
    case: SkewCase,
    sign: FocalSign,
) -> Result<(FocalFrame<T>, ShapeOperatorSet<T>)> {
    let form = case.polynomial::<T>().oriented(sign);
    let x = reference_point::<T>(case, sign);
    let frame = quartic::focal_frame(&form, &x, 1e-9)?;
    let shape = quartic::second_fundamental_form(&form, &frame)?;
    Ok((frame, shape))
}

pub fn verify_reference_p_forms<T: Real>(case: SkewCase, sign: FocalSign) -> Result<PFormReport> {
    let (frame, shape) = reference_shape::<T>(case, sign)?;
    let fx = fixture::<T>(case, sign);
    let n = case.dim();
    let listed = linalg::columns_to_matrix(n, &fx.tangent);
    if listed.ncols() != frame.dim_tangent() {
        return Err(Error::DimensionMismatch {
            expected: listed.ncols(),
            found: frame.dim_tangent(),
        });
    }
    let change = frame.tangent().tr_mul(&listed);
    let tangent_residual = linalg::max_abs(&(frame.tangent() * &change - &listed));
    let in_listed: Vec<DMatrix<T>> = shape
        .operators()
        .iter()
        .map(|s| linalg::compress(s, &change))
        .collect();
    let d = listed.ncols();
    let mut design = DMatrix::zeros(d * d, in_listed.len());
    for (j, b) in in_listed.iter().enumerate() {
        design.set_column(j, &DVector::from_column_slice(b.as_slice()));
    }
    let svd = design.clone().svd(true, true);
    let mut span_residual = 0.0f64;
    let mut rows = Vec::new();
    for target in &fx.forms {
        let rhs = DVector::from_column_slice(target.as_slice());
        let coeffs = svd
            .solve(&rhs, T::lit(1e-12))
            .map_err(|e| Error::input(format!("least squares failed: {e}")))?;
        span_residual = span_residual.max((&design * &coeffs - rhs).norm().as_f64());
        rows.push(coeffs.transpose());
    }
    let fit = DMatrix::from_rows(&rows);
    let orthogonality_residual = if fit.nrows() == fit.ncols() {
        linalg::max_abs(&(&fit * fit.transpose() - DMatrix::identity(fit.nrows(), fit.nrows())))
    } else {
        f64::INFINITY
    };
    let square_sum = shape.square_sum();
    let sub = linalg::select_columns(&listed, &fx.subset);
    let sub_change = frame.tangent().tr_mul(&sub);
    let square_sum_residual =
        linalg::max_abs(&(linalg::compress(&square_sum, &sub_change) - &fx.expected_square_sum));
    let (vals, vecs) = linalg::sym_eigen(&square_sum);
    let top = vals.len().saturating_sub(1);
    let max_square_sum = vals.last().map_or(0.0, |v| v.as_f64());
    let max_direction = if vals.is_empty() {
        Vec::new()
    } else {
        (frame.tangent() * vecs.column(top))
            .iter()
            .map(|v| v.as_f64())
            .collect()
    };
    let pass = [
        tangent_residual,
        span_residual,
        orthogonality_residual,
        square_sum_residual,
    ]
    .iter()
    .all(|&r| r < MATCH_TOL);
    Ok(PFormReport {
        case,
        sign,
        tangent_dim: frame.dim_tangent(),
        normal_dim: frame.dim_normal(),
        tangent_residual,
        span_residual,
        orthogonality_residual,
        square_sum_residual,
        max_square_sum,
        max_direction,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_vector, seeded};

    #[test]
    fn pair_indices_are_lexicographic() {
        assert_eq!(pair_index(1, 2).unwrap(), 0);
        assert_eq!(pair_index(1, 5).unwrap(), 3);
        assert_eq!(pair_index(2, 3).unwrap(), 4);
        assert_eq!(pair_index(4, 5).unwrap(), 9);
        for k in 0..10 {
            let (i, j) = pair_of(k);
            assert_eq!(pair_index(i + 1, j + 1).unwrap(), k);
        }
        assert!(pair_index(2, 2).is_err());
        assert!(pair_index(0, 3).is_err());
    }

    #[test]
    fn flat_round_trip_and_norm() {
        let mut rng = seeded(3);
        for case in [SkewCase::Real, SkewCase::Complex] {
            let c = SkewCoordinates::new(case);
            let v: DVector<f64> = gaussian_vector(&mut rng, case.dim());
            let z = c.to_matrix(&v).unwrap();
            assert_eq!(c.to_flat(&z).unwrap(), v);
            let half_trace = (z.transpose() * z.map(|a| a.conj())).trace().re * 0.5;
            assert!((half_trace - v.norm_squared()).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_values() {
        let r = so5_real_polynomial::<f64>();
        let c = so5_complex_polynomial::<f64>();
        let v =
            |f: &QuarticForm<f64>, case, sign| f.evaluate(&reference_point(case, sign)).unwrap();
        assert!((v(&r, SkewCase::Real, FocalSign::Minus) + 1.0).abs() < 1e-15);
        assert!((v(&r, SkewCase::Real, FocalSign::Plus) - 1.0).abs() < 1e-15);
        assert!((v(&c, SkewCase::Complex, FocalSign::Plus) - 1.0).abs() < 1e-15);
        assert!((v(&c, SkewCase::Complex, FocalSign::Minus) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn fast_contraction_matches_tensor() {
        let mut rng = seeded(8);
        for case in [SkewCase::Real, SkewCase::Complex] {
            let p = TraceQuartic::<f64>::new(case);
            let n = case.dim();
            let u: DVector<f64> = gaussian_vector(&mut rng, n);
            let v: DVector<f64> = gaussian_vector(&mut rng, n);
            let fast = p.contract_pair(&u, &v);
            let mut slow = DMatrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    let ea = unit::<f64>(n, &[(a, 1.0)]);
                    let eb = unit::<f64>(n, &[(b, 1.0)]);
                    slow[(a, b)] = p.tensor(&u, &v, &ea, &eb);
                }
            }
            assert!(linalg::max_abs(&(fast - slow)) < 1e-12, "{case}");
        }
    }

    #[test]
    fn haar_matrices_are_in_the_group() {
        let mut rng = seeded(12);
        let g = haar_matrix::<f64, _>(SkewCase::Real, &mut rng);
        let gr = g.map(|z| z.re);
        assert!(linalg::max_abs(&(gr.transpose() * &gr - DMatrix::identity(5, 5))) < 1e-12);
        assert!((gr.determinant() - 1.0).abs() < 1e-12);
        let u = haar_matrix::<f64, _>(SkewCase::Complex, &mut rng);
        let err = (u.adjoint() * &u - DMatrix::identity(5, 5))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let c = SkewCoordinates::new(SkewCase::Complex);
        assert!(c.to_matrix(&DVector::<f64>::zeros(10)).is_err());
        assert!(c.realify(&DVector::<f64>::zeros(11)).is_err());
    }
}
