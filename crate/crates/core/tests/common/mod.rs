#![allow(dead_code)]

use isopar::clifford::build_clifford_system;
use isopar::fkm::{self, FkmContext, NewtonOptions};
use isopar::random::SeededRng;
use nalgebra::{DMatrix, DVector};

pub fn fkm(m: usize, k: usize, signs: Option<&[i8]>) -> FkmContext<f64> {
    FkmContext::new(build_clifford_system(m, k, signs).unwrap().cast()).unwrap()
}

pub fn m_plus_points(
    ctx: &FkmContext<f64>,
    count: usize,
    rng: &mut SeededRng,
) -> Vec<DVector<f64>> {
    (0..count)
        .map(|_| fkm::sample_m_plus(ctx, rng, &NewtonOptions::default()).unwrap())
        .collect()
}

/// `|x|^4 - 2 Σ <P_i x, x>^2` straight from the matrices.
pub fn fkm_direct(ctx: &FkmContext<f64>, x: &DVector<f64>) -> f64 {
    let s: f64 = ctx
        .system()
        .matrices()
        .iter()
        .map(|p| (p * x).dot(x).powi(2))
        .sum();
    x.norm_squared().powi(2) - 2.0 * s
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Random orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal(n: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    let g: DVector<f64> = isopar::random::gaussian_vector(rng, n * n);
    DMatrix::from_column_slice(n, n, g.as_slice()).qr().q()
}

pub const FKM_CASES: [(usize, usize); 7] = [(1, 3), (2, 2), (3, 2), (4, 2), (5, 1), (6, 1), (7, 2)];
