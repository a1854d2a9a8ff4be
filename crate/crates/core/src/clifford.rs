//! Symmetric Clifford systems `P_0, …, P_m` on `R^{2l}`.
//!
//! Skew generators `E_1..E_{m-1}` of an irreducible module of dimension
//! `δ(m)` are tensor words in the 2x2 matrices
//!
//! ```text
//! I = [[1,0],[0,1]]   J = [[0,-1],[1,0]]   K = [[0,1],[1,0]]   L = [[1,0],[0,-1]]
//! ```
//!
//! A word is skew iff it has an odd number of `J` factors, and two words
//! anticommute iff the number of slots where both are non-identity and
//! different is odd. A backtracking search picks `m - 1` pairwise
//! anticommuting skew words. The system is then
//!
//! ```text
//! P_0 = [[I, 0], [0, -I]]   P_1 = [[0, I], [I, 0]]   P_{1+i} = [[0, E_i], [-E_i, 0]]
//! ```
//!
//! with `E_i = diag(s_1 E, …, s_k E)` over `k` irreducible summands.

use nalgebra::{DMatrix, Scalar};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;
use crate::quartic::Multiplicities;
use crate::Real;

/// Largest `m` the builder accepts.
pub const MAX_M: usize = 12;
/// Largest half-dimension `l` the builder accepts.
pub const MAX_L: usize = 256;

/// Dimension of an irreducible module of the Clifford algebra `C_{m-1}`.
pub fn delta(m: usize) -> Result<usize> {
    const TABLE: [usize; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    if m == 0 {
        return Err(Error::input("delta(m) requires m >= 1"));
    }
    let mut m = m;
    let mut scale: usize = 1;
    while m > 8 {
        m -= 8;
        scale = scale
            .checked_mul(16)
            .ok_or_else(|| Error::input("delta(m) overflows"))?;
    }
    TABLE[m - 1]
        .checked_mul(scale)
        .ok_or_else(|| Error::input("delta(m) overflows"))
}

/// Tensor-word factor: 0 = I, 1 = J, 2 = K, 3 = L.
type Word = Vec<u8>;

fn is_skew(word: &[u8]) -> bool {
    word.iter().filter(|&&f| f == 1).count() % 2 == 1
}

fn anticommute(a: &[u8], b: &[u8]) -> bool {
    a.iter()
        .zip(b)
        .filter(|&(&x, &y)| x != 0 && y != 0 && x != y)
        .count()
        % 2
        == 1
}

fn all_words(len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..4u8).map(move |f| {
                    let mut w = w.clone();
                    w.push(f);
                    w
                })
            })
            .collect();
    }
    out
}

fn extend_clique(cands: &[Word], chosen: &mut Vec<usize>, start: usize, target: usize) -> bool {
    if chosen.len() == target {
        return true;
    }
    for i in start..cands.len() {
        if cands.len() - i < target - chosen.len() {
            return false;
        }
        if chosen.iter().all(|&c| anticommute(&cands[i], &cands[c])) {
            chosen.push(i);
            if extend_clique(cands, chosen, i + 1, target) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

fn skew_words(count: usize, len: usize) -> Result<Vec<Word>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let cands: Vec<Word> = all_words(len).into_iter().filter(|w| is_skew(w)).collect();
    let mut chosen = Vec::with_capacity(count);
    if !extend_clique(&cands, &mut chosen, 0, count) {
        return Err(Error::input(format!(
            "no {count} anticommuting skew generators on R^{}",
            1usize << len
        )));
    }
    Ok(chosen.into_iter().map(|i| cands[i].clone()).collect())
}

fn factor(f: u8) -> DMatrix<i32> {
    match f {
        0 => DMatrix::from_row_slice(2, 2, &[1, 0, 0, 1]),
        1 => DMatrix::from_row_slice(2, 2, &[0, -1, 1, 0]),
        2 => DMatrix::from_row_slice(2, 2, &[0, 1, 1, 0]),
        _ => DMatrix::from_row_slice(2, 2, &[1, 0, 0, -1]),
    }
}

fn word_matrix(word: &[u8]) -> DMatrix<i32> {
    word.iter().fold(DMatrix::from_element(1, 1, 1), |acc, &f| {
        acc.kronecker(&factor(f))
    })
}

/// Skew matrices `E_1..E_{m-1}` on `R^{δ(m)}` with `E_i E_j + E_j E_i = -2 δ_ij I`.
pub fn irreducible_skew_generators(m: usize) -> Result<Vec<DMatrix<i32>>> {
    let d = delta(m)?;
    let len = d.trailing_zeros() as usize;
    Ok(skew_words(m - 1, len)?
        .iter()
        .map(|w| word_matrix(w))
        .collect())
}

/// `P_0, …, P_m` with `P_i P_j + P_j P_i = 2 δ_ij I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordSystem<T: Scalar> {
    m: usize,
    l: usize,
    k: usize,
    signs: Option<Vec<i8>>,
    matrices: Vec<DMatrix<T>>,
}

impl<T: Scalar> CliffordSystem<T> {
    /// Wraps arbitrary square matrices of even size without validating the
    /// Clifford relations (see [`verify_clifford`]).
    pub fn from_parts(matrices: Vec<DMatrix<T>>, k: usize, signs: Option<Vec<i8>>) -> Result<Self> {
        let n = matrices
            .first()
            .map(|p| p.nrows())
            .ok_or_else(|| Error::input("a Clifford system needs at least one matrix"))?;
        if n == 0 || n % 2 != 0 {
            return Err(Error::input(format!(
                "matrix size {n} is not a positive even number"
            )));
        }
        for p in &matrices {
            if p.nrows() != n || p.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.nrows().max(p.ncols()),
                });
            }
        }
        if let Some(s) = &signs {
            if s.len() != k || s.iter().any(|&v| v != 1 && v != -1) {
                return Err(Error::input("signs must be k values in {+1, -1}"));
            }
        }
        Ok(Self {
            m: matrices.len() - 1,
            l: n / 2,
            k,
            signs,
            matrices,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn signs(&self) -> Option<&[i8]> {
        self.signs.as_deref()
    }

    pub fn matrices(&self) -> &[DMatrix<T>] {
        &self.matrices
    }

    /// Ambient dimension `2l`.
    pub fn ambient_dim(&self) -> usize {
        2 * self.l
    }

    /// `(m, l - m - 1)`, or `None` when `l < m + 1`.
    pub fn multiplicities(&self) -> Option<Multiplicities> {
        self.l
            .checked_sub(self.m + 1)
            .map(|m2| Multiplicities::new(self.m, m2))
    }

    /// The first `count` matrices as a system in their own right.
    pub fn subsystem(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.matrices.len() {
            return Err(Error::input(format!(
                "subsystem size {count} out of range 1..={}",
                self.matrices.len()
            )));
        }
        Ok(Self {
            m: count - 1,
            l: self.l,
            k: self.k,
            signs: None,
            matrices: self.matrices[..count].to_vec(),
        })
    }

    pub fn cast<U: Real>(&self) -> CliffordSystem<U>
    where
        T: Copy + Into<f64>,
    {
        CliffordSystem {
            m: self.m,
            l: self.l,
            k: self.k,
            signs: self.signs.clone(),
            matrices: self
                .matrices
                .iter()
                .map(|p| p.map(|v| U::lit(v.into())))
                .collect(),
        }
    }
}

/// Builds the system for `(m, k)` with summand orientations `signs`
/// (defaults to all `+1`).
pub fn build_clifford_system(
    m: usize,
    k: usize,
    signs: Option<&[i8]>,
) -> Result<CliffordSystem<i32>> {
    if m == 0 || k == 0 {
        return Err(Error::input("m and k must be at least 1"));
    }
    if m > MAX_M {
        return Err(Error::input(format!(
            "m = {m} exceeds the supported maximum {MAX_M}"
        )));
    }
    let d = delta(m)?;
    let l = d
        .checked_mul(k)
        .filter(|&l| l <= MAX_L)
        .ok_or_else(|| Error::input(format!("l = k * delta(m) exceeds {MAX_L}")))?;
    let m2 = l as i64 - m as i64 - 1;
    if m2 < 1 {
        return Err(Error::DegenerateMultiplicity { m2 });
    }
    let signs: Vec<i8> = match signs {
        Some(s) => s.to_vec(),
        None => vec![1; k],
    };
    if signs.len() != k || signs.iter().any(|&v| v != 1 && v != -1) {
        return Err(Error::input(format!(
            "expected {k} signs in {{+1, -1}}, got {signs:?}"
        )));
    }
    let sign_diag = DMatrix::from_fn(k, k, |r, c| if r == c { i32::from(signs[r]) } else { 0 });
    let gens = irreducible_skew_generators(m)?;
    let ident: DMatrix<i32> = DMatrix::identity(l, l);
    let zero: DMatrix<i32> = DMatrix::zeros(l, l);
    let block = |a: &DMatrix<i32>, b: &DMatrix<i32>, c: &DMatrix<i32>, d: &DMatrix<i32>| {
        let mut p = DMatrix::zeros(2 * l, 2 * l);
        p.view_mut((0, 0), (l, l)).copy_from(a);
        p.view_mut((0, l), (l, l)).copy_from(b);
        p.view_mut((l, 0), (l, l)).copy_from(c);
        p.view_mut((l, l), (l, l)).copy_from(d);
        p
    };
    let mut matrices = vec![
        block(&ident, &zero, &zero, &-&ident),
        block(&zero, &ident, &ident, &zero),
    ];
    for e in &gens {
        let eb = sign_diag.kronecker(e);
        matrices.push(block(&zero, &eb, &-&eb, &zero));
    }
    CliffordSystem::from_parts(matrices, k, Some(signs))
}

/// The `(m, l) = (8, 16)` system obtained as the first nine matrices of the
/// `m = 9`, `l = 16` system, together with the tenth matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSystem {
    pub full: CliffordSystem<i32>,
    pub base: CliffordSystem<i32>,
    pub companion: DMatrix<i32>,
}

pub fn build_extended_system() -> Result<ExtendedSystem> {
    let full = build_clifford_system(9, 1, None)?;
    let mut base = full.subsystem(9)?;
    base.k = 2;
    let companion = full.matrices[9].clone();
    Ok(ExtendedSystem {
        full,
        base,
        companion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffordReport {
    /// `max_i max |P_i - P_iᵀ|`.
    pub symmetry: f64,
    /// `max_i max |P_i^2 - I|`.
    pub involution: f64,
    /// `max_i |Trace P_i|`.
    pub trace: f64,
    /// `max_{i<j} ‖P_i P_j + P_j P_i‖_F`.
    pub anticommutation: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_clifford<T: Real>(system: &CliffordSystem<T>, tol: f64) -> CliffordReport {
    let n = system.ambient_dim();
    let ident: DMatrix<T> = DMatrix::identity(n, n);
    let ps = system.matrices();
    let mut r = CliffordReport {
        symmetry: 0.0,
        involution: 0.0,
        trace: 0.0,
        anticommutation: 0.0,
        tol,
        pass: false,
    };
    for (i, p) in ps.iter().enumerate() {
        r.symmetry = r.symmetry.max(linalg::symmetry_residual(p));
        r.involution = r.involution.max(linalg::max_abs(&(p * p - &ident)));
        r.trace = r.trace.max(p.trace().abs().as_f64());
        for q in &ps[i + 1..] {
            r.anticommutation = r.anticommutation.max((p * q + q * p).norm().as_f64());
        }
    }
    r.pass = [r.symmetry, r.involution, r.trace, r.anticommutation]
        .iter()
        .all(|&v| v < tol);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceInvariant {
    /// `Trace(P_0 P_1 ⋯ P_m)`.
    pub trace: f64,
    /// `trace / (2 δ(4))` when `m = 4`.
    pub q: Option<f64>,
}

pub fn trace_invariant<T: Real>(system: &CliffordSystem<T>) -> TraceInvariant {
    let n = system.ambient_dim();
    let prod = system
        .matrices()
        .iter()
        .fold(DMatrix::<T>::identity(n, n), |acc, p| acc * p);
    let trace = prod.trace().as_f64();
    TraceInvariant {
        trace,
        q: (system.m() == 4).then_some(trace / 8.0),
    }
}

/// `P = Σ c_i P_i` for a unit coefficient vector.
pub fn clifford_sphere_element<T: Real>(
    system: &CliffordSystem<T>,
    coeffs: &[T],
) -> Result<DMatrix<T>> {
    if coeffs.len() != system.matrices().len() {
        return Err(Error::DimensionMismatch {
            expected: system.matrices().len(),
            found: coeffs.len(),
        });
    }
    let norm = coeffs.iter().fold(T::zero(), |a, &c| a + c * c).sqrt();
    if (norm - T::one()).abs().as_f64() > 1e-10 {
        return Err(Error::input(format!(
            "coefficient vector has norm {} (need 1)",
            norm.as_f64()
        )));
    }
    let n = system.ambient_dim();
    let mut p = DMatrix::zeros(n, n);
    for (q, &c) in system.matrices().iter().zip(coeffs) {
        p += q * c;
    }
    Ok(p)
}

/// Orthonormal bases of `E_+(P)` and `E_-(P)` for a symmetric involution.
pub fn involution_eigenspaces<T: Real>(p: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    let (vals, vecs) = linalg::sym_eigen(p);
    let plus: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > T::zero()).collect();
    let minus: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= T::zero()).collect();
    (
        linalg::select_columns(&vecs, &plus),
        linalg::select_columns(&vecs, &minus),
    )
}

#[derive(Serialize, Deserialize)]
struct RawSystem<T> {
    m: usize,
    l: usize,
    k: usize,
    signs: Option<Vec<i8>>,
    matrices: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar + Serialize> Serialize for CliffordSystem<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let matrices = self
            .matrices
            .iter()
            .map(|p| {
                (0..p.nrows())
                    .map(|r| (0..p.ncols()).map(|c| p[(r, c)].clone()).collect())
                    .collect()
            })
            .collect();
        RawSystem {
            m: self.m,
            l: self.l,
            k: self.k,
            signs: self.signs.clone(),
            matrices,
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for CliffordSystem<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSystem::<T>::deserialize(deserializer)?;
        let mut matrices = Vec::with_capacity(raw.matrices.len());
        for rows in raw.matrices {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(D::Error::custom("matrices must be square"));
            }
            let flat: Vec<T> = rows.into_iter().flatten().collect();
            matrices.push(DMatrix::from_row_iterator(n, n, flat));
        }
        let system =
            CliffordSystem::from_parts(matrices, raw.k, raw.signs).map_err(D::Error::custom)?;
        if system.m != raw.m || system.l != raw.l {
            return Err(D::Error::custom(format!(
                "header (m={}, l={}) does not match matrices (m={}, l={})",
                raw.m, raw.l, system.m, system.l
            )));
        }
        Ok(system)
    }
}
