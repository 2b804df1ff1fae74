//! Dense complex floating-point linear algebra: products, norms, normal
//! eigendecomposition, real linear solves, and re-unitarization.
//!
//! Every matrix diagonalized here is unitary (or anti-Hermitian, for random
//! Lie-algebra sampling), so a normal eigensolver suffices: split A into the
//! commuting Hermitian pair H = (A + A*)/2, K = (A - A*)/(2i), diagonalize H,
//! then diagonalize K restricted to each eigenspace of H. Results are judged
//! by residuals, never by construction.

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word::WordMatrix;

/// Default residual tolerance for internal verification steps.
pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix dimensions {0} and {1} do not match")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not normal: commutator defect {defect:.3e} exceeds {bound:.3e}")]
    NotNormal { defect: f64, bound: f64 },
    #[error("eigendecomposition residual {resid:.3e} exceeds {bound:.3e}")]
    EigResidual { resid: f64, bound: f64 },
    #[error("singular or ill-conditioned matrix (condition estimate {0:.3e})")]
    IllConditioned(f64),
    #[error("linear solve residual {0:.3e} above bound")]
    SolveResidual(f64),
    #[error("input is {0:.3e} from the unitary group, beyond the 0.1 allowance")]
    TooFarFromUnitary(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Square complex matrix in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    m: DMatrix<Complex64>,
}

impl CMatrix {
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "CMatrix must be square");
        CMatrix { m }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        CMatrix { m: DMatrix::from_fn(n, n, f) }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn identity(n: usize) -> Self {
        CMatrix { m: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        CMatrix { m: DMatrix::zeros(n, n) }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        CMatrix { m: DMatrix::from_diagonal(&DVector::from_row_slice(diag)) }
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.m[(i, j)] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix { m: &self.m * &rhs.m }
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix { m: &self.m + &rhs.m }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix { m: &self.m - &rhs.m }
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix { m: &self.m * c }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix { m: self.m.adjoint() }
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix { m: self.m.transpose() }
    }

    pub fn conjugate(&self) -> CMatrix {
        CMatrix { m: self.m.map(|z| z.conj()) }
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn det(&self) -> Complex64 {
        self.m.clone().lu().determinant()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn inverse(&self) -> Result<CMatrix, MatError> {
        let n = self.dim();
        let norm = self.frobenius_norm();
        let inv = self
            .m
            .clone()
            .try_inverse()
            .ok_or(MatError::IllConditioned(f64::INFINITY))?;
        let resid = (&self.m * &inv - DMatrix::<Complex64>::identity(n, n)).norm();
        if !resid.is_finite() || resid > 1e-6 * norm.max(1.0) {
            return Err(MatError::IllConditioned(resid));
        }
        Ok(CMatrix { m: inv })
    }

    /// Column j as a vector.
    pub fn column(&self, j: usize) -> DVector<Complex64> {
        self.m.column(j).into_owned()
    }

    pub fn rows_as_vecs(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.m[(i, j)]).collect())
            .collect()
    }
}

impl WordMatrix for CMatrix {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn identity_like(&self) -> Self {
        CMatrix::identity(self.dim())
    }

    fn mat_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }

    fn try_inverse(&self) -> Result<Self, String> {
        self.inverse().map_err(|e| e.to_string())
    }
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.m[(i, j)].re, self.m[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix is not square"));
        }
        Ok(CMatrix::from_fn(n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
    }
}

/// The SU(2) element of a unit quaternion (a, b, c, d):
/// [[a + bi, c + di], [-c + di, a - bi]]. Non-unit input is normalized.
pub fn su2_from_quaternion(q: [f64; 4]) -> CMatrix {
    let norm = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    let [a, b, c, d] = q.map(|x| x / norm);
    CMatrix::from_rows(&[
        vec![Complex64::new(a, b), Complex64::new(c, d)],
        vec![Complex64::new(-c, d), Complex64::new(a, -b)],
    ])
}

/// Frobenius distance between equal-sized matrices.
pub fn frobenius_dist(a: &CMatrix, b: &CMatrix) -> Result<f64, MatError> {
    if a.dim() != b.dim() {
        return Err(MatError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.sub(b).frobenius_norm())
}

/// Eigendecomposition of a normal matrix: unit eigenvector columns and the
/// matching eigenvalue list, sorted by principal argument in [0, 2pi) with
/// ties broken by |Im|.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
}

impl EigDecomp {
    pub fn residual(&self, a: &CMatrix) -> f64 {
        let av = a.mul(&self.vectors);
        let vd = self.vectors.mul(&CMatrix::diagonal(&self.values));
        av.sub(&vd).frobenius_norm()
    }
}

fn sort_key(z: Complex64) -> (f64, f64) {
    let mut arg = z.arg();
    if arg < -1e-14 {
        arg += 2.0 * std::f64::consts::PI;
    }
    (arg.max(0.0), z.im.abs())
}

/// Eigendecomposition for normal (here: unitary or anti-Hermitian) input.
pub fn eig_normal(a: &CMatrix, tol: f64) -> Result<EigDecomp, MatError> {
    if !a.is_finite() {
        return Err(MatError::NonFinite);
    }
    let n = a.dim();
    let norm = a.frobenius_norm();
    let comm = a.mul(&a.adjoint()).sub(&a.adjoint().mul(a)).frobenius_norm();
    if comm > tol * norm * norm {
        return Err(MatError::NotNormal { defect: comm, bound: tol * norm * norm });
    }

    let half = Complex64::new(0.5, 0.0);
    let h = a.add(&a.adjoint()).scale(half);
    let k = a.sub(&a.adjoint()).scale(Complex64::new(0.0, -0.5));

    let se = h.m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let mut v = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        v.set_column(dst, &se.eigenvectors.column(src));
    }
    let hvals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();

    // Cluster equal H-eigenvalues and rediagonalize K inside each cluster.
    let cluster_gap = (tol * 100.0).max(1e-8) * norm.max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && hvals[end] - hvals[end - 1] <= cluster_gap {
            end += 1;
        }
        if end - start > 1 {
            let w = v.columns(start, end - start).into_owned();
            let krest = w.adjoint() * &k.m * &w;
            // Hermitian up to numerical noise; symmetrize before decomposing.
            let krest = (&krest + krest.adjoint()) * half;
            let sub = krest.symmetric_eigen();
            let rotated = &w * &sub.eigenvectors;
            for (off, col) in (start..end).enumerate() {
                v.set_column(col, &rotated.column(off));
            }
        }
        start = end;
    }

    let vm = CMatrix { m: v };
    // Rayleigh quotients give the eigenvalues with the right pairing.
    let av = a.mul(&vm);
    let mut values: Vec<Complex64> = (0..n)
        .map(|j| vm.column(j).dotc(&av.column(j)))
        .collect();

    // Deterministic ordering.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&i, &j| {
        let (ai, ti) = sort_key(values[i]);
        let (aj, tj) = sort_key(values[j]);
        ai.partial_cmp(&aj).unwrap().then(ti.partial_cmp(&tj).unwrap())
    });
    let mut vfinal = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in perm.iter().enumerate() {
        vfinal.set_column(dst, &vm.m.column(src));
    }
    values = perm.iter().map(|&i| values[i]).collect();

    let out = EigDecomp { values, vectors: CMatrix { m: vfinal } };
    let resid = out.residual(a);
    let bound = (tol * norm.max(1.0)).max(1e-12);
    if resid > bound {
        return Err(MatError::EigResidual { resid, bound });
    }
    Ok(out)
}

/// Solves M x = b for real square M with a residual-certified answer.
pub fn solve_real_linear(m: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>, MatError> {
    let n = m.nrows();
    assert_eq!(m.ncols(), n);
    if b.len() != n {
        return Err(MatError::DimensionMismatch(n, b.len()));
    }
    let lu = m.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or(MatError::IllConditioned(f64::INFINITY))?;
    let cond = m.norm() * inv.norm();
    if !cond.is_finite() || cond > 1e12 {
        return Err(MatError::IllConditioned(cond));
    }
    let bv = DVector::from_row_slice(b);
    let x = &inv * &bv;
    let resid = (m * &x - &bv).norm();
    let bound = 1e-10 * (m.norm() * x.norm() + bv.norm());
    if resid > bound.max(1e-14) {
        return Err(MatError::SolveResidual(resid));
    }
    Ok(x.iter().copied().collect())
}

/// Projects onto the unitary group via the Newton polar iteration
/// X <- (X + X^{-*}) / 2. The input must already be within Frobenius
/// distance 0.1 of a unitary matrix.
pub fn unitarize(a: &CMatrix) -> Result<CMatrix, MatError> {
    if !a.is_finite() {
        return Err(MatError::NonFinite);
    }
    let n = a.dim();
    let mut x = a.m.clone();
    for _ in 0..40 {
        let defect = (x.adjoint() * &x - DMatrix::<Complex64>::identity(n, n)).norm();
        if defect <= 1e-13 {
            break;
        }
        let inv_adj = x
            .clone()
            .try_inverse()
            .ok_or(MatError::IllConditioned(f64::INFINITY))?
            .adjoint();
        x = (&x + inv_adj) * Complex64::new(0.5, 0.0);
    }
    let u = CMatrix { m: x };
    let defect = (u.m.adjoint() * &u.m - DMatrix::<Complex64>::identity(n, n)).norm();
    if defect > 1e-12 {
        return Err(MatError::TooFarFromUnitary(defect));
    }
    let dist = frobenius_dist(a, &u)?;
    if dist > 0.1 + 1e-9 {
        return Err(MatError::TooFarFromUnitary(dist));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cycle3() -> CMatrix {
        // the 3-cycle permutation matrix
        CMatrix::from_fn(3, |i, j| {
            if (j + 1) % 3 == i {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn eig_identity() {
        let e = eig_normal(&CMatrix::identity(4), 1e-10).unwrap();
        for v in e.values {
            assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eig_three_cycle_has_cube_roots_of_unity() {
        let e = eig_normal(&cycle3(), 1e-10).unwrap();
        let pi = std::f64::consts::PI;
        let expect = [c(1.0, 0.0), Complex64::from_polar(1.0, 2.0 * pi / 3.0), Complex64::from_polar(1.0, 4.0 * pi / 3.0)];
        for t in expect {
            assert!(
                e.values.iter().any(|v| (v - t).norm() < 1e-12),
                "missing eigenvalue {t}"
            );
        }
        assert!(e.residual(&cycle3()) < 1e-12);
    }

    #[test]
    fn eig_diagonal_torus_is_fixed() {
        let pi = std::f64::consts::PI;
        let z8 = Complex64::from_polar(1.0, pi / 4.0);
        let a = CMatrix::diagonal(&[z8, z8.conj()]);
        let e = eig_normal(&a, 1e-10).unwrap();
        assert!(e.residual(&a) < 1e-13);
        let mut got: Vec<Complex64> = e.values.clone();
        got.sort_by(|x, y| x.arg().partial_cmp(&y.arg()).unwrap());
        assert!((got[1] - z8).norm() < 1e-13);
    }

    #[test]
    fn eig_handles_degenerate_unitary() {
        // diag(1, 1, -1, i) conjugated by a fixed unitary mixes the
        // degenerate eigenspace; decomposition must still resolve it.
        let d = CMatrix::diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)]);
        // Householder-style unitary from a fixed unit vector
        let mut w = DMatrix::<Complex64>::identity(4, 4);
        let v = DVector::from_row_slice(&[c(0.5, 0.1), c(-0.3, 0.2), c(0.4, -0.4), c(0.2, 0.5)]);
        let v = &v / c(v.norm(), 0.0);
        w -= (&v * v.adjoint()) * c(2.0, 0.0);
        let q = CMatrix::from_dmatrix(w);
        let a = q.mul(&d).mul(&q.adjoint());
        let e = eig_normal(&a, 1e-10).unwrap();
        assert!(e.residual(&a) < 1e-11, "residual {}", e.residual(&a));
    }

    #[test]
    fn eig_rejects_non_normal() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(eig_normal(&a, 1e-10), Err(MatError::NotNormal { .. })));
    }

    #[test]
    fn frobenius_examples() {
        let i2 = CMatrix::identity(2);
        assert_eq!(frobenius_dist(&i2, &i2).unwrap(), 0.0);
        let d = frobenius_dist(&i2, &i2.scale(c(-1.0, 0.0))).unwrap();
        assert!((d - 2.0 * 2.0f64.sqrt()).abs() < 1e-15);
        assert!(frobenius_dist(&i2, &CMatrix::identity(3)).is_err());
    }

    #[test]
    fn frobenius_triangle_inequality() {
        let mut s = 42u64;
        let mut rnd = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for _ in 0..20 {
            let mut m = |_: ()| CMatrix::from_fn(4, |_, _| c(rnd(), rnd()));
            let (a, b, cc) = (m(()), m(()), m(()));
            let ab = frobenius_dist(&a, &b).unwrap();
            let bc = frobenius_dist(&b, &cc).unwrap();
            let ac = frobenius_dist(&a, &cc).unwrap();
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn solve_real_small() {
        let m = DMatrix::from_row_slice(1, 1, &[-2.0]);
        let x = solve_real_linear(&m, &[1.3]).unwrap();
        assert!((x[0] + 0.65).abs() < 1e-14);

        let id = DMatrix::<f64>::identity(3, 3);
        let x = solve_real_linear(&id, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn solve_real_random_residual() {
        let mut s = 7u64;
        let mut rnd = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = DMatrix::from_fn(8, 8, |i, j| if i == j { 4.0 + rnd() } else { rnd() });
        let b: Vec<f64> = (0..8).map(|_| rnd()).collect();
        let x = solve_real_linear(&m, &b).unwrap();
        let xv = DVector::from_row_slice(&x);
        let bv = DVector::from_row_slice(&b);
        assert!((m * xv - bv).norm() <= 1e-10);
    }

    #[test]
    fn solve_rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(solve_real_linear(&m, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn unitarize_examples() {
        let u = cycle3();
        let p = unitarize(&u).unwrap();
        assert!(frobenius_dist(&u, &p).unwrap() < 1e-12);

        let scaled = CMatrix::identity(3).scale(c(1.01, 0.0));
        let p = unitarize(&scaled).unwrap();
        assert!(frobenius_dist(&p, &CMatrix::identity(3)).unwrap() < 1e-12);

        // perturbed unitary comes back unitary and close to the input
        let mut perturbed = u.clone();
        perturbed.set(0, 1, perturbed.at(0, 1) + c(1e-6, -1e-6));
        let p = unitarize(&perturbed).unwrap();
        let defect = p.adjoint().mul(&p).sub(&CMatrix::identity(3)).frobenius_norm();
        assert!(defect < 1e-12);
        assert!(frobenius_dist(&p, &perturbed).unwrap() < 1e-5);

        // idempotent
        let pp = unitarize(&p).unwrap();
        assert!(frobenius_dist(&p, &pp).unwrap() < 1e-12);
    }

    #[test]
    fn unitarize_rejects_far_input() {
        let a = CMatrix::identity(2).scale(c(2.0, 0.0));
        assert!(matches!(unitarize(&a), Err(MatError::TooFarFromUnitary(_))));
    }
}
