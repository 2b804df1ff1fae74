//! Exact dense matrices over the cyclotomic scalars.
//!
//! The characteristic polynomial uses the Berkowitz algorithm, which needs
//! no divisions at all, so coefficients stay in whatever subring the entries
//! generate.

use std::fmt;

use num::complex::Complex64;

use super::cyclotomic::CycScalar;
use super::rational::Rat;
use super::ExactError;
use crate::word::WordMatrix;

/// Square matrix with entries in Q(zeta_k) (k = 1 for plain rationals).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<CycScalar>,
}

impl ExactMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> CycScalar) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        ExactMatrix { n, entries }
    }

    pub fn from_rows(rows: Vec<Vec<CycScalar>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        ExactMatrix { n, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| CycScalar::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { CycScalar::one() } else { CycScalar::zero() })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| CycScalar::zero())
    }

    pub fn diagonal(diag: Vec<CycScalar>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, d) in diag.into_iter().enumerate() {
            *m.get_mut(i, i) = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &CycScalar {
        &self.entries[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut CycScalar {
        &mut self.entries[i * self.n + j]
    }

    fn check_dim(&self, rhs: &ExactMatrix) -> Result<(), ExactError> {
        if self.n != rhs.n {
            return Err(ExactError::DimensionMismatch(self.n, rhs.n));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
        self.check_dim(rhs)?;
        let mut out = Vec::with_capacity(self.entries.len());
        for (a, b) in self.entries.iter().zip(&rhs.entries) {
            out.push(a.add(b)?);
        }
        Ok(ExactMatrix { n: self.n, entries: out })
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
        self.check_dim(rhs)?;
        let mut out = Vec::with_capacity(self.entries.len());
        for (a, b) in self.entries.iter().zip(&rhs.entries) {
            out.push(a.sub(b)?);
        }
        Ok(ExactMatrix { n: self.n, entries: out })
    }

    pub fn neg(&self) -> ExactMatrix {
        ExactMatrix { n: self.n, entries: self.entries.iter().map(|e| e.neg()).collect() }
    }

    pub fn scale(&self, c: &CycScalar) -> Result<ExactMatrix, ExactError> {
        let mut out = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            out.push(e.mul(c)?);
        }
        Ok(ExactMatrix { n: self.n, entries: out })
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, ExactError> {
        self.check_dim(rhs)?;
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CycScalar::zero();
                for l in 0..n {
                    if self.get(i, l).is_zero() || rhs.get(l, j).is_zero() {
                        continue;
                    }
                    acc = acc.add(&self.get(i, l).mul(rhs.get(l, j))?)?;
                }
                out.push(acc);
            }
        }
        Ok(ExactMatrix { n, entries: out })
    }

    pub fn transpose(&self) -> ExactMatrix {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Conjugate transpose, with entrywise conjugation the exact
    /// automorphism zeta -> zeta^{-1}.
    pub fn adjoint(&self) -> ExactMatrix {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Result<CycScalar, ExactError> {
        let mut acc = CycScalar::zero();
        for i in 0..self.n {
            acc = acc.add(self.get(i, i))?;
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Gauss-Jordan inverse over the field; 2x2 goes through the adjugate.
    pub fn inverse(&self) -> Result<ExactMatrix, ExactError> {
        let n = self.n;
        if n == 2 {
            let (a, b, c, d) = (self.get(0, 0), self.get(0, 1), self.get(1, 0), self.get(1, 1));
            let det = a.mul(d)?.sub(&b.mul(c)?)?;
            if det.is_zero() {
                return Err(ExactError::Singular);
            }
            let adj = ExactMatrix::from_rows(vec![
                vec![d.clone(), b.neg()],
                vec![c.neg(), a.clone()],
            ]);
            if det.is_one() {
                return Ok(adj);
            }
            return adj.scale(&det.inverse()?);
        }
        let mut work = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !work.get(r, col).is_zero())
                .ok_or(ExactError::Singular)?;
            if pivot_row != col {
                for j in 0..n {
                    work.entries.swap(col * n + j, pivot_row * n + j);
                    inv.entries.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pinv = work.get(col, col).inverse()?;
            for j in 0..n {
                *work.get_mut(col, j) = work.get(col, j).mul(&pinv)?;
                *inv.get_mut(col, j) = inv.get(col, j).mul(&pinv)?;
            }
            for r in 0..n {
                if r == col || work.get(r, col).is_zero() {
                    continue;
                }
                let factor = work.get(r, col).clone();
                for j in 0..n {
                    let dw = factor.mul(work.get(col, j))?;
                    *work.get_mut(r, j) = work.get(r, j).sub(&dw)?;
                    let di = factor.mul(inv.get(col, j))?;
                    *inv.get_mut(r, j) = inv.get(r, j).sub(&di)?;
                }
            }
        }
        Ok(inv)
    }

    /// Characteristic polynomial det(tI - M) by the Berkowitz algorithm
    /// (division-free). Monic of degree n.
    pub fn char_poly(&self) -> Result<CycPoly, ExactError> {
        let n = self.n;
        if n == 0 {
            return Ok(CycPoly::from_coeffs(vec![CycScalar::one()]));
        }
        // Coefficient vectors in descending degree order, starting from the
        // 1x1 leading principal submatrix.
        let mut v = vec![CycScalar::one(), self.get(0, 0).neg()];
        for r in 1..n {
            // A_{r+1} = [ m  s ; row  d ] with m the r x r leading block.
            let d = self.get(r, r);
            // Toeplitz column: t0 = 1, t1 = -d, t_{i} = -row . m^{i-2} . s
            let mut toeplitz = Vec::with_capacity(r + 2);
            toeplitz.push(CycScalar::one());
            toeplitz.push(d.neg());
            // Krylov sequence u = s, m s, m^2 s, ...
            let mut u: Vec<CycScalar> = (0..r).map(|i| self.get(i, r).clone()).collect();
            for step in 0..r {
                let mut dot = CycScalar::zero();
                for j in 0..r {
                    if self.get(r, j).is_zero() || u[j].is_zero() {
                        continue;
                    }
                    dot = dot.add(&self.get(r, j).mul(&u[j])?)?;
                }
                toeplitz.push(dot.neg());
                if step + 1 < r {
                    let mut next = vec![CycScalar::zero(); r];
                    for i in 0..r {
                        for j in 0..r {
                            if self.get(i, j).is_zero() || u[j].is_zero() {
                                continue;
                            }
                            next[i] = next[i].add(&self.get(i, j).mul(&u[j])?)?;
                        }
                    }
                    u = next;
                }
            }
            // v_new[i] = sum_j toeplitz[i - j] * v[j]
            let mut vnew = vec![CycScalar::zero(); r + 2];
            for (i, slot) in vnew.iter_mut().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    if j > i || i - j >= toeplitz.len() || vj.is_zero() {
                        continue;
                    }
                    *slot = slot.add(&toeplitz[i - j].mul(vj)?)?;
                }
            }
            v = vnew;
        }
        v.reverse(); // ascending order
        Ok(CycPoly::from_coeffs(v))
    }

    /// Exact determinant, read off the characteristic polynomial.
    pub fn det(&self) -> Result<CycScalar, ExactError> {
        let p = self.char_poly()?;
        let c0 = p.coeff(0);
        if self.n.is_multiple_of(2) {
            Ok(c0)
        } else {
            Ok(c0.neg())
        }
    }

    /// Floating-point image of the matrix.
    pub fn to_complex_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_complex()).collect())
            .collect()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).serialize()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl WordMatrix for ExactMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn identity_like(&self) -> Self {
        Self::identity(self.n)
    }

    fn mat_mul(&self, rhs: &Self) -> Self {
        self.mul(rhs).expect("dimension checked by evaluator")
    }

    fn try_inverse(&self) -> Result<Self, String> {
        self.inverse().map_err(|e| e.to_string())
    }
}

/// Polynomial with cyclotomic coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycPoly {
    coeffs: Vec<CycScalar>,
}

impl CycPoly {
    pub fn from_coeffs(mut coeffs: Vec<CycScalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        CycPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| CycScalar::from_i64(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_coeffs(vec![CycScalar::one()])
    }

    /// t - root
    pub fn linear(root: CycScalar) -> Self {
        Self::from_coeffs(vec![root.neg(), CycScalar::one()])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> CycScalar {
        self.coeffs.get(i).cloned().unwrap_or_else(CycScalar::zero)
    }

    pub fn coeffs(&self) -> &[CycScalar] {
        &self.coeffs
    }

    pub fn mul(&self, rhs: &CycPoly) -> Result<CycPoly, ExactError> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Ok(CycPoly { coeffs: Vec::new() });
        }
        let mut out = vec![CycScalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(CycPoly::from_coeffs(out))
    }

    /// Complex roots read numerically (for cross-checks against float
    /// eigenvalues; exact identity checks compare coefficients instead).
    pub fn to_complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_complex()).collect()
    }
}

impl fmt::Display for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({})", c.serialize())?,
                1 => write!(f, "({})*t", c.serialize())?,
                _ => write!(f, "({})*t^{}", c.serialize(), i)?,
            }
        }
        Ok(())
    }
}

/// The 2x2 matrix J_r = [[0, 1], [r, 0]]; J_r^2 = r I.
pub fn j_matrix(r: &CycScalar) -> ExactMatrix {
    ExactMatrix::from_rows(vec![
        vec![CycScalar::zero(), CycScalar::one()],
        vec![r.clone(), CycScalar::zero()],
    ])
}

/// Rational matrix entry n/d, for tests and enumeration.
pub fn rat_entry(n: i64, d: i64) -> CycScalar {
    CycScalar::from_rat(Rat::new(num::BigInt::from(n), num::BigInt::from(d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta(k: u32) -> CycScalar {
        CycScalar::zeta(k).unwrap()
    }

    #[test]
    fn char_poly_of_j_r_is_t2_minus_r() {
        for r in [CycScalar::from_i64(-1), zeta(6), zeta(8).pow(3).unwrap()] {
            let m = j_matrix(&r);
            let p = m.char_poly().unwrap();
            assert_eq!(p.degree(), 2);
            assert_eq!(p.coeff(2), CycScalar::one());
            assert!(p.coeff(1).is_zero());
            assert_eq!(p.coeff(0), r.neg());
        }
    }

    #[test]
    fn char_poly_matches_cofactor_expansion_3x3() {
        let m = ExactMatrix::from_i64_rows(&[&[2, 1, 0], &[-1, 3, 1], &[0, 5, -2]]);
        let p = m.char_poly().unwrap();
        // det(tI - M) = t^3 - (tr) t^2 + (sum 2x2 principal minors) t - det
        // tr = 3; minors: (2*3-(-1)) + (2*-2-0) + (3*-2-5) = 7 - 4 - 11 = -8;
        // det = 2*(-11) - 1*2 = -24
        assert_eq!(p.coeff(3), CycScalar::from_i64(1));
        assert_eq!(p.coeff(2), CycScalar::from_i64(-3));
        assert_eq!(p.coeff(1), CycScalar::from_i64(-8));
        assert_eq!(p.coeff(0), CycScalar::from_i64(24));
        assert_eq!(m.det().unwrap(), CycScalar::from_i64(-24));
    }

    #[test]
    fn inverse_of_j_minus_one() {
        let j = j_matrix(&CycScalar::from_i64(-1));
        let inv = j.inverse().unwrap();
        assert_eq!(inv, j.neg());
        assert!(j.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&j).unwrap().is_identity());
    }

    #[test]
    fn inverse_of_torus_diagonal() {
        let m = ExactMatrix::diagonal(vec![zeta(6), zeta(6).pow(-1).unwrap()]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv, ExactMatrix::diagonal(vec![zeta(6).pow(5).unwrap(), zeta(6)]));
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = ExactMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert!(matches!(m.inverse(), Err(ExactError::Singular)));
    }

    #[test]
    fn char_poly_similarity_invariance() {
        let m = ExactMatrix::from_i64_rows(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let p = ExactMatrix::from_i64_rows(&[&[1, 2, 0], &[0, 1, 3], &[1, 0, 1]]);
        let conj = p.mul(&m).unwrap().mul(&p.inverse().unwrap()).unwrap();
        assert_eq!(m.char_poly().unwrap(), conj.char_poly().unwrap());
    }

    #[test]
    fn word_matrix_impl_is_consistent() {
        use crate::word::Word;
        let j = j_matrix(&CycScalar::from_i64(-1));
        // x1^2 -> -I
        let sq = Word::parse("x1^2").unwrap().evaluate(std::slice::from_ref(&j)).unwrap();
        assert_eq!(sq, ExactMatrix::identity(2).neg());
        // x1^3 -> -J
        let cube = Word::parse("x1^3").unwrap().evaluate(std::slice::from_ref(&j)).unwrap();
        assert_eq!(cube, j.neg());
        // commutator of equal arguments is the identity
        let c = Word::commutator().evaluate(&[j.clone(), j]).unwrap();
        assert!(c.is_identity());
    }
}
