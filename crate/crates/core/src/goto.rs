//! Torus-normalizing elements x_n with fixed-point-free adjoint action on
//! Lie(T), and the torus commutator equation [x, t] = g0.
//!
//! Since Ad(x) - 1 is invertible on Lie(T), every torus element is a
//! commutator [x, t]: writing conjugation by x on model angle coordinates as
//! an integer matrix M, the equation becomes the linear system
//! (M - I) theta_t = theta_{g0}, solved in double precision and certified by
//! direct multiplication. All structural facts about x_n itself
//! (characteristic polynomial, det(Ad(x) - 1) != 0, membership) are checked
//! in exact arithmetic.

use num::complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{CycPoly, CycScalar, ExactError, ExactMatrix};
use crate::family::PairStructure;
use crate::group::{GroupCtx, GroupError, TorusPoint};
use crate::matnum::{frobenius_dist, solve_real_linear, CMatrix, MatError};

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum GotoError {
    #[error("context {0} has no Goto construction")]
    UnsupportedContext(String),
    #[error("element does not normalize the torus: {0}")]
    NotNormalizing(String),
    #[error("adjoint rounding drift {0:.3e} exceeds 1e-10")]
    RoundingDrift(f64),
    #[error("Ad(x) - 1 is singular on Lie(T)")]
    SingularAd,
    #[error("no lattice shift solved the commutator equation (best residual {0:.3e})")]
    CommutatorResidual(f64),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// A torus-normalizing element with its integer adjoint action.
pub struct GotoElement {
    pub ctx: GroupCtx,
    /// Exact matrix (entries are roots of unity times 0/1).
    pub exact: ExactMatrix,
    /// Floating mirror used by the numerical pipeline.
    pub float: CMatrix,
    /// Ad(x) on the model Lie(T) basis: difference basis E^k - E^{k+1} for
    /// SU (size n-1), paired basis E^k - E^{n+k} for Sp and K (size n).
    pub ad: Vec<Vec<i64>>,
    /// SU only: whether the even-rank branch (extra zeta_{2n} scalar) is in
    /// force; it changes the preimage target downstream.
    pub su_even_branch: bool,
}

impl GotoElement {
    pub fn ad_matrix_exact(&self) -> ExactMatrix {
        let m = self.ad.len();
        ExactMatrix::from_fn(m, |i, j| CycScalar::from_i64(self.ad[i][j]))
    }

    /// det(Ad(x) - 1) on Lie(T), exactly.
    pub fn det_ad_minus_one(&self) -> Result<CycScalar, ExactError> {
        let m = self.ad_matrix_exact();
        let diff = m.sub(&ExactMatrix::identity(m.dim()))?;
        diff.det()
    }
}

/// Builds the family's x_n with certified invariants.
pub fn build_goto(ctx: &GroupCtx) -> Result<GotoElement, GotoError> {
    let (family, n) = ctx
        .compact()
        .ok_or_else(|| GotoError::UnsupportedContext(ctx.to_string()))?;
    let exact = family.goto_matrix(n);
    if !ctx.member_exact(&exact)? {
        return Err(GotoError::NotNormalizing("x_n fails exact membership".into()));
    }
    let ad = ad_on_torus(ctx, &exact)?;
    let float = CMatrix::from_rows(&exact.to_complex_rows());
    let out = GotoElement { ctx: *ctx, exact, float, ad, su_even_branch: matches!(family.structure(), PairStructure::None) && n % 2 == 0 };
    if out.det_ad_minus_one()?.is_zero() {
        return Err(GotoError::SingularAd);
    }
    Ok(out)
}

/// Position permutation induced by conjugation on diagonal matrices:
/// x E^i x^{-1} = E^{sigma(i)}. Fails if x does not normalize the torus.
fn diag_permutation(x: &ExactMatrix) -> Result<Vec<usize>, GotoError> {
    let d = x.dim();
    let xinv = x.inverse().map_err(|_| GotoError::NotNormalizing("singular".into()))?;
    let mut sigma = vec![usize::MAX; d];
    for i in 0..d {
        let mut unit = ExactMatrix::zeros(d);
        *unit.get_mut(i, i) = CycScalar::one();
        let conj = x.mul(&unit)?.mul(&xinv)?;
        let mut found = None;
        for r in 0..d {
            for c in 0..d {
                let e = conj.get(r, c);
                if e.is_zero() {
                    continue;
                }
                if r != c || found.is_some() || !e.is_one() {
                    return Err(GotoError::NotNormalizing(format!(
                        "conjugate of diagonal unit {i} is not a diagonal unit"
                    )));
                }
                found = Some(r);
            }
        }
        sigma[i] = found.ok_or_else(|| GotoError::NotNormalizing("conjugate vanished".into()))?;
    }
    Ok(sigma)
}

/// The integer matrix of Ad(x) on the model Lie(T) basis.
pub fn ad_on_torus(ctx: &GroupCtx, x: &ExactMatrix) -> Result<Vec<Vec<i64>>, GotoError> {
    let (family, n) = ctx
        .compact()
        .ok_or_else(|| GotoError::UnsupportedContext(ctx.to_string()))?;
    let sigma = diag_permutation(x)?;
    match family.structure() {
        PairStructure::None => {
            // difference basis D_k = E^k - E^{k+1}, k = 0..n-2;
            // image E^a - E^b expands to a signed interval sum
            let mut m = vec![vec![0i64; n - 1]; n - 1];
            for k in 0..n - 1 {
                let a = sigma[k];
                let b = sigma[k + 1];
                if a < b {
                    for row in m.iter_mut().take(b).skip(a) {
                        row[k] += 1;
                    }
                } else {
                    for row in m.iter_mut().take(a).skip(b) {
                        row[k] -= 1;
                    }
                }
            }
            Ok(m)
        }
        _ => {
            // paired basis F_k = E^k - E^{n+k}, k = 0..n-1
            let mut m = vec![vec![0i64; n]; n];
            for k in 0..n {
                let a = sigma[k];
                let b = sigma[n + k];
                if a < n {
                    if b != a + n {
                        return Err(GotoError::NotNormalizing(
                            "conjugation does not respect the pairing".into(),
                        ));
                    }
                    m[a][k] = 1;
                } else {
                    if b != a - n {
                        return Err(GotoError::NotNormalizing(
                            "conjugation does not respect the pairing".into(),
                        ));
                    }
                    m[a - n][k] = -1;
                }
            }
            Ok(m)
        }
    }
}

/// Float-input variant: entries of Ad(x) are computed by conjugating basis
/// elements and rounding, with the drift reported against 1e-10.
pub fn ad_on_torus_float(ctx: &GroupCtx, x: &CMatrix) -> Result<Vec<Vec<i64>>, GotoError> {
    let (family, n) = ctx
        .compact()
        .ok_or_else(|| GotoError::UnsupportedContext(ctx.to_string()))?;
    let d = ctx.dimension();
    let xinv = x.inverse().map_err(GotoError::Mat)?;
    // conjugate each diagonal unit and read off positions
    let mut sigma = vec![usize::MAX; d];
    let mut drift: f64 = 0.0;
    for i in 0..d {
        let mut unit = CMatrix::zeros(d);
        unit.set(i, i, Complex64::new(1.0, 0.0));
        let conj = x.mul(&unit).mul(&xinv);
        let mut best = (0usize, 0.0f64);
        for r in 0..d {
            let mag = conj.at(r, r).norm();
            if mag > best.1 {
                best = (r, mag);
            }
        }
        sigma[i] = best.0;
        let mut ideal = CMatrix::zeros(d);
        ideal.set(best.0, best.0, Complex64::new(1.0, 0.0));
        drift = drift.max(frobenius_dist(&conj, &ideal)?);
    }
    if drift > 1e-10 {
        return Err(GotoError::RoundingDrift(drift));
    }
    // reuse the exact path on the recovered permutation
    let perm = sigma;
    match family.structure() {
        PairStructure::None => {
            let mut m = vec![vec![0i64; n - 1]; n - 1];
            for k in 0..n - 1 {
                let (a, b) = (perm[k], perm[k + 1]);
                if a < b {
                    for row in m.iter_mut().take(b).skip(a) {
                        row[k] += 1;
                    }
                } else {
                    for row in m.iter_mut().take(a).skip(b) {
                        row[k] -= 1;
                    }
                }
            }
            Ok(m)
        }
        _ => {
            let mut m = vec![vec![0i64; n]; n];
            for k in 0..n {
                let a = perm[k];
                if a < n {
                    m[a][k] = 1;
                } else {
                    m[a - n][k] = -1;
                }
            }
            Ok(m)
        }
    }
}

/// Solves [x, t] = T(g0) for t in the torus; the returned point satisfies
/// || x T(t) x^{-1} T(t)^{-1} - T(g0) ||_F <= 1e-9.
pub fn solve_commutator(goto: &GotoElement, g0: &TorusPoint) -> Result<TorusPoint, GotoError> {
    let (family, n) = goto.ctx.compact().expect("goto elements are compact");
    let dim = goto.ad.len();
    let m = nalgebra::DMatrix::<f64>::from_fn(dim, dim, |i, j| goto.ad[i][j] as f64);
    let m_minus_i = &m - nalgebra::DMatrix::<f64>::identity(dim, dim);

    // right-hand side in solver coordinates
    let base_rhs: Vec<f64> = match family.structure() {
        PairStructure::None => {
            // difference coordinates of a sum-zero angle representative
            let mut angles = g0.angles.clone();
            let total: f64 = angles.iter().sum();
            let wraps = (total / TAU).round();
            angles[n - 1] -= TAU * wraps;
            let mut c = Vec::with_capacity(n - 1);
            let mut acc = 0.0;
            for a in angles.iter().take(n - 1) {
                acc += a;
                c.push(acc);
            }
            c
        }
        _ => g0.angles.clone(),
    };

    let target = g0.matrix();
    let xf = &goto.float;
    let xadj = xf.adjoint();
    let mut best_resid = f64::INFINITY;

    // the principal solution works in every observed case; a few 2 pi
    // lattice shifts are kept as a safety valve
    let mut shifts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    for i in 0..dim {
        for s in [TAU, -TAU] {
            let mut v = vec![0.0; dim];
            v[i] = s;
            shifts.push(v);
        }
    }
    for shift in &shifts {
        let rhs: Vec<f64> = base_rhs.iter().zip(shift).map(|(a, b)| a + b).collect();
        let sol = match solve_real_linear(&m_minus_i, &rhs) {
            Ok(s) => s,
            Err(MatError::IllConditioned(_)) => return Err(GotoError::SingularAd),
            Err(e) => return Err(GotoError::Mat(e)),
        };
        let angles: Vec<f64> = match family.structure() {
            PairStructure::None => {
                // invert the partial sums; the last angle restores sum zero
                let mut out = Vec::with_capacity(n);
                out.push(sol[0]);
                for k in 1..n - 1 {
                    out.push(sol[k] - sol[k - 1]);
                }
                out.push(-sol[n - 2]);
                out
            }
            _ => sol,
        };
        let t = TorusPoint::new(family, n, angles);
        let tm = t.matrix();
        let commutator = xf.mul(&tm).mul(&xadj).mul(&tm.adjoint());
        let resid = frobenius_dist(&commutator, &target)?;
        if resid <= 1e-9 {
            return Ok(t);
        }
        best_resid = best_resid.min(resid);
    }
    Err(GotoError::CommutatorResidual(best_resid))
}

/// Exact and numerical certification data for a Goto element.
#[derive(Debug, Serialize)]
pub struct GotoReport {
    pub group: String,
    pub det_ad_minus_one: String,
    pub det_nonsingular: bool,
    pub char_poly: String,
    pub principal_image_char_poly: String,
    pub char_polys_match: bool,
    pub has_eigenvalue_one: Option<bool>,
    pub member_exact: bool,
    pub member_float_defect: f64,
    pub ad_matrix: Vec<Vec<i64>>,
    pub ok: bool,
}

/// Exact characteristic polynomial of the principal image of the
/// zeta_m torus point: the product of (t - zeta_m^w) over the weights.
pub fn principal_image_char_poly(ctx: &GroupCtx) -> Result<CycPoly, GotoError> {
    let (family, n) = ctx
        .compact()
        .ok_or_else(|| GotoError::UnsupportedContext(ctx.to_string()))?;
    let m = family.preimage_conductor(n);
    let mut poly = CycPoly::one();
    for w in family.weights(n) {
        let root = CycScalar::zeta_pow(m, w)?;
        poly = poly.mul(&CycPoly::linear(root))?;
    }
    Ok(poly)
}

/// Certifies the structural facts about x_n: exact determinant of
/// Ad(x) - 1, exact characteristic polynomial equality with the principal
/// image, membership, and (for K) the eigenvalue-one condition.
pub fn certify_goto(goto: &GotoElement) -> Result<GotoReport, GotoError> {
    let (family, _n) = goto.ctx.compact().expect("compact");
    let det = goto.det_ad_minus_one()?;
    let char_poly = goto.exact.char_poly()?;
    let expected = principal_image_char_poly(&goto.ctx)?;
    let char_polys_match = char_poly == expected;
    let has_eigenvalue_one = match family.structure() {
        PairStructure::Orthogonal => {
            // p(1) = 0 exactly
            let mut acc = CycScalar::zero();
            for c in char_poly.coeffs() {
                acc = acc.add(c)?;
            }
            Some(acc.is_zero())
        }
        _ => None,
    };
    let member_exact = goto.ctx.member_exact(&goto.exact)?;
    let member_float = goto.ctx.member(&goto.float, 1e-12)?;
    let det_nonsingular = !det.is_zero();
    let ok = det_nonsingular
        && char_polys_match
        && member_exact
        && member_float.ok
        && has_eigenvalue_one.unwrap_or(true);
    Ok(GotoReport {
        group: goto.ctx.to_string(),
        det_ad_minus_one: det.serialize(),
        det_nonsingular,
        char_poly: char_poly.to_string(),
        principal_image_char_poly: expected.to_string(),
        char_polys_match,
        has_eigenvalue_one,
        member_exact,
        member_float_defect: member_float.max_defect(),
        ad_matrix: goto.ad.clone(),
        ok,
    })
}
