//! Principal SU(2) embeddings via symmetric powers.
//!
//! `sym_power` gives the action on the degree-k monomial basis of binary
//! forms. The invariant bilinear form of that representation is recovered by
//! solving the linear invariance system exactly (no hard-coded sign
//! conventions), and the basis change Q into the standard SU(n) / Sp(n) /
//! K(2n) models combines the form congruence with the diagonal rescaling
//! that makes compact inputs land on unitary matrices.

use num::complex::Complex64;
use num::{BigInt, One, Zero};
use thiserror::Error;

use crate::exact::{CycScalar, ExactMatrix, Rat};
use crate::family::{CompactFamily, PairStructure};
use crate::group::GroupCtx;
use crate::matnum::CMatrix;

#[derive(Debug, Error)]
pub enum PrincipalError {
    #[error("invariant-form solution space has dimension {0}, expected 1")]
    FormSpaceDimension(usize),
    #[error("form congruence failure: {0}")]
    FormCongruence(String),
    #[error("embedding image failed membership with defect {0:.3e}")]
    ImageNotInGroup(f64),
}

fn binomial_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as u64
}

/// Matrix of A acting on the degree-k monomial basis e1^{k-j} e2^j of binary
/// forms; multiplicative in A.
pub fn sym_power_exact(k: usize, a: &ExactMatrix) -> ExactMatrix {
    assert_eq!(a.dim(), 2);
    let (aa, ab, ac, ad) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let pow_table = |x: &CycScalar| -> Vec<CycScalar> {
        let mut v = Vec::with_capacity(k + 1);
        v.push(CycScalar::one());
        for i in 0..k {
            v.push(v[i].mul(x).expect("conductor within cap"));
        }
        v
    };
    let (pa, pb, pc, pd) = (pow_table(aa), pow_table(ab), pow_table(ac), pow_table(ad));
    ExactMatrix::from_fn(k + 1, |r, j| {
        // coefficient of e1^{k-r} e2^r in (a e1 + c e2)^{k-j} (b e1 + d e2)^j
        let mut acc = CycScalar::zero();
        for s in 0..=(k - j).min(r) {
            let u = r - s;
            if u > j {
                continue;
            }
            let count = binomial_u64(k - j, s) * binomial_u64(j, u);
            let coeff = CycScalar::from_rat(Rat::from_integer(BigInt::from(count)));
            let term = coeff
                .mul(&pa[k - j - s])
                .and_then(|t| t.mul(&pc[s]))
                .and_then(|t| t.mul(&pb[j - u]))
                .and_then(|t| t.mul(&pd[u]))
                .expect("conductor within cap");
            acc = acc.add(&term).expect("conductor within cap");
        }
        acc
    })
}

/// Floating-point twin of `sym_power_exact`.
pub fn sym_power_float(k: usize, a: &CMatrix) -> CMatrix {
    assert_eq!(a.dim(), 2);
    let (aa, ab, ac, ad) = (a.at(0, 0), a.at(0, 1), a.at(1, 0), a.at(1, 1));
    let pow_table = |x: Complex64| -> Vec<Complex64> {
        let mut v = Vec::with_capacity(k + 1);
        v.push(Complex64::new(1.0, 0.0));
        for i in 0..k {
            v.push(v[i] * x);
        }
        v
    };
    let (pa, pb, pc, pd) = (pow_table(aa), pow_table(ab), pow_table(ac), pow_table(ad));
    CMatrix::from_fn(k + 1, |r, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..=(k - j).min(r) {
            let u = r - s;
            if u > j {
                continue;
            }
            let count = (binomial_u64(k - j, s) * binomial_u64(j, u)) as f64;
            acc += pa[k - j - s] * pc[s] * pb[j - u] * pd[u] * count;
        }
        acc
    })
}

/// Nullspace of a rational matrix (rows given), as a basis of column vectors.
fn rational_nullspace(mut rows: Vec<Vec<Rat>>, cols: usize) -> Vec<Vec<Rat>> {
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows.len()).find(|&r| !rows[r][col].is_zero());
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let inv = Rat::one() / rows[rank][col].clone();
        for v in rows[rank].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for j in 0..cols {
                    let delta = &f * &rows[rank][j];
                    rows[r][j] -= delta;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for col in 0..cols {
            if let Some(r) = pivot_of_col[col] {
                v[col] = -rows[r][free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// The invariant bilinear form of Sym^k, exact and normalized so the (0, k)
/// entry is 1: antidiagonal, skew for odd k, symmetric for even k.
///
/// The torus diag(2, 1/2) forces antidiagonal support (weights must cancel),
/// and the two unipotent generators pin the antidiagonal up to one scalar;
/// invariance under all of SL_2 then follows from Zariski density and is
/// re-verified exactly.
pub fn invariant_form(k: usize) -> Result<ExactMatrix, PrincipalError> {
    let upper = ExactMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
    let lower = ExactMatrix::from_i64_rows(&[&[1, 0], &[1, 1]]);
    let gens = [sym_power_exact(k, &upper), sym_power_exact(k, &lower)];
    let dim = k + 1;
    let mut rows = Vec::new();
    for rho in &gens {
        let rr: Vec<Vec<Rat>> = (0..dim)
            .map(|i| (0..dim).map(|j| rho.get(i, j).as_rat().expect("rational entries")).collect())
            .collect();
        for r in 0..dim {
            for s in 0..dim {
                // sum_j beta_j rho[j][r] rho[k-j][s] = beta_r delta_{s,k-r}
                let mut row = vec![Rat::zero(); dim];
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = &rr[j][r] * &rr[k - j][s];
                }
                if s == k - r {
                    row[r] -= Rat::one();
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let basis = rational_nullspace(rows, dim);
    if basis.len() != 1 {
        return Err(PrincipalError::FormSpaceDimension(basis.len()));
    }
    let beta = &basis[0];
    if beta[0].is_zero() {
        return Err(PrincipalError::FormCongruence("corner coefficient vanished".into()));
    }
    let scale = Rat::one() / beta[0].clone();
    let beta: Vec<Rat> = beta.iter().map(|b| b * &scale).collect();
    let b = ExactMatrix::from_fn(dim, |i, j| {
        if j == k - i {
            CycScalar::from_rat(beta[i].clone())
        } else {
            CycScalar::zero()
        }
    });
    // exact invariance re-check, including an element outside the generators
    let probe = ExactMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => CycScalar::from_rat(Rat::new(BigInt::from(2), BigInt::from(1))),
        (0, 1) => CycScalar::from_rat(Rat::new(BigInt::from(3), BigInt::from(1))),
        (1, 0) => CycScalar::from_rat(Rat::new(BigInt::from(1), BigInt::from(1))),
        _ => CycScalar::from_rat(Rat::new(BigInt::from(2), BigInt::from(1))),
    });
    for rho in gens.iter().chain([sym_power_exact(k, &probe)].iter()) {
        let lhs = rho.transpose().mul(&b).and_then(|m| m.mul(rho)).expect("exact product");
        if lhs != b {
            return Err(PrincipalError::FormCongruence("recovered form is not invariant".into()));
        }
    }
    Ok(b)
}

/// A principal embedding SU(2) -> SU(n) / Sp(n) / K(2n).
pub struct PrincipalEmbed {
    pub family: &'static dyn CompactFamily,
    pub n: usize,
    pub weights: Vec<i64>,
    pub sym_degree: usize,
    pub with_trivial: bool,
    pub basis_change: CMatrix,
    basis_change_inv: CMatrix,
}

impl PrincipalEmbed {
    /// Image of a 2x2 unimodular matrix in the target group's model.
    pub fn embed(&self, a: &CMatrix) -> CMatrix {
        let sym = sym_power_float(self.sym_degree, a);
        let lifted = if self.with_trivial {
            let d = sym.dim();
            CMatrix::from_fn(d + 1, |i, j| {
                if i < d && j < d {
                    sym.at(i, j)
                } else if i == d && j == d {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        } else {
            sym
        };
        self.basis_change.mul(&lifted).mul(&self.basis_change_inv)
    }
}

/// Verifies beta_j * C(k, j) = (-1)^j, the balance condition that makes a
/// unitary congruence onto the standard form possible.
fn check_balanced(b: &ExactMatrix, k: usize) -> Result<(), PrincipalError> {
    for j in 0..=k {
        let expect = if j % 2 == 0 { 1i64 } else { -1 };
        let scaled = b
            .get(j, k - j)
            .mul(&CycScalar::from_rat(Rat::from_integer(BigInt::from(binomial_u64(k, j)))))
            .expect("rational");
        if scaled != CycScalar::from_i64(expect) {
            return Err(PrincipalError::FormCongruence(format!(
                "antidiagonal entry {j} breaks the binomial balance"
            )));
        }
    }
    Ok(())
}

/// Builds the principal embedding for a compact family at rank n.
pub fn build_embedding(
    family: &'static dyn CompactFamily,
    n: usize,
) -> Result<PrincipalEmbed, PrincipalError> {
    assert!(n >= family.min_rank(), "rank below the family minimum");
    let (k, with_trivial) = family.sym_degree(n);
    let dim = family.dimension(n);
    let inv_sqrt_binom: Vec<f64> = (0..=k).map(|j| 1.0 / (binomial_u64(k, j) as f64).sqrt()).collect();

    let (q, qinv) = match family.structure() {
        PairStructure::None => {
            // SU: diagonal rescaling alone makes compact images unitary
            let q = CMatrix::from_fn(dim, |i, j| {
                if i == j {
                    Complex64::new(inv_sqrt_binom[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let qinv = CMatrix::from_fn(dim, |i, j| {
                if i == j {
                    Complex64::new(1.0 / inv_sqrt_binom[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            (q, qinv)
        }
        PairStructure::Symplectic => {
            let b = invariant_form(k)?;
            check_balanced(&b, k)?;
            // target slot i pairs source monomials (i, k - i)
            let half = dim / 2;
            let mut v = CMatrix::zeros(dim);
            for i in 0..half {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                v.set(i, i, Complex64::new(1.0, 0.0));
                v.set(half + i, k - i, Complex64::new(sign, 0.0));
            }
            build_q(&v, &inv_sqrt_binom, None)
        }
        PairStructure::Orthogonal => {
            let b = invariant_form(k)?;
            check_balanced(&b, k)?;
            let half = dim / 2;
            let mid = k / 2; // self-paired zero-weight monomial
            let trivial_src = k + 1;
            let mut v = CMatrix::zeros(dim);
            for i in 0..half - 1 {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                v.set(i, i, Complex64::new(1.0, 0.0));
                v.set(half + i, k - i, Complex64::new(sign, 0.0));
            }
            // the two zero-weight sources fill the last hyperbolic pair
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let sigma_positive = mid % 2 == 0;
            let unit = if sigma_positive {
                Complex64::new(0.0, s)
            } else {
                Complex64::new(s, 0.0)
            };
            v.set(half - 1, mid, unit);
            v.set(dim - 1, mid, -unit);
            v.set(half - 1, trivial_src, Complex64::new(s, 0.0));
            v.set(dim - 1, trivial_src, Complex64::new(s, 0.0));
            build_q(&v, &inv_sqrt_binom, Some(trivial_src))
        }
    };

    let embed = PrincipalEmbed {
        family,
        n,
        weights: family.weights(n),
        sym_degree: k,
        with_trivial,
        basis_change: q,
        basis_change_inv: qinv,
    };

    // spot-check: images of a fixed SU(2) element and of a torus element
    // must land in the group
    let ctx = GroupCtx::Compact { family, n };
    let theta = 0.73f64;
    let (c, sn) = (theta.cos(), theta.sin());
    let torus2 = CMatrix::from_rows(&[
        vec![Complex64::new(c, sn), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(c, -sn)],
    ]);
    let rot2 = CMatrix::from_rows(&[
        vec![Complex64::new(c, 0.0), Complex64::new(-sn, 0.0)],
        vec![Complex64::new(sn, 0.0), Complex64::new(c, 0.0)],
    ]);
    for probe in [torus2, rot2] {
        let img = embed.embed(&probe);
        let report = ctx.member(&img, 1e-10).map_err(|e| PrincipalError::FormCongruence(e.to_string()))?;
        if !report.ok {
            return Err(PrincipalError::ImageNotInGroup(report.max_defect()));
        }
    }
    Ok(embed)
}

/// Assembles Q = V * diag(1/sqrt C(k,j)) and its inverse from a unit-entry
/// congruence matrix V with at most two nonzero entries per column.
fn build_q(v: &CMatrix, inv_sqrt_binom: &[f64], trivial_src: Option<usize>) -> (CMatrix, CMatrix) {
    let dim = v.dim();
    let scale_of = |src: usize| -> f64 {
        match trivial_src {
            Some(t) if src == t => 1.0,
            _ => inv_sqrt_binom[src],
        }
    };
    let mut q = CMatrix::zeros(dim);
    let mut qinv = CMatrix::zeros(dim);
    for src in 0..dim {
        let s = scale_of(src);
        for row in 0..dim {
            let e = v.at(row, src);
            if e.norm() > 0.0 {
                q.set(row, src, e * s);
                // (V D)^{-1} = D^{-1} V^*
                qinv.set(src, row, e.conj() / s);
            }
        }
    }
    (q, qinv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_entry;
    use crate::family::lookup_family;
    use crate::matnum::{frobenius_dist, su2_from_quaternion};

    #[test]
    fn sym_power_identity_degree_one() {
        let a = ExactMatrix::from_i64_rows(&[&[1, 2], &[3, 7]]);
        assert_eq!(sym_power_exact(1, &a), a);
    }

    #[test]
    fn sym_power_of_diagonal() {
        let z = CycScalar::zeta(12).unwrap();
        let a = ExactMatrix::diagonal(vec![z.clone(), z.inverse().unwrap()]);
        let s = sym_power_exact(2, &a);
        let expect = ExactMatrix::diagonal(vec![
            z.pow(2).unwrap(),
            CycScalar::one(),
            z.pow(-2).unwrap(),
        ]);
        assert_eq!(s, expect);
    }

    #[test]
    fn sym_power_cube_of_j() {
        use crate::exact::j_matrix;
        let j = j_matrix(&CycScalar::from_i64(-1));
        let s = sym_power_exact(3, &j);
        // antidiagonal, and squares to Sym^3(-I) = -I_4
        for r in 0..4 {
            for c in 0..4 {
                if r + c != 3 {
                    assert!(s.get(r, c).is_zero());
                }
            }
        }
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq, ExactMatrix::identity(4).neg());
    }

    #[test]
    fn sym_power_multiplicative_exact() {
        let a = ExactMatrix::from_rows(vec![
            vec![rat_entry(2, 1), rat_entry(3, 1)],
            vec![rat_entry(1, 1), rat_entry(2, 1)],
        ]);
        let b = ExactMatrix::from_rows(vec![
            vec![rat_entry(1, 1), rat_entry(5, 2)],
            vec![rat_entry(0, 1), rat_entry(1, 1)],
        ]);
        for k in [2usize, 3, 5] {
            let lhs = sym_power_exact(k, &a.mul(&b).unwrap());
            let rhs = sym_power_exact(k, &a).mul(&sym_power_exact(k, &b)).unwrap();
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }

    #[test]
    fn invariant_form_small_degrees() {
        let b1 = invariant_form(1).unwrap();
        assert_eq!(b1, ExactMatrix::from_i64_rows(&[&[0, 1], &[-1, 0]]));

        let b2 = invariant_form(2).unwrap();
        assert_eq!(b2.get(0, 2), &CycScalar::one());
        assert_eq!(b2.get(1, 1), &rat_entry(-1, 2));
        assert_eq!(b2.get(2, 0), &CycScalar::one());

        // odd degree is skew, even is symmetric
        let b3 = invariant_form(3).unwrap();
        assert_eq!(b3.transpose(), b3.neg());
        assert_eq!(b2.transpose(), b2);
    }

    #[test]
    fn embeddings_land_in_group_and_match_weights() {
        for (name, n) in [("su", 4usize), ("sp", 2), ("k", 3)] {
            let family = lookup_family(name).unwrap();
            let embed = build_embedding(family, n).unwrap();
            let ctx = GroupCtx::Compact { family, n };
            // random SU(2) elements map into the group
            let mut seed = 1u64;
            for _ in 0..20 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let q = [
                    ((seed >> 1) % 1000) as f64 / 500.0 - 1.0,
                    ((seed >> 11) % 1000) as f64 / 500.0 - 1.0,
                    ((seed >> 21) % 1000) as f64 / 500.0 - 1.0,
                    ((seed >> 31) % 1000) as f64 / 500.0 - 1.0,
                ];
                let a = su2_from_quaternion(q);
                let img = embed.embed(&a);
                assert!(ctx.member(&img, 1e-10).unwrap().ok, "{name}:{n}");
            }
            // torus images are diagonal with the advertised weights
            let theta: f64 = 0.31;
            let t2 = CMatrix::from_rows(&[
                vec![Complex64::from_polar(1.0, theta), Complex64::new(0.0, 0.0)],
                vec![Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, -theta)],
            ]);
            let img = embed.embed(&t2);
            let mut got: Vec<Complex64> = (0..img.dim()).map(|i| img.at(i, i)).collect();
            let mut expect: Vec<Complex64> = embed
                .weights
                .iter()
                .map(|&w| Complex64::from_polar(1.0, w as f64 * theta))
                .collect();
            let key = |z: &Complex64| (z.arg() * 1e9).round() as i64;
            got.sort_by_key(key);
            expect.sort_by_key(key);
            for (g, e) in got.iter().zip(&expect) {
                assert!((g - e).norm() < 1e-10, "{name}:{n}");
            }
            // off-diagonal part vanishes
            let diag = CMatrix::diagonal(&(0..img.dim()).map(|i| img.at(i, i)).collect::<Vec<_>>());
            assert!(frobenius_dist(&img, &diag).unwrap() < 1e-10);
        }
    }

    #[test]
    fn embedding_is_homomorphism_on_word_evaluation() {
        use crate::word::Word;
        let family = lookup_family("sp").unwrap();
        let embed = build_embedding(family, 2).unwrap();
        let a = su2_from_quaternion([0.3, -0.4, 0.5, 0.6]);
        let b = su2_from_quaternion([0.9, 0.1, -0.2, 0.4]);
        let w = Word::parse("[x1,x2] x1^2").unwrap();
        let lhs = embed.embed(&w.evaluate(&[a.clone(), b.clone()]).unwrap());
        let rhs = w.evaluate(&[embed.embed(&a), embed.embed(&b)]).unwrap();
        assert!(frobenius_dist(&lhs, &rhs).unwrap() < 1e-10);
    }
}
