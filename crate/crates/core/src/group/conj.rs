//! In-group conjugator construction by torus reduction and angle matching.
//!
//! Both sides are reduced to the torus and the two angle vectors are matched
//! by a signed permutation admissible for the family: plain permutations for
//! SU, all signed permutations for Sp, evenly-signed permutations for K,
//! where an angle at 0 or pi can absorb odd parity. The returned conjugator
//! is re-verified by direct multiplication before being certified.

use num::complex::Complex64;

use super::torus::{circle_dist, torus_reduce, wrap_angle, Conjugator};
use super::{GroupCtx, GroupError};
use crate::family::MatchKind;
use crate::matnum::{frobenius_dist, CMatrix};

struct Assignment {
    /// target slot j receives source slot `source[j]`
    source: Vec<usize>,
    /// whether the source angle enters negated
    flip: Vec<bool>,
}

/// Greedy minimal-distance matching of angle multisets, with optional sign
/// flips. Returns the assignment or the worst gap that broke it.
fn match_angles(
    from: &[f64],
    to: &[f64],
    allow_flips: bool,
    thresh: f64,
) -> Result<Assignment, f64> {
    let n = from.len();
    let mut source = vec![usize::MAX; n];
    let mut flip = vec![false; n];
    let mut used = vec![false; n];
    for _ in 0..n {
        // globally closest unmatched (source, target, orientation)
        let mut best: Option<(usize, usize, bool, f64)> = None;
        for j in 0..n {
            if source[j] != usize::MAX {
                continue;
            }
            for i in 0..n {
                if used[i] {
                    continue;
                }
                let d_plus = circle_dist(from[i], to[j]);
                if best.is_none_or(|(.., bd)| d_plus < bd) {
                    best = Some((i, j, false, d_plus));
                }
                if allow_flips {
                    let d_minus = circle_dist(wrap_angle(-from[i]), to[j]);
                    if best.is_none_or(|(.., bd)| d_minus < bd) {
                        best = Some((i, j, true, d_minus));
                    }
                }
            }
        }
        let (i, j, f, d) = best.expect("slots remain");
        if d > thresh {
            return Err(d);
        }
        source[j] = i;
        flip[j] = f;
        used[i] = true;
    }
    Ok(Assignment { source, flip })
}

/// Builds the Weyl representative realizing the assignment, in the matrix
/// model of the family.
fn weyl_matrix(ctx: &GroupCtx, assign: &Assignment) -> CMatrix {
    let (family, n) = ctx.compact().expect("compact context");
    let one = Complex64::new(1.0, 0.0);
    match family.match_kind() {
        MatchKind::Plain => {
            let mut p = CMatrix::zeros(n);
            for (j, &i) in assign.source.iter().enumerate() {
                p.set(j, i, one);
            }
            // a scalar phase absorbs the permutation sign into SU(n)
            let det = p.det();
            if det.re < 0.0 {
                p = p.scale(Complex64::from_polar(1.0, std::f64::consts::PI / n as f64));
            }
            p
        }
        MatchKind::Signed | MatchKind::EvenSigned => {
            let symplectic = family.match_kind() == MatchKind::Signed;
            let mut p = CMatrix::zeros(2 * n);
            for (j, &i) in assign.source.iter().enumerate() {
                if !assign.flip[j] {
                    p.set(j, i, one);
                    p.set(n + j, n + i, one);
                } else if symplectic {
                    // e_i -> e_{n+j}, e_{n+i} -> -e_j keeps the skew form
                    p.set(n + j, i, one);
                    p.set(j, n + i, -one);
                } else {
                    p.set(n + j, i, one);
                    p.set(j, n + i, one);
                }
            }
            p
        }
    }
}

/// Returns c in the group with `c a c^{-1} = b`, certified by direct
/// multiplication. Inputs must have matching eigenvalue multisets; for K the
/// evenly-signed Weyl group may leave a parity obstruction unless an
/// eigenvalue lies at +-1.
pub fn conj_in_group(ctx: &GroupCtx, a: &CMatrix, b: &CMatrix, tol: f64) -> Result<Conjugator, GroupError> {
    let (family, _n) = ctx
        .compact()
        .ok_or(GroupError::Unsupported("conjugacy construction applies to compact contexts"))?;
    if frobenius_dist(a, b)? == 0.0 {
        return Ok(Conjugator { matrix: CMatrix::identity(a.dim()), certified: true });
    }
    let (ca, ta) = torus_reduce(ctx, a, tol)?;
    let (cb, tb) = torus_reduce(ctx, b, tol)?;

    let allow_flips = family.match_kind() != MatchKind::Plain;
    let thresh = (tol * 10.0).max(1e-9);
    let mut assign = match_angles(&ta.angles, &tb.angles, allow_flips, thresh)
        .map_err(|gap| GroupError::NonConjugate(format!("angle multisets differ by {gap:.3e}")))?;

    if family.match_kind() == MatchKind::EvenSigned {
        let flips = assign.flip.iter().filter(|&&f| f).count();
        if flips % 2 == 1 {
            // toggle a slot whose angle is 0 or pi; there -theta = theta
            let slot = (0..assign.flip.len()).find(|&j| {
                let t = tb.angles[j];
                t.sin().abs() < thresh
            });
            match slot {
                Some(j) => assign.flip[j] = !assign.flip[j],
                None => return Err(GroupError::KParityObstruction),
            }
        }
    }

    let p = weyl_matrix(ctx, &assign);
    // c a c^{-1} = b with c = cb^{-1} P ca
    let c = cb.matrix.adjoint().mul(&p).mul(&ca.matrix);
    let resid = frobenius_dist(&c.mul(a).mul(&c.adjoint()), b)?;
    if resid > tol {
        return Err(GroupError::NonConjugate(format!(
            "constructed conjugator has residual {resid:.3e} above {tol:.1e}"
        )));
    }
    let member = ctx.member(&c, (tol * 10.0).max(1e-9))?;
    if !member.ok {
        return Err(member.into_error(tol));
    }
    Ok(Conjugator { matrix: c, certified: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::torus::TorusPoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn equal_inputs_get_identity() {
        let ctx = GroupCtx::parse("su:3").unwrap();
        let id = CMatrix::identity(3);
        let c = conj_in_group(&ctx, &id, &id, 1e-10).unwrap();
        assert!(c.certified);
        assert!(frobenius_dist(&c.matrix, &CMatrix::identity(3)).unwrap() == 0.0);
    }

    #[test]
    fn conjugate_random_su_elements_with_same_spectrum() {
        let ctx = GroupCtx::parse("su:5").unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let g = ctx.random_element(&mut rng).unwrap();
        let h = ctx.random_element(&mut rng).unwrap();
        let b = h.mul(&g).mul(&h.adjoint());
        let c = conj_in_group(&ctx, &g, &b, 1e-8).unwrap();
        assert!(c.certified);
        assert!(frobenius_dist(&c.matrix.mul(&g).mul(&c.matrix.adjoint()), &b).unwrap() <= 1e-8);
    }

    #[test]
    fn sp_signed_permutation_connects_flipped_torus_points() {
        // angle-level statement that the characteristic polynomial determines
        // the Sp conjugacy class: theta and -theta are conjugate
        let ctx = GroupCtx::parse("sp:2").unwrap();
        let (family, n) = ctx.compact().unwrap();
        let a = TorusPoint::new(family, n, vec![0.9, 2.0]).matrix();
        let b = TorusPoint::new(family, n, vec![2.0 * std::f64::consts::PI - 0.9, 2.0]).matrix();
        let c = conj_in_group(&ctx, &a, &b, 1e-9).unwrap();
        assert!(c.certified);
    }

    #[test]
    fn k_even_parity_needs_a_fixed_slot() {
        let ctx = GroupCtx::parse("k:6").unwrap();
        let (family, n) = ctx.compact().unwrap();
        // one flip, no 0/pi slot available: obstruction reported
        let a = TorusPoint::new(family, n, vec![0.7, 1.3, 2.2]).matrix();
        let b = TorusPoint::new(family, n, vec![-0.7, 1.3, 2.2]).matrix();
        match conj_in_group(&ctx, &a, &b, 1e-9) {
            Err(GroupError::KParityObstruction) => {}
            other => panic!("expected parity obstruction, got {:?}", other.map(|_| "ok")),
        }
        // with a zero slot the flip parity can be absorbed
        let a = TorusPoint::new(family, n, vec![0.7, 1.3, 0.0]).matrix();
        let b = TorusPoint::new(family, n, vec![-0.7, 1.3, 0.0]).matrix();
        let c = conj_in_group(&ctx, &a, &b, 1e-9).unwrap();
        assert!(c.certified);
    }

    #[test]
    fn detects_non_conjugate_pairs() {
        let ctx = GroupCtx::parse("su:3").unwrap();
        let (family, n) = ctx.compact().unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let a = TorusPoint::new(family, n, vec![tau / 3.0, tau / 3.0, tau / 3.0]).matrix();
        let b = TorusPoint::new(family, n, vec![0.0, 0.0, 0.0]).matrix();
        assert!(matches!(
            conj_in_group(&ctx, &a, &b, 1e-9),
            Err(GroupError::NonConjugate(_))
        ));
    }
}
