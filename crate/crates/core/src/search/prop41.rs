//! Bounded exhaustive verification that x^4 y^4 does not represent -I over
//! the rationals, with exact eigenvalue-ratio obstruction data.
//!
//! A^4 B^4 = -I forces A^4 = -(B^{-1})^4, and the bounded matrix set is
//! closed under inversion, so the scan hashes all fourth powers and looks
//! for a matching negated pair. For near-solutions (in Frobenius distance)
//! the eigenvalue ratios lambda mu^{+-1} are the eigenvalues of the
//! Kronecker product A (x) B^{-1}; a primitive eighth root of unity among
//! them would show up as a common factor with t^4 + 1, which is irreducible
//! over Q, so a single exact gcd decides the obstruction.

use std::collections::HashMap;

use num::{BigInt, One};
use serde::Serialize;

use super::discriminant::rationals_by_height;
use super::SearchError;
use crate::exact::{CycScalar, ExactMatrix, QPoly, Rat};
use crate::matnum::{frobenius_dist, CMatrix};

/// A sampled pair close to solving A^4 B^4 = -I, with the exact check that
/// no eigenvalue ratio is a primitive eighth root of unity.
#[derive(Debug, Clone, Serialize)]
pub struct NearSolution {
    pub trace_a: String,
    pub trace_b: String,
    pub distance_to_minus_identity: f64,
    pub ratio_is_primitive_eighth_root: bool,
}

#[derive(Debug, Serialize)]
pub struct Prop41Report {
    pub bound: i64,
    pub matrices_scanned: usize,
    pub solutions_found: usize,
    pub field_degree_of_zeta8: u32,
    pub near_solutions: Vec<NearSolution>,
    pub ok: bool,
}

fn matrix_key(m: &ExactMatrix) -> String {
    let mut parts = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            parts.push(m.get(i, j).serialize());
        }
    }
    parts.join(";")
}

/// Kronecker product of 2x2 exact matrices; its eigenvalues are the pairwise
/// products of the factors' eigenvalues.
fn kron2(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::from_fn(4, |i, j| {
        let (ia, ib) = (i / 2, i % 2);
        let (ja, jb) = (j / 2, j % 2);
        a.get(ia, ja).mul(b.get(ib, jb)).expect("rational product")
    })
}

fn cyc_poly_to_qpoly(p: &crate::exact::CycPoly) -> QPoly {
    QPoly::from_coeffs(p.coeffs().iter().map(|c| c.as_rat().expect("rational coefficients")).collect())
}

/// Exhaustively scans SL_2(Q) pairs with entry height <= bound and confirms
/// A^4 B^4 != -I for every pair; a counterexample would be reported loudly.
pub fn prop41_search(bound: i64) -> Result<Prop41Report, SearchError> {
    let mats = exhaustive_sl2(bound);
    let minus_one = CycScalar::from_i64(-1);

    // hash all fourth powers; a solution is a pair of keys k, -k
    let mut fourth: HashMap<String, usize> = HashMap::new();
    let mut fourth_list: Vec<ExactMatrix> = Vec::with_capacity(mats.len());
    for m in &mats {
        let m2 = m.mul(m)?;
        let m4 = m2.mul(&m2)?;
        fourth.entry(matrix_key(&m4)).or_insert_with(|| {
            fourth_list.push(m4.clone());
            fourth_list.len() - 1
        });
    }
    let mut solutions = 0usize;
    for p in &fourth_list {
        // a solution pair exists iff -P^{-1} is itself a fourth power
        let key = matrix_key(&p.inverse()?.scale(&minus_one)?);
        if fourth.contains_key(&key) {
            solutions += 1;
        }
    }

    // near-solution sampling over a small float prefix
    let sample = mats.iter().take(200).collect::<Vec<_>>();
    let mut near: Vec<(f64, &ExactMatrix, &ExactMatrix)> = Vec::new();
    let minus_i2 = CMatrix::identity(2).scale(num::complex::Complex64::new(-1.0, 0.0));
    for a in &sample {
        let af = CMatrix::from_rows(&a.to_complex_rows());
        let a4 = {
            let sq = af.mul(&af);
            sq.mul(&sq)
        };
        for b in &sample {
            let bf = CMatrix::from_rows(&b.to_complex_rows());
            let b4 = {
                let sq = bf.mul(&bf);
                sq.mul(&sq)
            };
            let dist = frobenius_dist(&a4.mul(&b4), &minus_i2).expect("2x2");
            if near.len() < 5 {
                near.push((dist, a, b));
                near.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            } else if dist < near[4].0 {
                near[4] = (dist, a, b);
                near.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            }
        }
    }

    let phi8 = QPoly::from_i64(&[1, 0, 0, 0, 1]);
    let mut near_solutions = Vec::new();
    for (dist, a, b) in near {
        let binv = b.inverse()?;
        let prod = kron2(a, &binv);
        let charpoly = cyc_poly_to_qpoly(&prod.char_poly()?);
        let g = charpoly.gcd(&phi8);
        let ratio_is_primitive_eighth_root = g.degree() > 0;
        near_solutions.push(NearSolution {
            trace_a: a.trace()?.serialize(),
            trace_b: b.trace()?.serialize(),
            distance_to_minus_identity: dist,
            ratio_is_primitive_eighth_root,
        });
    }

    let ok = solutions == 0 && near_solutions.iter().all(|s| !s.ratio_is_primitive_eighth_root);
    Ok(Prop41Report {
        bound,
        matrices_scanned: mats.len(),
        solutions_found: solutions,
        field_degree_of_zeta8: crate::exact::field_degree_over_q(8),
        near_solutions,
        ok,
    })
}

/// Every SL_2(Q) matrix with all four entries of height <= bound: three free
/// entries, the fourth completed from the determinant.
fn exhaustive_sl2(bound: i64) -> Vec<ExactMatrix> {
    let rationals = rationals_by_height(bound);
    let height_ok = |r: &Rat| crate::exact::rat_height(r) <= BigInt::from(bound);
    let from_rats = |a: &Rat, b: &Rat, c: &Rat, d: &Rat| {
        ExactMatrix::from_rows(vec![
            vec![CycScalar::from_rat(a.clone()), CycScalar::from_rat(b.clone())],
            vec![CycScalar::from_rat(c.clone()), CycScalar::from_rat(d.clone())],
        ])
    };
    let zero = Rat::from_integer(BigInt::from(0));
    let mut out = Vec::new();
    for a in &rationals {
        for b in &rationals {
            for c in &rationals {
                if a == &zero {
                    // bc = -1, d free; height(1/b) = height(b) <= bound
                    if b * c == -Rat::one() {
                        for d in &rationals {
                            out.push(from_rats(a, b, c, d));
                        }
                    }
                } else {
                    let d = (Rat::one() + b * c) / a;
                    if height_ok(&d) {
                        out.push(from_rats(a, b, c, &d));
                    }
                }
            }
        }
    }
    out
}
