//! Preimages of torus targets under word maps on SU(2).
//!
//! SU(2) is parameterized by unit quaternions, so a word in d letters gives
//! a smooth map R^{4d} -> SU(2) after normalization. The squared Frobenius
//! distance to diag(e^{i phi}, e^{-i phi}) is minimized by Nelder-Mead with
//! seeded random restarts, then sharpened by a shrinking coordinate search;
//! every hit is re-verified by direct evaluation, independent of the
//! optimizer's bookkeeping.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::SearchError;
use crate::matnum::{frobenius_dist, su2_from_quaternion, CMatrix};
use crate::word::Word;

/// Restart/iteration caps for the optimizer.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { restarts: 64, iterations: 2000 }
    }
}

/// Outcome of a preimage search.
#[derive(Debug, Clone, Serialize)]
pub struct PreimageResult {
    pub word: String,
    pub target_angle: f64,
    /// Unit-quaternion parameters of the witnesses.
    pub quaternions: Vec<[f64; 4]>,
    pub residual: f64,
    pub restarts_used: usize,
    pub found: bool,
}

impl PreimageResult {
    /// Witness tuple as SU(2) matrices.
    pub fn matrices(&self) -> Vec<CMatrix> {
        self.quaternions.iter().map(|&q| su2_from_quaternion(q)).collect()
    }

    /// Re-evaluates the word on the stored witnesses against the stored
    /// target; this is the certification path.
    pub fn verify(&self) -> Result<f64, SearchError> {
        let w = Word::parse(&self.word).map_err(SearchError::Word)?;
        let value = w.evaluate(&self.matrices())?;
        Ok(frobenius_dist(&value, &target_matrix(self.target_angle)).expect("2x2"))
    }
}

fn target_matrix(phi: f64) -> CMatrix {
    CMatrix::diagonal(&[Complex64::from_polar(1.0, phi), Complex64::from_polar(1.0, -phi)])
}

fn objective(w: &Word, target: &CMatrix, params: &[f64]) -> f64 {
    let d = params.len() / 4;
    let mats: Vec<CMatrix> = (0..d)
        .map(|i| su2_from_quaternion([params[4 * i], params[4 * i + 1], params[4 * i + 2], params[4 * i + 3]]))
        .collect();
    match w.evaluate(&mats) {
        Ok(v) => {
            let mut acc = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    let dz = v.at(i, j) - target.at(i, j);
                    acc += dz.norm_sqr();
                }
            }
            acc
        }
        Err(_) => f64::INFINITY,
    }
}

/// One Nelder-Mead run from `start`, returning the best point found.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += 0.5;
        let v = f(&p);
        simplex.push((p, v));
    }
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if simplex[0].1 < 1e-26 {
            break;
        }
        // simplex diameter in value terms
        if (simplex[dim].1 - simplex[0].1).abs() < 1e-18 * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(p, _)| p[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = (0..dim).map(|i| 2.0 * centroid[i] - worst.0[i]).collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = (0..dim).map(|i| 3.0 * centroid[i] - 2.0 * worst.0[i]).collect();
            let fe = f(&expand);
            simplex[dim] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..dim).map(|i| 0.5 * (centroid[i] + worst.0[i])).collect();
            let fc = f(&contract);
            if fc < worst.1 {
                simplex[dim] = (contract, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for i in 0..dim {
                        v.0[i] = 0.5 * (v.0[i] + best[i]);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    simplex.swap_remove(0)
}

/// Shrinking coordinate descent that pushes a near-minimum to full double
/// precision; derivative-free.
fn coordinate_polish(f: &dyn Fn(&[f64]) -> f64, point: &mut [f64], mut value: f64) -> f64 {
    if value > 1e-2 {
        // wrong basin; the polish cannot rescue it
        return value;
    }
    let mut step = 1e-2;
    let mut passes = 0;
    while step > 1e-14 && passes < 4000 {
        passes += 1;
        let mut improved = false;
        for i in 0..point.len() {
            for dir in [step, -step] {
                let old = point[i];
                point[i] = old + dir;
                let v = f(point);
                if v < value {
                    value = v;
                    improved = true;
                } else {
                    point[i] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
        if value < 1e-26 {
            break;
        }
    }
    value
}

fn run_restart(w: &Word, target: &CMatrix, d: usize, iterations: usize, seed: u64, index: usize) -> (Vec<f64>, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(index as u64 + 1)));
    let start: Vec<f64> = (0..4 * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = |p: &[f64]| objective(w, target, p);
    let (mut point, value) = nelder_mead(&f, &start, iterations);
    let value = coordinate_polish(&f, &mut point, value);
    (point, value)
}

/// Searches SU(2)^d for witnesses with w(witnesses) = diag(e^{i phi},
/// e^{-i phi}). Budget exhaustion is reported via `found = false`, not an
/// error: the arc of attainable angles genuinely shrinks for some words.
pub fn su2_preimage(
    w: &Word,
    phi: f64,
    tol: f64,
    budget: SearchBudget,
    seed: u64,
) -> Result<PreimageResult, SearchError> {
    if w.is_empty() {
        return Err(SearchError::TrivialWord);
    }
    let d = w.arity().max(1);
    let target = target_matrix(phi);
    let chunk = rayon::current_num_threads().max(1);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut used = 0;
    let mut start = 0;
    while start < budget.restarts {
        let end = (start + chunk).min(budget.restarts);
        let results: Vec<(usize, (Vec<f64>, f64))> = (start..end)
            .into_par_iter()
            .map(|r| (r, run_restart(w, &target, d, budget.iterations, seed, r)))
            .collect();
        // deterministic merge: success at the lowest restart index wins,
        // otherwise keep the best residual seen so far
        for (r, (point, value)) in results {
            if best.as_ref().is_none_or(|(_, bv)| value < *bv) {
                best = Some((point, value));
            }
            if value.sqrt() <= tol {
                used = r + 1;
                break;
            }
        }
        let (_, bv) = best.as_ref().unwrap();
        if bv.sqrt() <= tol {
            if used == 0 {
                used = end;
            }
            break;
        }
        start = end;
        used = end;
    }
    let (point, _) = best.expect("at least one restart ran");
    let quaternions: Vec<[f64; 4]> = (0..d)
        .map(|i| {
            let q = [point[4 * i], point[4 * i + 1], point[4 * i + 2], point[4 * i + 3]];
            let norm = (q.iter().map(|x| x * x).sum::<f64>()).sqrt();
            [q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm]
        })
        .collect();
    let mut result = PreimageResult {
        word: w.to_string(),
        target_angle: phi,
        quaternions,
        residual: f64::INFINITY,
        restarts_used: used,
        found: false,
    };
    // independent certification
    let resid = result.verify()?;
    result.residual = resid;
    result.found = resid <= tol;
    Ok(result)
}

/// Entrywise complex conjugation sends witnesses for phi to witnesses for
/// -phi; on quaternion parameters this is (a, b, c, d) -> (a, -b, c, -d).
pub fn conjugate_witnesses(result: &PreimageResult) -> PreimageResult {
    PreimageResult {
        word: result.word.clone(),
        target_angle: -result.target_angle,
        quaternions: result.quaternions.iter().map(|q| [q[0], -q[1], q[2], -q[3]]).collect(),
        residual: result.residual,
        restarts_used: result.restarts_used,
        found: result.found,
    }
}

/// Smallest conductor m <= 64 whose angle 2 pi / m the word attains within
/// tolerance, measured with a reduced budget. This is the empirical analogue
/// of the "sufficiently large n" threshold; no minimality is asserted.
pub fn empirical_threshold(w: &Word, tol: f64, seed: u64) -> Option<u32> {
    let budget = SearchBudget { restarts: 12, iterations: 1200 };
    (2..=64u32).find(|&m| {
        let phi = 2.0 * std::f64::consts::PI / m as f64;
        su2_preimage(w, phi, tol, budget, seed).map(|r| r.found).unwrap_or(false)
    })
}
