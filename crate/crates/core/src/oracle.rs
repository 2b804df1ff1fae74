//! Exhaustive finite-field ground truth: word images and two-set product
//! coverage over SL_2(F_p).
//!
//! Elements are packed into dense indices and image sets live in bitsets,
//! so the coverage scan "g is covered iff some s in S1 has s^{-1} g in S2"
//! is a plain nested loop over at most |G| = p(p^2 - 1) <= 29760 elements.
//! Results are measurements, not theorems: the group-theoretic claims they
//! echo concern infinite fields.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::slfp::{enumerate_sl2, FpMat2};
use crate::group::GroupError;
use crate::word::{Word, WordError};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("word arity {arity} exceeds the exhaustive budget for p = {p} (needs |G|^arity evaluations)")]
    BudgetExceeded { p: u32, arity: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Dense bitset over the packed element indices of SL_2(F_p).
#[derive(Clone)]
pub struct ElementSet {
    p: u32,
    bits: Vec<u64>,
    count: usize,
}

impl ElementSet {
    fn new(p: u32) -> Self {
        let capacity = (p as usize).pow(4);
        ElementSet { p, bits: vec![0; capacity.div_ceil(64)], count: 0 }
    }

    fn insert(&mut self, m: &FpMat2) {
        let i = m.pack();
        let (w, b) = (i / 64, i % 64);
        if self.bits[w] & (1 << b) == 0 {
            self.bits[w] |= 1 << b;
            self.count += 1;
        }
    }

    pub fn contains(&self, m: &FpMat2) -> bool {
        let i = m.pack();
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn prime(&self) -> u32 {
        self.p
    }
}

/// Which part of the group a product set covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coverage {
    /// every element of G
    Full,
    /// everything except part of the center
    AllButCenter,
    /// some non-central element is missed
    Partial,
}

/// Measurement report for word images and their pairwise products.
#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub p: u32,
    pub group_order: usize,
    pub w1: String,
    pub w2: String,
    pub image_size_w1: usize,
    pub image_size_w2: usize,
    pub coverage: Coverage,
    pub covered_count: usize,
    pub minus_identity_covered: bool,
    pub millis: u128,
}

const EXHAUSTIVE_PAIR_BUDGET: usize = 40_000_000;

/// The exact image set {w(g_1, ..., g_d)} over SL_2(F_p), by exhaustive
/// enumeration. Arity 1 costs |G| evaluations, arity 2 costs |G|^2; anything
/// beyond the budget is refused rather than sampled.
pub fn word_image(p: u32, w: &Word) -> Result<ElementSet, OracleError> {
    let elements = enumerate_sl2(p)?;
    let order = elements.len();
    let arity = w.arity().max(1);
    let cost = order.checked_pow(arity as u32).unwrap_or(usize::MAX);
    if cost > EXHAUSTIVE_PAIR_BUDGET {
        return Err(OracleError::BudgetExceeded { p, arity });
    }
    let mut set = ElementSet::new(p);
    match arity {
        1 => {
            for g in &elements {
                let v = w.evaluate(std::slice::from_ref(g))?;
                set.insert(&v);
            }
        }
        2 => {
            // partition the first coordinate across threads, merge unions
            let parts: Vec<Vec<u64>> = elements
                .par_iter()
                .fold(
                    || vec![0u64; set.bits.len()],
                    |mut acc, g1| {
                        for g2 in &elements {
                            let v = w
                                .evaluate(&[*g1, *g2])
                                .expect("arity-checked evaluation");
                            let i = v.pack();
                            acc[i / 64] |= 1 << (i % 64);
                        }
                        acc
                    },
                )
                .collect();
            for part in parts {
                for (w_, bits) in set.bits.iter_mut().zip(part) {
                    *w_ |= bits;
                }
            }
            set.count = set.bits.iter().map(|b| b.count_ones() as usize).sum();
        }
        _ => return Err(OracleError::BudgetExceeded { p, arity }),
    }
    debug_assert!(conjugation_closed(&set, &elements));
    Ok(set)
}

/// Image sets are unions of conjugacy classes; re-checked on every build.
fn conjugation_closed(set: &ElementSet, elements: &[FpMat2]) -> bool {
    use crate::word::WordMatrix;
    for g in elements {
        if !set.contains(g) {
            continue;
        }
        for c in elements.iter().step_by(7) {
            let conj = c.mul_fp(g).mul_fp(&c.try_inverse().expect("unimodular"));
            if !set.contains(&conj) {
                return false;
            }
        }
    }
    true
}

/// Product coverage of S1 * S2 over the whole group: for each g, scan for
/// s in S1 with s^{-1} g in S2.
pub fn product_coverage(p: u32, w1: &Word, w2: &Word) -> Result<OracleReport, OracleError> {
    use crate::word::WordMatrix;
    let start = std::time::Instant::now();
    let elements = enumerate_sl2(p)?;
    let s1 = word_image(p, w1)?;
    let s2 = word_image(p, w2)?;
    let s1_elements: Vec<FpMat2> = elements.iter().filter(|g| s1.contains(g)).copied().collect();

    let covered_flags: Vec<bool> = elements
        .par_iter()
        .map(|g| {
            s1_elements.iter().any(|s| {
                let rest = s.try_inverse().expect("unimodular").mul_fp(g);
                s2.contains(&rest)
            })
        })
        .collect();
    let covered_count = covered_flags.iter().filter(|&&c| c).count();

    let minus_identity = FpMat2::identity(p).neg();
    let minus_identity_covered = elements
        .iter()
        .zip(&covered_flags)
        .any(|(g, &c)| c && *g == minus_identity);

    let coverage = if covered_count == elements.len() {
        Coverage::Full
    } else {
        // the center of SL_2(F_p) is {I, -I} (just {I} for p = 2)
        let all_noncentral_covered = elements
            .iter()
            .zip(&covered_flags)
            .all(|(g, &c)| c || *g == minus_identity || *g == FpMat2::identity(p));
        if all_noncentral_covered {
            Coverage::AllButCenter
        } else {
            Coverage::Partial
        }
    };

    Ok(OracleReport {
        p,
        group_order: elements.len(),
        w1: w1.to_string(),
        w2: w2.to_string(),
        image_size_w1: s1.len(),
        image_size_w2: s2.len(),
        coverage,
        covered_count,
        minus_identity_covered,
        millis: start.elapsed().as_millis(),
    })
}
