//! SL_2 over small prime fields: element type and exhaustive enumeration.
//!
//! Elements are 2x2 matrices with entries reduced mod p, packed densely so
//! image sets can live in bitsets indexed by `pack`.

use super::GroupError;
use crate::word::WordMatrix;

/// Largest prime the exhaustive oracle accepts: |SL_2(F_31)| = 29760.
pub const MAX_ORACLE_PRIME: u32 = 31;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u32) -> Result<(), GroupError> {
    if !is_prime(p) {
        return Err(GroupError::NotPrime(p));
    }
    if p > MAX_ORACLE_PRIME {
        return Err(GroupError::PrimeTooLarge(p));
    }
    Ok(())
}

/// 2x2 matrix over F_p, entries in row-major order [a, b, c, d].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpMat2 {
    pub p: u32,
    pub e: [u32; 4],
}

impl FpMat2 {
    pub fn new(p: u32, a: i64, b: i64, c: i64, d: i64) -> Self {
        let m = p as i64;
        let r = |x: i64| x.rem_euclid(m) as u32;
        FpMat2 { p, e: [r(a), r(b), r(c), r(d)] }
    }

    pub fn identity(p: u32) -> Self {
        FpMat2 { p, e: [1, 0, 0, 1] }
    }

    pub fn det(&self) -> u32 {
        let p = self.p as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        (((a * d) % p + p * p - (b * c) % p) % p) as u32
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        FpMat2 { p, e: self.e.map(|x| (p - x) % p) }
    }

    pub fn mul_fp(&self, rhs: &FpMat2) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        let p = self.p as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        let [e, f, g, h] = rhs.e.map(|x| x as u64);
        FpMat2 {
            p: self.p,
            e: [
                ((a * e + b * g) % p) as u32,
                ((a * f + b * h) % p) as u32,
                ((c * e + d * g) % p) as u32,
                ((c * f + d * h) % p) as u32,
            ],
        }
    }

    /// Dense index in [0, p^4).
    pub fn pack(&self) -> usize {
        let p = self.p as usize;
        let [a, b, c, d] = self.e.map(|x| x as usize);
        ((a * p + b) * p + c) * p + d
    }
}

fn inv_mod(a: u32, p: u32) -> Option<u32> {
    // extended Euclid
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64 % p as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(p as i64) as u32)
}

impl WordMatrix for FpMat2 {
    fn dim(&self) -> usize {
        2
    }

    fn identity_like(&self) -> Self {
        FpMat2::identity(self.p)
    }

    fn mat_mul(&self, rhs: &Self) -> Self {
        self.mul_fp(rhs)
    }

    fn try_inverse(&self) -> Result<Self, String> {
        let det = self.det();
        let dinv = inv_mod(det, self.p).ok_or_else(|| format!("determinant {det} not invertible mod {}", self.p))?;
        let p = self.p as u64;
        let di = dinv as u64;
        let [a, b, c, d] = self.e.map(|x| x as u64);
        Ok(FpMat2 {
            p: self.p,
            e: [
                ((d * di) % p) as u32,
                (((p - b % p) % p * di) % p) as u32,
                (((p - c % p) % p * di) % p) as u32,
                ((a * di) % p) as u32,
            ],
        })
    }
}

/// Enumerates all of SL_2(F_p); the count is p(p^2 - 1).
pub fn enumerate_sl2(p: u32) -> Result<Vec<FpMat2>, GroupError> {
    check_prime(p)?;
    let mut out = Vec::with_capacity((p as usize) * ((p as usize) * (p as usize) - 1));
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                if a != 0 {
                    // d = (1 + b c) / a
                    let ainv = inv_mod(a, p).expect("a nonzero mod prime");
                    let d = (((1 + (b as u64) * (c as u64)) % p as u64) * ainv as u64 % p as u64) as u32;
                    out.push(FpMat2 { p, e: [a, b, c, d] });
                } else {
                    // bc = -1; d free
                    if (b as u64 * c as u64) % p as u64 == (p - 1) as u64 {
                        for d in 0..p {
                            out.push(FpMat2 { p, e: [a, b, c, d] });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_formula() {
        for (p, count) in [(2u32, 6usize), (3, 24), (5, 120), (7, 336)] {
            let els = enumerate_sl2(p).unwrap();
            assert_eq!(els.len(), count);
            assert!(els.iter().all(|m| m.det() == 1));
            // no duplicates
            let mut packed: Vec<usize> = els.iter().map(|m| m.pack()).collect();
            packed.sort_unstable();
            packed.dedup();
            assert_eq!(packed.len(), count);
        }
    }

    #[test]
    fn inverse_and_mul() {
        for m in enumerate_sl2(5).unwrap() {
            let inv = m.try_inverse().unwrap();
            assert_eq!(m.mul_fp(&inv), FpMat2::identity(5));
        }
    }

    #[test]
    fn prime_guard() {
        assert!(matches!(check_prime(9), Err(GroupError::NotPrime(9))));
        assert!(matches!(check_prime(37), Err(GroupError::PrimeTooLarge(37))));
        assert!(check_prime(31).is_ok());
    }

    #[test]
    fn word_evaluation_over_fp() {
        use crate::word::Word;
        // J_{-1}^2 = -I holds over F_3 as well
        let j = FpMat2::new(3, 0, 1, -1, 0);
        let w = Word::parse("x1^2").unwrap();
        let sq = w.evaluate(&[j]).unwrap();
        assert_eq!(sq, FpMat2::identity(3).neg());
    }
}
