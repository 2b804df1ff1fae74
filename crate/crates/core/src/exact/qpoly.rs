//! Dense univariate polynomials over Q, plus the cyclotomic polynomials.

use std::collections::HashMap;
use std::sync::Mutex;

use num::{One, Zero};
use once_cell::sync::Lazy;

use super::rational::{rat, Rat};

/// Polynomial with rational coefficients, ascending degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// The monomial c * t^d.
    pub fn monomial(c: Rat, d: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); d + 1];
        coeffs[d] = c;
        QPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &QPoly) -> QPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &QPoly) -> QPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn mul(&self, rhs: &QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rat) -> QPoly {
        QPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics on zero divisor.
    pub fn div_rem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.coeffs.last().unwrap().clone();
        if rem.len() < divisor.coeffs.len() {
            return (QPoly::zero(), QPoly::from_coeffs(rem));
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] / &lead;
            for (j, b) in divisor.coeffs.iter().enumerate() {
                let delta = &q * b;
                rem[i - dd + j] -= delta;
            }
            quot[i - dd] = q;
        }
        (QPoly::from_coeffs(quot), QPoly::from_coeffs(rem))
    }

    pub fn rem(&self, divisor: &QPoly) -> QPoly {
        self.div_rem(divisor).1
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, rhs: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.coeffs.last().unwrap().clone();
        a.scale(&(Rat::one() / lead))
    }

    /// Extended Euclid: returns (g, u, v) with u*self + v*rhs = g, g monic gcd.
    pub fn ext_gcd(&self, rhs: &QPoly) -> (QPoly, QPoly, QPoly) {
        let one = QPoly::from_coeffs(vec![Rat::one()]);
        let (mut r0, mut r1) = (self.clone(), rhs.clone());
        let (mut s0, mut s1) = (one.clone(), QPoly::zero());
        let (mut t0, mut t1) = (QPoly::zero(), one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lead = r0.coeffs.last().unwrap().clone();
        let inv = Rat::one() / lead;
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }
}

/// Euler's totient.
pub fn euler_phi(k: u32) -> u32 {
    let mut n = k;
    let mut result = k;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

static CYCLO_CACHE: Lazy<Mutex<HashMap<u32, QPoly>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// The k-th cyclotomic polynomial Phi_k, computed by the recursion
/// Phi_k = (t^k - 1) / prod_{d | k, d < k} Phi_d. Monic with integer
/// coefficients, degree phi(k).
pub fn cyclotomic_polynomial(k: u32) -> QPoly {
    assert!(k >= 1, "conductor must be positive");
    if let Some(p) = CYCLO_CACHE.lock().unwrap().get(&k) {
        return p.clone();
    }
    let poly = if k == 1 {
        QPoly::from_i64(&[-1, 1])
    } else {
        // t^k - 1
        let mut num = QPoly::monomial(Rat::one(), k as usize);
        num = num.sub(&QPoly::from_i64(&[1]));
        let mut den = QPoly::from_i64(&[1]);
        for d in 1..k {
            if k.is_multiple_of(d) {
                den = den.mul(&cyclotomic_polynomial(d));
            }
        }
        let (q, r) = num.div_rem(&den);
        debug_assert!(r.is_zero());
        q
    };
    CYCLO_CACHE.lock().unwrap().insert(k, poly.clone());
    poly
}
