//! Elements of the cyclotomic fields Q(zeta_k), stored as the reduced
//! residue of a polynomial in zeta_k modulo the k-th cyclotomic polynomial.
//!
//! The power-basis representation is a unique normal form, so equality is
//! coefficient comparison after promoting both sides into the field with
//! conductor lcm of the two conductors.

use std::fmt;

use num::complex::Complex64;
use num::integer::lcm;
use num::{One, Zero};

use super::qpoly::{cyclotomic_polynomial, euler_phi, QPoly};
use super::rational::{format_rat, parse_rat, rat, rat_to_f64, Rat};
use super::ExactError;

/// Largest supported conductor. Everything the torus and Goto constructions
/// need at desk scale stays well below this.
pub const MAX_CONDUCTOR: u32 = 256;

/// An element of Q(zeta_k): `coeffs[i]` multiplies zeta_k^i, with the vector
/// reduced mod Phi_k (length phi(k)). Conductor 1 is plain Q.
#[derive(Debug, Clone)]
pub struct CycScalar {
    conductor: u32,
    coeffs: Vec<Rat>,
}

impl CycScalar {
    pub fn from_rat(r: Rat) -> Self {
        CycScalar { conductor: 1, coeffs: vec![r] }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rat(rat(n))
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    /// The primitive k-th root of unity zeta_k = e^{2 pi i / k}.
    pub fn zeta(k: u32) -> Result<Self, ExactError> {
        Self::zeta_pow(k, 1)
    }

    /// zeta_k^j for any integer j.
    pub fn zeta_pow(k: u32, j: i64) -> Result<Self, ExactError> {
        if k == 0 || k > MAX_CONDUCTOR {
            return Err(ExactError::ConductorTooLarge(k));
        }
        let e = j.rem_euclid(k as i64) as usize;
        let poly = QPoly::monomial(Rat::one(), e);
        Ok(Self::from_poly(k, poly))
    }

    fn from_poly(conductor: u32, poly: QPoly) -> Self {
        // rational values collapse to conductor 1, keeping representations
        // small and cross-conductor equality structural
        Self::normalized(conductor, Self::reduce_coeffs(conductor, poly))
    }

    /// Reduced power-basis coordinates at the stated conductor, length phi(k).
    fn reduce_coeffs(conductor: u32, poly: QPoly) -> Vec<Rat> {
        let phi = cyclotomic_polynomial(conductor);
        let red = poly.rem(&phi);
        let deg = euler_phi(conductor) as usize;
        let mut coeffs = vec![Rat::zero(); deg];
        for (i, c) in red.coeffs().iter().enumerate() {
            coeffs[i] = c.clone();
        }
        coeffs
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    fn as_poly(&self) -> QPoly {
        QPoly::from_coeffs(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.eq_scalar(&CycScalar::one())
    }

    /// True when the element lies in Q (all non-constant coordinates zero).
    pub fn as_rat(&self) -> Option<Rat> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_else(Rat::zero))
        } else {
            None
        }
    }

    /// Re-expresses the element in Q(zeta_to); `to` must be a multiple of the
    /// current conductor. zeta_a maps to zeta_to^(to/a).
    pub fn promote(&self, to: u32) -> Result<CycScalar, ExactError> {
        if to == self.conductor {
            return Ok(self.clone());
        }
        if to > MAX_CONDUCTOR {
            return Err(ExactError::ConductorTooLarge(to));
        }
        assert!(to.is_multiple_of(self.conductor), "promotion target must be a multiple");
        let step = (to / self.conductor) as usize;
        let mut poly = QPoly::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly = poly.add(&QPoly::monomial(c.clone(), i * step));
            }
        }
        // no collapse here: callers align coordinate vectors at `to`
        Ok(CycScalar { conductor: to, coeffs: Self::reduce_coeffs(to, poly) })
    }

    fn promoted_pair(&self, rhs: &CycScalar) -> Result<(CycScalar, CycScalar, u32), ExactError> {
        let k = lcm(self.conductor, rhs.conductor);
        if k > MAX_CONDUCTOR {
            return Err(ExactError::ConductorTooLarge(k));
        }
        Ok((self.promote(k)?, rhs.promote(k)?, k))
    }

    pub fn add(&self, rhs: &CycScalar) -> Result<CycScalar, ExactError> {
        let (a, b, k) = self.promoted_pair(rhs)?;
        debug_assert_eq!(a.coeffs.len(), b.coeffs.len());
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(Self::normalized(k, coeffs))
    }

    pub fn sub(&self, rhs: &CycScalar) -> Result<CycScalar, ExactError> {
        let (a, b, k) = self.promoted_pair(rhs)?;
        debug_assert_eq!(a.coeffs.len(), b.coeffs.len());
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Ok(Self::normalized(k, coeffs))
    }

    fn normalized(conductor: u32, mut coeffs: Vec<Rat>) -> CycScalar {
        if conductor > 1 && coeffs.iter().skip(1).all(|c| c.is_zero()) {
            return CycScalar { conductor: 1, coeffs: vec![coeffs.swap_remove(0)] };
        }
        CycScalar { conductor, coeffs }
    }

    pub fn neg(&self) -> CycScalar {
        CycScalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, rhs: &CycScalar) -> Result<CycScalar, ExactError> {
        let (a, b, k) = self.promoted_pair(rhs)?;
        Ok(Self::from_poly(k, a.as_poly().mul(&b.as_poly())))
    }

    pub fn inverse(&self) -> Result<CycScalar, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let phi = cyclotomic_polynomial(self.conductor);
        let (g, u, _) = self.as_poly().ext_gcd(&phi);
        debug_assert_eq!(g.degree(), 0, "Phi_k is irreducible");
        let ginv = Rat::one() / g.coeff(0);
        Ok(Self::from_poly(self.conductor, u.scale(&ginv)))
    }

    pub fn div(&self, rhs: &CycScalar) -> Result<CycScalar, ExactError> {
        self.mul(&rhs.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<CycScalar, ExactError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = CycScalar::one();
        let mut sq = base;
        let mut m = e.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            m >>= 1;
            if m > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    pub fn eq_scalar(&self, rhs: &CycScalar) -> bool {
        match self.promoted_pair(rhs) {
            Ok((a, b, _)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }

    /// Complex conjugation: the field automorphism zeta_k -> zeta_k^{-1}.
    pub fn conj(&self) -> CycScalar {
        let k = self.conductor as usize;
        let mut poly = QPoly::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly = poly.add(&QPoly::monomial(c.clone(), (k - i) % k));
            }
        }
        Self::from_poly(self.conductor, poly)
    }

    /// Numerical image under zeta_k -> e^{2 pi i / k}.
    pub fn to_complex(&self) -> Complex64 {
        let k = self.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * std::f64::consts::PI * (i as f64) / k;
            acc += Complex64::from_polar(1.0, angle) * rat_to_f64(c);
        }
        acc
    }

    /// Serialized form: "p/q" for rationals, "zeta:k:[c0,c1,...]" otherwise.
    pub fn serialize(&self) -> String {
        if let Some(r) = self.as_rat() {
            return format_rat(&r);
        }
        let body: Vec<String> = self.coeffs.iter().map(format_rat).collect();
        format!("zeta:{}:[{}]", self.conductor, body.join(","))
    }
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        self.eq_scalar(other)
    }
}

impl Eq for CycScalar {}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.serialize())
    }
}

/// Parses scalar syntax: "p/q", "zeta:k:j" (the power zeta_k^j), or
/// "zeta:k:[c0,c1,...]" (explicit coordinates in the power basis).
pub fn parse_scalar(text: &str) -> Result<CycScalar, ExactError> {
    let t = text.trim();
    let err = |msg: &str| ExactError::Parse(t.to_string(), msg.to_string());
    if let Some(rest) = t.strip_prefix("zeta:") {
        let (k_str, tail) = rest.split_once(':').ok_or_else(|| err("expected zeta:k:..."))?;
        let k: u32 = k_str.parse().map_err(|_| err("bad conductor"))?;
        if k == 0 || k > MAX_CONDUCTOR {
            return Err(ExactError::ConductorTooLarge(k));
        }
        if let Some(inner) = tail.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| err("missing closing bracket"))?;
            let mut coeffs = Vec::new();
            if !inner.trim().is_empty() {
                for part in inner.split(',') {
                    coeffs.push(parse_rat(part).map_err(|m| err(&m))?);
                }
            }
            if coeffs.len() > euler_phi(k) as usize {
                return Err(err("more coefficients than the field degree"));
            }
            let poly = QPoly::from_coeffs(coeffs);
            Ok(CycScalar::from_poly(k, poly))
        } else {
            let j: i64 = tail.parse().map_err(|_| err("bad power"))?;
            CycScalar::zeta_pow(k, j)
        }
    } else {
        Ok(CycScalar::from_rat(parse_rat(t).map_err(|m| err(&m))?))
    }
}
