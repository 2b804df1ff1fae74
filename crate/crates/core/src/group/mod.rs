//! Group contexts: the compact families SU(n), Sp(n), K(2n) plus exact
//! SL_n(Q) and SL_2(F_p), with membership tests, torus reduction, and
//! in-group conjugator construction.

mod conj;
pub mod slfp;
mod torus;

pub use conj::conj_in_group;
pub use torus::{circle_dist, torus_reduce, wrap_angle, Conjugator, TorusPoint};

use std::fmt;

use num::complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, ExactMatrix};
use crate::family::{lookup_family, CompactFamily, PairStructure};
use crate::matnum::{eig_normal, unitarize, CMatrix, MatError};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("cannot parse group spec {0:?}")]
    Parse(String),
    #[error("bad rank {given} for family {family}: {reason}")]
    RankOutOfRange { family: &'static str, given: usize, reason: &'static str },
    #[error("matrix of dimension {given} does not fit {ctx} (dimension {expected})")]
    WrongDimension { ctx: String, given: usize, expected: usize },
    #[error("element fails membership: unitary defect {unitary:.3e}, det defect {det:.3e}, form defect {form:.3e} (tol {tol:.1e})")]
    NotAMember { unitary: f64, det: f64, form: f64, tol: f64 },
    #[error("eigenvalue pairing failed: {0}")]
    PairingFailure(String),
    #[error("torus reduction residual {resid:.3e} above tolerance {tol:.1e}")]
    ReductionResidual { resid: f64, tol: f64 },
    #[error("matrices are not conjugate: {0}")]
    NonConjugate(String),
    #[error("K(2n) parity obstruction: odd sign flips and no eigenvalue +-1 slot to absorb them")]
    KParityObstruction,
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("prime {0} exceeds the exhaustive-enumeration bound 31")]
    PrimeTooLarge(u32),
    #[error("operation not supported for this group context: {0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Descriptor of the ambient group.
#[derive(Clone, Copy)]
pub enum GroupCtx {
    /// One of the compact families, behind its registered strategy.
    Compact { family: &'static dyn CompactFamily, n: usize },
    /// SL_n over exact scalars.
    SlExact { n: usize },
    /// SL_2 over the prime field F_p.
    SlFp { p: u32 },
}

impl fmt::Debug for GroupCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupCtx({self})")
    }
}

impl fmt::Display for GroupCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupCtx::Compact { family, n } => {
                write!(f, "{}:{}", family.name(), family.spec_value(*n))
            }
            GroupCtx::SlExact { n } => write!(f, "slq:{n}"),
            GroupCtx::SlFp { p } => write!(f, "slfp:2:{p}"),
        }
    }
}

impl Serialize for GroupCtx {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupCtx {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GroupCtx::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl GroupCtx {
    /// Parses "su:7", "sp:4", "k:10", "slq:4", "slfp:2:7".
    pub fn parse(spec: &str) -> Result<GroupCtx, GroupError> {
        let bad = || GroupError::Parse(spec.to_string());
        let parts: Vec<&str> = spec.trim().split(':').collect();
        match parts.as_slice() {
            [name, value] => {
                let value: usize = value.parse().map_err(|_| bad())?;
                if *name == "slq" {
                    if value < 2 {
                        return Err(bad());
                    }
                    return Ok(GroupCtx::SlExact { n: value });
                }
                let family = lookup_family(name).ok_or_else(bad)?;
                let n = family.rank_from_spec(value)?;
                Ok(GroupCtx::Compact { family, n })
            }
            ["slfp", n, p] => {
                let n: usize = n.parse().map_err(|_| bad())?;
                if n != 2 {
                    return Err(GroupError::Unsupported("only SL_2 is supported over F_p"));
                }
                let p: u32 = p.parse().map_err(|_| bad())?;
                slfp::check_prime(p)?;
                Ok(GroupCtx::SlFp { p })
            }
            _ => Err(bad()),
        }
    }

    /// Matrix dimension of elements.
    pub fn dimension(&self) -> usize {
        match self {
            GroupCtx::Compact { family, n } => family.dimension(*n),
            GroupCtx::SlExact { n } => *n,
            GroupCtx::SlFp { .. } => 2,
        }
    }

    /// Rank parameter n of a compact context.
    pub fn rank(&self) -> Option<usize> {
        match self {
            GroupCtx::Compact { n, .. } => Some(*n),
            _ => None,
        }
    }

    /// The compact family strategy, when this context has one.
    pub fn compact(&self) -> Option<(&'static dyn CompactFamily, usize)> {
        match self {
            GroupCtx::Compact { family, n } => Some((*family, *n)),
            _ => None,
        }
    }

    /// Invariant form of the compact family, exactly.
    pub fn form(&self) -> Option<ExactMatrix> {
        let (family, n) = self.compact()?;
        family.form(n)
    }

    /// Floating-point membership: unitarity, determinant one, and form
    /// preservation (g^T Omega g = Omega) each within `tol`.
    pub fn member(&self, g: &CMatrix, tol: f64) -> Result<MemberReport, GroupError> {
        let expected = self.dimension();
        if g.dim() != expected {
            return Err(GroupError::WrongDimension {
                ctx: self.to_string(),
                given: g.dim(),
                expected,
            });
        }
        match self {
            GroupCtx::Compact { .. } => {
                let n = g.dim();
                let unitary = g.adjoint().mul(g).sub(&CMatrix::identity(n)).frobenius_norm();
                let det = (g.det() - Complex64::new(1.0, 0.0)).norm();
                let form = match self.form() {
                    Some(omega) => {
                        let w = CMatrix::from_rows(&omega.to_complex_rows());
                        g.transpose().mul(&w).mul(g).sub(&w).frobenius_norm()
                    }
                    None => 0.0,
                };
                Ok(MemberReport::new(unitary, det, form, tol))
            }
            GroupCtx::SlExact { .. } | GroupCtx::SlFp { .. } => {
                // exact contexts use exact membership; the float view only
                // checks the determinant
                let det = (g.det() - Complex64::new(1.0, 0.0)).norm();
                Ok(MemberReport::new(0.0, det, 0.0, tol))
            }
        }
    }

    /// Exact membership for exact-backed elements. For compact families this
    /// is exact unitarity (conjugation is zeta -> zeta^{-1}), determinant one
    /// and exact form preservation; for SL it is determinant one.
    pub fn member_exact(&self, g: &ExactMatrix) -> Result<bool, GroupError> {
        let expected = self.dimension();
        if g.dim() != expected {
            return Err(GroupError::WrongDimension {
                ctx: self.to_string(),
                given: g.dim(),
                expected,
            });
        }
        let det_ok = g.det()?.is_one();
        match self {
            GroupCtx::Compact { .. } => {
                let unitary_ok = g.adjoint().mul(g)?.is_identity();
                let form_ok = match self.form() {
                    Some(omega) => g.transpose().mul(&omega)?.mul(g)? == omega,
                    None => true,
                };
                Ok(det_ok && unitary_ok && form_ok)
            }
            _ => Ok(det_ok),
        }
    }

    /// Haar-ish random element of a compact context: exponentiate a random
    /// element of the Lie algebra, then re-unitarize.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Result<CMatrix, GroupError> {
        let (family, n) = self
            .compact()
            .ok_or(GroupError::Unsupported("random elements exist for compact contexts only"))?;
        let x = random_lie_element(family.structure(), n, rng);
        let e = eig_normal(&x, 1e-9)?;
        let expd: Vec<Complex64> = e.values.iter().map(|l| l.exp()).collect();
        let u = e.vectors.mul(&CMatrix::diagonal(&expd)).mul(&e.vectors.adjoint());
        let mut u = unitarize(&u)?;
        if matches!(family.structure(), PairStructure::None) {
            // pin the determinant back to one with a scalar phase
            let d = u.det();
            let phase = Complex64::from_polar(1.0, -d.arg() / n as f64);
            u = u.scale(phase);
        }
        let report = self.member(&u, 1e-9)?;
        if !report.ok {
            return Err(report.into_error(1e-9));
        }
        Ok(u)
    }
}

/// Defect report from a membership test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberReport {
    pub unitary_defect: f64,
    pub det_defect: f64,
    pub form_defect: f64,
    pub tol: f64,
    pub ok: bool,
}

impl MemberReport {
    fn new(unitary: f64, det: f64, form: f64, tol: f64) -> Self {
        MemberReport {
            unitary_defect: unitary,
            det_defect: det,
            form_defect: form,
            tol,
            ok: unitary <= tol && det <= tol && form <= tol,
        }
    }

    pub fn max_defect(&self) -> f64 {
        self.unitary_defect.max(self.det_defect).max(self.form_defect)
    }

    pub fn into_error(self, tol: f64) -> GroupError {
        GroupError::NotAMember {
            unitary: self.unitary_defect,
            det: self.det_defect,
            form: self.form_defect,
            tol,
        }
    }
}

fn normal_sample<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    loop {
        let u: f64 = rng.gen();
        if u > 1e-300 {
            let v: f64 = rng.gen();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

/// Random element of the Lie algebra of the compact family, as an
/// anti-Hermitian matrix with the right block structure.
fn random_lie_element<R: Rng>(structure: PairStructure, n: usize, rng: &mut R) -> CMatrix {
    let gauss =
        |n: usize, rng: &mut R| CMatrix::from_fn(n, |_, _| Complex64::new(normal_sample(rng), normal_sample(rng)));
    match structure {
        PairStructure::None => {
            let g = gauss(n, rng);
            let mut x = g.sub(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
            let t = x.trace() / n as f64;
            for i in 0..n {
                x.set(i, i, x.at(i, i) - t);
            }
            x
        }
        PairStructure::Symplectic => {
            // [[A, B], [-conj(B), conj(A)]], A anti-Hermitian, B symmetric
            let g = gauss(n, rng);
            let a = g.sub(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
            let h = gauss(n, rng);
            let b = h.add(&h.transpose()).scale(Complex64::new(0.5, 0.0));
            assemble_blocks(&a, &b, &b.conjugate().scale(Complex64::new(-1.0, 0.0)), &a.conjugate())
        }
        PairStructure::Orthogonal => {
            // [[P, Q], [conj(Q), -P^T]], P anti-Hermitian, Q antisymmetric
            let g = gauss(n, rng);
            let p = g.sub(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
            let h = gauss(n, rng);
            let q = h.sub(&h.transpose()).scale(Complex64::new(0.5, 0.0));
            assemble_blocks(&p, &q, &q.conjugate(), &p.transpose().scale(Complex64::new(-1.0, 0.0)))
        }
    }
}

fn assemble_blocks(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = a.dim();
    CMatrix::from_fn(2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ii, jj) = (i % n, j % n);
        match (bi, bj) {
            (0, 0) => a.at(ii, jj),
            (0, 1) => b.at(ii, jj),
            (1, 0) => c.at(ii, jj),
            _ => d.at(ii, jj),
        }
    })
}
