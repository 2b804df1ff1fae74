//! Torus points and reduction of group elements into the diagonal torus.
//!
//! The conjugator is built from a normal eigendecomposition whose columns
//! are reorganized so that it lies in the group itself: for Sp and K the
//! second half of the basis is produced by the antilinear map attached to
//! the invariant form (v -> -J conj(v), resp. v -> S conj(v)), which sends
//! the lambda eigenspace onto the lambda^{-1} eigenspace and turns the form
//! conditions into plain orthonormality. Certification is by residual.

use nalgebra::DVector;
use num::complex::Complex64;

use super::{GroupCtx, GroupError};
use crate::family::{CompactFamily, PairStructure};
use crate::matnum::{eig_normal, frobenius_dist, CMatrix};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Reduces an angle into [0, 2pi).
pub fn wrap_angle(t: f64) -> f64 {
    let mut a = t % TAU;
    if a < 0.0 {
        a += TAU;
    }
    if a >= TAU {
        a -= TAU;
    }
    a
}

/// Circular distance |a - b| mod 2pi, in [0, pi].
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// A point of the maximal torus in the family's model coordinates: n angles,
/// with diag(e^{i theta}) for SU and diag(e^{i theta}, e^{-i theta}) for the
/// doubled families.
#[derive(Clone)]
pub struct TorusPoint {
    pub family: &'static dyn CompactFamily,
    pub n: usize,
    pub angles: Vec<f64>,
}

impl std::fmt::Debug for TorusPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusPoint")
            .field("family", &self.family.name())
            .field("n", &self.n)
            .field("angles", &self.angles)
            .finish()
    }
}

impl TorusPoint {
    pub fn new(family: &'static dyn CompactFamily, n: usize, angles: Vec<f64>) -> Self {
        assert_eq!(angles.len(), n);
        let angles = angles.into_iter().map(wrap_angle).collect();
        TorusPoint { family, n, angles }
    }

    pub fn identity(family: &'static dyn CompactFamily, n: usize) -> Self {
        TorusPoint { family, n, angles: vec![0.0; n] }
    }

    /// The torus element as a diagonal matrix.
    pub fn matrix(&self) -> CMatrix {
        self.family.torus_matrix(self.n, &self.angles)
    }
}

/// An in-group conjugating matrix; `certified` means the intended relation
/// was re-verified by direct multiplication.
#[derive(Debug, Clone)]
pub struct Conjugator {
    pub matrix: CMatrix,
    pub certified: bool,
}

/// Applies the antilinear pairing map of the family to a vector.
fn pair_map(structure: PairStructure, form: &CMatrix, v: &DVector<Complex64>) -> DVector<Complex64> {
    let conj = v.map(|z| z.conj());
    match structure {
        PairStructure::Symplectic => -(form.inner() * conj),
        PairStructure::Orthogonal => form.inner() * conj,
        PairStructure::None => unreachable!("SU has no pairing map"),
    }
}

fn project_off(v: &mut DVector<Complex64>, basis: &[DVector<Complex64>]) {
    for b in basis {
        let coeff = b.dotc(v);
        *v -= b * coeff;
    }
}

/// Conjugates `g` into the torus: returns `(c, t)` with `c g c^{-1} = T(t)`
/// and `c` in the group.
pub fn torus_reduce(ctx: &GroupCtx, g: &CMatrix, tol: f64) -> Result<(Conjugator, TorusPoint), GroupError> {
    let (family, n) = ctx
        .compact()
        .ok_or(GroupError::Unsupported("torus reduction applies to compact contexts"))?;
    let report = ctx.member(g, (tol * 10.0).max(1e-9))?;
    if !report.ok {
        return Err(report.into_error(tol));
    }
    let eig = eig_normal(g, (tol * 0.1).max(1e-12))?;

    let (v, angles) = match family.structure() {
        PairStructure::None => reduce_su(g, &eig.vectors, n)?,
        structure => {
            let form = CMatrix::from_rows(&family.form(n).expect("doubled families carry a form").to_complex_rows());
            reduce_paired(g, &eig, n, structure, &form, tol)?
        }
    };

    let c = v.adjoint();
    let t = TorusPoint::new(family, n, angles);
    let resid = frobenius_dist(&c.mul(g).mul(&v), &t.matrix())?;
    if resid > tol {
        return Err(GroupError::ReductionResidual { resid, tol });
    }
    Ok((Conjugator { matrix: c, certified: true }, t))
}

fn reduce_su(g: &CMatrix, vectors: &CMatrix, n: usize) -> Result<(CMatrix, Vec<f64>), GroupError> {
    // scalar phase pins the determinant to one without moving the torus
    let d = vectors.det();
    let phase = Complex64::from_polar(1.0, -d.arg() / n as f64);
    let v = vectors.scale(phase);
    let angles: Vec<f64> = (0..n)
        .map(|j| {
            let col = v.column(j);
            let lambda = col.dotc(&(g.inner() * &col));
            wrap_angle(lambda.arg())
        })
        .collect();
    Ok((v, angles))
}

/// Cluster of (approximately) equal eigenvalues: column indices into the
/// eigendecomposition plus the average eigenvalue.
struct Cluster {
    rep: Complex64,
    cols: Vec<usize>,
}

fn cluster_eigenvalues(values: &[Complex64], gap: f64) -> Vec<Cluster> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].arg().partial_cmp(&values[j].arg()).unwrap());
    let mut clusters: Vec<Cluster> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(c) if (values[i] - c.rep).norm() <= gap => {
                c.cols.push(i);
                let m = c.cols.len() as f64;
                c.rep = c.rep * ((m - 1.0) / m) + values[i] / m;
            }
            _ => clusters.push(Cluster { rep: values[i], cols: vec![i] }),
        }
    }
    // args near 2pi wrap around to args near 0
    if clusters.len() > 1 {
        let first_rep = clusters[0].rep;
        if (clusters.last().unwrap().rep - first_rep).norm() <= gap {
            let last = clusters.pop().unwrap();
            clusters[0].cols.extend(last.cols);
        }
    }
    clusters
}

fn reduce_paired(
    g: &CMatrix,
    eig: &crate::matnum::EigDecomp,
    n: usize,
    structure: PairStructure,
    form: &CMatrix,
    tol: f64,
) -> Result<(CMatrix, Vec<f64>), GroupError> {
    let gap = (tol * 10.0).max(1e-8);
    let clusters = cluster_eigenvalues(&eig.values, gap);

    let mut plus: Vec<DVector<Complex64>> = Vec::new();
    let mut minus: Vec<DVector<Complex64>> = Vec::new();
    let mut angles: Vec<f64> = Vec::new();

    // complex clusters with Im > 0, paired against their conjugates
    let mut positive: Vec<&Cluster> = Vec::new();
    let mut negative: Vec<&Cluster> = Vec::new();
    let mut selfpaired: Vec<&Cluster> = Vec::new();
    for c in &clusters {
        if (c.rep - Complex64::new(1.0, 0.0)).norm() <= gap
            || (c.rep + Complex64::new(1.0, 0.0)).norm() <= gap
        {
            selfpaired.push(c);
        } else if c.rep.im > 0.0 {
            positive.push(c);
        } else {
            negative.push(c);
        }
    }
    if positive.len() != negative.len() {
        return Err(GroupError::PairingFailure(format!(
            "{} clusters above the axis vs {} below",
            positive.len(),
            negative.len()
        )));
    }
    // greedy conjugate matching, gap-checked
    let mut taken = vec![false; negative.len()];
    for c in &positive {
        let target = c.rep.conj();
        let mut best: Option<(usize, f64)> = None;
        for (i, m) in negative.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let d = (m.rep - target).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (idx, d) = best.ok_or_else(|| GroupError::PairingFailure("no conjugate partner left".into()))?;
        if d > gap * 10.0 {
            return Err(GroupError::PairingFailure(format!(
                "conjugate partner of {} is {:.3e} away",
                c.rep, d
            )));
        }
        taken[idx] = true;
        let partner = negative[idx];
        if partner.cols.len() != c.cols.len() {
            return Err(GroupError::PairingFailure(format!(
                "multiplicity mismatch {} vs {}",
                c.cols.len(),
                partner.cols.len()
            )));
        }
        // orthonormal basis of the positive eigenspace; the pairing map
        // produces the matching basis of the inverse eigenspace
        let mut chosen: Vec<DVector<Complex64>> = Vec::new();
        for &col in &c.cols {
            let mut v = eig.vectors.column(col);
            project_off(&mut v, &chosen);
            let norm = v.norm();
            if norm < 0.3 {
                continue;
            }
            chosen.push(v / Complex64::new(norm, 0.0));
        }
        if chosen.len() != c.cols.len() {
            return Err(GroupError::PairingFailure("eigenspace basis collapsed".into()));
        }
        for p in chosen {
            let q = pair_map(structure, form, &p);
            let lambda = p.dotc(&(g.inner() * &p));
            angles.push(wrap_angle(lambda.arg()));
            plus.push(p);
            minus.push(q);
        }
    }

    // +-1 eigenspaces: even-dimensional, split by the antilinear structure
    for c in &selfpaired {
        if c.cols.len() % 2 != 0 {
            return Err(GroupError::PairingFailure(format!(
                "eigenvalue {} has odd multiplicity {}",
                c.rep,
                c.cols.len()
            )));
        }
        let m = c.cols.len() / 2;
        let theta = if (c.rep - Complex64::new(1.0, 0.0)).norm() <= gap { 0.0 } else { std::f64::consts::PI };
        match structure {
            PairStructure::Symplectic => {
                // quaternionic Gram-Schmidt: each chosen p brings q = psi(p).
                // Repeated passes: a column swallowed by span(p, q) so far can
                // free up once other columns have been consumed.
                let mut pq: Vec<DVector<Complex64>> = Vec::new();
                let mut pairs = 0;
                'passes: loop {
                    let before = pairs;
                    for &col in &c.cols {
                        if pairs == m {
                            break 'passes;
                        }
                        let mut v = eig.vectors.column(col);
                        project_off(&mut v, &pq);
                        let norm = v.norm();
                        if norm < 0.05 {
                            continue;
                        }
                        let p = v / Complex64::new(norm, 0.0);
                        let q = pair_map(structure, form, &p);
                        pq.push(p.clone());
                        pq.push(q.clone());
                        plus.push(p);
                        minus.push(q);
                        angles.push(theta);
                        pairs += 1;
                    }
                    if pairs == before {
                        break;
                    }
                }
                if pairs != m {
                    return Err(GroupError::PairingFailure(
                        "quaternionic basis incomplete in a +-1 eigenspace".into(),
                    ));
                }
            }
            PairStructure::Orthogonal => {
                // real structure: collect a real orthonormal basis of the
                // fixed space of v -> S conj(v), then recombine into
                // isotropic pairs
                let mut real_basis: Vec<DVector<Complex64>> = Vec::new();
                'outer: loop {
                    let before = real_basis.len();
                    for &col in &c.cols {
                        let v = eig.vectors.column(col);
                        let fixed = pair_map(structure, form, &v);
                        for cand in [&v + &fixed, (&v - &fixed).map(|z| z * Complex64::i())] {
                            if real_basis.len() == 2 * m {
                                break 'outer;
                            }
                            let mut u = cand;
                            project_off(&mut u, &real_basis);
                            // stay in the real form after projection noise
                            u = (&u + pair_map(structure, form, &u)) * Complex64::new(0.5, 0.0);
                            project_off(&mut u, &real_basis);
                            let norm = u.norm();
                            if norm < 0.05 {
                                continue;
                            }
                            real_basis.push(u / Complex64::new(norm, 0.0));
                        }
                    }
                    if real_basis.len() == before {
                        break;
                    }
                }
                if real_basis.len() != 2 * m {
                    return Err(GroupError::PairingFailure(
                        "real basis incomplete in a +-1 eigenspace".into(),
                    ));
                }
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                for i in 0..m {
                    let r1 = &real_basis[2 * i];
                    let r2 = &real_basis[2 * i + 1];
                    let p = (r1 + r2.map(|z| z * Complex64::i())) * s;
                    let q = (r1 - r2.map(|z| z * Complex64::i())) * s;
                    plus.push(p);
                    minus.push(q);
                    angles.push(theta);
                }
            }
            PairStructure::None => unreachable!(),
        }
    }

    if plus.len() != n {
        return Err(GroupError::PairingFailure(format!(
            "assembled {} pairs, expected {n}",
            plus.len()
        )));
    }

    let mut v = CMatrix::zeros(2 * n);
    for (i, (p, q)) in plus.iter().zip(&minus).enumerate() {
        for r in 0..2 * n {
            v.set(r, i, p[r]);
            v.set(r, n + i, q[r]);
        }
    }

    // K sits inside SL: an odd arrangement is fixed by swapping one pair,
    // which negates that angle
    if structure == PairStructure::Orthogonal && v.det().re < 0.0 {
        for r in 0..2 * n {
            let a = v.at(r, 0);
            let b = v.at(r, n);
            v.set(r, 0, b);
            v.set(r, n, a);
        }
        angles[0] = wrap_angle(-angles[0]);
    }
    Ok((v, angles))
}
