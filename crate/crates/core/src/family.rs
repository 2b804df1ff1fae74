//! The three compact classical families as interchangeable strategies.
//!
//! Everything downstream (membership, torus reduction, Goto elements,
//! principal embeddings, the factorization pipeline) is parameterized by a
//! [`CompactFamily`] trait object. The implementations are registered by
//! name and selected at runtime from group spec strings such as `su:7`,
//! `sp:4`, `k:10`.

use num::complex::Complex64;

use crate::exact::{CycScalar, ExactMatrix};
use crate::group::GroupError;
use crate::matnum::CMatrix;

/// How eigenvalues pair up into the torus model, which also fixes the
/// antilinear structure used when splitting +-1 eigenspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStructure {
    /// Plain diagonal torus; no pairing (SU).
    None,
    /// lambda pairs with lambda^{-1} through the skew form (compact Sp).
    Symplectic,
    /// lambda pairs with lambda^{-1} through the symmetric form (K(2n)).
    Orthogonal,
}

/// Which signed permutations of torus angles are realized by Weyl elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchKind {
    /// Permutations only (SU).
    Plain,
    /// All signed permutations (Sp).
    Signed,
    /// Evenly-signed permutations; a 0 or pi angle slot can absorb parity (K).
    EvenSigned,
}

/// Family-specific data and constructions behind one interface.
pub trait CompactFamily: Sync {
    /// Registry key, e.g. "su".
    fn name(&self) -> &'static str;

    /// Human-readable name for reports.
    fn display(&self) -> &'static str;

    /// Smallest supported rank parameter n.
    fn min_rank(&self) -> usize;

    /// Matrix dimension at rank n.
    fn dimension(&self, n: usize) -> usize;

    /// Converts the numeric field of a spec string ("su:7" -> 7) to the rank
    /// parameter, validating range; for K the field is the matrix dimension 2n.
    fn rank_from_spec(&self, value: usize) -> Result<usize, GroupError>;

    /// Inverse of `rank_from_spec` for printing.
    fn spec_value(&self, n: usize) -> usize;

    /// Invariant bilinear form, where the family has one.
    fn form(&self, n: usize) -> Option<ExactMatrix>;

    /// Eigenvalue pairing discipline.
    fn structure(&self) -> PairStructure;

    /// Admissible angle matchings for in-group conjugacy.
    fn match_kind(&self) -> MatchKind;

    /// True when torus angles carry a sum-zero (mod 2pi) constraint.
    fn has_sum_constraint(&self) -> bool;

    /// Full list of diagonal angles for a model angle vector of length n.
    fn diag_angles(&self, n: usize, angles: &[f64]) -> Vec<f64> {
        assert_eq!(angles.len(), n);
        match self.structure() {
            PairStructure::None => angles.to_vec(),
            _ => {
                let mut out = angles.to_vec();
                out.extend(angles.iter().map(|a| -a));
                out
            }
        }
    }

    /// The diagonal torus element for a model angle vector.
    fn torus_matrix(&self, n: usize, angles: &[f64]) -> CMatrix {
        let diag: Vec<Complex64> = self
            .diag_angles(n, angles)
            .into_iter()
            .map(|t| Complex64::from_polar(1.0, t))
            .collect();
        CMatrix::diagonal(&diag)
    }

    /// The torus-normalizing element x_n, exactly.
    fn goto_matrix(&self, n: usize) -> ExactMatrix;

    /// Weight multiset of the principal embedding into this group.
    fn weights(&self, n: usize) -> Vec<i64>;

    /// Symmetric-power degree for the embedding, plus whether a trivial
    /// one-dimensional summand is appended.
    fn sym_degree(&self, n: usize) -> (usize, bool);

    /// Conductor m of the root-of-unity target zeta_m whose embedded image
    /// is conjugate to the Goto element.
    fn preimage_conductor(&self, n: usize) -> u32;
}

/// n x n cyclic shift e_1 -> e_2 -> ... -> e_n -> e_1.
fn cycle_matrix(n: usize) -> ExactMatrix {
    ExactMatrix::from_fn(n, |i, j| {
        if i == (j + 1) % n {
            CycScalar::one()
        } else {
            CycScalar::zero()
        }
    })
}

/// n x n matrix fixing e_1 and cycling e_2 -> e_3 -> ... -> e_n -> e_2.
fn fixed_point_cycle_matrix(n: usize) -> ExactMatrix {
    ExactMatrix::from_fn(n, |i, j| {
        let hit = if j == 0 {
            i == 0
        } else if j + 1 == n {
            i == 1
        } else {
            i == j + 1
        };
        if hit {
            CycScalar::one()
        } else {
            CycScalar::zero()
        }
    })
}

/// Assembles [[a, b], [c, d]] from n x n blocks.
fn block2(a: &ExactMatrix, b: &ExactMatrix, c: &ExactMatrix, d: &ExactMatrix) -> ExactMatrix {
    let n = a.dim();
    ExactMatrix::from_fn(2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ii, jj) = (i % n, j % n);
        match (bi, bj) {
            (0, 0) => a.get(ii, jj).clone(),
            (0, 1) => b.get(ii, jj).clone(),
            (1, 0) => c.get(ii, jj).clone(),
            _ => d.get(ii, jj).clone(),
        }
    })
}

/// Diagonal idempotent with ones in the listed (0-based) slots.
fn unit_diag(n: usize, slots: &[usize]) -> ExactMatrix {
    ExactMatrix::from_fn(n, |i, j| {
        if i == j && slots.contains(&i) {
            CycScalar::one()
        } else {
            CycScalar::zero()
        }
    })
}

struct SpecialUnitary;

impl CompactFamily for SpecialUnitary {
    fn name(&self) -> &'static str {
        "su"
    }

    fn display(&self) -> &'static str {
        "SU(n)"
    }

    fn min_rank(&self) -> usize {
        2
    }

    fn dimension(&self, n: usize) -> usize {
        n
    }

    fn rank_from_spec(&self, value: usize) -> Result<usize, GroupError> {
        if value < self.min_rank() {
            return Err(GroupError::RankOutOfRange {
                family: self.name(),
                given: value,
                reason: "SU needs n >= 2",
            });
        }
        Ok(value)
    }

    fn spec_value(&self, n: usize) -> usize {
        n
    }

    fn form(&self, _n: usize) -> Option<ExactMatrix> {
        None
    }

    fn structure(&self) -> PairStructure {
        PairStructure::None
    }

    fn match_kind(&self) -> MatchKind {
        MatchKind::Plain
    }

    fn has_sum_constraint(&self) -> bool {
        true
    }

    fn goto_matrix(&self, n: usize) -> ExactMatrix {
        let s = cycle_matrix(n);
        if n % 2 == 1 {
            s
        } else {
            // s_n * zeta_{2n} I; the scalar restores determinant one.
            let z = CycScalar::zeta(2 * n as u32).expect("conductor within cap");
            s.scale(&z).expect("scalar multiply")
        }
    }

    fn weights(&self, n: usize) -> Vec<i64> {
        let k = n as i64 - 1;
        (0..n as i64).map(|j| k - 2 * j).collect()
    }

    fn sym_degree(&self, n: usize) -> (usize, bool) {
        (n - 1, false)
    }

    fn preimage_conductor(&self, n: usize) -> u32 {
        2 * n as u32
    }
}

struct CompactSymplectic;

impl CompactFamily for CompactSymplectic {
    fn name(&self) -> &'static str {
        "sp"
    }

    fn display(&self) -> &'static str {
        "Sp(n)"
    }

    fn min_rank(&self) -> usize {
        1
    }

    fn dimension(&self, n: usize) -> usize {
        2 * n
    }

    fn rank_from_spec(&self, value: usize) -> Result<usize, GroupError> {
        if value < self.min_rank() {
            return Err(GroupError::RankOutOfRange {
                family: self.name(),
                given: value,
                reason: "Sp needs n >= 1",
            });
        }
        Ok(value)
    }

    fn spec_value(&self, n: usize) -> usize {
        n
    }

    fn form(&self, n: usize) -> Option<ExactMatrix> {
        let i = ExactMatrix::identity(n);
        let z = ExactMatrix::zeros(n);
        Some(block2(&z, &i, &i.neg(), &z))
    }

    fn structure(&self) -> PairStructure {
        PairStructure::Symplectic
    }

    fn match_kind(&self) -> MatchKind {
        MatchKind::Signed
    }

    fn has_sum_constraint(&self) -> bool {
        false
    }

    fn goto_matrix(&self, n: usize) -> ExactMatrix {
        let s = cycle_matrix(n);
        let z = ExactMatrix::zeros(n);
        let shift = block2(&s, &z, &z, &s);
        let e1 = unit_diag(n, &[0]);
        let rest = ExactMatrix::identity(n).sub(&e1).expect("same dim");
        let mixer = block2(&rest, &e1, &e1.neg(), &rest);
        shift.mul(&mixer).expect("same dim")
    }

    fn weights(&self, n: usize) -> Vec<i64> {
        let k = 2 * n as i64 - 1;
        (0..2 * n as i64).map(|j| k - 2 * j).collect()
    }

    fn sym_degree(&self, n: usize) -> (usize, bool) {
        (2 * n - 1, false)
    }

    fn preimage_conductor(&self, n: usize) -> u32 {
        4 * n as u32
    }
}

struct SplitOrthogonal;

impl CompactFamily for SplitOrthogonal {
    fn name(&self) -> &'static str {
        "k"
    }

    fn display(&self) -> &'static str {
        "K(2n)"
    }

    fn min_rank(&self) -> usize {
        3
    }

    fn dimension(&self, n: usize) -> usize {
        2 * n
    }

    fn rank_from_spec(&self, value: usize) -> Result<usize, GroupError> {
        // the spec field is the matrix dimension 2n
        if !value.is_multiple_of(2) || value / 2 < self.min_rank() {
            return Err(GroupError::RankOutOfRange {
                family: self.name(),
                given: value,
                reason: "K needs an even dimension 2n with n >= 3",
            });
        }
        Ok(value / 2)
    }

    fn spec_value(&self, n: usize) -> usize {
        2 * n
    }

    fn form(&self, n: usize) -> Option<ExactMatrix> {
        let i = ExactMatrix::identity(n);
        let z = ExactMatrix::zeros(n);
        Some(block2(&z, &i, &i, &z))
    }

    fn structure(&self) -> PairStructure {
        PairStructure::Orthogonal
    }

    fn match_kind(&self) -> MatchKind {
        MatchKind::EvenSigned
    }

    fn has_sum_constraint(&self) -> bool {
        false
    }

    fn goto_matrix(&self, n: usize) -> ExactMatrix {
        let s = fixed_point_cycle_matrix(n);
        let z = ExactMatrix::zeros(n);
        let shift = block2(&s, &z, &z, &s);
        let e12 = unit_diag(n, &[0, 1]);
        let rest = ExactMatrix::identity(n).sub(&e12).expect("same dim");
        let mixer = block2(&rest, &e12, &e12, &rest);
        shift.mul(&mixer).expect("same dim")
    }

    fn weights(&self, n: usize) -> Vec<i64> {
        let k = 2 * n as i64 - 2;
        let mut w: Vec<i64> = (0..=k).map(|j| k - 2 * j).collect();
        w.push(0); // trivial summand
        w
    }

    fn sym_degree(&self, n: usize) -> (usize, bool) {
        (2 * n - 2, true)
    }

    fn preimage_conductor(&self, n: usize) -> u32 {
        4 * n as u32 - 4
    }
}

static SU: SpecialUnitary = SpecialUnitary;
static SP: CompactSymplectic = CompactSymplectic;
static K: SplitOrthogonal = SplitOrthogonal;

static REGISTRY: [&(dyn CompactFamily + 'static); 3] = [&SU, &SP, &K];

/// All registered compact family strategies.
pub fn registry() -> &'static [&'static dyn CompactFamily] {
    &REGISTRY
}

/// Looks up a family strategy by its registry key ("su", "sp", "k").
pub fn lookup_family(name: &str) -> Option<&'static dyn CompactFamily> {
    registry().iter().copied().find(|f| f.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        assert_eq!(lookup_family("su").unwrap().display(), "SU(n)");
        assert_eq!(lookup_family("sp").unwrap().display(), "Sp(n)");
        assert_eq!(lookup_family("k").unwrap().display(), "K(2n)");
        assert!(lookup_family("so").is_none());
        assert_eq!(registry().len(), 3);
    }

    #[test]
    fn weights_match_stated_multisets() {
        assert_eq!(lookup_family("su").unwrap().weights(3), vec![2, 0, -2]);
        assert_eq!(lookup_family("sp").unwrap().weights(2), vec![3, 1, -1, -3]);
        let mut kw = lookup_family("k").unwrap().weights(3);
        kw.sort_unstable();
        assert_eq!(kw, vec![-4, -2, 0, 0, 2, 4]);
    }

    #[test]
    fn k_spec_field_is_dimension() {
        let k = lookup_family("k").unwrap();
        assert_eq!(k.rank_from_spec(10).unwrap(), 5);
        assert!(k.rank_from_spec(9).is_err());
        assert!(k.rank_from_spec(4).is_err());
        assert_eq!(k.spec_value(5), 10);
    }

    #[test]
    fn cycle_matrices_have_expected_shape() {
        let s3 = cycle_matrix(3);
        // s e_1 = e_2, s e_3 = e_1
        assert!(s3.get(1, 0).is_one());
        assert!(s3.get(0, 2).is_one());
        let sp = fixed_point_cycle_matrix(4);
        assert!(sp.get(0, 0).is_one());
        assert!(sp.get(2, 1).is_one());
        assert!(sp.get(1, 3).is_one());
    }
}
