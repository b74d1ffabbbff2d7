use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::{hermite_rows, smith_normal_form, IntMatrix};
use super::IntVector;
use crate::error::{Error, Result};

/// Index `[sup : sub]` of one lattice in another.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

impl LatticeIndex {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            LatticeIndex::Finite(i) => Some(i),
            LatticeIndex::Infinite => None,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, LatticeIndex::Finite(i) if i.is_one())
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeIndex::Finite(i) => write!(f, "{i}"),
            LatticeIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// A lattice in `Z^n`, stored by its row Hermite normal form basis.
///
/// Two `SubLattice` values are equal exactly when they describe the same
/// lattice, so `==` is lattice equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubLattice {
    ambient: usize,
    basis: IntMatrix,
}

impl SubLattice {
    pub fn from_generators(ambient: usize, generators: &[IntVector]) -> Result<Self> {
        let rows = generators
            .iter()
            .map(|g| {
                if g.dim() != ambient {
                    Err(Error::DimensionMismatch { expected: ambient, found: g.dim() })
                } else {
                    Ok(g.0.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rows(ambient, rows))
    }

    pub(crate) fn from_rows(ambient: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let h = hermite_rows(rows, ambient);
        SubLattice { ambient, basis: IntMatrix::from_rows(ambient, h).expect("hermite rows keep width") }
    }

    pub fn from_matrix(m: &IntMatrix) -> Self {
        Self::from_rows(m.ncols(), m.row_vecs())
    }

    pub fn zero(ambient: usize) -> Self {
        SubLattice { ambient, basis: IntMatrix::zeros(0, ambient) }
    }

    /// `Z^n`.
    pub fn full(ambient: usize) -> Self {
        SubLattice { ambient, basis: IntMatrix::identity(ambient) }
    }

    /// `k · Z^n`.
    pub fn scaled_full(ambient: usize, k: i64) -> Self {
        let mut m = IntMatrix::identity(ambient);
        for i in 0..ambient {
            m[(i, i)] = BigInt::from(k);
        }
        Self::from_matrix(&m)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<IntVector> {
        self.basis.row_vecs().into_iter().map(IntVector).collect()
    }

    fn pivots(&self) -> Vec<usize> {
        (0..self.rank()).map(|i| self.basis.row(i).iter().position(|x| !x.is_zero()).expect("nonzero row")).collect()
    }

    /// Integer coordinates of `v` in the basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if v.len() != self.ambient {
            return None;
        }
        let mut w = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (i, p) in self.pivots().into_iter().enumerate() {
            let row = self.basis.row(i);
            let (q, r) = w[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, b) in w.iter_mut().zip(row) {
                    *x -= &q * b;
                }
            }
            coords.push(q);
        }
        w.iter().all(Zero::is_zero).then_some(coords)
    }

    /// Rational coordinates of `v` in the basis, if `v` lies in the rational
    /// span of the lattice.
    pub fn rational_coordinates(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        if v.len() != self.ambient {
            return None;
        }
        let mut w = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (i, p) in self.pivots().into_iter().enumerate() {
            let row = self.basis.row(i);
            let q = &w[p] / BigRational::from_integer(row[p].clone());
            if !q.is_zero() {
                for (x, b) in w.iter_mut().zip(row) {
                    *x -= &q * BigRational::from_integer(b.clone());
                }
            }
            coords.push(q);
        }
        w.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_sublattice_of(&self, sup: &SubLattice) -> bool {
        self.ambient == sup.ambient && (0..self.rank()).all(|i| sup.contains(self.basis.row(i)))
    }

    /// Smallest lattice containing both.
    pub fn join(&self, other: &SubLattice) -> Result<SubLattice> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Ok(Self::from_rows(self.ambient, rows))
    }

    /// `[sup : self]`, computed from the Smith invariants of `self`'s basis
    /// written in `sup`'s basis. Infinite iff the ranks differ.
    pub fn index_in(&self, sup: &SubLattice) -> Result<LatticeIndex> {
        if self.ambient != sup.ambient {
            return Err(Error::DimensionMismatch { expected: sup.ambient, found: self.ambient });
        }
        let coords = (0..self.rank())
            .map(|i| sup.coordinates(self.basis.row(i)).ok_or(Error::NotSublattice))
            .collect::<Result<Vec<_>>>()?;
        if self.rank() < sup.rank() {
            return Ok(LatticeIndex::Infinite);
        }
        let c = IntMatrix::from_rows(sup.rank(), coords)?;
        let snf = smith_normal_form(&c);
        Ok(LatticeIndex::Finite(snf.invariants().iter().fold(BigInt::one(), |acc, d| acc * d)))
    }

    /// `span_Q(self) ∩ Z^n`.
    pub fn saturation(&self) -> SubLattice {
        if self.rank() == 0 {
            return self.clone();
        }
        let snf = smith_normal_form(&self.basis);
        let rows = (0..self.rank()).map(|i| snf.v_inv.row(i).to_vec()).collect();
        Self::from_rows(self.ambient, rows)
    }

    /// Image `B · self` as a lattice in `Z^{rows(B)}`.
    pub fn image(&self, b: &IntMatrix) -> Result<SubLattice> {
        if b.ncols() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: b.ncols() });
        }
        let rows = (0..self.rank()).map(|i| b.apply(self.basis.row(i))).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rows(b.nrows(), rows))
    }
}

impl fmt::Display for SubLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.basis)
    }
}
