//! Exact integer linear algebra and lattice convex geometry.

mod hull;
mod matrix;
mod polytope;
mod sublattice;

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

pub use matrix::{hermite_rows, smith_normal_form, IntMatrix, SmithForm};
pub use polytope::{
    convex_hull_volume, enumerate_points, enumerate_points_with, HullVolume, RationalPolytope, RationalVector,
};
pub use sublattice::{LatticeIndex, SubLattice};

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};

/// Integer exponent vector. Ordering is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn zeros(n: usize) -> Self {
        IntVector(vec![BigInt::zero(); n])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        IntVector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Finite set of lattice points in `Z^dim`, kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePointSet {
    dim: usize,
    points: Vec<IntVector>,
}

impl LatticePointSet {
    pub fn empty(dim: usize) -> Self {
        LatticePointSet { dim, points: Vec::new() }
    }

    /// `{0}`, the slice of degree zero.
    pub fn origin(dim: usize) -> Self {
        LatticePointSet { dim, points: vec![IntVector::zeros(dim)] }
    }

    pub fn from_points(dim: usize, mut points: Vec<IntVector>) -> Self {
        debug_assert!(points.iter().all(|p| p.dim() == dim));
        points.sort();
        points.dedup();
        LatticePointSet { dim, points }
    }

    pub fn try_from_points(dim: usize, points: Vec<IntVector>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        Ok(Self::from_points(dim, points))
    }

    pub(crate) fn from_sorted_unique(dim: usize, points: Vec<IntVector>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        LatticePointSet { dim, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[IntVector] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &IntVector> {
        self.points.iter()
    }

    pub fn contains(&self, p: &IntVector) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn is_subset(&self, other: &LatticePointSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    pub fn translate(&self, by: &IntVector) -> LatticePointSet {
        LatticePointSet::from_sorted_unique(self.dim, self.points.iter().map(|p| p.add(by)).collect())
    }

    /// Pointwise image `B(S)` as a set.
    pub fn image(&self, b: &IntMatrix) -> Result<LatticePointSet> {
        if b.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: b.ncols(), found: self.dim });
        }
        let pts = self.points.iter().map(|p| b.apply(&p.0).map(IntVector)).collect::<Result<Vec<_>>>()?;
        Ok(LatticePointSet::from_points(b.nrows(), pts))
    }

    pub fn union(&self, other: &LatticePointSet) -> LatticePointSet {
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        LatticePointSet::from_points(self.dim, pts)
    }
}

/// Lattice generated by `{a - a₀ : a ∈ S}`.
pub fn difference_lattice(set: &LatticePointSet) -> Result<SubLattice> {
    let Some(base) = set.points.first() else {
        return Err(Error::EmptyInput("difference lattice of the empty set"));
    };
    let gens: Vec<IntVector> = set.points[1..].iter().map(|p| p.sub(base)).collect();
    SubLattice::from_generators(set.dim, &gens)
}

/// Minkowski sum `A + B`. Summing with the empty set gives the empty set.
pub fn sumset(a: &LatticePointSet, b: &LatticePointSet) -> Result<LatticePointSet> {
    sumset_with(a, b, Strategy::default())
}

pub fn sumset_with(a: &LatticePointSet, b: &LatticePointSet, strategy: Strategy) -> Result<LatticePointSet> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(LatticePointSet::empty(a.dim));
    }
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut pts = exec::flat_map(&outer.points, strategy, |p| inner.points.iter().map(|q| p.add(q)).collect());
    exec::sort_dedup(&mut pts, strategy);
    Ok(LatticePointSet::from_sorted_unique(a.dim, pts))
}

/// `k`-fold sumset `S + ⋯ + S`; the 0-fold sumset is `{0}`.
pub fn sumset_power(set: &LatticePointSet, k: u64, strategy: Strategy) -> LatticePointSet {
    let mut acc = LatticePointSet::origin(set.dim);
    for _ in 0..k {
        acc = sumset_with(&acc, set, strategy).expect("same dimension");
    }
    acc
}
