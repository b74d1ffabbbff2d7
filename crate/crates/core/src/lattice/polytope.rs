use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::hull::full_dim_hull;
use super::sublattice::SubLattice;
use super::{difference_lattice, IntVector, LatticePointSet};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};

pub type RationalVector = Vec<BigRational>;

fn int_to_rat(v: &[BigInt]) -> RationalVector {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Affine frame of a polytope: `x` is in the affine span iff
/// `x = origin + Σ_i (x[pivots[i]] - origin[pivots[i]]) · directions[i]`.
/// Facets are inequalities on the pivot coordinates of `x`, cleared to
/// integers: `a · x[pivots] ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Frame {
    origin: RationalVector,
    directions: Vec<RationalVector>,
    pivots: Vec<usize>,
    facets: Vec<(Vec<BigInt>, BigInt)>,
}

/// Convex hull of finitely many rational points, kept in vertex form with a
/// facet description for membership tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    ambient: usize,
    vertices: Vec<RationalVector>,
    frame: Option<Frame>,
}

/// Reduced row echelon form over `Q` of the given rows. Returns the nonzero
/// rows and their pivot columns.
fn rref(mut rows: Vec<RationalVector>, ncols: usize) -> (Vec<RationalVector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let (a, b) = if i < r {
                    let (h, t) = rows.split_at_mut(r);
                    (&mut h[i], &t[0])
                } else {
                    let (h, t) = rows.split_at_mut(i);
                    (&mut t[0], &h[r])
                };
                for (x, y) in a.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

impl RationalPolytope {
    pub fn empty(ambient: usize) -> Self {
        RationalPolytope { ambient, vertices: Vec::new(), frame: None }
    }

    pub fn from_int_points(ambient: usize, points: &[IntVector]) -> Result<Self> {
        let pts: Vec<RationalVector> = points.iter().map(|p| int_to_rat(&p.0)).collect();
        Self::hull(ambient, &pts)
    }

    /// Convex hull of `points`; the stored vertex list is irredundant and
    /// sorted.
    pub fn hull(ambient: usize, points: &[RationalVector]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, found: p.len() });
        }
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            return Ok(Self::empty(ambient));
        }
        let origin = pts[0].clone();
        let diffs: Vec<RationalVector> =
            pts.iter().map(|p| p.iter().zip(&origin).map(|(a, b)| a - b).collect()).collect();
        let (directions, pivots) = rref(diffs.clone(), ambient);
        let r = pivots.len();
        if r == 0 {
            let frame = Frame { origin: origin.clone(), directions, pivots, facets: Vec::new() };
            return Ok(RationalPolytope { ambient, vertices: vec![origin], frame: Some(frame) });
        }
        let scale = denominator_lcm(diffs.iter().flat_map(|d| pivots.iter().map(move |&p| &d[p])));
        let scale_r = BigRational::from_integer(scale.clone());
        let projected: Vec<Vec<BigInt>> =
            diffs.iter().map(|d| pivots.iter().map(|&p| (&d[p] * &scale_r).to_integer()).collect()).collect();
        let hull = full_dim_hull(&projected, r);

        // a · y ≤ b with y = scale · (x[piv] - origin[piv])  ⇔  a·x[piv] ≤ b/scale + a·origin[piv]
        let facets = hull
            .facets
            .iter()
            .map(|(a, b)| {
                let a_rat: RationalVector = a.iter().map(|x| BigRational::from_integer(x.clone())).collect();
                let shift: BigRational = a_rat.iter().zip(&pivots).map(|(ai, &p)| ai * &origin[p]).sum();
                let rhs = BigRational::new(b.clone(), scale.clone()) + shift;
                let den = rhs.denom().clone();
                (a.iter().map(|x| x * &den).collect(), rhs.numer().clone())
            })
            .collect();
        let mut vertices: Vec<RationalVector> = hull.extreme.iter().map(|&i| pts[i].clone()).collect();
        vertices.sort();
        let frame = Frame { origin, directions, pivots, facets };
        Ok(RationalPolytope { ambient, vertices, frame: Some(frame) })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the affine span; `None` for the empty polytope.
    pub fn dim(&self) -> Option<usize> {
        self.frame.as_ref().map(|f| f.pivots.len())
    }

    /// Integer vertices, if every vertex is integral.
    pub fn integral_vertices(&self) -> Option<Vec<IntVector>> {
        self.vertices
            .iter()
            .map(|v| {
                v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect::<Option<Vec<_>>>().map(IntVector)
            })
            .collect()
    }

    /// `k · P` for `k ≥ 0`.
    pub fn scaled(&self, k: &BigRational) -> RationalPolytope {
        if self.is_empty() {
            return self.clone();
        }
        if k.is_zero() {
            return RationalPolytope::hull(self.ambient, &[vec![BigRational::zero(); self.ambient]])
                .expect("single point");
        }
        let frame = self.frame.as_ref().expect("nonempty");
        let vertices = self.vertices.iter().map(|v| v.iter().map(|x| x * k).collect()).collect();
        let facets = frame
            .facets
            .iter()
            .map(|(a, b)| {
                let rhs = BigRational::from_integer(b.clone()) * k;
                let den = rhs.denom().clone();
                (a.iter().map(|x| x * &den).collect(), rhs.numer().clone())
            })
            .collect();
        RationalPolytope {
            ambient: self.ambient,
            vertices,
            frame: Some(Frame {
                origin: frame.origin.iter().map(|x| x * k).collect(),
                directions: frame.directions.clone(),
                pivots: frame.pivots.clone(),
                facets,
            }),
        }
    }

    pub fn scaled_int(&self, k: u64) -> RationalPolytope {
        self.scaled(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        let Some(frame) = &self.frame else { return false };
        if x.len() != self.ambient {
            return false;
        }
        let y: Vec<&BigInt> = frame.pivots.iter().map(|&p| &x[p]).collect();
        for (a, b) in &frame.facets {
            let lhs: BigInt = a.iter().zip(&y).map(|(ai, yi)| ai * *yi).sum();
            if &lhs > b {
                return false;
            }
        }
        if frame.pivots.len() == self.ambient {
            return true;
        }
        let t: Vec<BigRational> =
            frame.pivots.iter().map(|&p| BigRational::from_integer(x[p].clone()) - &frame.origin[p]).collect();
        (0..self.ambient).all(|j| {
            let mut v = frame.origin[j].clone();
            for (ti, dir) in t.iter().zip(&frame.directions) {
                v += ti * &dir[j];
            }
            v == BigRational::from_integer(x[j].clone())
        })
    }

    /// Per-coordinate integer range `[⌈min⌉, ⌊max⌋]` over the vertices.
    pub fn integer_box(&self) -> Option<Vec<(BigInt, BigInt)>> {
        if self.is_empty() {
            return None;
        }
        let mut out = Vec::with_capacity(self.ambient);
        for j in 0..self.ambient {
            let lo = self.vertices.iter().map(|v| &v[j]).min().expect("nonempty").ceil().to_integer();
            let hi = self.vertices.iter().map(|v| &v[j]).max().expect("nonempty").floor().to_integer();
            if lo > hi {
                return Some(Vec::new());
            }
            out.push((lo, hi));
        }
        Some(out)
    }

    /// `dim! · vol` of the polytope measured against `reference`: a
    /// fundamental cell of `reference` has volume 1. Zero when the polytope
    /// is lower-dimensional than `reference`.
    pub fn normalized_volume(&self, reference: &SubLattice) -> Result<BigRational> {
        if self.is_empty() {
            return Err(Error::EmptyInput("normalized volume of the empty polytope"));
        }
        let origin = &self.vertices[0];
        let coords = self
            .vertices
            .iter()
            .map(|v| {
                let d: RationalVector = v.iter().zip(origin).map(|(a, b)| a - b).collect();
                reference.rational_coordinates(&d).ok_or(Error::NotContained)
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = self.dim().expect("nonempty");
        let r = reference.rank();
        if dim < r {
            return Ok(BigRational::zero());
        }
        if r == 0 {
            return Ok(BigRational::one());
        }
        let scale = denominator_lcm(coords.iter().flatten());
        let scale_r = BigRational::from_integer(scale.clone());
        let ints: Vec<Vec<BigInt>> =
            coords.iter().map(|c| c.iter().map(|x| (x * &scale_r).to_integer()).collect()).collect();
        let h = full_dim_hull(&ints, r);
        Ok(BigRational::new(h.nvol, num_traits::pow(scale, r)))
    }

    /// Image of the polytope under an integer matrix.
    pub fn image(&self, b: &super::IntMatrix) -> Result<RationalPolytope> {
        if b.ncols() != self.ambient {
            return Err(Error::DimensionMismatch { expected: b.ncols(), found: self.ambient });
        }
        let pts: Vec<RationalVector> = self
            .vertices
            .iter()
            .map(|v| {
                (0..b.nrows())
                    .map(|i| b.row(i).iter().zip(v).map(|(a, x)| BigRational::from_integer(a.clone()) * x).sum())
                    .collect()
            })
            .collect();
        RationalPolytope::hull(b.nrows(), &pts)
    }
}

/// All integer points of `polytope`, optionally restricted to the coset
/// `offset + lattice`, in lexicographic order.
pub fn enumerate_points(polytope: &RationalPolytope, constraint: Option<(&SubLattice, &IntVector)>) -> LatticePointSet {
    enumerate_points_with(polytope, constraint, Strategy::default())
}

pub fn enumerate_points_with(
    polytope: &RationalPolytope,
    constraint: Option<(&SubLattice, &IntVector)>,
    strategy: Strategy,
) -> LatticePointSet {
    let n = polytope.ambient_dim();
    let Some(bx) = polytope.integer_box() else { return LatticePointSet::empty(n) };
    if bx.len() != n {
        return LatticePointSet::empty(n);
    }
    let accept = |x: &[BigInt]| {
        polytope.contains(x)
            && constraint.is_none_or(|(lat, off)| {
                let d: Vec<BigInt> = x.iter().zip(&off.0).map(|(a, b)| a - b).collect();
                lat.contains(&d)
            })
    };
    if n == 0 {
        return LatticePointSet::from_points(0, vec![IntVector(Vec::new())]);
    }
    // One task per value of the first coordinate; the rest is an odometer.
    let firsts: Vec<BigInt> = num_iter_range(&bx[0].0, &bx[0].1);
    let points = exec::flat_map(&firsts, strategy, |x0| {
        let mut out = Vec::new();
        let mut cur: Vec<BigInt> =
            std::iter::once(x0.clone()).chain(bx[1..].iter().map(|(lo, _)| lo.clone())).collect();
        loop {
            if accept(&cur) {
                out.push(IntVector(cur.clone()));
            }
            let mut j = n - 1;
            loop {
                if j == 0 {
                    return out;
                }
                if cur[j] < bx[j].1 {
                    cur[j] += 1;
                    break;
                }
                cur[j] = bx[j].0.clone();
                j -= 1;
            }
        }
    });
    LatticePointSet::from_sorted_unique(n, points)
}

fn num_iter_range(lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    let mut v = Vec::new();
    let mut x = lo.clone();
    while &x <= hi {
        v.push(x.clone());
        x += 1;
    }
    v
}

/// Hull, affine dimension and normalized volume of a lattice point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullVolume {
    pub hull: RationalPolytope,
    pub dim: usize,
    pub nvol: BigRational,
}

/// `nvol = dim! · vol(conv S)` measured so that a fundamental cell of
/// `reference` has volume 1. `reference` must contain the difference lattice
/// of `S`; `nvol` is zero exactly when `conv S` has lower dimension than
/// `reference`.
pub fn convex_hull_volume(set: &LatticePointSet, reference: &SubLattice) -> Result<HullVolume> {
    if set.is_empty() {
        return Err(Error::EmptyInput("convex hull of the empty set"));
    }
    if reference.ambient_dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), found: reference.ambient_dim() });
    }
    let diff = difference_lattice(set)?;
    if !diff.is_sublattice_of(reference) {
        return Err(Error::NotContained);
    }
    let dim = diff.rank();
    let base = &set.points()[0];
    if dim < reference.rank() || dim == 0 {
        let hull = RationalPolytope::from_int_points(set.dim(), set.points())?;
        let nvol = if dim == 0 && reference.rank() == 0 { BigRational::one() } else { BigRational::zero() };
        return Ok(HullVolume { hull, dim, nvol });
    }
    let coords: Vec<Vec<BigInt>> = set
        .points()
        .iter()
        .map(|p| reference.coordinates(&p.sub(base).0).expect("difference lattice inside reference"))
        .collect();
    let h = full_dim_hull(&coords, dim);
    let extreme: Vec<IntVector> = h.extreme.iter().map(|&i| set.points()[i].clone()).collect();
    let hull = RationalPolytope::from_int_points(set.dim(), &extreme)?;
    Ok(HullVolume { hull, dim, nvol: BigRational::from_integer(h.nvol) })
}

impl RationalPolytope {
    /// Keeps vertices sorted; used by the serializer.
    pub(crate) fn vertex_strings(&self) -> Vec<Vec<String>> {
        self.vertices.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect()
    }

    /// Whether every vertex satisfies `x ≥ 0` and `Σ x ≤ bound`; returns the
    /// first offending vertex otherwise.
    pub(crate) fn first_vertex_outside_simplex(&self, bound: &BigRational) -> Option<&RationalVector> {
        self.vertices.iter().find(|v| v.iter().any(|x| x.is_negative()) || &v.iter().sum::<BigRational>() > bound)
    }
}
