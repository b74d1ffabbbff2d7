//! Restriction to subtori and moving intersection numbers.
//!
//! A general translated subtorus `Z` of dimension `κ` is given by an integer
//! matrix `B` of rank `κ`; restricting a monomial to `Z` maps its exponent
//! through `B` (the translation only rescales coefficients). For generic
//! members `D_1, …, D_κ` of `|V_m|`, the points of `D_1 ∩ ⋯ ∩ D_κ ∩ Z` off
//! the base locus all lie in the torus of `Z`, so Kushnirenko's theorem
//! counts them as the normalized volume of `conv B(S_m)` against `Z^κ`.

mod ff;
mod oracle;

use num_rational::BigRational;

pub use oracle::{modal_count, oracle_count, OracleMode, OracleTrial, MAX_TORUS};

use crate::error::{Error, Result};
use crate::lattice::{convex_hull_volume, IntMatrix, SubLattice};
use crate::series::{Rule, Series, SeriesSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtorusSpec {
    matrix: IntMatrix,
    seed: u64,
}

impl SubtorusSpec {
    pub fn new(matrix: IntMatrix, seed: u64) -> Result<Self> {
        let rank = matrix.rank();
        if rank != matrix.nrows() || rank == 0 {
            return Err(Error::RankDeficient { rank, expected: matrix.nrows().max(1) });
        }
        if matrix.nrows() > matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.ncols(), found: matrix.nrows() });
        }
        Ok(SubtorusSpec { matrix, seed })
    }

    /// `Z = X`.
    pub fn identity(n: usize) -> Self {
        SubtorusSpec { matrix: IntMatrix::identity(n), seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `dim Z`.
    pub fn kappa(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn check_series(&self, dim: usize) -> Result<()> {
        if self.ambient_dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.ambient_dim() });
        }
        Ok(())
    }
}

/// `V•|_Z` as a projected spec.
pub fn restrict(spec: &SeriesSpec, z: &SubtorusSpec) -> Result<SeriesSpec> {
    z.check_series(spec.output_dim())?;
    let rule = Rule::Projected { base: Box::new(spec.rule.clone()), matrix: z.matrix.clone() };
    SeriesSpec::new(format!("{}|Z", spec.name), spec.ambient, rule, None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MovingIntersectionResult {
    pub m: u64,
    pub count: BigRational,
    pub hull_dim: usize,
    pub degenerate: bool,
}

/// `(V_m^κ · Z)_mov = nvol_{Z^κ}(conv B(S_m))`.
pub fn moving_intersection_at(series: &Series, m: u64, z: &SubtorusSpec) -> Result<MovingIntersectionResult> {
    z.check_series(series.dim())?;
    let s = series.evaluate(m);
    if s.is_empty() {
        return Err(Error::EmptySlice(m));
    }
    let image = s.image(&z.matrix)?;
    let hv = convex_hull_volume(&image, &SubLattice::full(z.kappa()))?;
    Ok(MovingIntersectionResult { m, count: hv.nvol, hull_dim: hv.dim, degenerate: hv.dim < z.kappa() })
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::lattice::{difference_lattice, IntVector, LatticePointSet};
    use crate::series::catalog;

    fn series(name: &str) -> Series {
        Series::new(catalog::load(name))
    }

    fn row(b: &[i64]) -> SubtorusSpec {
        SubtorusSpec::new(IntMatrix::from_i64(b.len(), &[b]), 7).unwrap()
    }

    fn int(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn line(xs: impl IntoIterator<Item = i64>) -> LatticePointSet {
        LatticePointSet::from_points(1, xs.into_iter().map(|x| IntVector::from_i64(&[x])).collect())
    }

    /// Twice the area of a lattice polygon by brute force: count lattice
    /// points `i` inside and `b` on the boundary of the hull, then Pick's
    /// theorem gives `2A = 2i + b - 2`.
    fn twice_area_by_pick(s: &LatticePointSet) -> i64 {
        let pts: Vec<(i64, i64)> =
            s.iter().map(|p| (i64::try_from(&p.0[0]).unwrap(), i64::try_from(&p.0[1]).unwrap())).collect();
        let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
        // Monotone chain hull.
        let mut p = pts.clone();
        p.sort();
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for pass in 0..2 {
            let start = hull.len();
            let it: Box<dyn Iterator<Item = &(i64, i64)>> =
                if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
            for &q in it {
                while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0 {
                    hull.pop();
                }
                hull.push(q);
            }
            hull.pop();
        }
        let k = hull.len();
        let gcd = |a: i64, b: i64| {
            let (mut a, mut b) = (a.abs(), b.abs());
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        };
        let boundary: i64 = (0..k).map(|i| gcd(hull[(i + 1) % k].0 - hull[i].0, hull[(i + 1) % k].1 - hull[i].1)).sum();
        let (lo, hi) = (p.iter().map(|q| q.0).min().unwrap(), p.iter().map(|q| q.0).max().unwrap());
        let (blo, bhi) = (p.iter().map(|q| q.1).min().unwrap(), p.iter().map(|q| q.1).max().unwrap());
        let mut interior = 0;
        for x in lo..=hi {
            for y in blo..=bhi {
                if (0..k).all(|i| cross(hull[i], hull[(i + 1) % k], (x, y)) > 0) {
                    interior += 1;
                }
            }
        }
        2 * interior + boundary - 2
    }

    #[test]
    fn restriction_examples() {
        let seg = catalog::load("segment_kappa1");
        let r = Series::new(restrict(&seg, &row(&[2, 3])).unwrap());
        for m in 0..8 {
            assert_eq!(*r.evaluate(m), line((0..=m as i64).map(|a| 2 * a)));
        }
        let r = Series::new(restrict(&seg, &row(&[0, 1])).unwrap());
        assert!((0..8).all(|m| *r.evaluate(m) == line([0])));
        for name in catalog::NAMES {
            let spec = catalog::load(name);
            let base = Series::new(spec.clone());
            let id = Series::new(restrict(&spec, &SubtorusSpec::identity(spec.output_dim())).unwrap());
            assert!((0..8).all(|m| base.evaluate(m) == id.evaluate(m)), "{name}");
        }
    }

    #[test]
    fn rank_deficient_subtorus_is_rejected() {
        assert!(SubtorusSpec::new(IntMatrix::from_i64(2, &[&[1, 1], &[2, 2]]), 0).is_err());
        assert!(SubtorusSpec::new(IntMatrix::from_i64(2, &[&[0, 0]]), 0).is_err());
        let seg = catalog::load("segment_kappa1");
        assert!(restrict(&seg, &row(&[1, 2, 3])).is_err());
    }

    #[test]
    fn moving_intersection_examples() {
        let full = series("full_O1_P2");
        let x = SubtorusSpec::identity(2);
        for m in 1..6 {
            let r = moving_intersection_at(&full, m, &x).unwrap();
            assert_eq!(r.count, int((m * m) as i64));
            assert!(!r.degenerate);
        }
        let even = series("even_sublattice_P2");
        let s2 = even.evaluate(2);
        assert_eq!(twice_area_by_pick(&s2), 4);
        assert_eq!(moving_intersection_at(&even, 2, &x).unwrap().count, int(4));

        let seg = series("segment_kappa1");
        for m in 1..6 {
            let r = moving_intersection_at(&seg, m, &row(&[0, 1])).unwrap();
            assert_eq!(r.count, int(0));
            assert!(r.degenerate);
            assert_eq!(moving_intersection_at(&seg, m, &row(&[2, 3])).unwrap().count, int(2 * m as i64));
        }
        assert_eq!(moving_intersection_at(&series("gap_semigroup"), 1, &x), Err(Error::EmptySlice(1)));
    }

    #[test]
    fn moving_intersection_matches_pick_on_planar_catalog() {
        let x = SubtorusSpec::identity(2);
        for name in ["full_O1_P2", "even_sublattice_P2", "parabola_index2", "gap_semigroup"] {
            let s = series(name);
            for m in 2..9 {
                let sm = s.evaluate(m);
                let r = moving_intersection_at(&s, m, &x).unwrap();
                assert_eq!(r.count, int(twice_area_by_pick(&sm)), "{name} m={m}");
            }
        }
    }

    #[test]
    fn zero_criterion_on_catalog() {
        let cases: Vec<(&str, SubtorusSpec)> = vec![
            ("full_O1_P2", SubtorusSpec::identity(2)),
            ("even_sublattice_P2", SubtorusSpec::identity(2)),
            ("parabola_index2", SubtorusSpec::identity(2)),
            ("gap_semigroup", SubtorusSpec::identity(2)),
            ("segment_kappa1", row(&[2, 3])),
            ("segment_kappa1", row(&[0, 1])),
            ("segment_kappa1", SubtorusSpec::identity(2)),
            ("full_O1_P2", row(&[1, 1])),
            ("deg_drop_line", SubtorusSpec::identity(1)),
            ("powers_023", SubtorusSpec::identity(1)),
        ];
        for (name, z) in cases {
            let s = series(name);
            for m in 1..10 {
                let sm = s.evaluate(m);
                if sm.is_empty() {
                    continue;
                }
                let image = sm.image(z.matrix()).unwrap();
                let full_rank = difference_lattice(&image).unwrap().rank() == z.kappa();
                let count = moving_intersection_at(&s, m, &z).unwrap().count;
                assert_eq!(count > int(0), full_rank, "{name} m={m}");
            }
        }
    }
}
