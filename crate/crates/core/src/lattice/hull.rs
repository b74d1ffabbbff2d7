//! Exact beneath-beyond hull for full-dimensional integer point sets.
//!
//! The boundary is kept as a simplicial complex; each point beyond some
//! facet cones the visible facets over itself, and the cone simplices are
//! accumulated into a triangulation. The sum of `|det|` over that
//! triangulation is the normalized volume in the coordinates supplied.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{determinant, hermite_rows};

pub(crate) struct Hull {
    /// `d! · vol`, i.e. the sum of `|det|` over the triangulation.
    pub nvol: BigInt,
    /// Indices (into the input) of the extreme points, ascending.
    pub extreme: Vec<usize>,
    /// Facet inequalities `a · y ≤ b` with primitive `a`, deduplicated.
    pub facets: Vec<(Vec<BigInt>, BigInt)>,
}

struct Facet {
    verts: Vec<usize>,
    normal: Vec<BigInt>,
    offset: BigInt,
    alive: bool,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Hyperplane through `d` affinely independent points, oriented so that
/// `interior_sum / scale` lies strictly on the negative side.
fn hyperplane(
    points: &[Vec<BigInt>],
    verts: &[usize],
    interior_sum: &[BigInt],
    scale: &BigInt,
) -> (Vec<BigInt>, BigInt) {
    let d = interior_sum.len();
    let base = &points[verts[0]];
    let diffs: Vec<Vec<BigInt>> = verts[1..].iter().map(|&v| sub(&points[v], base)).collect();
    let mut normal: Vec<BigInt> = (0..d)
        .map(|j| {
            let minor: Vec<Vec<BigInt>> = diffs
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let c = determinant(minor);
            if j % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    let g = normal.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    debug_assert!(!g.is_zero(), "degenerate facet");
    for x in normal.iter_mut() {
        *x = &*x / &g;
    }
    let mut offset = dot(&normal, base);
    if dot(&normal, interior_sum) > &offset * scale {
        for x in normal.iter_mut() {
            *x = -&*x;
        }
        offset = -offset;
    }
    (normal, offset)
}

/// Greedy choice of `d + 1` affinely independent points.
fn initial_simplex(points: &[Vec<BigInt>], d: usize) -> Option<Vec<usize>> {
    let mut chosen = vec![0];
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for i in 1..points.len() {
        let mut trial = rows.clone();
        trial.push(sub(&points[i], &points[0]));
        if hermite_rows(trial.clone(), d).len() > rows.len() {
            rows = trial;
            chosen.push(i);
            if chosen.len() == d + 1 {
                return Some(chosen);
            }
        }
    }
    None
}

/// Hull of points spanning `Z^d` affinely. Panics if they do not.
pub(crate) fn full_dim_hull(points: &[Vec<BigInt>], d: usize) -> Hull {
    assert!(d >= 1 && !points.is_empty());
    if d == 1 {
        let (mut lo, mut hi) = (0, 0);
        for (i, p) in points.iter().enumerate() {
            if p[0] < points[lo][0] {
                lo = i;
            }
            if p[0] > points[hi][0] {
                hi = i;
            }
        }
        assert!(lo != hi, "points do not span a line");
        let nvol = &points[hi][0] - &points[lo][0];
        let mut extreme = vec![lo, hi];
        extreme.sort_unstable();
        let facets =
            vec![(vec![BigInt::from(-1)], -points[lo][0].clone()), (vec![BigInt::from(1)], points[hi][0].clone())];
        return Hull { nvol, extreme, facets };
    }

    let simplex = initial_simplex(points, d).expect("points do not span the ambient space");
    let scale = BigInt::from(d as u64 + 1);
    let mut interior_sum = vec![BigInt::zero(); d];
    for &v in &simplex {
        for (s, x) in interior_sum.iter_mut().zip(&points[v]) {
            *s += x;
        }
    }

    let apex = &points[simplex[0]];
    let mut nvol = determinant(simplex[1..].iter().map(|&v| sub(&points[v], apex)).collect()).abs();

    let mut facets: Vec<Facet> = (0..=d)
        .map(|skip| {
            let verts: Vec<usize> = simplex.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
            let (normal, offset) = hyperplane(points, &verts, &interior_sum, &scale);
            Facet { verts, normal, offset, alive: true }
        })
        .collect();

    let in_simplex: std::collections::HashSet<usize> = simplex.iter().copied().collect();
    for (p, point) in points.iter().enumerate() {
        if in_simplex.contains(&p) {
            continue;
        }
        let visible: Vec<usize> = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && dot(&f.normal, point) > f.offset)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for &fi in &visible {
            let f = &facets[fi];
            nvol += determinant(f.verts.iter().map(|&v| sub(&points[v], point)).collect()).abs();
            for skip in 0..d {
                let ridge: Vec<usize> =
                    f.verts.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        for &fi in &visible {
            facets[fi].alive = false;
        }
        let mut horizon: Vec<Vec<usize>> = ridges.into_iter().filter(|&(_, c)| c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        for ridge in horizon {
            let mut verts = ridge;
            verts.push(p);
            verts.sort_unstable();
            let (normal, offset) = hyperplane(points, &verts, &interior_sum, &scale);
            facets.push(Facet { verts, normal, offset, alive: true });
        }
    }

    let mut planes: Vec<(Vec<BigInt>, BigInt)> =
        facets.iter().filter(|f| f.alive).map(|f| (f.normal.clone(), f.offset.clone())).collect();
    planes.sort();
    planes.dedup();

    let mut candidates: Vec<usize> = facets.iter().filter(|f| f.alive).flat_map(|f| f.verts.iter().copied()).collect();
    candidates.sort_unstable();
    candidates.dedup();
    let extreme = candidates
        .into_iter()
        .filter(|&v| {
            let normals: Vec<Vec<BigInt>> =
                planes.iter().filter(|(a, b)| &dot(a, &points[v]) == b).map(|(a, _)| a.clone()).collect();
            hermite_rows(normals, d).len() == d
        })
        .collect();

    Hull { nvol, extreme, facets: planes }
}
