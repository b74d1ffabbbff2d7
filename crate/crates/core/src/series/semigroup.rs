use num_bigint::BigInt;
use num_integer::Integer;

use super::Series;
use crate::exec;
use crate::lattice::{sumset_with, IntVector};

/// One failure of `S_k + S_ℓ ⊆ S_{k+ℓ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub k: u64,
    pub l: u64,
    pub witness: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub bound: u64,
    pub origin_ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.origin_ok && self.violations.is_empty()
    }
}

/// Degrees in `[0, bound]` with some property, with the gcd and the observed
/// onset of "every multiple of the gcd is a member". The onset is only an
/// observation within the window, never a certified bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupReport {
    pub members: Vec<u64>,
    pub gcd: u64,
    pub threshold: Option<u64>,
    pub bound: u64,
    pub certified: bool,
}

impl SemigroupReport {
    fn from_members(members: Vec<u64>, bound: u64) -> Self {
        let gcd = members.iter().fold(0u64, |g, &m| g.gcd(&m));
        let threshold = (gcd > 0)
            .then(|| {
                (1..=bound)
                    .find(|&start| (start..=bound).filter(|m| m % gcd == 0).all(|m| members.binary_search(&m).is_ok()))
            })
            .flatten();
        SemigroupReport { members, gcd, threshold, bound, certified: false }
    }

    pub fn contains(&self, m: u64) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    /// Positive members.
    pub fn positive(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied().filter(|&m| m > 0)
    }
}

/// Checks `S_0 = {0}` and `S_k + S_ℓ ⊆ S_{k+ℓ}` for all `k + ℓ ≤ bound`.
pub fn check_multiplicativity(series: &Series, bound: u64) -> ValidationReport {
    let slices = series.slices(bound);
    let origin_ok = *slices[0] == crate::lattice::LatticePointSet::origin(series.dim());
    let pairs: Vec<(u64, u64)> = (1..=bound / 2).flat_map(|k| (k..=bound - k).map(move |l| (k, l))).collect();
    let violations = exec::map(&pairs, series.strategy(), |&(k, l)| {
        let sum = sumset_with(&slices[k as usize], &slices[l as usize], series.strategy()).expect("same dim");
        let target = &slices[(k + l) as usize];
        let witness = sum.iter().find(|p| !target.contains(p)).cloned();
        witness.map(|witness| Violation { k, l, witness })
    });
    ValidationReport { bound, origin_ok, violations: violations.into_iter().flatten().collect() }
}

/// `N(V•) ∩ [0, bound]`.
pub fn support_semigroup(series: &Series, bound: u64) -> SemigroupReport {
    let slices = series.slices(bound);
    let members = (0..=bound).filter(|&m| !slices[m as usize].is_empty()).collect();
    SemigroupReport::from_members(members, bound)
}

/// Basepoint-freeness of `V_m` on `P^n`: the slice must contain every vertex
/// of `(m·d)Δ_n`, since at each torus-fixed point only the matching pure
/// power can be nonzero.
pub fn basepoint_free_at(series: &Series, m: u64) -> bool {
    let a = series.ambient();
    let s = series.ambient_slice(m);
    let top = BigInt::from(m * a.d);
    let mut vertex = IntVector::zeros(a.n);
    if !s.contains(&vertex) {
        return false;
    }
    (0..a.n).all(|i| {
        vertex.0[i] = top.clone();
        let ok = s.contains(&vertex);
        vertex.0[i] = BigInt::from(0);
        ok
    })
}

/// `M(V•) ∩ [0, bound]`.
pub fn free_semigroup(series: &Series, bound: u64) -> SemigroupReport {
    let members = (0..=bound).filter(|&m| basepoint_free_at(series, m)).collect();
    SemigroupReport::from_members(members, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::catalog;

    fn series(name: &str) -> Series {
        Series::new(catalog::load(name))
    }

    #[test]
    fn multiplicativity_on_catalog() {
        assert!(check_multiplicativity(&series("full_O1_P2"), 12).passed());
        assert!(check_multiplicativity(&series("even_sublattice_P2"), 10).passed());
        let broken = check_multiplicativity(&series(catalog::BROKEN), 6);
        assert!(!broken.passed());
        assert_eq!(broken.violations[0], Violation { k: 1, l: 1, witness: IntVector::from_i64(&[2]) });
    }

    #[test]
    fn support_semigroups() {
        let gap = support_semigroup(&series("gap_semigroup"), 20);
        assert_eq!(gap.members, std::iter::once(0).chain(2..=20).collect::<Vec<_>>());
        assert_eq!((gap.gcd, gap.threshold), (1, Some(2)));
        let full = support_semigroup(&series("full_O1_P2"), 20);
        assert_eq!((full.members.len(), full.gcd, full.threshold), (21, 1, Some(1)));
        assert!(!full.certified);
    }

    #[test]
    fn odd_degrees_empty_gives_gcd_two() {
        let text = r#"{"name":"odd_empty","ambient":{"n":1,"d":1},"rule":{"type":"table","params":{"slices":[[["0"]],[],[["0"],["2"]]]}}}"#;
        let s = Series::new(crate::series::parse_spec_str(text).unwrap());
        let r = support_semigroup(&s, 15);
        assert_eq!(r.gcd, 2);
        assert!(r.members.iter().all(|m| m % 2 == 0));
    }

    #[test]
    fn basepoint_freeness() {
        let full = series("full_O1_P2");
        assert!((1..6).all(|m| basepoint_free_at(&full, m)));
        let even = series("even_sublattice_P2");
        assert!(!basepoint_free_at(&even, 1));
        assert!(basepoint_free_at(&even, 2));
        assert!(!basepoint_free_at(&even, 3));
        let seg = series("segment_kappa1");
        assert!((1..8).all(|m| !basepoint_free_at(&seg, m)));
    }

    #[test]
    fn free_semigroups() {
        let even = free_semigroup(&series("even_sublattice_P2"), 10);
        assert_eq!(even.members, vec![0, 2, 4, 6, 8, 10]);
        let full = free_semigroup(&series("full_O1_P2"), 10);
        assert_eq!(full.members, (0..=10).collect::<Vec<_>>());
        assert_eq!(free_semigroup(&series("segment_kappa1"), 10).members, vec![0]);
    }
}
