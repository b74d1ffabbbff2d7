//! Iitaka-map invariants of a monomial series.
//!
//! For `V_m` spanned by the monomials `S_m`, the image `Y_m` of `φ_m` is
//! the toric variety of `S_m`, its function field is carried by the
//! difference lattice `Λ_m`, and
//!
//! * `dim Y_m = rank Λ_m`,
//! * `deg φ_m = [Z^n : Λ_m]` when `Λ_m` has full rank,
//! * `deg ν_m = [Λ_∞ : Λ_m]`, where `Λ_∞` is the union of all `Λ_m`.
//!
//! Everything here is computed over a finite window `[0, bound]`, so every
//! threshold is an observation, not a certified bound.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::lattice::{
    convex_hull_volume, difference_lattice, enumerate_points_with, sumset_power, LatticeIndex, LatticePointSet,
    RationalPolytope, SubLattice,
};
use crate::series::Series;

/// Per-degree values of an invariant together with the value it settles on
/// inside the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationReport<T> {
    pub values: Vec<(u64, T)>,
    pub stable_value: Option<T>,
    /// First window member from which every value equals `stable_value`.
    pub threshold: Option<u64>,
    pub bound: u64,
    pub certified: bool,
}

impl<T: Clone + PartialEq> StabilizationReport<T> {
    /// The stable value is the last observed one, and the threshold is the
    /// member right after the last disagreement.
    pub fn from_values(values: Vec<(u64, T)>, bound: u64) -> Self {
        let stable_value = values.last().map(|(_, v)| v.clone());
        let threshold = stable_value.as_ref().map(|s| {
            let last_diff = values.iter().rposition(|(_, v)| v != s);
            values[last_diff.map_or(0, |i| i + 1)].0
        });
        StabilizationReport { values, stable_value, threshold, bound, certified: false }
    }

    pub fn value_at(&self, m: u64) -> Option<&T> {
        self.values.iter().find(|(k, _)| *k == m).map(|(_, v)| v)
    }
}

/// Slices and difference lattices of a series over `[0, bound]`.
#[derive(Clone, Debug)]
pub struct GradedSemigroup {
    dim: usize,
    bound: u64,
    strategy: Strategy,
    slices: Vec<Arc<LatticePointSet>>,
    lambdas: Vec<Option<SubLattice>>,
    lambda_inf: SubLattice,
    declared: Option<SubLattice>,
}

impl GradedSemigroup {
    pub fn new(series: &Series, bound: u64) -> Self {
        let slices = series.slices(bound);
        let lambdas = exec::map(&slices, series.strategy(), |s| difference_lattice(s).ok());
        let dim = series.dim();
        let lambda_inf =
            lambdas.iter().skip(1).flatten().fold(SubLattice::zero(dim), |acc, l| acc.join(l).expect("same ambient"));
        GradedSemigroup {
            dim,
            bound,
            strategy: series.strategy(),
            slices,
            lambdas,
            lambda_inf,
            declared: series.spec().declared_lambda_inf.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn slice(&self, m: u64) -> &LatticePointSet {
        &self.slices[m as usize]
    }

    /// `Λ_m`, or `None` when `S_m` is empty.
    pub fn lambda(&self, m: u64) -> Option<&SubLattice> {
        self.lambdas[m as usize].as_ref()
    }

    /// Join of `Λ_m` over the positive window members.
    pub fn lambda_inf(&self) -> &SubLattice {
        &self.lambda_inf
    }

    pub fn declared_lambda_inf(&self) -> Option<&SubLattice> {
        self.declared.as_ref()
    }

    /// Positive degrees with a nonempty slice.
    pub fn members(&self) -> Vec<u64> {
        (1..=self.bound).filter(|&m| self.lambdas[m as usize].is_some()).collect()
    }

    /// Pairs `i | j` of members with `Λ_i ⊄ Λ_j`.
    pub fn divisibility_violations(&self) -> Vec<(u64, u64)> {
        let members = self.members();
        let mut out = Vec::new();
        for &i in &members {
            for j in (2 * i..=self.bound).step_by(i as usize) {
                if let (Some(li), Some(lj)) = (self.lambda(i), self.lambda(j)) {
                    if !li.is_sublattice_of(lj) {
                        out.push((i, j));
                    }
                }
            }
        }
        out
    }
}

/// `dim Y_m = rank Λ_m`.
pub fn iitaka_dim_at(series: &Series, m: u64) -> Result<usize> {
    let s = series.evaluate(m);
    Ok(difference_lattice(&s).map_err(|_| Error::EmptySlice(m))?.rank())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IitakaReport {
    pub report: StabilizationReport<usize>,
    /// Largest `κ_m` seen in the window.
    pub window_max: usize,
}

impl IitakaReport {
    pub fn kappa(&self) -> usize {
        self.report.stable_value.expect("nonempty support")
    }
}

pub fn iitaka_dimension(g: &GradedSemigroup) -> Result<IitakaReport> {
    let values: Vec<(u64, usize)> = g.members().into_iter().map(|m| (m, g.lambda(m).unwrap().rank())).collect();
    if values.is_empty() {
        return Err(Error::EmptyInput("no nonempty slice of positive degree in the window"));
    }
    let window_max = values.iter().map(|(_, k)| *k).max().unwrap_or(0);
    Ok(IitakaReport { report: StabilizationReport::from_values(values, g.bound), window_max })
}

/// `deg φ_m = [Z^n : Λ_m]`; undefined unless `Λ_m` has full rank.
pub fn degree_at(series: &Series, m: u64) -> Result<BigInt> {
    let s = series.evaluate(m);
    let lambda = difference_lattice(&s).map_err(|_| Error::EmptySlice(m))?;
    phi_degree(&lambda, m)
}

fn phi_degree(lambda: &SubLattice, m: u64) -> Result<BigInt> {
    let n = lambda.ambient_dim();
    match lambda.index_in(&SubLattice::full(n))? {
        LatticeIndex::Finite(d) => Ok(d),
        LatticeIndex::Infinite => {
            Err(Error::Undefined(format!("φ_{m} is not generically finite: rank Λ_{m} = {} < {n}", lambda.rank())))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    /// `deg φ_m` per member; `Infinite` where `κ_m < n`.
    pub report: StabilizationReport<LatticeIndex>,
    /// Members whose degree is defined but below the stable value.
    pub below_stable: Vec<u64>,
}

impl DegreeReport {
    pub fn delta(&self) -> Option<&BigInt> {
        self.report.stable_value.as_ref().and_then(LatticeIndex::finite)
    }
}

/// `δ(V•)`, the stable value of `deg φ_m`. Requires `κ = n`.
pub fn asymptotic_degree(g: &GradedSemigroup) -> Result<DegreeReport> {
    let kappa = iitaka_dimension(g)?.kappa();
    if kappa < g.dim {
        return Err(Error::Undefined(format!(
            "asymptotic degree needs κ = {}, found κ = {kappa}; restrict to a {kappa}-dimensional subtorus",
            g.dim
        )));
    }
    let full = SubLattice::full(g.dim);
    let values: Vec<(u64, LatticeIndex)> = g
        .members()
        .into_iter()
        .map(|m| (m, g.lambda(m).unwrap().index_in(&full).expect("sublattice of Z^n")))
        .collect();
    let report = StabilizationReport::from_values(values, g.bound);
    let below_stable = match report.stable_value.as_ref().and_then(LatticeIndex::finite) {
        Some(delta) => {
            report.values.iter().filter(|(_, v)| v.finite().is_some_and(|d| d < delta)).map(|(m, _)| *m).collect()
        }
        None => Vec::new(),
    };
    Ok(DegreeReport { report, below_stable })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirationalReport {
    /// `deg ν_m = [Λ_∞ : Λ_m]` per member.
    pub report: StabilizationReport<LatticeIndex>,
    pub lambda_inf: SubLattice,
    /// Whether the window join equals the declared `Λ_∞`, when one is given.
    pub matches_declared: Option<bool>,
}

/// Least `m₀` with `Λ_m = Λ_∞` for every window member `m ≥ m₀`.
pub fn birational_threshold(g: &GradedSemigroup) -> Result<BirationalReport> {
    let members = g.members();
    if members.is_empty() {
        return Err(Error::EmptyInput("no nonempty slice of positive degree in the window"));
    }
    let inf = g.lambda_inf();
    let values: Vec<(u64, LatticeIndex)> =
        members.iter().map(|&m| (m, g.lambda(m).unwrap().index_in(inf).expect("inside the join"))).collect();
    let mut report = StabilizationReport::from_values(values, g.bound);
    if !report.stable_value.as_ref().is_some_and(LatticeIndex::is_one) {
        report.threshold = None;
    }
    let matches_declared = g.declared_lambda_inf().map(|d| d == inf);
    report.certified = matches_declared == Some(true) && report.threshold.is_some();
    Ok(BirationalReport { report, lambda_inf: inf.clone(), matches_declared })
}

/// `dim W_{m,k}`: the size of the `k`-fold sumset of `S_m`.
pub fn image_hilbert(series: &Series, m: u64, k: u64) -> Result<usize> {
    let s = series.evaluate(m);
    if s.is_empty() {
        return Err(Error::EmptySlice(m));
    }
    Ok(sumset_power(&s, k, series.strategy()).len())
}

/// `|k·conv(S_m) ∩ (k·a₀ + Λ_m)|`, the Hilbert function of the
/// normalization of `Y_m`.
pub fn normalized_hilbert(series: &Series, m: u64, k: u64) -> Result<usize> {
    let s = series.evaluate(m);
    let lambda = difference_lattice(&s).map_err(|_| Error::EmptySlice(m))?;
    let hull = RationalPolytope::from_int_points(s.dim(), s.points())?.scaled_int(k);
    let offset = s.points()[0].scale(&BigInt::from(k));
    Ok(enumerate_points_with(&hull, Some((&lambda, &offset)), series.strategy()).len())
}

/// `deg Y_m`: normalized volume of `conv(S_m)` against `Λ_m`.
pub fn image_volume(series: &Series, m: u64) -> Result<BigRational> {
    let s = series.evaluate(m);
    let lambda = difference_lattice(&s).map_err(|_| Error::EmptySlice(m))?;
    Ok(convex_hull_volume(&s, &lambda)?.nvol)
}

/// One row of the per-degree invariants table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantRow {
    pub m: u64,
    pub dim: usize,
    pub kappa_m: Option<usize>,
    pub deg_phi: Option<LatticeIndex>,
    pub deg_nu: Option<LatticeIndex>,
    pub image_nvol: Option<BigRational>,
}

/// Per-degree table for `m = 0..=bound`; empty slices leave the lattice
/// columns blank.
pub fn invariant_table(g: &GradedSemigroup) -> Vec<InvariantRow> {
    let full = SubLattice::full(g.dim);
    let ms: Vec<u64> = (0..=g.bound).collect();
    exec::map(&ms, g.strategy, |&m| {
        let s = g.slice(m);
        let lambda = g.lambda(m);
        InvariantRow {
            m,
            dim: s.len(),
            kappa_m: lambda.map(SubLattice::rank),
            deg_phi: lambda.map(|l| l.index_in(&full).expect("sublattice of Z^n")),
            deg_nu: lambda.map(|l| l.index_in(g.lambda_inf()).expect("inside the join")),
            image_nvol: lambda.map(|l| convex_hull_volume(s, l).expect("own lattice").nvol),
        }
    })
}

/// `κ_m! · h(k) / k^{κ_m}` for a Hilbert value `h(k)`.
pub fn hilbert_ratio(kappa_m: usize, k: u64, h: usize) -> BigRational {
    let fact: BigInt = (1..=kappa_m as u64).map(BigInt::from).product();
    if k == 0 {
        return BigRational::zero();
    }
    BigRational::new(fact * BigInt::from(h), num_traits::pow(BigInt::from(k), kappa_m))
}
