//! Limits over the support semigroup and the identities relating them.
//!
//! Terms are exact rationals. Floating point appears only in
//! [`GrowthEstimate::slope`] and [`LimitEstimate::relative_spread`], both
//! labeled as estimates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exec;
use crate::intersection::{moving_intersection_at, restrict, SubtorusSpec};
use crate::invariants::{asymptotic_degree, birational_threshold, iitaka_dimension, image_volume, GradedSemigroup};
use crate::lattice::{convex_hull_volume, difference_lattice, LatticeIndex, RationalPolytope, SubLattice};
use crate::series::{Rule, Series};
use crate::verify::VerificationReport;

/// Relative tail spread accepted for observational limits.
pub fn spread_tolerance() -> BigRational {
    BigRational::new(1.into(), 10.into())
}

/// Smallest window for which the spread tolerance is enforced.
pub const SPREAD_MIN_BOUND: u64 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub value: BigRational,
    pub provenance: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitEstimate {
    /// Exponent `κ` in the normalization `m^κ`.
    pub kappa: usize,
    /// `(m, raw_m)` before normalization.
    pub raw: Vec<(u64, BigRational)>,
    /// `(m, normalized_m)`.
    pub terms: Vec<(u64, BigRational)>,
    pub window_bound: u64,
    pub last_term: BigRational,
    /// `max - min` over the last quartile of terms.
    pub tail_spread: BigRational,
    pub closed_form: Option<ClosedForm>,
}

impl LimitEstimate {
    fn from_terms(
        kappa: usize,
        raw: Vec<(u64, BigRational)>,
        window_bound: u64,
        closed_form: Option<ClosedForm>,
    ) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput("no positive degree in the window"));
        }
        let terms: Vec<(u64, BigRational)> = raw
            .iter()
            .map(|(m, r)| (*m, r / BigRational::from_integer(num_traits::pow(BigInt::from(*m), kappa))))
            .collect();
        let last_term = terms.last().unwrap().1.clone();
        let tail = &terms[terms.len() - terms.len().div_ceil(4)..];
        let max = tail.iter().map(|(_, t)| t).max().unwrap();
        let min = tail.iter().map(|(_, t)| t).min().unwrap();
        let tail_spread = max - min;
        Ok(LimitEstimate { kappa, raw, terms, window_bound, last_term, tail_spread, closed_form })
    }

    pub fn last_quartile(&self) -> &[(u64, BigRational)] {
        &self.terms[self.terms.len() - self.terms.len().div_ceil(4)..]
    }

    /// The closed form when known, else the last term.
    pub fn value(&self) -> &BigRational {
        self.closed_form.as_ref().map_or(&self.last_term, |c| &c.value)
    }

    /// Whether the closed form lies in `[min, max]` of the last quartile.
    pub fn closed_form_in_tail_range(&self) -> Option<bool> {
        let c = &self.closed_form.as_ref()?.value;
        let tail = self.last_quartile();
        let max = tail.iter().map(|(_, t)| t).max().unwrap();
        let min = tail.iter().map(|(_, t)| t).min().unwrap();
        Some(min <= c && c <= max)
    }

    /// `tail_spread / |value|`, exact; `None` for a zero limit.
    pub fn relative_spread_exact(&self) -> Option<BigRational> {
        let v = self.value();
        (!v.is_zero()).then(|| &self.tail_spread / v.abs())
    }

    /// `C = max m·|term_m − c|` over the first quartile, and the
    /// last-quartile members where `|term_m − c| > C/m`.
    pub fn rate_check(&self) -> Option<(BigRational, Vec<u64>)> {
        let c = &self.closed_form.as_ref()?.value;
        let q = self.terms.len().div_ceil(4);
        let err = |(m, t): &(u64, BigRational)| (t - c).abs() * rat(*m);
        let rate = self.terms[..q].iter().map(err).max().unwrap();
        let bad = self.last_quartile().iter().filter(|p| err(p) > rate).map(|(m, _)| *m).collect();
        Some((rate, bad))
    }

    /// Floating-point estimate of the relative spread.
    pub fn relative_spread(&self) -> Option<f64> {
        self.relative_spread_exact().and_then(|r| r.to_f64())
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k as u64).map(BigInt::from).product()
}

fn rat(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

/// `κ!·|S_m| / m^κ` over the positive members of `N(V•)`.
pub fn kappa_volume(series: &Series, g: &GradedSemigroup) -> Result<LimitEstimate> {
    let kappa = iitaka_dimension(g)?.kappa();
    let fact = factorial(kappa);
    let raw = g.members().into_iter().map(|m| (m, rat(&fact * BigInt::from(g.slice(m).len())))).collect();
    let closed = volume_closed_form(series.spec().rule.tail(), series.dim()).filter(|_| kappa > 0);
    LimitEstimate::from_terms(kappa, raw, g.bound(), closed)
}

/// Exact `vol_κ` from the rule governing large degrees, when it has one.
pub fn volume_closed_form(rule: &Rule, n: usize) -> Option<ClosedForm> {
    match rule {
        Rule::Polytopal { polytope } => {
            let full_dim = polytope.dim() == Some(n);
            let lattice = match polytope.integral_vertices() {
                Some(v) => {
                    let set = crate::lattice::LatticePointSet::from_points(n, v);
                    difference_lattice(&set).ok()?.saturation()
                }
                None if full_dim => SubLattice::full(n),
                None => return None,
            };
            Some(ClosedForm {
                value: polytope.normalized_volume(&lattice).ok()?,
                provenance: "polytopal: nvol(P) against the saturated lattice of its span",
            })
        }
        Rule::Congruence { polytope, lattice, .. } => {
            if lattice.rank() != n || polytope.dim() != Some(n) {
                return None;
            }
            let index = lattice.index_in(&SubLattice::full(n)).ok()?.finite()?.clone();
            Some(ClosedForm {
                value: polytope.normalized_volume(&SubLattice::full(n)).ok()? / rat(index),
                provenance: "congruence: nvol(P) / [Z^n : Λ]",
            })
        }
        Rule::Powers { generators } => {
            let lattice = difference_lattice(generators).ok()?;
            Some(ClosedForm {
                value: convex_hull_volume(generators, &lattice).ok()?.nvol,
                provenance: "powers: nvol(conv S_1) against the difference lattice of S_1",
            })
        }
        Rule::Piecewise { .. } => volume_closed_form(rule.tail(), n),
        Rule::Projected { .. } | Rule::Table { .. } => None,
    }
}

/// `lim conv(S_m) / m` for the rule governing large degrees.
pub fn limit_polytope(rule: &Rule) -> Option<RationalPolytope> {
    match rule {
        Rule::Polytopal { polytope } | Rule::Congruence { polytope, .. } => Some(polytope.clone()),
        Rule::Powers { generators } => RationalPolytope::from_int_points(generators.dim(), generators.points()).ok(),
        Rule::Piecewise { .. } => limit_polytope(rule.tail()),
        Rule::Projected { base, matrix } => limit_polytope(base).and_then(|p| p.image(matrix).ok()),
        Rule::Table { .. } => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthEstimate {
    pub degree: usize,
    /// Least-squares slope of `ln |S_m|` against `ln m` (estimate).
    pub slope: f64,
    pub members_used: Vec<u64>,
}

/// Growth exponent of `|S_m|` from the log-log slope over the last half of
/// the positive window members.
pub fn growth_degree(g: &GradedSemigroup) -> Result<GrowthEstimate> {
    let members = g.members();
    if members.len() < 5 {
        return Err(Error::WindowTooSmall(format!("{} positive support members, need 5", members.len())));
    }
    let used: Vec<u64> = members[members.len() / 2..].to_vec();
    let pts: Vec<(f64, f64)> = used.iter().map(|&m| ((m as f64).ln(), (g.slice(m).len() as f64).ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(GrowthEstimate { degree: slope.round().max(0.0) as usize, slope, members_used: used })
}

/// `(V_m^κ·Z)_mov / m^κ` over the positive members of `N(V•|_Z)`.
pub fn asymptotic_moving_intersection(series: &Series, z: &SubtorusSpec, bound: u64) -> Result<LimitEstimate> {
    let members: Vec<u64> = (1..=bound).filter(|&m| !series.evaluate(m).is_empty()).collect();
    if members.is_empty() {
        return Err(Error::EmptyInput("restricted support has no positive degree in the window"));
    }
    let counts =
        exec::map(&members, series.strategy(), |&m| moving_intersection_at(series, m, z).map(|r| (m, r.count)));
    let raw = counts.into_iter().collect::<Result<Vec<_>>>()?;
    LimitEstimate::from_terms(z.kappa(), raw, bound, movint_closed_form(series, z))
}

fn movint_closed_form(series: &Series, z: &SubtorusSpec) -> Option<ClosedForm> {
    let q = limit_polytope(series.spec().rule.tail())?.image(z.matrix()).ok()?;
    let value = if q.dim() == Some(z.kappa()) {
        q.normalized_volume(&SubLattice::full(z.kappa())).ok()?
    } else {
        BigRational::zero()
    };
    Some(ClosedForm { value, provenance: "nvol of B·P∞ against Z^κ" })
}

fn with_strategy(series: &Series, spec: crate::series::SeriesSpec) -> Series {
    Series::new(spec).with_strategy(series.strategy())
}

/// `(V_m^κ·Z)_mov = deg(φ_m|_Z) · deg Y_m|_Z` past the restricted
/// birational threshold, the zero criterion at every member, and
/// `lim = δ(V•|_Z) · vol_κ(V•)` for the closed forms.
pub fn verify_main_identity(series: &Series, z: &SubtorusSpec, bound: u64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("moving intersection identity");
    let restricted = with_strategy(series, restrict(series.spec(), z)?);
    let gz = GradedSemigroup::new(&restricted, bound);
    let members = gz.members();
    if members.is_empty() {
        rep.fail("restricted support has no positive degree in the window");
        return Ok(rep);
    }
    let kappa = z.kappa();
    let g = GradedSemigroup::new(series, bound);
    let kappa_v = iitaka_dimension(&g)?.kappa();
    if kappa_v != kappa {
        rep.fail(format!("dim Z = {kappa} but κ(V•) = {kappa_v}"));
    }

    let full = SubLattice::full(kappa);
    let threshold = birational_threshold(&gz)?.report.threshold.unwrap_or(members[0]);
    let mut full_rank = Vec::new();
    for &m in &members {
        let lambda = gz.lambda(m).unwrap();
        let count = moving_intersection_at(series, m, z)?.count;
        let ranked = lambda.rank() == kappa;
        if (count > BigRational::zero()) != ranked {
            rep.fail(format!("m = {m}: count {count} but rank Λ_m|Z = {}", lambda.rank()));
        }
        if !ranked {
            continue;
        }
        full_rank.push(m);
        if m < threshold {
            continue;
        }
        let LatticeIndex::Finite(deg) = lambda.index_in(&full)? else { unreachable!("full rank") };
        let vol = image_volume(&restricted, m)?;
        if count != rat(deg.clone()) * &vol {
            rep.fail(format!("m = {m}: count {count} ≠ {deg} · {vol}"));
        }
    }
    let checked = full_rank.iter().filter(|&&m| m >= threshold).count();
    rep.note(format!("finite-degree identity checked at {checked} members from m = {threshold}"));

    let asym = asymptotic_moving_intersection(&restricted, &SubtorusSpec::identity(kappa), bound)?;
    if full_rank.is_empty() {
        rep.note("rank criterion fails at every member: every count is 0");
        match &asym.closed_form {
            Some(c) if !c.value.is_zero() => rep.fail(format!("closed form {} should be 0", c.value)),
            _ => rep.note("limit = 0"),
        }
        return Ok(rep);
    }
    let vol = kappa_volume(series, &g)?;
    let delta = asymptotic_degree(&gz).ok().and_then(|d| d.delta().cloned());
    match (&asym.closed_form, &vol.closed_form, delta) {
        (Some(a), Some(v), Some(d)) => {
            let rhs = rat(d.clone()) * &v.value;
            if a.value == rhs {
                rep.note(format!("limit {} = {} · {}", a.value, d, v.value));
            } else {
                rep.fail(format!("limit {} ≠ {} · {} = {}", a.value, d, v.value, rhs));
            }
        }
        (a, v, d) => rep.note(format!(
            "closed-form identity not evaluated (limit {}, vol {}, δ {})",
            a.as_ref().map_or("unknown".into(), |c| c.value.to_string()),
            v.as_ref().map_or("unknown".into(), |c| c.value.to_string()),
            d.map_or("unknown".into(), |d| d.to_string()),
        )),
    }
    Ok(rep)
}

/// `deg Y_m / m^κ ≤ vol_κ(V•)` at every member, with `0` where
/// `κ_m < κ`, and the last quartile within the spread tolerance of
/// `vol_κ`.
pub fn fujita_terms(series: &Series, g: &GradedSemigroup) -> Result<LimitEstimate> {
    let kappa = iitaka_dimension(g)?.kappa();
    let members = g.members();
    let raw = exec::map(&members, series.strategy(), |&m| {
        if g.lambda(m).unwrap().rank() < kappa {
            Ok((m, BigRational::zero()))
        } else {
            image_volume(series, m).map(|v| (m, v))
        }
    });
    let raw = raw.into_iter().collect::<Result<Vec<_>>>()?;
    let closed = volume_closed_form(series.spec().rule.tail(), series.dim()).filter(|_| kappa > 0);
    LimitEstimate::from_terms(kappa, raw, g.bound(), closed)
}

pub fn fujita_check(series: &Series, g: &GradedSemigroup) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("image volume approximation");
    let est = fujita_terms(series, g)?;
    match &est.closed_form {
        Some(c) => {
            let above: Vec<u64> = est.terms.iter().filter(|(_, t)| t > &c.value).map(|(m, _)| *m).collect();
            let equal = est.terms.iter().filter(|(_, t)| t == &c.value).count();
            if above.is_empty() {
                rep.note(format!("every term ≤ {}; {equal} of {} equal", c.value, est.terms.len()));
            } else {
                rep.fail(format!("terms exceed {} at m = {above:?}", c.value));
            }
        }
        None => rep.note(format!("no closed form; observed last term {}", est.last_term)),
    }
    if est.window_bound >= SPREAD_MIN_BOUND {
        match est.relative_spread_exact() {
            Some(r) if r > spread_tolerance() => rep.fail(format!("relative tail spread {r} > 1/10")),
            Some(r) => rep.note(format!("relative tail spread {r}")),
            None => rep.note("limit is 0"),
        }
    } else {
        rep.note(format!("tail spread not assessed below bound {SPREAD_MIN_BOUND}"));
    }
    Ok(rep)
}

/// `|B(S_m)| = |S_m|` whenever `rank B(Λ_m) = rank Λ_m`.
pub fn restriction_injectivity_check(series: &Series, z: &SubtorusSpec, bound: u64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("restriction injectivity");
    let b = z.matrix();
    let mut tested = 0;
    for m in 1..=bound {
        let s = series.evaluate(m);
        let Ok(lambda) = difference_lattice(&s) else { continue };
        if lambda.image(b)?.rank() != lambda.rank() {
            continue;
        }
        tested += 1;
        let image = s.image(b)?;
        if image.len() != s.len() {
            let mut seen = std::collections::BTreeMap::new();
            let mut pair = None;
            for p in s.iter() {
                let q = b.apply(&p.0)?;
                if let Some(prev) = seen.insert(q, p.clone()) {
                    pair = Some((prev, p.clone()));
                    break;
                }
            }
            let (a, c) = pair.expect("a collision exists");
            rep.fail(format!("m = {m}: |B(S_m)| = {} < {} = |S_m|; {a} and {c} collide", image.len(), s.len()));
        }
    }
    if tested == 0 {
        rep.vacuous(format!("rank B(Λ_m) < rank Λ_m for every m ≤ {bound}: κ(V•|_Z) < κ(V•), hypothesis never holds"));
    } else {
        rep.note(format!("checked {tested} degrees"));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntMatrix;
    use crate::series::catalog;
    use crate::verify::Outcome;

    fn series(name: &str) -> Series {
        Series::new(catalog::load(name))
    }

    fn gs(s: &Series, bound: u64) -> GradedSemigroup {
        GradedSemigroup::new(s, bound)
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn row(b: &[i64]) -> SubtorusSpec {
        SubtorusSpec::new(IntMatrix::from_i64(b.len(), &[b]), 0).unwrap()
    }

    #[test]
    fn kappa_volume_terms_converge_at_rate_one_over_m() {
        for name in catalog::NAMES {
            let s = series(name);
            let est = kappa_volume(&s, &gs(&s, 32)).unwrap();
            if let Some((rate, bad)) = est.rate_check() {
                assert!(bad.is_empty(), "{name}: C = {rate}, violations at {bad:?}");
            }
        }
        let c = ClosedForm { value: q(1, 1), provenance: "test" };
        let raw: Vec<(u64, BigRational)> = (1..=8).map(|m| (m, rat(m + 1))).collect();
        let est = LimitEstimate::from_terms(0, raw, 8, Some(c)).unwrap();
        assert_eq!(est.rate_check(), Some((q(4, 1), vec![7, 8])));
    }

    #[test]
    fn kappa_volume_closed_forms() {
        for (name, expected) in [
            ("full_O1_P2", q(1, 1)),
            ("even_sublattice_P2", q(1, 4)),
            ("deg_drop_line", q(2, 1)),
            ("powers_023", q(3, 1)),
            ("parabola_index2", q(2, 1)),
            ("segment_kappa1", q(1, 1)),
            ("gap_semigroup", q(1, 1)),
        ] {
            let s = series(name);
            let est = kappa_volume(&s, &gs(&s, 16)).unwrap();
            assert_eq!(est.closed_form.unwrap().value, expected, "{name}");
        }
    }

    #[test]
    fn kappa_volume_terms_match_counting_formulas() {
        let even = series("even_sublattice_P2");
        let est = kappa_volume(&even, &gs(&even, 20)).unwrap();
        for (m, t) in &est.terms {
            let h = (*m as i64) / 2;
            let count = (h + 1) * (h + 2) / 2;
            assert_eq!(*t, q(2 * count, (*m * *m) as i64), "m={m}");
        }
        let line = series("deg_drop_line");
        let est = kappa_volume(&line, &gs(&line, 20)).unwrap();
        for (m, t) in est.terms.iter().filter(|(m, _)| *m >= 3) {
            assert_eq!(*t, q(2 * *m as i64 + 1, *m as i64));
        }
        assert!(est.terms.iter().all(|(_, t)| t > &BigRational::zero()));
    }

    #[test]
    fn growth_degrees() {
        for (name, q) in [("full_O1_P2", 2), ("segment_kappa1", 1), ("even_sublattice_P2", 2), ("powers_023", 1)] {
            let s = series(name);
            assert_eq!(growth_degree(&gs(&s, 32)).unwrap().degree, q, "{name}");
        }
        let s = series("full_O1_P2");
        assert!(matches!(growth_degree(&gs(&s, 4)), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn asymptotic_moving_intersection_closed_forms() {
        let x = SubtorusSpec::identity(2);
        let even = series("even_sublattice_P2");
        let e = asymptotic_moving_intersection(&even, &x, 16).unwrap();
        assert_eq!(e.closed_form.unwrap().value, q(1, 1));
        let par = series("parabola_index2");
        let e = asymptotic_moving_intersection(&par, &x, 16).unwrap();
        assert_eq!(e.closed_form.unwrap().value, q(4, 1));
        assert!(e.terms.iter().filter(|(m, _)| *m >= 2).all(|(_, t)| *t == q(4, 1)));
        let seg = series("segment_kappa1");
        let e = asymptotic_moving_intersection(&seg, &row(&[2, 3]), 16).unwrap();
        assert_eq!(e.closed_form.unwrap().value, q(2, 1));
        let e = asymptotic_moving_intersection(&seg, &row(&[0, 1]), 16).unwrap();
        assert_eq!(e.closed_form.unwrap().value, q(0, 1));
        assert!(e.terms.iter().all(|(_, t)| t.is_zero()));
    }

    #[test]
    fn main_identity_passes_on_catalog() {
        let x = SubtorusSpec::identity(2);
        for name in ["full_O1_P2", "even_sublattice_P2", "parabola_index2", "gap_semigroup"] {
            let r = verify_main_identity(&series(name), &x, 16).unwrap();
            assert_eq!(r.outcome, Outcome::Pass, "{name}: {:?}", r.details);
        }
        let seg = series("segment_kappa1");
        assert_eq!(verify_main_identity(&seg, &row(&[2, 3]), 16).unwrap().outcome, Outcome::Pass);
        let r = verify_main_identity(&seg, &row(&[0, 1]), 16).unwrap();
        assert_eq!(r.outcome, Outcome::Pass);
        assert!(r.details.iter().any(|l| l.contains("rank criterion fails")));
        let pw = series("powers_023");
        assert_eq!(verify_main_identity(&pw, &SubtorusSpec::identity(1), 16).unwrap().outcome, Outcome::Pass);
    }

    #[test]
    fn main_identity_rejects_wrong_dimension() {
        let r = verify_main_identity(&series("full_O1_P2"), &row(&[1, 0]), 8).unwrap();
        assert_eq!(r.outcome, Outcome::Fail);
    }

    #[test]
    fn fujita_examples() {
        let even = series("even_sublattice_P2");
        let g = gs(&even, 32);
        let est = fujita_terms(&even, &g).unwrap();
        for (m, t) in &est.terms {
            assert!(*t <= q(1, 4));
            assert_eq!(m % 2 == 0, *t == q(1, 4), "m={m}");
        }
        assert_eq!(fujita_check(&even, &g).unwrap().outcome, Outcome::Pass);
        let full = series("full_O1_P2");
        let est = fujita_terms(&full, &gs(&full, 12)).unwrap();
        assert!(est.terms.iter().all(|(_, t)| *t == q(1, 1)));
        let pw = series("powers_023");
        let est = fujita_terms(&pw, &gs(&pw, 12)).unwrap();
        assert!(est.terms.iter().all(|(m, _)| est.raw.iter().any(|(k, r)| k == m && *r == q(3 * *m as i64, 1))));
        assert!(est.terms.iter().all(|(_, t)| *t == q(3, 1)));
    }

    #[test]
    fn injectivity_examples() {
        let even = series("even_sublattice_P2");
        assert_eq!(
            restriction_injectivity_check(&even, &SubtorusSpec::identity(2), 12).unwrap().outcome,
            Outcome::Pass
        );
        let seg = series("segment_kappa1");
        assert_eq!(restriction_injectivity_check(&seg, &row(&[2, 3]), 16).unwrap().outcome, Outcome::Pass);
        assert_eq!(restriction_injectivity_check(&seg, &row(&[0, 1]), 16).unwrap().outcome, Outcome::VacuousPass);
    }
}
