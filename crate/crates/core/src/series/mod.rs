//! Monomial graded linear series: declarative specs, slice evaluation and
//! the semigroup checks on top of them.
//!
//! `V_m` is the span of the monomials whose exponents lie in `S_m`, so
//! `dim V_m = |S_m|` and multiplication of sections is addition of
//! exponents.

pub mod catalog;
mod eval;
mod format;
mod semigroup;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use eval::{Series, SliceStore};
pub use format::{parse_spec_str, read_spec, write_spec_string, ReadSpecError};
pub use semigroup::{
    basepoint_free_at, check_multiplicativity, free_semigroup, support_semigroup, SemigroupReport, ValidationReport,
    Violation,
};

use crate::error::{Error, Result};
use crate::lattice::{IntMatrix, IntVector, LatticePointSet, RationalPolytope, SubLattice};

/// Ambient `P^n` with `L = O(d)`: `S_m ⊆ (m·d)Δ_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AmbientSpec {
    pub n: usize,
    pub d: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `S_m = mP ∩ Z^n`.
    Polytopal { polytope: RationalPolytope },
    /// `S_m = mP ∩ (m·w + Λ)`.
    Congruence { polytope: RationalPolytope, lattice: SubLattice, offset: IntVector },
    /// `S_m` is the m-fold sumset of `S_1`.
    Powers { generators: LatticePointSet },
    /// Degree ranges, each delegated to its own rule.
    Piecewise { pieces: Vec<Piece> },
    /// `S_m = B(S_m(base))`.
    Projected { base: Box<Rule>, matrix: IntMatrix },
    /// Explicit `S_0, …, S_{m_max}`, then closed under sumsets:
    /// `S_m = ⋃_{k+ℓ=m} S_k + S_ℓ`.
    Table { slices: Vec<LatticePointSet> },
}

/// Inclusive degree range `[start, end]`; `end = None` is unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub start: u64,
    pub end: Option<u64>,
    pub rule: Rule,
}

impl Piece {
    pub fn covers(&self, m: u64) -> bool {
        m >= self.start && self.end.is_none_or(|e| m <= e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    pub name: String,
    pub ambient: AmbientSpec,
    pub rule: Rule,
    /// Optional exact `Λ_∞` for certified birational thresholds.
    pub declared_lambda_inf: Option<SubLattice>,
}

impl SeriesSpec {
    pub fn new(
        name: impl Into<String>,
        ambient: AmbientSpec,
        rule: Rule,
        declared_lambda_inf: Option<SubLattice>,
    ) -> Result<Self> {
        if ambient.n == 0 || ambient.d == 0 {
            return Err(Error::MalformedSpec(format!(
                "ambient needs n ≥ 1 and d ≥ 1, got n = {}, d = {}",
                ambient.n, ambient.d
            )));
        }
        let dim = validate_rule(&rule, ambient, "rule")?;
        if let Some(l) = &declared_lambda_inf {
            if l.ambient_dim() != dim {
                return Err(Error::MalformedSpec(format!(
                    "lambda_inf lives in Z^{} but slices live in Z^{dim}",
                    l.ambient_dim()
                )));
            }
        }
        Ok(SeriesSpec { name: name.into(), ambient, rule, declared_lambda_inf })
    }

    /// Dimension of the lattice the slices live in (`n`, or the row count of
    /// a projection).
    pub fn output_dim(&self) -> usize {
        self.rule.output_dim(self.ambient.n)
    }

    /// Canonical serialized form; equal specs give equal strings.
    pub fn canonical_form(&self) -> String {
        format::canonical_json(self)
    }

    /// Stable SHA-256 of the canonical form, hex encoded.
    pub fn canonical_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical_form().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl Rule {
    pub fn output_dim(&self, n: usize) -> usize {
        match self {
            Rule::Projected { matrix, .. } => matrix.nrows(),
            Rule::Piecewise { pieces } => pieces.first().map_or(n, |p| p.rule.output_dim(n)),
            _ => n,
        }
    }

    /// Rule governing all sufficiently large degrees.
    pub fn tail(&self) -> &Rule {
        match self {
            Rule::Piecewise { pieces } => pieces.last().expect("validated").rule.tail(),
            r => r,
        }
    }
}

fn check_in_simplex(p: &RationalPolytope, ambient: AmbientSpec, field: &str) -> Result<()> {
    let d = BigRational::from_integer(BigInt::from(ambient.d));
    if let Some(v) = p.first_vertex_outside_simplex(&d) {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        return Err(Error::MalformedSpec(format!(
            "{field}: vertex ({}) is not in {}Δ_{}",
            parts.join(","),
            ambient.d,
            ambient.n
        )));
    }
    Ok(())
}

fn check_set_in_simplex(s: &LatticePointSet, scale: u64, ambient: AmbientSpec, field: &str) -> Result<()> {
    let bound = BigInt::from(scale * ambient.d);
    for p in s.iter() {
        if p.0.iter().any(|x| x < &BigInt::from(0)) || p.0.iter().sum::<BigInt>() > bound {
            return Err(Error::MalformedSpec(format!(
                "{field}: point {p} is not in {}Δ_{}",
                scale * ambient.d,
                ambient.n
            )));
        }
    }
    Ok(())
}

fn check_dim(found: usize, expected: usize, field: &str) -> Result<()> {
    if found != expected {
        return Err(Error::MalformedSpec(format!("{field}: expected dimension {expected}, found {found}")));
    }
    Ok(())
}

/// Validates a rule and returns its output dimension.
fn validate_rule(rule: &Rule, ambient: AmbientSpec, field: &str) -> Result<usize> {
    let n = ambient.n;
    match rule {
        Rule::Polytopal { polytope } => {
            check_dim(polytope.ambient_dim(), n, field)?;
            if polytope.is_empty() {
                return Err(Error::MalformedSpec(format!("{field}: polytope is empty")));
            }
            check_in_simplex(polytope, ambient, field)?;
            Ok(n)
        }
        Rule::Congruence { polytope, lattice, offset } => {
            check_dim(polytope.ambient_dim(), n, field)?;
            check_dim(lattice.ambient_dim(), n, &format!("{field}.lattice"))?;
            check_dim(offset.dim(), n, &format!("{field}.offset"))?;
            if polytope.is_empty() {
                return Err(Error::MalformedSpec(format!("{field}: polytope is empty")));
            }
            check_in_simplex(polytope, ambient, field)?;
            Ok(n)
        }
        Rule::Powers { generators } => {
            check_dim(generators.dim(), n, field)?;
            check_set_in_simplex(generators, 1, ambient, field)?;
            Ok(n)
        }
        Rule::Table { slices } => {
            if slices.first() != Some(&LatticePointSet::origin(n)) {
                return Err(Error::MalformedSpec(format!("{field}: S_0 must be {{0}}")));
            }
            for (m, s) in slices.iter().enumerate() {
                let f = format!("{field}.slices[{m}]");
                check_dim(s.dim(), n, &f)?;
                check_set_in_simplex(s, m as u64, ambient, &f)?;
            }
            Ok(n)
        }
        Rule::Piecewise { pieces } => {
            let Some(first) = pieces.first() else {
                return Err(Error::MalformedSpec(format!("{field}: no pieces")));
            };
            if first.start != 0 {
                return Err(Error::MalformedSpec(format!("{field}: first piece must start at 0")));
            }
            let mut dim = None;
            for (i, w) in pieces.iter().enumerate() {
                let f = format!("{field}.pieces[{i}]");
                let last = i + 1 == pieces.len();
                match (w.end, last) {
                    (None, false) => {
                        return Err(Error::MalformedSpec(format!("{f}: only the last piece may be unbounded")))
                    }
                    (Some(_), true) => return Err(Error::MalformedSpec(format!("{f}: last piece must be unbounded"))),
                    (Some(e), false) => {
                        if e < w.start || pieces[i + 1].start != e + 1 {
                            return Err(Error::MalformedSpec(format!("{f}: ranges must be contiguous")));
                        }
                    }
                    (None, true) => {}
                }
                let d = validate_rule(&w.rule, ambient, &format!("{f}.rule"))?;
                if *dim.get_or_insert(d) != d {
                    return Err(Error::MalformedSpec(format!("{f}: pieces disagree on output dimension")));
                }
            }
            Ok(dim.expect("nonempty"))
        }
        Rule::Projected { base, matrix } => {
            let d = validate_rule(base, ambient, &format!("{field}.base"))?;
            check_dim(matrix.ncols(), d, &format!("{field}.matrix"))?;
            let rank = matrix.rank();
            if rank != matrix.nrows() {
                return Err(Error::RankDeficient { rank, expected: matrix.nrows() });
            }
            Ok(matrix.nrows())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(k: i64) -> RationalPolytope {
        RationalPolytope::from_int_points(
            2,
            &[IntVector::from_i64(&[0, 0]), IntVector::from_i64(&[k, 0]), IntVector::from_i64(&[0, k])],
        )
        .unwrap()
    }

    #[test]
    fn polytope_outside_simplex_is_rejected() {
        let err =
            SeriesSpec::new("bad", AmbientSpec { n: 2, d: 1 }, Rule::Polytopal { polytope: tri(2) }, None).unwrap_err();
        match err {
            Error::MalformedSpec(msg) => assert!(msg.contains("(0,2)") || msg.contains("(2,0)"), "{msg}"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rank_deficient_projection_is_rejected() {
        let rule = Rule::Projected {
            base: Box::new(Rule::Polytopal { polytope: tri(1) }),
            matrix: IntMatrix::from_i64(2, &[&[1, 1], &[2, 2]]),
        };
        let err = SeriesSpec::new("bad", AmbientSpec { n: 2, d: 1 }, rule, None).unwrap_err();
        assert_eq!(err, Error::RankDeficient { rank: 1, expected: 2 });
    }

    #[test]
    fn piecewise_must_cover_all_degrees() {
        let piece = |start, end| Piece { start, end, rule: Rule::Polytopal { polytope: tri(1) } };
        let ok = Rule::Piecewise { pieces: vec![piece(0, Some(2)), piece(3, None)] };
        assert!(SeriesSpec::new("ok", AmbientSpec { n: 2, d: 1 }, ok, None).is_ok());
        let gap = Rule::Piecewise { pieces: vec![piece(0, Some(2)), piece(4, None)] };
        assert!(SeriesSpec::new("gap", AmbientSpec { n: 2, d: 1 }, gap, None).is_err());
        let late = Rule::Piecewise { pieces: vec![piece(1, None)] };
        assert!(SeriesSpec::new("late", AmbientSpec { n: 2, d: 1 }, late, None).is_err());
    }

    #[test]
    fn table_needs_origin_slice() {
        let s1 = LatticePointSet::from_points(1, vec![IntVector::from_i64(&[0])]);
        let rule = Rule::Table { slices: vec![LatticePointSet::empty(1), s1] };
        assert!(SeriesSpec::new("t", AmbientSpec { n: 1, d: 1 }, rule, None).is_err());
    }
}
