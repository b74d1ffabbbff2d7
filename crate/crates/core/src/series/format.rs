//! Series spec files.
//!
//! JSON with an `ambient {n, d}` object and a `rule {type, params}` object.
//! Every coordinate is an exact integer or rational written as a string
//! (`"3"`, `"-1/2"`); bare JSON integers are accepted on input.
//!
//! ```json
//! {
//!   "name": "even_sublattice_P2",
//!   "ambient": {"n": 2, "d": 1},
//!   "rule": {"type": "congruence", "params": {
//!     "vertices": [["0","0"],["1","0"],["0","1"]],
//!     "lattice": [["2","0"],["0","2"]],
//!     "offset": ["0","0"]}}
//! }
//! ```

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{AmbientSpec, Piece, Rule, SeriesSpec};
use crate::error::{Error, Result};
use crate::lattice::{IntMatrix, IntVector, LatticePointSet, RationalPolytope, SubLattice};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Text(String),
    Int(i64),
}

impl Num {
    fn text(&self) -> String {
        match self {
            Num::Text(s) => s.trim().to_string(),
            Num::Int(i) => i.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    name: String,
    ambient: AmbientFile,
    rule: RuleFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_inf: Option<Vec<Vec<Num>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmbientFile {
    n: usize,
    d: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case", deny_unknown_fields)]
enum RuleFile {
    Polytopal { vertices: Vec<Vec<Num>> },
    Congruence { vertices: Vec<Vec<Num>>, lattice: Vec<Vec<Num>>, offset: Vec<Num> },
    Powers { generators: Vec<Vec<Num>> },
    Piecewise { pieces: Vec<PieceFile> },
    Projected { matrix: Vec<Vec<Num>>, base: Box<RuleFile> },
    Table { slices: Vec<Vec<Vec<Num>>> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceFile {
    from: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<u64>,
    rule: RuleFile,
}

fn int(x: &Num, field: &str) -> Result<BigInt> {
    BigInt::from_str(&x.text()).map_err(|_| Error::MalformedSpec(format!("{field}: `{}` is not an integer", x.text())))
}

fn rat(x: &Num, field: &str) -> Result<BigRational> {
    BigRational::from_str(&x.text())
        .map_err(|_| Error::MalformedSpec(format!("{field}: `{}` is not a rational", x.text())))
}

fn int_vec(v: &[Num], field: &str) -> Result<IntVector> {
    v.iter().enumerate().map(|(i, x)| int(x, &format!("{field}[{i}]"))).collect::<Result<_>>().map(IntVector)
}

fn int_rows(rows: &[Vec<Num>], cols: usize, field: &str) -> Result<IntMatrix> {
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| int_vec(r, &format!("{field}[{i}]")).map(|v| v.0))
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(cols, rows).map_err(|e| Error::MalformedSpec(format!("{field}: {e}")))
}

fn point_set(rows: &[Vec<Num>], n: usize, field: &str) -> Result<LatticePointSet> {
    let pts = rows.iter().enumerate().map(|(i, r)| int_vec(r, &format!("{field}[{i}]"))).collect::<Result<Vec<_>>>()?;
    LatticePointSet::try_from_points(n, pts).map_err(|e| Error::MalformedSpec(format!("{field}: {e}")))
}

fn polytope(rows: &[Vec<Num>], n: usize, field: &str) -> Result<RationalPolytope> {
    let pts = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, x)| rat(x, &format!("{field}[{i}][{j}]"))).collect())
        .collect::<Result<Vec<Vec<BigRational>>>>()?;
    RationalPolytope::hull(n, &pts).map_err(|e| Error::MalformedSpec(format!("{field}: {e}")))
}

/// Output dimension of a file rule, needed to size empty matrices.
fn file_dim(rule: &RuleFile, n: usize) -> usize {
    match rule {
        RuleFile::Projected { matrix, .. } => matrix.len(),
        RuleFile::Piecewise { pieces } => pieces.first().map_or(n, |p| file_dim(&p.rule, n)),
        _ => n,
    }
}

fn rule_from_file(rule: &RuleFile, n: usize, field: &str) -> Result<Rule> {
    Ok(match rule {
        RuleFile::Polytopal { vertices } => {
            Rule::Polytopal { polytope: polytope(vertices, n, &format!("{field}.vertices"))? }
        }
        RuleFile::Congruence { vertices, lattice, offset } => Rule::Congruence {
            polytope: polytope(vertices, n, &format!("{field}.vertices"))?,
            lattice: SubLattice::from_matrix(&int_rows(lattice, n, &format!("{field}.lattice"))?),
            offset: int_vec(offset, &format!("{field}.offset"))?,
        },
        RuleFile::Powers { generators } => {
            Rule::Powers { generators: point_set(generators, n, &format!("{field}.generators"))? }
        }
        RuleFile::Piecewise { pieces } => Rule::Piecewise {
            pieces: pieces
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    Ok(Piece {
                        start: p.from,
                        end: p.to,
                        rule: rule_from_file(&p.rule, n, &format!("{field}.pieces[{i}].rule"))?,
                    })
                })
                .collect::<Result<_>>()?,
        },
        RuleFile::Projected { matrix, base } => {
            let cols = file_dim(base, n);
            Rule::Projected {
                base: Box::new(rule_from_file(base, n, &format!("{field}.base"))?),
                matrix: int_rows(matrix, cols, &format!("{field}.matrix"))?,
            }
        }
        RuleFile::Table { slices } => Rule::Table {
            slices: slices
                .iter()
                .enumerate()
                .map(|(m, s)| point_set(s, n, &format!("{field}.slices[{m}]")))
                .collect::<Result<_>>()?,
        },
    })
}

fn texts(v: &[BigInt]) -> Vec<Num> {
    v.iter().map(|x| Num::Text(x.to_string())).collect()
}

fn rows_of(m: &IntMatrix) -> Vec<Vec<Num>> {
    m.row_vecs().iter().map(|r| texts(r)).collect()
}

fn set_rows(s: &LatticePointSet) -> Vec<Vec<Num>> {
    s.iter().map(|p| texts(&p.0)).collect()
}

fn poly_rows(p: &RationalPolytope) -> Vec<Vec<Num>> {
    p.vertex_strings().into_iter().map(|r| r.into_iter().map(Num::Text).collect()).collect()
}

fn rule_to_file(rule: &Rule) -> RuleFile {
    match rule {
        Rule::Polytopal { polytope } => RuleFile::Polytopal { vertices: poly_rows(polytope) },
        Rule::Congruence { polytope, lattice, offset } => RuleFile::Congruence {
            vertices: poly_rows(polytope),
            lattice: rows_of(lattice.basis()),
            offset: texts(&offset.0),
        },
        Rule::Powers { generators } => RuleFile::Powers { generators: set_rows(generators) },
        Rule::Piecewise { pieces } => RuleFile::Piecewise {
            pieces: pieces
                .iter()
                .map(|p| PieceFile { from: p.start, to: p.end, rule: rule_to_file(&p.rule) })
                .collect(),
        },
        Rule::Projected { base, matrix } => {
            RuleFile::Projected { matrix: rows_of(matrix), base: Box::new(rule_to_file(base)) }
        }
        Rule::Table { slices } => RuleFile::Table { slices: slices.iter().map(set_rows).collect() },
    }
}

fn to_file(spec: &SeriesSpec) -> SpecFile {
    SpecFile {
        name: spec.name.clone(),
        ambient: AmbientFile { n: spec.ambient.n, d: spec.ambient.d },
        rule: rule_to_file(&spec.rule),
        lambda_inf: spec.declared_lambda_inf.as_ref().map(|l| rows_of(l.basis())),
    }
}

pub(crate) fn canonical_json(spec: &SeriesSpec) -> String {
    serde_json::to_string(&to_file(spec)).expect("spec serializes")
}

/// Pretty-printed canonical spec file contents.
pub fn write_spec_string(spec: &SeriesSpec) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(spec)).expect("spec serializes");
    s.push('\n');
    s
}

/// Parses and validates a spec from text.
pub fn parse_spec_str(text: &str) -> Result<SeriesSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SpecFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        line: e.inner().line(),
        column: e.inner().column(),
        message: e.inner().to_string(),
    })?;
    let n = file.ambient.n;
    let ambient = AmbientSpec { n, d: file.ambient.d };
    let rule = rule_from_file(&file.rule, n, "rule")?;
    let out_dim = file_dim(&file.rule, n);
    let lambda_inf = file
        .lambda_inf
        .as_ref()
        .map(|rows| int_rows(rows, out_dim, "lambda_inf").map(|m| SubLattice::from_matrix(&m)))
        .transpose()?;
    SeriesSpec::new(file.name, ambient, rule, lambda_inf)
}

#[derive(Debug, thiserror::Error)]
pub enum ReadSpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Invalid { path: String, source: Error },
}

/// Reads a spec file from disk.
pub fn read_spec(path: &Path) -> std::result::Result<SeriesSpec, ReadSpecError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ReadSpecError::Io { path: shown.clone(), source })?;
    parse_spec_str(&text).map_err(|source| ReadSpecError::Invalid { path: shown, source })
}
