use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;

use super::{AmbientSpec, Rule, SeriesSpec};
use crate::exec::Strategy;
use crate::lattice::{
    enumerate_points_with, sumset_with, IntMatrix, IntVector, LatticePointSet, RationalPolytope, SubLattice,
};

enum Node {
    Polytopal(RationalPolytope),
    Congruence(RationalPolytope, SubLattice, IntVector),
    Powers(LatticePointSet),
    Piecewise(Vec<(u64, Option<u64>, usize)>),
    Projected(usize, IntMatrix),
    Table(Vec<LatticePointSet>),
}

fn compile(rule: &Rule, nodes: &mut Vec<Node>) -> usize {
    let node = match rule {
        Rule::Polytopal { polytope } => Node::Polytopal(polytope.clone()),
        Rule::Congruence { polytope, lattice, offset } => {
            Node::Congruence(polytope.clone(), lattice.clone(), offset.clone())
        }
        Rule::Powers { generators } => Node::Powers(generators.clone()),
        Rule::Piecewise { pieces } => {
            Node::Piecewise(pieces.iter().map(|p| (p.start, p.end, compile(&p.rule, nodes))).collect())
        }
        Rule::Projected { base, matrix } => Node::Projected(compile(base, nodes), matrix.clone()),
        Rule::Table { slices } => Node::Table(slices.clone()),
    };
    nodes.push(node);
    nodes.len() - 1
}

/// On-disk slice cache: one file per `(spec hash, m)`, written through a
/// temporary file and renamed into place.
#[derive(Clone, Debug)]
pub struct SliceStore {
    root: PathBuf,
}

impl SliceStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        SliceStore { root: root.into() }
    }

    fn path(&self, hash: &str, m: u64) -> PathBuf {
        self.root.join(hash).join(format!("{m}.json"))
    }

    pub fn load(&self, hash: &str, m: u64, dim: usize) -> Option<LatticePointSet> {
        let text = fs::read_to_string(self.path(hash, m)).ok()?;
        let rows: Vec<Vec<String>> = serde_json::from_str(&text).ok()?;
        let pts = rows
            .into_iter()
            .map(|r| r.iter().map(|x| x.parse::<BigInt>().ok()).collect::<Option<Vec<_>>>().map(IntVector))
            .collect::<Option<Vec<_>>>()?;
        LatticePointSet::try_from_points(dim, pts).ok()
    }

    pub fn save(&self, hash: &str, m: u64, set: &LatticePointSet) -> std::io::Result<()> {
        let dir = self.root.join(hash);
        fs::create_dir_all(&dir)?;
        let rows: Vec<Vec<String>> = set.iter().map(|p| p.0.iter().map(|x| x.to_string()).collect()).collect();
        let text = serde_json::to_string(&rows).expect("rows serialize");
        let tmp = dir.join(format!(".{m}.{}.tmp", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, self.path(hash, m))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

/// A validated spec together with its slice cache.
///
/// `evaluate` is deterministic and safe to call from many threads; racing
/// evaluations of the same slice may compute it twice, and both writes are
/// identical.
pub struct Series {
    spec: SeriesSpec,
    hash: String,
    nodes: Vec<Node>,
    root: usize,
    cache: DashMap<(usize, u64), Arc<LatticePointSet>>,
    store: Option<SliceStore>,
    strategy: Strategy,
}

impl Series {
    pub fn new(spec: SeriesSpec) -> Self {
        let mut nodes = Vec::new();
        let root = compile(&spec.rule, &mut nodes);
        let hash = spec.canonical_hash();
        Series { spec, hash, nodes, root, cache: DashMap::new(), store: None, strategy: Strategy::default() }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_store(mut self, store: SliceStore) -> Self {
        self.store = Some(store);
        self
    }

    pub fn spec(&self) -> &SeriesSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn ambient(&self) -> AmbientSpec {
        self.spec.ambient
    }

    /// Dimension of the lattice containing the slices.
    pub fn dim(&self) -> usize {
        self.spec.output_dim()
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// `S_m`.
    pub fn evaluate(&self, m: u64) -> Arc<LatticePointSet> {
        if let Some(s) = self.cached(self.root, m) {
            return s;
        }
        if let Some(store) = &self.store {
            if let Some(s) = store.load(&self.hash, m, self.dim()) {
                let s = Arc::new(s);
                self.cache.insert((self.root, m), s.clone());
                return s;
            }
        }
        let s = self.eval_node(self.root, m);
        if let Some(store) = &self.store {
            // A failed cache write only costs a recomputation later.
            let _ = store.save(&self.hash, m, &s);
        }
        s
    }

    /// The slice before any projection: the exponent set of `V_m` on the
    /// ambient `P^n`, used for base-locus questions.
    pub fn ambient_slice(&self, m: u64) -> Arc<LatticePointSet> {
        let mut node = self.root;
        loop {
            match &self.nodes[node] {
                Node::Projected(base, _) => node = *base,
                Node::Piecewise(pieces) => node = piece_for(pieces, m),
                _ => return self.eval_node(node, m),
            }
        }
    }

    /// Evaluates `S_0, …, S_bound` (in parallel when enabled).
    pub fn slices(&self, bound: u64) -> Vec<Arc<LatticePointSet>> {
        // Sequential warm-up keeps recursive rules from recomputing prefixes.
        if matches!(self.nodes[self.root], Node::Powers(_) | Node::Table(_)) || self.has_recursive_node() {
            return (0..=bound).map(|m| self.evaluate(m)).collect();
        }
        let ms: Vec<u64> = (0..=bound).collect();
        crate::exec::map(&ms, self.strategy, |&m| self.evaluate(m))
    }

    fn has_recursive_node(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, Node::Powers(_) | Node::Table(_)))
    }

    fn cached(&self, node: usize, m: u64) -> Option<Arc<LatticePointSet>> {
        self.cache.get(&(node, m)).map(|r| r.value().clone())
    }

    fn eval_node(&self, node: usize, m: u64) -> Arc<LatticePointSet> {
        if let Some(s) = self.cached(node, m) {
            return s;
        }
        let n = self.spec.ambient.n;
        let set = match &self.nodes[node] {
            Node::Polytopal(p) => enumerate_points_with(&p.scaled_int(m), None, self.strategy),
            Node::Congruence(p, lattice, offset) => {
                let shift = offset.scale(&BigInt::from(m));
                enumerate_points_with(&p.scaled_int(m), Some((lattice, &shift)), self.strategy)
            }
            Node::Powers(gens) => {
                if m == 0 {
                    LatticePointSet::origin(n)
                } else {
                    // Fill the prefix iteratively to keep recursion shallow.
                    let mut k = (1..m).rev().find(|&k| self.cached(node, k).is_some()).unwrap_or(0);
                    let mut acc =
                        if k == 0 { Arc::new(LatticePointSet::origin(n)) } else { self.cached(node, k).unwrap() };
                    while k + 1 < m {
                        k += 1;
                        acc = Arc::new(sumset_with(&acc, gens, self.strategy).expect("validated dims"));
                        self.cache.insert((node, k), acc.clone());
                    }
                    sumset_with(&acc, gens, self.strategy).expect("validated dims")
                }
            }
            Node::Piecewise(pieces) => return self.store_node(node, m, self.eval_node(piece_for(pieces, m), m)),
            Node::Projected(base, b) => self.eval_node(*base, m).image(b).expect("validated dims"),
            Node::Table(slices) => {
                if (m as usize) < slices.len() {
                    slices[m as usize].clone()
                } else {
                    for k in slices.len() as u64..m {
                        self.eval_node(node, k);
                    }
                    let mut acc = LatticePointSet::empty(n);
                    for k in 1..=m / 2 {
                        let s = sumset_with(&self.eval_node(node, k), &self.eval_node(node, m - k), self.strategy)
                            .expect("validated dims");
                        acc = acc.union(&s);
                    }
                    acc
                }
            }
        };
        self.store_node(node, m, Arc::new(set))
    }

    fn store_node(&self, node: usize, m: u64, set: Arc<LatticePointSet>) -> Arc<LatticePointSet> {
        self.cache.insert((node, m), set.clone());
        set
    }
}

fn piece_for(pieces: &[(u64, Option<u64>, usize)], m: u64) -> usize {
    pieces
        .iter()
        .find(|(s, e, _)| m >= *s && e.is_none_or(|e| m <= e))
        .map(|&(_, _, id)| id)
        .expect("validated pieces cover every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::sumset_power;
    use crate::series::catalog;

    fn line(xs: &[i64]) -> LatticePointSet {
        LatticePointSet::from_points(1, xs.iter().map(|&x| IntVector::from_i64(&[x])).collect())
    }

    #[test]
    fn catalog_slices() {
        let full = Series::new(catalog::load("full_O1_P2"));
        assert_eq!(full.evaluate(3).len(), 10);
        let gap = Series::new(catalog::load("gap_semigroup"));
        assert!(gap.evaluate(1).is_empty());
        assert_eq!(gap.evaluate(2).len(), 6);
        let drop = Series::new(catalog::load("deg_drop_line"));
        assert_eq!(*drop.evaluate(2), line(&[0, 2, 4]));
        assert_eq!(drop.evaluate(3).len(), 7);
        let even = Series::new(catalog::load("even_sublattice_P2"));
        for m in 0..12u64 {
            let k = m / 2;
            assert_eq!(even.evaluate(m).len() as u64, (k + 1) * (k + 2) / 2, "m = {m}");
        }
        let para = Series::new(catalog::load("parabola_index2"));
        for m in 2..10u64 {
            assert_eq!(para.evaluate(m).len() as u64, (m + 1) * (m + 1));
        }
    }

    #[test]
    fn powers_are_iterated_sumsets() {
        let spec = catalog::load("powers_023");
        let s = Series::new(spec);
        let s1 = s.evaluate(1);
        for m in [0u64, 1, 2, 5, 9] {
            assert_eq!(*s.evaluate(m), sumset_power(&s1, m, Strategy::Sequential));
        }
        assert_eq!(s.evaluate(6).len(), 18);
    }

    #[test]
    fn table_closure_beyond_explicit_slices() {
        let s = Series::new(catalog::load(catalog::BROKEN));
        assert_eq!(*s.evaluate(3), line(&[0, 1, 2]));
        assert_eq!(*s.evaluate(4), line(&[0, 1, 2, 3]));
    }

    #[test]
    fn deterministic_and_strategy_independent() {
        for name in catalog::NAMES {
            let a = Series::new(catalog::load(name)).with_strategy(Strategy::Sequential);
            let b = Series::new(catalog::load(name)).with_strategy(Strategy::Parallel);
            for m in 0..=10 {
                assert_eq!(a.evaluate(m), b.evaluate(m), "{name} m={m}");
                assert_eq!(a.evaluate(m), a.evaluate(m));
            }
        }
    }

    #[test]
    fn disk_cache_warm_equals_cold() {
        let dir = tempfile::tempdir().unwrap();
        let spec = catalog::load("parabola_index2");
        let cold = Series::new(spec.clone()).with_store(SliceStore::new(dir.path()));
        let cold_slices: Vec<_> = (0..=8).map(|m| cold.evaluate(m)).collect();
        let warm = Series::new(spec).with_store(SliceStore::new(dir.path()));
        let warm_slices: Vec<_> = (0..=8).map(|m| warm.evaluate(m)).collect();
        assert_eq!(cold_slices, warm_slices);
        assert!(dir.path().join(cold.hash()).join("8.json").exists());
    }
}
