//! Finite posets stored as a strict-order bit matrix plus the Hasse diagram.

use std::fmt;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Human-readable point label. Algorithms only use dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    /// `(tag, level)`, e.g. a group element name and the level it sits on.
    Pair(String, u32),
    Name(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Pair(tag, level) => write!(f, "({tag}, {level})"),
            Label::Name(name) => f.write_str(name),
        }
    }
}

impl Label {
    pub fn pair(tag: impl Into<String>, level: u32) -> Self {
        Label::Pair(tag.into(), level)
    }
}

/// A finite poset.
///
/// `down[x]` holds `{y : y < x}` and `up[x]` holds `{y : y > x}`; cover lists are
/// sorted. All values are immutable after construction.
#[derive(Debug, Clone)]
pub struct Poset {
    labels: Vec<Label>,
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
    lower_covers: Vec<Vec<usize>>,
    upper_covers: Vec<Vec<usize>>,
    heights: Vec<usize>,
    redundant: Vec<(usize, usize)>,
}

impl PartialEq for Poset {
    /// Same labels in the same positions and the same order relation.
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.down == other.down
    }
}

impl Eq for Poset {}

/// JSON form: `{"points": [...], "covers": [[i, j], ...]}` with `i` covered by `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosetFile {
    pub points: Vec<Label>,
    pub covers: Vec<[usize; 2]>,
}

impl Poset {
    /// Builds a poset from declared relations `(i, j)` meaning `i < j`.
    ///
    /// The order is the transitive closure of the declared pairs. Pairs that are
    /// implied by others are dropped from the cover relation and reported by
    /// [`Poset::redundant_declared`].
    pub fn from_covers(labels: Vec<Label>, declared: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in declared {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::UnknownPoint { index: x, size: n });
                }
            }
            if a == b {
                return Err(Error::Cycle {
                    witness: vec![a, a],
                });
            }
            preds[b].push(a);
        }
        for p in &mut preds {
            p.sort_unstable();
            p.dedup();
        }
        let topo = topological_order(&preds).map_err(|witness| Error::Cycle { witness })?;

        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for &v in &topo {
            let mut set = FixedBitSet::with_capacity(n);
            for &u in &preds[v] {
                set.union_with(&down[u]);
                set.insert(u);
            }
            down[v] = set;
        }
        let mut lower_covers = vec![Vec::new(); n];
        let mut redundant = Vec::new();
        for v in 0..n {
            let mut implied = FixedBitSet::with_capacity(n);
            for &w in &preds[v] {
                implied.union_with(&down[w]);
            }
            for &u in &preds[v] {
                if implied.contains(u) {
                    redundant.push((u, v));
                } else {
                    lower_covers[v].push(u);
                }
            }
        }
        redundant.sort_unstable();
        Ok(Self::assemble(labels, down, lower_covers, redundant))
    }

    /// Builds a poset from its strict order: `down[x]` is the set of points below `x`.
    pub fn from_relation(labels: Vec<Label>, down: Vec<FixedBitSet>) -> Result<Self> {
        let n = labels.len();
        if down.len() != n {
            return Err(Error::Precondition(format!(
                "relation has {} rows for {n} points",
                down.len()
            )));
        }
        for (x, set) in down.iter().enumerate() {
            if set.len() != n {
                return Err(Error::Precondition(format!(
                    "row {x} has width {}",
                    set.len()
                )));
            }
            if set.contains(x) {
                return Err(Error::Cycle {
                    witness: vec![x, x],
                });
            }
            for y in set.ones() {
                if !down[y].is_subset(set) {
                    if down[y].contains(x) {
                        return Err(Error::Cycle {
                            witness: vec![x, y, x],
                        });
                    }
                    return Err(Error::Precondition(format!(
                        "relation is not transitive below point {x}"
                    )));
                }
            }
        }
        let mut lower_covers = vec![Vec::new(); n];
        for v in 0..n {
            let mut implied = FixedBitSet::with_capacity(n);
            for w in down[v].ones() {
                implied.union_with(&down[w]);
            }
            lower_covers[v] = down[v].difference(&implied).collect();
        }
        Ok(Self::assemble(labels, down, lower_covers, Vec::new()))
    }

    fn assemble(
        labels: Vec<Label>,
        down: Vec<FixedBitSet>,
        lower_covers: Vec<Vec<usize>>,
        redundant: Vec<(usize, usize)>,
    ) -> Self {
        let n = labels.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (x, set) in down.iter().enumerate() {
            for y in set.ones() {
                up[y].insert(x);
            }
        }
        let mut upper_covers = vec![Vec::new(); n];
        for (v, lows) in lower_covers.iter().enumerate() {
            for &u in lows {
                upper_covers[u].push(v);
            }
        }
        // A linear extension: strictly larger down-sets come later.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| down[x].count_ones(..));
        let mut heights = vec![0usize; n];
        for &v in &order {
            heights[v] = lower_covers[v]
                .iter()
                .map(|&u| heights[u] + 1)
                .max()
                .unwrap_or(0);
        }
        Self {
            labels,
            down,
            up,
            lower_covers,
            upper_covers,
            heights,
            redundant,
        }
    }

    /// The empty poset.
    pub fn empty() -> Self {
        Self::assemble(Vec::new(), Vec::new(), Vec::new(), Vec::new())
    }

    /// `n` pairwise incomparable points labeled `0..n`.
    pub fn antichain(n: usize) -> Self {
        let labels = (0..n as i64).map(Label::Int).collect();
        Self::from_covers(labels, &[]).expect("no relations")
    }

    /// The chain `0 < 1 < .. < n-1`.
    pub fn chain(n: usize) -> Self {
        let labels = (0..n as i64).map(Label::Int).collect();
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_covers(labels, &pairs).expect("chains are acyclic")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &Label {
        &self.labels[x]
    }

    /// Replaces the labels; the order is unchanged.
    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Precondition(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Index of the first point carrying `label`.
    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Strict comparison `x < y`.
    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.down[y].contains(x)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.lt(x, y) || self.lt(y, x)
    }

    pub(crate) fn down_bits(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    fn check(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownPoint {
                index: x,
                size: self.len(),
            })
        }
    }

    /// `{y : y < x}` in increasing index order.
    pub fn down_set(&self, x: usize) -> Result<Vec<usize>> {
        self.check(x)?;
        Ok(self.down[x].ones().collect())
    }

    /// `{y : y > x}` in increasing index order.
    pub fn up_set(&self, x: usize) -> Result<Vec<usize>> {
        self.check(x)?;
        Ok(self.up[x].ones().collect())
    }

    /// Length of the longest chain strictly below `x`.
    pub fn height(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.heights[x])
    }

    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    /// Largest point height, or `None` for the empty poset.
    pub fn max_height(&self) -> Option<usize> {
        self.heights.iter().copied().max()
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.lower_covers[x]
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.upper_covers[x]
    }

    /// All cover pairs `(x, y)` with `x` covered by `y`, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .lower_covers
            .iter()
            .enumerate()
            .flat_map(|(y, lows)| lows.iter().map(move |&x| (x, y)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn cover_count(&self) -> usize {
        self.lower_covers.iter().map(Vec::len).sum()
    }

    pub fn is_cover(&self, x: usize, y: usize) -> bool {
        self.lower_covers[y].binary_search(&x).is_ok()
    }

    /// Declared relations that were implied by others and therefore not covers.
    pub fn redundant_declared(&self) -> &[(usize, usize)] {
        &self.redundant
    }

    pub fn minimal_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.down[x].is_clear())
            .collect()
    }

    pub fn maximal_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.up[x].is_clear()).collect()
    }

    /// Two distinct points are adjacent when some point lies strictly below both.
    pub fn adjacent(&self, x: usize, y: usize) -> Result<bool> {
        self.check(x)?;
        self.check(y)?;
        if x == y {
            return Err(Error::Precondition(
                "adjacency needs two distinct points".into(),
            ));
        }
        Ok(!self.down[x].is_disjoint(&self.down[y]))
    }

    /// Whether every pair has a least upper bound and a greatest lower bound.
    pub fn is_lattice(&self) -> bool {
        let n = self.len();
        let le = |a: usize, b: usize| a == b || self.lt(a, b);
        let has_extremum = |candidates: Vec<usize>, below: bool| {
            candidates.iter().any(|&c| {
                candidates
                    .iter()
                    .all(|&d| if below { le(d, c) } else { le(c, d) })
            })
        };
        for a in 0..n {
            for b in 0..a {
                let lower: Vec<usize> = (0..n).filter(|&z| le(z, a) && le(z, b)).collect();
                let upper: Vec<usize> = (0..n).filter(|&z| le(a, z) && le(b, z)).collect();
                if !has_extremum(lower, true) || !has_extremum(upper, false) {
                    return false;
                }
            }
        }
        true
    }

    /// Ordinal sum: a disjoint copy of `self` placed entirely below a copy of `other`.
    pub fn ordinal_sum(&self, other: &Poset) -> Poset {
        let (n1, n2) = (self.len(), other.len());
        let n = n1 + n2;
        let mut down = Vec::with_capacity(n);
        for set in &self.down {
            let mut row = FixedBitSet::with_capacity(n);
            row.extend(set.ones());
            down.push(row);
        }
        for set in &other.down {
            let mut row = FixedBitSet::with_capacity(n);
            row.insert_range(0..n1);
            row.extend(set.ones().map(|y| y + n1));
            down.push(row);
        }
        let labels = self.labels.iter().chain(&other.labels).cloned().collect();
        Poset::from_relation(labels, down).expect("ordinal sums of posets are posets")
    }

    /// Adds a new least and a new greatest point (indices `0` and `len + 1`).
    pub fn bounded(&self) -> Poset {
        let n = self.len() + 2;
        let top = n - 1;
        let mut labels = Vec::with_capacity(n);
        labels.push(Label::Name("bottom".into()));
        labels.extend(self.labels.iter().cloned());
        labels.push(Label::Name("top".into()));
        let mut down = vec![FixedBitSet::with_capacity(n)];
        for set in &self.down {
            let mut row = FixedBitSet::with_capacity(n);
            row.insert(0);
            row.extend(set.ones().map(|y| y + 1));
            down.push(row);
        }
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(0..top);
        down.push(all);
        Poset::from_relation(labels, down).expect("bounding preserves the order axioms")
    }

    /// Order-isomorphism onto `other` (image of each point), if one exists.
    pub fn isomorphism_to(&self, other: &Poset) -> Option<Vec<usize>> {
        crate::aut::isomorphism(self, other)
    }

    /// Image of the order under a point bijection: point `x` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> Poset {
        let n = self.len();
        let mut labels = vec![Label::Int(0); n];
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for x in 0..n {
            labels[perm[x]] = self.labels[x].clone();
            down[perm[x]].extend(self.down[x].ones().map(|y| perm[y]));
        }
        Poset::from_relation(labels, down).expect("relabeling preserves the order axioms")
    }

    /// Whether `perm` maps the order onto itself in both directions.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        let n = self.len();
        if perm.len() != n || !is_permutation(perm) {
            return false;
        }
        // A bijection sending covers to covers permutes the finite cover set.
        (0..n).all(|y| {
            self.lower_covers[y]
                .iter()
                .all(|&x| self.is_cover(perm[x], perm[y]))
        })
    }

    pub fn to_file(&self) -> PosetFile {
        PosetFile {
            points: self.labels.clone(),
            covers: self.covers().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn from_file(file: &PosetFile) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = file.covers.iter().map(|&[a, b]| (a, b)).collect();
        Self::from_covers(file.points.clone(), &pairs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("poset JSON serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PosetFile = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "poset".into(),
            source,
        })?;
        Self::from_file(&file)
    }

    /// 64-bit FNV-1a digest of the point count and sorted cover pairs.
    pub fn structure_hash(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write(self.len() as u64);
        for (a, b) in self.covers() {
            h.write(a as u64);
            h.write(b as u64);
        }
        h.finish()
    }

    /// Graphviz rendering of the Hasse diagram, bottom-up, one rank per height.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
        for (x, label) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "  p{x} [label=\"{}\"];", escape(&label.to_string()));
        }
        if let Some(top) = self.max_height() {
            for h in 0..=top {
                let members: Vec<String> = (0..self.len())
                    .filter(|&x| self.heights[x] == h)
                    .map(|x| format!("p{x}"))
                    .collect();
                let _ = writeln!(out, "  {{ rank=same; {}; }}", members.join("; "));
            }
        }
        for (a, b) in self.covers() {
            let _ = writeln!(out, "  p{a} -> p{b} [arrowhead=none];");
        }
        out.push_str("}\n");
        out
    }
}

/// A simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// JSON form: `{"n": 4, "edges": [[0, 1], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    /// Validates and normalizes the edges to `(min, max)` in sorted order.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::Graph(format!("loop at vertex {u}")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        let before = norm.len();
        norm.dedup();
        if norm.len() != before {
            return Err(Error::Graph("repeated edge".into()));
        }
        Ok(Self { n, edges: norm })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "graph".into(),
            source,
        })?;
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|&[u, v]| (u, v)).collect();
        Self::new(file.n, &edges)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }

    /// Face poset: vertices at level 0, each edge directly above its two endpoints.
    pub fn face_poset(&self) -> Poset {
        let mut labels: Vec<Label> = (0..self.n).map(|v| Label::pair(v.to_string(), 0)).collect();
        let mut pairs = Vec::with_capacity(2 * self.edges.len());
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            labels.push(Label::pair(format!("{u}-{v}"), 1));
            let e = self.n + i;
            pairs.push((u, e));
            pairs.push((v, e));
        }
        Poset::from_covers(labels, &pairs).expect("face posets have height at most one")
    }
}

pub(crate) fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter()
        .all(|&x| x < seen.len() && !std::mem::replace(&mut seen[x], true))
}

/// Kahn's algorithm over predecessor lists; on failure returns a witness cycle.
fn topological_order(preds: &[Vec<usize>]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = preds.len();
    let mut succs = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (v, ps) in preds.iter().enumerate() {
        indegree[v] = ps.len();
        for &u in ps {
            succs[u].push(v);
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = queue.pop() {
        order.push(u);
        for &v in &succs[u] {
            indegree[v] -= 1;
            if indegree[v] == 0 {
                queue.push(v);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every leftover vertex has a leftover predecessor: walk back until a repeat.
    let start = (0..n).find(|&v| indegree[v] > 0).expect("leftover vertex");
    let mut pos = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = start;
    while pos[v] == usize::MAX {
        pos[v] = path.len();
        path.push(v);
        v = *preds[v]
            .iter()
            .find(|&&u| indegree[u] > 0)
            .expect("leftover predecessor");
    }
    let mut cycle: Vec<usize> = path[pos[v]..].to_vec();
    cycle.reverse();
    cycle.push(cycle[0]);
    Err(cycle)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub(crate) struct Fnv64(u64);

impl Fnv64 {
    pub(crate) fn new() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write(&mut self, value: u64) {
        for byte in value.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crown(n: usize) -> Poset {
        crate::constructions::crown(n).unwrap()
    }

    fn idx(p: &Poset, tag: usize, level: u32) -> usize {
        p.index_of(&Label::pair(tag.to_string(), level)).unwrap()
    }

    /// Longest path to `x` in the Hasse DAG by exhaustive recursion.
    fn longest_chain_below(p: &Poset, x: usize) -> usize {
        p.lower_covers(x)
            .iter()
            .map(|&y| 1 + longest_chain_below(p, y))
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn chain_closure_and_covers() {
        let labels: Vec<Label> = (0..3).map(Label::Int).collect();
        let p = Poset::from_covers(labels.clone(), &[(0, 1), (1, 2)]).unwrap();
        assert!(p.lt(0, 2));
        assert_eq!(p.covers(), vec![(0, 1), (1, 2)]);
        assert!(p.redundant_declared().is_empty());

        let q = Poset::from_covers(labels.clone(), &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(q, p);
        assert_eq!(q.redundant_declared(), &[(0, 2)]);

        match Poset::from_covers(labels[..2].to_vec(), &[(0, 1), (1, 0)]) {
            Err(Error::Cycle { witness }) => {
                assert_eq!(witness.first(), witness.last());
                assert_eq!(witness.len(), 3);
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn cycle_witness_is_a_real_cycle() {
        let labels: Vec<Label> = (0..5).map(Label::Int).collect();
        let pairs = [(0, 1), (1, 2), (2, 3), (3, 1), (3, 4)];
        let Err(Error::Cycle { witness }) = Poset::from_covers(labels, &pairs) else {
            panic!("cycle expected");
        };
        for w in witness.windows(2) {
            assert!(pairs.contains(&(w[0], w[1])), "{witness:?}");
        }
    }

    #[test]
    fn heights() {
        let c = Poset::chain(4);
        assert_eq!(c.height(3).unwrap(), 3);
        let a = Poset::antichain(3);
        assert!((0..3).all(|x| a.height(x).unwrap() == 0));
        let cr = crown(3);
        for i in 0..3 {
            let top = idx(&cr, i, 1);
            assert_eq!(cr.height(top).unwrap(), longest_chain_below(&cr, top));
            assert_eq!(cr.height(top).unwrap(), 1);
        }
        assert!(matches!(c.height(9), Err(Error::UnknownPoint { .. })));
    }

    #[test]
    fn down_and_up_sets() {
        let c = Poset::chain(3);
        assert_eq!(c.down_set(2).unwrap(), vec![0, 1]);
        assert!(c.down_set(0).unwrap().is_empty());
        let cr = crown(3);
        let up: Vec<usize> = cr.up_set(idx(&cr, 0, 0)).unwrap();
        let mut expected = vec![idx(&cr, 0, 1), idx(&cr, 1, 1)];
        expected.sort_unstable();
        assert_eq!(up, expected);
    }

    #[test]
    fn adjacency() {
        let cr = crown(4);
        assert!(cr.adjacent(idx(&cr, 0, 1), idx(&cr, 1, 1)).unwrap());
        assert!(!cr.adjacent(idx(&cr, 0, 1), idx(&cr, 2, 1)).unwrap());
        assert!(!cr.adjacent(idx(&cr, 0, 0), idx(&cr, 1, 0)).unwrap());
        assert!(cr.adjacent(0, 0).is_err());
        assert!(cr.adjacent(0, 99).is_err());
    }

    #[test]
    fn ordinal_sums() {
        let c4 = Poset::chain(2).ordinal_sum(&Poset::chain(2));
        assert!(c4.isomorphism_to(&Poset::chain(4)).is_some());
        let k22 = Poset::antichain(2).ordinal_sum(&Poset::antichain(2));
        assert_eq!(k22.len(), 4);
        assert_eq!(k22.covers(), vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        let sc = crate::constructions::subdivided_crown(3).unwrap().poset;
        let sum = sc.ordinal_sum(&sc);
        assert_eq!(sum.len(), 18);
        assert_eq!(sum.max_height(), Some(5));
    }

    #[test]
    fn face_posets() {
        let edge = Graph::new(2, &[(0, 1)]).unwrap().face_poset();
        assert_eq!(edge.len(), 3);
        assert_eq!(edge.lower_covers(2), &[0, 1]);
        let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)])
            .unwrap()
            .face_poset();
        assert_eq!(k3.len(), 6);
        for x in 0..3 {
            assert_eq!(k3.upper_covers(x).len(), 2);
            assert_eq!(k3.lower_covers(x + 3).len(), 2);
        }
        let empty = Graph::new(3, &[]).unwrap().face_poset();
        assert_eq!(empty.cover_count(), 0);
        assert!(Graph::new(2, &[(0, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn bounded_posets() {
        let diamond = Poset::antichain(2).bounded();
        assert_eq!(diamond.len(), 4);
        assert!(diamond.is_lattice());
        assert_eq!(diamond.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        let two = Poset::empty().bounded();
        assert!(two.isomorphism_to(&Poset::chain(2)).is_some());
        let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)])
            .unwrap()
            .face_poset()
            .bounded();
        assert_eq!(k3.len(), 8);
        assert!(k3.is_lattice());
        assert!(!Poset::antichain(2).is_lattice());
    }

    #[test]
    fn json_and_dot() {
        let cr = crown(3);
        let back = Poset::from_json(&cr.to_json()).unwrap();
        assert_eq!(back, cr);
        assert_eq!(back.structure_hash(), cr.structure_hash());
        let dot = cr.to_dot("crown3");
        assert!(dot.starts_with("digraph \"crown3\" {"));
        assert_eq!(dot.matches("rank=same").count(), 2);
        assert_eq!(dot.matches("->").count(), 6);
        let mixed: PosetFile =
            serde_json::from_str(r#"{"points": [1, ["a", 2], "x"], "covers": [[0, 1]]}"#).unwrap();
        assert_eq!(mixed.points[1], Label::pair("a", 2));
        assert_eq!(mixed.points[2], Label::Name("x".into()));
    }

    #[test]
    fn relation_validation() {
        let mut down = vec![FixedBitSet::with_capacity(3); 3];
        down[1].insert(0);
        down[2].insert(1);
        let labels: Vec<Label> = (0..3).map(Label::Int).collect();
        assert!(Poset::from_relation(labels.clone(), down.clone()).is_err());
        down[2].insert(0);
        let p = Poset::from_relation(labels, down).unwrap();
        assert_eq!(p.covers(), vec![(0, 1), (1, 2)]);
    }
}
