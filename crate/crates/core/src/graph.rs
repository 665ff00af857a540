//! Weighted dual graphs of reduced snc divisors.
//!
//! Vertices are components (weight = self-intersection), edges are intersection
//! points. Every component is implicitly a smooth rational curve.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, Rational};

#[derive(Clone, Debug, Default)]
pub struct DualGraph {
    ids: Vec<String>,
    weights: Vec<i64>,
    index: HashMap<String, usize>,
    adj: Vec<BTreeSet<usize>>,
}

impl PartialEq for DualGraph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.weights == other.weights && self.adj == other.adj
    }
}

impl Eq for DualGraph {}

impl DualGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from `(id, weight)` pairs and edges.
    pub fn from_parts<S: AsRef<str>>(vertices: &[(S, i64)], edges: &[(S, S)]) -> Result<Self> {
        let mut g = DualGraph::new();
        for (id, w) in vertices {
            g.add_vertex(id.as_ref(), *w)?;
        }
        for (a, b) in edges {
            g.add_edge(a.as_ref(), b.as_ref())?;
        }
        Ok(g)
    }

    /// A chain with the given self-intersections, vertex ids `prefix1..prefixN`.
    pub fn chain_from_weights(prefix: &str, weights: &[i64]) -> Self {
        let mut g = DualGraph::new();
        for (i, &w) in weights.iter().enumerate() {
            g.add_vertex(&format!("{prefix}{}", i + 1), w).expect("fresh ids");
            if i > 0 {
                g.add_edge_idx(i - 1, i);
            }
        }
        g
    }

    pub fn add_vertex(&mut self, id: &str, weight: i64) -> Result<usize> {
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::Geometry(format!("invalid vertex id `{id}`")));
        }
        if self.index.contains_key(id) {
            return Err(Error::Geometry(format!("duplicate vertex id `{id}`")));
        }
        let i = self.ids.len();
        self.ids.push(id.to_string());
        self.weights.push(weight);
        self.adj.push(BTreeSet::new());
        self.index.insert(id.to_string(), i);
        Ok(i)
    }

    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        if i == j {
            return Err(Error::Geometry(format!("self-loop at `{a}`")));
        }
        if self.adj[i].contains(&j) {
            return Err(Error::Geometry(format!("double edge `{a}`-`{b}`")));
        }
        self.add_edge_idx(i, j);
        Ok(())
    }

    fn add_edge_idx(&mut self, i: usize, j: usize) {
        self.adj[i].insert(j);
        self.adj[j].insert(i);
    }

    pub(crate) fn remove_edge_idx(&mut self, i: usize, j: usize) {
        self.adj[i].remove(&j);
        self.adj[j].remove(&i);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn idx(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn weight(&self, id: &str) -> Result<i64> {
        Ok(self.weights[self.idx(id)?])
    }

    pub fn weight_at(&self, i: usize) -> i64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn set_weight(&mut self, id: &str, w: i64) -> Result<()> {
        let i = self.idx(id)?;
        self.weights[i] = w;
        Ok(())
    }

    pub(crate) fn neighbors_idx(&self, i: usize) -> &BTreeSet<usize> {
        &self.adj[i]
    }

    pub fn neighbors(&self, id: &str) -> Result<Vec<&str>> {
        let i = self.idx(id)?;
        Ok(self.adj[i].iter().map(|&j| self.ids[j].as_str()).collect())
    }

    pub fn adjacent(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.adj[self.idx(a)?].contains(&self.idx(b)?))
    }

    /// `D_i . (D - D_i)`: the degree of `id`.
    pub fn branching_number(&self, id: &str) -> Result<usize> {
        Ok(self.adj[self.idx(id)?].len())
    }

    pub fn degree_idx(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(a, b)` with `a < b`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(i, ns)| ns.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
            .map(|(i, j)| {
                let (a, b) = (self.ids[i].clone(), self.ids[j].clone());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        out.sort();
        out
    }

    /// Intersection matrix `Q` restricted to `support`, in the given order.
    pub fn intersection_matrix_on(&self, support: &[usize]) -> IntMatrix {
        IntMatrix::from_fn(support.len(), support.len(), |a, b| {
            let (i, j) = (support[a], support[b]);
            if i == j {
                BigInt::from(self.weights[i])
            } else if self.adj[i].contains(&j) {
                BigInt::from(1)
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn intersection_matrix(&self) -> IntMatrix {
        let all: Vec<usize> = (0..self.len()).collect();
        self.intersection_matrix_on(&all)
    }

    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter().map(|s| self.idx(s.as_ref())).collect()
    }

    /// Subgraph induced on `support`, keeping the graph's vertex order.
    pub fn induced<S: AsRef<str>>(&self, support: &[S]) -> Result<DualGraph> {
        let keep: BTreeSet<usize> = self.indices_of(support)?.into_iter().collect();
        Ok(self.induced_idx(&keep))
    }

    pub(crate) fn induced_idx(&self, keep: &BTreeSet<usize>) -> DualGraph {
        let mut g = DualGraph::new();
        let mut map = HashMap::new();
        for &i in keep {
            map.insert(i, g.add_vertex(&self.ids[i], self.weights[i]).expect("distinct"));
        }
        for &i in keep {
            for &j in &self.adj[i] {
                if j > i {
                    if let Some(&nj) = map.get(&j) {
                        g.add_edge_idx(map[&i], nj);
                    }
                }
            }
        }
        g
    }

    /// Copy of the graph without vertex `id`.
    pub fn without(&self, id: &str) -> Result<DualGraph> {
        let skip = self.idx(id)?;
        let keep: BTreeSet<usize> = (0..self.len()).filter(|&i| i != skip).collect();
        Ok(self.induced_idx(&keep))
    }

    /// Connected components as sorted index lists, ordered by smallest index.
    pub fn components_idx(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![];
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<DualGraph> {
        self.components_idx().into_iter().map(|c| self.induced_idx(&c.into_iter().collect())).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components_idx().len() <= 1
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components_idx().len() == self.len()
    }

    pub fn is_tree(&self) -> bool {
        !self.is_empty() && self.is_connected() && self.is_forest()
    }

    /// Connected, acyclic and no vertex of branching number above two.
    pub fn is_chain(&self) -> bool {
        self.is_tree() && self.adj.iter().all(|n| n.len() <= 2)
    }

    /// The graph read as a chain, starting at its first tip in vertex order.
    pub fn as_chain(&self) -> Option<Chain> {
        if !self.is_chain() {
            return None;
        }
        let start = (0..self.len()).find(|&i| self.adj[i].len() <= 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = self.adj[cur].iter().find(|&&n| n != prev) {
            order.push(next);
            prev = cur;
            cur = next;
        }
        Some(Chain::from_indices(self, order))
    }

    /// Vertices of branching number at least three.
    pub fn branching_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.adj[i].len() >= 3).collect()
    }

    /// Maximal twigs: from each tip, the chain up to (not including) the first
    /// branching vertex. Tips come first in each chain; tips are taken in vertex order.
    pub fn maximal_twigs(&self) -> Result<Vec<Chain>> {
        if !self.is_forest() {
            return Err(Error::NotATree("graph contains a cycle".into()));
        }
        if self.is_chain() {
            return Err(Error::IsChain);
        }
        let mut out = Vec::new();
        for comp in self.components_idx() {
            if comp.iter().all(|&i| self.adj[i].len() <= 2) {
                continue;
            }
            for &tip in comp.iter().filter(|&&i| self.adj[i].len() == 1) {
                let mut order = vec![tip];
                let mut prev = tip;
                let mut cur = *self.adj[tip].iter().next().expect("tip has a neighbour");
                while self.adj[cur].len() <= 2 {
                    order.push(cur);
                    let next = *self.adj[cur]
                        .iter()
                        .find(|&&n| n != prev)
                        .expect("non-chain component reaches a branching vertex");
                    prev = cur;
                    cur = next;
                }
                out.push(Chain::from_indices(self, order));
            }
        }
        Ok(out)
    }

    /// Parses the line-based graph format (`vertex <id> w=<int>`, `edge <a> <b>`, `#` comments).
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = DualGraph::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.as_slice() {
                ["vertex", id, w] => {
                    let weight = w
                        .strip_prefix("w=")
                        .ok_or_else(|| Error::parse(line_no, format!("expected w=<int>, got `{w}`")))?
                        .parse::<i64>()
                        .map_err(|e| Error::parse(line_no, format!("bad weight: {e}")))?;
                    g.add_vertex(id, weight).map_err(|e| Error::parse(line_no, e.to_string()))?;
                }
                ["edge", a, b] => g.add_edge(a, b).map_err(|e| Error::parse(line_no, e.to_string()))?,
                _ => return Err(Error::parse(line_no, format!("malformed line `{line}`"))),
            }
        }
        Ok(g)
    }

    /// Deterministic text form: vertices in order, then edges lexicographically.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for (id, w) in self.ids.iter().zip(&self.weights) {
            writeln!(s, "vertex {id} w={w}").unwrap();
        }
        for (a, b) in self.edges() {
            writeln!(s, "edge {a} {b}").unwrap();
        }
        s
    }

    /// Undirected DOT rendering; labels show the id and the weight.
    pub fn emit_dot(&self) -> String {
        let mut s = String::from("graph dual {\n");
        for (id, w) in self.ids.iter().zip(&self.weights) {
            writeln!(s, "  \"{id}\" [label=\"{id}\\n{w}\"];").unwrap();
        }
        for (a, b) in self.edges() {
            writeln!(s, "  \"{a}\" -- \"{b}\";").unwrap();
        }
        s.push_str("}\n");
        s
    }

    /// Canonical string of the weighted graph up to isomorphism (trees only;
    /// other graphs fall back to the labelled serialization).
    pub fn canonical_form(&self) -> String {
        if !self.is_forest() {
            return self.serialize();
        }
        let mut parts: Vec<String> = self.components_idx().iter().map(|c| self.canonical_tree(c)).collect();
        parts.sort();
        parts.join("|")
    }

    fn canonical_tree(&self, comp: &[usize]) -> String {
        // Root at the centre(s) of the tree and take the smallest encoding.
        let centers = self.tree_centers(comp);
        centers.iter().map(|&c| self.encode_rooted(c, usize::MAX)).min().unwrap_or_default()
    }

    fn tree_centers(&self, comp: &[usize]) -> Vec<usize> {
        if comp.len() <= 2 {
            return comp.to_vec();
        }
        let mut deg: HashMap<usize, usize> = comp.iter().map(|&i| (i, self.adj[i].len())).collect();
        let mut leaves: Vec<usize> = comp.iter().copied().filter(|i| deg[i] <= 1).collect();
        let mut remaining = comp.len();
        while remaining > 2 {
            remaining -= leaves.len();
            let mut next = vec![];
            for &l in &leaves {
                for &n in &self.adj[l] {
                    let d = deg.get_mut(&n).expect("same component");
                    if *d > 0 {
                        *d -= 1;
                        if *d == 1 {
                            next.push(n);
                        }
                    }
                }
                deg.insert(l, 0);
            }
            leaves = next;
        }
        leaves
    }

    fn encode_rooted(&self, v: usize, parent: usize) -> String {
        let mut kids: Vec<String> =
            self.adj[v].iter().filter(|&&n| n != parent).map(|&n| self.encode_rooted(n, v)).collect();
        kids.sort();
        format!("({}{})", self.weights[v], kids.concat())
    }
}

impl fmt::Display for DualGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// An ordered rational chain: consecutive entries adjacent, others not.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    ids: Vec<String>,
    weights: Vec<i64>,
}

impl Chain {
    fn from_indices(g: &DualGraph, order: Vec<usize>) -> Self {
        Chain {
            ids: order.iter().map(|&i| g.ids[i].clone()).collect(),
            weights: order.iter().map(|&i| g.weights[i]).collect(),
        }
    }

    /// Validates that `ids` form a chain in `g` in the given order.
    pub fn in_graph<S: AsRef<str>>(g: &DualGraph, ids: &[S]) -> Result<Self> {
        let idx = g.indices_of(ids)?;
        let set: BTreeSet<usize> = idx.iter().copied().collect();
        if set.len() != idx.len() {
            return Err(Error::Geometry("repeated vertex in chain".into()));
        }
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                let adjacent = g.adj[idx[a]].contains(&idx[b]);
                if adjacent != (b == a + 1) {
                    return Err(Error::Geometry(format!(
                        "`{}` and `{}` break the chain order",
                        g.ids[idx[a]], g.ids[idx[b]]
                    )));
                }
            }
        }
        Ok(Chain::from_indices(g, idx))
    }

    /// A free-standing chain in bracket notation: `[2,2,2]` means three (-2)-curves.
    pub fn from_bracket(bracket: &[i64]) -> Self {
        Chain {
            ids: (1..=bracket.len()).map(|i| format!("R{i}")).collect(),
            weights: bracket.iter().map(|b| -b).collect(),
        }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Raw self-intersections, tip first.
    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Bracket notation `[-R_1^2, ..., -R_r^2]`.
    pub fn bracket(&self) -> Vec<i64> {
        self.weights.iter().map(|w| -w).collect()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn tip(&self) -> Option<&str> {
        self.ids.first().map(String::as_str)
    }

    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        c.ids.reverse();
        c.weights.reverse();
        c
    }

    /// All weights at most -2.
    pub fn is_admissible(&self) -> bool {
        !self.is_empty() && self.weights.iter().all(|&w| w <= -2)
    }

    /// Same chain with the first `k` components dropped.
    pub fn drop_first(&self, k: usize) -> Self {
        Chain {
            ids: self.ids[k.min(self.len())..].to_vec(),
            weights: self.weights[k.min(self.len())..].to_vec(),
        }
    }

    pub fn intersection_matrix(&self) -> IntMatrix {
        let n = self.len();
        IntMatrix::from_fn(n, n, |i, j| {
            if i == j {
                BigInt::from(self.weights[i])
            } else if i.abs_diff(j) == 1 {
                BigInt::from(1)
            } else {
                BigInt::zero()
            }
        })
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bracket().iter().map(i64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A rational combination of components of a graph; zero coefficients are dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QDivisor {
    coeffs: BTreeMap<String, Rational>,
}

impl QDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(g: &DualGraph, entries: impl IntoIterator<Item = (String, Rational)>) -> Result<Self> {
        let mut d = QDivisor::zero();
        for (id, c) in entries {
            g.idx(&id)?;
            d.add(&id, &c);
        }
        Ok(d)
    }

    /// The reduced divisor: every vertex of `g` with coefficient one.
    pub fn reduced(g: &DualGraph) -> Self {
        let one = Rational::from_integer(1.into());
        QDivisor { coeffs: g.ids().iter().map(|id| (id.clone(), one.clone())).collect() }
    }

    pub fn add(&mut self, id: &str, c: &Rational) {
        let entry = self.coeffs.entry(id.to_string()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(id);
        }
    }

    pub fn coefficient(&self, id: &str) -> Rational {
        self.coeffs.get(id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<&str> {
        self.coeffs.keys().map(String::as_str).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.coeffs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn sub(&self, other: &QDivisor) -> QDivisor {
        let mut out = self.clone();
        for (id, c) in other.iter() {
            out.add(id, &-c.clone());
        }
        out
    }

    /// Intersection number with the component `id` of `g`.
    pub fn dot_component(&self, g: &DualGraph, id: &str) -> Result<Rational> {
        let i = g.idx(id)?;
        let mut acc = Rational::zero();
        for (k, c) in self.iter() {
            let j = g.idx(k)?;
            if i == j {
                acc += c * Rational::from_integer(g.weight_at(i).into());
            } else if g.neighbors_idx(i).contains(&j) {
                acc += c;
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for QDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(k, v)| format!("{v}*{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::fork;
    use super::*;

    pub(crate) fn x_graph() -> DualGraph {
        DualGraph::parse(
            "vertex c w=-1\nvertex a w=-2\nvertex b w=-2\nvertex d w=-2\nvertex e w=-2\n\
             edge c a\nedge c b\nedge c d\nedge c e\n",
        )
        .unwrap()
    }

    #[test]
    fn parse_examples() {
        let g = DualGraph::parse("vertex b w=-1\nvertex t w=-2\nedge b t\n").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.weights(), &[-1, -2]);
        let x = x_graph();
        assert_eq!((x.len(), x.edge_count()), (5, 4));
        let empty = DualGraph::parse("# nothing here\n\n").unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dup = DualGraph::parse("vertex a w=-1\nvertex a w=-2\n");
        assert!(matches!(dup, Err(Error::Parse { line: 2, .. })));
        let dangling = DualGraph::parse("vertex a w=-1\nedge a b\n");
        assert!(matches!(dangling, Err(Error::Parse { line: 2, .. })));
        let loop_ = DualGraph::parse("vertex a w=-1\n\nedge a a\n");
        assert!(matches!(loop_, Err(Error::Parse { line: 3, .. })));
        let double = DualGraph::parse("vertex a w=-1\nvertex b w=0\nedge a b\nedge b a\n");
        assert!(matches!(double, Err(Error::Parse { line: 4, .. })));
        let junk = DualGraph::parse("vertex a weight=3\n");
        assert!(matches!(junk, Err(Error::Parse { line: 1, .. })));
        let junk = DualGraph::parse("curve a\n");
        assert!(matches!(junk, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn serialize_round_trip_and_edge_order() {
        let g = DualGraph::parse("vertex z w=0\nvertex a w=-3\nvertex m w=2\nedge m z\nedge z a\n").unwrap();
        let text = g.serialize();
        assert_eq!(text, "vertex z w=0\nvertex a w=-3\nvertex m w=2\nedge a z\nedge m z\n");
        assert_eq!(DualGraph::parse(&text).unwrap(), g);
    }

    #[test]
    fn branching_numbers() {
        let g = DualGraph::parse("vertex v w=-2\n").unwrap();
        assert_eq!(g.branching_number("v").unwrap(), 0);
        assert_eq!(x_graph().branching_number("c").unwrap(), 4);
        let c = DualGraph::chain_from_weights("R", &[-2, -2, -2]);
        assert_eq!(c.branching_number("R2").unwrap(), 2);
        assert!(matches!(c.branching_number("nope"), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn twigs_of_case_forks() {
        let g = fork(-1, &[&[2], &[2, 2, 2], &[2, 2, 2]]);
        let twigs = g.maximal_twigs().unwrap();
        let brackets: Vec<Vec<i64>> = twigs.iter().map(Chain::bracket).collect();
        assert_eq!(brackets, vec![vec![2], vec![2, 2, 2], vec![2, 2, 2]]);
        assert_eq!(twigs[1].ids(), &["T2_1", "T2_2", "T2_3"]);

        let g = fork(-1, &[&[2, 2], &[2, 2], &[2, 2]]);
        assert!(g.maximal_twigs().unwrap().iter().all(|t| t.len() == 2));

        let x = x_graph().maximal_twigs().unwrap();
        assert_eq!(x.len(), 4);
        assert!(x.iter().all(|t| t.bracket() == vec![2]));
    }

    #[test]
    fn twigs_reject_chains_and_cycles() {
        let c = DualGraph::chain_from_weights("R", &[-2, -1, -2]);
        assert_eq!(c.maximal_twigs(), Err(Error::IsChain));
        let mut cyc = DualGraph::chain_from_weights("R", &[-2, -2, -2]);
        cyc.add_edge("R1", "R3").unwrap();
        assert!(matches!(cyc.maximal_twigs(), Err(Error::NotATree(_))));
    }

    #[test]
    fn dot_output() {
        assert_eq!(DualGraph::new().emit_dot(), "graph dual {\n}\n");
        let c = DualGraph::chain_from_weights("R", &[-2, -1, -2]);
        let dot = c.emit_dot();
        assert_eq!(dot.matches("label=").count(), 3);
        assert_eq!(dot.matches(" -- ").count(), 2);
        assert!(dot.contains("\"R2\" [label=\"R2\\n-1\"];"));
    }

    #[test]
    fn chain_validation() {
        let g = DualGraph::chain_from_weights("R", &[-3, -2]);
        assert!(Chain::in_graph(&g, &["R1", "R2"]).is_ok());
        let g3 = DualGraph::chain_from_weights("R", &[-3, -2, -2]);
        assert!(Chain::in_graph(&g3, &["R1", "R3"]).is_err());
        let ch = g3.as_chain().unwrap();
        assert_eq!(ch.to_string(), "[3,2,2]");
        assert_eq!(ch.reversed().to_string(), "[2,2,3]");
    }

    #[test]
    fn canonical_form_ignores_labels() {
        let a = fork(-1, &[&[2], &[3, 2]]);
        let b = DualGraph::from_parts(
            &[("x", -2), ("y", -3), ("z", -2), ("w", -1)],
            &[("w", "x"), ("y", "w"), ("y", "z")],
        )
        .unwrap();
        // a: B(-1)-T1_1(-2), B-T2_2(-2)-T2_1(-3); b: w(-1)-x(-2), w-y(-3)-z(-2)
        assert_ne!(a.canonical_form(), b.canonical_form());
        let c = DualGraph::from_parts(
            &[("p", -3), ("q", -2), ("r", -1), ("s", -2)],
            &[("p", "q"), ("q", "r"), ("r", "s")],
        )
        .unwrap();
        assert_eq!(a.canonical_form(), c.canonical_form());
    }

    #[test]
    fn qdivisor_dot() {
        let g = DualGraph::chain_from_weights("R", &[-2, -1, -2]);
        let f = QDivisor::new(
            &g,
            [("R1", 1), ("R2", 2), ("R3", 1)].map(|(k, v)| (k.to_string(), Rational::from_integer(v.into()))),
        )
        .unwrap();
        for id in ["R1", "R2", "R3"] {
            assert!(f.dot_component(&g, id).unwrap().is_zero());
        }
        assert!(QDivisor::new(&g, [("X".to_string(), Rational::zero())]).is_err());
    }
}
