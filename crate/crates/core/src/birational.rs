//! Blow-ups and blow-downs on dual graphs, and singular fibers of rulings.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::linalg::integer_kernel;

/// Blow-up center: a point on one component (sprouting) or the intersection
/// point of two components (subdivisional).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Center {
    Vertex(String),
    Edge(String, String),
}

impl Center {
    pub fn vertex(id: &str) -> Self {
        Center::Vertex(id.to_string())
    }

    pub fn edge(a: &str, b: &str) -> Self {
        Center::Edge(a.to_string(), b.to_string())
    }
}

fn fresh_id(g: &DualGraph) -> String {
    (1..).map(|k| format!("E{k}")).find(|id| !g.contains(id)).expect("unbounded")
}

/// Blows up `center`, naming the new (-1)-vertex `E<k>` with the least free `k`.
pub fn blowup_graph(g: &DualGraph, center: &Center) -> Result<DualGraph> {
    blowup_graph_named(g, center, &fresh_id(g))
}

pub fn blowup_graph_named(g: &DualGraph, center: &Center, new_id: &str) -> Result<DualGraph> {
    let mut out = g.clone();
    match center {
        Center::Vertex(v) => {
            let w = g.weight(v).map_err(|_| Error::InvalidCenter(format!("unknown vertex `{v}`")))?;
            out.add_vertex(new_id, -1)?;
            out.add_edge(new_id, v)?;
            out.set_weight(v, w - 1)?;
        }
        Center::Edge(a, b) => {
            let (i, j) = match (g.idx(a), g.idx(b)) {
                (Ok(i), Ok(j)) => (i, j),
                _ => return Err(Error::InvalidCenter(format!("unknown edge `{a}`-`{b}`"))),
            };
            if !g.neighbors_idx(i).contains(&j) {
                return Err(Error::InvalidCenter(format!("`{a}` and `{b}` do not meet")));
            }
            out.remove_edge_idx(i, j);
            out.add_vertex(new_id, -1)?;
            out.add_edge(new_id, a)?;
            out.add_edge(new_id, b)?;
            out.set_weight(a, g.weight_at(i) - 1)?;
            out.set_weight(b, g.weight_at(j) - 1)?;
        }
    }
    Ok(out)
}

/// Contracts a (-1)-vertex meeting at most two others.
pub fn contract_minus_one(g: &DualGraph, v: &str) -> Result<DualGraph> {
    let i = g.idx(v)?;
    let fail = |reason: &str| Error::Contraction { vertex: v.to_string(), reason: reason.to_string() };
    if g.weight_at(i) != -1 {
        return Err(fail(&format!("weight is {}, not -1", g.weight_at(i))));
    }
    let nbrs: Vec<String> = g.neighbors(v)?.into_iter().map(str::to_string).collect();
    if nbrs.len() > 2 {
        return Err(fail("branching number above two; the image would not be snc"));
    }
    let mut out = g.without(v)?;
    for n in &nbrs {
        out.set_weight(n, out.weight(n)? + 1)?;
    }
    if let [a, b] = nbrs.as_slice() {
        out.add_edge(a, b).map_err(|_| fail("neighbours already meet; the image would not be snc"))?;
    }
    Ok(out)
}

/// One blow-down: the contracted vertex and its neighbours at that moment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionStep {
    pub vertex: String,
    pub neighbors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberCheck {
    pub valid: bool,
    pub trace: Vec<ContractionStep>,
}

fn is_zero_curve(g: &DualGraph) -> bool {
    g.len() == 1 && g.weight_at(0) == 0
}

fn fiber_search(g: &DualGraph, dead: &mut HashSet<String>, trace: &mut Vec<ContractionStep>) -> bool {
    if is_zero_curve(g) {
        return true;
    }
    for i in 0..g.len() {
        if g.weight_at(i) != -1 || g.degree_idx(i) > 2 {
            continue;
        }
        let Ok(next) = contract_minus_one(g, g.id(i)) else {
            continue;
        };
        let key = next.canonical_form();
        if dead.contains(&key) {
            continue;
        }
        trace.push(ContractionStep {
            vertex: g.id(i).to_string(),
            neighbors: g.neighbors_idx(i).iter().map(|&j| g.id(j).to_string()).collect(),
        });
        if fiber_search(&next, dead, trace) {
            return true;
        }
        trace.pop();
        dead.insert(key);
    }
    false
}

/// Whether successive blow-downs of (-1)-curves reduce `g` to a single 0-curve.
pub fn is_valid_fiber(g: &DualGraph) -> FiberCheck {
    let mut trace = Vec::new();
    let valid = g.is_tree() && fiber_search(g, &mut HashSet::new(), &mut trace);
    if !valid {
        trace.clear();
    }
    FiberCheck { valid, trace }
}

/// A fiber with its multiplicities (same order as the graph's vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberGraph {
    pub graph: DualGraph,
    pub multiplicities: Vec<BigInt>,
}

impl FiberGraph {
    pub fn mu(&self, id: &str) -> Result<&BigInt> {
        Ok(&self.multiplicities[self.graph.idx(id)?])
    }
}

impl fmt::Display for FiberGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.graph.ids().iter().zip(&self.multiplicities).map(|(id, m)| format!("{id}:{m}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The primitive positive generator of `ker Q(g)`.
pub fn fiber_multiplicities(g: &DualGraph) -> Result<FiberGraph> {
    if !is_valid_fiber(g).valid {
        return Err(Error::NotAFiber(g.canonical_form()));
    }
    let kernel = integer_kernel(&g.intersection_matrix());
    let [v] = kernel.as_slice() else {
        return Err(Error::NotAFiber(format!("kernel of rank {}", kernel.len())));
    };
    let sign = if v.iter().any(Signed::is_negative) { -BigInt::one() } else { BigInt::one() };
    let mu: Vec<BigInt> = v.iter().map(|x| x * &sign).collect();
    if mu.iter().any(|x| !x.is_positive()) {
        return Err(Error::NotAFiber("kernel vector is not positive".into()));
    }
    Ok(FiberGraph { graph: g.clone(), multiplicities: mu })
}

/// Multiplicities obtained by replaying a contraction trace backwards from `mu = 1`
/// on the final 0-curve.
pub fn multiplicities_from_trace(g: &DualGraph, trace: &[ContractionStep]) -> Result<Vec<BigInt>> {
    let contracted: HashSet<&str> = trace.iter().map(|s| s.vertex.as_str()).collect();
    let survivors: Vec<&String> = g.ids().iter().filter(|id| !contracted.contains(id.as_str())).collect();
    let [last] = survivors.as_slice() else {
        return Err(Error::NotAFiber("trace does not end at one curve".into()));
    };
    let mut mu: HashMap<&str, BigInt> = HashMap::from([(last.as_str(), BigInt::one())]);
    for step in trace.iter().rev() {
        let m: BigInt = step.neighbors.iter().map(|n| mu.get(n.as_str()).cloned().unwrap_or_default()).sum();
        mu.insert(step.vertex.as_str(), m);
    }
    Ok(g.ids().iter().map(|id| mu[id.as_str()].clone()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub minus_one: String,
    pub mu_minus_one: BigInt,
    pub minus_one_mult_above_one: bool,
    pub two_mult_one_tips: bool,
    pub mult_one_in_first_branch: bool,
    pub far_side_is_chain: bool,
}

impl FiberReport {
    pub fn all_pass(&self) -> bool {
        self.minus_one_mult_above_one
            && self.two_mult_one_tips
            && self.mult_one_in_first_branch
            && self.far_side_is_chain
    }
}

/// Structural checks for a fiber containing a unique (-1)-curve `C`.
pub fn unique_minus_one_checks(f: &FiberGraph) -> Result<FiberReport> {
    let g = &f.graph;
    let minus: Vec<usize> = (0..g.len()).filter(|&i| g.weight_at(i) == -1).collect();
    let [c] = minus.as_slice() else {
        return Err(Error::NotApplicable(format!("{} (-1)-curves", minus.len())));
    };
    let c = *c;
    let check = is_valid_fiber(g);
    if !check.valid {
        return Err(Error::NotAFiber(g.canonical_form()));
    }
    let mu = &f.multiplicities;
    let ones: Vec<usize> = (0..g.len()).filter(|&i| mu[i].is_one()).collect();

    // creation time: the surviving 0-curve is 0, the last blow-down is 1, ...
    let n = check.trace.len();
    let mut born: HashMap<&str, usize> =
        check.trace.iter().enumerate().map(|(k, s)| (s.vertex.as_str(), n - k)).collect();
    for id in g.ids() {
        born.entry(id.as_str()).or_insert(0);
    }
    let first_branching = g.branching_vertices().into_iter().min_by_key(|&b| born[g.id(b)]).unwrap_or(c);
    let cutoff = born[g.id(first_branching)];

    let without_c = g.without(g.id(c))?;
    let far_side_is_chain = without_c
        .components()
        .iter()
        .filter(|comp| comp.ids().iter().all(|id| !f.mu(id).map(One::is_one).unwrap_or(false)))
        .all(DualGraph::is_chain);

    Ok(FiberReport {
        minus_one: g.id(c).to_string(),
        mu_minus_one: mu[c].clone(),
        minus_one_mult_above_one: mu[c] > BigInt::one(),
        two_mult_one_tips: ones.len() == 2 && ones.iter().all(|&i| g.degree_idx(i) <= 1),
        mult_one_in_first_branch: ones.iter().all(|&i| born[g.id(i)] <= cutoff),
        far_side_is_chain,
    })
}

/// Every fiber reachable from a 0-curve by blow-ups, up to isomorphism, with at
/// most `max_vertices` components.
pub fn enumerate_fibers(max_vertices: usize) -> Vec<DualGraph> {
    let start = DualGraph::chain_from_weights("F", &[0]);
    let mut seen: HashSet<String> = HashSet::from([start.canonical_form()]);
    let mut layer = vec![start];
    let mut out = layer.clone();
    for _ in 1..max_vertices {
        let mut next = Vec::new();
        for g in &layer {
            let mut centers: Vec<Center> = g.ids().iter().map(|id| Center::vertex(id)).collect();
            centers.extend(g.edges().iter().map(|(a, b)| Center::edge(a, b)));
            for c in &centers {
                let h = blowup_graph(g, c).expect("valid center");
                if seen.insert(h.canonical_form()) {
                    next.push(h);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The numbers entering Fujita's equation `Sigma = h + nu + b2(X) - b2(D) - 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RulingBookkeeping {
    pub h: i64,
    pub nu: i64,
    pub sigma_excess: i64,
    pub b2_surface: i64,
    pub b2_boundary: i64,
}

impl RulingBookkeeping {
    pub fn fujita_rhs(&self) -> i64 {
        self.h + self.nu + self.b2_surface - self.b2_boundary - 2
    }

    /// The `h` forced by the other four numbers.
    pub fn implied_h(&self) -> i64 {
        self.sigma_excess - self.nu - self.b2_surface + self.b2_boundary + 2
    }
}

pub fn fujita_check(r: &RulingBookkeeping) -> bool {
    r.sigma_excess == r.fujita_rhs()
}

/// `F . K = sum mu_i (-2 - w_i)` for an integer combination of rational curves.
pub fn canonical_degree_of(g: &DualGraph, mu: &[BigInt]) -> BigInt {
    mu.iter().enumerate().map(|(i, m)| m * BigInt::from(-2 - g.weight_at(i))).sum()
}

/// The semidefinite characterisation: `Q(g)` negative semidefinite with a
/// one-dimensional kernel spanned by a positive vector, plus a (-1)-vertex or `g = [0]`.
pub fn semidefinite_fiber_shape(g: &DualGraph) -> Option<Vec<BigInt>> {
    if g.is_empty() || !g.is_connected() {
        return None;
    }
    let q = g.intersection_matrix();
    let rank = crate::linalg::negative_semidefinite_rank(&q).ok().flatten()?;
    if rank + 1 != g.len() {
        return None;
    }
    let kernel = integer_kernel(&q);
    let v = kernel.first()?;
    let sign = if v.iter().any(Signed::is_negative) { -BigInt::one() } else { BigInt::one() };
    let mu: Vec<BigInt> = v.iter().map(|x| x * &sign).collect();
    if mu.iter().any(|x| !x.is_positive()) {
        return None;
    }
    let has_minus_one = g.weights().contains(&-1);
    (has_minus_one || is_zero_curve(g)).then_some(mu)
}

/// The same characterisation with the adjunction condition `F . K = -2` added.
pub fn is_fiber_by_lattice(g: &DualGraph) -> bool {
    semidefinite_fiber_shape(g).map(|mu| canonical_degree_of(g, &mu) == BigInt::from(-2)).unwrap_or(false)
}
