//! The five-step CSPP pipeline over the repaired graph.
//!
//! 1. minimum spanning tree over finite edges;
//! 2. every middle leaf gets the edge to its other endpoint, so all middles
//!    have degree two;
//! 3. minimum perfect matching over the odd-degree nodes (never middles);
//! 4. an Eulerian circuit of the resulting multigraph;
//! 5. confined shortcuts, which only splice out a repeated node when the
//!    bypass edge is finite.
//!
//! The Hamiltonian tour is then read back as an ordered list of subpaths with
//! orientations. The tour is at most twice the optimum.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::graph::{NodeId, SppGraph, Weight};
use crate::ieti::{apply_ieti, ViolationReport};
use crate::matching::{min_perfect_matching, MatchingInstance};
use crate::transform::transform;
use crate::workspace::{Point, Workspace};

/// Relative tolerance for comparing workspace and graph tour lengths.
pub const LENGTH_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Enter at the start point, leave at the end point.
    Forward,
    Reverse,
}

impl Orientation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Orientation::Forward => "forward",
            Orientation::Reverse => "reverse",
        }
    }
}

/// One traversed subpath (0-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub subpath: usize,
    pub orientation: Orientation,
}

impl Step {
    pub fn new(subpath: usize, orientation: Orientation) -> Self {
        Step { subpath, orientation }
    }

    fn entry(&self, ws: &Workspace) -> Point {
        let sp = ws.subpath(self.subpath);
        match self.orientation {
            Orientation::Forward => sp.start,
            Orientation::Reverse => sp.end,
        }
    }

    fn exit(&self, ws: &Workspace) -> Point {
        let sp = ws.subpath(self.subpath);
        match self.orientation {
            Orientation::Forward => sp.end,
            Orientation::Reverse => sp.start,
        }
    }
}

/// Weights of the intermediate CSPP structures, all measured in the repaired
/// graph.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageWeights {
    pub mst: f64,
    /// Edges added by the middle-leaf repair.
    pub e2: f64,
    pub matching: f64,
    /// Length of the Eulerian circuit, i.e. the whole multigraph.
    pub trail: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SppSolution {
    pub order: Vec<Step>,
    /// Arc lengths plus Euclidean connectors, in workspace units.
    pub length: f64,
    /// The Hamiltonian tour over start/middle/end nodes behind `order`.
    pub h_trail: Vec<NodeId>,
    pub stage_weights: Option<StageWeights>,
}

impl SppSolution {
    /// Builds the solution for a visiting order, computing its length.
    pub fn from_order(ws: &Workspace, order: Vec<Step>) -> Result<Self> {
        let n = ws.len();
        let mut seen = vec![false; n];
        for step in &order {
            if step.subpath >= n || std::mem::replace(&mut seen[step.subpath], true) {
                return Err(Error::Invariant(format!("subpath {} repeated or out of range", step.subpath + 1)));
            }
        }
        if order.len() != n {
            return Err(Error::Invariant(format!("order covers {} of {n} subpaths", order.len())));
        }
        let length = order_length(ws, &order);
        let h_trail = order_to_h_trail(n, &order);
        Ok(SppSolution { order, length, h_trail, stage_weights: None })
    }

    /// JSON with fixed field order and nine significant digits. Subpath
    /// indices are 1-based.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"order\":[");
        for (k, step) in self.order.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"subpath\":{},\"orientation\":\"{}\"}}",
                step.subpath + 1,
                step.orientation.as_str()
            ));
        }
        out.push_str(&format!("],\"length\":{}", sig9(self.length)));
        if let Some(sw) = &self.stage_weights {
            out.push_str(&format!(
                ",\"stage_weights\":{{\"mst\":{},\"e2\":{},\"matching\":{},\"trail\":{}}}",
                sig9(sw.mst),
                sig9(sw.e2),
                sig9(sw.matching),
                sig9(sw.trail)
            ));
        }
        out.push('}');
        out
    }
}

impl fmt::Display for SppSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// Workspace length of a cyclic visiting order.
///
/// The arc and connector terms are summed in ascending order, so rotations
/// and reversals of the same tour give bit-identical lengths.
pub fn order_length(ws: &Workspace, order: &[Step]) -> f64 {
    let mut terms: Vec<f64> = order
        .iter()
        .map(|s| ws.subpath(s.subpath).arc_length)
        .chain((0..order.len()).map(|k| order[k].exit(ws).distance(&order[(k + 1) % order.len()].entry(ws))))
        .collect();
    terms.sort_unstable_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// `s m e` for forward steps, `e m s` for reverse ones, using the node layout
/// of [`SppGraph`].
pub fn order_to_h_trail(n: usize, order: &[Step]) -> Vec<NodeId> {
    order
        .iter()
        .flat_map(|s| {
            let (start, end, middle) = (s.subpath, n + s.subpath, 2 * n + s.subpath);
            match s.orientation {
                Orientation::Forward => [start, middle, end],
                Orientation::Reverse => [end, middle, start],
            }
        })
        .collect()
}

/// Undirected multigraph over the nodes of the repaired graph.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraph {
    nodes: usize,
    edges: Vec<(NodeId, NodeId)>,
    degree: Vec<usize>,
}

impl MultiGraph {
    pub fn new(nodes: usize) -> Self {
        MultiGraph { nodes, edges: Vec::new(), degree: vec![0; nodes] }
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) {
        debug_assert_ne!(a, b);
        self.edges.push((a, b));
        self.degree[a] += 1;
        self.degree[b] += 1;
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.degree[v]
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn weight(&self, g: &SppGraph) -> Weight {
        self.edges.iter().map(|&(a, b)| g.w(a, b)).sum()
    }

    pub fn odd_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes).filter(|&v| self.degree[v] % 2 == 1).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.nodes];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Step 1: Prim's algorithm with a dense O(V^2) scan, rooted at node 0.
/// Ties go to the lowest node id.
pub fn minimum_spanning_tree(g: &SppGraph) -> Result<MultiGraph> {
    let v = g.node_count();
    if v < 2 {
        return Err(Error::Graph("spanning tree needs at least two nodes".into()));
    }
    let mut tree = MultiGraph::new(v);
    let mut in_tree = vec![false; v];
    let mut key = vec![Weight::Infinite; v];
    let mut parent = vec![usize::MAX; v];
    key[0] = Weight::ZERO;
    for _ in 0..v {
        let mut next = usize::MAX;
        for u in 0..v {
            if !in_tree[u] && (next == usize::MAX || key[u] < key[next]) {
                next = u;
            }
        }
        if !key[next].is_finite() {
            return Err(Error::Invariant("graph has no finite spanning tree".into()));
        }
        in_tree[next] = true;
        if parent[next] != usize::MAX {
            tree.add_edge(parent[next], next);
        }
        for u in 0..v {
            if !in_tree[u] && g.w(next, u) < key[u] {
                key[u] = g.w(next, u);
                parent[u] = next;
            }
        }
    }
    Ok(tree)
}

/// Step 2: each middle leaf `m_i` hanging off one endpoint gets the edge to
/// the other endpoint. Returns the new graph and the added weight.
pub fn repair_middle_leaves(mst: &MultiGraph, g: &SppGraph) -> (MultiGraph, f64) {
    let mut out = mst.clone();
    let mut added = 0.0;
    for i in 0..g.subpath_count() {
        let m = g.middle(i);
        if mst.degree(m) == 1 {
            let parent = mst.neighbors(m).next().expect("leaf has a neighbor");
            let other = if parent == g.start(i) { g.end(i) } else { g.start(i) };
            out.add_edge(m, other);
            added += g.w(m, other).expect_finite();
        }
    }
    (out, added)
}

/// Step 3: adds a minimum perfect matching over the odd-degree nodes, with
/// costs from `g`. Returns the new graph and the matching weight.
pub fn add_matching(gstar: &MultiGraph, g: &SppGraph) -> Result<(MultiGraph, f64)> {
    let odd = gstar.odd_nodes();
    if let Some(&m) = odd.iter().find(|&&v| g.is_middle(v)) {
        return Err(Error::Invariant(format!("middle node {} has odd degree", g.role(m))));
    }
    let inst = MatchingInstance::from_fn(odd, |a, b| g.w(a, b).expect_finite())?;
    let matching = min_perfect_matching(&inst)?;
    let mut out = gstar.clone();
    for &(a, b) in &matching.pairs {
        out.add_edge(a, b);
    }
    Ok((out, matching.total_cost))
}

/// Step 4: Hierholzer's circuit, starting at the lowest node id and always
/// taking the unused edge to the lowest-id neighbor. The closing return to
/// the start is implicit.
pub fn eulerian_tour(ghat: &MultiGraph) -> Result<Vec<NodeId>> {
    if let Some(v) = (0..ghat.node_count()).find(|&v| ghat.degree(v) % 2 == 1) {
        return Err(Error::Invariant(format!("node {v} has odd degree")));
    }
    if ghat.edges().is_empty() || !ghat.is_connected() {
        return Err(Error::Invariant("multigraph is not connected".into()));
    }
    let mut adj: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); ghat.node_count()];
    for (id, &(a, b)) in ghat.edges().iter().enumerate() {
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut used = vec![false; ghat.edges().len()];
    let mut cursor = vec![0; ghat.node_count()];
    let mut stack = vec![0];
    let mut circuit = Vec::with_capacity(ghat.edges().len() + 1);
    while let Some(&v) = stack.last() {
        while cursor[v] < adj[v].len() && used[adj[v][cursor[v]].1] {
            cursor[v] += 1;
        }
        if let Some(&(u, id)) = adj[v].get(cursor[v]) {
            used[id] = true;
            stack.push(u);
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    circuit.pop();
    Ok(circuit)
}

/// Step 5: turns an Eulerian circuit into a finite Hamiltonian cycle.
///
/// Pass one walks the cycle keeping the first occurrence of every node and
/// splicing out later ones whose bypass edge is finite. Occurrences next to a
/// middle node are never spliced: each middle occurs once and its two
/// neighbors must stay its own endpoints. Pass two removes the remaining
/// extra occurrences, which by then are the first ones.
pub fn confined_shortcut(trail: &[NodeId], g: &SppGraph) -> Result<Vec<NodeId>> {
    confined_shortcut_traced(trail, g, |_, _, _| {})
}

/// [`confined_shortcut`], reporting every splice as `(before, removed, after)`.
pub fn confined_shortcut_traced(
    trail: &[NodeId],
    g: &SppGraph,
    mut on_splice: impl FnMut(NodeId, NodeId, NodeId),
) -> Result<Vec<NodeId>> {
    let len = trail.len();
    let nodes = g.node_count();
    if trail.iter().any(|&v| v >= nodes) {
        return Err(Error::Graph("trail contains an unknown node".into()));
    }
    let mut visits = vec![0usize; nodes];
    for &v in trail {
        visits[v] += 1;
    }
    if let Some(v) = (0..nodes).find(|&v| visits[v] == 0) {
        return Err(Error::Invariant(format!("trail never visits {}", g.role(v))));
    }
    if let Some(&m) = trail.iter().find(|&&v| g.is_middle(v) && visits[v] > 1) {
        return Err(Error::Invariant(format!("middle node {} visited more than once", g.role(m))));
    }
    if len < 3 {
        return Err(Error::Invariant("trail shorter than three nodes".into()));
    }

    let mut next: Vec<usize> = (0..len).map(|p| (p + 1) % len).collect();
    let mut prev: Vec<usize> = (0..len).map(|p| (p + len - 1) % len).collect();
    let mut alive = vec![true; len];
    let mut remaining = len;

    let splice = |p: usize, next: &mut Vec<usize>, prev: &mut Vec<usize>, alive: &mut Vec<bool>| {
        let (a, b) = (prev[p], next[p]);
        next[a] = b;
        prev[b] = a;
        alive[p] = false;
    };

    // pass 1
    let mut count = vec![0usize; nodes];
    for p in 0..len {
        let t = trail[p];
        count[t] += 1;
        if count[t] < 2 {
            continue;
        }
        let (t0, t1) = (trail[prev[p]], trail[next[p]]);
        if t0 != t1 && !g.is_middle(t0) && !g.is_middle(t1) && g.w(t0, t1).is_finite() {
            on_splice(t0, t, t1);
            splice(p, &mut next, &mut prev, &mut alive);
            count[t] -= 1;
            remaining -= 1;
        }
    }

    // pass 2
    while remaining > nodes {
        let before = remaining;
        for p in 0..len {
            if !alive[p] || count[trail[p]] < 2 {
                continue;
            }
            let (t0, t1) = (trail[prev[p]], trail[next[p]]);
            if g.is_middle(t0) || g.is_middle(t1) {
                continue;
            }
            if t0 != t1 && !g.w(t0, t1).is_finite() {
                return Err(Error::Invariant(format!(
                    "shortcut {}-{}-{} would add an infinite edge",
                    g.role(t0),
                    g.role(trail[p]),
                    g.role(t1)
                )));
            }
            on_splice(t0, trail[p], t1);
            splice(p, &mut next, &mut prev, &mut alive);
            count[trail[p]] -= 1;
            remaining -= 1;
        }
        if remaining == before {
            return Err(Error::Invariant("confined shortcut made no progress".into()));
        }
    }

    let start = (0..len).find(|&p| alive[p]).expect("cycle is non-empty");
    let mut out = Vec::with_capacity(nodes);
    let mut p = start;
    loop {
        out.push(trail[p]);
        p = next[p];
        if p == start {
            break;
        }
    }
    Ok(out)
}

/// Reads the subpath order and orientations off a finite Hamiltonian cycle
/// and measures it in workspace units.
pub fn decode_solution(h_trail: &[NodeId], ws: &Workspace, g: &SppGraph) -> Result<SppSolution> {
    let n = ws.len();
    if g.subpath_count() != n || !g.has_middles() {
        return Err(Error::Invariant("graph does not belong to this workspace".into()));
    }
    let len = h_trail.len();
    if len != 3 * n {
        return Err(Error::Invariant(format!("tour has {len} nodes, expected {}", 3 * n)));
    }
    let mut seen = vec![false; 3 * n];
    for &v in h_trail {
        if v >= 3 * n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::Invariant(format!("node {v} repeated or out of range")));
        }
    }
    let mut order = Vec::with_capacity(n);
    for (p, &v) in h_trail.iter().enumerate() {
        if !g.is_middle(v) {
            continue;
        }
        let i = g.role(v).subpath();
        let before = h_trail[(p + len - 1) % len];
        let after = h_trail[(p + 1) % len];
        // With one subpath the cycle s m e is the same either way round.
        let orientation = if n == 1 || (before, after) == (g.start(i), g.end(i)) {
            Orientation::Forward
        } else if (before, after) == (g.end(i), g.start(i)) {
            Orientation::Reverse
        } else {
            return Err(Error::Invariant(format!("subpath {} is not traversed contiguously", i + 1)));
        };
        order.push(Step::new(i, orientation));
    }
    let length = order_length(ws, &order);
    Ok(SppSolution { order, length, h_trail: h_trail.to_vec(), stage_weights: None })
}

/// Everything the pipeline computes, for diagnostics and invariant checks.
#[derive(Debug, Clone)]
pub struct CsppOutcome {
    pub solution: SppSolution,
    pub graph: SppGraph,
    pub report: ViolationReport,
    pub trail: Vec<NodeId>,
}

/// Runs the pipeline on an already repaired graph.
pub fn cspp_on_graph(ws: &Workspace, g: &SppGraph) -> Result<(SppSolution, Vec<NodeId>)> {
    let mst = minimum_spanning_tree(g)?;
    let mst_weight = mst.weight(g).expect_finite();
    let (gstar, e2) = repair_middle_leaves(&mst, g);
    let (ghat, matching) = add_matching(&gstar, g)?;
    let trail = eulerian_tour(&ghat)?;
    let trail_weight = g.tour_length(&trail).map(|w| w.expect_finite()).unwrap_or(0.0);
    let h_trail = confined_shortcut(&trail, g)?;
    let mut solution = decode_solution(&h_trail, ws, g)?;

    // For a single subpath the only s-e edge is the subpath itself, so the
    // graph cycle counts the arc twice while the workspace tour closes along
    // the chord; the two lengths only coincide from two subpaths on.
    let graph_length = g.tour_length(&h_trail)?;
    match graph_length {
        _ if ws.len() == 1 => {}
        Weight::Finite(x) if (x - solution.length).abs() <= LENGTH_RTOL * x.abs().max(1.0) => {}
        other => {
            return Err(Error::Invariant(format!(
                "decoded length {} differs from graph tour length {other}",
                solution.length
            )))
        }
    }
    solution.stage_weights = Some(StageWeights { mst: mst_weight, e2, matching, trail: trail_weight });
    Ok((solution, trail))
}

pub fn run_cspp(ws: &Workspace) -> Result<CsppOutcome> {
    let (graph, report) = apply_ieti(&transform(ws))?;
    let (solution, trail) = cspp_on_graph(ws, &graph)?;
    Ok(CsppOutcome { solution, graph, report, trail })
}

/// Transform, repair, CSPP steps 1-5 and decoding. Deterministic; the result
/// is within a factor 2 of the optimum.
pub fn solve_cspp(ws: &Workspace) -> Result<SppSolution> {
    run_cspp(ws).map(|o| o.solution)
}
