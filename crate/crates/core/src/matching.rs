//! Minimum-weight perfect matching on complete graphs.
//!
//! [`min_perfect_matching`] is an O(V^3) primal-dual blossom method (Edmonds'
//! blossom shrinking with Galil's dual bookkeeping), run as a maximum-weight
//! maximum-cardinality matching on `C - cost`. Costs are scaled to 64-bit
//! integers so that the dual updates are exact; the reported total is summed
//! from the original costs. [`brute_force_matching`] enumerates every perfect
//! matching and is the test oracle for the blossom engine.

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Largest instance [`brute_force_matching`] accepts.
pub const BRUTE_FORCE_CAP: usize = 12;

/// Costs are scaled so the largest one is at most 2^40.
const SCALE_BITS: i32 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingInstance {
    vertices: Vec<NodeId>,
    cost: Vec<f64>,
}

impl MatchingInstance {
    /// Builds the instance from a cost function over pairs of vertices.
    pub fn from_fn(vertices: Vec<NodeId>, mut cost: impl FnMut(NodeId, NodeId) -> f64) -> Result<Self> {
        let k = vertices.len();
        let mut matrix = vec![0.0; k * k];
        for a in 0..k {
            for b in a + 1..k {
                let c = cost(vertices[a], vertices[b]);
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::Invalid(format!(
                        "matching cost between {} and {} must be finite and >= 0, got {c}",
                        vertices[a], vertices[b]
                    )));
                }
                matrix[a * k + b] = c;
                matrix[b * k + a] = c;
            }
        }
        Ok(MatchingInstance { vertices, cost: matrix })
    }

    pub fn vertices(&self) -> &[NodeId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn c(&self, a: usize, b: usize) -> f64 {
        self.cost[a * self.vertices.len() + b]
    }

    fn check_even(&self) -> Result<()> {
        if self.vertices.len() % 2 == 1 {
            return Err(Error::OddVertexCount(self.vertices.len()));
        }
        Ok(())
    }

    /// Turns a mate array over local indices into a [`Matching`]. Pairs are
    /// summed in ascending order of their smaller local index.
    fn matching_from_mates(&self, mate: &[usize]) -> Matching {
        let mut total = 0.0;
        let mut pairs = Vec::with_capacity(mate.len() / 2);
        for (a, &b) in mate.iter().enumerate() {
            if a < b {
                total += self.c(a, b);
                let (x, y) = (self.vertices[a], self.vertices[b]);
                pairs.push((x.min(y), x.max(y)));
            }
        }
        pairs.sort_unstable();
        Matching { pairs, total_cost: total }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Unordered pairs stored as `(smaller, larger)`, sorted.
    pub pairs: Vec<(NodeId, NodeId)>,
    pub total_cost: f64,
}

impl Matching {
    /// True if the pairs partition `vertices`.
    pub fn is_perfect_on(&self, vertices: &[NodeId]) -> bool {
        let mut seen: Vec<NodeId> = self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        let mut expected = vertices.to_vec();
        seen.sort_unstable();
        expected.sort_unstable();
        seen == expected
    }
}

/// Exhaustive minimum over all `(k-1)!!` perfect matchings.
pub fn brute_force_matching(inst: &MatchingInstance) -> Result<Matching> {
    inst.check_even()?;
    let k = inst.len();
    if k > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge { what: "brute-force matching", cap: BRUTE_FORCE_CAP, n: k });
    }
    if k == 0 {
        return Ok(Matching { pairs: vec![], total_cost: 0.0 });
    }

    fn recurse(
        inst: &MatchingInstance,
        mate: &mut Vec<usize>,
        partial: f64,
        best: &mut (f64, Vec<usize>),
    ) {
        let Some(a) = mate.iter().position(|&m| m == usize::MAX) else {
            if partial < best.0 {
                *best = (partial, mate.clone());
            }
            return;
        };
        for b in a + 1..mate.len() {
            if mate[b] == usize::MAX {
                mate[a] = b;
                mate[b] = a;
                recurse(inst, mate, partial + inst.c(a, b), best);
                mate[a] = usize::MAX;
                mate[b] = usize::MAX;
            }
        }
    }

    let mut best = (f64::INFINITY, vec![]);
    recurse(inst, &mut vec![usize::MAX; k], 0.0, &mut best);
    Ok(inst.matching_from_mates(&best.1))
}

/// Exact minimum-cost perfect matching. Deterministic for a given instance.
pub fn min_perfect_matching(inst: &MatchingInstance) -> Result<Matching> {
    inst.check_even()?;
    let k = inst.len();
    if k == 0 {
        return Ok(Matching { pairs: vec![], total_cost: 0.0 });
    }
    let max_cost = inst.cost.iter().copied().fold(0.0, f64::max);
    let scale = if max_cost > 0.0 { 2f64.powi(SCALE_BITS - max_cost.log2().ceil() as i32) } else { 1.0 };
    let scaled = |a: usize, b: usize| (inst.c(a, b) * scale).round() as i64;
    let ceiling = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).map(|(a, b)| scaled(a, b)).max().unwrap_or(0);

    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            edges.push((a, b, ceiling - scaled(a, b)));
        }
    }
    let mate = Blossom::new(k, edges).solve();
    if mate.contains(&NONE) {
        return Err(Error::Invariant("blossom matching is not perfect".into()));
    }
    Ok(inst.matching_from_mates(&mate))
}

const NONE: usize = usize::MAX;

/// Maximum-weight maximum-cardinality matching on a general graph.
///
/// Vertices are `0..n`, non-trivial blossoms `n..2n`. Edge `k` has endpoints
/// `2k` and `2k + 1`; `p ^ 1` is the other end of the edge of endpoint `p`.
/// Dual variables are stored doubled so that every quantity stays integral.
struct Blossom {
    n: usize,
    edges: Vec<(usize, usize, i64)>,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    /// Remote endpoint of the matched edge, or NONE.
    mate: Vec<usize>,
    /// 0 free, 1 S, 2 T; bit 4 is a breadcrumb used by `scan_blossom`.
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Blossom {
    fn new(n: usize, edges: Vec<(usize, usize, i64)>) -> Self {
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * edges.len());
        let mut neighbend = vec![Vec::new(); n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let nedge = edges.len();
        Blossom {
            n,
            edges,
            endpoint,
            neighbend,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossomparent: vec![NONE; 2 * n],
            blossomchilds: vec![Vec::new(); 2 * n],
            blossombase: (0..n).chain(std::iter::repeat_n(NONE, n)).collect(),
            blossomendps: vec![Vec::new(); 2 * n],
            bestedge: vec![NONE; 2 * n],
            blossombestedges: vec![None; 2 * n],
            unusedblossoms: (n..2 * n).rev().collect(),
            dualvar: std::iter::repeat_n(maxweight, n).chain(std::iter::repeat_n(0, n)).collect(),
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    #[inline]
    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * w
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.n {
                out.push(t);
            } else {
                stack.extend(self.blossomchilds[t].iter().rev());
            }
        }
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.leaves(b);
            self.queue.extend(leaves);
        } else {
            let base = self.blossombase[b];
            let m = self.mate[base];
            debug_assert_ne!(m, NONE);
            self.assign_label(self.endpoint[m], 1, m ^ 1);
        }
    }

    /// Traces back from `v` and `w` to find either a new blossom's base or an
    /// augmenting path (returns NONE).
    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots exhausted");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        for v in self.leaves_of_children(&path) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        let mut bestedgeto = vec![NONE; 2 * self.n];
        for &bv in &path {
            let lists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                Some(list) => vec![list],
                None => self
                    .leaves(bv)
                    .into_iter()
                    .map(|v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for list in lists {
                for k in list {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[bv] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        let mut best = NONE;
        for &k in &list {
            if best == NONE || self.slack(k) < self.slack(best) {
                best = k;
            }
        }
        self.bestedge[b] = best;
        self.blossombestedges[b] = Some(list);
        self.blossomchilds[b] = path;
        self.blossomendps[b] = endps;
    }

    fn leaves_of_children(&self, children: &[usize]) -> Vec<usize> {
        children.iter().flat_map(|&c| self.leaves(c)).collect()
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len() as isize;
            let at = |j: isize| childs[j.rem_euclid(len) as usize];
            let endp = |s: &Self, j: isize| s.blossomendps[b][j.rem_euclid(len) as usize];
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 == 1 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                let q = endp(self, j - endptrick as isize) ^ endptrick ^ 1;
                self.label[self.endpoint[p ^ 1]] = 0;
                self.label[self.endpoint[q]] = 0;
                self.assign_label(self.endpoint[p ^ 1], 2, p);
                let e = endp(self, j - endptrick as isize) / 2;
                self.allowedge[e] = true;
                j += jstep;
                p = endp(self, j - endptrick as isize) ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = at(j);
            let ep = self.endpoint[p ^ 1];
            self.label[ep] = 2;
            self.label[bv] = 2;
            self.labelend[ep] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while at(j) != entrychild {
                let bv = at(j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let reached = self.leaves(bv).into_iter().find(|&v| self.label[v] != 0);
                if let Some(v) = reached {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let m = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[m]] = 0;
                    self.assign_label(v, 2, self.labelend[v]);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    /// Swaps matched and unmatched edges on the even path from `v` to the
    /// base of blossom `b`, then rotates `b` so that `v` becomes its base.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len() as isize;
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 == 1 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][j.rem_euclid(len) as usize];
            let p = self.blossomendps[b][(j - endptrick as isize).rem_euclid(len) as usize] ^ endptrick;
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.blossomchilds[b][j.rem_euclid(len) as usize];
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    /// Returns `mate` over vertices (partner vertex or NONE).
    fn solve(mut self) -> Vec<usize> {
        let n = self.n;
        for _stage in 0..n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NONE);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();

            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }

            let mut augmented = false;
            loop {
                while let Some(v) = (!augmented).then(|| self.queue.pop()).flatten() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    for idx in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path under the current duals: pick the
                // smallest dual adjustment that makes progress.
                let mut deltatype = 0u8;
                let mut delta = 0i64;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert_eq!(kslack % 2, 0);
                        let d = kslack / 2;
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    // Maximum cardinality reached: finish with a final dual step.
                    deltatype = 1;
                    delta = self.dualvar[..n].iter().copied().min().unwrap_or(0).max(0);
                }

                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }

            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }

        self.mate.iter().map(|&p| if p == NONE { NONE } else { self.endpoint[p] }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn euclidean(points: &[(f64, f64)]) -> MatchingInstance {
        MatchingInstance::from_fn((0..points.len()).collect(), |a, b| {
            let (p, q) = (points[a], points[b]);
            (p.0 - q.0).hypot(p.1 - q.1)
        })
        .unwrap()
    }

    #[test]
    fn two_vertices() {
        let inst = MatchingInstance::from_fn(vec![7, 3], |_, _| 2.5).unwrap();
        let m = min_perfect_matching(&inst).unwrap();
        assert_eq!(m.pairs, vec![(3, 7)]);
        assert_eq!(m.total_cost, 2.5);
        assert_eq!(brute_force_matching(&inst).unwrap(), m);
    }

    #[test]
    fn four_collinear_points() {
        let inst = euclidean(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        let m = min_perfect_matching(&inst).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(m.total_cost, 2.0);
        assert_eq!(brute_force_matching(&inst).unwrap().total_cost, 2.0);
    }

    #[test]
    fn odd_and_oversized_instances() {
        let inst = MatchingInstance::from_fn(vec![0, 1, 2], |_, _| 1.0).unwrap();
        assert!(matches!(min_perfect_matching(&inst), Err(Error::OddVertexCount(3))));
        assert!(matches!(brute_force_matching(&inst), Err(Error::OddVertexCount(3))));
        let big = MatchingInstance::from_fn((0..14).collect(), |_, _| 1.0).unwrap();
        assert!(matches!(brute_force_matching(&big), Err(Error::TooLarge { .. })));
        assert!(MatchingInstance::from_fn(vec![0, 1], |_, _| f64::INFINITY).is_err());
    }

    #[test]
    fn empty_instance() {
        let inst = MatchingInstance::from_fn(vec![], |_, _| 0.0).unwrap();
        assert!(min_perfect_matching(&inst).unwrap().pairs.is_empty());
    }

    #[test]
    fn all_equal_costs() {
        let inst = MatchingInstance::from_fn((0..10).collect(), |_, _| 4.0).unwrap();
        let m = min_perfect_matching(&inst).unwrap();
        assert!(m.is_perfect_on(inst.vertices()));
        assert_eq!(m.total_cost, 20.0);
    }

    #[test]
    fn agrees_with_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..300 {
            let k = 2 * rng.gen_range(1..=6);
            let inst = if trial % 3 == 0 {
                // arbitrary (non-metric) costs
                let costs: Vec<f64> = (0..k * k).map(|_| rng.gen_range(0.0..100.0)).collect();
                MatchingInstance::from_fn((0..k).collect(), |a, b| costs[a.min(b) * k + a.max(b)]).unwrap()
            } else if trial % 3 == 1 {
                // small integers: many ties
                let costs: Vec<f64> = (0..k * k).map(|_| rng.gen_range(0..4) as f64).collect();
                MatchingInstance::from_fn((0..k).collect(), |a, b| costs[a.min(b) * k + a.max(b)]).unwrap()
            } else {
                let pts: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
                euclidean(&pts)
            };
            let fast = min_perfect_matching(&inst).unwrap();
            let slow = brute_force_matching(&inst).unwrap();
            assert!(fast.is_perfect_on(inst.vertices()));
            assert_eq!(fast.total_cost, slow.total_cost, "trial {trial}: {fast:?} vs {slow:?}");
        }
    }

    #[test]
    fn larger_instances_are_perfect_and_locally_optimal() {
        // No 2-exchange can improve a minimum perfect matching.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in [30usize, 64, 100] {
            let pts: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0))).collect();
            let inst = euclidean(&pts);
            let m = min_perfect_matching(&inst).unwrap();
            assert!(m.is_perfect_on(inst.vertices()));
            for (x, &(a, b)) in m.pairs.iter().enumerate() {
                for &(c, d) in &m.pairs[x + 1..] {
                    let now = inst.c(a, b) + inst.c(c, d);
                    assert!(inst.c(a, c) + inst.c(b, d) >= now - 1e-9);
                    assert!(inst.c(a, d) + inst.c(b, c) >= now - 1e-9);
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<(f64, f64)> = (0..40).map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect();
        let inst = euclidean(&pts);
        assert_eq!(min_perfect_matching(&inst).unwrap(), min_perfect_matching(&inst).unwrap());
    }
}
