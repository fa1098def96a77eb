//! Dense symmetric graphs over role-tagged subpath nodes.
//!
//! Node ids follow a fixed layout for a workspace of `n` subpaths: `0..n` are
//! the start nodes, `n..2n` the end nodes and `2n..3n` the middle nodes (the
//! latter only once middles have been added).

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::fmt::sig9;

pub type NodeId = usize;

/// An edge weight: a finite non-negative real or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Finite(f64),
    Infinite,
}

impl Weight {
    pub const ZERO: Weight = Weight::Finite(0.0);

    pub fn finite(value: f64) -> Weight {
        assert!(value >= 0.0 && value.is_finite(), "finite weight must be >= 0, got {value}");
        Weight::Finite(value)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Weight::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Weight::Finite(v) => Some(v),
            Weight::Infinite => None,
        }
    }

    /// The finite value; panics on infinity.
    pub fn expect_finite(&self) -> f64 {
        match *self {
            Weight::Finite(v) => v,
            Weight::Infinite => panic!("expected a finite weight"),
        }
    }

    /// Adds `delta` (which may be negative) to a finite weight. Infinite
    /// weights are never adjusted; asking to is a logic error.
    pub(crate) fn shifted(&self, delta: f64) -> Weight {
        match *self {
            Weight::Finite(v) => {
                let out = v + delta;
                assert!(out >= 0.0, "weight adjusted below zero: {v} + {delta}");
                Weight::Finite(out)
            }
            Weight::Infinite => panic!("attempted to adjust an infinite weight"),
        }
    }
}

impl Add for Weight {
    type Output = Weight;

    fn add(self, rhs: Weight) -> Weight {
        match (self, rhs) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a + b),
            _ => Weight::Infinite,
        }
    }
}

impl std::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

impl Eq for Weight {}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => a.total_cmp(b),
            (Weight::Finite(_), Weight::Infinite) => Ordering::Less,
            (Weight::Infinite, Weight::Finite(_)) => Ordering::Greater,
            (Weight::Infinite, Weight::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(v) => f.write_str(&sig9(*v)),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRole {
    Start(usize),
    End(usize),
    Middle(usize),
}

impl NodeRole {
    pub fn subpath(&self) -> usize {
        match *self {
            NodeRole::Start(i) | NodeRole::End(i) | NodeRole::Middle(i) => i,
        }
    }

    pub fn is_middle(&self) -> bool {
        matches!(self, NodeRole::Middle(_))
    }
}

impl fmt::Display for NodeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRole::Start(i) => write!(f, "s{}", i + 1),
            NodeRole::End(i) => write!(f, "e{}", i + 1),
            NodeRole::Middle(i) => write!(f, "m{}", i + 1),
        }
    }
}

/// Complete symmetric graph with `2n` nodes (no middles) or `3n` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SppGraph {
    n: usize,
    nodes: usize,
    weights: Vec<Weight>,
}

impl SppGraph {
    /// A graph over `n` subpaths with all off-diagonal weights zero.
    pub(crate) fn zeroed(n: usize, with_middles: bool) -> Self {
        let nodes = if with_middles { 3 * n } else { 2 * n };
        SppGraph { n, nodes, weights: vec![Weight::ZERO; nodes * nodes] }
    }

    pub fn subpath_count(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn has_middles(&self) -> bool {
        self.nodes == 3 * self.n
    }

    pub fn start(&self, i: usize) -> NodeId {
        i
    }

    pub fn end(&self, i: usize) -> NodeId {
        self.n + i
    }

    pub fn middle(&self, i: usize) -> NodeId {
        debug_assert!(self.has_middles());
        2 * self.n + i
    }

    pub fn role(&self, v: NodeId) -> NodeRole {
        let n = self.n;
        match v {
            v if v < n => NodeRole::Start(v),
            v if v < 2 * n => NodeRole::End(v - n),
            v if v < self.nodes => NodeRole::Middle(v - 2 * n),
            _ => panic!("node id {v} out of range"),
        }
    }

    pub fn is_middle(&self, v: NodeId) -> bool {
        v >= 2 * self.n
    }

    /// Checked lookup: fails on the diagonal and on out-of-range ids.
    pub fn edge_weight(&self, a: NodeId, b: NodeId) -> Result<Weight> {
        if a >= self.nodes || b >= self.nodes {
            return Err(Error::Graph(format!("node id out of range: ({a}, {b})")));
        }
        if a == b {
            return Err(Error::Graph(format!("diagonal query ({a}, {a})")));
        }
        Ok(self.w(a, b))
    }

    /// Unchecked lookup for hot loops. The diagonal reads as zero.
    #[inline]
    pub fn w(&self, a: NodeId, b: NodeId) -> Weight {
        self.weights[a * self.nodes + b]
    }

    pub(crate) fn set(&mut self, a: NodeId, b: NodeId, w: Weight) {
        debug_assert_ne!(a, b);
        self.weights[a * self.nodes + b] = w;
        self.weights[b * self.nodes + a] = w;
    }

    /// Cycle length including the closing edge.
    pub fn tour_length(&self, nodes: &[NodeId]) -> Result<Weight> {
        if nodes.len() < 3 {
            return Err(Error::Graph(format!("a tour needs at least 3 nodes, got {}", nodes.len())));
        }
        let mut total = Weight::ZERO;
        for k in 0..nodes.len() {
            let (a, b) = (nodes[k], nodes[(k + 1) % nodes.len()]);
            if a == b {
                return Err(Error::Graph(format!("repeated adjacent node {a} at position {k}")));
            }
            total = total + self.edge_weight(a, b)?;
        }
        Ok(total)
    }

    /// Weight matrix as CSV: a header row of node labels, then one row per
    /// node. Infinite entries are written `inf`, the diagonal is left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node");
        for v in 0..self.nodes {
            out.push(',');
            out.push_str(&self.role(v).to_string());
        }
        out.push('\n');
        for a in 0..self.nodes {
            out.push_str(&self.role(a).to_string());
            for b in 0..self.nodes {
                out.push(',');
                if a != b {
                    out.push_str(&self.w(a, b).to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

/// A closed walk with its cached length.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub nodes: Vec<NodeId>,
    pub length: Weight,
}

impl Tour {
    pub fn new(g: &SppGraph, nodes: Vec<NodeId>) -> Result<Self> {
        let length = g.tour_length(&nodes)?;
        Ok(Tour { nodes, length })
    }
}
