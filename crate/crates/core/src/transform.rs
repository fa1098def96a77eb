//! Workspace to graph transform.
//!
//! [`build_g`] produces the complete graph over subpath endpoints: the edge
//! between a subpath's own endpoints carries its arc length, every other edge
//! the Euclidean distance. [`build_g_prime`] splits each subpath edge with a
//! middle node whose only finite edges are the two halves, so that every
//! finite Hamiltonian tour traverses every subpath.

use crate::error::{Error, Result};
use crate::graph::{SppGraph, Weight};
use crate::workspace::{Point, Workspace};

pub fn build_g(ws: &Workspace) -> SppGraph {
    let n = ws.len();
    let mut g = SppGraph::zeroed(n, false);
    let points: Vec<Point> = (0..2 * n)
        .map(|v| if v < n { ws.subpath(v).start } else { ws.subpath(v - n).end })
        .collect();
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            g.set(a, b, Weight::finite(points[a].distance(&points[b])));
        }
    }
    for (i, sp) in ws.subpaths().iter().enumerate() {
        g.set(g.start(i), g.end(i), Weight::finite(sp.arc_length));
    }
    g
}

pub fn build_g_prime(g: &SppGraph) -> Result<SppGraph> {
    if g.has_middles() {
        return Err(Error::Graph("graph already contains middle nodes".into()));
    }
    let n = g.subpath_count();
    let mut out = SppGraph::zeroed(n, true);
    for a in 0..2 * n {
        for b in a + 1..2 * n {
            out.set(a, b, g.w(a, b));
        }
    }
    for i in 0..n {
        let m = out.middle(i);
        for v in 0..3 * n {
            if v != m {
                out.set(m, v, Weight::Infinite);
            }
        }
        let half = g.w(g.start(i), g.end(i)).expect_finite() / 2.0;
        out.set(out.start(i), m, Weight::finite(half));
        out.set(m, out.end(i), Weight::finite(half));
    }
    Ok(out)
}

/// Both stages in one call.
pub fn transform(ws: &Workspace) -> SppGraph {
    build_g_prime(&build_g(ws)).expect("stage-1 graph has no middles")
}

/// `[s_1, m_1, e_1, s_2, m_2, e_2, ...]`, always a finite Hamiltonian tour.
pub fn canonical_tour(g: &SppGraph) -> Vec<usize> {
    (0..g.subpath_count()).flat_map(|i| [g.start(i), g.middle(i), g.end(i)]).collect()
}
