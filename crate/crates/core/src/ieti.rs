//! Single-pass triangle-inequality repair.
//!
//! For each subpath `i` in ascending order, the degree of violation
//!
//! ```text
//! dv_i = 0.5 * (min_d (w(s_i, d) + w(e_i, d)) - w(s_i, e_i))
//! ```
//!
//! is computed over the current weights, with `d` ranging over the non-middle
//! nodes other than `s_i` and `e_i`. When `dv_i < 0` the subpath edge shrinks
//! by `|dv_i|`, its two halves follow, and every finite edge leaving `s_i` or
//! `e_i` towards another subpath grows by `|dv_i| / 2`. Any finite Hamiltonian
//! tour enters and leaves the subpath once each, so its length is unchanged,
//! and afterwards the only violating triangles are those with exactly one
//! infinite edge.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{SppGraph, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubpathViolation {
    /// 1-based subpath index.
    pub index: usize,
    pub dv: f64,
    pub updated: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ViolationReport {
    pub subpaths: Vec<SubpathViolation>,
}

impl ViolationReport {
    pub fn updated_count(&self) -> usize {
        self.subpaths.iter().filter(|v| v.updated).count()
    }

    pub fn is_noop(&self) -> bool {
        self.updated_count() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.subpaths).expect("report serialization is infallible")
    }
}

/// `dv_i` over the graph's current weights. Needs at least two subpaths.
pub fn degree_of_violation(g: &SppGraph, i: usize) -> Result<f64> {
    let n = g.subpath_count();
    if i >= n {
        return Err(Error::Graph(format!("subpath index {i} out of range")));
    }
    if n < 2 {
        return Err(Error::Graph("degree of violation needs at least two subpaths".into()));
    }
    Ok(dv_unchecked(g, i))
}

fn dv_unchecked(g: &SppGraph, i: usize) -> f64 {
    let (s, e) = (g.start(i), g.end(i));
    let best = (0..2 * g.subpath_count())
        .filter(|&d| d != s && d != e)
        .map(|d| g.w(s, d).expect_finite() + g.w(e, d).expect_finite())
        .fold(f64::INFINITY, f64::min);
    0.5 * (best - g.w(s, e).expect_finite())
}

/// Runs the repair on a copy of `g_prime` and returns the repaired graph.
pub fn apply_ieti(g_prime: &SppGraph) -> Result<(SppGraph, ViolationReport)> {
    if !g_prime.has_middles() {
        return Err(Error::Graph("triangle repair expects a graph with middle nodes".into()));
    }
    let n = g_prime.subpath_count();
    let mut g = g_prime.clone();
    let mut report = ViolationReport::default();
    if n < 2 {
        // Empty candidate set: the lone s-m-e triangle is already fine.
        report.subpaths.push(SubpathViolation { index: 1, dv: 0.0, updated: false });
        return Ok((g, report));
    }
    for i in 0..n {
        let dv = dv_unchecked(&g, i);
        let updated = dv < 0.0;
        if updated {
            repair_subpath(&mut g, i, -dv);
        }
        report.subpaths.push(SubpathViolation { index: i + 1, dv, updated });
    }
    Ok((g, report))
}

fn repair_subpath(g: &mut SppGraph, i: usize, amount: f64) {
    let (s, e, m) = (g.start(i), g.end(i), g.middle(i));
    let subpath = g.w(s, e).shifted(-amount);
    let half = Weight::finite(subpath.expect_finite() / 2.0);
    g.set(s, e, subpath);
    g.set(s, m, half);
    g.set(m, e, half);
    // Middles of other subpaths are infinite from s and e, so only endpoint
    // nodes are touched.
    for q in 0..2 * g.subpath_count() {
        if q == s || q == e {
            continue;
        }
        for end in [s, e] {
            let w = g.w(end, q).shifted(amount / 2.0);
            g.set(end, q, w);
        }
    }
}

/// Transform followed by repair.
pub fn repaired_graph(ws: &crate::workspace::Workspace) -> (SppGraph, ViolationReport) {
    apply_ieti(&crate::transform::transform(ws)).expect("transform output has middles")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::transform;
    use crate::workspace::{Point, Subpath, Workspace};

    fn curved_pair() -> Workspace {
        Workspace::new(vec![
            Subpath::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), 5.0).unwrap(),
            Subpath::straight(Point::new(0.0, 1.0), Point::new(1.0, 1.0)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn dv_of_two_straight_subpaths() {
        let ws = Workspace::new(vec![
            Subpath::straight(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap(),
            Subpath::straight(Point::new(2.0, 0.0), Point::new(3.0, 0.0)).unwrap(),
        ])
        .unwrap();
        let g = transform(&ws);
        assert_eq!(degree_of_violation(&g, 0).unwrap(), 1.0);
        let (g2, report) = apply_ieti(&g).unwrap();
        assert_eq!(g2, g);
        assert!(report.is_noop());
    }

    #[test]
    fn dv_of_curved_subpath() {
        let g = transform(&curved_pair());
        let dv = degree_of_violation(&g, 0).unwrap();
        let expected = 0.5 * ((1.0 + 2f64.sqrt()) - 5.0);
        assert!((dv - expected).abs() < 1e-15);
        assert!((dv + 1.29289).abs() < 1e-5);
    }

    #[test]
    fn repair_of_curved_subpath() {
        let g = transform(&curved_pair());
        let (r, report) = apply_ieti(&g).unwrap();
        let (s1, e1, m1, s2) = (r.start(0), r.end(0), r.middle(0), r.start(1));
        let close = |a: Weight, b: f64| (a.expect_finite() - b).abs() < 1e-5;
        assert!(close(r.w(s1, e1), 3.70711));
        assert!(close(r.w(s1, m1), 1.85355));
        assert!(close(r.w(s1, s2), 1.64645));
        assert!(close(r.w(e1, s2), 2.06066));
        // the minimizing triangle is now tight
        let sum = r.w(s1, s2).expect_finite() + r.w(e1, s2).expect_finite();
        assert!((sum - r.w(s1, e1).expect_finite()).abs() < 1e-12);
        assert_eq!(report.subpaths.len(), 2);
        assert!(report.subpaths[0].updated);
        assert!(!report.subpaths[1].updated);
        assert!(report.to_json().starts_with(r#"[{"index":1,"dv":-1.29"#));
    }

    #[test]
    fn single_subpath_is_a_noop() {
        let ws = Workspace::new(vec![Subpath::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), 3.0).unwrap()]).unwrap();
        let g = transform(&ws);
        assert!(degree_of_violation(&g, 0).is_err());
        let (r, report) = apply_ieti(&g).unwrap();
        assert_eq!(r, g);
        assert!(report.is_noop());
    }

    #[test]
    fn straight_workspaces_have_nonnegative_dv() {
        for seed in 0..10 {
            let ws = Workspace::random(12, 100.0, 1.0, seed).unwrap();
            let g = transform(&ws);
            for i in 0..12 {
                assert!(degree_of_violation(&g, i).unwrap() >= 0.0);
            }
            assert!(apply_ieti(&g).unwrap().1.is_noop());
        }
    }

    #[test]
    fn repaired_graph_keeps_halves_and_monotonicity() {
        for seed in 0..20 {
            let ws = Workspace::random(10, 100.0, 3.0, seed).unwrap();
            let g = transform(&ws);
            let (r, report) = apply_ieti(&g).unwrap();
            for v in &report.subpaths {
                assert_eq!(v.updated, v.dv < 0.0);
            }
            for i in 0..10 {
                let (s, e, m) = (r.start(i), r.end(i), r.middle(i));
                let w = r.w(s, e).expect_finite();
                assert_eq!(r.w(s, m).expect_finite(), w / 2.0);
                assert_eq!(r.w(m, e).expect_finite(), w / 2.0);
                assert!(r.w(s, e) <= g.w(s, e));
            }
            for a in 0..30 {
                for b in a + 1..30 {
                    let same_subpath = r.role(a).subpath() == r.role(b).subpath();
                    if let Weight::Finite(x) = r.w(a, b) {
                        assert!(x >= 0.0);
                        if !same_subpath {
                            assert!(r.w(a, b) >= g.w(a, b));
                        }
                    } else {
                        assert!(!g.w(a, b).is_finite());
                    }
                }
            }
        }
    }

    #[test]
    fn wrong_input_shape() {
        let g = crate::transform::build_g(&curved_pair());
        assert!(apply_ieti(&g).is_err());
    }
}
