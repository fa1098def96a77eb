//! Executable invariants: triangle structure of the repaired graph, tour
//! length preservation, the ratio bound and the per-stage weight bounds.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cspp::{order_to_h_trail, run_cspp, CsppOutcome, Orientation, SppSolution, Step, LENGTH_RTOL};
use crate::error::Result;
use crate::graph::{NodeId, SppGraph, Weight};
use crate::oracle::solve_exact;
use crate::transform::transform;
use crate::workspace::Workspace;

/// Largest workspace the battery compares against the exact oracle.
pub const ORACLE_CHECK_CAP: usize = 12;

/// Absolute slack for the lemma and ratio inequalities.
pub const BOUND_SLACK: f64 = 1e-9;

/// `lhs >= rhs` up to a relative tolerance. Infinity on the left always
/// satisfies, infinity on the right only against infinity.
fn at_least(lhs: Weight, rhs: Weight, rtol: f64) -> bool {
    match (lhs, rhs) {
        (Weight::Infinite, _) => true,
        (Weight::Finite(_), Weight::Infinite) => false,
        (Weight::Finite(l), Weight::Finite(r)) => l >= r - rtol * r.abs().max(l.abs()),
    }
}

pub fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleScan {
    pub triangles: usize,
    /// Violating triangles, with the number of infinite edges in each.
    pub violations: Vec<([NodeId; 3], usize)>,
}

impl TriangleScan {
    /// Every violating triangle has exactly one infinite edge.
    pub fn only_single_infinite(&self) -> bool {
        self.violations.iter().all(|&(_, inf)| inf == 1)
    }
}

/// Checks every triangle under all three labelings.
pub fn triangle_scan(g: &SppGraph, rtol: f64) -> TriangleScan {
    let v = g.node_count();
    let mut scan = TriangleScan::default();
    for a in 0..v {
        for b in a + 1..v {
            let ab = g.w(a, b);
            for c in b + 1..v {
                let (ac, bc) = (g.w(a, c), g.w(b, c));
                scan.triangles += 1;
                let ok = at_least(ac + bc, ab, rtol) && at_least(ab + bc, ac, rtol) && at_least(ab + ac, bc, rtol);
                if !ok {
                    let inf = [ab, ac, bc].iter().filter(|w| !w.is_finite()).count();
                    scan.violations.push(([a, b, c], inf));
                }
            }
        }
    }
    scan
}

/// Random subpath orders with random orientations, as node tours.
pub fn random_finite_tours(n: usize, count: usize, seed: u64) -> Vec<Vec<NodeId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let order: Vec<Step> = perm
                .into_iter()
                .map(|i| Step::new(i, if rng.gen_bool(0.5) { Orientation::Reverse } else { Orientation::Forward }))
                .collect();
            order_to_h_trail(n, &order)
        })
        .collect()
}

/// Largest relative difference between tour lengths in the two graphs, or
/// `None` if some tour is infinite in either graph.
pub fn max_length_drift(before: &SppGraph, after: &SppGraph, tours: &[Vec<NodeId>]) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for t in tours {
        let a = before.tour_length(t).ok()?.value()?;
        let b = after.tour_length(t).ok()?.value()?;
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
    }
    Some(worst)
}

/// Stage weights next to the optimal tour weight in the repaired graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck {
    pub optimum: f64,
    pub cspp: f64,
    pub t_star: f64,
    pub mst: f64,
    pub e2: f64,
    pub matching: f64,
}

impl LemmaCheck {
    pub fn mst_below_optimum(&self) -> bool {
        self.mst < self.t_star + BOUND_SLACK
    }

    pub fn e2_within_half(&self) -> bool {
        self.e2 <= 0.5 * self.t_star + BOUND_SLACK
    }

    pub fn matching_within_half(&self) -> bool {
        self.matching <= 0.5 * self.t_star + BOUND_SLACK
    }

    pub fn ratio_bound_holds(&self) -> bool {
        self.optimum <= self.cspp + BOUND_SLACK && self.cspp <= 2.0 * self.optimum + BOUND_SLACK
    }

    pub fn t_star_matches_optimum(&self) -> bool {
        close(self.t_star, self.optimum, LENGTH_RTOL)
    }

    pub fn ratio(&self) -> f64 {
        self.cspp / self.optimum
    }
}

pub fn lemma_check(outcome: &CsppOutcome, optimum: &SppSolution) -> Result<LemmaCheck> {
    let sw = outcome.solution.stage_weights.unwrap_or_default();
    let t_star = outcome.graph.tour_length(&optimum.h_trail)?;
    Ok(LemmaCheck {
        optimum: optimum.length,
        cspp: outcome.solution.length,
        t_star: t_star.value().unwrap_or(f64::INFINITY),
        mst: sw.mst,
        e2: sw.e2,
        matching: sw.matching,
    })
}

/// Structural validity of a CSPP answer.
pub fn solution_is_valid(ws: &Workspace, g: &SppGraph, sol: &SppSolution) -> bool {
    let n = ws.len();
    let mut seen = vec![0usize; n];
    for s in &sol.order {
        seen[s.subpath] += 1;
    }
    let mut nodes = vec![0usize; 3 * n];
    for &v in &sol.h_trail {
        nodes[v] += 1;
    }
    let length_ok = if n == 1 {
        // The graph cycle runs the arc twice; the workspace tour closes on the chord.
        let sp = ws.subpath(0);
        close(sp.arc_length + sp.chord(), sol.length, LENGTH_RTOL)
            && g.tour_length(&sol.h_trail).is_ok_and(|w| w.is_finite())
    } else {
        matches!(g.tour_length(&sol.h_trail), Ok(Weight::Finite(x)) if close(x, sol.length, LENGTH_RTOL))
    };
    seen.iter().all(|&c| c == 1) && nodes.iter().all(|&c| c == 1) && length_ok
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult { name, passed, detail }
    }
}

/// Runs every property on one workspace.
pub fn run_battery(ws: &Workspace, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let g_prime = transform(ws);
    let outcome = run_cspp(ws)?;
    let g = &outcome.graph;

    let updated = outcome.report.updated_count();
    out.push(CheckResult::new(
        "ieti",
        outcome.report.subpaths.iter().all(|v| v.updated == (v.dv < 0.0)),
        if updated == 0 { "no-op".into() } else { format!("{updated} of {} subpaths repaired", ws.len()) },
    ));

    let scan = triangle_scan(g, 1e-9);
    out.push(CheckResult::new(
        "triangles",
        scan.only_single_infinite(),
        format!(
            "{} triangles, {} violating, all with exactly one infinite edge: {}",
            scan.triangles,
            scan.violations.len(),
            scan.only_single_infinite()
        ),
    ));

    let tours = random_finite_tours(ws.len(), 100, seed);
    let drift = max_length_drift(&g_prime, g, &tours);
    out.push(CheckResult::new(
        "length-preservation",
        drift.is_some_and(|d| d <= LENGTH_RTOL),
        match drift {
            Some(d) => format!("100 tours, max relative drift {d:.3e}"),
            None => "a finite tour became infinite".into(),
        },
    ));

    out.push(CheckResult::new(
        "solution",
        solution_is_valid(ws, g, &outcome.solution),
        format!("length {}", crate::fmt::sig9(outcome.solution.length)),
    ));

    if ws.len() <= ORACLE_CHECK_CAP {
        let optimum = solve_exact(ws)?;
        let lemma = lemma_check(&outcome, &optimum)?;
        out.push(CheckResult::new(
            "ratio",
            lemma.ratio_bound_holds(),
            format!("cspp/optimum = {:.6}", lemma.ratio()),
        ));
        out.push(CheckResult::new(
            "optimal-tour-weight",
            ws.len() == 1 || lemma.t_star_matches_optimum(),
            format!("W(T*) {} vs optimum {}", crate::fmt::sig9(lemma.t_star), crate::fmt::sig9(lemma.optimum)),
        ));
        out.push(CheckResult::new("lemma-mst", lemma.mst_below_optimum(), format!("W(MST) {:.6} < W(T*) {:.6}", lemma.mst, lemma.t_star)));
        out.push(CheckResult::new("lemma-e2", lemma.e2_within_half(), format!("W(E2) {:.6} <= W(T*)/2", lemma.e2)));
        out.push(CheckResult::new(
            "lemma-matching",
            lemma.matching_within_half(),
            format!("W(PM*) {:.6} <= W(T*)/2", lemma.matching),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ieti::repaired_graph;
    use crate::workspace::{Point, Subpath};

    #[test]
    fn g_prime_violates_with_finite_triangles_when_curved() {
        let ws = Workspace::new(vec![
            Subpath::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), 5.0).unwrap(),
            Subpath::straight(Point::new(0.0, 1.0), Point::new(1.0, 1.0)).unwrap(),
        ])
        .unwrap();
        let before = triangle_scan(&transform(&ws), 1e-9);
        assert!(!before.only_single_infinite());
        let (g, _) = repaired_graph(&ws);
        let after = triangle_scan(&g, 1e-9);
        assert!(after.only_single_infinite());
        assert!(!after.violations.is_empty());
        assert_eq!(after.triangles, 20);
    }

    #[test]
    fn battery_passes_on_straight_and_curved() {
        let ws = Workspace::random(6, 100.0, 1.0, 2).unwrap();
        let checks = run_battery(&ws, 0).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert_eq!(checks[0].detail, "no-op");
        let ws = Workspace::random(8, 100.0, 3.0, 2).unwrap();
        let checks = run_battery(&ws, 0).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert_eq!(checks.len(), 9);
    }

    #[test]
    fn random_tours_are_finite_in_g_prime() {
        let ws = Workspace::random(7, 10.0, 2.0, 5).unwrap();
        let g = transform(&ws);
        for t in random_finite_tours(7, 50, 1) {
            assert!(g.tour_length(&t).unwrap().is_finite());
        }
    }
}
