//! Exact solutions for small workspaces.
//!
//! [`solve_exact`] is a dynamic program over (visited set, last subpath, last
//! orientation); [`enumerate_all`] lists every one of the `n! * 2^n` ordered,
//! oriented tours and serves as its cross-check.

use crate::cspp::{Orientation, SppSolution, Step};
use crate::error::{Error, Result};
use crate::workspace::{Point, Workspace};

pub const EXACT_CAP: usize = 14;
pub const ENUMERATION_CAP: usize = 6;

/// Entry and exit point of subpath `i` in orientation `o` (0 forward).
fn ends(ws: &Workspace, i: usize, o: usize) -> (Point, Point) {
    let sp = ws.subpath(i);
    if o == 0 {
        (sp.start, sp.end)
    } else {
        (sp.end, sp.start)
    }
}

fn orientation(o: usize) -> Orientation {
    if o == 0 {
        Orientation::Forward
    } else {
        Orientation::Reverse
    }
}

/// Globally optimal tour. Subpath 1 is placed first, forward; every tour has
/// a rotation/reflection of that shape with the same length.
pub fn solve_exact(ws: &Workspace) -> Result<SppSolution> {
    let n = ws.len();
    if n > EXACT_CAP {
        return Err(Error::TooLarge { what: "exact solver", cap: EXACT_CAP, n });
    }
    let full = 1usize << n;
    let idx = |mask: usize, j: usize, o: usize| (mask * n + j) * 2 + o;
    let mut cost = vec![f64::INFINITY; full * n * 2];
    let mut parent = vec![u32::MAX; full * n * 2];
    cost[idx(1, 0, 0)] = ws.subpath(0).arc_length;

    // Connector distance from the exit of (j, oj) to the entry of (k, ok).
    let mut link = vec![0.0; n * 2 * n * 2];
    for j in 0..n {
        for oj in 0..2 {
            for k in 0..n {
                for ok in 0..2 {
                    link[((j * 2 + oj) * n + k) * 2 + ok] = ends(ws, j, oj).1.distance(&ends(ws, k, ok).0);
                }
            }
        }
    }
    let link = |j: usize, oj: usize, k: usize, ok: usize| link[((j * 2 + oj) * n + k) * 2 + ok];

    for mask in (1..full).step_by(2) {
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            for oj in 0..2 {
                let here = cost[idx(mask, j, oj)];
                if !here.is_finite() {
                    continue;
                }
                for k in 0..n {
                    if mask & (1 << k) != 0 {
                        continue;
                    }
                    let next = mask | (1 << k);
                    for ok in 0..2 {
                        let c = here + link(j, oj, k, ok) + ws.subpath(k).arc_length;
                        let slot = idx(next, k, ok);
                        if c < cost[slot] {
                            cost[slot] = c;
                            parent[slot] = (j * 2 + oj) as u32;
                        }
                    }
                }
            }
        }
    }

    let last_mask = full - 1;
    let mut best = (f64::INFINITY, 0, 0);
    for j in 0..n {
        for oj in 0..2 {
            let c = cost[idx(last_mask, j, oj)] + link(j, oj, 0, 0);
            if c < best.0 {
                best = (c, j, oj);
            }
        }
    }

    let (_, mut j, mut oj) = best;
    let mut mask = last_mask;
    let mut order = Vec::with_capacity(n);
    loop {
        order.push(Step::new(j, orientation(oj)));
        let p = parent[idx(mask, j, oj)];
        if p == u32::MAX {
            break;
        }
        mask &= !(1 << j);
        j = p as usize / 2;
        oj = p as usize % 2;
    }
    order.reverse();
    SppSolution::from_order(ws, order)
}

/// All `n! * 2^n` feasible tours, each with its length.
pub fn enumerate_all(ws: &Workspace) -> Result<Vec<SppSolution>> {
    let n = ws.len();
    if n > ENUMERATION_CAP {
        return Err(Error::TooLarge { what: "enumeration", cap: ENUMERATION_CAP, n });
    }
    let mut perms = Vec::new();
    heap_permutations(&mut (0..n).collect(), n, &mut perms);
    let mut out = Vec::with_capacity(perms.len() << n);
    for perm in perms {
        for bits in 0..1usize << n {
            let order = perm.iter().enumerate().map(|(k, &i)| Step::new(i, orientation((bits >> k) & 1))).collect();
            out.push(SppSolution::from_order(ws, order)?);
        }
    }
    Ok(out)
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workspace::Subpath;

    fn two_straight() -> Workspace {
        Workspace::new(vec![
            Subpath::straight(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap(),
            Subpath::straight(Point::new(2.0, 0.0), Point::new(3.0, 0.0)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn two_straight_subpaths_by_hand() {
        let ws = two_straight();
        let all = enumerate_all(&ws).unwrap();
        assert_eq!(all.len(), 8);
        let mut lengths: Vec<f64> = all.iter().map(|s| s.length).collect();
        lengths.sort_by(f64::total_cmp);
        // orders (1,2) and (2,1) with four orientation pairs each:
        // ff 1+1+1+3, fr 1+2+1+2, rf 1+2+1+2, rr 1+3+1+1, mirrored for (2,1)
        assert_eq!(lengths, vec![6.0, 6.0, 6.0, 6.0, 6.0, 6.0, 6.0, 6.0]);
        assert_eq!(solve_exact(&ws).unwrap().length, 6.0);
    }

    #[test]
    fn offset_pair_enumeration() {
        // Parallel unit segments one apart: ff = 1 + sqrt2 + 1 + sqrt2, fr = 1 + 1 + 1 + 1
        let ws = Workspace::new(vec![
            Subpath::straight(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap(),
            Subpath::straight(Point::new(0.0, 1.0), Point::new(1.0, 1.0)).unwrap(),
        ])
        .unwrap();
        let all = enumerate_all(&ws).unwrap();
        let best = all.iter().map(|s| s.length).fold(f64::INFINITY, f64::min);
        assert_eq!(best, 4.0);
        assert_eq!(all.iter().filter(|s| s.length == 4.0).count(), 4);
        assert_eq!(solve_exact(&ws).unwrap().length, 4.0);
    }

    #[test]
    fn single_subpath() {
        let ws = Workspace::new(vec![Subpath::new(Point::new(1.0, 1.0), Point::new(4.0, 5.0), 9.0).unwrap()]).unwrap();
        let sol = solve_exact(&ws).unwrap();
        assert_eq!(sol.length, 14.0);
        assert_eq!(sol.order, vec![Step::new(0, Orientation::Forward)]);
        assert_eq!(enumerate_all(&ws).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_counts() {
        for (n, count) in [(2, 8), (3, 48), (4, 384)] {
            let ws = Workspace::random(n, 10.0, 2.0, n as u64).unwrap();
            assert_eq!(enumerate_all(&ws).unwrap().len(), count);
        }
    }

    #[test]
    fn caps() {
        let ws = Workspace::random(7, 10.0, 1.0, 0).unwrap();
        assert!(matches!(enumerate_all(&ws), Err(Error::TooLarge { .. })));
        let ws = Workspace::random(15, 10.0, 1.0, 0).unwrap();
        assert!(matches!(solve_exact(&ws), Err(Error::TooLarge { cap: 14, .. })));
    }

    #[test]
    fn dp_matches_enumeration() {
        for seed in 0..60u64 {
            let n = 1 + (seed as usize % 5);
            let ws = Workspace::random(n, 20.0, 1.0 + (seed % 4) as f64 * 0.7, seed).unwrap();
            let best = enumerate_all(&ws).unwrap().into_iter().map(|s| s.length).fold(f64::INFINITY, f64::min);
            assert_eq!(solve_exact(&ws).unwrap().length, best, "seed {seed}");
        }
    }

    #[test]
    fn cap_size_is_tractable() {
        let ws = Workspace::random(EXACT_CAP, 100.0, 2.0, 1).unwrap();
        let sol = solve_exact(&ws).unwrap();
        assert_eq!(sol.order.len(), EXACT_CAP);
        assert_eq!(sol.order[0], Step::new(0, Orientation::Forward));
    }
}
