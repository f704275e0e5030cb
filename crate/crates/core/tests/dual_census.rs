mod common;

use std::collections::BTreeSet;

use taut_core::dual::*;
use taut_core::{parse_triangulation, TautTriangulation};
use taut_core::veering::{veer_and_hinge, CuspComplex};

#[test]
fn face_tracks_agree_and_tips_split_three_ways() {
    for r in common::census() {
        let tri = parse_triangulation(&r.record).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        let vd = veer_and_hinge(&tri, &cx).unwrap();
        let fe = FaceEdges::new(&tri);
        let a = tracks_from_positions(&tri);
        let b = tracks_from_veer(&tri, &fe, &vd).unwrap();
        let mut bad = 0;
        for f in 0..tri.n_faces() {
            if a.stable_target[f] != b.stable_target[f] || a.unstable_target[f] != b.unstable_target[f] {
                bad += 1;
            }
        }
        assert_eq!(bad, 0, "{}: {bad} of {} faces disagree", r.record, tri.n_faces());
        assert!(tip_trichotomy_violations(&cx, &a).is_empty(), "{}", r.record);
    }
}

fn gamma_cycle_count(g: &DualGraph) -> usize {
    fn go(g: &DualGraph, start: usize, v: usize, used: &mut Vec<bool>) -> usize {
        let mut n = 0;
        for e in 0..g.n_edges() {
            if g.tail[e] != v {
                continue;
            }
            let h = g.head[e];
            if h == start {
                n += 1;
            } else if h > start && !used[h] {
                used[h] = true;
                n += go(g, start, h, used);
                used[h] = false;
            }
        }
        n
    }
    (0..g.n_vertices)
        .map(|s| {
            let mut used = vec![false; g.n_vertices];
            used[s] = true;
            go(g, s, s, &mut used)
        })
        .sum()
}

#[test]
fn dual_graph_shape() {
    let tri = parse_triangulation(common::FIG8).unwrap();
    let g = DualGraph::new(&tri).unwrap();
    assert_eq!((g.n_vertices, g.n_edges()), (2, 4));
    assert!(g.strongly_connected());
    for r in common::census() {
        let tri = parse_triangulation(&r.record).unwrap();
        let g = DualGraph::new(&tri).unwrap();
        for v in 0..g.n_vertices {
            assert_eq!((g.out_edges(v).len(), g.in_edges(v).len()), (2, 2));
        }
        // The incidence matrix has rank #vertices − 1 on a connected graph.
        let inc = taut_core::snf::from_i64(&g.incidence());
        let rank = taut_core::snf::smith(&inc, g.n_vertices, g.n_edges()).rank();
        assert_eq!(g.n_edges() - rank, tri.n_tets() + 1);
    }
}

#[test]
fn simple_cycles_match_dfs() {
    for r in common::small(8) {
        let tri = parse_triangulation(&r.record).unwrap();
        let g = DualGraph::new(&tri).unwrap();
        let cycles = g.simple_cycles(1_000_000).unwrap();
        assert_eq!(cycles.len(), gamma_cycle_count(&g), "{}", r.record);
        for c in &cycles {
            assert!(is_gamma_cycle(&tri, c));
        }
        assert!(g.simple_cycles(cycles.len() - 1).is_none());
    }
}

/// Every normal loop of exactly `len` steps whose crossings are all of the
/// given flavor, by trying every step sequence. Loops are deduplicated by
/// rotation and must visit each (face, entry) state once.
fn brute_force_loops(tri: &TautTriangulation, fe: &FaceEdges, flavor: Flavor, len: usize) -> BTreeSet<Vec<LoopStep>> {
    let mut steps = Vec::new();
    for face in 0..tri.n_faces() {
        for entry in 0..3 {
            for exit in 0..3 {
                if entry != exit {
                    steps.push(LoopStep { face, entry, exit });
                }
            }
        }
    }
    let ok = |a: &LoopStep, b: &LoopStep| {
        let p = fe.pos[a.face][a.exit];
        let q = fe.pos[b.face][b.entry];
        if p.edge != q.edge || p.side_a == q.side_a {
            return false;
        }
        match flavor {
            Flavor::Stable => !p.topmost() && q.topmost(),
            Flavor::Unstable => p.bottommost() && !q.bottommost(),
        }
    };
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; len];
    'outer: loop {
        let seq: Vec<LoopStep> = idx.iter().map(|&i| steps[i]).collect();
        let states: BTreeSet<(usize, usize)> = seq.iter().map(|s| (s.face, s.entry)).collect();
        if states.len() == len && (0..len).all(|i| ok(&seq[i], &seq[(i + 1) % len])) {
            out.insert(canonical_rotation(&seq));
        }
        for k in (0..len).rev() {
            idx[k] += 1;
            if idx[k] < steps.len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    out
}

#[test]
fn loop_search_matches_brute_force() {
    for r in common::small(3) {
        let tri = parse_triangulation(&r.record).unwrap();
        let fe = FaceEdges::new(&tri);
        for flavor in [Flavor::Stable, Flavor::Unstable] {
            let (loops, truncated) = enumerate_loops(&tri, &fe, flavor, 4, usize::MAX);
            assert!(!truncated);
            let found: BTreeSet<Vec<LoopStep>> = loops.iter().map(|l| l.steps.clone()).collect();
            let mut oracle = BTreeSet::new();
            for len in 1..=4 {
                oracle.extend(brute_force_loops(&tri, &fe, flavor, len));
            }
            assert_eq!(found, oracle, "{} {flavor:?}", r.record);
            for l in &loops {
                assert_eq!(classify_loop(&fe, &l.steps).as_ref(), Some(l));
                match flavor {
                    Flavor::Stable => assert!(l.stable),
                    Flavor::Unstable => assert!(l.unstable),
                }
                assert!(!l.shallow_stable || l.stable);
                assert!(!l.shallow_unstable || l.unstable);
            }
        }
    }
}

#[test]
fn figure_eight_has_a_short_shallow_stable_loop() {
    let tri = parse_triangulation(common::FIG8).unwrap();
    let fe = FaceEdges::new(&tri);
    let shallow = (1..=4)
        .flat_map(|len| brute_force_loops(&tri, &fe, Flavor::Stable, len))
        .filter(|s| classify_loop(&fe, s).unwrap().shallow_stable)
        .count();
    assert!(shallow > 0);
    let (loops, _) = enumerate_loops(&tri, &fe, Flavor::Stable, 4, usize::MAX);
    assert!(loops.iter().any(|l| l.shallow_stable));
}

#[test]
fn branch_curves_pass_through_fans_and_hinges() {
    let mut total = 0;
    for r in common::small(10) {
        let tri = parse_triangulation(&r.record).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        let vd = veer_and_hinge(&tri, &cx).unwrap();
        let fe = FaceEdges::new(&tri);
        let (curves, _) = branch_curves(&tri, &fe, 2 * tri.n_tets(), 10_000);
        if tri.n_tets() <= 3 {
            let mut oracle = BTreeSet::new();
            for len in 1..=2 * tri.n_tets().min(2) {
                for s in brute_force_loops(&tri, &fe, Flavor::Stable, len) {
                    if classify_loop(&fe, &s).unwrap().unstable {
                        oracle.insert(s);
                    }
                }
            }
            let short: BTreeSet<Vec<LoopStep>> = curves
                .iter()
                .filter(|c| c.normal_loop.steps.len() <= 2 * tri.n_tets().min(2))
                .map(|c| c.normal_loop.steps.clone())
                .collect();
            assert_eq!(short, oracle, "{}", r.record);
        }
        for c in &curves {
            assert!(is_gamma_cycle(&tri, &c.pushup) && is_gamma_cycle(&tri, &c.pushdown));
            let up: BTreeSet<usize> = c.pushup.iter().map(|&f| tri.tet_above(f)).collect();
            let down: BTreeSet<usize> = c.pushdown.iter().map(|&f| tri.tet_below(f)).collect();
            for s in &c.normal_loop.steps {
                let p = fe.pos[s.face][s.exit];
                let star = tri.edge_star(p.edge);
                let fan = |side_a: bool| -> Vec<usize> {
                    let r = if side_a { 1..star.above } else { star.above + 1..star.corners.len() };
                    star.corners[r].iter().map(|c| c.tet).collect()
                };
                assert!(up.contains(&star.corners[star.above].tet));
                assert!(fan(p.side_a).iter().all(|t| up.contains(t)), "{}", r.record);
                assert!(down.contains(&star.corners[0].tet));
                assert!(fan(!p.side_a).iter().all(|t| down.contains(t)), "{}", r.record);
            }
            // Shallow crossings add nothing beyond one tetrahedron per step.
            if c.normal_loop.shallow_stable {
                assert_eq!(c.pushup.len(), c.normal_loop.steps.len());
            }
        }
        assert!(hinge_violations(&tri, &vd, &curves).is_empty(), "{}", r.record);
        total += curves.len();
    }
    assert!(total > 0);
}
