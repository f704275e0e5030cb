//! Acceptance suite: one test per criterion, each printing a single verdict line.
//!
//! Everything runs over the bundled census sample (127 records, 2 to 16
//! tetrahedra). Reference values come from the oracle module or are recomputed
//! here from primitive data, never read back from the code under test.

mod oracle;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::OnceLock;

use flat_engine::boundary::trace_curves;
use flat_engine::patches::{cellular_chi, patches, surface_chi, Track};
use flat_engine::simplify::{scramble, simplify, Outcome, SimplifyConfig};
use flat_engine::{apply_move, FlattenedSurface, Frame, MoveKind, MoveRecord, MoveSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use taut_cli::config::{prepare, Mode, RunConfig};
use taut_cli::input::split_records;
use taut_cli::report::cmd_report;
use taut_cli::to_json;
use taut_core::carried::{solve_carried, BoundaryKind};
use taut_core::cones::{dot, euler_class, homology_directions, in_cone, RationalCone};
use taut_core::dual::{branch_curves, tip_trichotomy_violations, tracks_from_positions, tracks_from_veer, FaceEdges};
use taut_core::homology::{self, fill, word_chain, Fillings};
use taut_core::veering::{check_fans, veer_and_hinge, CuspComplex, Veer};
use taut_core::{parse_triangulation, TautTriangulation};

fn census() -> Vec<String> {
    split_records("census", include_str!("../../../data/census_sample.txt"))
        .into_iter()
        .map(|r| r.text)
        .collect()
}

fn verdict(n: usize, name: &str, failures: &[String], detail: String) {
    let ok = failures.is_empty();
    println!("criterion {n} [{name}]: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    for f in failures.iter().take(20) {
        println!("  {f}");
    }
    assert!(ok, "criterion {n} failed with {} violations", failures.len());
}

/// Homological longitude on every cusp, when each has at least three prongs.
fn longitude_filling(tri: &TautTriangulation, cx: &CuspComplex) -> Option<Fillings> {
    let h1 = homology::h1_unfilled(tri).ok()?;
    let mut f = Fillings::new();
    for c in 0..tri.n_cusps() {
        let s = homology::homological_longitude(tri, cx, &h1, c).ok()??;
        if cx.prongs(c, s.p, s.q) < 3 {
            return None;
        }
        f.insert(c, s);
    }
    Some(f)
}

fn sum_of(gens: &[Vec<BigInt>], dim: usize) -> Vec<BigInt> {
    let mut a = vec![BigInt::zero(); dim];
    for g in gens {
        for (x, y) in a.iter_mut().zip(g) {
            *x += y;
        }
    }
    a
}

// 1

#[test]
fn criterion_1_structural_lemmas() {
    let mut failures = Vec::new();
    let mut curves_seen = 0;
    for rec in census() {
        let tri = parse_triangulation(&rec).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        let vd = veer_and_hinge(&tri, &cx).unwrap();
        for v in check_fans(&tri, &cx, &vd) {
            failures.push(format!("{rec}: fan lemma {v:?}"));
        }
        let fe = FaceEdges::new(&tri);
        let pos = tracks_from_positions(&tri);
        match tracks_from_veer(&tri, &fe, &vd) {
            Ok(by_veer) => {
                for f in 0..tri.n_faces() {
                    if pos.stable_target[f] != by_veer.stable_target[f] || pos.unstable_target[f] != by_veer.unstable_target[f] {
                        failures.push(format!("{rec}: face {f} tracks disagree with the veer"));
                    }
                }
            }
            Err(f) => failures.push(format!("{rec}: no veer-based track at face {f}")),
        }
        for s in tip_trichotomy_violations(&cx, &pos) {
            failures.push(format!("{rec}: tip trichotomy fails on side {s}"));
        }
        // Hinge recomputed from the veers of top and bottom edges.
        let hinge: Vec<bool> = (0..tri.n_tets())
            .map(|t| vd.veer[tri.top_edge(t)] != vd.veer[tri.bottom_edge(t)])
            .collect();
        if hinge != vd.hinge {
            failures.push(format!("{rec}: hinge flags disagree"));
        }
        if vd.veer.iter().all(|&v| v == Veer::Left) || vd.veer.iter().all(|&v| v == Veer::Right) {
            failures.push(format!("{rec}: every edge has the same veer"));
        }
        let (curves, _) = branch_curves(&tri, &fe, 2 * tri.n_tets(), 20_000);
        for (i, c) in curves.iter().enumerate() {
            let up: BTreeSet<usize> = c.pushup.iter().flat_map(|&f| [tri.tet_above(f), tri.tet_below(f)]).collect();
            let down: BTreeSet<usize> = c.pushdown.iter().flat_map(|&f| [tri.tet_above(f), tri.tet_below(f)]).collect();
            if !up.iter().any(|&t| hinge[t]) || !down.iter().any(|&t| hinge[t]) {
                failures.push(format!("{rec}: branch curve {i} misses every hinge tetrahedron"));
            }
        }
        curves_seen += curves.len();
    }
    verdict(
        1,
        "structural lemmas",
        &failures,
        format!("{} records, {curves_seen} branch curves", census().len()),
    );
}

// 2 and 5 share the scrambled runs.

struct Start {
    record: String,
    filled: bool,
    fr: Frame,
    st: FlattenedSurface,
}

fn start_of(record: &str, fillings: &Fillings) -> Option<Start> {
    let tri = parse_triangulation(record).ok()?;
    let fr = Frame::new(tri, fillings).ok()?;
    let hd = homology_directions(&fr.tri, &fr.fh, 200_000).ok()?;
    let alpha = sum_of(&hd.cone.dual().generators, fr.fh.h1.rank);
    if alpha.iter().all(Zero::is_zero) {
        return None;
    }
    let s = solve_carried(&fr.tri, &fr.cx, &fr.fh, &hd, None, &alpha, None).ok()?;
    let st = FlattenedSurface::from_carried(&fr, &s.weights).ok()?;
    Some(Start {
        record: record.to_string(),
        filled: !fillings.is_empty(),
        fr,
        st,
    })
}

/// Carried starting states: every record unfilled, plus longitude fillings where admissible.
fn starts() -> &'static [Start] {
    static ALL: OnceLock<Vec<Start>> = OnceLock::new();
    ALL.get_or_init(|| {
        let mut out = Vec::new();
        for rec in census() {
            if let Some(s) = start_of(&rec, &Fillings::new()) {
                out.push(s);
            }
            let tri = parse_triangulation(&rec).unwrap();
            let cx = CuspComplex::build(&tri).unwrap();
            if let Some(f) = longitude_filling(&tri, &cx) {
                if let Some(s) = start_of(&rec, &f) {
                    out.push(s);
                }
            }
        }
        out
    })
}

/// Σ ind over each track's patches against 2χ from the cell count.
fn index_defect(fr: &Frame, st: &FlattenedSurface) -> Option<String> {
    let curves = trace_curves(fr, st);
    let chi = cellular_chi(fr, st, &curves);
    for t in [Track::Stable, Track::Unstable] {
        let sum: i64 = patches(fr, st, &curves, t).iter().map(|p| p.index).sum();
        if sum != 2 * chi {
            return Some(format!("{t:?}: Σ ind = {sum}, 2χ = {}", 2 * chi));
        }
    }
    None
}

/// The per-move contract, written out independently of the engine.
fn contract_holds(kind: MoveKind, da: i64, dv: Option<i64>) -> bool {
    match kind {
        MoveKind::Face | MoveKind::DiskRemoval => da == -2,
        MoveKind::InverseFace => da == 2,
        MoveKind::FlipUp | MoveKind::FlipDown | MoveKind::Annulus => da == 0,
        MoveKind::Tetrahedron => da == 0 && dv == Some(-1),
        MoveKind::WidthOne => da <= -2,
    }
}

/// Replay a simplification log from `from`, calling `visit` on every state
/// passed through, including the inner steps of composite moves.
fn replay(fr: &Frame, from: &FlattenedSurface, log: &[MoveRecord], visit: &mut dyn FnMut(&FlattenedSurface), bad: &mut Vec<String>) -> FlattenedSurface {
    let mut cur = from.clone();
    visit(&cur);
    for r in log {
        if !contract_holds(r.kind, r.delta_area, r.delta_volume) {
            bad.push(format!("{:?} broke its contract: Δarea {} Δvolume {:?}", r.site, r.delta_area, r.delta_volume));
        }
        if r.steps.len() > 1 {
            let mut inner = cur.clone();
            for m in &r.steps {
                match apply_move(fr, &inner, m) {
                    Ok(a) => {
                        if !contract_holds(m.kind(), a.delta_area, a.delta_volume) {
                            bad.push(format!("step {m:?} broke its contract: Δarea {} Δvolume {:?}", a.delta_area, a.delta_volume));
                        }
                        inner = a.state;
                        visit(&inner);
                    }
                    Err(e) => {
                        bad.push(format!("step {m:?} does not replay: {e}"));
                        break;
                    }
                }
            }
        }
        match apply_move(fr, &cur, &r.site) {
            Ok(a) => {
                if a.delta_area != r.delta_area {
                    bad.push(format!("{:?} replays with Δarea {}", r.site, a.delta_area));
                }
                cur = a.state;
                visit(&cur);
            }
            Err(e) => {
                bad.push(format!("{:?} does not replay: {e}", r.site));
                break;
            }
        }
    }
    cur
}

#[derive(Serialize)]
struct Archive<'a> {
    record: &'a str,
    fillings: &'a Fillings,
    seed: u64,
    k: usize,
    scramble: &'a [MoveSpec],
    scrambled: &'a FlattenedSurface,
    outcome: &'a Outcome,
}

fn archive_dir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn criterion_2_index_bookkeeping() {
    let mut failures = Vec::new();
    let mut states = 0usize;
    for s in starts() {
        for (seed, k) in [(100, 0), (101, 6), (102, 14)] {
            let (sc, moves) = scramble(&s.fr, &s.st, k, seed);
            let mut visit = |st: &FlattenedSurface| {
                states += 1;
                if let Some(d) = index_defect(&s.fr, st) {
                    failures.push(format!("{} seed {seed}: {d}", s.record));
                }
            };
            // through the scramble
            let mut cur = s.st.clone();
            visit(&cur);
            for m in &moves {
                cur = apply_move(&s.fr, &cur, m).unwrap().state;
                visit(&cur);
            }
            // and back
            let out = simplify(&s.fr, &sc, &SimplifyConfig::default()).unwrap();
            let mut bad = Vec::new();
            replay(&s.fr, &sc, &out.log, &mut visit, &mut bad);
        }
    }
    verdict(
        2,
        "2χ = Σ ind",
        &failures,
        format!("{states} states over {} starting surfaces", starts().len()),
    );
}

// 3

fn definitional_dual(cone: &RationalCone, y: &[BigInt]) -> bool {
    cone.spanning_set().iter().all(|g| !dot(g, y).is_negative())
}

#[test]
fn criterion_3_cone_duality() {
    let mut failures = Vec::new();
    let mut functionals = 0;
    let mut inside = 0;
    let mut cones = 0;
    for rec in census() {
        let tri = parse_triangulation(&rec).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        let mut modes = vec![Fillings::new()];
        modes.extend(longitude_filling(&tri, &cx));
        for f in modes {
            cones += 1;
            let fh = fill(&tri, &cx, &f).unwrap();
            let dim = fh.h1.rank;
            let c = homology_directions(&tri, &fh, 200_000).unwrap().cone;
            let d = c.dual();
            let dd = d.dual();
            let tag = if f.is_empty() { "unfilled" } else { "filled" };
            // mutual extreme-ray containment
            for g in dd.spanning_set() {
                if !in_cone(&c.spanning_set(), &g, dim) {
                    failures.push(format!("{rec} {tag}: ray {g:?} of the double dual is outside the cone"));
                }
            }
            for g in c.spanning_set() {
                if !in_cone(&dd.spanning_set(), &g, dim) {
                    failures.push(format!("{rec} {tag}: ray {g:?} of the cone is outside the double dual"));
                }
            }
            for g in d.spanning_set() {
                if !definitional_dual(&c, &g) {
                    failures.push(format!("{rec} {tag}: dual ray {g:?} pairs negatively with the cone"));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(dim as u64 * 1000 + tri.n_tets() as u64);
            for _ in 0..100 {
                let y: Vec<BigInt> = (0..dim).map(|_| BigInt::from(rng.gen_range(-10i64..=10))).collect();
                functionals += 1;
                let by_def = definitional_dual(&c, &y);
                let by_facets = d.contains_by_facets(&y);
                let by_lp = d.contains_by_lp(&y);
                inside += usize::from(by_def);
                if by_def != by_facets || by_def != by_lp {
                    failures.push(format!("{rec} {tag}: {y:?} definition {by_def} facets {by_facets} lp {by_lp}"));
                }
            }
        }
    }
    verdict(
        3,
        "cone duality",
        &failures,
        format!("{cones} cones, {functionals} functionals, {inside} inside the dual"),
    );
}

// 4

/// Upward rungs crossed by a boundary curve, counted from its arcs.
fn rungs_of(cx: &CuspComplex, arcs: &[(usize, u64)]) -> usize {
    arcs.iter()
        .filter(|&&(side, _)| {
            let sd = &cx.sides[side];
            !sd.pole && cx.ladders[cx.tip_ladder[sd.below]].upward
        })
        .count()
}

#[test]
fn criterion_4_norm_certificates() {
    let mut failures = Vec::new();
    let mut surfaces = 0;
    let mut records = 0;
    for rec in census() {
        let tri = parse_triangulation(&rec).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        let Some(f) = longitude_filling(&tri, &cx) else { continue };
        records += 1;
        let fh = fill(&tri, &cx, &f).unwrap();
        let hd = homology_directions(&tri, &fh, 200_000).unwrap();
        let e = euler_class(&tri, &fh).unwrap();
        // e = ½ Σ (2 − prongs) · core, rebuilt from the fillings
        let mut euler = vec![BigRational::zero(); fh.h1.rank];
        for (c, s) in &f {
            let coef = BigRational::new(BigInt::from(2 - cx.prongs(*c, s.p, s.q) as i64), BigInt::from(2));
            for (x, k) in euler.iter_mut().zip(&fh.core_classes[c]) {
                *x += &coef * BigRational::from_integer(k.clone());
            }
        }
        for alpha in hd.cone.dual().spanning_set() {
            let s = match solve_carried(&tri, &cx, &fh, &hd, Some(&e), &alpha, None) {
                Ok(s) => s,
                Err(err) => {
                    failures.push(format!("{rec} {alpha:?}: {err}"));
                    continue;
                }
            };
            surfaces += 1;
            let pairing: BigRational = -euler
                .iter()
                .zip(&alpha)
                .map(|(x, a)| x * BigRational::from_integer(a.clone()))
                .sum::<BigRational>();
            if pairing != BigRational::from_integer(BigInt::from(-s.chi_filled)) {
                failures.push(format!("{rec} {alpha:?}: −χ = {} but ⟨−e, α⟩ = {pairing}", -s.chi_filled));
            }
            // cell count from the weights
            let total: u64 = s.weights.iter().sum();
            let interior: u64 = (0..tri.n_edges())
                .map(|k| tri.edge_star(k).a_faces().iter().map(|&x| s.weights[x]).sum::<u64>())
                .sum();
            let cells = s.cells;
            if cells.hexagons != total || cells.interior_edges != interior {
                failures.push(format!("{rec} {alpha:?}: cell counts {cells:?} do not match the weights"));
            }
            let chi = cells.vertices as i64 - (interior + cells.boundary_edges) as i64 + total as i64;
            if 2 * chi != -(total as i64) {
                failures.push(format!("{rec} {alpha:?}: cellular χ {chi} but Σw = {total}"));
            }
            let mut meridional = 0;
            for b in &s.boundary {
                let m = f[&b.cusp];
                let all = |want: (i64, i64)| b.curves.iter().all(|c| c.slope == want || c.slope == (-want.0, -want.1));
                let ok = match b.kind {
                    BoundaryKind::Empty => b.curves.is_empty(),
                    BoundaryKind::Meridional => !b.curves.is_empty() && all((m.p, m.q)),
                    BoundaryKind::LadderpoleNulhomologous => {
                        let sum = b.curves.iter().fold((0, 0), |a, c| (a.0 + c.slope.0, a.1 + c.slope.1));
                        all((0, 1)) && sum == (0, 0)
                    }
                    BoundaryKind::Other => false,
                };
                if !ok {
                    failures.push(format!("{rec} {alpha:?}: cusp {} boundary is not {:?}", b.cusp, b.kind));
                }
                if b.kind == BoundaryKind::Meridional {
                    meridional += b.curves.len();
                    let want = cx.prongs(b.cusp, m.p, m.q) as usize;
                    for c in &b.curves {
                        if rungs_of(&cx, &c.arcs) != want {
                            failures.push(format!("{rec} {alpha:?}: cap on cusp {} has {} rungs, {want} prongs", b.cusp, rungs_of(&cx, &c.arcs)));
                        }
                    }
                }
            }
            if s.caps.len() != meridional || s.caps.iter().any(|c| c.rungs as u64 != c.prongs) {
                failures.push(format!("{rec} {alpha:?}: caps {:?} for {meridional} meridians", s.caps));
            }
            if s.chi_filled != s.chi_unfilled + meridional as i64 {
                failures.push(format!("{rec} {alpha:?}: capping changed χ wrongly"));
            }
        }
    }
    if surfaces == 0 {
        failures.push("no filled record to certify".into());
    }
    verdict(
        4,
        "norm certificates",
        &failures,
        format!("{surfaces} extreme rays over {records} filled records"),
    );
}

// 5

#[test]
fn criterion_5_scramble_and_recover() {
    let mut failures = Vec::new();
    let mut runs = 0usize;
    let mut stuck = Vec::new();
    let mut moves_used = std::collections::BTreeMap::<String, usize>::new();
    for s in starts() {
        let fr = &s.fr;
        let class = s.st.class(fr);
        let chi = surface_chi(fr, &s.st, &trace_curves(fr, &s.st));
        for (seed, k) in [(0u64, 8usize), (1, 20)] {
            runs += 1;
            let (sc, moves) = scramble(fr, &s.st, k, seed);
            let tag = format!("{}{} seed {seed} k {k}", s.record, if s.filled { " filled" } else { "" });
            let out = match simplify(fr, &sc, &SimplifyConfig::default()) {
                Ok(o) => o,
                Err(e) => {
                    failures.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            for r in &out.log {
                *moves_used.entry(r.kind.to_string()).or_default() += 1;
            }
            let mut bad = Vec::new();
            let end = replay(fr, &sc, &out.log, &mut |_| {}, &mut bad);
            failures.extend(bad.into_iter().map(|b| format!("{tag}: {b}")));
            if end.canonical_key() != out.state.canonical_key() {
                failures.push(format!("{tag}: replaying the log ends elsewhere"));
            }
            if out.state.area() > sc.area() {
                failures.push(format!("{tag}: area grew from {} to {}", sc.area(), out.state.area()));
            }
            if !out.carried() {
                let file = archive_dir().join(format!("stuck-{}-{seed}-{k}.json", runs));
                let doc = Archive {
                    record: &s.record,
                    fillings: &fr.fh.fillings,
                    seed,
                    k,
                    scramble: &moves,
                    scrambled: &sc,
                    outcome: &out,
                };
                std::fs::write(&file, to_json(&doc)).unwrap();
                // the archive must reproduce the stuck state
                let (again, _) = scramble(fr, &s.st, k, seed);
                let rerun = simplify(fr, &again, &SimplifyConfig::default()).unwrap();
                if rerun.state.canonical_key() != out.state.canonical_key() {
                    failures.push(format!("{tag}: stuck run does not replay"));
                }
                stuck.push(format!("{tag} -> {}", file.display()));
                continue;
            }
            if out.state.class(fr) != class {
                failures.push(format!("{tag}: class changed"));
            }
            let curves = trace_curves(fr, &out.state);
            if cellular_chi(fr, &out.state, &curves) != chi {
                failures.push(format!("{tag}: χ changed"));
            }
        }
    }
    if runs < 100 {
        failures.push(format!("only {runs} runs"));
    }
    if stuck.len() * 100 >= runs {
        failures.push(format!("{} of {runs} runs stuck", stuck.len()));
    }
    for s in &stuck {
        println!("  stuck: {s}");
    }
    verdict(
        5,
        "scramble and recover",
        &failures,
        format!("{runs} runs, {} stuck, moves {moves_used:?}", stuck.len()),
    );
}

// 6

#[test]
fn criterion_6_determinism() {
    let text = include_str!("../../../data/census_sample.txt");
    let records = split_records("census", text);
    let mut failures = Vec::new();
    let mut bytes = 0;
    for mode in [
        Mode::Unfilled,
        Mode::Filled {
            slopes: Fillings::new(),
            longitude: true,
        },
    ] {
        let mut cfg = RunConfig {
            mode: mode.clone(),
            jobs: 1,
            ..RunConfig::default()
        };
        // filled mode needs an admissible longitude on every record of the batch
        let batch: Vec<_> = records
            .iter()
            .filter(|r| prepare(std::slice::from_ref(*r), &cfg).is_ok())
            .cloned()
            .collect();
        let prepared = prepare(&batch, &cfg).unwrap();
        let one = to_json(&cmd_report(&prepared, &cfg).unwrap());
        cfg.jobs = 8;
        let prepared = prepare(&batch, &cfg).unwrap();
        let eight = to_json(&cmd_report(&prepared, &cfg).unwrap());
        if one != eight {
            failures.push(format!("{mode:?}: reports differ"));
        }
        bytes += one.len();
    }
    verdict(6, "determinism", &failures, format!("{bytes} bytes compared"));
}

// 7

#[test]
fn criterion_7_homology_oracle() {
    let mut failures = Vec::new();
    let mut filled = 0;
    for rec in census() {
        let tri = parse_triangulation(&rec).unwrap();
        let h = homology::h1_unfilled(&tri).unwrap();
        let (n1, rels) = oracle::spine_presentation(&tri);
        let want = oracle::abelian_invariants(n1, &rels);
        if (h.rank, h.torsion.clone()) != want {
            failures.push(format!("{rec}: H1 {} but the oracle gives {want:?}", h.describe()));
        }
        let cx = CuspComplex::build(&tri).unwrap();
        let per_cusp: Vec<_> = (0..tri.n_cusps()).map(|c| homology::candidate_fillings(&cx, c, 3, 3)).collect();
        let rounds = per_cusp.iter().map(Vec::len).min().unwrap_or(0);
        for i in 0..rounds {
            let f: Fillings = per_cusp.iter().enumerate().map(|(c, o)| (c, o[i])).collect();
            let fh = fill(&tri, &cx, &f).unwrap();
            let mut rels = rels.clone();
            for pc in fh.meridians.values() {
                if !oracle::closed_gamma_path(&tri, &pc.crossing_word) {
                    failures.push(format!("{rec} {f:?}: meridian word is not a closed path"));
                }
                rels.push(word_chain(n1, &pc.crossing_word));
            }
            let want = oracle::abelian_invariants(n1, &rels);
            if (fh.h1.rank, fh.h1.torsion.clone()) != want {
                failures.push(format!("{rec} {f:?}: H1 {} but the oracle gives {want:?}", fh.h1.describe()));
            }
            filled += 1;
        }
    }
    verdict(
        7,
        "homology oracle",
        &failures,
        format!("{} records, {filled} filled presentations", census().len()),
    );
}
