//! The simplification driver and a seeded scrambler for testing it.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{disks, trace_curves};
use crate::error::EngineError;
use crate::frame::Frame;
use crate::moves::{apply_move, Applied, MoveRecord, MoveSpec};
use crate::patches::surface_chi;
use crate::state::FlattenedSurface;
use crate::status::{backtracking, bigon_status, neg_components, NegKind, StatusReport};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplifyConfig {
    /// Maximum number of recorded moves.
    pub budget: usize,
    /// Depth of the search through area-preserving moves.
    pub search_depth: usize,
    /// States visited per search.
    pub search_states: usize,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        SimplifyConfig {
            budget: 2000,
            search_depth: 6,
            search_states: 4000,
        }
    }
}

/// A state the driver could not improve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stuck {
    pub area: usize,
    pub negative_plates: usize,
    pub status: StatusReport,
    pub state: FlattenedSurface,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Outcome {
    pub state: FlattenedSurface,
    pub log: Vec<MoveRecord>,
    pub stuck: Option<Stuck>,
}

impl Outcome {
    pub fn carried(&self) -> bool {
        self.stuck.is_none()
    }
}

/// Area-reducing moves available now, in priority order.
pub fn reducing_sites(fr: &Frame, st: &FlattenedSurface) -> Vec<MoveSpec> {
    let mut out: Vec<MoveSpec> = backtracking(st)
        .into_iter()
        .map(|(face, level, k)| MoveSpec::Face { face, level, k })
        .collect();
    let curves = trace_curves(fr, st);
    let ds = disks(fr, st, &curves);
    let mut w1 = Vec::new();
    let mut dr = Vec::new();
    for d in &ds {
        let s = curves[d.curve].segs[0];
        if d.width <= 1 && d.volume > 0 {
            w1.push(MoveSpec::WidthOne {
                at: st.plate_ref(s.plate),
                j: s.j,
            });
        }
        if !d.innermost {
            continue;
        }
        if d.volume == 1 && d.circumference == 3 {
            let tip = &fr.cx.tips[d.tips[0]];
            dr.push(MoveSpec::DiskRemoval {
                tet: tip.tet,
                vertex: tip.vertex,
            });
        }
        if d.volume == 0 && d.circumference == 2 {
            let c = &curves[d.curve];
            let level = st.plates[c.segs[0].plate].level.min(st.plates[c.segs[1].plate].level);
            dr.push(MoveSpec::DiskRemovalBigon {
                face: st.plates[s.plate].face,
                level,
                j: s.j,
            });
        }
    }
    w1.sort();
    dr.sort();
    out.extend(w1);
    out.extend(dr);
    out
}

/// Area-preserving moves worth trying, in priority order.
pub fn neutral_sites(fr: &Frame, st: &FlattenedSurface) -> Vec<MoveSpec> {
    let tri = &fr.tri;
    let mut out = Vec::new();
    for t in 0..tri.n_tets() {
        for x in 0..4 {
            for y in 0..4 {
                if x != y && tri.is_top_face(t, x) != tri.is_top_face(t, y) {
                    // {x, y} straddles top and bottom, so the edge opposite is equatorial
                    let rest: Vec<usize> = (0..4).filter(|&v| v != x && v != y).collect();
                    out.push(MoveSpec::Tetrahedron {
                        tet: t,
                        edge: [rest[0], rest[1]],
                    });
                    out.push(MoveSpec::Tetrahedron {
                        tet: t,
                        edge: [rest[1], rest[0]],
                    });
                }
            }
        }
    }
    out.sort();
    out.dedup();
    let curves = trace_curves(fr, st);
    for c in neg_components(fr, st, &curves) {
        let stable = match c.kind {
            NegKind::Stable => true,
            NegKind::Unstable => false,
            _ => continue,
        };
        if !c.core.is_empty() {
            out.push(MoveSpec::Annulus {
                stable,
                plates: c.core.clone(),
            });
        }
    }
    for t in 0..tri.n_tets() {
        out.push(MoveSpec::FlipUp { tet: t });
        out.push(MoveSpec::FlipDown { tet: t });
    }
    out
}

struct Driver<'a> {
    fr: &'a Frame,
    class: Vec<BigInt>,
    chi: i64,
    log: Vec<MoveRecord>,
    budget: usize,
}

impl Driver<'_> {
    fn record(&mut self, st: &FlattenedSurface, m: &MoveSpec, a: &Applied) -> Result<(), EngineError> {
        if a.state.class(self.fr) != self.class {
            return Err(EngineError::InvalidState(format!("{m:?} changed the class")));
        }
        let chi = surface_chi(self.fr, &a.state, &trace_curves(self.fr, &a.state));
        if chi != self.chi {
            return Err(EngineError::InvalidState(format!("{m:?} changed the Euler characteristic")));
        }
        self.log.push(MoveRecord {
            kind: m.kind(),
            site: m.clone(),
            delta_area: a.delta_area,
            delta_volume: a.delta_volume,
            pre_status: bigon_status(self.fr, st).level,
            post_status: bigon_status(self.fr, &a.state).level,
            steps: a.steps.clone(),
        });
        if self.log.len() > self.budget {
            return Err(EngineError::NonTermination {
                budget: self.budget,
                log: std::mem::take(&mut self.log),
            });
        }
        Ok(())
    }
}

fn try_reduce(fr: &Frame, st: &FlattenedSurface) -> Option<(MoveSpec, Applied)> {
    reducing_sites(fr, st)
        .into_iter()
        .find_map(|m| apply_move(fr, st, &m).ok().filter(|a| a.delta_area < 0).map(|a| (m, a)))
}

/// Breadth-first search through area-preserving moves for a state where an
/// area-reducing move applies. Returns the path.
fn search(fr: &Frame, st: &FlattenedSurface, cfg: &SimplifyConfig) -> Option<Vec<(MoveSpec, FlattenedSurface)>> {
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(st.canonical_key());
    let mut queue: VecDeque<(FlattenedSurface, Vec<(MoveSpec, FlattenedSurface)>)> = VecDeque::new();
    queue.push_back((st.clone(), Vec::new()));
    while let Some((cur, path)) = queue.pop_front() {
        if path.len() >= cfg.search_depth {
            continue;
        }
        for m in neutral_sites(fr, &cur) {
            let Ok(a) = apply_move(fr, &cur, &m) else {
                continue;
            };
            if a.delta_area != 0 || !seen.insert(a.state.canonical_key()) {
                continue;
            }
            let mut next = path.clone();
            next.push((m, a.state.clone()));
            if a.state.is_carried() || try_reduce(fr, &a.state).is_some() {
                return Some(next);
            }
            if seen.len() >= cfg.search_states {
                return None;
            }
            queue.push_back((a.state, next));
        }
    }
    None
}

/// Drive a state to carried position, recording every move.
pub fn simplify(fr: &Frame, st: &FlattenedSurface, cfg: &SimplifyConfig) -> Result<Outcome, EngineError> {
    st.validate(fr).map_err(EngineError::InvalidState)?;
    let mut d = Driver {
        fr,
        class: st.class(fr),
        chi: surface_chi(fr, st, &trace_curves(fr, st)),
        log: Vec::new(),
        budget: cfg.budget,
    };
    let mut cur = st.clone();
    loop {
        if cur.is_carried() {
            return Ok(Outcome {
                state: cur,
                log: d.log,
                stuck: None,
            });
        }
        if let Some((m, a)) = try_reduce(fr, &cur) {
            d.record(&cur, &m, &a)?;
            cur = a.state;
            continue;
        }
        match search(fr, &cur, cfg) {
            Some(path) => {
                for (m, _) in path {
                    let a = apply_move(fr, &cur, &m)?;
                    d.record(&cur, &m, &a)?;
                    cur = a.state;
                }
            }
            None => {
                let status = bigon_status(fr, &cur);
                return Ok(Outcome {
                    stuck: Some(Stuck {
                        area: cur.area(),
                        negative_plates: cur.plates.iter().filter(|p| p.sign < 0).count(),
                        status,
                        state: cur.clone(),
                    }),
                    state: cur,
                    log: d.log,
                });
            }
        }
    }
}

/// Apply `k` random flips and inverse face moves, each checked, from a seeded generator.
pub fn scramble(fr: &Frame, st: &FlattenedSurface, k: usize, seed: u64) -> (FlattenedSurface, Vec<MoveSpec>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = st.clone();
    let mut applied = Vec::new();
    let n_tets = fr.tri.n_tets();
    let n_faces = fr.n_faces();
    let mut attempts = 0;
    while applied.len() < k && attempts < 200 * (k + 1) {
        attempts += 1;
        let m = match rng.gen_range(0..3) {
            0 => MoveSpec::FlipUp {
                tet: rng.gen_range(0..n_tets),
            },
            1 => MoveSpec::FlipDown {
                tet: rng.gen_range(0..n_tets),
            },
            _ => {
                let face = rng.gen_range(0..n_faces);
                MoveSpec::InverseFace {
                    face,
                    level: rng.gen_range(0..=cur.stacks[face].len()),
                    k: rng.gen_range(0..3),
                    pick: [rng.gen(), rng.gen()],
                }
            }
        };
        if let Ok(a) = apply_move(fr, &cur, &m) {
            cur = a.state;
            applied.push(m);
        }
    }
    (cur, applied)
}
