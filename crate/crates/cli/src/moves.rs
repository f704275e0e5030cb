//! Move runs: scramble a carried surface with a seed, or load a saved state,
//! then simplify and log every move.

use flat_engine::simplify::{scramble, simplify, SimplifyConfig, Stuck};
use flat_engine::status::{bigon_status, StatusReport};
use flat_engine::{FlattenedSurface, Frame, MoveRecord, MoveSpec};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use taut_core::homology::Fillings;
use taut_core::{parse_triangulation, TautTriangulation};

use crate::config::{Budgets, Prepared};
use crate::error::CliError;
use crate::report::{ints, Pipeline};
use crate::SCHEMA;

/// A flattened surface together with what is needed to interpret it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub record: String,
    #[serde(default)]
    pub fillings: Fillings,
    pub state: FlattenedSurface,
}

#[derive(Clone, Debug, Serialize)]
pub struct Scrambled {
    pub seed: u64,
    pub k: usize,
    pub class: Vec<String>,
    pub start_area: usize,
    pub moves: Vec<MoveSpec>,
    pub area: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MovesRun {
    pub schema: &'static str,
    pub record: String,
    pub fillings: Fillings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scramble: Option<Scrambled>,
    pub config: SimplifyConfig,
    pub initial_area: usize,
    pub log: Vec<MoveRecord>,
    pub final_area: usize,
    pub carried: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_weights: Option<Vec<u64>>,
    pub status: StatusReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stuck: Option<Stuck>,
}

pub fn frame_of(tri: &TautTriangulation, fillings: &Fillings) -> Result<Frame, CliError> {
    Frame::new(tri.clone(), fillings).map_err(|e| CliError::Record(e.to_string()))
}

/// The carried state of `class`, defaulting to the sum of the dual cone's generators.
pub fn carried_start(p: &Prepared, fr: &Frame, budgets: &Budgets, class: Option<&[BigInt]>) -> Result<(Vec<BigInt>, FlattenedSurface), CliError> {
    let pl = Pipeline::new(p, budgets).map_err(|e| CliError::Record(format!("{}: {e}", p.record.id)))?;
    let alpha = match class {
        Some(c) => c.to_vec(),
        None => {
            let mut a = vec![BigInt::from(0); pl.fh.h1.rank];
            for g in &pl.sigma.generators {
                for (x, y) in a.iter_mut().zip(g) {
                    *x += y;
                }
            }
            a
        }
    };
    let s = pl.carry(p, budgets, &alpha).map_err(|e| CliError::Record(format!("{}: {e}", p.record.id)))?;
    let st = FlattenedSurface::from_carried(fr, &s.weights).map_err(CliError::Record)?;
    Ok((alpha, st))
}

fn run(record: String, fr: &Frame, st: &FlattenedSurface, cfg: &SimplifyConfig, scrambled: Option<Scrambled>) -> Result<MovesRun, CliError> {
    let out = simplify(fr, st, cfg).map_err(|e| CliError::Record(e.to_string()))?;
    Ok(MovesRun {
        schema: SCHEMA,
        record,
        fillings: fr.fh.fillings.clone(),
        scramble: scrambled,
        config: cfg.clone(),
        initial_area: st.area(),
        final_area: out.state.area(),
        carried: out.carried(),
        final_weights: out.state.carried_weights(fr.n_faces()),
        status: bigon_status(fr, &out.state),
        stuck: out.stuck,
        log: out.log,
    })
}

/// Scramble the carried surface of a class with `k` seeded moves and simplify it back.
/// Also returns the scrambled state so it can be saved and replayed.
pub fn cmd_scramble(
    p: &Prepared,
    budgets: &Budgets,
    class: Option<&[BigInt]>,
    seed: u64,
    k: usize,
) -> Result<(MovesRun, StateFile), CliError> {
    let fr = frame_of(&p.tri, &p.fillings)?;
    let (alpha, start) = carried_start(p, &fr, budgets, class)?;
    let (sc, moves) = scramble(&fr, &start, k, seed);
    let info = Scrambled {
        seed,
        k,
        class: ints(&alpha),
        start_area: start.area(),
        moves,
        area: sc.area(),
    };
    let saved = StateFile {
        record: p.record.text.clone(),
        fillings: p.fillings.clone(),
        state: sc.clone(),
    };
    let run = run(p.record.id.clone(), &fr, &sc, &budgets.moves, Some(info))?;
    Ok((run, saved))
}

pub fn cmd_simplify(file: &StateFile, budgets: &Budgets) -> Result<MovesRun, CliError> {
    let tri = parse_triangulation(&file.record).map_err(|e| CliError::Record(e.to_string()))?;
    let fr = frame_of(&tri, &file.fillings)?;
    run(file.record.clone(), &fr, &file.state, &budgets.moves, None)
}
