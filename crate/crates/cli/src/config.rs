//! Run configuration and the up-front validation of every record against it.

use std::path::PathBuf;

use flat_engine::simplify::SimplifyConfig;
use num_bigint::BigInt;
use serde::Serialize;
use taut_core::homology::{self, Fillings, Slope};
use taut_core::veering::CuspComplex;
use taut_core::{parse_triangulation, TautTriangulation};

use crate::error::CliError;
use crate::input::Record;
use crate::pool;

/// How cusps are treated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mode {
    #[default]
    Unfilled,
    /// Explicit slopes per cusp; cusps not listed take their homological
    /// longitude when `longitude` is set.
    Filled { slopes: Fillings, longitude: bool },
}

#[derive(Clone, Debug, Serialize)]
pub struct Budgets {
    /// Cap on simple cycles of the dual graph.
    pub cycle_cap: usize,
    /// Total weight allowed to the carried-surface solver; `None` picks a default per class.
    pub weight: Option<u64>,
    pub moves: SimplifyConfig,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            cycle_cap: 200_000,
            weight: None,
            moves: SimplifyConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub inputs: Vec<String>,
    pub mode: Mode,
    pub budgets: Budgets,
    pub output: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            mode: Mode::Unfilled,
            budgets: Budgets::default(),
            output: None,
            jobs: default_jobs(),
        }
    }
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// A record that passed validation, with its fillings resolved.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub record: Record,
    pub tri: TautTriangulation,
    pub cx: CuspComplex,
    pub fillings: Fillings,
}

impl Prepared {
    pub fn filled(&self) -> bool {
        !self.fillings.is_empty()
    }
}

/// `C=P/Q`
pub fn parse_filling(s: &str) -> Result<(usize, Slope), CliError> {
    let bad = || CliError::FillingSyntax(s.to_string());
    let (c, slope) = s.split_once('=').ok_or_else(bad)?;
    let c = c.trim().parse().map_err(|_| bad())?;
    let slope = slope.parse().map_err(|_| bad())?;
    Ok((c, slope))
}

/// `a,b,c` in the free basis of first homology.
pub fn parse_class(s: &str) -> Result<Vec<BigInt>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<BigInt>().map_err(|_| CliError::ClassSyntax(s.to_string())))
        .collect()
}

fn resolve(tri: &TautTriangulation, cx: &CuspComplex, mode: &Mode) -> Result<Fillings, String> {
    let Mode::Filled { slopes, longitude } = mode else {
        return Ok(Fillings::new());
    };
    let n = tri.n_cusps();
    if let Some(c) = slopes.keys().find(|&&c| c >= n) {
        return Err(format!("cusp {c} does not exist ({n} cusps)"));
    }
    let h1 = if *longitude {
        Some(homology::h1_unfilled(tri).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let mut out = Fillings::new();
    for c in 0..n {
        let s = match (slopes.get(&c), &h1) {
            (Some(s), _) => *s,
            (None, Some(h1)) => homology::homological_longitude(tri, cx, h1, c)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("cusp {c} has no homological longitude"))?,
            (None, None) => return Err(format!("cusp {c} has no filling")),
        };
        if !s.is_primitive() {
            return Err(format!("cusp {c}: slope {s} is not primitive"));
        }
        let prongs = cx.prongs(c, s.p, s.q);
        if prongs < 3 {
            return Err(format!("cusp {c}: slope {s} has {prongs} prongs, filling needs at least 3"));
        }
        out.insert(c, s);
    }
    Ok(out)
}

/// Parse every record and resolve its fillings. Any failure rejects the whole
/// run before work starts, listing each offending record.
pub fn prepare(records: &[Record], cfg: &RunConfig) -> Result<Vec<Prepared>, CliError> {
    let results = pool::ordered(cfg.jobs, records, |r| -> Result<Prepared, String> {
        let tri = parse_triangulation(&r.text).map_err(|e| e.to_string())?;
        let cx = CuspComplex::build(&tri).map_err(|e| e.to_string())?;
        let fillings = resolve(&tri, &cx, &cfg.mode)?;
        Ok(Prepared {
            record: r.clone(),
            tri,
            cx,
            fillings,
        })
    })?;
    let mut ok = Vec::new();
    let mut problems = Vec::new();
    for (r, res) in records.iter().zip(results) {
        match res {
            Ok(p) => ok.push(p),
            Err(e) => problems.push(format!("{}: {e}", r.id)),
        }
    }
    if problems.is_empty() {
        Ok(ok)
    } else {
        Err(CliError::Config(problems))
    }
}
