//! Report assembly: combinatorics, homology, cones, the Euler class and
//! carried-surface certificates for each record.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use taut_core::carried::{solve_carried, BoundaryKind, CarriedSurface};
use taut_core::cones::{euler_class, homology_directions, norm_value, same_cone, EulerClass, HomologyDirections, RationalCone};
use taut_core::homology::{self, fill, FilledHomology, Slope};
use taut_core::veering::{cusp_reports, veer_and_hinge};

use crate::config::{Budgets, Mode, Prepared, RunConfig};
use crate::error::CliError;
use crate::pool;
use crate::SCHEMA;

pub fn int(x: &BigInt) -> String {
    x.to_string()
}

pub fn ints(v: &[BigInt]) -> Vec<String> {
    v.iter().map(int).collect()
}

pub fn rat(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeBlock {
    pub ambient_dim: usize,
    pub generators: Vec<Vec<String>>,
    pub lineality: Vec<Vec<String>>,
    pub facets: Vec<Vec<String>>,
    pub lineality_dim: usize,
}

impl From<&RationalCone> for ConeBlock {
    fn from(c: &RationalCone) -> Self {
        let f = |v: &Vec<Vec<BigInt>>| v.iter().map(|x| ints(x)).collect();
        ConeBlock {
            ambient_dim: c.ambient_dim,
            generators: f(&c.generators),
            lineality: f(&c.lineality),
            facets: f(&c.facets),
            lineality_dim: c.lineality_dim,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspRow {
    pub cusp: usize,
    pub ladders: usize,
    pub triangles_per_ladder: Vec<usize>,
    pub ladderpole_slope: (i64, i64),
    pub basis: [String; 2],
    /// Prongs of the transversal basis slope 1/0.
    pub transversal_prongs: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filling: Option<Slope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filling_prongs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub longitude: Option<Slope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub longitude_prongs: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyBlock {
    pub unfilled: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filled: Option<String>,
    /// Rank of the free part the cones live in.
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerBlock {
    pub class: Vec<String>,
    pub per_cusp_index: BTreeMap<usize, i64>,
}

impl From<&EulerClass> for EulerBlock {
    fn from(e: &EulerClass) -> Self {
        EulerBlock {
            class: e.h1_class.iter().map(rat).collect(),
            per_cusp_index: e.per_cusp_index.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryRow {
    pub cusp: usize,
    pub kind: BoundaryKind,
    pub slopes: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CapRow {
    pub cusp: usize,
    pub rungs: usize,
    pub prongs: u64,
}

/// A carried surface with everything needed to re-check its certificate offline.
#[derive(Clone, Debug, Serialize)]
pub struct CarriedBlock {
    pub class: Vec<String>,
    pub weights: Vec<u64>,
    pub total_weight: u64,
    pub chi_unfilled: i64,
    pub chi_filled: i64,
    pub boundary: Vec<BoundaryRow>,
    pub caps: Vec<CapRow>,
    pub minus_chi: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_pairing: Option<String>,
    pub in_dual_cone: bool,
    pub cellular_matches_weights: bool,
    pub caps_admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_equals_euler_pairing: Option<bool>,
}

impl From<&CarriedSurface> for CarriedBlock {
    fn from(s: &CarriedSurface) -> Self {
        let cert = s.certificate.as_ref();
        CarriedBlock {
            class: ints(&s.h2_class),
            weights: s.weights.clone(),
            total_weight: s.total_weight(),
            chi_unfilled: s.chi_unfilled,
            chi_filled: s.chi_filled,
            boundary: s
                .boundary
                .iter()
                .map(|b| BoundaryRow {
                    cusp: b.cusp,
                    kind: b.kind,
                    slopes: b.curves.iter().map(|c| c.slope).collect(),
                })
                .collect(),
            caps: s
                .caps
                .iter()
                .map(|c| CapRow {
                    cusp: c.cusp,
                    rungs: c.rungs,
                    prongs: c.prongs,
                })
                .collect(),
            minus_chi: -s.chi_filled,
            euler_pairing: cert.and_then(|c| c.euler_pairing.as_ref()).map(rat),
            in_dual_cone: cert.is_some_and(|c| c.in_dual_cone),
            cellular_matches_weights: cert.is_some_and(|c| c.cellular_matches_weights),
            caps_admissible: cert.is_some_and(|c| c.caps_admissible),
            norm_equals_euler_pairing: cert.and_then(|c| c.norm_equals_euler_pairing),
        }
    }
}

/// A dual-cone generator, its norm and the carried surface realizing it.
#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub class: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carried: Option<CarriedBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecordReport {
    pub tetrahedra: usize,
    pub cusps: usize,
    /// Veer of each edge class, `L` or `R`.
    pub veer: String,
    pub hinge: Vec<usize>,
    pub cusp_table: Vec<CuspRow>,
    pub homology: HomologyBlock,
    pub cycles: usize,
    pub directions: ConeBlock,
    pub dual: ConeBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler: Option<EulerBlock>,
    pub face_codim: usize,
    pub face_dim: i64,
    pub samples: Vec<Sample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeReport {
    pub rank: usize,
    pub cycles: usize,
    pub directions: ConeBlock,
    pub dual: ConeBlock,
    pub face_codim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub class: Vec<String>,
    pub norm: String,
    /// `euler` when read off the Euler class, `carried` when from a carried surface.
    pub source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carried: Option<CarriedBlock>,
}

/// One record's result, or the error it raised.
#[derive(Clone, Debug, Serialize)]
pub struct Block<T> {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Batch<T> {
    pub schema: &'static str,
    pub command: &'static str,
    pub mode: Mode,
    pub budgets: Budgets,
    pub records: Vec<Block<T>>,
    pub failures: usize,
}

impl<T> Batch<T> {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// The per-record pipeline shared by the report commands.
pub struct Pipeline {
    pub fh: FilledHomology,
    pub hd: HomologyDirections,
    pub sigma: RationalCone,
    pub euler: Option<EulerClass>,
}

impl Pipeline {
    pub fn new(p: &Prepared, budgets: &Budgets) -> Result<Pipeline, String> {
        let fh = fill(&p.tri, &p.cx, &p.fillings).map_err(|e| e.to_string())?;
        let hd = homology_directions(&p.tri, &fh, budgets.cycle_cap).map_err(|e| e.to_string())?;
        let sigma = hd.cone.dual();
        if !same_cone(&sigma.dual(), &hd.cone) {
            return Err("double dual does not reproduce the cone".into());
        }
        let euler = if p.filled() {
            Some(euler_class(&p.tri, &fh).map_err(|e| e.to_string())?)
        } else {
            None
        };
        Ok(Pipeline { fh, hd, sigma, euler })
    }

    pub fn carry(&self, p: &Prepared, budgets: &Budgets, alpha: &[BigInt]) -> Result<CarriedSurface, String> {
        solve_carried(&p.tri, &p.cx, &self.fh, &self.hd, self.euler.as_ref(), alpha, budgets.weight).map_err(|e| e.to_string())
    }

    /// The norm of a class in the dual cone: from the Euler class when every
    /// cusp is filled, otherwise from its carried surface.
    pub fn norm(&self, p: &Prepared, budgets: &Budgets, alpha: &[BigInt]) -> Result<NormReport, String> {
        if alpha.len() != self.fh.h1.rank {
            return Err(format!("class has {} coordinates, first homology has rank {}", alpha.len(), self.fh.h1.rank));
        }
        if let Some(e) = &self.euler {
            if !self.sigma.contains_by_facets(alpha) {
                return Err(format!("class {:?} is outside the dual cone", ints(alpha)));
            }
            return Ok(NormReport {
                class: ints(alpha),
                norm: rat(&norm_value(e, alpha)),
                source: "euler",
                carried: None,
            });
        }
        let s = self.carry(p, budgets, alpha)?;
        Ok(NormReport {
            class: ints(alpha),
            norm: (-s.chi_filled).to_string(),
            source: "carried",
            carried: Some(CarriedBlock::from(&s)),
        })
    }
}

fn cusp_table(p: &Prepared) -> Result<Vec<CuspRow>, String> {
    let h1 = homology::h1_unfilled(&p.tri).map_err(|e| e.to_string())?;
    cusp_reports(&p.cx)
        .into_iter()
        .map(|r| {
            let c = r.cusp;
            let longitude = homology::homological_longitude(&p.tri, &p.cx, &h1, c).map_err(|e| e.to_string())?;
            let filling = p.fillings.get(&c).copied();
            Ok(CuspRow {
                cusp: c,
                ladders: r.ladders,
                triangles_per_ladder: r.triangles_per_ladder,
                ladderpole_slope: r.ladderpole_slope,
                basis: r.basis,
                transversal_prongs: p.cx.prongs(c, 1, 0),
                filling,
                filling_prongs: filling.map(|s| p.cx.prongs(c, s.p, s.q)),
                longitude,
                longitude_prongs: longitude.map(|s| p.cx.prongs(c, s.p, s.q)),
            })
        })
        .collect()
}

pub fn record_report(p: &Prepared, budgets: &Budgets) -> Result<RecordReport, String> {
    let vd = veer_and_hinge(&p.tri, &p.cx).map_err(|e| e.to_string())?;
    let pl = Pipeline::new(p, budgets)?;
    let unfilled = homology::h1_unfilled(&p.tri).map_err(|e| e.to_string())?.describe();
    let samples = pl
        .sigma
        .spanning_set()
        .into_iter()
        .map(|alpha| {
            let norm = pl.euler.as_ref().map(|e| rat(&norm_value(e, &alpha)));
            match pl.carry(p, budgets, &alpha) {
                Ok(s) => Sample {
                    class: ints(&alpha),
                    norm: norm.or_else(|| Some((-s.chi_filled).to_string())),
                    carried: Some(CarriedBlock::from(&s)),
                    error: None,
                },
                Err(e) => Sample {
                    class: ints(&alpha),
                    norm,
                    carried: None,
                    error: Some(e),
                },
            }
        })
        .collect();
    Ok(RecordReport {
        tetrahedra: p.tri.n_tets(),
        cusps: p.tri.n_cusps(),
        veer: vd.veer.iter().map(|v| v.letter()).collect(),
        hinge: (0..p.tri.n_tets()).filter(|&t| vd.hinge[t]).collect(),
        cusp_table: cusp_table(p)?,
        homology: HomologyBlock {
            unfilled,
            filled: p.filled().then(|| pl.fh.h1.describe()),
            rank: pl.fh.h1.rank,
        },
        cycles: pl.hd.n_cycles,
        directions: ConeBlock::from(&pl.hd.cone),
        dual: ConeBlock::from(&pl.sigma),
        euler: pl.euler.as_ref().map(EulerBlock::from),
        face_codim: pl.hd.cone.lineality_dim,
        face_dim: pl.sigma.dim() as i64 - 1,
        samples,
    })
}

fn batch<T, F>(command: &'static str, prepared: &[Prepared], cfg: &RunConfig, f: F) -> Result<Batch<T>, CliError>
where
    T: Send,
    F: Fn(&Prepared) -> Result<T, String> + Sync + Send,
{
    let records: Vec<Block<T>> = pool::ordered(cfg.jobs, prepared, |p| match f(p) {
        Ok(r) => Block {
            id: p.record.id.clone(),
            result: Some(r),
            error: None,
        },
        Err(e) => Block {
            id: p.record.id.clone(),
            result: None,
            error: Some(e),
        },
    })?;
    let failures = records.iter().filter(|b| b.error.is_some()).count();
    Ok(Batch {
        schema: SCHEMA,
        command,
        mode: cfg.mode.clone(),
        budgets: cfg.budgets.clone(),
        records,
        failures,
    })
}

pub fn cmd_report(prepared: &[Prepared], cfg: &RunConfig) -> Result<Batch<RecordReport>, CliError> {
    batch("report", prepared, cfg, |p| record_report(p, &cfg.budgets))
}

pub fn cmd_cone(prepared: &[Prepared], cfg: &RunConfig) -> Result<Batch<ConeReport>, CliError> {
    batch("cone", prepared, cfg, |p| {
        let pl = Pipeline::new(p, &cfg.budgets)?;
        Ok(ConeReport {
            rank: pl.fh.h1.rank,
            cycles: pl.hd.n_cycles,
            face_codim: pl.hd.cone.lineality_dim,
            directions: ConeBlock::from(&pl.hd.cone),
            dual: ConeBlock::from(&pl.sigma),
        })
    })
}

/// Norms of `class`, or of every dual-cone generator when no class is given.
pub fn cmd_norm(prepared: &[Prepared], cfg: &RunConfig, class: Option<&[BigInt]>) -> Result<Batch<Vec<NormReport>>, CliError> {
    batch("norm", prepared, cfg, |p| {
        let pl = Pipeline::new(p, &cfg.budgets)?;
        let classes = match class {
            Some(c) => vec![c.to_vec()],
            None => pl.sigma.spanning_set(),
        };
        classes.iter().map(|a| pl.norm(p, &cfg.budgets, a)).collect()
    })
}

pub fn cmd_carry(prepared: &[Prepared], cfg: &RunConfig, class: &[BigInt]) -> Result<Batch<CarriedBlock>, CliError> {
    batch("carry", prepared, cfg, |p| {
        let pl = Pipeline::new(p, &cfg.budgets)?;
        pl.carry(p, &cfg.budgets, class).map(|s| CarriedBlock::from(&s))
    })
}
