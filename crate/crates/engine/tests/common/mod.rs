#![allow(dead_code)]

use flat_engine::{FlattenedSurface, Frame};
use num_bigint::BigInt;
use taut_core::carried::solve_carried;
use taut_core::cones::homology_directions;
use taut_core::homology::Fillings;
use taut_core::parse_triangulation;

pub const FIG8: &str = "cPcbbbiht_12";

pub fn census() -> Vec<String> {
    include_str!("../../../../data/census_sample.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

pub fn frame(record: &str) -> Frame {
    Frame::new(parse_triangulation(record).unwrap(), &Fillings::new()).unwrap()
}

/// The least carried surface in the sum of the dual cone's extreme rays.
pub fn carried(fr: &Frame) -> Option<FlattenedSurface> {
    let hd = homology_directions(&fr.tri, &fr.fh, 100_000).ok()?;
    let dual = hd.cone.dual();
    let mut alpha = vec![BigInt::from(0); fr.fh.h1.rank];
    for g in &dual.generators {
        for (a, x) in alpha.iter_mut().zip(g) {
            *a += x;
        }
    }
    if alpha.iter().all(|a| a == &BigInt::from(0)) {
        return None;
    }
    let s = solve_carried(&fr.tri, &fr.cx, &fr.fh, &hd, None, &alpha, None).ok()?;
    FlattenedSurface::from_carried(fr, &s.weights).ok()
}
