//! Patches of the surface in the stable and unstable branched neighbourhoods,
//! their indices, and the Euler characteristic of the capped surface.

use serde::{Deserialize, Serialize};

use crate::boundary::Curve;
use crate::frame::Frame;
use crate::state::FlattenedSurface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Track {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatchKind {
    /// Collar of an inessential boundary curve, capped by a disk.
    Disk,
    /// Collar of a meridian of a filled cusp, capped by a meridian disk.
    Meridional,
    /// Collar of an essential curve.
    Annulus,
}

/// The patch of one track around one boundary curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub curve: usize,
    pub cusp: usize,
    pub kind: PatchKind,
    pub chi: i64,
    pub switches: usize,
    pub negative_switches: usize,
    pub corners: usize,
    pub index: i64,
}

/// Index of a patch: twice its Euler characteristic, less one per switch and
/// half one per corner. Corners come in pairs on the patches we build.
pub fn index(chi: i64, switches: usize, corners: usize) -> i64 {
    debug_assert!(corners.is_multiple_of(2));
    2 * chi - switches as i64 - (corners / 2) as i64
}

pub fn patch_kind(fr: &Frame, c: &Curve) -> PatchKind {
    if c.is_inessential() {
        return PatchKind::Disk;
    }
    match fr.fh.fillings.get(&c.cusp) {
        Some(m) if c.slope == (m.p, m.q) || c.slope == (-m.p, -m.q) => PatchKind::Meridional,
        _ => PatchKind::Annulus,
    }
}

/// Euler characteristic of the surface with its capped boundary curves filled in.
pub fn surface_chi(fr: &Frame, st: &FlattenedSurface, curves: &[Curve]) -> i64 {
    let caps = curves.iter().filter(|c| patch_kind(fr, c) != PatchKind::Annulus).count() as i64;
    -(st.area() as i64) / 2 + caps
}

/// Cell count of the same surface: plates and rods as 2-cells, with segments,
/// chords and plate-rod seams as edges.
pub fn cellular_chi(fr: &Frame, st: &FlattenedSurface, curves: &[Curve]) -> i64 {
    let mut rods = 0i64;
    for (p, pl) in st.plates.iter().enumerate() {
        for (k, c) in pl.links.iter().enumerate() {
            if (p, k) < (c.plate, c.k) {
                rods += 1;
            }
        }
    }
    let vertices: i64 = curves.iter().map(|c| 2 * c.segs.len() as i64).sum();
    let boundary: i64 = curves.iter().map(|c| (c.segs.len() + c.chords.len()) as i64).sum();
    let seams = 3 * st.area() as i64;
    let faces = st.area() as i64 + rods;
    let caps = curves.iter().filter(|c| patch_kind(fr, c) != PatchKind::Annulus).count() as i64;
    vertices - boundary - seams + faces + caps
}

pub fn patches(fr: &Frame, st: &FlattenedSurface, curves: &[Curve], track: Track) -> Vec<Patch> {
    curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let kind = patch_kind(fr, c);
            let chi = if kind == PatchKind::Annulus { 0 } else { 1 };
            let mut switches = 0;
            let mut negative = 0;
            for s in &c.segs {
                let pl = &st.plates[s.plate];
                let target = match track {
                    Track::Stable => fr.tracks.stable_corner(pl.face),
                    Track::Unstable => fr.tracks.unstable_corner(pl.face),
                };
                if s.j == target {
                    switches += 1;
                    if pl.sign < 0 {
                        negative += 1;
                    }
                }
            }
            Patch {
                curve: i,
                cusp: c.cusp,
                kind,
                chi,
                switches,
                negative_switches: negative,
                corners: 0,
                index: index(chi, switches, 0),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_of_small_patches() {
        assert_eq!(index(1, 2, 0), 0);
        assert_eq!(index(1, 3, 2), -2);
        assert_eq!(index(0, 0, 0), 0);
        assert_eq!(index(1, 1, 0), 1);
    }
}
