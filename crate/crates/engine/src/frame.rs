use taut_core::carried::BoundaryTrack;
use taut_core::dual::{face_tracks, FaceEdges, FaceTrackData};
use taut_core::homology::{fill, FilledHomology, Fillings};
use taut_core::perm::face_vertices;
use taut_core::veering::{side_id, veer_and_hinge, CuspComplex, VeerData};
use taut_core::TautTriangulation;

use crate::error::EngineError;

/// Everything about the triangulation that the engine looks up repeatedly.
#[derive(Clone, Debug)]
pub struct Frame {
    pub tri: TautTriangulation,
    pub cx: CuspComplex,
    pub vd: VeerData,
    pub fe: FaceEdges,
    /// Face-edge at the tail and head of each cusp side.
    pub ends: Vec<[usize; 2]>,
    pub tracks: FaceTrackData,
    pub fh: FilledHomology,
    // [face][k][end]: face-vertex of the face at that end of its edge k
    side_at: Vec<[[usize; 2]; 3]>,
    pub cusp_tips: Vec<Vec<usize>>,
    pub cusp_sides: Vec<Vec<usize>>,
    pub cusp_vertices: Vec<Vec<usize>>,
}

impl Frame {
    pub fn new(tri: TautTriangulation, fillings: &Fillings) -> Result<Frame, EngineError> {
        let cx = CuspComplex::build(&tri).map_err(|e| EngineError::Setup(e.to_string()))?;
        let vd = veer_and_hinge(&tri, &cx).map_err(|e| EngineError::Setup(e.to_string()))?;
        let track = BoundaryTrack::new(&tri, &cx);
        let tracks = face_tracks(&tri, &track.fe, &vd).map_err(|e| EngineError::Setup(e.to_string()))?;
        let fh = fill(&tri, &cx, fillings).map_err(|e| EngineError::Setup(e.to_string()))?;
        let mut side_at = vec![[[usize::MAX; 2]; 3]; tri.n_faces()];
        for f in 0..tri.n_faces() {
            for j in 0..3 {
                let s = side_id(f, j);
                let [kt, kh] = track.ends[s];
                side_at[f][kt][cx.sides[s].tail % 2] = j;
                side_at[f][kh][cx.sides[s].head % 2] = j;
            }
        }
        if side_at.iter().flatten().flatten().any(|&j| j == usize::MAX) {
            return Err(EngineError::Setup("face corners do not cover both edge ends".into()));
        }
        let n = tri.n_cusps();
        let mut cusp_tips = vec![Vec::new(); n];
        for (i, t) in cx.tips.iter().enumerate() {
            cusp_tips[t.cusp].push(i);
        }
        let mut cusp_sides = vec![Vec::new(); n];
        for (s, sd) in cx.sides.iter().enumerate() {
            cusp_sides[cx.vertex_cusp[sd.tail]].push(s);
        }
        let mut cusp_vertices = vec![Vec::new(); n];
        for (u, &c) in cx.vertex_cusp.iter().enumerate() {
            cusp_vertices[c].push(u);
        }
        Ok(Frame {
            fe: track.fe,
            ends: track.ends,
            tri,
            cx,
            vd,
            tracks,
            fh,
            side_at,
            cusp_tips,
            cusp_sides,
            cusp_vertices,
        })
    }

    /// Face-vertex of `f` lying at end `end` of its edge `k`.
    pub fn vertex_at_end(&self, f: usize, k: usize, end: usize) -> usize {
        self.side_at[f][k][end]
    }

    /// Cusp-complex vertex where corner `k` of `f` meets the side at face-vertex `j`.
    pub fn junction(&self, f: usize, k: usize, j: usize) -> usize {
        let s = side_id(f, j);
        if self.ends[s][0] == k {
            self.cx.sides[s].tail
        } else {
            self.cx.sides[s].head
        }
    }

    /// Index in face class of local face `x` of `t` of the tetrahedron vertex `y`.
    /// Face-edge with this index is the edge of face `x` shared with face `y`.
    pub fn fv(&self, t: usize, x: usize, y: usize) -> usize {
        let g = self.tri.face_class(t, x);
        let (_, fb) = self.tri.face_below(g);
        let lab = self.tri.to_below(t, x, y);
        face_vertices(fb).iter().position(|&z| z == lab).expect("vertex on face")
    }

    /// True when `t` lies above local face `x`, so plates next to `t` are topmost.
    pub fn above(&self, t: usize, x: usize) -> bool {
        !self.tri.is_top_face(t, x)
    }

    pub fn n_faces(&self) -> usize {
        self.tri.n_faces()
    }
}
