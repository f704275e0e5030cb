use serde::{Deserialize, Serialize};

use crate::error::{Axiom, TriError};
use crate::perm::{complement, edge_index, parity, Perm4, EDGE_VERTICES};

/// The canonical on-disk form of a taut triangulation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingDocument {
    pub tetrahedra: usize,
    /// `[t, f, t', f', perm]`: face f of t is glued to face f' of t', vertex i of t to perm[i] of t'.
    pub gluings: Vec<(usize, usize, usize, usize, [u8; 4])>,
    pub pi_edges: Vec<[usize; 2]>,
    pub coorientations: Vec<[usize; 2]>,
}

/// One corner of an edge star: tetrahedron `tet` meets the edge along its slot `a -> b`
/// (a at end 0 of the edge). The walk enters through the face opposite `d` and leaves
/// through the face opposite `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corner {
    pub tet: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl Corner {
    pub fn slot(&self) -> usize {
        edge_index(self.a, self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeStar {
    pub edge: usize,
    /// Cyclic walk; `corners[0]` is the tetrahedron with this edge on top.
    pub corners: Vec<Corner>,
    /// Index of the tetrahedron with this edge at the bottom.
    pub above: usize,
    /// `faces[i]` separates `corners[i]` and `corners[i + 1]`.
    pub faces: Vec<usize>,
}

impl EdgeStar {
    pub fn valence(&self) -> usize {
        self.corners.len()
    }
    pub fn side_a(&self) -> std::ops::Range<usize> {
        1..self.above
    }
    pub fn side_b(&self) -> std::ops::Range<usize> {
        self.above + 1..self.corners.len()
    }
    /// Faces of side A from bottom to top.
    pub fn a_faces(&self) -> &[usize] {
        &self.faces[..self.above]
    }
    /// Faces of side B from top to bottom (walk order).
    pub fn b_faces(&self) -> &[usize] {
        &self.faces[self.above..]
    }
    pub fn is_pi(&self, i: usize) -> bool {
        i == 0 || i == self.above
    }
}

#[derive(Clone, Debug)]
pub struct TautTriangulation {
    glue: Vec<[(usize, Perm4); 4]>,
    pi: Vec<usize>,
    top: Vec<[bool; 4]>,
    eps: Vec<i32>,
    face_class: Vec<[usize; 4]>,
    face_below: Vec<(usize, usize)>,
    face_above: Vec<(usize, usize)>,
    edge_class: Vec<[usize; 6]>,
    edge_reps: Vec<(usize, usize)>,
    vertex_class: Vec<[usize; 4]>,
    ncusps: usize,
    stars: Vec<EdgeStar>,
    /// Per edge class, the cusp at each end.
    edge_ends: Vec<[usize; 2]>,
}

impl TautTriangulation {
    /// Build from raw data: `glue[t][f] = (t', perm)`, π pair index per tetrahedron
    /// (pair k = edges k and 5-k), top faces per tetrahedron.
    pub fn new(
        glue: Vec<[(usize, Perm4); 4]>,
        pi: Vec<usize>,
        top_faces: Vec<[usize; 2]>,
    ) -> Result<Self, TriError> {
        let n = glue.len();
        if n == 0 {
            return Err(TriError::invalid(Axiom::GluingInvolution, "no tetrahedra"));
        }
        if pi.len() != n || top_faces.len() != n {
            return Err(TriError::Parse("per-tetrahedron arrays disagree in length".into()));
        }
        for t in 0..n {
            for f in 0..4 {
                let (u, p) = glue[t][f];
                if u >= n {
                    return Err(TriError::invalid(
                        Axiom::GluingInvolution,
                        format!("face ({t},{f}) glued to missing tetrahedron {u}"),
                    ));
                }
                let g = p.apply(f);
                if u == t && g == f {
                    return Err(TriError::invalid(
                        Axiom::GluingInvolution,
                        format!("face ({t},{f}) glued to itself"),
                    ));
                }
                let (back, q) = glue[u][g];
                if back != t || q != p.inverse() {
                    return Err(TriError::invalid(
                        Axiom::GluingInvolution,
                        format!("gluing of face ({t},{f}) is not reciprocated"),
                    ));
                }
            }
        }
        let mut top = vec![[false; 4]; n];
        for t in 0..n {
            if pi[t] > 2 {
                return Err(TriError::invalid(Axiom::TautAngles, format!("tet {t}: bad pi pair")));
            }
            let [f1, f2] = top_faces[t];
            if f1 > 3 || f2 > 3 || f1 == f2 {
                return Err(TriError::invalid(
                    Axiom::Coorientation,
                    format!("tet {t}: need two distinct top faces"),
                ));
            }
            top[t][f1] = true;
            top[t][f2] = true;
            // The top edge is shared by the top faces: it is spanned by the bottom-face labels.
            let bottom: Vec<usize> = (0..4).filter(|&f| !top[t][f]).collect();
            let k = edge_index(bottom[0], bottom[1]);
            if k.min(5 - k) != pi[t] {
                return Err(TriError::invalid(
                    Axiom::TautAngles,
                    format!("tet {t}: top and bottom edges are not the pi edges"),
                ));
            }
        }
        for t in 0..n {
            for f in 0..4 {
                let (u, p) = glue[t][f];
                if top[t][f] == top[u][p.apply(f)] {
                    return Err(TriError::invalid(
                        Axiom::Coorientation,
                        format!("face ({t},{f}) is glued to a face with the same coorientation"),
                    ));
                }
            }
        }

        // Connectivity and orientation.
        let mut eps = vec![0i32; n];
        eps[0] = 1;
        let mut stack = vec![0usize];
        while let Some(t) = stack.pop() {
            for f in 0..4 {
                let (u, p) = glue[t][f];
                let want = -p.sign() * eps[t];
                if eps[u] == 0 {
                    eps[u] = want;
                    stack.push(u);
                } else if eps[u] != want {
                    return Err(TriError::invalid(
                        Axiom::Orientable,
                        format!("orientation conflict across face ({t},{f})"),
                    ));
                }
            }
        }
        if let Some(t) = eps.iter().position(|&e| e == 0) {
            return Err(TriError::invalid(Axiom::Connected, format!("tet {t} unreachable from tet 0")));
        }

        // Face classes, numbered by least representative.
        let mut face_class = vec![[usize::MAX; 4]; n];
        let mut face_below = Vec::new();
        let mut face_above = Vec::new();
        for t in 0..n {
            for f in 0..4 {
                if face_class[t][f] != usize::MAX {
                    continue;
                }
                let id = face_below.len();
                let (u, p) = glue[t][f];
                let g = p.apply(f);
                face_class[t][f] = id;
                face_class[u][g] = id;
                if top[t][f] {
                    face_below.push((t, f));
                    face_above.push((u, g));
                } else {
                    face_below.push((u, g));
                    face_above.push((t, f));
                }
            }
        }

        // Vertex classes (cusps) by union-find.
        let mut uf = UnionFind::new(4 * n);
        for t in 0..n {
            for f in 0..4 {
                let (u, p) = glue[t][f];
                for v in 0..4 {
                    if v != f {
                        uf.union(4 * t + v, 4 * u + p.apply(v));
                    }
                }
            }
        }
        let mut vertex_class = vec![[usize::MAX; 4]; n];
        let mut roots: Vec<usize> = Vec::new();
        for t in 0..n {
            for v in 0..4 {
                let r = uf.find(4 * t + v);
                let id = match roots.iter().position(|&x| x == r) {
                    Some(i) => i,
                    None => {
                        roots.push(r);
                        roots.len() - 1
                    }
                };
                vertex_class[t][v] = id;
            }
        }
        let ncusps = roots.len();

        let mut tri = TautTriangulation {
            glue,
            pi,
            top,
            eps,
            face_class,
            face_below,
            face_above,
            edge_class: vec![[usize::MAX; 6]; n],
            edge_reps: Vec::new(),
            vertex_class,
            ncusps,
            stars: Vec::new(),
            edge_ends: Vec::new(),
        };
        tri.build_stars()?;
        tri.check_cusps()?;
        Ok(tri)
    }

    fn build_stars(&mut self) -> Result<(), TriError> {
        let n = self.glue.len();
        for t in 0..n {
            for k in 0..6 {
                if self.edge_class[t][k] != usize::MAX {
                    continue;
                }
                let id = self.edge_reps.len();
                self.edge_reps.push((t, k));
                let [a, b] = EDGE_VERTICES[k];
                let start = self.corner_at(t, a, b);
                let mut walk = vec![start];
                let mut faces = Vec::new();
                self.edge_class[t][k] = id;
                let mut cur = start;
                loop {
                    let (u, p) = self.glue[cur.tet][cur.c];
                    faces.push(self.face_class[cur.tet][cur.c]);
                    let next = Corner {
                        tet: u,
                        a: p.apply(cur.a),
                        b: p.apply(cur.b),
                        c: p.apply(cur.d),
                        d: p.apply(cur.c),
                    };
                    if next.tet == start.tet && next.slot() == start.slot() {
                        if next.a != start.a {
                            return Err(TriError::invalid(
                                Axiom::EdgeReversed,
                                format!("edge of tet {t} slot {k} is identified with its reverse"),
                            ));
                        }
                        break;
                    }
                    if walk.len() > 6 * n {
                        return Err(TriError::invalid(Axiom::AngleSum, "edge walk does not close"));
                    }
                    let s = next.slot();
                    if self.edge_class[u][s] != usize::MAX {
                        return Err(TriError::invalid(
                            Axiom::EdgeReversed,
                            format!("edge slot ({u},{s}) met twice in one star"),
                        ));
                    }
                    self.edge_class[u][s] = id;
                    walk.push(next);
                    cur = next;
                }
                let bottoms: Vec<usize> = (0..walk.len())
                    .filter(|&i| self.is_top_edge(walk[i].tet, walk[i].slot()))
                    .collect();
                let tops: Vec<usize> = (0..walk.len())
                    .filter(|&i| self.is_bottom_edge(walk[i].tet, walk[i].slot()))
                    .collect();
                if bottoms.len() != 1 || tops.len() != 1 {
                    return Err(TriError::invalid(
                        Axiom::AngleSum,
                        format!(
                            "edge {id} has {} pi corners, expected 2",
                            bottoms.len() + tops.len()
                        ),
                    ));
                }
                let r = bottoms[0];
                let len = walk.len();
                walk.rotate_left(r);
                faces.rotate_left(r);
                let above = (tops[0] + len - r) % len;
                if above < 2 || len - above < 2 {
                    return Err(TriError::invalid(
                        Axiom::FanSides,
                        format!("edge {id}: the two pi corners are adjacent"),
                    ));
                }
                self.stars.push(EdgeStar {
                    edge: id,
                    corners: walk,
                    above,
                    faces,
                });
            }
        }
        let mut ends = Vec::with_capacity(self.stars.len());
        for s in &self.stars {
            let c = s.corners[0];
            ends.push([self.vertex_class[c.tet][c.a], self.vertex_class[c.tet][c.b]]);
        }
        self.edge_ends = ends;
        Ok(())
    }

    fn check_cusps(&self) -> Result<(), TriError> {
        let n = self.glue.len();
        if self.edge_reps.len() != n {
            return Err(TriError::invalid(
                Axiom::TorusCusps,
                format!("{} edge classes for {n} tetrahedra", self.edge_reps.len()),
            ));
        }
        for cusp in 0..self.ncusps {
            let tips = (0..n)
                .flat_map(|t| (0..4).map(move |v| (t, v)))
                .filter(|&(t, v)| self.vertex_class[t][v] == cusp)
                .count() as i64;
            let verts = self
                .edge_ends
                .iter()
                .map(|e| e.iter().filter(|&&c| c == cusp).count() as i64)
                .sum::<i64>();
            if tips % 2 != 0 || verts - 3 * tips / 2 + tips != 0 {
                return Err(TriError::invalid(
                    Axiom::TorusCusps,
                    format!("link of cusp {cusp} is not a torus"),
                ));
            }
        }
        Ok(())
    }

    /// The corner of `t` at edge `a -> b` with the walk direction fixed by the orientation.
    pub fn corner_at(&self, t: usize, a: usize, b: usize) -> Corner {
        let [c, d] = complement([a, b]);
        if parity([a, b, c, d]) * self.eps[t] == 1 {
            Corner { tet: t, a, b, c, d }
        } else {
            Corner { tet: t, a, b, c: d, d: c }
        }
    }

    pub fn n_tets(&self) -> usize {
        self.glue.len()
    }
    pub fn n_faces(&self) -> usize {
        self.face_below.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edge_reps.len()
    }
    pub fn n_cusps(&self) -> usize {
        self.ncusps
    }
    pub fn gluing(&self, t: usize, f: usize) -> (usize, Perm4) {
        self.glue[t][f]
    }
    pub fn orientation(&self, t: usize) -> i32 {
        self.eps[t]
    }
    pub fn pi_pair(&self, t: usize) -> usize {
        self.pi[t]
    }
    pub fn is_top_face(&self, t: usize, f: usize) -> bool {
        self.top[t][f]
    }
    pub fn top_faces(&self, t: usize) -> [usize; 2] {
        let v: Vec<usize> = (0..4).filter(|&f| self.top[t][f]).collect();
        [v[0], v[1]]
    }
    pub fn bottom_faces(&self, t: usize) -> [usize; 2] {
        let v: Vec<usize> = (0..4).filter(|&f| !self.top[t][f]).collect();
        [v[0], v[1]]
    }
    /// Vertices of the top edge (the labels of the bottom faces).
    pub fn top_edge_vertices(&self, t: usize) -> [usize; 2] {
        self.bottom_faces(t)
    }
    pub fn bottom_edge_vertices(&self, t: usize) -> [usize; 2] {
        self.top_faces(t)
    }
    pub fn top_edge_slot(&self, t: usize) -> usize {
        let [a, b] = self.top_edge_vertices(t);
        edge_index(a, b)
    }
    pub fn bottom_edge_slot(&self, t: usize) -> usize {
        let [a, b] = self.bottom_edge_vertices(t);
        edge_index(a, b)
    }
    pub fn is_top_edge(&self, t: usize, slot: usize) -> bool {
        slot == self.top_edge_slot(t)
    }
    pub fn is_bottom_edge(&self, t: usize, slot: usize) -> bool {
        slot == self.bottom_edge_slot(t)
    }
    pub fn top_edge(&self, t: usize) -> usize {
        self.edge_class[t][self.top_edge_slot(t)]
    }
    pub fn bottom_edge(&self, t: usize) -> usize {
        self.edge_class[t][self.bottom_edge_slot(t)]
    }
    pub fn face_class(&self, t: usize, f: usize) -> usize {
        self.face_class[t][f]
    }
    pub fn edge_class(&self, t: usize, slot: usize) -> usize {
        self.edge_class[t][slot]
    }
    pub fn edge_of(&self, t: usize, a: usize, b: usize) -> usize {
        self.edge_class[t][edge_index(a, b)]
    }
    pub fn vertex_class(&self, t: usize, v: usize) -> usize {
        self.vertex_class[t][v]
    }
    /// The (tet, slot) on the side where the face is a top face.
    pub fn face_below(&self, f: usize) -> (usize, usize) {
        self.face_below[f]
    }
    pub fn face_above(&self, f: usize) -> (usize, usize) {
        self.face_above[f]
    }
    pub fn tet_below(&self, f: usize) -> usize {
        self.face_below[f].0
    }
    pub fn tet_above(&self, f: usize) -> usize {
        self.face_above[f].0
    }
    pub fn edge_rep(&self, e: usize) -> (usize, usize) {
        self.edge_reps[e]
    }
    pub fn edge_star(&self, e: usize) -> &EdgeStar {
        &self.stars[e]
    }
    pub fn stars(&self) -> &[EdgeStar] {
        &self.stars
    }
    pub fn edge_ends(&self, e: usize) -> [usize; 2] {
        self.edge_ends[e]
    }
    /// Map a vertex of the face slot `(t, f)` to the matching vertex of the face as seen
    /// from the tetrahedron below it.
    pub fn to_below(&self, t: usize, f: usize, v: usize) -> usize {
        let (tb, fb) = self.face_below[self.face_class[t][f]];
        if (tb, fb) == (t, f) {
            v
        } else {
            self.glue[t][f].1.apply(v)
        }
    }

    pub fn to_document(&self) -> GluingDocument {
        let n = self.n_tets();
        let mut gluings = Vec::new();
        for t in 0..n {
            for f in 0..4 {
                let (u, p) = self.glue[t][f];
                let g = p.apply(f);
                if (t, f) < (u, g) {
                    gluings.push((t, f, u, g, p.0));
                }
            }
        }
        let pi_edges = self.pi.iter().map(|&k| [k, 5 - k]).collect();
        let coorientations = (0..n).map(|t| self.top_faces(t)).collect();
        GluingDocument {
            tetrahedra: n,
            gluings,
            pi_edges,
            coorientations,
        }
    }

    pub fn from_document(doc: &GluingDocument) -> Result<Self, TriError> {
        let n = doc.tetrahedra;
        if doc.pi_edges.len() != n || doc.coorientations.len() != n {
            return Err(TriError::Parse(
                "pi_edges and coorientations need one entry per tetrahedron".into(),
            ));
        }
        let mut glue: Vec<[Option<(usize, Perm4)>; 4]> = vec![[None; 4]; n];
        for &(t, f, u, g, p) in &doc.gluings {
            let perm = Perm4::new(p)
                .ok_or_else(|| TriError::Parse(format!("bad permutation {p:?}")))?;
            if t >= n || u >= n || f > 3 || g > 3 {
                return Err(TriError::Parse(format!("gluing index out of range: {t},{f},{u},{g}")));
            }
            if perm.apply(f) != g {
                return Err(TriError::invalid(
                    Axiom::GluingInvolution,
                    format!("permutation does not carry face {f} to face {g}"),
                ));
            }
            for (slot, val) in [((t, f), (u, perm)), ((u, g), (t, perm.inverse()))] {
                if glue[slot.0][slot.1].is_some() {
                    return Err(TriError::invalid(
                        Axiom::GluingInvolution,
                        format!("face ({},{}) glued twice", slot.0, slot.1),
                    ));
                }
                glue[slot.0][slot.1] = Some(val);
            }
        }
        let mut full = Vec::with_capacity(n);
        for (t, row) in glue.iter().enumerate() {
            let mut out = [(0, Perm4::IDENTITY); 4];
            for f in 0..4 {
                out[f] = row[f].ok_or_else(|| {
                    TriError::invalid(Axiom::GluingInvolution, format!("face ({t},{f}) is unglued"))
                })?;
            }
            full.push(out);
        }
        let mut pi = Vec::with_capacity(n);
        for (t, &[e1, e2]) in doc.pi_edges.iter().enumerate() {
            if e1 > 5 || e2 > 5 || e1 + e2 != 5 {
                return Err(TriError::invalid(
                    Axiom::TautAngles,
                    format!("tet {t}: pi edges {e1},{e2} are not an opposite pair"),
                ));
            }
            pi.push(e1.min(e2));
        }
        TautTriangulation::new(full, pi, doc.coorientations.clone())
    }
}

/// Parse either a JSON gluing document or a census line `signature_angles`.
pub fn parse_triangulation(text: &str) -> Result<TautTriangulation, TriError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let doc: GluingDocument =
            serde_json::from_str(trimmed).map_err(|e| TriError::Parse(e.to_string()))?;
        TautTriangulation::from_document(&doc)
    } else {
        crate::isosig::parse_census_record(trimmed)
    }
}

pub fn serialize(tri: &TautTriangulation) -> String {
    serde_json::to_string(&tri.to_document()).expect("document serializes")
}

/// Disjoint sets with path compression; the smaller index becomes the root.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
