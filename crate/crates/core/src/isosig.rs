//! Decoder for census records `signature_angles`.
//!
//! The signature is a Regina-style isomorphism signature for a connected
//! 3-dimensional triangulation:
//!
//! * characters `a-z A-Z 0-9 + -` encode the values 0..=63;
//! * integers are little-endian in base 64, `chars` characters wide;
//! * the header gives the tetrahedron count `n` (one character if below 63,
//!   otherwise a width character followed by `n` at that width);
//! * facet actions follow, three per character in 2-bit fields
//!   (0 = boundary, 1 = glue to the next fresh tetrahedron by the identity,
//!   2 = glue to an earlier tetrahedron, read from the join tables);
//! * then the join destinations (`chars` wide each) and the join
//!   permutations (one character each, an index into the 24 permutations in
//!   lexicographic order).
//!
//! The angle string has one digit per tetrahedron naming the opposite edge
//! pair with angle π (pair k = edges k and 5-k in the standard numbering).
//! After decoding, every negatively oriented tetrahedron is relabeled by the
//! transposition (0, k+1), which fixes its π pair, so that all tetrahedra are
//! positively oriented. The coorientation is then propagated from tetrahedron 0,
//! whose top faces are 0 and k+1.

use crate::error::{Axiom, TriError};
use crate::perm::Perm4;
use crate::tri::TautTriangulation;

fn sval(c: u8) -> Option<u32> {
    match c {
        b'a'..=b'z' => Some((c - b'a') as u32),
        b'A'..=b'Z' => Some((c - b'A') as u32 + 26),
        b'0'..=b'9' => Some((c - b'0') as u32 + 52),
        b'+' => Some(62),
        b'-' => Some(63),
        _ => None,
    }
}

struct Reader<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn next(&mut self) -> Result<u32, TriError> {
        let c = *self
            .s
            .get(self.pos)
            .ok_or_else(|| TriError::Parse("signature ends early".into()))?;
        self.pos += 1;
        sval(c).ok_or_else(|| TriError::Parse(format!("invalid signature character {:?}", c as char)))
    }
    fn int(&mut self, chars: usize) -> Result<usize, TriError> {
        let mut v: usize = 0;
        for i in 0..chars {
            let x = self.next()? as usize;
            v = v
                .checked_add(x << (6 * i))
                .ok_or_else(|| TriError::Parse("integer overflow in signature".into()))?;
        }
        Ok(v)
    }
}

/// Decode a signature into raw gluings `glue[t][f] = (t', perm)`.
pub fn decode_isosig(sig: &str) -> Result<Vec<[(usize, Perm4); 4]>, TriError> {
    let mut r = Reader {
        s: sig.as_bytes(),
        pos: 0,
    };
    let first = r.next()?;
    let (n, chars) = if first < 63 {
        (first as usize, 1usize)
    } else {
        let chars = r.next()? as usize;
        if chars == 0 || chars > 8 {
            return Err(TriError::Parse("unsupported signature width".into()));
        }
        (r.int(chars)?, chars)
    };
    if n == 0 {
        return Err(TriError::Parse("empty triangulation".into()));
    }
    let total = 4 * n;
    let mut actions = Vec::new();
    let mut facets = 0usize;
    let mut joins = 0usize;
    while facets < total {
        let v = r.next()?;
        for j in 0..3 {
            let a = (v >> (2 * j)) & 3;
            if facets == total {
                if a != 0 {
                    return Err(TriError::Parse("nonzero padding in facet actions".into()));
                }
                continue;
            }
            match a {
                0 => facets += 1,
                1 => facets += 2,
                2 => {
                    facets += 2;
                    joins += 1
                }
                _ => return Err(TriError::Parse("invalid facet action".into())),
            }
            if facets > total {
                return Err(TriError::Parse("facet actions overrun".into()));
            }
            actions.push(a);
        }
    }
    let mut dest = Vec::with_capacity(joins);
    for _ in 0..joins {
        dest.push(r.int(chars)?);
    }
    let all = Perm4::all();
    let mut perms = Vec::with_capacity(joins);
    for _ in 0..joins {
        let i = r.next()? as usize;
        perms.push(*all.get(i).ok_or_else(|| TriError::Parse("permutation index out of range".into()))?);
    }
    if r.pos != r.s.len() {
        return Err(TriError::Parse(
            "trailing characters (multi-component or newer signature versions are unsupported)".into(),
        ));
    }

    let mut glue: Vec<[Option<(usize, Perm4)>; 4]> = vec![[None; 4]; n];
    let mut next_unused = 1;
    let mut ai = 0;
    let mut ji = 0;
    for t in 0..n {
        for f in 0..4 {
            if glue[t][f].is_some() {
                continue;
            }
            let a = *actions
                .get(ai)
                .ok_or_else(|| TriError::Parse("too few facet actions".into()))?;
            ai += 1;
            let (u, p) = match a {
                0 => {
                    return Err(TriError::invalid(
                        Axiom::GluingInvolution,
                        format!("face ({t},{f}) is boundary"),
                    ))
                }
                1 => {
                    if next_unused >= n {
                        return Err(TriError::Parse("identity join past last tetrahedron".into()));
                    }
                    next_unused += 1;
                    (next_unused - 1, Perm4::IDENTITY)
                }
                _ => {
                    let u = dest[ji];
                    let p = perms[ji];
                    ji += 1;
                    if u >= next_unused {
                        return Err(TriError::Parse("join to an unseen tetrahedron".into()));
                    }
                    (u, p)
                }
            };
            let g = p.apply(f);
            if glue[u][g].is_some() || (u == t && g == f) {
                return Err(TriError::Parse("join onto an occupied face".into()));
            }
            glue[t][f] = Some((u, p));
            glue[u][g] = Some((t, p.inverse()));
        }
    }
    Ok(glue
        .into_iter()
        .map(|row| row.map(|x| x.expect("all faces glued")))
        .collect())
}

/// Relabel tetrahedra by `relabel[t]` (new label of old vertex v is relabel[t](v)).
fn relabel(glue: &[[(usize, Perm4); 4]], relabel: &[Perm4]) -> Vec<[(usize, Perm4); 4]> {
    let n = glue.len();
    let mut out = vec![[(0, Perm4::IDENTITY); 4]; n];
    for t in 0..n {
        let inv = relabel[t].inverse();
        for f in 0..4 {
            let (u, p) = glue[t][f];
            let np = relabel[u].compose(p).compose(inv);
            out[t][relabel[t].apply(f)] = (u, np);
        }
    }
    out
}

/// Orient all tetrahedra positively, fixing each π pair.
pub fn orient(glue: &[[(usize, Perm4); 4]], pi: &[usize]) -> Result<Vec<[(usize, Perm4); 4]>, TriError> {
    let n = glue.len();
    let mut eps = vec![0i32; n];
    eps[0] = 1;
    let mut stack = vec![0];
    while let Some(t) = stack.pop() {
        for f in 0..4 {
            let (u, p) = glue[t][f];
            let want = -p.sign() * eps[t];
            if eps[u] == 0 {
                eps[u] = want;
                stack.push(u);
            } else if eps[u] != want {
                return Err(TriError::invalid(Axiom::Orientable, "census triangulation is not orientable"));
            }
        }
    }
    let swaps: Vec<Perm4> = (0..n)
        .map(|t| {
            if eps[t] == -1 {
                Perm4::transposition(0, pi[t] + 1)
            } else {
                Perm4::IDENTITY
            }
        })
        .collect();
    Ok(relabel(glue, &swaps))
}

/// Top faces per tetrahedron, propagated from tetrahedron 0.
pub fn coorient(glue: &[[(usize, Perm4); 4]], pi: &[usize]) -> Result<Vec<[usize; 2]>, TriError> {
    let n = glue.len();
    let first = |t: usize, f: usize| f == 0 || f == pi[t] + 1;
    // dir[t] = 1: faces {0, k+1} are top; -1: they are bottom.
    let mut dir = vec![0i32; n];
    dir[0] = 1;
    let is_top = |dir: &[i32], t: usize, f: usize| first(t, f) == (dir[t] == 1);
    let mut stack = vec![0];
    while let Some(t) = stack.pop() {
        for f in 0..4 {
            let (u, p) = glue[t][f];
            let g = p.apply(f);
            let want_top = !is_top(&dir, t, f);
            let d = if first(u, g) == want_top { 1 } else { -1 };
            if dir[u] == 0 {
                dir[u] = d;
                stack.push(u);
            } else if dir[u] != d {
                return Err(TriError::invalid(
                    Axiom::Coorientation,
                    "angle structure admits no transverse coorientation",
                ));
            }
        }
    }
    Ok((0..n)
        .map(|t| {
            let v: Vec<usize> = (0..4).filter(|&f| is_top(&dir, t, f)).collect();
            [v[0], v[1]]
        })
        .collect())
}

pub fn parse_census_record(line: &str) -> Result<TautTriangulation, TriError> {
    let (sig, angles) = line
        .trim()
        .split_once('_')
        .ok_or_else(|| TriError::Parse("census record must look like signature_angles".into()))?;
    let glue = decode_isosig(sig)?;
    let n = glue.len();
    let pi: Vec<usize> = angles
        .bytes()
        .map(|c| match c {
            b'0'..=b'2' => Ok((c - b'0') as usize),
            _ => Err(TriError::Parse(format!("bad angle character {:?}", c as char))),
        })
        .collect::<Result<_, _>>()?;
    if pi.len() != n {
        return Err(TriError::Parse(format!(
            "angle string has {} entries for {n} tetrahedra",
            pi.len()
        )));
    }
    let glue = orient(&glue, &pi)?;
    let top = coorient(&glue, &pi)?;
    TautTriangulation::new(glue, pi, top)
}
