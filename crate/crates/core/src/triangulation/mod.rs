//! Combinatorics of ideal triangulations: face gluings, edge classes, cusps,
//! and the induced triangulations of the cusp tori.
//!
//! Conventions: face `f` of a tetrahedron is the face opposite vertex `f`;
//! gluing permutations are stored as images of `(0,1,2,3)` and must be odd so
//! that tetrahedron orientations are globally consistent. Angle coordinates
//! live in `R^{3n}`: coordinate `3i + m` is the dihedral angle of tetrahedron
//! `i` on the opposite-edge pair `m`, with pair `0 = {01,23}`, `1 = {02,13}`,
//! `2 = {03,12}`.

mod cusp;
mod parse;

pub use cusp::CuspTriangulation;

use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TriangulationError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("bad gluing at tetrahedron {tet} face {face}: {message}")]
    BadGluing {
        tet: usize,
        face: u8,
        message: String,
    },
    #[error("non-orientable gluing at tetrahedron {tet} face {face}: permutation is even")]
    NonOrientable { tet: usize, face: u8 },
    #[error("cusp {cusp} link is not a torus (Euler characteristic {chi})")]
    BadCuspLink { cusp: usize, chi: i64 },
}

/// A permutation of `{0,1,2,3}`, stored as images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub fn apply(&self, v: u8) -> u8 {
        self.0[v as usize]
    }

    pub fn inverse(&self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (i, &img) in self.0.iter().enumerate() {
            inv[img as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// `+1` for even permutations, `-1` for odd.
    pub fn sign(&self) -> i8 {
        perm_sign(self.0)
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = [false; 4];
        for &v in &self.0 {
            if v > 3 || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        true
    }
}

/// Sign of a permutation of four distinct values.
pub fn perm_sign(p: [u8; 4]) -> i8 {
    let mut s = 1i8;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Index of the opposite-edge pair containing the tetrahedron edge `{a,b}`.
pub fn pair_index(a: u8, b: u8) -> usize {
    debug_assert!(a != b && a < 4 && b < 4);
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    match (lo, hi) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        (0, 3) | (1, 2) => 2,
        _ => unreachable!(),
    }
}

/// Global angle coordinate of the edge pair containing `{a,b}` in tetrahedron `tet`.
pub fn coordinate(tet: usize, a: u8, b: u8) -> usize {
    3 * tet + pair_index(a, b)
}

/// One face gluing: the neighboring tetrahedron and the vertex map onto it.
#[derive(Debug, Clone, Copy)]
pub struct Gluing {
    pub neighbor: usize,
    pub perm: Perm4,
}

/// An edge of the glued-up manifold, as the cyclic list of tetrahedron edges
/// identified to it. Members are directed pairs `(a, b)`: walking around the
/// edge, endpoint `a` of each member lies at the same cusp (end 0), and
/// endpoint `b` at the other (end 1).
#[derive(Debug, Clone)]
pub struct EdgeClass {
    pub id: usize,
    pub members: Vec<(usize, (u8, u8))>,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.members.len()
    }
}

/// A cusp: one torus end of the manifold, as the ideal vertices clustered there.
#[derive(Debug, Clone)]
pub struct Cusp {
    pub id: usize,
    pub vertices: Vec<(usize, u8)>,
}

/// A peripheral curve supplied in the input file, kept as raw segment data
/// until it is validated against the cusp triangulation.
#[derive(Debug, Clone)]
pub struct RawPeripheral {
    pub cusp: usize,
    pub is_meridian: bool,
    pub segments: Vec<(usize, u8, u8, u8)>, // (tet, vertex, enter side, exit side)
}

/// A validated ideal triangulation with derived edge classes and cusps.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub name: String,
    gluings: Vec<[Gluing; 4]>,
    edge_classes: Vec<EdgeClass>,
    /// Edge class id of each tetrahedron edge, indexed by `[tet][pair_index6]`
    /// where pair_index6 orders the six vertex pairs 01,02,03,12,13,23.
    edge_of: Vec<[usize; 6]>,
    cusps: Vec<Cusp>,
    cusp_of: Vec<[usize; 4]>,
    /// File-supplied meridian/longitude per cusp, if any.
    pub peripherals: Vec<Option<(RawPeripheral, RawPeripheral)>>,
}

fn pair_index6(a: u8, b: u8) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    match (lo, hi) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => unreachable!(),
    }
}

const VERTEX_PAIRS: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Triangulation {
    /// Parse and validate a document in the native text format.
    pub fn parse(text: &str) -> Result<Triangulation, TriangulationError> {
        let doc = parse::parse_document(text)?;
        Triangulation::from_gluings(doc.name, doc.gluings, doc.peripherals)
    }

    /// Validate raw gluing data and derive edge classes and cusps.
    pub fn from_gluings(
        name: String,
        gluings: Vec<[Gluing; 4]>,
        raw_peripherals: Vec<RawPeripheral>,
    ) -> Result<Triangulation, TriangulationError> {
        let n = gluings.len();
        // Involution, self-face, and orientability checks.
        for (t, faces) in gluings.iter().enumerate() {
            for f in 0..4u8 {
                let g = faces[f as usize];
                if g.neighbor >= n {
                    return Err(TriangulationError::BadGluing {
                        tet: t,
                        face: f,
                        message: format!("neighbor {} out of range", g.neighbor),
                    });
                }
                if g.perm.sign() != -1 {
                    return Err(TriangulationError::NonOrientable { tet: t, face: f });
                }
                let f2 = g.perm.apply(f);
                if g.neighbor == t && f2 == f {
                    return Err(TriangulationError::BadGluing {
                        tet: t,
                        face: f,
                        message: "face glued to itself".into(),
                    });
                }
                let back = gluings[g.neighbor][f2 as usize];
                if back.neighbor != t || back.perm != g.perm.inverse() {
                    return Err(TriangulationError::BadGluing {
                        tet: t,
                        face: f,
                        message: "gluing is not an involution".into(),
                    });
                }
            }
        }

        // Edge classes by walking around each edge through the face gluings.
        let mut edge_of = vec![[usize::MAX; 6]; n];
        let mut edge_classes = Vec::new();
        for t0 in 0..n {
            for &(a0, b0) in &VERTEX_PAIRS {
                if edge_of[t0][pair_index6(a0, b0)] != usize::MAX {
                    continue;
                }
                let id = edge_classes.len();
                // Leave through the smaller face containing the edge.
                let f0 = (0..4u8).find(|f| *f != a0 && *f != b0).unwrap();
                let start = (t0, a0, b0, f0);
                let mut cur = start;
                let mut members = Vec::new();
                loop {
                    let (t, a, b, f) = cur;
                    members.push((t, (a, b)));
                    edge_of[t][pair_index6(a, b)] = id;
                    let g = gluings[t][f as usize];
                    let (a2, b2) = (g.perm.apply(a), g.perm.apply(b));
                    let arrived = g.perm.apply(f);
                    let next_f = (0..4u8)
                        .find(|x| *x != a2 && *x != b2 && *x != arrived)
                        .unwrap();
                    cur = (g.neighbor, a2, b2, next_f);
                    if cur == start {
                        break;
                    }
                    if members.len() > 6 * n {
                        return Err(TriangulationError::BadGluing {
                            tet: t0,
                            face: f0,
                            message: "edge walk does not close".into(),
                        });
                    }
                }
                edge_classes.push(EdgeClass { id, members });
            }
        }

        // Cusps as orbits of ideal vertices under the face gluings.
        let mut uf = UnionFind::new(4 * n);
        for (t, faces) in gluings.iter().enumerate() {
            for f in 0..4u8 {
                let g = faces[f as usize];
                for v in 0..4u8 {
                    if v != f {
                        uf.union(4 * t + v as usize, 4 * g.neighbor + g.perm.apply(v) as usize);
                    }
                }
            }
        }
        let mut cusp_ids: HashMap<usize, usize> = HashMap::new();
        let mut cusps: Vec<Cusp> = Vec::new();
        let mut cusp_of = vec![[usize::MAX; 4]; n];
        for (t, ids) in cusp_of.iter_mut().enumerate() {
            for v in 0..4u8 {
                let root = uf.find(4 * t + v as usize);
                let id = *cusp_ids.entry(root).or_insert_with(|| {
                    cusps.push(Cusp {
                        id: cusps.len(),
                        vertices: Vec::new(),
                    });
                    cusps.len() - 1
                });
                cusps[id].vertices.push((t, v));
                ids[v as usize] = id;
            }
        }

        let mut peripherals = vec![None; cusps.len()];
        let mut pending: HashMap<usize, (Option<RawPeripheral>, Option<RawPeripheral>)> =
            HashMap::new();
        for p in raw_peripherals {
            if p.cusp >= cusps.len() {
                return Err(TriangulationError::Syntax {
                    line: 0,
                    message: format!("peripheral curve references unknown cusp {}", p.cusp),
                });
            }
            let slot = pending.entry(p.cusp).or_default();
            if p.is_meridian {
                slot.0 = Some(p);
            } else {
                slot.1 = Some(p);
            }
        }
        for (c, (m, l)) in pending {
            match (m, l) {
                (Some(m), Some(l)) => peripherals[c] = Some((m, l)),
                _ => {
                    return Err(TriangulationError::Syntax {
                        line: 0,
                        message: format!("cusp {c} needs both meridian and longitude"),
                    })
                }
            }
        }

        let tri = Triangulation {
            name,
            gluings,
            edge_classes,
            edge_of,
            cusps,
            cusp_of,
            peripherals,
        };

        // Each cusp link must be a torus. With odd gluing permutations the
        // links are orientable, so chi = 0 suffices.
        for c in 0..tri.cusps.len() {
            let chi = tri.cusp_euler_characteristic(c);
            if chi != 0 {
                return Err(TriangulationError::BadCuspLink { cusp: c, chi });
            }
        }
        debug_assert_eq!(tri.edge_classes.len(), n);

        Ok(tri)
    }

    pub fn tet_count(&self) -> usize {
        self.gluings.len()
    }

    /// Number of angle coordinates, `3n`.
    pub fn coord_count(&self) -> usize {
        3 * self.gluings.len()
    }

    pub fn gluing(&self, tet: usize, face: u8) -> Gluing {
        self.gluings[tet][face as usize]
    }

    pub fn edge_classes(&self) -> &[EdgeClass] {
        &self.edge_classes
    }

    /// Edge class id of the tetrahedron edge `{a,b}` of `tet`.
    pub fn edge_class_of(&self, tet: usize, a: u8, b: u8) -> usize {
        self.edge_of[tet][pair_index6(a, b)]
    }

    pub fn cusps(&self) -> &[Cusp] {
        &self.cusps
    }

    pub fn cusp_of_vertex(&self, tet: usize, v: u8) -> usize {
        self.cusp_of[tet][v as usize]
    }

    /// The two cusps at the ends of an edge class (end 0, end 1).
    pub fn edge_ends(&self, edge: usize) -> (usize, usize) {
        let (t, (a, b)) = self.edge_classes[edge].members[0];
        (self.cusp_of_vertex(t, a), self.cusp_of_vertex(t, b))
    }

    pub fn cusp_triangulation(&self, cusp: usize) -> CuspTriangulation {
        CuspTriangulation::build(self, cusp)
    }

    fn cusp_euler_characteristic(&self, cusp: usize) -> i64 {
        let tris = self.cusps[cusp].vertices.len() as i64;
        // Every side is glued in pairs, so side count is 3T/2. Vertices are
        // corner orbits under the side adjacency.
        let mut corner_ids: HashMap<(usize, u8, u8), usize> = HashMap::new();
        for &(t, v) in &self.cusps[cusp].vertices {
            for u in 0..4u8 {
                if u != v {
                    let id = corner_ids.len();
                    corner_ids.insert((t, v, u), id);
                }
            }
        }
        let mut uf = UnionFind::new(corner_ids.len());
        for (&(t, v, u), &id) in &corner_ids {
            for s in 0..4u8 {
                if s != v && s != u {
                    let g = self.gluings[t][s as usize];
                    let other = corner_ids[&(g.neighbor, g.perm.apply(v), g.perm.apply(u))];
                    uf.union(id, other);
                }
            }
        }
        let mut roots: Vec<usize> = corner_ids.values().map(|&id| uf.find(id)).collect();
        roots.sort_unstable();
        roots.dedup();
        tris - 3 * tris / 2 + roots.len() as i64
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
