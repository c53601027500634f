//! The triangulation of a cusp torus by boundary triangles.
//!
//! Truncating ideal vertex `v` of tetrahedron `t` leaves a boundary triangle
//! whose corners are indexed by the other vertices `u != v` (the corner on the
//! tetrahedron edge `{v,u}`) and whose side `u` lies opposite corner `u`, on
//! face `u` of the tetrahedron. Triangles are oriented as seen from the cusp:
//! the corner cycle `(c1,c2,c3)` is positive when the permutation
//! `(v,c1,c2,c3)` is even.

use std::collections::HashMap;

use super::{coordinate, perm_sign, Triangulation, UnionFind};

#[derive(Debug, Clone)]
pub struct CuspTriangulation {
    pub cusp: usize,
    /// Total number of angle coordinates of the ambient triangulation, `3n`.
    pub coord_count: usize,
    triangles: Vec<(usize, u8)>,
    index_of: HashMap<(usize, u8), usize>,
    /// `adjacency[tri][side]` = matched (triangle, side); the `side == v` slot
    /// is unused and holds the triangle itself.
    adjacency: Vec<[(usize, u8); 4]>,
    /// Corner image under the side gluing, `corner_map[tri][side][corner]`.
    corner_map: Vec<[[u8; 4]; 4]>,
    vertex_class: Vec<[usize; 4]>,
    vertex_count: usize,
    positive_order: Vec<[u8; 3]>,
}

impl CuspTriangulation {
    pub(super) fn build(tri: &Triangulation, cusp: usize) -> CuspTriangulation {
        let mut triangles: Vec<(usize, u8)> = tri.cusps()[cusp].vertices.clone();
        triangles.sort_unstable();
        let index_of: HashMap<(usize, u8), usize> = triangles
            .iter()
            .enumerate()
            .map(|(i, &tv)| (tv, i))
            .collect();

        let mut adjacency = Vec::with_capacity(triangles.len());
        let mut corner_map = Vec::with_capacity(triangles.len());
        let mut positive_order = Vec::with_capacity(triangles.len());
        for &(t, v) in &triangles {
            let mut adj = [(usize::MAX, 0u8); 4];
            let mut cmap = [[0u8; 4]; 4];
            for s in 0..4u8 {
                if s == v {
                    adj[s as usize] = (index_of[&(t, v)], v);
                    continue;
                }
                let g = tri.gluing(t, s);
                let (nt, nv) = (g.neighbor, g.perm.apply(v));
                adj[s as usize] = (index_of[&(nt, nv)], g.perm.apply(s));
                for u in 0..4u8 {
                    cmap[s as usize][u as usize] = g.perm.apply(u);
                }
            }
            adjacency.push(adj);
            corner_map.push(cmap);

            let mut cs = [0u8; 3];
            let mut k = 0;
            for u in 0..4u8 {
                if u != v {
                    cs[k] = u;
                    k += 1;
                }
            }
            if perm_sign([v, cs[0], cs[1], cs[2]]) < 0 {
                cs.swap(1, 2);
            }
            positive_order.push(cs);
        }

        // Cusp-triangulation vertices: corner orbits under side adjacency.
        let mut uf = UnionFind::new(4 * triangles.len());
        for (i, &(_, v)) in triangles.iter().enumerate() {
            for u in 0..4u8 {
                if u == v {
                    continue;
                }
                for s in 0..4u8 {
                    if s != v && s != u {
                        let (nj, _) = adjacency[i][s as usize];
                        let nu = corner_map[i][s as usize][u as usize];
                        uf.union(4 * i + u as usize, 4 * nj + nu as usize);
                    }
                }
            }
        }
        let mut vertex_class = vec![[usize::MAX; 4]; triangles.len()];
        let mut ids: HashMap<usize, usize> = HashMap::new();
        for (i, &(_, v)) in triangles.iter().enumerate() {
            for u in 0..4u8 {
                if u != v {
                    let root = uf.find(4 * i + u as usize);
                    let next = ids.len();
                    let id = *ids.entry(root).or_insert(next);
                    vertex_class[i][u as usize] = id;
                }
            }
        }

        CuspTriangulation {
            cusp,
            coord_count: tri.coord_count(),
            triangles,
            index_of,
            adjacency,
            corner_map,
            vertex_class,
            vertex_count: ids.len(),
            positive_order,
        }
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Number of sides after gluing, `3T/2`.
    pub fn side_count(&self) -> usize {
        3 * self.triangles.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.triangle_count() as i64 - self.side_count() as i64 + self.vertex_count as i64
    }

    /// The (tetrahedron, ideal vertex) of a boundary triangle.
    pub fn tet_vertex(&self, tri: usize) -> (usize, u8) {
        self.triangles[tri]
    }

    pub fn triangle_index(&self, tet: usize, vertex: u8) -> Option<usize> {
        self.index_of.get(&(tet, vertex)).copied()
    }

    /// The three corner labels of a triangle (the vertices other than `v`).
    pub fn corners(&self, tri: usize) -> [u8; 3] {
        self.positive_order[tri]
    }

    /// Corner labels in positive cyclic order.
    pub fn positive_order(&self, tri: usize) -> [u8; 3] {
        self.positive_order[tri]
    }

    /// The matched (triangle, side) across a side.
    pub fn adjacent(&self, tri: usize, side: u8) -> (usize, u8) {
        self.adjacency[tri][side as usize]
    }

    /// Image of a corner under the gluing across `side`.
    pub fn corner_across(&self, tri: usize, side: u8, corner: u8) -> u8 {
        self.corner_map[tri][side as usize][corner as usize]
    }

    /// Global angle coordinate of a corner: the edge pair of `{v, corner}`.
    pub fn corner_coordinate(&self, tri: usize, corner: u8) -> usize {
        let (t, v) = self.triangles[tri];
        coordinate(t, v, corner)
    }

    /// Cusp-triangulation vertex at a corner.
    pub fn vertex_at(&self, tri: usize, corner: u8) -> usize {
        self.vertex_class[tri][corner as usize]
    }

    /// Rank of a side in the positive boundary cycle of a triangle.
    ///
    /// With positive corner order `(c1,c2,c3)` the boundary traverses side
    /// `c3` (from corner `c1` to `c2`), then side `c1`, then side `c2`.
    pub fn side_rank(&self, tri: usize, side: u8) -> usize {
        let [c1, c2, c3] = self.positive_order[tri];
        if side == c3 {
            0
        } else if side == c1 {
            1
        } else {
            debug_assert_eq!(side, c2);
            2
        }
    }
}
