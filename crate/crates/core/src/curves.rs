//! Oriented normal closed curves on cusp tori: edge-link loops, a homology
//! basis per cusp, signed intersection numbers, and leading-trailing
//! deformation vectors.
//!
//! Curves are stored purely combinatorially, as cyclic lists of segments. A
//! segment crosses one boundary triangle from its `enter` side to its `exit`
//! side and cuts off the corner shared by the two sides. All signs derive
//! from the fixed cusp orientation: the cut corner counts `+1` when it lies
//! to the left of the oriented segment, which happens exactly when
//! `(enter, cut, exit)` is a positively ordered corner triple.

use std::collections::HashMap;

use thiserror::Error;

use crate::triangulation::{perm_sign, CuspTriangulation, Triangulation, UnionFind};

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("curves lie on different cusps ({0} and {1})")]
    DifferentCusps(usize, usize),
    #[error("homology basis construction failed on cusp {cusp}: {message}")]
    BasisFailure { cusp: usize, message: String },
    #[error("invalid normal curve: {0}")]
    InvalidCurve(String),
}

/// One pass of a curve through a boundary triangle, from side `enter` to
/// side `exit`. Sides are labeled by the opposite corner's vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub triangle: usize,
    pub enter: u8,
    pub exit: u8,
}

/// An oriented normal closed curve on one cusp torus.
#[derive(Debug, Clone)]
pub struct NormalCurve {
    pub cusp: usize,
    pub segments: Vec<Segment>,
}

/// A leading-trailing deformation: a tangent vector to the angle polytope,
/// indexed by angle coordinate. Integer-valued for a single curve; per-
/// tetrahedron coordinate triples always sum to zero.
#[derive(Debug, Clone)]
pub struct DeformationVector {
    pub entries: Vec<f64>,
}

impl NormalCurve {
    /// Check segment ranges, `enter != exit`, and cyclic chaining: the exit
    /// side of each segment must be glued to the enter side of the next.
    pub fn validate(&self, ct: &CuspTriangulation) -> Result<(), CurveError> {
        if self.segments.is_empty() {
            return Err(CurveError::InvalidCurve("curve has no segments".into()));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.triangle >= ct.triangle_count() {
                return Err(CurveError::InvalidCurve(format!(
                    "segment {i}: triangle {} out of range",
                    seg.triangle
                )));
            }
            let (_, v) = ct.tet_vertex(seg.triangle);
            if seg.enter > 3 || seg.exit > 3 || seg.enter == v || seg.exit == v {
                return Err(CurveError::InvalidCurve(format!(
                    "segment {i}: bad side labels ({}, {})",
                    seg.enter, seg.exit
                )));
            }
            if seg.enter == seg.exit {
                return Err(CurveError::InvalidCurve(format!(
                    "segment {i}: enters and exits through the same side"
                )));
            }
            let next = self.segments[(i + 1) % self.segments.len()];
            if ct.adjacent(seg.triangle, seg.exit) != (next.triangle, next.enter) {
                return Err(CurveError::InvalidCurve(format!(
                    "segment {i} does not chain to segment {}",
                    (i + 1) % self.segments.len()
                )));
            }
        }
        Ok(())
    }

    /// The corner a segment cuts off, with its sign: `+1` when the corner
    /// lies to the left of the oriented segment.
    pub fn cut_corner_of(&self, ct: &CuspTriangulation, seg: &Segment) -> (u8, i8) {
        cut_corner(ct, seg)
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> NormalCurve {
        NormalCurve {
            cusp: self.cusp,
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| Segment {
                    triangle: s.triangle,
                    enter: s.exit,
                    exit: s.enter,
                })
                .collect(),
        }
    }

    /// The leading-trailing deformation vector `w`: per segment, `+1` at the
    /// coordinate of the corner opposite the entering side and `-1` at the
    /// coordinate of the corner opposite the leaving side.
    pub fn leading_trailing_vector(&self, ct: &CuspTriangulation) -> DeformationVector {
        let mut entries = vec![0.0; ct.coord_count];
        for seg in &self.segments {
            entries[ct.corner_coordinate(seg.triangle, seg.enter)] += 1.0;
            entries[ct.corner_coordinate(seg.triangle, seg.exit)] -= 1.0;
        }
        DeformationVector { entries }
    }

    /// The signed cut-corner incidence vector `r`: `r . v` is the imaginary
    /// part of the holonomy at any angle vector `v`. For an edge-link curve
    /// this reproduces the edge row of the constraint matrix.
    pub fn holonomy_row(&self, ct: &CuspTriangulation) -> Vec<f64> {
        let mut row = vec![0.0; ct.coord_count];
        for seg in &self.segments {
            let (corner, eps) = cut_corner(ct, seg);
            row[ct.corner_coordinate(seg.triangle, corner)] += eps as f64;
        }
        row
    }

    /// Cut-and-rejoin at two passes `i < j` through the same triangle,
    /// splitting the curve into two closed curves whose deformation vectors
    /// and intersection numbers add up to those of the original.
    pub fn cut_and_rejoin(&self, i: usize, j: usize) -> (NormalCurve, NormalCurve) {
        assert!(i < j && j < self.segments.len());
        let (a, b) = (self.segments[i], self.segments[j]);
        assert_eq!(a.triangle, b.triangle, "passes must share a triangle");
        // First curve: enter like pass i, leave like pass j, then continue
        // after j and wrap around to just before i.
        let mut first = vec![Segment {
            triangle: a.triangle,
            enter: a.enter,
            exit: b.exit,
        }];
        first.extend_from_slice(&self.segments[j + 1..]);
        first.extend_from_slice(&self.segments[..i]);
        // Second curve: enter like pass j, leave like pass i, then the
        // stretch strictly between the two passes.
        let mut second = vec![Segment {
            triangle: a.triangle,
            enter: b.enter,
            exit: a.exit,
        }];
        second.extend_from_slice(&self.segments[i + 1..j]);
        (
            NormalCurve {
                cusp: self.cusp,
                segments: first,
            },
            NormalCurve {
                cusp: self.cusp,
                segments: second,
            },
        )
    }
}

/// The corner cut off by a segment and its sign. The cut corner is the
/// unique vertex on both the enter and exit sides; it counts `+1` exactly
/// when `(v, enter, cut, exit)` is an even permutation, i.e. when the triple
/// `(enter-opposite corner, cut corner, exit-opposite corner)` is positively
/// ordered on the cusp torus.
pub fn cut_corner(ct: &CuspTriangulation, seg: &Segment) -> (u8, i8) {
    let (_, v) = ct.tet_vertex(seg.triangle);
    let mut cut = 0u8;
    for u in 0..4u8 {
        if u != v && u != seg.enter && u != seg.exit {
            cut = u;
        }
    }
    (cut, perm_sign([v, seg.enter, cut, seg.exit]))
}

/// The normal curve encircling the chosen endpoint of an edge class, oriented
/// so that every cut corner carries sign `+1`. Its cut corners are exactly
/// the corners whose angle coordinate lies on the edge class.
pub fn edge_link_curve(
    tri: &Triangulation,
    ct: &CuspTriangulation,
    edge: usize,
    end: u8,
) -> NormalCurve {
    let (t0, (a, b)) = tri.edge_classes()[edge].members[0];
    let (vertex, corner) = if end == 0 { (a, b) } else { (b, a) };
    debug_assert_eq!(tri.cusp_of_vertex(t0, vertex), ct.cusp);
    let start = ct
        .triangle_index(t0, vertex)
        .expect("edge endpoint lies on this cusp");

    // The two sides through the start corner, ordered so the first segment
    // has sign +1.
    let (_, v) = ct.tet_vertex(start);
    let others: Vec<u8> = (0..4u8).filter(|&s| s != v && s != corner).collect();
    let (enter, exit) = if perm_sign([v, others[0], corner, others[1]]) > 0 {
        (others[0], others[1])
    } else {
        (others[1], others[0])
    };

    let mut segments = vec![Segment {
        triangle: start,
        enter,
        exit,
    }];
    let mut u = corner;
    loop {
        let prev = *segments.last().unwrap();
        let (ntri, nenter) = ct.adjacent(prev.triangle, prev.exit);
        let nu = ct.corner_across(prev.triangle, prev.exit, u);
        let (_, nv) = ct.tet_vertex(ntri);
        let mut nexit = 0u8;
        for s in 0..4u8 {
            if s != nv && s != nu && s != nenter {
                nexit = s;
            }
        }
        let seg = Segment {
            triangle: ntri,
            enter: nenter,
            exit: nexit,
        };
        if seg == segments[0] {
            break;
        }
        segments.push(seg);
        u = nu;
        assert!(
            segments.len() <= 6 * ct.triangle_count(),
            "edge-link walk failed to close"
        );
    }
    NormalCurve {
        cusp: ct.cusp,
        segments,
    }
}

/// All edge-link curves of a triangulation (end 0 of every edge class),
/// grouped with the cusp triangulation index they live on.
pub fn edge_link_curves(tri: &Triangulation, cts: &[CuspTriangulation]) -> Vec<NormalCurve> {
    (0..tri.edge_classes().len())
        .map(|e| {
            let (c0, _) = tri.edge_ends(e);
            edge_link_curve(tri, &cts[c0], e, 0)
        })
        .collect()
}

/// Two simple closed normal curves spanning the homology of the cusp torus,
/// with `|intersection_number| = 1`.
///
/// Construction: a spanning tree of the dual graph of the cusp triangulation
/// and a spanning tree of the vertex graph on the remaining sides leave
/// exactly two sides; the fundamental cycle of each through the dual tree is
/// a simple normal curve, and the two together form a homology basis.
pub fn homology_basis(
    ct: &CuspTriangulation,
) -> Result<(NormalCurve, NormalCurve), CurveError> {
    let fail = |message: String| CurveError::BasisFailure {
        cusp: ct.cusp,
        message,
    };
    let t_count = ct.triangle_count();

    // Breadth-first spanning tree of the dual graph (nodes = triangles,
    // edges = glued side pairs).
    let mut parent = vec![usize::MAX; t_count];
    let mut side_to_parent = vec![4u8; t_count];
    let mut depth = vec![0usize; t_count];
    let mut visited = vec![false; t_count];
    let mut queue = std::collections::VecDeque::from([0usize]);
    visited[0] = true;
    let mut tree_side = vec![[false; 4]; t_count];
    while let Some(i) = queue.pop_front() {
        let (_, v) = ct.tet_vertex(i);
        for s in 0..4u8 {
            if s == v {
                continue;
            }
            let (j, s2) = ct.adjacent(i, s);
            if !visited[j] {
                visited[j] = true;
                parent[j] = i;
                side_to_parent[j] = s2;
                depth[j] = depth[i] + 1;
                tree_side[i][s as usize] = true;
                tree_side[j][s2 as usize] = true;
                queue.push_back(j);
            }
        }
    }
    if visited.iter().any(|&b| !b) {
        return Err(fail("dual graph is disconnected".into()));
    }

    // Spanning tree of the vertex graph on the non-tree sides; the sides
    // that close a vertex cycle are the two we want.
    let mut uf = UnionFind::new(ct.vertex_count());
    let mut leftover: Vec<(usize, u8)> = Vec::new();
    for (i, in_tree) in tree_side.iter().enumerate() {
        let (_, v) = ct.tet_vertex(i);
        for s in 0..4u8 {
            if s == v || in_tree[s as usize] {
                continue;
            }
            if (i, s) > ct.adjacent(i, s) {
                continue; // visit each glued side once
            }
            let ends: Vec<u8> = (0..4u8).filter(|&c| c != v && c != s).collect();
            let (a, b) = (ct.vertex_at(i, ends[0]), ct.vertex_at(i, ends[1]));
            if uf.find(a) == uf.find(b) {
                leftover.push((i, s));
            } else {
                uf.union(a, b);
            }
        }
    }
    if leftover.len() != 2 {
        return Err(fail(format!(
            "expected 2 basis sides, found {}",
            leftover.len()
        )));
    }

    let mu = fundamental_cycle(ct, &parent, &side_to_parent, &depth, leftover[0])?;
    let lambda = fundamental_cycle(ct, &parent, &side_to_parent, &depth, leftover[1])?;
    let iota = intersection_number(ct, &mu, &lambda)?;
    if iota.abs() != 1 {
        return Err(fail(format!("basis candidates intersect {iota} times")));
    }
    Ok((mu, lambda))
}

/// The simple closed normal curve through the dual spanning tree closed up by
/// one non-tree side.
fn fundamental_cycle(
    ct: &CuspTriangulation,
    parent: &[usize],
    side_to_parent: &[u8],
    depth: &[usize],
    closing: (usize, u8),
) -> Result<NormalCurve, CurveError> {
    let (i, s) = closing;
    let (j, s2) = ct.adjacent(i, s);
    if i == j {
        // A triangle glued to itself: the cycle is a single segment.
        return Ok(NormalCurve {
            cusp: ct.cusp,
            segments: vec![Segment {
                triangle: i,
                enter: s2,
                exit: s,
            }],
        });
    }

    // Tree path from j to i: climb both endpoints to their common ancestor.
    // Each entry pairs a node with the side toward the next node on the path.
    let mut up_j: Vec<(usize, u8)> = Vec::new(); // j ... lca (side toward parent)
    let mut up_i: Vec<(usize, u8)> = Vec::new(); // i ... lca
    let (mut a, mut b) = (j, i);
    while depth[a] > depth[b] {
        up_j.push((a, side_to_parent[a]));
        a = parent[a];
    }
    while depth[b] > depth[a] {
        up_i.push((b, side_to_parent[b]));
        b = parent[b];
    }
    while a != b {
        up_j.push((a, side_to_parent[a]));
        a = parent[a];
        up_i.push((b, side_to_parent[b]));
        b = parent[b];
    }
    let lca = a;

    // Cyclic node sequence j -> lca -> i closed by the non-tree side;
    // nodes[p] = (node, exit side toward nodes[p+1]).
    let mut nodes: Vec<(usize, u8)> = up_j;
    if up_i.is_empty() {
        // lca == i: leave it through the closing side.
        nodes.push((i, s));
    } else {
        // Descend lca -> i: each node below exits toward its child, i.e.
        // through the side glued to the child's side toward its parent.
        for &(child, side_in_child) in up_i.iter().rev() {
            let (node_above, side_toward_child) = ct.adjacent(child, side_in_child);
            debug_assert_eq!(node_above, parent[child]);
            nodes.push((node_above, side_toward_child));
        }
        nodes.push((i, s));
    }
    debug_assert_eq!(nodes.iter().filter(|&&(n, _)| n == lca).count(), 1);

    // Build segments: walk the cyclic node list; enter side = side glued to
    // the previous node's exit side.
    let m = nodes.len();
    let mut segments = Vec::with_capacity(m);
    for p in 0..m {
        let (node, exit) = nodes[p];
        let (prev_node, prev_exit) = nodes[(p + m - 1) % m];
        let (t, enter) = ct.adjacent(prev_node, prev_exit);
        if t != node {
            return Err(CurveError::BasisFailure {
                cusp: ct.cusp,
                message: "fundamental cycle does not chain".into(),
            });
        }
        if enter == exit {
            return Err(CurveError::BasisFailure {
                cusp: ct.cusp,
                message: "fundamental cycle has a spike".into(),
            });
        }
        segments.push(Segment {
            triangle: node,
            enter,
            exit,
        });
    }
    let curve = NormalCurve {
        cusp: ct.cusp,
        segments,
    };
    curve.validate(ct)?;
    Ok(curve)
}

/// Every curve the pipeline needs, bundled per triangulation: the cusp
/// triangulations, a completeness basis `(mu, lambda)` per cusp (file-
/// supplied peripheral curves when present, otherwise the constructed
/// homology basis), and one edge-link curve per edge class.
#[derive(Debug, Clone)]
pub struct CurveSystem {
    pub cusp_triangulations: Vec<CuspTriangulation>,
    pub bases: Vec<(NormalCurve, NormalCurve)>,
    pub edge_links: Vec<NormalCurve>,
}

impl CurveSystem {
    pub fn build(tri: &Triangulation) -> Result<CurveSystem, CurveError> {
        let cusp_triangulations: Vec<CuspTriangulation> = (0..tri.cusps().len())
            .map(|c| tri.cusp_triangulation(c))
            .collect();
        let mut bases = Vec::with_capacity(cusp_triangulations.len());
        for (c, ct) in cusp_triangulations.iter().enumerate() {
            match &tri.peripherals[c] {
                Some((raw_mu, raw_lambda)) => {
                    let mu = from_raw(ct, &raw_mu.segments)?;
                    let lambda = from_raw(ct, &raw_lambda.segments)?;
                    let iota = intersection_number(ct, &mu, &lambda)?;
                    if iota.abs() != 1 {
                        return Err(CurveError::InvalidCurve(format!(
                            "supplied peripheral curves of cusp {c} intersect {iota} times"
                        )));
                    }
                    bases.push((mu, lambda));
                }
                None => bases.push(homology_basis(ct)?),
            }
        }
        let edge_links = edge_link_curves(tri, &cusp_triangulations);
        Ok(CurveSystem {
            cusp_triangulations,
            bases,
            edge_links,
        })
    }
}

/// Resolve a file-supplied segment list `(tet, vertex, enter, exit)` against
/// the cusp triangulation and validate it.
fn from_raw(
    ct: &CuspTriangulation,
    raw: &[(usize, u8, u8, u8)],
) -> Result<NormalCurve, CurveError> {
    let mut segments = Vec::with_capacity(raw.len());
    for &(tet, vertex, enter, exit) in raw {
        let triangle = ct.triangle_index(tet, vertex).ok_or_else(|| {
            CurveError::InvalidCurve(format!(
                "segment ({tet},{vertex},..) does not lie on cusp {}",
                ct.cusp
            ))
        })?;
        segments.push(Segment {
            triangle,
            enter,
            exit,
        });
    }
    let curve = NormalCurve {
        cusp: ct.cusp,
        segments,
    };
    curve.validate(ct)?;
    Ok(curve)
}

/// The signed intersection number of two oriented normal curves on one cusp
/// torus: crossings of `rho` by `sigma` from right to left, minus left to
/// right.
///
/// The curves are realized transversally: every crossing point of a curve
/// with a triangle side gets a distinct position along that side, consistent
/// between the two triangles sharing it. Crossing signs then follow from the
/// cyclic order of chord endpoints on each oriented triangle boundary. The
/// signed total depends only on the homology classes, so the arbitrary
/// position choices do not matter; passing the same curve twice realizes a
/// transverse pushoff, giving self-intersection zero for free.
pub fn intersection_number(
    ct: &CuspTriangulation,
    rho: &NormalCurve,
    sigma: &NormalCurve,
) -> Result<i64, CurveError> {
    if rho.cusp != sigma.cusp {
        return Err(CurveError::DifferentCusps(rho.cusp, sigma.cusp));
    }
    let chords = realize(ct, &[rho, sigma]);
    let mut total = 0i64;
    for &(t1, p1, p2) in &chords[0] {
        for &(t2, q1, q2) in &chords[1] {
            if t1 != t2 {
                continue;
            }
            // The right side of the directed chord p1 -> p2 is the boundary
            // arc running counterclockwise from p1 to p2.
            let right1 = in_ccw_arc(q1, p1, p2);
            let right2 = in_ccw_arc(q2, p1, p2);
            if right1 && !right2 {
                total += 1;
            } else if !right1 && right2 {
                total -= 1;
            }
        }
    }
    Ok(total)
}

/// Is `x` on the counterclockwise arc from `a` to `b` (exclusive) of a circle
/// of circumference 3?
fn in_ccw_arc(x: f64, a: f64, b: f64) -> bool {
    if a < b {
        a < x && x < b
    } else {
        x > a || x < b
    }
}

/// Realize curves transversally: each curve becomes a list of chords
/// `(triangle, from, to)` with endpoints as positions on the triangle's
/// boundary circle (circumference 3, side of rank r covering `[r, r+1)`).
fn realize(ct: &CuspTriangulation, curves: &[&NormalCurve]) -> Vec<Vec<(usize, f64, f64)>> {
    // A crossing point sits where consecutive segments chain through a glued
    // side; key each glued side by its lexicographically smaller half.
    let side_key = |t: usize, s: u8| -> (usize, u8) { (t, s).min(ct.adjacent(t, s)) };

    let mut per_side: HashMap<(usize, u8), usize> = HashMap::new();
    for curve in curves {
        for seg in &curve.segments {
            *per_side.entry(side_key(seg.triangle, seg.exit)).or_insert(0) += 1;
        }
    }

    let mut next_slot: HashMap<(usize, u8), usize> = HashMap::new();
    let mut chords = Vec::with_capacity(curves.len());
    for curve in curves {
        let m = curve.segments.len();
        // lambda[i] = canonical position of the crossing between segments
        // i and i+1, strictly inside (0, 1).
        let mut lambda = Vec::with_capacity(m);
        for seg in &curve.segments {
            let key = side_key(seg.triangle, seg.exit);
            let slot = next_slot.entry(key).or_insert(0);
            lambda.push((*slot as f64 + 1.0) / (per_side[&key] as f64 + 1.0));
            *slot += 1;
        }
        let mut list = Vec::with_capacity(m);
        for (i, seg) in curve.segments.iter().enumerate() {
            let enter_lambda = lambda[(i + m - 1) % m];
            let exit_lambda = lambda[i];
            let from = side_position(ct, seg.triangle, seg.enter, enter_lambda, &side_key);
            let to = side_position(ct, seg.triangle, seg.exit, exit_lambda, &side_key);
            list.push((seg.triangle, from, to));
        }
        chords.push(list);
    }
    chords
}

/// Position on the boundary circle of a triangle of a point at canonical
/// parameter `lambda` along the glued side `(t, s)`. The parameter is
/// measured along the side's positive boundary direction in the canonical
/// triangle; the opposite triangle sees it reversed.
fn side_position(
    ct: &CuspTriangulation,
    t: usize,
    s: u8,
    lambda: f64,
    side_key: &impl Fn(usize, u8) -> (usize, u8),
) -> f64 {
    let local = if side_key(t, s) == (t, s) {
        lambda
    } else {
        1.0 - lambda
    };
    ct.side_rank(t, s) as f64 + local
}

/// A uniformly chained random normal curve, for property tests: a random
/// walk on the dual graph closed up at the first repeated crossing state.
pub fn random_normal_curve<R: rand::Rng>(ct: &CuspTriangulation, rng: &mut R) -> NormalCurve {
    loop {
        let mut tri = rng.gen_range(0..ct.triangle_count());
        let (_, v) = ct.tet_vertex(tri);
        let sides: Vec<u8> = (0..4u8).filter(|&s| s != v).collect();
        let mut enter = sides[rng.gen_range(0..3)];
        let start = (tri, enter);
        let mut segments: Vec<Segment> = Vec::new();
        for _ in 0..64 * ct.triangle_count() {
            let (_, v) = ct.tet_vertex(tri);
            let choices: Vec<u8> = (0..4u8).filter(|&s| s != v && s != enter).collect();
            let exit = choices[rng.gen_range(0..2)];
            segments.push(Segment {
                triangle: tri,
                enter,
                exit,
            });
            let (nt, ns) = ct.adjacent(tri, exit);
            tri = nt;
            enter = ns;
            if (tri, enter) == start {
                return NormalCurve {
                    cusp: ct.cusp,
                    segments,
                };
            }
        }
        // Walk failed to close quickly; retry with a fresh start.
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::Triangulation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FIG8: &str = "\
atri 1
tetrahedra 2
tet 0: 1 0132  1 1230  1 2310  1 2103
tet 1: 0 0132  0 3201  0 3012  0 2103
";

    fn fig8() -> (Triangulation, CuspTriangulation) {
        let tri = Triangulation::parse(FIG8).unwrap();
        let ct = tri.cusp_triangulation(0);
        (tri, ct)
    }

    #[test]
    fn cut_corner_is_the_shared_corner() {
        let (_, ct) = fig8();
        for tri in 0..ct.triangle_count() {
            let (_, v) = ct.tet_vertex(tri);
            let sides: Vec<u8> = (0..4).filter(|&s| s != v).collect();
            for &enter in &sides {
                for &exit in &sides {
                    if enter == exit {
                        continue;
                    }
                    let seg = Segment {
                        triangle: tri,
                        enter,
                        exit,
                    };
                    let (cut, eps) = cut_corner(&ct, &seg);
                    assert!(cut != v && cut != enter && cut != exit);
                    // Reversal flips the sign.
                    let rev = Segment {
                        triangle: tri,
                        enter: exit,
                        exit: enter,
                    };
                    let (cut2, eps2) = cut_corner(&ct, &rev);
                    assert_eq!(cut, cut2);
                    assert_eq!(eps, -eps2);
                }
            }
        }
    }

    #[test]
    fn edge_link_has_degree_many_segments_and_positive_signs() {
        let (tri, ct) = fig8();
        for e in 0..tri.edge_classes().len() {
            for end in 0..2u8 {
                let link = edge_link_curve(&tri, &ct, e, end);
                assert_eq!(link.segments.len(), tri.edge_classes()[e].degree());
                link.validate(&ct).unwrap();
                for seg in &link.segments {
                    let (corner, eps) = cut_corner(&ct, seg);
                    assert_eq!(eps, 1, "edge-link signs must be uniformly +1");
                    // Cut corners lie on the edge class being encircled.
                    let (t, v) = ct.tet_vertex(seg.triangle);
                    assert_eq!(tri.edge_class_of(t, v, corner), e);
                }
            }
        }
    }

    #[test]
    fn edge_link_holonomy_row_is_the_edge_incidence() {
        // The signed cut-corner incidence of the link around edge e counts
        // exactly how often each coordinate's edge pair is identified to e.
        let (tri, ct) = fig8();
        for e in 0..tri.edge_classes().len() {
            let link = edge_link_curve(&tri, &ct, e, 0);
            let row = link.holonomy_row(&ct);
            let mut expected = vec![0.0; tri.coord_count()];
            for &(t, (p, q)) in &tri.edge_classes()[e].members {
                expected[crate::triangulation::coordinate(t, p, q)] += 1.0;
            }
            assert_eq!(row, expected);
        }
    }

    #[test]
    fn per_tetrahedron_sums_of_w_vanish() {
        let (_, ct) = fig8();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let c = random_normal_curve(&ct, &mut rng);
            c.validate(&ct).unwrap();
            let w = c.leading_trailing_vector(&ct);
            for tet in 0..ct.coord_count / 3 {
                let s: f64 = w.entries[3 * tet..3 * tet + 3].iter().sum();
                assert_eq!(s, 0.0);
            }
        }
    }

    #[test]
    fn homology_basis_intersects_once() {
        let (_, ct) = fig8();
        let (mu, lambda) = homology_basis(&ct).unwrap();
        mu.validate(&ct).unwrap();
        lambda.validate(&ct).unwrap();
        assert_eq!(intersection_number(&ct, &mu, &lambda).unwrap().abs(), 1);
        assert_eq!(intersection_number(&ct, &mu, &mu).unwrap(), 0);
        assert_eq!(intersection_number(&ct, &lambda, &lambda).unwrap(), 0);
    }

    #[test]
    fn intersection_is_antisymmetric() {
        let (_, ct) = fig8();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let a = random_normal_curve(&ct, &mut rng);
            let b = random_normal_curve(&ct, &mut rng);
            let ab = intersection_number(&ct, &a, &b).unwrap();
            let ba = intersection_number(&ct, &b, &a).unwrap();
            assert_eq!(ab, -ba);
        }
    }

    #[test]
    fn edge_links_never_intersect_anything() {
        let (tri, ct) = fig8();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for e in 0..tri.edge_classes().len() {
            let link = edge_link_curve(&tri, &ct, e, 0);
            for _ in 0..10 {
                let c = random_normal_curve(&ct, &mut rng);
                assert_eq!(intersection_number(&ct, &link, &c).unwrap(), 0);
            }
        }
    }

    #[test]
    fn different_cusp_error() {
        let (_, ct) = fig8();
        let (mu, _) = homology_basis(&ct).unwrap();
        let mut other = mu.clone();
        other.cusp = 1;
        assert!(matches!(
            intersection_number(&ct, &mu, &other),
            Err(CurveError::DifferentCusps(0, 1))
        ));
    }

    #[test]
    fn reversal_flips_intersection_sign() {
        let (_, ct) = fig8();
        let (mu, lambda) = homology_basis(&ct).unwrap();
        let i1 = intersection_number(&ct, &mu, &lambda).unwrap();
        let i2 = intersection_number(&ct, &mu.reversed(), &lambda).unwrap();
        assert_eq!(i1, -i2);
        mu.reversed().validate(&ct).unwrap();
    }

    #[test]
    fn cut_and_rejoin_is_additive() {
        // Traverse mu twice to get a curve with double visits, then split.
        let (_, ct) = fig8();
        let (mu, lambda) = homology_basis(&ct).unwrap();
        let mut doubled = mu.clone();
        doubled.segments.extend(mu.segments.iter().copied());
        doubled.validate(&ct).unwrap();
        let m = mu.segments.len();
        let (a, b) = doubled.cut_and_rejoin(0, m);
        let wd = doubled.leading_trailing_vector(&ct);
        let wa = a.leading_trailing_vector(&ct);
        let wb = b.leading_trailing_vector(&ct);
        for j in 0..wd.entries.len() {
            assert_eq!(wd.entries[j], wa.entries[j] + wb.entries[j]);
        }
        let id = intersection_number(&ct, &lambda, &doubled).unwrap();
        let ia = intersection_number(&ct, &lambda, &a).unwrap();
        let ib = intersection_number(&ct, &lambda, &b).unwrap();
        assert_eq!(id, ia + ib);
    }
}
