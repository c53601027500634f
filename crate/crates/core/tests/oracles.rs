//! Independent oracles for derived quantities: a union-find computation of
//! edge classes against the production orbit walk, and adaptive quadrature
//! of the defining integral against the Lobachevsky series.

mod common;

use std::collections::HashMap;
use std::f64::consts::PI;

use cusped::geometry::lobachevsky;
use cusped::triangulation::coordinate;

struct Uf(Vec<usize>);

impl Uf {
    fn new(n: usize) -> Uf {
        Uf((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

const PAIRS: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair6(a: u8, b: u8) -> usize {
    PAIRS
        .iter()
        .position(|&(p, q)| (p, q) == (a.min(b), a.max(b)))
        .unwrap()
}

#[test]
fn edge_classes_match_union_find_oracle() {
    for name in common::ALL_FIXTURES {
        let tri = common::fixture(name);
        let n = tri.tet_count();
        // Identify tetrahedron edges across every face gluing.
        let mut uf = Uf::new(6 * n);
        for t in 0..n {
            for (a, b) in PAIRS {
                for f in 0..4u8 {
                    if f == a || f == b {
                        continue; // the edge does not lie on this face
                    }
                    let g = tri.gluing(t, f);
                    let (ia, ib) = (g.perm.apply(a), g.perm.apply(b));
                    uf.union(6 * t + pair6(a, b), 6 * g.neighbor + pair6(ia, ib));
                }
            }
        }
        let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
        for x in 0..6 * n {
            let r = uf.find(x);
            classes.entry(r).or_default().push(x);
        }
        // Same class count (= n) and the same partition as production.
        assert_eq!(classes.len(), tri.edge_classes().len());
        assert_eq!(classes.len(), n);
        for t in 0..n {
            for (a, b) in PAIRS {
                let prod = tri.edge_class_of(t, a, b);
                for (t2, (c, d)) in (0..n).flat_map(|t2| PAIRS.map(|p| (t2, p))) {
                    let same_oracle =
                        uf.find(6 * t + pair6(a, b)) == uf.find(6 * t2 + pair6(c, d));
                    let same_prod = prod == tri.edge_class_of(t2, c, d);
                    assert_eq!(same_oracle, same_prod);
                }
            }
        }
        // Degrees sum to 6n; the figure-eight has two classes of degree 6.
        let degrees: Vec<usize> = tri.edge_classes().iter().map(|e| e.degree()).collect();
        assert_eq!(degrees.iter().sum::<usize>(), 6 * n);
        if name == "fig8" {
            assert_eq!(degrees, vec![6, 6]);
        }
    }
}

#[test]
fn edge_class_members_cover_each_tet_edge_once() {
    for name in common::ALL_FIXTURES {
        let tri = common::fixture(name);
        let mut seen = vec![0usize; 6 * tri.tet_count()];
        for class in tri.edge_classes() {
            for &(t, (a, b)) in &class.members {
                seen[6 * t + pair6(a, b)] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }
}

#[test]
fn edge_rows_count_coordinate_incidences() {
    // Every edge class contributes to coordinates through the shared
    // opposite-pair indexing.
    let tri = common::fixture("fig8");
    for class in tri.edge_classes() {
        for &(t, (a, b)) in &class.members {
            let j = coordinate(t, a, b);
            assert!(j < tri.coord_count());
        }
    }
}

#[test]
fn lobachevsky_agrees_with_quadrature_on_a_grid() {
    // 1000-point grid of [-pi, pi], tolerance 1e-10.
    for i in 0..1000 {
        let x = -PI + 2.0 * PI * (i as f64 + 0.5) / 1000.0;
        let series = lobachevsky(x);
        let quad = common::lobachevsky_quadrature(x);
        assert!(
            (series - quad).abs() < 1e-10,
            "x = {x}: series {series}, quadrature {quad}"
        );
    }
}

#[test]
fn lobachevsky_symmetries() {
    for i in 0..500 {
        let x = -4.0 + 8.0 * i as f64 / 499.0;
        assert!((lobachevsky(x + PI) - lobachevsky(x)).abs() < 1e-13);
        assert!((lobachevsky(-x) + lobachevsky(x)).abs() < 1e-13);
    }
}
