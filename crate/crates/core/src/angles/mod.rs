//! The linear side of the angle-structure polytope: the constraint system
//! `A v = b`, a strictly interior starting point via a margin-maximizing
//! linear program, and a tangent-space basis assembled from curve
//! deformation vectors.

mod lp;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::curves::CurveSystem;
use crate::triangulation::Triangulation;

pub use lp::LpError;

/// An assignment of dihedral angles to the `3n` coordinates, in radians.
pub type AngleVector = Vec<f64>;

/// Interior points must clear the box walls by at least this margin; smaller
/// optima are reported as (numerically) infeasible to keep `log sin` and
/// `cot` well-conditioned downstream.
pub const MARGIN_FLOOR: f64 = 1e-7;

/// Singular values below this fraction of the largest count as zero when
/// computing numerical ranks.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum AngleError {
    #[error("the angle polytope is empty (margin optimum {margin:.6e} <= 0)")]
    Infeasible { margin: f64 },
    #[error("the angle polytope is numerically thin (margin optimum {margin:.6e} <= {MARGIN_FLOOR:.0e})")]
    ThinPolytope { margin: f64 },
    #[error("rank anomaly: expected rank {expected}, found {found}")]
    RankAnomaly { expected: usize, found: usize },
    #[error("tangent basis spans only {found} of {expected} dimensions")]
    SpanDeficiency { expected: usize, found: usize },
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

/// The linear gluing constraints: `n` tetrahedron rows (three 1-entries each,
/// right-hand side pi) followed by `n` edge rows (entries 0, 1 or 2 counting
/// coordinate incidences, right-hand side 2 pi), plus any appended filling
/// rows.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub tet_count: usize,
    /// Number of built-in rows, `2n`; anything beyond is a filling slice.
    pub base_rows: usize,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl ConstraintSystem {
    pub fn build(tri: &Triangulation) -> ConstraintSystem {
        let n = tri.tet_count();
        let mut a = DMatrix::<f64>::zeros(2 * n, 3 * n);
        let mut b = DVector::<f64>::zeros(2 * n);
        for i in 0..n {
            for m in 0..3 {
                a[(i, 3 * i + m)] = 1.0;
            }
            b[i] = PI;
        }
        for (e, class) in tri.edge_classes().iter().enumerate() {
            for &(t, (p, q)) in &class.members {
                a[(n + e, crate::triangulation::coordinate(t, p, q))] += 1.0;
            }
            b[n + e] = 2.0 * PI;
        }
        ConstraintSystem {
            tet_count: n,
            base_rows: 2 * n,
            a,
            b,
        }
    }

    /// The system with one extra linear row appended (a Dehn-filling slice).
    pub fn with_row(&self, row: &[f64], rhs: f64) -> ConstraintSystem {
        assert_eq!(row.len(), self.a.ncols());
        let mut a = DMatrix::<f64>::zeros(self.a.nrows() + 1, self.a.ncols());
        a.view_mut((0, 0), self.a.shape()).copy_from(&self.a);
        for (j, &v) in row.iter().enumerate() {
            a[(self.a.nrows(), j)] = v;
        }
        let mut b = DVector::<f64>::zeros(self.b.len() + 1);
        b.rows_mut(0, self.b.len()).copy_from(&self.b);
        b[self.b.len()] = rhs;
        ConstraintSystem {
            tet_count: self.tet_count,
            base_rows: self.base_rows,
            a,
            b,
        }
    }

    /// Infinity norm of `A v - b`.
    pub fn residual(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        (&self.a * v - &self.b).amax()
    }

    /// Numerical rank (singular values above `RANK_TOL` times the largest)
    /// and the polytope dimension `3n - rank`.
    pub fn rank_and_dimension(&self) -> (usize, usize) {
        let rank = numerical_rank(&self.a);
        (rank, self.a.ncols() - rank)
    }

    /// Least-squares projection of `v` onto the affine solution set of
    /// `A v = b`, cleaning up accumulated round-off.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(v);
        let r = &self.a * &x - &self.b;
        let svd = self.a.clone().svd(true, true);
        let correction = svd.solve(&r, RANK_TOL * svd.singular_values[0]).unwrap();
        (x - correction).data.into()
    }
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// An orthonormal basis of the (right) nullspace of `m`. The matrix is
/// padded square with zero rows first, because the thin SVD of a wide matrix
/// does not carry the full set of right singular vectors.
fn nullspace(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::<f64>::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let top = svd.singular_values.max();
    let mut out = Vec::new();
    for (i, row) in v_t.row_iter().enumerate() {
        let negligible = i >= svd.singular_values.len()
            || top == 0.0
            || svd.singular_values[i] <= RANK_TOL * top;
        if negligible {
            out.push(row.iter().copied().collect());
        }
    }
    out
}

/// The left-nullspace generators of the base system, one per cusp: minus the
/// cusp's vertex counts on tetrahedron rows, plus its edge-endpoint counts
/// on edge rows.
pub fn cusp_vectors(tri: &Triangulation) -> Vec<Vec<f64>> {
    let n = tri.tet_count();
    let mut out = vec![vec![0.0; 2 * n]; tri.cusps().len()];
    for cusp in tri.cusps() {
        for &(t, _) in &cusp.vertices {
            out[cusp.id][t] -= 1.0;
        }
    }
    for (e, class) in tri.edge_classes().iter().enumerate() {
        let (t, (p, q)) = class.members[0];
        out[tri.cusp_of_vertex(t, p)][n + e] += 1.0;
        out[tri.cusp_of_vertex(t, q)][n + e] += 1.0;
    }
    out
}

/// A strictly interior angle vector, found by maximizing the distance `t` to
/// the box walls: `max t` subject to `A v = b`, `t <= v_j <= pi - t`.
/// Returns the point and the optimal margin.
///
/// The polytope is empty exactly when the optimum satisfies `t* <= 0`, which
/// is reported as the infeasibility certificate.
pub fn initial_point(cs: &ConstraintSystem) -> Result<(AngleVector, f64), AngleError> {
    let (rows, nv) = cs.a.shape();

    // Substitute x_j = v_j - t >= 0 and split t = tp - tm to keep all
    // simplex variables nonnegative:
    //   A x + (A 1) (tp - tm) = b
    //   x_j + 2 tp - 2 tm + u_j = pi
    let ncols = nv + 2 + nv; // x, tp, tm, u
    let m = rows + nv;
    let mut a = DMatrix::<f64>::zeros(m, ncols);
    let mut b = DVector::<f64>::zeros(m);
    let row_sums = &cs.a * DVector::from_element(nv, 1.0);
    for i in 0..rows {
        for j in 0..nv {
            a[(i, j)] = cs.a[(i, j)];
        }
        a[(i, nv)] = row_sums[i];
        a[(i, nv + 1)] = -row_sums[i];
        b[i] = cs.b[i];
    }
    for j in 0..nv {
        a[(rows + j, j)] = 1.0;
        a[(rows + j, nv)] = 2.0;
        a[(rows + j, nv + 1)] = -2.0;
        a[(rows + j, nv + 2 + j)] = 1.0;
        b[rows + j] = PI;
    }
    // Filling rows may have negative right-hand sides; simplex wants b >= 0.
    for i in 0..rows {
        if b[i] < 0.0 {
            for j in 0..ncols {
                a[(i, j)] = -a[(i, j)];
            }
            b[i] = -b[i];
        }
    }
    let mut c = DVector::<f64>::zeros(ncols);
    c[nv] = 1.0;
    c[nv + 1] = -1.0;

    let (x, margin) = lp::maximize(&a, &b, &c)?;
    if margin <= 0.0 {
        return Err(AngleError::Infeasible { margin });
    }
    if margin <= MARGIN_FLOOR {
        return Err(AngleError::ThinPolytope { margin });
    }
    let t = x[nv] - x[nv + 1];
    let v: Vec<f64> = (0..nv).map(|j| x[j] + t).collect();
    let v = cs.project(&v);
    Ok((v, margin))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Deformation vector of a homology basis curve (cusp, 0 = mu / 1 = lambda).
    Homology(usize, usize),
    /// Deformation vector of the edge-link curve of an edge class.
    EdgeLink(usize),
    /// Numerical nullspace completion (flagged: should not happen for valid
    /// input) or restriction to a filling slice.
    Completion,
}

/// A basis of the tangent space of the polytope: linearly independent
/// vectors `w` with `A w = 0`.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    pub vectors: Vec<Vec<f64>>,
    pub provenance: Vec<Provenance>,
}

impl TangentBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Select a tangent basis by greedy rank augmentation over curve deformation
/// vectors: the `2k` homology vectors first, then edge links in edge order.
/// Falls back to numerical nullspace completion only if selection stalls,
/// which signals invalid input and is flagged in the provenance.
///
/// When `cs` carries filling rows, the basis of the base system is restricted
/// to the slice via the nullspace of the extra rows.
pub fn tangent_basis(
    tri: &Triangulation,
    cs: &ConstraintSystem,
    curves: &CurveSystem,
) -> Result<TangentBasis, AngleError> {
    let nv = cs.a.ncols();
    let base = cs.a.rows(0, cs.base_rows).into_owned();
    let target = nv - numerical_rank(&base);

    let mut candidates: Vec<(Vec<f64>, Provenance)> = Vec::new();
    for (c, (mu, lambda)) in curves.bases.iter().enumerate() {
        let ct = &curves.cusp_triangulations[c];
        candidates.push((mu.leading_trailing_vector(ct).entries, Provenance::Homology(c, 0)));
        candidates.push((
            lambda.leading_trailing_vector(ct).entries,
            Provenance::Homology(c, 1),
        ));
    }
    for (e, link) in curves.edge_links.iter().enumerate() {
        let (c0, _) = tri.edge_ends(e);
        let ct = &curves.cusp_triangulations[c0];
        candidates.push((link.leading_trailing_vector(ct).entries, Provenance::EdgeLink(e)));
    }

    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut provenance: Vec<Provenance> = Vec::new();
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    let push = |w: &[f64],
                    p: Provenance,
                    vectors: &mut Vec<Vec<f64>>,
                    provenance: &mut Vec<Provenance>,
                    ortho: &mut Vec<DVector<f64>>|
     -> bool {
        let mut r = DVector::from_column_slice(w);
        let scale = r.norm().max(1.0);
        for q in ortho.iter() {
            let d = q.dot(&r);
            r -= q * d;
        }
        if r.norm() > 1e-8 * scale {
            let rn = r.norm();
            ortho.push(r / rn);
            vectors.push(w.to_vec());
            provenance.push(p);
            true
        } else {
            false
        }
    };

    for (w, p) in &candidates {
        debug_assert!(
            {
                let res = (base.clone() * DVector::from_column_slice(w)).amax();
                res < 1e-12
            },
            "curve deformation vector is not tangent"
        );
        if vectors.len() == target {
            break;
        }
        push(w, *p, &mut vectors, &mut provenance, &mut ortho);
    }

    if vectors.len() < target {
        // Flagged fallback: complete from the numerical nullspace of A.
        for w in nullspace(&base) {
            if vectors.len() == target {
                break;
            }
            push(&w, Provenance::Completion, &mut vectors, &mut provenance, &mut ortho);
        }
        if vectors.len() < target {
            return Err(AngleError::SpanDeficiency {
                expected: target,
                found: vectors.len(),
            });
        }
    }

    let basis = TangentBasis {
        vectors,
        provenance,
    };
    if cs.a.nrows() == cs.base_rows {
        return Ok(basis);
    }
    restrict_to_slice(cs, basis)
}

/// Restrict a tangent basis of the base system to the slice cut out by the
/// extra (filling) rows: with `S = rows . W`, the slice tangent space is
/// `W . null(S)`.
fn restrict_to_slice(
    cs: &ConstraintSystem,
    basis: TangentBasis,
) -> Result<TangentBasis, AngleError> {
    let extra = cs.a.nrows() - cs.base_rows;
    let d = basis.vectors.len();
    let nv = cs.a.ncols();
    let mut s = DMatrix::<f64>::zeros(extra, d);
    for (col, w) in basis.vectors.iter().enumerate() {
        for r in 0..extra {
            let row = cs.a.row(cs.base_rows + r);
            s[(r, col)] = row.iter().zip(w).map(|(a, b)| a * b).sum();
        }
    }
    let mut vectors = Vec::new();
    let mut provenance = Vec::new();
    for row in nullspace(&s) {
        let mut w = vec![0.0; nv];
        for (col, base_w) in basis.vectors.iter().enumerate() {
            let coeff = row[col];
            for j in 0..nv {
                w[j] += coeff * base_w[j];
            }
        }
        vectors.push(w);
        provenance.push(Provenance::Completion);
    }
    let expected = d - numerical_rank(&s);
    if vectors.len() != expected {
        return Err(AngleError::SpanDeficiency {
            expected,
            found: vectors.len(),
        });
    }
    Ok(TangentBasis {
        vectors,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::CurveSystem;
    use crate::triangulation::Triangulation;

    const FIG8: &str = "\
atri 1
tetrahedra 2
tet 0: 1 0132  1 1230  1 2310  1 2103
tet 1: 0 0132  0 3201  0 3012  0 2103
";

    const INFEASIBLE: &str = "\
atri 1
tetrahedra 2
tet 0: 0 1023  0 1023  1 1302  1 0321
tet 1: 0 2031  0 0321  1 1230  1 3012
";

    #[test]
    fn fig8_matrix_shape_and_rows() {
        let tri = Triangulation::parse(FIG8).unwrap();
        let cs = ConstraintSystem::build(&tri);
        assert_eq!(cs.a.shape(), (4, 6));
        assert_eq!(cs.a.row(0).iter().copied().collect::<Vec<_>>(), vec![
            1.0, 1.0, 1.0, 0.0, 0.0, 0.0
        ]);
        assert_eq!(cs.a.row(1).iter().copied().collect::<Vec<_>>(), vec![
            0.0, 0.0, 0.0, 1.0, 1.0, 1.0
        ]);
        for e in 2..4 {
            assert_eq!(cs.a.row(e).sum(), 6.0);
        }
        // The symmetric point solves the system.
        assert!(cs.residual(&[PI / 3.0; 6]) < 1e-12);
    }

    #[test]
    fn fig8_rank_and_dimension() {
        let tri = Triangulation::parse(FIG8).unwrap();
        let cs = ConstraintSystem::build(&tri);
        assert_eq!(cs.rank_and_dimension(), (3, 3));
    }

    #[test]
    fn cusp_vectors_span_left_nullspace() {
        for text in [FIG8, INFEASIBLE] {
            let tri = Triangulation::parse(text).unwrap();
            let cs = ConstraintSystem::build(&tri);
            for r in cusp_vectors(&tri) {
                let rv = nalgebra::RowDVector::from_row_slice(&r);
                assert!((rv * &cs.a).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn fig8_initial_point_is_symmetric() {
        let tri = Triangulation::parse(FIG8).unwrap();
        let cs = ConstraintSystem::build(&tri);
        let (v, margin) = initial_point(&cs).unwrap();
        assert!((margin - PI / 3.0).abs() < 1e-9);
        for &a in &v {
            assert!((a - PI / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn degree_one_edge_is_infeasible() {
        let tri = Triangulation::parse(INFEASIBLE).unwrap();
        let degrees: Vec<usize> = tri.edge_classes().iter().map(|e| e.degree()).collect();
        assert!(degrees.contains(&1));
        let cs = ConstraintSystem::build(&tri);
        match initial_point(&cs) {
            Err(AngleError::Infeasible { margin }) => assert!(margin <= 0.0),
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn fig8_tangent_basis() {
        let tri = Triangulation::parse(FIG8).unwrap();
        let cs = ConstraintSystem::build(&tri);
        let curves = CurveSystem::build(&tri).unwrap();
        let basis = tangent_basis(&tri, &cs, &curves).unwrap();
        assert_eq!(basis.dimension(), 3);
        for w in &basis.vectors {
            let wv = DVector::from_column_slice(w);
            assert!((&cs.a * wv).amax() < 1e-12);
        }
        // Both homology vectors are always selected.
        assert!(basis.provenance.contains(&Provenance::Homology(0, 0)));
        assert!(basis.provenance.contains(&Provenance::Homology(0, 1)));
    }
}
