//! Volume maximization over the angle polytope (or a Dehn-filling slice),
//! outcome classification, metric verification, and volume lower bounds.
//!
//! The optimizer is Newton's method in reduced coordinates `v = p0 + W t`,
//! where the columns of `W` are a tangent basis: the reduced Hessian is
//! negative definite everywhere in the interior, so the ascent direction is
//! well-defined; an Armijo backtracking line search keeps every angle inside
//! the open box and never decreases the volume.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::angles::{
    self, AngleError, ConstraintSystem, TangentBasis,
};
use crate::curves::{CurveError, CurveSystem};
use crate::geometry::{self, GeometryError};
use crate::triangulation::Triangulation;

/// Residual tolerance for declaring the recovered metric verified; coarser
/// than the gradient tolerance because holonomy residuals amplify gradient
/// error through the basis conditioning.
pub const VERIFICATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Infinity-norm bound on the reduced gradient at convergence.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    /// Angles never move closer than this to the box walls; a stalled run
    /// pinned near a wall is classified as a boundary maximum.
    pub boundary_threshold: f64,
    /// Armijo sufficient-increase constant.
    pub armijo_constant: f64,
    /// Line-search backtracking factor.
    pub backtrack_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions {
            gradient_tolerance: 1e-12,
            max_iterations: 200,
            boundary_threshold: 1e-9,
            armijo_constant: 1e-4,
            backtrack_factor: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Converged to the interior critical point: the complete (or filled)
    /// hyperbolic structure.
    InteriorCriticalPoint,
    /// The supremum of the volume lies on the boundary of the polytope; no
    /// positively oriented geometric solution for this triangulation.
    BoundaryMaximum,
    /// The angle polytope (or filling slice) is empty.
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::InteriorCriticalPoint => "interior-critical-point",
            SolveStatus::BoundaryMaximum => "boundary-maximum",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

/// A Dehn-filling constraint on one cusp: the linear row imposing
/// `Im(p H(mu) + q H(lambda)) = 2 pi`.
#[derive(Debug, Clone)]
pub struct FillingSlice {
    pub cusp: usize,
    pub p: i64,
    pub q: i64,
    pub row: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Final angles (empty when infeasible).
    pub angles: Vec<f64>,
    pub shapes: Vec<Complex64>,
    pub volume: f64,
    /// Volume of the best feasible point seen: a rigorous lower bound for
    /// the true volume whenever an interior critical point exists.
    pub lower_bound: f64,
    /// Max over edge classes of |H(edge link) - 2 pi i|.
    pub edge_residual: f64,
    /// Max completeness/filling residual over all cusps.
    pub completeness_residual: f64,
    pub iterations: usize,
    /// LP margin of the initial point (the infeasibility certificate when
    /// status is Infeasible).
    pub margin: f64,
    /// Tangent dimension of the polytope or slice actually optimized over.
    pub dimension: usize,
    pub fillings: Vec<(usize, i64, i64)>,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Angle(#[from] AngleError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("filling coefficients ({p}, {q}) are not coprime")]
    NotCoprime { p: i64, q: i64 },
    #[error("filling references cusp {0}, which does not exist")]
    UnknownCusp(usize),
    #[error("cusp {0} has more than one filling")]
    DuplicateFilling(usize),
    #[error("no convergence within {0} iterations")]
    MaxIterations(usize),
    #[error("angle vector violates the constraints (residual {residual:.3e})")]
    NotFeasible { residual: f64 },
}

/// Newton ascent of the volume in reduced coordinates from the interior
/// point `p0`. Returns the final angles, the status, and the iteration
/// count.
pub fn maximize(
    cs: &ConstraintSystem,
    basis: &TangentBasis,
    p0: &[f64],
    opts: &SolveOptions,
) -> Result<(Vec<f64>, SolveStatus, usize), SolveError> {
    let nv = p0.len();
    let dim = basis.dimension();
    let mut w = DMatrix::<f64>::zeros(nv, dim);
    for (c, col) in basis.vectors.iter().enumerate() {
        for j in 0..nv {
            w[(j, c)] = col[j];
        }
    }
    let wt = w.transpose();
    let mut v = DVector::from_column_slice(p0);
    let lo = opts.boundary_threshold;
    let hi = PI - opts.boundary_threshold;

    let volume_of = |v: &DVector<f64>| geometry::volume(v.as_slice());
    let mut vol = volume_of(&v);

    for iter in 0..opts.max_iterations {
        // Reduced gradient: g = W^T (-log 2 sin v).
        let grad_full = DVector::from_iterator(nv, v.iter().map(|&a| -(2.0 * a.sin()).ln()));
        let g = &wt * &grad_full;
        if g.amax() < opts.gradient_tolerance {
            debug_assert!(cs.residual(v.as_slice()) < 1e-8);
            return Ok((v.as_slice().to_vec(), SolveStatus::InteriorCriticalPoint, iter));
        }

        // Reduced Hessian: H = W^T diag(-cot v) W, negative definite.
        let d = DVector::from_iterator(nv, v.iter().map(|&a| -a.cos() / a.sin()));
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..=r {
                let mut acc = 0.0;
                for j in 0..nv {
                    acc += w[(j, r)] * d[j] * w[(j, c)];
                }
                h[(r, c)] = acc;
                h[(c, r)] = acc;
            }
        }

        // Newton direction (fall back to steepest ascent if the Cholesky
        // factorization fails through ill-conditioning near the boundary).
        let newton = Cholesky::new(-h).map(|ch| ch.solve(&g));
        let mut directions: Vec<DVector<f64>> = Vec::new();
        if let Some(dir) = newton {
            directions.push(dir);
        }
        directions.push(g.clone());

        let mut accepted = false;
        let mut best_gain = 0.0f64;
        for dir in &directions {
            let slope = g.dot(dir);
            if slope <= 0.0 {
                continue;
            }
            let full_step = &w * dir;
            let mut step = 1.0f64;
            for _ in 0..80 {
                let trial = &v + &full_step * step;
                let inside = trial.iter().all(|&a| a > lo && a < hi);
                if inside {
                    let tv = volume_of(&trial);
                    if tv >= vol + opts.armijo_constant * step * slope {
                        best_gain = tv - vol;
                        v = trial;
                        vol = tv;
                        accepted = true;
                        break;
                    }
                    best_gain = best_gain.max(tv - vol);
                }
                step *= opts.backtrack_factor;
            }
            if accepted {
                break;
            }
        }

        if !accepted || best_gain < 1e-15 {
            // Progress has stalled with the gradient still above tolerance.
            // Pinned near a box wall this means the supremum lies on the
            // boundary; in the interior an accepted-but-flat step is normal
            // terminal Newton behavior, so keep iterating toward the
            // gradient test.
            let margin = v.iter().fold(f64::INFINITY, |m, &a| m.min(a).min(PI - a));
            if margin < 1e-6 {
                return Ok((v.as_slice().to_vec(), SolveStatus::BoundaryMaximum, iter));
            }
            if !accepted {
                return Err(SolveError::MaxIterations(iter));
            }
        }
    }
    Err(SolveError::MaxIterations(opts.max_iterations))
}

/// Holonomy residuals at an interior angle vector: the maximum of
/// `|H(edge link) - 2 pi i|` over edge classes, and the maximum completeness
/// (or filling) residual over cusps: `|H| ` for both basis curves of an
/// unfilled cusp, `|p H(mu) + q H(lambda) - 2 pi i|` for a filled one.
pub fn verify_metric(
    tri: &Triangulation,
    curves: &CurveSystem,
    v: &[f64],
    fillings: &[(usize, i64, i64)],
) -> Result<(f64, f64), GeometryError> {
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut edge_res = 0.0f64;
    for (e, link) in curves.edge_links.iter().enumerate() {
        let (c0, _) = tri.edge_ends(e);
        let h = geometry::holonomy(&curves.cusp_triangulations[c0], link, v)?;
        edge_res = edge_res.max((h - two_pi_i).norm());
    }
    let mut comp_res = 0.0f64;
    for (c, (mu, lambda)) in curves.bases.iter().enumerate() {
        let ct = &curves.cusp_triangulations[c];
        let hm = geometry::holonomy(ct, mu, v)?;
        let hl = geometry::holonomy(ct, lambda, v)?;
        match fillings.iter().find(|&&(fc, _, _)| fc == c) {
            Some(&(_, p, q)) => {
                let h = hm * p as f64 + hl * q as f64;
                comp_res = comp_res.max((h - two_pi_i).norm());
            }
            None => {
                comp_res = comp_res.max(hm.norm()).max(hl.norm());
            }
        }
    }
    Ok((edge_res, comp_res))
}

/// Build the Dehn-filling slice row for one cusp: the signed cut-corner
/// incidence vector of `p mu + q lambda` with right-hand side `2 pi`.
pub fn dehn_slice(
    curves: &CurveSystem,
    cusp: usize,
    p: i64,
    q: i64,
) -> Result<FillingSlice, SolveError> {
    if cusp >= curves.bases.len() {
        return Err(SolveError::UnknownCusp(cusp));
    }
    if gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
        return Err(SolveError::NotCoprime { p, q });
    }
    let ct = &curves.cusp_triangulations[cusp];
    let (mu, lambda) = &curves.bases[cusp];
    let rm = mu.holonomy_row(ct);
    let rl = lambda.holonomy_row(ct);
    let row: Vec<f64> = rm
        .iter()
        .zip(&rl)
        .map(|(&a, &b)| p as f64 * a + q as f64 * b)
        .collect();
    Ok(FillingSlice { cusp, p, q, row })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The volume of any feasible point of the closed polytope: a rigorous
/// lower bound for the volume of the complete structure whenever an interior
/// critical point exists.
pub fn volume_lower_bound(cs: &ConstraintSystem, v: &[f64]) -> Result<f64, SolveError> {
    let residual = cs.residual(v);
    let in_box = v.iter().all(|&a| (-1e-9..=PI + 1e-9).contains(&a));
    if residual > 1e-9 || !in_box {
        return Err(SolveError::NotFeasible {
            residual: if in_box { residual } else { f64::INFINITY },
        });
    }
    Ok(geometry::volume(v))
}

/// The full pipeline: constraints, curves, optional filling slices, interior
/// start, Newton ascent, and verification.
pub fn solve(
    tri: &Triangulation,
    opts: &SolveOptions,
    fillings: &[(usize, i64, i64)],
) -> Result<SolveReport, SolveError> {
    let curves = CurveSystem::build(tri)?;
    let mut cs = ConstraintSystem::build(tri);
    for (i, &(cusp, p, q)) in fillings.iter().enumerate() {
        if fillings[..i].iter().any(|&(c, _, _)| c == cusp) {
            return Err(SolveError::DuplicateFilling(cusp));
        }
        let slice = dehn_slice(&curves, cusp, p, q)?;
        cs = cs.with_row(&slice.row, 2.0 * PI);
    }

    let (p0, margin) = match angles::initial_point(&cs) {
        Ok(r) => r,
        Err(AngleError::Infeasible { margin }) | Err(AngleError::ThinPolytope { margin }) => {
            return Ok(SolveReport {
                status: SolveStatus::Infeasible,
                angles: Vec::new(),
                shapes: Vec::new(),
                volume: 0.0,
                lower_bound: 0.0,
                edge_residual: f64::NAN,
                completeness_residual: f64::NAN,
                iterations: 0,
                margin,
                dimension: 0,
                fillings: fillings.to_vec(),
            });
        }
        Err(e) => return Err(e.into()),
    };

    let basis = angles::tangent_basis(tri, &cs, &curves)?;
    let (v, status, iterations) = maximize(&cs, &basis, &p0, opts)?;
    let volume = geometry::volume(&v);
    let (shapes, edge_residual, completeness_residual) = match status {
        SolveStatus::InteriorCriticalPoint => {
            let shapes = geometry::shapes(&v)?;
            let (e, c) = verify_metric(tri, &curves, &v, fillings)?;
            (shapes, e, c)
        }
        _ => (Vec::new(), f64::NAN, f64::NAN),
    };
    Ok(SolveReport {
        status,
        angles: v,
        shapes,
        volume,
        lower_bound: volume,
        edge_residual,
        completeness_residual,
        iterations,
        margin,
        dimension: basis.dimension(),
        fillings: fillings.to_vec(),
    })
}
