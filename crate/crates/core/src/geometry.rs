//! The hyperbolic kernel: shape parameters from dihedral angles, holonomy of
//! normal curves, the Lobachevsky function, the volume functional and its
//! first and second derivatives.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

use crate::curves::NormalCurve;
use crate::triangulation::CuspTriangulation;

/// Angles closer than this to 0 or pi make cot and log sin blow up; callers
/// get a typed error instead of infinities.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("degenerate tetrahedron: angle {angle} at coordinate {coord} is within {threshold} of {{0, pi}}")]
    DegenerateTetrahedron {
        coord: usize,
        angle: f64,
        threshold: f64,
    },
    #[error("angles ({0}, {1}, {2}) do not sum to pi")]
    BadAngleSum(f64, f64, f64),
}

/// Within a tetrahedron the three shapes follow each other clockwise around a
/// vertex: after pair `m` comes pair `NEXT_PAIR[m]`, and `z(next) = (z-1)/z`.
const NEXT_PAIR: [usize; 3] = [2, 0, 1];

/// The Lobachevsky function, the integral from 0 to x of `-log|2 sin t| dt`.
///
/// Evaluated by pi-periodic and odd reduction to `|x| <= pi/2` followed by
/// the classical series
/// `x - x log|2x| + sum_{m>=1} zeta(2m) x^{2m+1} / (m (2m+1) pi^{2m})`.
/// Absolute error is below 1e-13 everywhere.
pub fn lobachevsky(x: f64) -> f64 {
    // Reduce modulo pi to (-pi/2, pi/2].
    let y = x - PI * (x / PI).round();
    if y == 0.0 {
        return 0.0;
    }
    let ay = y.abs();
    let mut sum = ay * (1.0 - (2.0 * ay).ln());
    let r = (ay / PI) * (ay / PI);
    let zt = zeta_even_table();
    let mut pow = ay * r;
    for (m, &z2m) in zt.iter().enumerate() {
        let m = m + 1;
        let term = z2m * pow / ((m * (2 * m + 1)) as f64);
        sum += term;
        if term < 1e-18 {
            break;
        }
        pow *= r;
    }
    if y < 0.0 {
        -sum
    } else {
        sum
    }
}

/// zeta(2m) for m = 1..=60, computed once by Euler-Maclaurin summation.
fn zeta_even_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (1..=60).map(|m| zeta(2 * m as u32)).collect())
}

fn zeta(s: u32) -> f64 {
    let s = s as f64;
    let n_cut: usize = if s < 6.0 { 2000 } else { 64 };
    let mut sum = 0.0;
    for k in 1..=n_cut {
        let term = (k as f64).powf(-s);
        sum += term;
        if term < 1e-22 {
            return sum;
        }
    }
    // Euler-Maclaurin tail beyond n_cut.
    let n = n_cut as f64;
    sum += n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0;
    sum
}

/// Shape parameter of the edge carrying angle `alpha`, with `(alpha, beta,
/// gamma)` the triangle's angles in clockwise order at a vertex:
/// `z = (sin gamma / sin beta) e^{i alpha}`.
pub fn shape_parameter(alpha: f64, beta: f64, gamma: f64) -> Result<Complex64, GeometryError> {
    for (i, &a) in [alpha, beta, gamma].iter().enumerate() {
        if !(DEGENERACY_THRESHOLD..=PI - DEGENERACY_THRESHOLD).contains(&a) {
            return Err(GeometryError::DegenerateTetrahedron {
                coord: i,
                angle: a,
                threshold: DEGENERACY_THRESHOLD,
            });
        }
    }
    if (alpha + beta + gamma - PI).abs() > 1e-9 {
        return Err(GeometryError::BadAngleSum(alpha, beta, gamma));
    }
    let modulus = gamma.sin() / beta.sin();
    Ok(Complex64::from_polar(modulus, alpha))
}

/// All 3n shape parameters of an interior angle vector.
pub fn shapes(angles: &[f64]) -> Result<Vec<Complex64>, GeometryError> {
    assert_eq!(angles.len() % 3, 0);
    let mut out = Vec::with_capacity(angles.len());
    for tet in 0..angles.len() / 3 {
        for m in 0..3 {
            let alpha = angles[3 * tet + m];
            let beta = angles[3 * tet + NEXT_PAIR[m]];
            let gamma = angles[3 * tet + NEXT_PAIR[NEXT_PAIR[m]]];
            out.push(shape_parameter(alpha, beta, gamma).map_err(|e| match e {
                GeometryError::DegenerateTetrahedron { angle, threshold, .. } => {
                    GeometryError::DegenerateTetrahedron {
                        coord: 3 * tet + m,
                        angle,
                        threshold,
                    }
                }
                other => other,
            })?);
        }
    }
    Ok(out)
}

fn check_interior(angles: &[f64]) -> Result<(), GeometryError> {
    for (j, &a) in angles.iter().enumerate() {
        if !(DEGENERACY_THRESHOLD..=PI - DEGENERACY_THRESHOLD).contains(&a) {
            return Err(GeometryError::DegenerateTetrahedron {
                coord: j,
                angle: a,
                threshold: DEGENERACY_THRESHOLD,
            });
        }
    }
    Ok(())
}

/// Holonomy of a normal curve at an interior angle vector: the epsilon-signed
/// sum of `log z` over cut corners, on the branch `0 < arg z < pi`.
///
/// The imaginary part is computed directly as the signed angle sum, so no
/// argument wrap-around can occur.
pub fn holonomy(
    ct: &CuspTriangulation,
    curve: &NormalCurve,
    angles: &[f64],
) -> Result<Complex64, GeometryError> {
    check_interior(angles)?;
    let mut re = 0.0;
    let mut im = 0.0;
    for seg in &curve.segments {
        let (corner, eps) = curve.cut_corner_of(ct, seg);
        let j = ct.corner_coordinate(seg.triangle, corner);
        let tet = j / 3;
        let m = j % 3;
        let alpha = angles[j];
        let beta = angles[3 * tet + NEXT_PAIR[m]];
        let gamma = angles[3 * tet + NEXT_PAIR[NEXT_PAIR[m]]];
        let e = eps as f64;
        re += e * (gamma.sin().ln() - beta.sin().ln());
        im += e * alpha;
    }
    Ok(Complex64::new(re, im))
}

/// Total volume of the angle assignment: the sum of the Lobachevsky function
/// over all 3n coordinates. Extends continuously to the boundary of the box.
pub fn volume(angles: &[f64]) -> f64 {
    angles.iter().map(|&a| lobachevsky(a)).sum()
}

/// First derivative of the volume along a tangent direction:
/// `-sum_j w_j log sin v_j`.
pub fn directional_derivative(angles: &[f64], w: &[f64]) -> Result<f64, GeometryError> {
    assert_eq!(angles.len(), w.len());
    check_interior(angles)?;
    Ok(angles
        .iter()
        .zip(w)
        .map(|(&a, &wj)| -wj * a.sin().ln())
        .sum())
}

/// Second derivative of the volume along a tangent direction:
/// `-sum_j w_j^2 cot v_j`, strictly negative for nonzero tangent vectors.
pub fn hessian_quadratic_form(angles: &[f64], w: &[f64]) -> Result<f64, GeometryError> {
    assert_eq!(angles.len(), w.len());
    check_interior(angles)?;
    Ok(angles
        .iter()
        .zip(w)
        .map(|(&a, &wj)| -wj * wj * a.cos() / a.sin())
        .sum())
}
