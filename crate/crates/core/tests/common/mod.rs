//! Shared helpers for the integration suites: fixture loading, an
//! independent quadrature oracle for the Lobachevsky function, and random
//! feasible-point sampling.

#![allow(dead_code)]

use std::f64::consts::PI;

use cusped::angles::{initial_point, tangent_basis, ConstraintSystem, TangentBasis};
use cusped::curves::CurveSystem;
use cusped::Triangulation;
use rand::Rng;

pub fn fixture(name: &str) -> Triangulation {
    let path = format!("{}/../../fixtures/{name}.atri", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).expect("fixture file");
    Triangulation::parse(&text).expect("fixture parses")
}

pub const FEASIBLE_FIXTURES: [&str; 2] = ["fig8", "sister"];
pub const ALL_FIXTURES: [&str; 3] = ["fig8", "sister", "infeasible"];

/// Everything needed to wander around a fixture's polytope.
pub struct Setup {
    pub tri: Triangulation,
    pub cs: ConstraintSystem,
    pub curves: CurveSystem,
    pub basis: TangentBasis,
    pub p0: Vec<f64>,
}

pub fn setup(name: &str) -> Setup {
    let tri = fixture(name);
    let cs = ConstraintSystem::build(&tri);
    let curves = CurveSystem::build(&tri).unwrap();
    let basis = tangent_basis(&tri, &cs, &curves).unwrap();
    let (p0, _) = initial_point(&cs).unwrap();
    Setup {
        tri,
        cs,
        curves,
        basis,
        p0,
    }
}

/// A random point of the open polytope: a random tangent move from the
/// interior start, scaled to keep a floor distance from the box walls.
pub fn random_interior_point<R: Rng>(s: &Setup, rng: &mut R, floor: f64) -> Vec<f64> {
    loop {
        let mut v = s.p0.clone();
        for w in &s.basis.vectors {
            let c: f64 = rng.gen_range(-1.0..1.0);
            for (vj, wj) in v.iter_mut().zip(w) {
                *vj += c * wj;
            }
        }
        // Shrink the move toward p0 until it clears the walls.
        for _ in 0..60 {
            if v.iter().all(|&a| a > floor && a < PI - floor) {
                return v;
            }
            for (vj, &pj) in v.iter_mut().zip(&s.p0) {
                *vj = pj + 0.5 * (*vj - pj);
            }
        }
    }
}

/// A random point of the closed polytope (clipped to the box, still exactly
/// on the affine constraint set).
pub fn random_feasible_point<R: Rng>(s: &Setup, rng: &mut R) -> Vec<f64> {
    random_interior_point(s, rng, 0.0)
}

/// Adaptive Simpson quadrature of the integral defining the Lobachevsky
/// function. The integrand `-log|2 sin t|` has log singularities at 0 and
/// pi, so the integral is split as `log(2t) + log(sin t / t)` (the second
/// factor is smooth) and arguments are first reduced to `[0, pi/2]` by the
/// integral's oddness and pi-periodicity.
pub fn lobachevsky_quadrature(x: f64) -> f64 {
    let y = x - PI * (x / PI).round();
    let ay = y.abs();
    let core = if ay < 1e-300 {
        0.0
    } else {
        let reduced = if ay > PI / 2.0 { PI - ay } else { ay };
        let smooth = adaptive_simpson(
            &|t: f64| if t == 0.0 { 0.0 } else { (t.sin() / t).ln() },
            0.0,
            reduced,
            1e-13,
            40,
        );
        let val = -(smooth + reduced * (2.0 * reduced).ln() - reduced);
        if ay > PI / 2.0 {
            -val
        } else {
            val
        }
    };
    if y < 0.0 {
        -core
    } else {
        core
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    simpson_step(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, depth)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}
