//! Random instance generation for property tests and verification sweeps.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
// Inherent f64 methods cover this under std (tests); the trait is what
// provides sqrt/powi in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::Result;
use crate::problem::ProblemInstance;

/// Draws a random separated instance with `c = 0`.
///
/// The construction keeps the analytic separation condition satisfied by a
/// comfortable margin: `A = I + BᵀB` (so every eigenvalue is at least 1 and
/// the ellipsoid stays inside the ball of radius `r`), `η` well above
/// `0.5r²`, and `‖f‖` strictly below the `0.5(0.5r² − η)²/r` threshold.
pub fn random_separated_instance<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ProblemInstance> {
    let r: f64 = rng.random_range(0.6..1.6);
    let eta = 0.5 * r * r * rng.random_range(1.8..3.0);
    let alpha = rng.random_range(0.5..2.0);
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-0.4..0.4));
    let a = DMatrix::identity(n, n) + b.transpose() * &b;
    let f_cap = 0.5 * (0.5 * r * r - eta).powi(2) / r;
    let dir = random_unit(n, rng);
    let f = dir * (f_cap * rng.random_range(0.1..0.8));
    ProblemInstance::new(a, r, alpha, eta, f, DVector::zeros(n))
}

/// A uniformly random unit vector.
pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| {
            // Box-Muller.
            let u1: f64 = rng.random::<f64>().max(1e-300);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
        });
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// A random orthogonal matrix (QR of a Gaussian matrix, signs fixed so the
/// factorization is unique).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// A random SPD matrix with the given eigenvalues (for reconstruction tests).
pub fn spd_with_eigenvalues<R: Rng + ?Sized>(
    eigenvalues: &[f64],
    rng: &mut R,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = eigenvalues.len();
    let q = random_orthogonal(n, rng);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(n, eigenvalues.iter().copied()));
    let a = &q * d * q.transpose();
    // Symmetrize roundoff.
    let a = (&a + a.transpose()) * 0.5;
    (a, q)
}

/// Convenience: collect `count` separated instances.
pub fn separated_instances<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    rng: &mut R,
) -> Vec<ProblemInstance> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if let Ok(inst) = random_separated_instance(n, rng) {
            if inst.check_separation().plausible() {
                out.push(inst);
            }
        }
    }
    out
}
