//! Shared worked-example instances for the integration tests.

use nalgebra::{dmatrix, dvector, DVector};
use surfdist_core::{DualPoint, ProblemInstance};

/// Sphere vs quartic: n = 3, A = I, r = 2*sqrt(2), f = (2,1,1), c = (4,5,0).
pub fn sphere_example() -> ProblemInstance {
    ProblemInstance::with_identity(
        3,
        2.0 * 2.0_f64.sqrt(),
        1.0,
        2.0,
        vec![2.0, 1.0, 1.0],
        vec![4.0, 5.0, 0.0],
    )
    .unwrap()
}

pub fn sphere_example_dual() -> DualPoint {
    DualPoint::new(0.9502828628898, 1.06207786194864, 0.30646555192966)
}

/// Ellipsoid vs quartic: non-trivial A, f = (-2,-2,1), c = (-4,-5,0).
pub fn ellipsoid_example() -> ProblemInstance {
    ProblemInstance::new(
        dmatrix![3.0, 1.0, 1.0; 1.0, 4.0, 1.0; 1.0, 1.0, 5.0],
        2.0 * 2.0_f64.sqrt(),
        1.0,
        2.0,
        dvector![-2.0, -2.0, 1.0],
        dvector![-4.0, -5.0, 0.0],
    )
    .unwrap()
}

pub fn ellipsoid_example_dual() -> DualPoint {
    DualPoint::new(0.84101802234162, 1.493808342458642, 0.12912817444352)
}

/// Degenerate two-minimizer instance: n = 2, A = I, r = alpha = eta = 1,
/// c = (1,0), f = (sqrt(6)/96, 0).
pub fn planar_example() -> ProblemInstance {
    ProblemInstance::with_identity(
        2,
        1.0,
        1.0,
        1.0,
        vec![6.0_f64.sqrt() / 96.0, 0.0],
        vec![1.0, 0.0],
    )
    .unwrap()
}

/// Known minimizer of the unperturbed degenerate instance (upper half-plane
/// representative of the mirrored pair).
pub fn planar_example_minimizer() -> (DVector<f64>, DVector<f64>) {
    (
        dvector![0.5872184947, 0.8094284647],
        dvector![1.012757759, 1.395996491],
    )
}
