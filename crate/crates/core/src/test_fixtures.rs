//! Instances from the worked examples, shared across unit tests.

use alloc::vec;
use nalgebra::{dmatrix, dvector};

use crate::dual::DualPoint;
use crate::problem::ProblemInstance;

/// Sphere vs quartic: n = 3, A = I, r = 2*sqrt(2), f = (2,1,1), c = (4,5,0).
pub(crate) fn sphere_example() -> ProblemInstance {
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

pub(crate) fn sphere_example_dual() -> DualPoint {
    DualPoint::new(0.9502828628898, 1.06207786194864, 0.30646555192966)
}

/// Ellipsoid vs quartic: non-trivial A, f = (-2,-2,1), c = (-4,-5,0).
pub(crate) fn ellipsoid_example() -> ProblemInstance {
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

pub(crate) fn ellipsoid_example_dual() -> DualPoint {
    DualPoint::new(0.84101802234162, 1.493808342458642, 0.12912817444352)
}

/// Degenerate two-minimizer instance: n = 2, A = I, r = alpha = eta = 1,
/// c = (1,0), f = (sqrt(6)/96, 0).
pub(crate) fn planar_example() -> ProblemInstance {
    ProblemInstance::with_identity(2, 1.0, 1.0, 1.0, vec![6.0_f64.sqrt() / 96.0, 0.0], vec![1.0, 0.0])
        .unwrap()
}
