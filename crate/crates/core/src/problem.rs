//! Problem data and primal-side functions.
//!
//! An instance is the sextuple `(A, r, α, η, f, c)` together with the
//! dimension `n`. It defines the objective `Π(x) = ½‖y − z‖²`, the ellipsoid
//! constraint `h(y) = ½(yᵀAy − r²)`, and the quartic constraint
//! `g(z) = ½α(½‖z − c‖² − η)² − fᵀ(z − c)`, plus the canonical machinery
//! `Λ`, `V`, `V*` used by the dual module.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
// Inherent f64 methods cover this under std (tests); the trait is what
// provides sqrt/powi in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::oracle;

/// Relative tolerance for the symmetry check of `A`.
pub const SYM_TOL: f64 = 1e-10;

/// Immutable problem data. All operations on it are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    n: usize,
    a: DMatrix<f64>,
    r: f64,
    alpha: f64,
    eta: f64,
    f: DVector<f64>,
    c: DVector<f64>,
}

/// A primal pair `x = (y, z)`; `y` lives on (or near) the ellipsoid surface,
/// `z` on the quartic surface.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPoint {
    pub y: DVector<f64>,
    pub z: DVector<f64>,
}

impl PrimalPoint {
    pub fn new(y: DVector<f64>, z: DVector<f64>) -> Self {
        Self { y, z }
    }
}

impl ProblemInstance {
    /// Validates and builds an instance.
    ///
    /// `A` must be symmetric (within [`SYM_TOL`], relative) and positive
    /// definite; `r`, `alpha`, `eta` must be positive; `f` and `c` must have
    /// length `n >= 2`.
    pub fn new(
        a: DMatrix<f64>,
        r: f64,
        alpha: f64,
        eta: f64,
        f: DVector<f64>,
        c: DVector<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if n < 2 || a.ncols() != n {
            return Err(Error::InvalidInstance(format!(
                "A must be square with n >= 2, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.len() });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        for (name, v) in [("r", r), ("alpha", alpha), ("eta", eta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInstance(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if a.iter().chain(f.iter()).chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("non-finite entry in A, f, or c".into()));
        }
        let scale = a.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let asym = (&a - a.transpose()).amax();
        if asym > SYM_TOL * scale {
            return Err(Error::InvalidInstance(format!(
                "A is not symmetric: max|A - A^T| = {asym}"
            )));
        }
        // Symmetrize to kill roundoff-level asymmetry before factorization.
        let a = (&a + a.transpose()) * 0.5;
        if a.clone().cholesky().is_none() {
            return Err(Error::InvalidInstance("A is not positive definite".into()));
        }
        Ok(Self { n, a, r, alpha, eta, f, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn f(&self) -> &DVector<f64> {
        &self.f
    }
    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    /// Returns a copy of the instance with `f` replaced.
    pub fn with_f(&self, f: DVector<f64>) -> Result<Self> {
        Self::new(self.a.clone(), self.r, self.alpha, self.eta, f, self.c.clone())
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        Ok(())
    }

    /// Ellipsoid constraint `h(y) = ½(yᵀAy − r²)`.
    pub fn h_value(&self, y: &DVector<f64>) -> Result<f64> {
        self.check_dim(y)?;
        Ok(0.5 * (y.dot(&(&self.a * y)) - self.r * self.r))
    }

    /// Gradient `∇h(y) = Ay`.
    pub fn grad_h(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(y)?;
        Ok(&self.a * y)
    }

    /// Quartic constraint `g(z) = ½α(Λ(z) − η)² − fᵀ(z − c)`.
    pub fn g_value(&self, z: &DVector<f64>) -> Result<f64> {
        self.check_dim(z)?;
        let zc = z - &self.c;
        let xi = 0.5 * zc.norm_squared();
        Ok(0.5 * self.alpha * (xi - self.eta) * (xi - self.eta) - self.f.dot(&zc))
    }

    /// Gradient `∇g(z) = α(Λ(z) − η)(z − c) − f`.
    pub fn grad_g(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(z)?;
        let zc = z - &self.c;
        let xi = 0.5 * zc.norm_squared();
        Ok(zc * (self.alpha * (xi - self.eta)) - &self.f)
    }

    /// Objective `Π(x) = ½‖y − z‖²`.
    pub fn pi_value(&self, x: &PrimalPoint) -> Result<f64> {
        self.check_dim(&x.y)?;
        self.check_dim(&x.z)?;
        Ok(0.5 * (&x.y - &x.z).norm_squared())
    }

    /// Classical Lagrangian `L(x, λ, μ) = Π(x) + λh(y) + μg(z)`.
    pub fn lagrangian(&self, x: &PrimalPoint, lam: f64, mu: f64) -> Result<f64> {
        Ok(self.pi_value(x)? + lam * self.h_value(&x.y)? + mu * self.g_value(&x.z)?)
    }

    /// Geometric operator `ξ = Λ(z) = ½‖z − c‖²`.
    pub fn lambda_op(&self, z: &DVector<f64>) -> Result<f64> {
        self.check_dim(z)?;
        Ok(0.5 * (z - &self.c).norm_squared())
    }

    /// Canonical function `V(ξ) = ½α(ξ − η)²` on the domain `ξ >= 0`.
    pub fn v_value(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) {
            return Err(Error::DomainViolation { domain: "V_a = {xi >= 0}", value: xi });
        }
        Ok(0.5 * self.alpha * (xi - self.eta) * (xi - self.eta))
    }

    /// Duality map `ς = DV(ξ) = α(ξ − η)`.
    pub fn dv(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) {
            return Err(Error::DomainViolation { domain: "V_a = {xi >= 0}", value: xi });
        }
        Ok(self.alpha * (xi - self.eta))
    }

    /// Legendre conjugate `V*(ς) = ς²/(2α) + ης` on the domain `ς >= −αη`.
    pub fn v_star(&self, sig: f64) -> Result<f64> {
        if !(sig >= -self.alpha * self.eta) {
            return Err(Error::DomainViolation { domain: "V_a* = {sig >= -alpha*eta}", value: sig });
        }
        Ok(sig * sig / (2.0 * self.alpha) + self.eta * sig)
    }

    /// Inverse duality map `ξ = DV*(ς) = ς/α + η`.
    pub fn dv_star(&self, sig: f64) -> Result<f64> {
        if !(sig >= -self.alpha * self.eta) {
            return Err(Error::DomainViolation { domain: "V_a* = {sig >= -alpha*eta}", value: sig });
        }
        Ok(sig / self.alpha + self.eta)
    }

    /// Checks the separation precondition `Y_c ∩ Z_c = ∅` with `h > 0` on
    /// `Z_c`.
    ///
    /// The analytic sufficient condition (`c = 0`, `η > 0.5r²`,
    /// `‖f‖ < 0.5(0.5r² − η)²/r`) is evaluated when applicable; otherwise the
    /// quartic surface is sampled and the sign of `h` over the sample decides.
    pub fn check_separation(&self) -> SeparationReport {
        let analytic_applies = self.c.amax() == 0.0;
        let analytic_holds = analytic_applies
            && self.eta > 0.5 * self.r * self.r
            && self.f.norm() < 0.5 * (0.5 * self.r * self.r - self.eta).powi(2) / self.r;
        if analytic_holds {
            return SeparationReport {
                status: SeparationStatus::AnalyticallyCertified,
                analytic_applies,
                analytic_holds,
                sampled_min_h: None,
            };
        }
        // Sampled fallback: h over a coarse sample of Z_c.
        let mut min_h: Option<f64> = None;
        for u in oracle::direction_grid(self.n, 32, 0) {
            for rho in oracle::radial_roots(self, &u) {
                let z = &self.c + &u * rho;
                let hv = self.h_value(&z).expect("dimensions match by construction");
                min_h = Some(min_h.map_or(hv, |m: f64| m.min(hv)));
            }
        }
        let status = match min_h {
            Some(m) if m > 0.0 => SeparationStatus::NumericallyPlausible,
            Some(_) => SeparationStatus::Violated,
            None => SeparationStatus::Inconclusive,
        };
        SeparationReport { status, analytic_applies, analytic_holds, sampled_min_h: min_h }
    }
}

/// Outcome of the separation precondition check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationStatus {
    /// The analytic sufficient condition holds.
    AnalyticallyCertified,
    /// Only sampled evidence: `h > 0` on every sampled point of `Z_c`.
    NumericallyPlausible,
    /// A sampled point of `Z_c` has `h <= 0`.
    Violated,
    /// The quartic surface produced no samples; nothing can be said.
    Inconclusive,
}

/// Report from [`ProblemInstance::check_separation`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub status: SeparationStatus,
    /// Whether the analytic condition is applicable (`c = 0`).
    pub analytic_applies: bool,
    /// Whether the analytic condition holds.
    pub analytic_holds: bool,
    /// Minimum of `h` over the sampled quartic surface, when sampled.
    pub sampled_min_h: Option<f64>,
}

impl SeparationReport {
    /// True unless the sampled check found an overlap.
    pub fn plausible(&self) -> bool {
        self.status != SeparationStatus::Violated
    }
}

/// Convenience constructors used by tests and fixtures.
impl ProblemInstance {
    /// Builds the instance with `A = I`.
    pub fn with_identity(
        n: usize,
        r: f64,
        alpha: f64,
        eta: f64,
        f: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self> {
        Self::new(
            DMatrix::identity(n, n),
            r,
            alpha,
            eta,
            DVector::from_vec(f),
            DVector::from_vec(c),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    fn sphere_instance() -> ProblemInstance {
        // Sphere data: unit matrix A, r = 2*sqrt(2).
        ProblemInstance::with_identity(
            3,
            2.0 * 2.0_f64.sqrt(),
            1.0,
            2.0,
            alloc::vec![2.0, 1.0, 1.0],
            alloc::vec![4.0, 5.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn h_on_and_off_surface() {
        let inst = sphere_instance();
        assert_abs_diff_eq!(inst.h_value(&dvector![2.0, 2.0, 0.0]).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(inst.h_value(&dvector![0.0, 0.0, 0.0]).unwrap(), -4.0, epsilon = 1e-12);
    }

    #[test]
    fn h_dimension_mismatch() {
        let inst = sphere_instance();
        assert!(matches!(
            inst.h_value(&dvector![1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn g_zero_cases() {
        // alpha = eta = 1, c = (1,0), f = (sqrt(6)/96, 0).
        let inst = ProblemInstance::with_identity(
            2,
            1.0,
            1.0,
            1.0,
            alloc::vec![6.0_f64.sqrt() / 96.0, 0.0],
            alloc::vec![1.0, 0.0],
        )
        .unwrap();
        // Lambda(z) = eta and f^T(z-c) = 0.
        assert_abs_diff_eq!(inst.g_value(&dvector![1.0, 2.0_f64.sqrt()]).unwrap(), 0.0, epsilon = 1e-15);
        // z = c gives 0.5*alpha*eta^2.
        assert_abs_diff_eq!(inst.g_value(&dvector![1.0, 0.0]).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn pi_basics() {
        let inst = ProblemInstance::with_identity(2, 1.0, 1.0, 1.0, alloc::vec![0.0, 0.0], alloc::vec![0.0, 0.0]).unwrap();
        let x = PrimalPoint::new(dvector![1.0, 0.0], dvector![0.0, 1.0]);
        assert_abs_diff_eq!(inst.pi_value(&x).unwrap(), 1.0);
        let same = PrimalPoint::new(dvector![0.3, 0.4], dvector![0.3, 0.4]);
        assert_abs_diff_eq!(inst.pi_value(&same).unwrap(), 0.0);
    }

    #[test]
    fn lagrangian_reduces_to_pi() {
        let inst = sphere_instance();
        let x = PrimalPoint::new(dvector![1.0, 2.0, 3.0], dvector![0.5, 0.5, 0.5]);
        assert_abs_diff_eq!(
            inst.lagrangian(&x, 0.0, 0.0).unwrap(),
            inst.pi_value(&x).unwrap()
        );
    }

    #[test]
    fn canonical_pair_values() {
        let inst = sphere_instance();
        assert_abs_diff_eq!(inst.v_value(inst.eta()).unwrap(), 0.0);
        assert_abs_diff_eq!(inst.dv(inst.eta()).unwrap(), 0.0);
        assert_abs_diff_eq!(inst.v_star(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(inst.dv_star(0.0).unwrap(), inst.eta());
    }

    #[test]
    fn canonical_domain_enforced() {
        let inst = sphere_instance();
        assert!(matches!(inst.v_value(-0.1), Err(Error::DomainViolation { .. })));
        assert!(matches!(inst.dv(-1e-12), Err(Error::DomainViolation { .. })));
        // alpha = 1, eta = 2 -> domain boundary at -2.
        assert!(inst.v_star(-2.0).is_ok());
        assert!(matches!(inst.v_star(-2.0 - 1e-9), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn rejects_asymmetric_a() {
        let mut a = DMatrix::identity(2, 2);
        a[(0, 1)] = 1e-3;
        let err = ProblemInstance::new(a, 1.0, 1.0, 1.0, dvector![0.0, 0.0], dvector![0.0, 0.0]);
        assert!(matches!(err, Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn rejects_indefinite_a() {
        let a = DMatrix::from_diagonal(&dvector![1.0, -0.5]);
        let err = ProblemInstance::new(a, 1.0, 1.0, 1.0, dvector![0.0, 0.0], dvector![0.0, 0.0]);
        assert!(matches!(err, Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn rejects_nonpositive_scalars() {
        for (r, alpha, eta) in [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)] {
            let err = ProblemInstance::with_identity(2, r, alpha, eta, alloc::vec![0.0, 0.0], alloc::vec![0.0, 0.0]);
            assert!(matches!(err, Err(Error::InvalidInstance(_))));
        }
    }

    #[test]
    fn separation_analytic_certified() {
        // c = 0, r = 1, eta = 1, f = (0.1, 0, 0): threshold 0.5*(0.5-1)^2/1 = 0.125.
        let inst =
            ProblemInstance::with_identity(3, 1.0, 1.0, 1.0, alloc::vec![0.1, 0.0, 0.0], alloc::vec![0.0; 3]).unwrap();
        let rep = inst.check_separation();
        assert_eq!(rep.status, SeparationStatus::AnalyticallyCertified);
        assert!(rep.analytic_applies && rep.analytic_holds);
    }

    #[test]
    fn separation_analytic_fails_at_boundary() {
        // Same geometry but ||f|| >= 0.125: analytic condition reported false.
        let inst =
            ProblemInstance::with_identity(3, 1.0, 1.0, 1.0, alloc::vec![0.13, 0.0, 0.0], alloc::vec![0.0; 3]).unwrap();
        let rep = inst.check_separation();
        assert!(rep.analytic_applies);
        assert!(!rep.analytic_holds);
    }

    #[test]
    fn separation_sampled_when_c_nonzero() {
        // Planar two-well instance: c != 0, so only the sampled check applies.
        let inst = ProblemInstance::with_identity(
            2,
            1.0,
            1.0,
            1.0,
            alloc::vec![6.0_f64.sqrt() / 96.0, 0.0],
            alloc::vec![1.0, 0.0],
        )
        .unwrap();
        let rep = inst.check_separation();
        assert!(!rep.analytic_applies);
        assert_eq!(rep.status, SeparationStatus::NumericallyPlausible);
        assert!(rep.sampled_min_h.unwrap() > 0.0);
    }
}
