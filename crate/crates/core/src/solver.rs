//! Multistart damped Newton on the dual gradient system, global-optimality
//! certificates, and the linear perturbation scheme for degenerate instances.
//!
//! A stationary point of `Πᵈ` inside `S_a⁺` certifies the unique global
//! minimizer of the primal problem (the recovered `x` is that minimizer).
//! Instances with more than one global minimizer admit no such point; for
//! those, replacing `f` by `f + e/k` with growing `k` singles out one
//! minimizer per perturbed problem, and the trace of certified solutions
//! converges to a minimizer of the unperturbed problem.

use alloc::vec::Vec;
use nalgebra::{DVector, Matrix3, Vector3};
// Inherent f64 methods cover this under std (tests); the trait is what
// provides sqrt/powi in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::dual::{
    dual_diagnostics, pi_d_gradient, x_of_dual, xi_value, DualDiagnostics, DualPoint,
    SpectralCache, SA_TOL,
};
use crate::error::{Error, Result};
use crate::problem::{PrimalPoint, ProblemInstance, SeparationReport};

/// Feasibility threshold on primal residuals `|h|`, `|g|`.
pub const FEAS_TOL: f64 = 1e-6;

/// Tolerances and multistart seeds for the dual Newton solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Stationarity threshold on `‖∇Πᵈ‖`.
    pub grad_tol: f64,
    /// Newton iteration cap per seed.
    pub max_iter: usize,
    /// Initial `(λ, μ, ς)` triples for the multistart loop.
    pub seed_grid: Vec<DualPoint>,
    /// Step shrink factor for backtracking damping.
    pub damping_shrink: f64,
    /// Smallest damped step length before a seed is abandoned.
    pub min_step: f64,
    /// Distance below which two dual points count as the same.
    pub dedup_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iter: 200,
            seed_grid: default_seed_grid(),
            damping_shrink: 0.5,
            min_step: 1e-14,
            dedup_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidArgument("grad_tol must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be >= 1"));
        }
        if self.seed_grid.is_empty() {
            return Err(Error::InvalidArgument("seed grid must be non-empty"));
        }
        Ok(())
    }
}

/// The default seed grid spans the multiplier magnitudes seen in practice:
/// `λ` around unity, `μ` up to a few tens, `ς` small of both signs.
pub fn default_seed_grid() -> Vec<DualPoint> {
    let lams = [0.1, 0.5, 1.0, 2.0, 5.0];
    let mus = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let sigs = [-0.02, 0.02, -0.1, 0.1, -0.5, 0.5, 1.0];
    let mut grid = Vec::with_capacity(lams.len() * mus.len() * sigs.len());
    for &lam in &lams {
        for &mu in &mus {
            for &sig in &sigs {
                grid.push(DualPoint::new(lam, mu, sig));
            }
        }
    }
    grid
}

/// A converged dual stationary point together with its recovered primal pair.
#[derive(Debug, Clone)]
pub struct StationaryPoint {
    pub dp: DualPoint,
    pub grad_norm: f64,
    pub diagnostics: DualDiagnostics,
    pub x: PrimalPoint,
    /// `|h(y)|`.
    pub h_res: f64,
    /// `|g(z)|`.
    pub g_res: f64,
    pub pi: f64,
    pub pi_d: f64,
    /// Newton iterations spent on this seed.
    pub iterations: usize,
}

impl StationaryPoint {
    fn build(
        inst: &ProblemInstance,
        cache: &SpectralCache,
        dp: DualPoint,
        grad_norm: f64,
        iterations: usize,
    ) -> Result<Self> {
        let x = x_of_dual(inst, cache, &dp)?;
        let diagnostics = dual_diagnostics(inst, cache, &dp);
        let h_res = inst.h_value(&x.y)?.abs();
        let g_res = inst.g_value(&x.z)?.abs();
        let pi = inst.pi_value(&x)?;
        let pi_d = xi_value(inst, &x, &dp)?;
        // Complementary-dual principle: Pi(x) = Pi_d at any S_a stationary
        // point. A violation means the point is not actually stationary.
        if diagnostics.in_sa && (pi - pi_d).abs() > 1e-6 * pi.abs().max(1.0) {
            return Err(Error::DualityGapViolation { pi, pi_d });
        }
        Ok(Self { dp, grad_norm, diagnostics, x, h_res, g_res, pi, pi_d, iterations })
    }

    pub fn max_residual(&self) -> f64 {
        self.h_res.max(self.g_res)
    }

    pub fn is_feasible(&self) -> bool {
        self.max_residual() <= FEAS_TOL
    }
}

/// Certificate status per the global-optimality theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    /// A stationary point in `S_a⁺` was found: the recovered `x` is the
    /// unique global minimizer.
    GlobalUnique,
    /// Stationary points exist but none lies in `S_a⁺`; no global claim.
    StationaryNotCertified,
    /// No stationary point converged from any seed.
    NoneFound,
}

/// One perturbed solve in a perturbation trace.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    /// Perturbation divisor: this run used `f + e/k`.
    pub k: f64,
    /// The perturbed force vector.
    pub f: DVector<f64>,
    /// Status of the perturbed solve, or the error that aborted it.
    pub result: Result<Certificate>,
}

/// Outcome of a global solve.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub status: CertificateStatus,
    pub witness: Option<StationaryPoint>,
    pub perturbation_trace: Option<Vec<TraceEntry>>,
    pub separation: SeparationReport,
}

fn grad_if_valid(
    inst: &ProblemInstance,
    cache: &SpectralCache,
    p: &Vector3<f64>,
) -> Option<Vector3<f64>> {
    let dp = DualPoint::from_vector(p);
    match pi_d_gradient(inst, cache, &dp) {
        Ok(g) if g.iter().all(|v| v.is_finite()) => Some(g),
        _ => None,
    }
}

fn fd_jacobian(
    inst: &ProblemInstance,
    cache: &SpectralCache,
    p: &Vector3<f64>,
) -> Option<Matrix3<f64>> {
    let mut jac = Matrix3::zeros();
    for j in 0..3 {
        let mut step = (1e-7_f64).max(1e-7 * p[j].abs());
        let mut col = None;
        // Shrink the step if a probe lands outside S_a.
        for _ in 0..4 {
            let mut plus = *p;
            let mut minus = *p;
            plus[j] += step;
            minus[j] -= step;
            if let (Some(gp), Some(gm)) =
                (grad_if_valid(inst, cache, &plus), grad_if_valid(inst, cache, &minus))
            {
                col = Some((gp - gm) / (2.0 * step));
                break;
            }
            step *= 0.1;
        }
        jac.set_column(j, &col?);
    }
    Some(jac)
}

/// Damped Newton iteration on `∇Πᵈ = 0` from a single seed.
///
/// The Jacobian is a central finite difference of the (analytic, envelope)
/// gradient. Steps are halved until the gradient norm decreases; candidate
/// iterates outside `S_a` also trigger halving. Returns `None` when the seed
/// does not converge within `max_iter` or the step collapses below
/// `min_step`.
pub fn newton_solve(
    inst: &ProblemInstance,
    cache: &SpectralCache,
    seed: &DualPoint,
    cfg: &SolverConfig,
) -> Result<Option<StationaryPoint>> {
    if !seed.is_finite() {
        return Err(Error::NonFiniteResidual("newton seed"));
    }
    let mut p = seed.as_vector();
    // Seeds on (or numerically at) the S_a boundary are nudged off it.
    for _ in 0..100 {
        let diag = dual_diagnostics(inst, cache, &DualPoint::from_vector(&p));
        if diag.in_sa {
            break;
        }
        p.x += 10.0 * SA_TOL * (1.0 + p.x.abs());
        p.z += 10.0 * SA_TOL * (1.0 + p.z.abs());
    }
    let Some(mut g) = grad_if_valid(inst, cache, &p) else {
        return Ok(None);
    };
    for iter in 0..cfg.max_iter {
        if g.norm() <= cfg.grad_tol {
            return StationaryPoint::build(inst, cache, DualPoint::from_vector(&p), g.norm(), iter)
                .map(Some);
        }
        let Some(jac) = fd_jacobian(inst, cache, &p) else {
            return Ok(None);
        };
        let Some(delta) = jac.lu().solve(&(-g)) else {
            return Ok(None);
        };
        let mut t = 1.0_f64;
        loop {
            let cand = p + delta * t;
            if let Some(gc) = grad_if_valid(inst, cache, &cand) {
                if gc.norm() < g.norm() {
                    p = cand;
                    g = gc;
                    break;
                }
            }
            t *= cfg.damping_shrink;
            if t * delta.norm() < cfg.min_step {
                return Ok(None);
            }
        }
    }
    if g.norm() <= cfg.grad_tol {
        return StationaryPoint::build(inst, cache, DualPoint::from_vector(&p), g.norm(), cfg.max_iter)
            .map(Some);
    }
    Ok(None)
}

/// Runs the multistart loop and classifies the outcome.
///
/// Stationary points are deduplicated by dual-space distance; any point in
/// `S_a⁺` yields `GlobalUnique` (multiple `S_a⁺` witnesses must recover the
/// same primal pair, otherwise the run fails loudly).
pub fn solve_global(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<Certificate> {
    let cache = SpectralCache::new(inst)?;
    solve_global_with_cache(inst, &cache, cfg)
}

/// [`solve_global`] with a caller-provided spectral cache.
pub fn solve_global_with_cache(
    inst: &ProblemInstance,
    cache: &SpectralCache,
    cfg: &SolverConfig,
) -> Result<Certificate> {
    cfg.validate()?;
    let separation = inst.check_separation();

    let mut points: Vec<StationaryPoint> = Vec::new();
    for seed in &cfg.seed_grid {
        match newton_solve(inst, cache, seed, cfg) {
            Ok(Some(sp)) => points.push(sp),
            Ok(None) => {}
            // Per-seed numeric trouble only kills that seed.
            Err(Error::NonFiniteResidual(_)) | Err(Error::SingularRecovery(_)) => {}
            Err(e) => return Err(e),
        }
    }
    // Deterministic, order-independent aggregation: sort before dedup.
    points.sort_by(|a, b| {
        (a.pi_d, a.dp.lam, a.dp.mu, a.dp.sig)
            .partial_cmp(&(b.pi_d, b.dp.lam, b.dp.mu, b.dp.sig))
            .expect("finite by construction")
    });
    let mut distinct: Vec<StationaryPoint> = Vec::new();
    for sp in points {
        if !distinct.iter().any(|q| q.dp.distance(&sp.dp) <= cfg.dedup_tol) {
            distinct.push(sp);
        }
    }

    let mut sa_plus = distinct.iter().filter(|sp| sp.diagnostics.in_sa_plus);
    if let Some(witness) = sa_plus.next() {
        // Certified uniqueness: every other S_a+ witness must recover
        // the same minimizer.
        for other in sa_plus {
            let dy = (&witness.x.y - &other.x.y).norm_squared();
            let dz = (&witness.x.z - &other.x.z).norm_squared();
            let xdist = (dy + dz).sqrt();
            let scale = 1.0 + witness.x.y.norm() + witness.x.z.norm();
            if xdist > cfg.dedup_tol * scale {
                return Err(Error::DistinctGlobalWitnesses(xdist));
            }
        }
        return Ok(Certificate {
            status: CertificateStatus::GlobalUnique,
            witness: Some(witness.clone()),
            perturbation_trace: None,
            separation,
        });
    }

    if distinct.is_empty() {
        return Ok(Certificate {
            status: CertificateStatus::NoneFound,
            witness: None,
            perturbation_trace: None,
            separation,
        });
    }
    // Best non-certified point: feasible ones first, then lowest objective.
    let witness = distinct
        .iter()
        .filter(|sp| sp.is_feasible())
        .min_by(|a, b| a.pi.total_cmp(&b.pi))
        .or_else(|| distinct.iter().min_by(|a, b| a.max_residual().total_cmp(&b.max_residual())))
        .cloned();
    Ok(Certificate {
        status: CertificateStatus::StationaryNotCertified,
        witness,
        perturbation_trace: None,
        separation,
    })
}

/// Solves a schedule of linearly perturbed instances `f ← f + e/k`.
///
/// Every run is recorded in the trace; the final status is the last run's.
/// The trace exposes the convergence of the certified minimizers toward a
/// minimizer of the unperturbed problem.
pub fn perturb_and_solve(
    inst: &ProblemInstance,
    e: &DVector<f64>,
    schedule: &[f64],
    cfg: &SolverConfig,
) -> Result<Certificate> {
    if e.len() != inst.n() {
        return Err(Error::DimensionMismatch { expected: inst.n(), got: e.len() });
    }
    if e.amax() == 0.0 {
        return Err(Error::InvalidArgument("perturbation direction e must be non-zero"));
    }
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("perturbation schedule must be non-empty"));
    }
    if schedule.iter().any(|&k| !(k > 0.0)) || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "perturbation schedule must be strictly increasing and positive",
        ));
    }

    let cache = SpectralCache::new(inst)?;
    let mut trace = Vec::with_capacity(schedule.len());
    // The certified dual point moves continuously in k but approaches the
    // boundary of S_a+ (the smallest d_i shrinks like 1/k), so plain
    // multistart loses the branch between widely spaced schedule entries.
    // A geometric continuation in k carries the previous certified point
    // into the basin of the next one.
    let mut warm: Option<DualPoint> = None;
    let mut prev_k: Option<f64> = None;
    for &k in schedule {
        if let (Some(dp0), Some(k0)) = (warm.clone(), prev_k) {
            const SUBSTEPS: usize = 8;
            let mut dp_cur = dp0;
            for j in 1..=SUBSTEPS {
                let k_j = k0 * (k / k0).powf(j as f64 / SUBSTEPS as f64);
                if let Ok(pert) = inst.with_f(inst.f() + e / k_j) {
                    if let Ok(Some(sp)) = newton_solve(&pert, &cache, &dp_cur, cfg) {
                        dp_cur = sp.dp.clone();
                    }
                }
            }
            warm = Some(dp_cur);
        }

        let f_k = inst.f() + e / k;
        let mut cfg_k = cfg.clone();
        if let Some(dp) = &warm {
            cfg_k.seed_grid.push(dp.clone());
        }
        let result = inst
            .with_f(f_k.clone())
            .and_then(|pert| solve_global_with_cache(&pert, &cache, &cfg_k));
        if let Ok(cert) = &result {
            if let Some(sp) = &cert.witness {
                if sp.diagnostics.in_sa_plus {
                    warm = Some(sp.dp.clone());
                }
            }
        }
        prev_k = Some(k);
        trace.push(TraceEntry { k, f: f_k, result });
    }
    let last = trace.last().expect("schedule is non-empty");
    let (status, witness, separation) = match &last.result {
        Ok(cert) => (cert.status, cert.witness.clone(), cert.separation.clone()),
        Err(_) => (CertificateStatus::NoneFound, None, inst.check_separation()),
    };
    Ok(Certificate { status, witness, perturbation_trace: Some(trace), separation })
}

/// Joint truth values of the three equivalent predicates at a stationary
/// point: `μ = 0`, `λ = 0`, and `x ∉ X_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaReport {
    /// The point passes the stationarity gate; the predicates only speak
    /// about stationary points of `Ξ`.
    pub applicable: bool,
    pub mu_zero: bool,
    pub lam_zero: bool,
    pub infeasible: bool,
    /// All three predicates agree (all true or all false).
    pub consistent: bool,
}

/// Evaluates the equivalence `μ = 0 ⇔ λ = 0 ⇔ x ∉ X_c` at a stationary point.
pub fn verify_lemma1(sp: &StationaryPoint) -> LemmaReport {
    let applicable = sp.grad_norm <= 1e-6;
    let mu_zero = sp.dp.mu.abs() <= 1e-8;
    let lam_zero = sp.dp.lam.abs() <= 1e-8;
    let infeasible = sp.max_residual() > FEAS_TOL;
    let consistent = !applicable || (mu_zero == lam_zero && lam_zero == infeasible);
    LemmaReport { applicable, mu_zero, lam_zero, infeasible, consistent }
}
