//! Independent ground-truth machinery.
//!
//! Nothing here goes through the dual transformation: both surfaces are
//! parameterized exactly, the minimal distance is brute-forced over direction
//! grids, the best pairs are polished by alternating projection descent, and
//! classical KKT conditions are checked directly. This is the desk-scale
//! oracle used to validate the global-optimality certificates.
//!
//! The quartic surface is sampled radially: along the ray `z = c + ρu` with
//! `‖u‖ = 1`, the constraint becomes the scalar quartic
//! `q(ρ) = ½α(ρ²/2 − η)² − ρ(fᵀu)`. The leading term `αρ⁴/8` dominates once
//! `ρ` exceeds both `2√(2η)` (where `(ρ²/2 − η)² ≥ (ρ²/4)²`... i.e.
//! `ρ²/2 − η ≥ ρ²/4`) and `2(2‖f‖/α)^{1/3}` (where `αρ⁴/32 ≥ ρ‖f‖ ≥ ρ|fᵀu|`),
//! so `q > 0` beyond `R_max = 2√(2η) + 2(2‖f‖/α)^{1/3} + 1` and every positive
//! root lies inside `[0, R_max]`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
// Inherent f64 methods cover this under std (tests); the trait is what
// provides sqrt/powi in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dual::SpectralCache;
use crate::error::{Error, Result};
use crate::problem::{PrimalPoint, ProblemInstance};

/// Number of bracketing cells for radial root isolation.
const BRACKET_CELLS: usize = 512;
/// Residual target for polished radial roots.
const ROOT_TOL: f64 = 1e-12;
/// Constraint residual target after pair polish.
const POLISH_RES_TOL: f64 = 1e-10;
/// Tangential stationarity target after pair polish.
const POLISH_GRAD_TOL: f64 = 1e-7;
/// Number of best grid pairs fed to the polish stage.
const POLISH_SEEDS: usize = 20;
/// Pairs closer than this (in x-space) count as the same basin.
const BASIN_TOL: f64 = 1e-4;

/// Points sampled on one surface, with the worst constraint residual seen.
#[derive(Debug, Clone)]
pub struct SurfaceSample {
    pub points: Vec<DVector<f64>>,
    pub residual_bound: f64,
}

/// A polished candidate minimum.
#[derive(Debug, Clone)]
pub struct LocalMinimum {
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub pi: f64,
}

/// Outcome of the brute-force search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_y: DVector<f64>,
    pub best_z: DVector<f64>,
    /// `‖y − z‖` (the distance, not the objective).
    pub distance: f64,
    /// `½·distance²`.
    pub pi_value: f64,
    /// Directions-per-dimension parameter used for the grids.
    pub resolution: usize,
    /// Distinct polished basins, ascending by objective. Empty when polish
    /// was not requested.
    pub local_minima: Vec<LocalMinimum>,
}

/// Deterministic quasi-uniform unit directions: `m` angles for `n = 2`, an
/// `m × m` spherical-coordinate grid for `n = 3`, and a seeded
/// low-discrepancy fallback of `m²` directions for higher dimensions.
pub fn direction_grid(n: usize, m: usize, seed: u64) -> Vec<DVector<f64>> {
    assert!(n >= 2 && m >= 4, "need n >= 2 and m >= 4");
    let pi = core::f64::consts::PI;
    match n {
        2 => (0..m)
            .map(|j| {
                let phi = 2.0 * pi * j as f64 / m as f64;
                DVector::from_vec(alloc::vec![phi.cos(), phi.sin()])
            })
            .collect(),
        3 => {
            let mut dirs = Vec::with_capacity(m * m);
            for i in 0..m {
                let theta = pi * (i as f64 + 0.5) / m as f64;
                for j in 0..m {
                    let phi = 2.0 * pi * j as f64 / m as f64;
                    dirs.push(DVector::from_vec(alloc::vec![
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                        theta.cos(),
                    ]));
                }
            }
            dirs
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut dirs = Vec::with_capacity(m * m);
            while dirs.len() < m * m {
                let v = DVector::from_fn(n, |_, _| standard_normal(&mut rng));
                let norm = v.norm();
                if norm > 1e-6 {
                    dirs.push(v / norm);
                }
            }
            dirs
        }
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; rand's distribution machinery is not needed for this one use.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
}

/// The scalar quartic along the ray `z = c + ρu` and its derivative.
fn radial_quartic(inst: &ProblemInstance, t: f64, rho: f64) -> f64 {
    let w = 0.5 * rho * rho - inst.eta();
    0.5 * inst.alpha() * w * w - t * rho
}

fn radial_quartic_deriv(inst: &ProblemInstance, t: f64, rho: f64) -> f64 {
    inst.alpha() * rho * (0.5 * rho * rho - inst.eta()) - t
}

fn newton_polish_root(inst: &ProblemInstance, t: f64, mut rho: f64) -> f64 {
    for _ in 0..50 {
        let q = radial_quartic(inst, t, rho);
        if q.abs() <= ROOT_TOL {
            break;
        }
        let dq = radial_quartic_deriv(inst, t, rho);
        if dq.abs() < 1e-14 {
            break;
        }
        let next = rho - q / dq;
        if !next.is_finite() {
            break;
        }
        rho = next;
    }
    rho
}

/// All positive roots of `g` restricted to the ray `z = c + ρu`.
///
/// Simple roots are isolated by sign-change bracketing over `[0, R_max]` and
/// polished by Newton; multiplicity-2 touching roots are recovered from the
/// critical points of the quartic (where the derivative changes sign but the
/// value stays at zero). An empty list is a valid outcome.
pub fn radial_roots(inst: &ProblemInstance, u: &DVector<f64>) -> Vec<f64> {
    debug_assert!((u.norm() - 1.0).abs() <= 1e-12, "u must be a unit vector");
    let t = inst.f().dot(u);
    let r_max = 2.0 * (2.0 * inst.eta()).sqrt()
        + 2.0 * (2.0 * inst.f().norm() / inst.alpha()).powf(1.0 / 3.0)
        + 1.0;
    let mut roots: Vec<f64> = Vec::new();
    let mut push = |rho: f64| {
        if rho > 1e-12
            && radial_quartic(inst, t, rho).abs() <= ROOT_TOL
            && !roots.iter().any(|&r| (r - rho).abs() <= 1e-9 * (1.0 + rho))
        {
            roots.push(rho);
        }
    };

    let h = r_max / BRACKET_CELLS as f64;
    let mut prev = radial_quartic(inst, t, 0.0);
    for i in 1..=BRACKET_CELLS {
        let x = i as f64 * h;
        let q = radial_quartic(inst, t, x);
        if prev == 0.0 {
            push(newton_polish_root(inst, t, (i - 1) as f64 * h));
        } else if prev * q < 0.0 {
            // Bisect, then let Newton finish.
            let (mut a, mut b) = ((i - 1) as f64 * h, x);
            let mut qa = prev;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let qm = radial_quartic(inst, t, mid);
                if qm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if qa * qm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    qa = qm;
                }
            }
            push(newton_polish_root(inst, t, 0.5 * (a + b)));
        }
        prev = q;
    }
    if prev == 0.0 {
        push(newton_polish_root(inst, t, r_max));
    }

    // Touching roots: critical points of q with q = 0. The derivative is the
    // cubic alpha*rho*(rho^2/2 - eta) - t; bracket its sign changes the same
    // way and polish with a Newton iteration on the derivative.
    let mut prev_d = radial_quartic_deriv(inst, t, 0.0);
    for i in 1..=BRACKET_CELLS {
        let x = i as f64 * h;
        let d = radial_quartic_deriv(inst, t, x);
        if prev_d * d <= 0.0 && (prev_d != 0.0 || d != 0.0) {
            let (mut a, mut b) = ((i - 1) as f64 * h, x);
            let mut da = prev_d;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let dm = radial_quartic_deriv(inst, t, mid);
                if da * dm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    da = dm;
                }
            }
            push(0.5 * (a + b));
        }
        prev_d = d;
    }

    roots.sort_by(f64::total_cmp);
    roots
}

/// Samples the ellipsoid surface `{y : yᵀAy = r²}` via the exact spectral
/// parameterization `y = Q diag(1/√β_i) w` with `‖w‖ = r`.
pub fn sample_surface_y(
    inst: &ProblemInstance,
    cache: &SpectralCache,
    m: usize,
    seed: u64,
) -> SurfaceSample {
    let dirs = direction_grid(inst.n(), m, seed);
    let mut points = Vec::with_capacity(dirs.len());
    let mut residual_bound = 0.0_f64;
    for w in dirs {
        let scaled = DVector::from_iterator(
            inst.n(),
            w.iter().zip(cache.beta().iter()).map(|(&wi, &b)| wi * inst.r() / b.sqrt()),
        );
        let y = cache.q() * scaled;
        residual_bound = residual_bound.max(inst.h_value(&y).expect("dimension matches").abs());
        points.push(y);
    }
    SurfaceSample { points, residual_bound }
}

/// Samples the quartic surface `{z : g(z) = 0}` radially around `c`; each
/// direction contributes all its positive roots.
pub fn sample_surface_z(inst: &ProblemInstance, m: usize, seed: u64) -> SurfaceSample {
    let dirs = direction_grid(inst.n(), m, seed);
    let mut points = Vec::new();
    let mut residual_bound = 0.0_f64;
    for u in dirs {
        for rho in radial_roots(inst, &u) {
            let z = inst.c() + &u * rho;
            residual_bound = residual_bound.max(inst.g_value(&z).expect("dimension matches").abs());
            points.push(z);
        }
    }
    SurfaceSample { points, residual_bound }
}

/// Nearest point on the ellipsoid to `z`, via the secular equation in the
/// eigenbasis: `ŷ_i = ẑ_i / (1 + λβ_i)` with `λ` the unique root of
/// `Σ β_i ẑ_i²/(1 + λβ_i)² = r²` on `λ > −1/β_max`.
fn project_ellipsoid(inst: &ProblemInstance, cache: &SpectralCache, z: &DVector<f64>) -> DVector<f64> {
    let zh = cache.q().transpose() * z;
    let beta = cache.beta();
    let beta_max = beta[beta.len() - 1];
    let r2 = inst.r() * inst.r();
    let phi = |lam: f64| -> f64 {
        zh.iter()
            .zip(beta.iter())
            .map(|(&zi, &b)| b * zi * zi / ((1.0 + lam * b) * (1.0 + lam * b)))
            .sum::<f64>()
            - r2
    };
    let mut lo = -1.0 / beta_max + 1e-12 * (1.0 + 1.0 / beta_max);
    if phi(lo) <= 0.0 {
        // Degenerate: z has (numerically) no component along the extreme
        // axis. Fall back to radial scaling, which is always on the surface.
        let quad = z.dot(&(inst.a() * z));
        if quad <= 0.0 {
            // z at the center; pick an arbitrary surface point.
            let mut w = DVector::zeros(inst.n());
            w[0] = inst.r() / beta[0].sqrt();
            return cache.q() * w;
        }
        return z * (inst.r() / quad.sqrt());
    }
    let mut hi = lo.max(0.0) + 1.0;
    while phi(hi) > 0.0 {
        hi = hi * 2.0 + 1.0;
        if hi > 1e18 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * (1.0 + hi.abs()) {
            break;
        }
    }
    let lam = 0.5 * (lo + hi);
    let yh = DVector::from_iterator(
        inst.n(),
        zh.iter().zip(beta.iter()).map(|(&zi, &b)| zi / (1.0 + lam * b)),
    );
    cache.q() * yh
}

/// Polishes a near-double root on the derivative of the quartic. Near a
/// touching root `|q| <= ROOT_TOL` only pins `ρ` to about `√ROOT_TOL`, so the
/// critical point is located instead (a simple root of `q'`).
fn refine_double_root(inst: &ProblemInstance, t: f64, mut rho: f64) -> f64 {
    for _ in 0..60 {
        let d = radial_quartic_deriv(inst, t, rho);
        let dd = inst.alpha() * (1.5 * rho * rho - inst.eta());
        if d.abs() < 1e-15 || dd.abs() < 1e-14 {
            break;
        }
        let next = rho - d / dd;
        if !next.is_finite() {
            break;
        }
        rho = next;
    }
    rho
}

/// Re-projects `z` onto the quartic surface along its ray from `c`.
fn project_quartic_radial(inst: &ProblemInstance, z: &DVector<f64>) -> Option<DVector<f64>> {
    let zc = z - inst.c();
    let norm = zc.norm();
    if norm < 1e-12 {
        return None;
    }
    let u = zc / norm;
    let t = inst.f().dot(&u);
    let mut rho = newton_polish_root(inst, t, norm);
    let grad_scale = 1.0 + inst.alpha() * (1.0 + inst.eta());
    if radial_quartic_deriv(inst, t, rho).abs() < 1e-6 * grad_scale {
        let refined = refine_double_root(inst, t, rho);
        if refined > 1e-12
            && (refined - rho).abs() <= 1e-4 * (1.0 + rho)
            && radial_quartic(inst, t, refined).abs() <= ROOT_TOL
        {
            rho = refined;
        }
    }
    if rho > 1e-12 && radial_quartic(inst, t, rho).abs() <= ROOT_TOL {
        return Some(inst.c() + &u * rho);
    }
    // Newton failed (typically near a double root); take the nearest
    // bracketed root instead.
    radial_roots(inst, &u)
        .into_iter()
        .min_by(|a, b| (a - norm).abs().total_cmp(&(b - norm).abs()))
        .map(|r| inst.c() + &u * r)
}

fn tangential(grad_obj: &DVector<f64>, grad_con: &DVector<f64>) -> DVector<f64> {
    let denom = grad_con.norm_squared();
    if denom == 0.0 {
        return grad_obj.clone();
    }
    grad_obj - grad_con * (grad_obj.dot(grad_con) / denom)
}

/// Tangential part of the objective gradient on the quartic surface. When
/// `∇g` degenerates (exact touching surface, e.g. `f = 0`), the surface is
/// the sphere `‖z − c‖ = √(2η)` and the radial direction serves as normal.
fn tangential_z(inst: &ProblemInstance, grad_obj: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
    let gg = inst.grad_g(z).expect("dimension matches");
    if gg.norm() > 1e-9 {
        tangential(grad_obj, &gg)
    } else {
        tangential(grad_obj, &(z - inst.c()))
    }
}

/// Least-squares Lagrange multipliers for the classical KKT system at `x`.
pub fn least_squares_multipliers(inst: &ProblemInstance, x: &PrimalPoint) -> Result<(f64, f64)> {
    let gh = inst.grad_h(&x.y)?;
    let gg = inst.grad_g(&x.z)?;
    let d = &x.y - &x.z;
    let lam = if gh.norm_squared() > 0.0 { -d.dot(&gh) / gh.norm_squared() } else { 0.0 };
    let mu = if gg.norm_squared() > 0.0 { d.dot(&gg) / gg.norm_squared() } else { 0.0 };
    Ok((lam, mu))
}

/// Classical first-order conditions at `(x, λ, μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    /// `‖y − z + λAy‖`.
    pub stationarity_y: f64,
    /// `‖z − y + μ∇g(z)‖`.
    pub stationarity_z: f64,
    pub h_res: f64,
    pub g_res: f64,
    pub stationarity_pass: bool,
    pub feasibility_pass: bool,
}

impl KktReport {
    pub fn passes(&self) -> bool {
        self.stationarity_pass && self.feasibility_pass
    }
}

/// Checks `∇Π + λ∇h + μ∇g = 0` (blockwise) and feasibility against `tol`.
pub fn kkt_check(
    inst: &ProblemInstance,
    x: &PrimalPoint,
    lam: f64,
    mu: f64,
    tol: f64,
) -> Result<KktReport> {
    let d = &x.y - &x.z;
    let st_y = (&d + inst.grad_h(&x.y)? * lam).norm();
    let st_z = (-&d + inst.grad_g(&x.z)? * mu).norm();
    let h_res = inst.h_value(&x.y)?.abs();
    let g_res = inst.g_value(&x.z)?.abs();
    Ok(KktReport {
        stationarity_y: st_y,
        stationarity_z: st_z,
        h_res,
        g_res,
        stationarity_pass: st_y <= tol && st_z <= tol,
        feasibility_pass: h_res <= tol && g_res <= tol,
    })
}

struct PolishOutcome {
    y: DVector<f64>,
    z: DVector<f64>,
    pi: f64,
    converged: bool,
}

/// Alternating projection descent from a sampled pair, finished by a damped
/// Newton iteration on the full KKT system for tight stationarity.
fn polish_pair(
    inst: &ProblemInstance,
    cache: &SpectralCache,
    z0: &DVector<f64>,
) -> PolishOutcome {
    // The y-step is an exact constrained minimization, so only z0 seeds the
    // descent; the first y is the nearest ellipsoid point to it.
    let mut y = project_ellipsoid(inst, cache, z0);
    let mut z = z0.clone();
    let mut pi = 0.5 * (&y - &z).norm_squared();

    let mut converged = false;
    for _ in 0..400 {
        // Exact y-step.
        y = project_ellipsoid(inst, cache, &z);
        // Backtracking tangential step for z with radial re-projection.
        let tz = tangential_z(inst, &(&z - &y), &z);
        let mut s = 1.0_f64;
        let mut moved = false;
        while s * tz.norm() > 1e-14 {
            if let Some(cand) = project_quartic_radial(inst, &(&z - &tz * s)) {
                let cand_pi = 0.5 * (&y - &cand).norm_squared();
                if cand_pi < pi {
                    z = cand;
                    pi = cand_pi;
                    moved = true;
                    break;
                }
            }
            s *= 0.5;
        }
        let ty = tangential(&(&y - &z), &inst.grad_h(&y).expect("dimension matches"));
        let gz = tangential_z(inst, &(&z - &y), &z);
        let h_res = inst.h_value(&y).expect("dimension matches").abs();
        let g_res = inst.g_value(&z).expect("dimension matches").abs();
        if ty.norm() <= POLISH_GRAD_TOL
            && gz.norm() <= POLISH_GRAD_TOL
            && h_res <= POLISH_RES_TOL
            && g_res <= POLISH_RES_TOL
        {
            converged = true;
            break;
        }
        if !moved {
            break;
        }
    }

    // KKT Newton refinement; accepted only if it stays in the same basin and
    // actually reaches the polish tolerances.
    if let Some((yn, zn)) = kkt_newton(inst, &y, &z) {
        let same_basin = ((&yn - &y).norm_squared() + (&zn - &z).norm_squared()).sqrt()
            <= 0.05 * (1.0 + y.norm() + z.norm());
        let pi_n = 0.5 * (&yn - &zn).norm_squared();
        if same_basin && pi_n <= pi + 1e-9 {
            let h_res = inst.h_value(&yn).expect("dimension matches").abs();
            let g_res = inst.g_value(&zn).expect("dimension matches").abs();
            let ty = tangential(&(&yn - &zn), &inst.grad_h(&yn).expect("dimension matches"));
            let tz = tangential_z(inst, &(&zn - &yn), &zn);
            if h_res <= POLISH_RES_TOL
                && g_res <= POLISH_RES_TOL
                && ty.norm() <= POLISH_GRAD_TOL
                && tz.norm() <= POLISH_GRAD_TOL
            {
                return PolishOutcome { y: yn, z: zn, pi: pi_n, converged: true };
            }
        }
    }
    PolishOutcome { y, z, pi, converged }
}

/// Damped Newton on the full KKT system `(y, z, λ, μ)`.
fn kkt_newton(
    inst: &ProblemInstance,
    y0: &DVector<f64>,
    z0: &DVector<f64>,
) -> Option<(DVector<f64>, DVector<f64>)> {
    let n = inst.n();
    let dim = 2 * n + 2;
    let x0 = PrimalPoint::new(y0.clone(), z0.clone());
    let (mut lam, mut mu) = least_squares_multipliers(inst, &x0).ok()?;
    let mut y = y0.clone();
    let mut z = z0.clone();

    let residual = |y: &DVector<f64>, z: &DVector<f64>, lam: f64, mu: f64| -> Option<DVector<f64>> {
        let mut res = DVector::zeros(dim);
        let f1 = y - z + inst.grad_h(y).ok()? * lam;
        let f2 = z - y + inst.grad_g(z).ok()? * mu;
        res.rows_mut(0, n).copy_from(&f1);
        res.rows_mut(n, n).copy_from(&f2);
        res[2 * n] = inst.h_value(y).ok()?;
        res[2 * n + 1] = inst.g_value(z).ok()?;
        res.iter().all(|v| v.is_finite()).then_some(res)
    };

    let mut res = residual(&y, &z, lam, mu)?;
    for _ in 0..60 {
        if res.norm() <= 1e-13 * (1.0 + y.norm() + z.norm()) {
            break;
        }
        let mut jac = DMatrix::zeros(dim, dim);
        // d f1 / d y = I + lam A ; d f1 / d z = -I ; d f1 / d lam = Ay
        let gh = inst.grad_h(&y).ok()?;
        let gg = inst.grad_g(&z).ok()?;
        let zc = &z - inst.c();
        let xi = 0.5 * zc.norm_squared();
        for i in 0..n {
            for j in 0..n {
                jac[(i, j)] = lam * inst.a()[(i, j)] + if i == j { 1.0 } else { 0.0 };
                // Hessian of g: alpha((xi - eta) I + (z-c)(z-c)^T)
                jac[(n + i, n + j)] = mu * inst.alpha() * zc[i] * zc[j]
                    + if i == j { 1.0 + mu * inst.alpha() * (xi - inst.eta()) } else { 0.0 };
            }
            jac[(i, n + i)] = -1.0;
            jac[(n + i, i)] = -1.0;
            jac[(i, 2 * n)] = gh[i];
            jac[(n + i, 2 * n + 1)] = gg[i];
            jac[(2 * n, i)] = gh[i];
            jac[(2 * n + 1, n + i)] = gg[i];
        }
        let delta = jac.lu().solve(&(-&res))?;
        let mut t = 1.0_f64;
        let mut accepted = false;
        while t >= 1e-12 {
            let yc = &y + delta.rows(0, n) * t;
            let zc2 = &z + delta.rows(n, n) * t;
            let lc = lam + t * delta[2 * n];
            let mc = mu + t * delta[2 * n + 1];
            if let Some(rc) = residual(&yc, &zc2, lc, mc) {
                if rc.norm() < res.norm() {
                    y = yc;
                    z = zc2;
                    lam = lc;
                    mu = mc;
                    res = rc;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some((y, z))
}

/// Brute-forces the minimal distance over the two sample clouds; with
/// `polish`, the best [`POLISH_SEEDS`] pairs are refined and the distinct
/// basins reported.
///
/// Complexity is `O(m^(2(n−1)))` in the pair scan; this is a desk-scale
/// verification tool, not a production path.
pub fn brute_force_min(
    inst: &ProblemInstance,
    cache: &SpectralCache,
    m: usize,
    polish: bool,
    seed: u64,
) -> Result<OracleResult> {
    if m < 16 {
        return Err(Error::InvalidArgument("oracle grid needs m >= 16"));
    }
    let ys = sample_surface_y(inst, cache, m, seed);
    let zs = sample_surface_z(inst, m, seed.wrapping_add(1));
    if zs.points.is_empty() {
        return Err(Error::EmptySurface);
    }

    // Best-K pair scan.
    let mut best: Vec<(f64, usize, usize)> = Vec::with_capacity(POLISH_SEEDS + 1);
    for (iy, y) in ys.points.iter().enumerate() {
        for (iz, z) in zs.points.iter().enumerate() {
            let d2 = (y - z).norm_squared();
            if best.len() < POLISH_SEEDS || d2 < best.last().expect("non-empty").0 {
                let pos = best.partition_point(|&(b, _, _)| b < d2);
                best.insert(pos, (d2, iy, iz));
                if best.len() > POLISH_SEEDS {
                    best.pop();
                }
            }
        }
    }
    let (d2, iy, iz) = best[0];
    if !polish {
        return Ok(OracleResult {
            best_y: ys.points[iy].clone(),
            best_z: zs.points[iz].clone(),
            distance: d2.sqrt(),
            pi_value: 0.5 * d2,
            resolution: m,
            local_minima: Vec::new(),
        });
    }

    let mut polished: Vec<LocalMinimum> = Vec::new();
    for &(_, _, iz) in &best {
        let out = polish_pair(inst, cache, &zs.points[iz]);
        if !out.converged {
            continue;
        }
        let is_new = !polished.iter().any(|p| {
            ((&p.y - &out.y).norm_squared() + (&p.z - &out.z).norm_squared()).sqrt() <= BASIN_TOL
        });
        if is_new {
            polished.push(LocalMinimum { y: out.y, z: out.z, pi: out.pi });
        }
    }
    polished.sort_by(|a, b| {
        a.pi.total_cmp(&b.pi).then_with(|| {
            a.y.iter()
                .zip(b.y.iter())
                .map(|(x, w)| x.total_cmp(w))
                .find(|o| !o.is_eq())
                .unwrap_or(core::cmp::Ordering::Equal)
        })
    });
    let (best_y, best_z, pi_value) = match polished.first() {
        Some(p) => (p.y.clone(), p.z.clone(), p.pi),
        None => (ys.points[iy].clone(), zs.points[iz].clone(), 0.5 * d2),
    };
    Ok(OracleResult {
        distance: (2.0 * pi_value).sqrt(),
        best_y,
        best_z,
        pi_value,
        resolution: m,
        local_minima: polished,
    })
}
