//! Property-based invariants of the canonical transformation.

mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use surfdist_core::dual::{
    dual_diagnostics, duality_gap, pi_d_gradient, pi_d_value, x_of_dual, xi_hessian_x, xi_value,
};
use surfdist_core::generate::{random_orthogonal, random_separated_instance, spd_with_eigenvalues};
use surfdist_core::problem::PrimalPoint;
use surfdist_core::{DualPoint, ProblemInstance, SpectralCache};

fn seeded_instance(n: usize, seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_separated_instance(n, &mut rng).expect("construction keeps the instance valid")
}

proptest! {
    /// Fenchel-Young: `V(ξ) + V*(ς) ≥ ξς`, with equality at `ς = DV(ξ)`.
    #[test]
    fn fenchel_young(
        alpha in 0.1..5.0_f64,
        eta in 0.1..5.0_f64,
        xi in 0.0..10.0_f64,
        sig_shift in 0.0..8.0_f64,
    ) {
        let inst = ProblemInstance::with_identity(2, 1.0, alpha, eta, vec![0.1, 0.0], vec![0.0, 0.0])
            .unwrap();
        // Stay inside the conjugate domain ς ≥ -αη.
        let sig = -alpha * eta + sig_shift;
        let lhs = inst.v_value(xi).unwrap() + inst.v_star(sig).unwrap();
        prop_assert!(lhs >= xi * sig - 1e-12 * (1.0 + lhs.abs() + (xi * sig).abs()));

        let sig_star = inst.dv(xi).unwrap();
        if sig_star >= -alpha * eta {
            let tight = inst.v_value(xi).unwrap() + inst.v_star(sig_star).unwrap() - xi * sig_star;
            prop_assert!(tight.abs() <= 1e-12 * (1.0 + xi * xi));
        }
    }

    /// `DV*` inverts `DV` on the admissible domain.
    #[test]
    fn conjugate_gradients_invert(
        alpha in 0.1..5.0_f64,
        eta in 0.1..5.0_f64,
        xi in 0.0..10.0_f64,
    ) {
        let inst = ProblemInstance::with_identity(2, 1.0, alpha, eta, vec![0.1, 0.0], vec![0.0, 0.0])
            .unwrap();
        let sig = inst.dv(xi).unwrap();
        if sig >= -alpha * eta {
            let back = inst.dv_star(sig).unwrap();
            prop_assert!((back - xi).abs() <= 1e-12 * (1.0 + xi.abs()));
        }
    }

    /// `g(z) = V(Λ(z)) − fᵀ(z − c)`: the constraint is exactly its canonical
    /// decomposition.
    #[test]
    fn g_decomposes_canonically(seed in 0u64..500, zs in prop::collection::vec(-4.0..4.0_f64, 3)) {
        let inst = seeded_instance(3, seed);
        let z = DVector::from_vec(zs);
        let xi = inst.lambda_op(&z).unwrap();
        let rebuilt = inst.v_value(xi).unwrap() - inst.f().dot(&(&z - inst.c()));
        let g = inst.g_value(&z).unwrap();
        prop_assert!((g - rebuilt).abs() <= 1e-10 * (1.0 + g.abs()));
    }

    /// Central finite differences confirm the analytic gradients of `h` and `g`.
    #[test]
    fn constraint_gradients_match_fd(
        seed in 0u64..500,
        ys in prop::collection::vec(-3.0..3.0_f64, 3),
        zs in prop::collection::vec(-3.0..3.0_f64, 3),
    ) {
        let inst = seeded_instance(3, seed);
        let y = DVector::from_vec(ys);
        let z = DVector::from_vec(zs);
        let step = 1e-6;
        let gh = inst.grad_h(&y).unwrap();
        let gg = inst.grad_g(&z).unwrap();
        for j in 0..3 {
            let mut p = y.clone();
            let mut m = y.clone();
            p[j] += step;
            m[j] -= step;
            let fd = (inst.h_value(&p).unwrap() - inst.h_value(&m).unwrap()) / (2.0 * step);
            prop_assert!((gh[j] - fd).abs() <= 1e-5 * (1.0 + fd.abs()));

            let mut p = z.clone();
            let mut m = z.clone();
            p[j] += step;
            m[j] -= step;
            let fd = (inst.g_value(&p).unwrap() - inst.g_value(&m).unwrap()) / (2.0 * step);
            prop_assert!((gg[j] - fd).abs() <= 1e-5 * (1.0 + fd.abs()));
        }
    }

    /// The recovered pair satisfies `z = (I + λA)y` against a dense product.
    #[test]
    fn recovery_couples_y_and_z(
        seed in 0u64..500,
        lam in 0.05..2.0_f64,
        mu in 0.2..5.0_f64,
        sig in -0.3..1.0_f64,
    ) {
        let inst = seeded_instance(3, seed);
        let cache = SpectralCache::new(&inst).unwrap();
        let dp = DualPoint::new(lam, mu, sig);
        let diag = dual_diagnostics(&inst, &cache, &dp);
        prop_assume!(diag.d.iter().all(|d| d.abs() > 1e-3));
        let x = x_of_dual(&inst, &cache, &dp).unwrap();
        let dense = DMatrix::identity(3, 3) + inst.a() * lam;
        let z_dense = &dense * &x.y;
        prop_assert!((&x.z - z_dense).norm() <= 1e-10 * (1.0 + x.z.norm()));
    }

    /// The envelope gradient of `Πᵈ` matches central finite differences.
    #[test]
    fn envelope_gradient_matches_fd(
        seed in 0u64..200,
        lam in 0.1..1.5_f64,
        mu in 0.5..3.0_f64,
        sig in -0.2..0.8_f64,
    ) {
        let inst = seeded_instance(3, seed);
        let cache = SpectralCache::new(&inst).unwrap();
        let dp = DualPoint::new(lam, mu, sig);
        let diag = dual_diagnostics(&inst, &cache, &dp);
        prop_assume!(diag.d.iter().all(|d| d.abs() > 1e-2));
        let grad = pi_d_gradient(&inst, &cache, &dp).unwrap();
        let step = 1e-6;
        let eval = |l: f64, m: f64, s: f64| {
            pi_d_value(&inst, &cache, &DualPoint::new(l, m, s)).unwrap()
        };
        let fd = [
            (eval(lam + step, mu, sig) - eval(lam - step, mu, sig)) / (2.0 * step),
            (eval(lam, mu + step, sig) - eval(lam, mu - step, sig)) / (2.0 * step),
            (eval(lam, mu, sig + step) - eval(lam, mu, sig - step)) / (2.0 * step),
        ];
        for j in 0..3 {
            prop_assert!(
                (grad[j] - fd[j]).abs() <= 1e-4 * (1.0 + fd[j].abs()),
                "component {}: analytic {} vs fd {}",
                j,
                grad[j],
                fd[j]
            );
        }
    }

    /// The scalar `S_a⁺` test and the direct eigenvalue test of `∇²ₓΞ` agree.
    #[test]
    fn pd_criteria_agree(
        seed in 0u64..200,
        lam in -0.8..2.0_f64,
        mu in 0.0..5.0_f64,
        sig in -1.0..1.0_f64,
    ) {
        let inst = seeded_instance(3, seed);
        let cache = SpectralCache::new(&inst).unwrap();
        let dp = DualPoint::new(lam, mu, sig);
        // The constructor itself cross-checks and errors on disagreement.
        let hess = xi_hessian_x(&inst, &cache, &dp).unwrap();
        if hess.min_eigenvalue.abs() > 1e-6 {
            prop_assert_eq!(hess.pd_scalar, hess.pd_direct);
        }
    }

    /// Weak duality of the total complementary function: `Ξ(x, λ, μ, ς) ≤
    /// L(x, λ, μ)` for every `x`, `μ ≥ 0` and admissible `ς`.
    #[test]
    fn xi_never_exceeds_lagrangian(
        seed in 0u64..200,
        ys in prop::collection::vec(-3.0..3.0_f64, 3),
        zs in prop::collection::vec(-3.0..3.0_f64, 3),
        lam in -2.0..2.0_f64,
        mu in 0.0..5.0_f64,
        sig_shift in 0.0..5.0_f64,
    ) {
        let inst = seeded_instance(3, seed);
        let x = PrimalPoint::new(DVector::from_vec(ys), DVector::from_vec(zs));
        let sig = -inst.alpha() * inst.eta() + sig_shift;
        let l = inst.lagrangian(&x, lam, mu).unwrap();
        let xi = xi_value(&inst, &x, &DualPoint::new(lam, mu, sig)).unwrap();
        prop_assert!(xi <= l + 1e-12 * (1.0 + l.abs() + xi.abs()));
    }

    /// `Πᵈ` is invariant under an orthogonal change of frame
    /// `(A, f, c) → (QAQᵀ, Qf, Qc)`.
    #[test]
    fn dual_function_is_frame_invariant(
        seed in 0u64..200,
        lam in 0.1..1.5_f64,
        mu in 0.5..3.0_f64,
        sig in -0.2..0.8_f64,
    ) {
        let inst = seeded_instance(3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let q = random_orthogonal(3, &mut rng);
        let a_rot = (&q * inst.a() * q.transpose() + (&q * inst.a() * q.transpose()).transpose()) * 0.5;
        let rot = ProblemInstance::new(
            a_rot,
            inst.r(),
            inst.alpha(),
            inst.eta(),
            &q * inst.f(),
            &q * inst.c(),
        )
        .unwrap();
        let dp = DualPoint::new(lam, mu, sig);
        let cache = SpectralCache::new(&inst).unwrap();
        let cache_rot = SpectralCache::new(&rot).unwrap();
        let diag = dual_diagnostics(&inst, &cache, &dp);
        prop_assume!(diag.d.iter().all(|d| d.abs() > 1e-3));
        let v = pi_d_value(&inst, &cache, &dp).unwrap();
        let v_rot = pi_d_value(&rot, &cache_rot, &dp).unwrap();
        prop_assert!((v - v_rot).abs() <= 1e-9 * (1.0 + v.abs()));
    }

    /// The spectral cache reproduces planted eigenvalues of a random SPD matrix.
    #[test]
    fn spectral_cache_recovers_planted_eigenvalues(
        seed in 0u64..500,
        mut eigs in prop::collection::vec(0.2..8.0_f64, 3),
    ) {
        eigs.sort_by(f64::total_cmp);
        prop_assume!(eigs.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, _) = spd_with_eigenvalues(&eigs, &mut rng);
        let inst = ProblemInstance::new(
            a,
            1.0,
            1.0,
            1.0,
            DVector::from_vec(vec![0.1, 0.0, 0.0]),
            DVector::zeros(3),
        )
        .unwrap();
        let cache = SpectralCache::new(&inst).unwrap();
        for (b, e) in cache.beta().iter().zip(eigs.iter()) {
            prop_assert!((b - e).abs() <= 1e-8 * (1.0 + e));
        }
    }

    /// At a recovered point the equality chain collapses whenever the dual
    /// point is stationary; away from stationarity the four values still obey
    /// `Πᵈ = Ξ` by construction.
    #[test]
    fn xi_equals_pi_d_at_recovered_x(
        seed in 0u64..200,
        lam in 0.1..1.5_f64,
        mu in 0.5..3.0_f64,
        sig in -0.2..0.8_f64,
    ) {
        let inst = seeded_instance(3, seed);
        let cache = SpectralCache::new(&inst).unwrap();
        let dp = DualPoint::new(lam, mu, sig);
        let diag = dual_diagnostics(&inst, &cache, &dp);
        prop_assume!(diag.d.iter().all(|d| d.abs() > 1e-3));
        let x = x_of_dual(&inst, &cache, &dp).unwrap();
        let gap = duality_gap(&inst, &cache, &x, &dp).unwrap();
        prop_assert!((gap.xi - gap.pi_d).abs() <= 1e-9 * (1.0 + gap.pi_d.abs()));
    }
}
