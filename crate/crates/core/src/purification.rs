//! Purification constructions: two-mode squeezed normal forms, the Gaussian
//! intrinsic purification, and the Gaussian unitary relating two
//! purifications of a common reduced state.

use nalgebra::{DMatrix, DVector};

use crate::error::GqbcError;
use crate::state::GaussianState;
use crate::symplectic::{
    frobenius, normal_mode_with, sigma_z, standard_form, star_conjugate, symplectic_spectrum,
    williamson_with, GaussianUnitary,
};
use crate::tol::Tolerances;
use crate::Result;

/// A pure 2n-mode Gaussian state with the A|B split fixed as
/// A = first n modes, B = last n modes.
#[derive(Debug, Clone)]
pub struct BipartiteGaussianState {
    state: GaussianState,
    n_side: usize,
}

impl BipartiteGaussianState {
    pub fn new(state: GaussianState) -> Result<Self> {
        Self::with_tolerances(state, &Tolerances::default())
    }

    pub fn with_tolerances(state: GaussianState, tol: &Tolerances) -> Result<Self> {
        if state.n_modes() % 2 != 0 {
            return Err(GqbcError::OddDimension(state.n_modes()));
        }
        let spectrum = symplectic_spectrum(state.covariance())?;
        for nu in spectrum {
            if (nu - 1.0).abs() > 100.0 * tol.eig {
                return Err(GqbcError::NotPure {
                    nu,
                    deviation: (nu - 1.0).abs(),
                });
            }
        }
        let n_side = state.n_modes() / 2;
        Ok(BipartiteGaussianState { state, n_side })
    }

    pub fn state(&self) -> &GaussianState {
        &self.state
    }

    /// Modes per side.
    pub fn n_side(&self) -> usize {
        self.n_side
    }

    pub fn a_modes(&self) -> Vec<usize> {
        (0..self.n_side).collect()
    }

    pub fn b_modes(&self) -> Vec<usize> {
        (self.n_side..2 * self.n_side).collect()
    }

    /// Bob's reduced state Tr_A.
    pub fn reduced_b(&self) -> GaussianState {
        self.state
            .partial_trace(&self.b_modes())
            .expect("B side is nonempty")
    }

    pub fn reduced_a(&self) -> GaussianState {
        self.state
            .partial_trace(&self.a_modes())
            .expect("A side is nonempty")
    }

    pub fn gamma_a(&self) -> DMatrix<f64> {
        let h = 2 * self.n_side;
        self.state.covariance().view((0, 0), (h, h)).into_owned()
    }

    pub fn gamma_b(&self) -> DMatrix<f64> {
        let h = 2 * self.n_side;
        self.state.covariance().view((h, h), (h, h)).into_owned()
    }

    pub fn cross_block(&self) -> DMatrix<f64> {
        let h = 2 * self.n_side;
        self.state.covariance().view((0, h), (h, h)).into_owned()
    }

    /// Apply a Gaussian unitary to Alice's side only.
    pub fn apply_on_a(&self, u: &GaussianUnitary) -> Result<BipartiteGaussianState> {
        let out = self.state.apply_unitary(u, &self.a_modes())?;
        Ok(BipartiteGaussianState {
            state: out,
            n_side: self.n_side,
        })
    }
}

/// Two-mode squeezed vacuum with symplectic eigenvalue ν on each side:
/// γ = [[ν I₂, √(ν²−1) σ_Z], [√(ν²−1) σ_Z, ν I₂]], μ = 0.
pub fn tmsv(nu: f64) -> Result<BipartiteGaussianState> {
    if nu < 1.0 {
        return Err(GqbcError::Physicality { min_eig: nu - 1.0 });
    }
    let gamma = standard_form(&[nu]);
    let state = GaussianState::new(DVector::zeros(4), gamma)?;
    BipartiteGaussianState::new(state)
}

/// Gaussian intrinsic purification: ⊗ₖ tmsv(ν_k) followed by the
/// star-conjugated Williamson unitary on side A and the Williamson unitary
/// itself on side B. The partial trace over A returns the input state.
pub fn intrinsic_purify(rho: &GaussianState) -> Result<BipartiteGaussianState> {
    intrinsic_purify_with(rho, &Tolerances::default())
}

pub fn intrinsic_purify_with(
    rho: &GaussianState,
    tol: &Tolerances,
) -> Result<BipartiteGaussianState> {
    let n = rho.n_modes();
    let w = williamson_with(rho.covariance(), tol)?;
    let v = GaussianUnitary::new(w.s.inverse(), rho.mean().clone())?;
    let v_star = star_conjugate(&v);

    let gamma_tilde = standard_form(&w.nu);
    let base = GaussianState::from_trusted(DVector::zeros(4 * n), gamma_tilde);
    let a_modes: Vec<usize> = (0..n).collect();
    let b_modes: Vec<usize> = (n..2 * n).collect();
    let state = base
        .apply_unitary(&v_star, &a_modes)?
        .apply_unitary(&v, &b_modes)?;
    BipartiteGaussianState::with_tolerances(state, tol)
}

/// Lemma-2 solver: a Gaussian unitary U on Alice's side with
/// (U ⊗ I)|ψ₀⟩ = |ψ₁⟩, for two purifications of a common reduced state.
///
/// Both states are brought to the two-mode-squeezed normal form with a
/// shared B-side Williamson factor; U is then read off from the A-side
/// factors. The returned unitary always satisfies the moment contract; a
/// gauge failure raises an error rather than returning a wrong answer.
pub fn relate_purifications(
    psi0: &BipartiteGaussianState,
    psi1: &BipartiteGaussianState,
) -> Result<GaussianUnitary> {
    relate_purifications_with(psi0, psi1, &Tolerances::default())
}

pub fn relate_purifications_with(
    psi0: &BipartiteGaussianState,
    psi1: &BipartiteGaussianState,
    tol: &Tolerances,
) -> Result<GaussianUnitary> {
    let n = psi0.n_side();
    if psi1.n_side() != n {
        return Err(GqbcError::DimensionMismatch {
            expected: n,
            got: psi1.n_side(),
        });
    }
    let b0 = psi0.reduced_b();
    let b1 = psi1.reduced_b();
    let scale = 1.0 + frobenius(b0.covariance());
    let residual = (frobenius(&(b0.covariance() - b1.covariance())).powi(2)
        + (b0.mean() - b1.mean()).norm_squared())
    .sqrt()
        / scale;
    if residual > tol.matching {
        return Err(GqbcError::ReducedMismatch {
            residual,
            tol: tol.matching,
        });
    }

    // shared B gauge: one Williamson factor for both decompositions
    let w_b = williamson_with(b0.covariance(), tol)?;
    let d0 = normal_mode_with(psi0.state().covariance(), n, Some(&w_b), tol)?;
    let d1 = normal_mode_with(psi1.state().covariance(), n, Some(&w_b), tol)?;

    // (S_A ⊕ S_B) γ (·)ᵀ = γ̃ on both sides with the same S_B, so
    // 𝒮 = S₁ᴬ⁻¹ S₀ᴬ maps γ₀ to γ₁ acting on A only.
    let s_cheat = d1.s_a.inverse().compose(&d0.s_a);
    let mu0_a = psi0.state().mean().rows(0, 2 * n).into_owned();
    let mu1_a = psi1.state().mean().rows(0, 2 * n).into_owned();
    let d = &mu1_a - s_cheat.matrix() * &mu0_a;
    let u = GaussianUnitary::new(s_cheat, d)?;

    // moment contract
    let moved = psi0.apply_on_a(&u)?;
    let g_resid = frobenius(&(moved.state().covariance() - psi1.state().covariance()))
        / (1.0 + frobenius(psi1.state().covariance()));
    let mu_resid = (moved.state().mean() - psi1.state().mean()).norm()
        / (1.0 + psi1.state().mean().norm());
    if g_resid > 1e4 * tol.dec || mu_resid > 1e4 * tol.dec {
        return Err(GqbcError::Gauge(format!(
            "purification relation contract violated (gamma residual {g_resid:.3e}, mu residual {mu_resid:.3e})"
        )));
    }
    Ok(u)
}

/// Mirror of the intrinsic purification's A-side state: Σ_Z-reflected
/// Williamson conjugate of the input. Exposed for tests.
pub fn mirror_state(rho: &GaussianState) -> Result<GaussianState> {
    let n = rho.n_modes();
    let sz = sigma_z(n);
    let gamma = &sz * rho.covariance() * &sz;
    let mu = &sz * rho.mean();
    GaussianState::new(mu, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics;
    use crate::symplectic::{is_symplectic, random_symplectic_rng};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, seed: u64) -> GaussianState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = crate::symplectic::random_covariance_rng(n, false, 0.8, 4.0, &mut rng);
        let mu = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.5..1.5));
        GaussianState::new(mu, g).unwrap()
    }

    #[test]
    fn tmsv_vacuum_limit() {
        let t = tmsv(1.0).unwrap();
        assert_eq!(t.state().covariance(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn tmsv_reductions_are_thermal() {
        let t = tmsv(3.0).unwrap();
        let b = t.reduced_b();
        assert!(frobenius(&(b.covariance() - DMatrix::identity(2, 2) * 3.0)) < 1e-12);
        let a = t.reduced_a();
        assert!(frobenius(&(a.covariance() - DMatrix::identity(2, 2) * 3.0)) < 1e-12);
        assert_relative_eq!(t.state().purity(), 1.0, epsilon = 1e-10);
        let nus = symplectic_spectrum(t.state().covariance()).unwrap();
        for nu in nus {
            assert_relative_eq!(nu, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn tmsv_rejects_unphysical() {
        assert!(matches!(tmsv(0.5), Err(GqbcError::Physicality { .. })));
    }

    #[test]
    fn purify_vacuum_is_two_vacua() {
        let p = intrinsic_purify(&GaussianState::vacuum(1)).unwrap();
        assert!(frobenius(&(p.state().covariance() - DMatrix::identity(4, 4))) < 1e-8);
        assert!(p.state().mean().norm() < 1e-12);
    }

    #[test]
    fn purify_thermal_matches_tmsv_reductions() {
        let rho = GaussianState::thermal(&[3.0]).unwrap();
        let p = intrinsic_purify(&rho).unwrap();
        let b = p.reduced_b();
        assert!(frobenius(&(b.covariance() - rho.covariance())) < 1e-9);
        // side A carries the mirror thermal state
        let a = p.reduced_a();
        assert!(frobenius(&(a.covariance() - rho.covariance())) < 1e-9);
    }

    #[test]
    fn purify_round_trip_random_states() {
        for seed in 0..40 {
            let rho = random_state(3, seed);
            let p = intrinsic_purify(&rho).unwrap();
            let back = p.reduced_b();
            let resid = frobenius(&(back.covariance() - rho.covariance()))
                / frobenius(rho.covariance());
            assert!(resid < 1e-8, "seed {seed}: residual {resid:.3e}");
            assert!((back.mean() - rho.mean()).norm() < 1e-8);
            for nu in symplectic_spectrum(p.state().covariance()).unwrap() {
                assert!((nu - 1.0).abs() < 1e-7, "seed {seed}: global nu {nu}");
            }
            // mirror property of side A
            let mirror = mirror_state(&rho).unwrap();
            let a = p.reduced_a();
            assert!(
                frobenius(&(a.covariance() - mirror.covariance()))
                    < 1e-7 * frobenius(mirror.covariance())
            );
            assert!((a.mean() - mirror.mean()).norm() < 1e-8);
        }
    }

    #[test]
    fn relate_same_state() {
        let psi = intrinsic_purify(&random_state(2, 3)).unwrap();
        let u = relate_purifications(&psi, &psi).unwrap();
        let moved = psi.apply_on_a(&u).unwrap();
        assert!(
            frobenius(&(moved.state().covariance() - psi.state().covariance()))
                < 1e-9 * frobenius(psi.state().covariance())
        );
    }

    #[test]
    fn relate_rotated_copy() {
        let psi0 = intrinsic_purify(&random_state(2, 9)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let r = random_symplectic_rng(2, 0.0, &mut rng); // passive = rotation
        let u_true = GaussianUnitary::new(r, DVector::from_vec(vec![0.5, -0.2, 0.0, 1.0])).unwrap();
        let psi1 = psi0.apply_on_a(&u_true).unwrap();
        let u = relate_purifications(&psi0, &psi1).unwrap();
        let moved = psi0.apply_on_a(&u).unwrap();
        let resid = frobenius(&(moved.state().covariance() - psi1.state().covariance()))
            / frobenius(psi1.state().covariance());
        assert!(resid < 1e-9, "residual {resid:.3e}");
        assert!((moved.state().mean() - psi1.state().mean()).norm() < 1e-9);
    }

    #[test]
    fn relate_tmsv_to_intrinsic_purification() {
        let psi0 = tmsv(3.0).unwrap();
        let psi1 = intrinsic_purify(&GaussianState::thermal(&[3.0]).unwrap()).unwrap();
        let u = relate_purifications(&psi0, &psi1).unwrap();
        assert!(is_symplectic(u.s.matrix(), 1e-10).unwrap());
        let moved = psi0.apply_on_a(&u).unwrap();
        let resid = frobenius(&(moved.state().covariance() - psi1.state().covariance()));
        assert!(resid < 1e-8 * frobenius(psi1.state().covariance()));
    }

    #[test]
    fn relate_rejects_mismatched_reductions() {
        let psi0 = tmsv(3.0).unwrap();
        let psi1 = tmsv(2.0).unwrap();
        assert!(matches!(
            relate_purifications(&psi0, &psi1),
            Err(GqbcError::ReducedMismatch { .. })
        ));
    }

    #[test]
    fn relate_degenerate_spectrum() {
        // two modes with identical nu: a gauge-degenerate case
        let rho = GaussianState::thermal(&[2.5, 2.5]).unwrap();
        let psi0 = intrinsic_purify(&rho).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let scramble = GaussianUnitary::new(
            random_symplectic_rng(2, 0.9, &mut rng),
            DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0)),
        )
        .unwrap();
        let psi1 = psi0.apply_on_a(&scramble).unwrap();
        let u = relate_purifications(&psi0, &psi1).unwrap();
        let moved = psi0.apply_on_a(&u).unwrap();
        let resid = frobenius(&(moved.state().covariance() - psi1.state().covariance()))
            / frobenius(psi1.state().covariance());
        assert!(resid < 1e-8, "residual {resid:.3e}");
    }

    #[test]
    fn lemma1_identity_bridge() {
        // Tr(sqrt(rho0) sqrt(rho1)) = sqrt(F(psi0_hat, psi1_hat))
        for seed in 0..20 {
            let rho0 = random_state(2, 500 + seed);
            let rho1 = random_state(2, 700 + seed);
            let b = metrics::bhattacharyya(&rho0, &rho1).unwrap();
            let p0 = intrinsic_purify(&rho0).unwrap();
            let p1 = intrinsic_purify(&rho1).unwrap();
            let f = metrics::overlap(p0.state(), p1.state()).unwrap();
            assert!(
                (b - f.sqrt()).abs() < 1e-7,
                "seed {seed}: B {b} vs sqrt(F) {}",
                f.sqrt()
            );
        }
    }
}
