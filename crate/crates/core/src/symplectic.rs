//! Real symplectic linear algebra in the interleaved (x₁,p₁,…,xₙ,pₙ)
//! quadrature ordering: the symplectic form, Williamson and normal-mode
//! decompositions, star-conjugation, and seeded random generators.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::GqbcError;
use crate::tol::Tolerances;
use crate::Result;

/// The symplectic form Ω = ⊕ₖ [[0,1],[−1,0]] on `n` modes.
pub fn omega(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(GqbcError::InvalidArgument(
            "mode count must be at least 1".into(),
        ));
    }
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    Ok(m)
}

/// Σ_Z = ⊕ₖ diag(1,−1); the phase-space action of Fock-basis conjugation.
pub fn sigma_z(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            0.0
        } else if i % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
}

pub(crate) fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Checks ‖SΩSᵀ − Ω‖_F ≤ tol.
pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    if s.nrows() != s.ncols() {
        return Err(GqbcError::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    if s.nrows() == 0 || s.nrows() % 2 != 0 {
        return Err(GqbcError::OddDimension(s.nrows()));
    }
    let om = omega(s.nrows() / 2)?;
    let resid = s * &om * s.transpose() - &om;
    Ok(frobenius(&resid) <= tol)
}

/// A real 2n×2n matrix S with SΩSᵀ = Ω.
#[derive(Debug, Clone)]
pub struct SymplecticMatrix {
    n: usize,
    s: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(s: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        if !is_symplectic(&s, tol.sym * (1.0 + frobenius(&s)))? {
            let om = omega(s.nrows() / 2)?;
            let resid = frobenius(&(&s * &om * s.transpose() - &om));
            return Err(GqbcError::Numeric(format!(
                "matrix is not symplectic (residual {resid:.3e})"
            )));
        }
        let n = s.nrows() / 2;
        Ok(SymplecticMatrix { n, s })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix {
            n,
            s: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// S⁻¹ = −Ω Sᵀ Ω, exact on the symplectic group.
    pub fn inverse(&self) -> Self {
        let om = omega(self.n).expect("n >= 1");
        SymplecticMatrix {
            n: self.n,
            s: -(&om * self.s.transpose() * &om),
        }
    }

    pub fn compose(&self, rhs: &SymplecticMatrix) -> Self {
        assert_eq!(self.n, rhs.n, "mode count mismatch in composition");
        SymplecticMatrix {
            n: self.n,
            s: &self.s * &rhs.s,
        }
    }

    /// Construction-time backdoor for matrices symplectic by algebra
    /// (products of validated factors); still debug-asserted.
    pub(crate) fn from_trusted(s: DMatrix<f64>) -> Self {
        debug_assert!(s.nrows() % 2 == 0);
        let n = s.nrows() / 2;
        SymplecticMatrix { n, s }
    }
}

/// A Gaussian unitary in phase space: symplectic matrix plus displacement.
#[derive(Debug, Clone)]
pub struct GaussianUnitary {
    pub s: SymplecticMatrix,
    pub d: DVector<f64>,
}

impl GaussianUnitary {
    pub fn new(s: SymplecticMatrix, d: DVector<f64>) -> Result<Self> {
        if d.len() != 2 * s.n_modes() {
            return Err(GqbcError::DimensionMismatch {
                expected: 2 * s.n_modes(),
                got: d.len(),
            });
        }
        Ok(GaussianUnitary { s, d })
    }

    pub fn identity(n: usize) -> Self {
        GaussianUnitary {
            s: SymplecticMatrix::identity(n),
            d: DVector::zeros(2 * n),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.s.n_modes()
    }

    /// (S₂,d₂)∘(S₁,d₁) = (S₂S₁, S₂d₁+d₂): `self` applied after `first`.
    pub fn compose(&self, first: &GaussianUnitary) -> Self {
        GaussianUnitary {
            s: self.s.compose(&first.s),
            d: self.s.matrix() * &first.d + &self.d,
        }
    }

    pub fn inverse(&self) -> Self {
        let sinv = self.s.inverse();
        let d = -(sinv.matrix() * &self.d);
        GaussianUnitary { s: sinv, d }
    }
}

/// Phase-space image of U ↦ U* (complex conjugation in the Fock basis):
/// (S, d) ↦ (Σ_Z S Σ_Z, Σ_Z d).
pub fn star_conjugate(u: &GaussianUnitary) -> GaussianUnitary {
    let sz = sigma_z(u.n_modes());
    GaussianUnitary {
        s: SymplecticMatrix::from_trusted(&sz * u.s.matrix() * &sz),
        d: &sz * &u.d,
    }
}

fn check_symmetric(gamma: &DMatrix<f64>, tol: &Tolerances) -> Result<()> {
    if gamma.nrows() != gamma.ncols() {
        return Err(GqbcError::NotSquare {
            rows: gamma.nrows(),
            cols: gamma.ncols(),
        });
    }
    if gamma.nrows() == 0 || gamma.nrows() % 2 != 0 {
        return Err(GqbcError::OddDimension(gamma.nrows()));
    }
    let resid = frobenius(&(gamma - gamma.transpose()));
    let bound = tol.sym * (1.0 + frobenius(gamma));
    if resid > bound {
        return Err(GqbcError::NotSymmetric {
            residual: resid,
            tol: bound,
        });
    }
    Ok(())
}

/// Minimum eigenvalue of the Hermitian matrix gamma + iΩ.
pub fn heisenberg_min_eig(gamma: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(gamma, &Tolerances::default())?;
    let n = gamma.nrows() / 2;
    let om = omega(n)?;
    let h = DMatrix::from_fn(2 * n, 2 * n, |i, j| Complex::new(gamma[(i, j)], om[(i, j)]));
    let eig = h.symmetric_eigen();
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Symplectic spectrum as the moduli of the eigenvalues of iΩγ,
/// sorted descending. Independent of the constructive Williamson route.
pub fn symplectic_spectrum(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(gamma, &Tolerances::default())?;
    let n = gamma.nrows() / 2;
    let om = omega(n)?;
    let eigs = (&om * gamma).complex_eigenvalues();
    let mut moduli: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // eigenvalues come in ±iν pairs; keep one per pair
    Ok(moduli.into_iter().step_by(2).take(n).collect())
}

fn sym_matrix_power(gamma: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
    let eig = gamma.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(GqbcError::Physicality { min_eig: min });
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|w| w.powf(p)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// S γ Sᵀ = ⊕ₖ ν_k I₂ with ν sorted descending.
#[derive(Debug, Clone)]
pub struct WilliamsonDecomposition {
    pub s: SymplecticMatrix,
    pub nu: Vec<f64>,
}

pub fn williamson(gamma: &DMatrix<f64>) -> Result<WilliamsonDecomposition> {
    williamson_with(gamma, &Tolerances::default())
}

/// Williamson normal form. The diagonalizer is built from the orthogonal
/// canonical form of the antisymmetric matrix γ^{-1/2} Ω γ^{-1/2}:
/// if Qᵀ(γ^{-1/2} Ω γ^{-1/2})Q = ⊕ₖ ν_k⁻¹ [[0,1],[−1,0]], then
/// S = D^{1/2} Qᵀ γ^{-1/2} is symplectic and SγSᵀ = D = ⊕ₖ ν_k I₂.
pub fn williamson_with(gamma: &DMatrix<f64>, tol: &Tolerances) -> Result<WilliamsonDecomposition> {
    check_symmetric(gamma, tol)?;
    let min_eig = heisenberg_min_eig(gamma)?;
    if min_eig < -tol.eig {
        return Err(GqbcError::Physicality { min_eig });
    }
    let n = gamma.nrows() / 2;
    let dim = 2 * n;
    let gamma_sym = (gamma + gamma.transpose()) * 0.5;

    let inv_sqrt = sym_matrix_power(&gamma_sym, -0.5)?;
    let om = omega(n)?;
    let a = &inv_sqrt * &om * &inv_sqrt; // antisymmetric

    // Diagonalize the Hermitian matrix iA. Eigenpairs come as ±κ with
    // κ = 1/ν; the real/imaginary parts of a +κ eigenvector span the
    // corresponding canonical plane.
    let h = DMatrix::from_fn(dim, dim, |i, j| Complex::new(0.0, a[(i, j)]));
    let eig = h.symmetric_eigen();

    let mut pos: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0.0)
        .map(|(idx, &k)| (k, idx))
        .collect();
    if pos.len() != n {
        return Err(GqbcError::Numeric(format!(
            "expected {n} positive eigenvalues of the canonical form, found {}",
            pos.len()
        )));
    }
    // κ ascending <=> ν descending; tie-break on column index for determinism
    pos.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let mut q = DMatrix::zeros(dim, dim);
    let mut nu = Vec::with_capacity(n);
    for (k, &(kappa, idx)) in pos.iter().enumerate() {
        nu.push(1.0 / kappa);
        let w = eig.eigenvectors.column(idx);
        // fix the phase gauge: largest-modulus entry made real positive
        let (pivot, _) = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap();
        let phase = w[pivot] / w[pivot].norm();
        let sqrt2 = std::f64::consts::SQRT_2;
        for i in 0..dim {
            let z = w[i] / phase;
            q[(i, 2 * k)] = sqrt2 * z.im;
            q[(i, 2 * k + 1)] = sqrt2 * z.re;
        }
    }

    let d_sqrt = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            nu[i / 2].sqrt()
        } else {
            0.0
        }
    });
    let s = d_sqrt * q.transpose() * &inv_sqrt;

    let sm = SymplecticMatrix::new(s, &tol.scaled(10.0))?;
    let recon = sm.matrix() * &gamma_sym * sm.matrix().transpose();
    let target = DMatrix::from_fn(dim, dim, |i, j| if i == j { nu[i / 2] } else { 0.0 });
    let resid = frobenius(&(&recon - &target)) / frobenius(&gamma_sym);
    if resid > tol.dec * 100.0 {
        return Err(GqbcError::Numeric(format!(
            "Williamson reconstruction residual {resid:.3e}"
        )));
    }
    Ok(WilliamsonDecomposition { s: sm, nu })
}

/// The two-mode-squeezed standard form γ̃(ν) on 2m modes (m per side):
/// A and B diagonal blocks ⊕ν_k I₂, cross block ⊕√(ν_k²−1)σ_Z.
pub fn standard_form(nu: &[f64]) -> DMatrix<f64> {
    let m = nu.len();
    let mut g = DMatrix::zeros(4 * m, 4 * m);
    for (k, &v) in nu.iter().enumerate() {
        let c = (v * v - 1.0).max(0.0).sqrt();
        let a = 2 * k;
        let b = 2 * (m + k);
        for r in 0..2 {
            g[(a + r, a + r)] = v;
            g[(b + r, b + r)] = v;
        }
        g[(a, b)] = c;
        g[(b, a)] = c;
        g[(a + 1, b + 1)] = -c;
        g[(b + 1, a + 1)] = -c;
    }
    g
}

/// Gaussian Schmidt form of a pure bipartite covariance:
/// (S_A ⊕ S_B) γ (S_A ⊕ S_B)ᵀ = γ̃(ν).
#[derive(Debug, Clone)]
pub struct NormalModeDecomposition {
    pub s_a: SymplecticMatrix,
    pub s_b: SymplecticMatrix,
    pub nu: Vec<f64>,
}

/// Group sorted symplectic eigenvalues into (approximately) degenerate
/// clusters; returns half-open index ranges.
fn clusters(nu: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=nu.len() {
        if k == nu.len() || (nu[start] - nu[k]).abs() > tol * nu[start].max(1.0) {
            out.push((start, k));
            start = k;
        }
    }
    out
}

pub fn normal_mode_decompose(gamma: &DMatrix<f64>, n_a: usize) -> Result<NormalModeDecomposition> {
    normal_mode_with(gamma, n_a, None, &Tolerances::default())
}

/// Normal-mode decomposition with an optional pre-fixed B-side Williamson
/// factor (the shared gauge used when relating two purifications of the
/// same reduced state).
pub fn normal_mode_with(
    gamma: &DMatrix<f64>,
    n_a: usize,
    fixed_b: Option<&WilliamsonDecomposition>,
    tol: &Tolerances,
) -> Result<NormalModeDecomposition> {
    check_symmetric(gamma, tol)?;
    let dim = gamma.nrows();
    if dim != 4 * n_a {
        return Err(GqbcError::DimensionMismatch {
            expected: 4 * n_a,
            got: dim,
        });
    }
    let global_nu = symplectic_spectrum(gamma)?;
    for &v in &global_nu {
        if (v - 1.0).abs() > 100.0 * tol.eig {
            return Err(GqbcError::NotPure {
                nu: v,
                deviation: (v - 1.0).abs(),
            });
        }
    }

    let half = 2 * n_a;
    let g_a = gamma.view((0, 0), (half, half)).into_owned();
    let g_b = gamma.view((half, half), (half, half)).into_owned();
    let cross = gamma.view((0, half), (half, half)).into_owned();

    let w_a = williamson_with(&g_a, tol)?;
    let w_b = match fixed_b {
        Some(w) => w.clone(),
        None => williamson_with(&g_b, tol)?,
    };
    for k in 0..n_a {
        if (w_a.nu[k] - w_b.nu[k]).abs() > 1e3 * tol.eig * w_a.nu[k].max(1.0) {
            return Err(GqbcError::NotPure {
                nu: w_a.nu[k],
                deviation: (w_a.nu[k] - w_b.nu[k]).abs(),
            });
        }
    }
    let nu = w_a.nu.clone();

    // Cross block in the two-sided Williamson frame. For a pure state it is
    // supported only inside equal-ν clusters, where C' = c·X̃·Σ_Z with X̃
    // orthogonal symplectic and c = √(ν²−1). The residual A-side gauge is
    // the polar factor of C'Σ_Z per cluster.
    let c_w = w_a.s.matrix() * &cross * w_b.s.matrix().transpose();
    let sz = sigma_z(n_a);
    let m_full = &c_w * &sz;

    let mut g_corr = DMatrix::identity(half, half);
    for (lo, hi) in clusters(&nu, 1e-6) {
        let v = nu[lo];
        if (v - 1.0).abs() <= 10.0 * tol.eig {
            continue; // pure modes: no cross correlations, gauge free
        }
        let size = 2 * (hi - lo);
        let block = m_full.view((2 * lo, 2 * lo), (size, size)).into_owned();
        let svd = block.svd(true, true);
        let u = svd.u.as_ref().unwrap();
        let vt = svd.v_t.as_ref().unwrap();
        let orth = u * vt;
        let c_expect = (v * v - 1.0).sqrt();
        for sv in svd.singular_values.iter() {
            if (sv - c_expect).abs() > 1e-4 * c_expect.max(1.0) {
                return Err(GqbcError::Gauge(format!(
                    "cross-block singular value {sv:.6e} deviates from sqrt(nu^2-1) = {c_expect:.6e}"
                )));
            }
        }
        let corr = orth.transpose();
        if !is_symplectic(&corr, 1e-6 * (size as f64))? {
            return Err(GqbcError::Gauge(
                "polar factor of the cross block is not symplectic".into(),
            ));
        }
        g_corr
            .view_mut((2 * lo, 2 * lo), (size, size))
            .copy_from(&corr);
    }

    let s_a = SymplecticMatrix::new(&g_corr * w_a.s.matrix(), &tol.scaled(100.0))?;
    let s_b = w_b.s.clone();

    // reconstruction contract
    let mut s_dir = DMatrix::zeros(dim, dim);
    s_dir.view_mut((0, 0), (half, half)).copy_from(s_a.matrix());
    s_dir
        .view_mut((half, half), (half, half))
        .copy_from(s_b.matrix());
    let recon = &s_dir * gamma * s_dir.transpose();
    let resid = frobenius(&(&recon - standard_form(&nu))) / frobenius(gamma);
    if resid > 1e3 * tol.dec {
        return Err(GqbcError::Gauge(format!(
            "normal-form reconstruction residual {resid:.3e}"
        )));
    }
    Ok(NormalModeDecomposition { s_a, s_b, nu })
}

/// Haar-ish random symplectic in Euler form: passive × local squeezers × passive.
pub fn random_symplectic(n: usize, squeeze_bound: f64, seed: u64) -> SymplecticMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_symplectic_rng(n, squeeze_bound, &mut rng)
}

pub fn random_symplectic_rng<R: Rng>(n: usize, squeeze_bound: f64, rng: &mut R) -> SymplecticMatrix {
    assert!(squeeze_bound >= 0.0, "squeeze bound must be nonnegative");
    let k1 = random_passive(n, rng);
    let mut sq = DMatrix::identity(2 * n, 2 * n);
    for k in 0..n {
        let r: f64 = rng.gen_range(-squeeze_bound..=squeeze_bound);
        sq[(2 * k, 2 * k)] = (-r).exp();
        sq[(2 * k + 1, 2 * k + 1)] = r.exp();
    }
    let k2 = random_passive(n, rng);
    SymplecticMatrix::from_trusted(k1 * sq * k2)
}

/// Realification of a Haar-random n×n unitary: orthogonal and symplectic.
fn random_passive<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex::<f64>::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let diag = r[(j, j)];
        if diag.norm() > 0.0 {
            let phase = diag / diag.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            s[(2 * i, 2 * j)] = q[(i, j)].re;
            s[(2 * i, 2 * j + 1)] = -q[(i, j)].im;
            s[(2 * i + 1, 2 * j)] = q[(i, j)].im;
            s[(2 * i + 1, 2 * j + 1)] = q[(i, j)].re;
        }
    }
    s
}

/// Random admissible covariance S(⊕ν_k I₂)Sᵀ; `pure` forces ν_k = 1.
pub fn random_covariance(
    n: usize,
    pure: bool,
    squeeze_bound: f64,
    temp_bound: f64,
    seed: u64,
) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_covariance_rng(n, pure, squeeze_bound, temp_bound, &mut rng)
}

pub fn random_covariance_rng<R: Rng>(
    n: usize,
    pure: bool,
    squeeze_bound: f64,
    temp_bound: f64,
    rng: &mut R,
) -> DMatrix<f64> {
    assert!(temp_bound >= 1.0, "temperature bound must be at least 1");
    let s = random_symplectic_rng(n, squeeze_bound, rng);
    let mut d = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let nu = if pure { 1.0 } else { rng.gen_range(1.0..=temp_bound) };
        d[(2 * k, 2 * k)] = nu;
        d[(2 * k + 1, 2 * k + 1)] = nu;
    }
    let g = s.matrix() * d * s.matrix().transpose();
    (&g + g.transpose()) * 0.5
}
