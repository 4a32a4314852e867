//! Gaussian states as first- and second-moment pairs, with validity
//! checks, tensor/partial-trace structure, unitary action, thermal-form
//! extraction and the operator square root.

use nalgebra::{DMatrix, DVector};

use crate::error::GqbcError;
use crate::symplectic::{
    frobenius, heisenberg_min_eig, symplectic_spectrum, williamson_with, GaussianUnitary,
    SymplecticMatrix,
};
use crate::tol::Tolerances;
use crate::Result;

/// An n-mode Gaussian state: mean vector μ and covariance matrix γ,
/// vacuum normalized to γ = I. Validated at construction; operations may
/// assume validity.
#[derive(Debug, Clone)]
pub struct GaussianState {
    n: usize,
    mu: DVector<f64>,
    gamma: DMatrix<f64>,
}

/// Construction-free diagnostics, also used by the constructors to reject
/// invalid moment pairs.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub symmetry_residual: f64,
    pub heisenberg_min_eig: f64,
    pub symplectic_spectrum: Vec<f64>,
    pub purity: f64,
    pub valid: bool,
    pub pure: bool,
}

/// Diagnostics for an arbitrary moment pair.
pub fn validate(mu: &DVector<f64>, gamma: &DMatrix<f64>, tol: &Tolerances) -> Result<Diagnostics> {
    if gamma.nrows() != gamma.ncols() {
        return Err(GqbcError::NotSquare {
            rows: gamma.nrows(),
            cols: gamma.ncols(),
        });
    }
    if gamma.nrows() == 0 || gamma.nrows() % 2 != 0 {
        return Err(GqbcError::OddDimension(gamma.nrows()));
    }
    if mu.len() != gamma.nrows() {
        return Err(GqbcError::DimensionMismatch {
            expected: gamma.nrows(),
            got: mu.len(),
        });
    }
    let symmetry_residual = frobenius(&(gamma - gamma.transpose()));
    let sym = (gamma + gamma.transpose()) * 0.5;
    let min_eig = heisenberg_min_eig(&sym)?;
    let spectrum = symplectic_spectrum(&sym)?;
    let det = sym.determinant();
    let purity = if det > 0.0 { 1.0 / det.sqrt() } else { f64::NAN };
    let valid = symmetry_residual <= tol.sym * (1.0 + frobenius(gamma)) && min_eig >= -tol.eig;
    let pure = valid && spectrum.iter().all(|nu| (nu - 1.0).abs() <= tol.eig);
    Ok(Diagnostics {
        symmetry_residual,
        heisenberg_min_eig: min_eig,
        symplectic_spectrum: spectrum,
        purity,
        valid,
        pure,
    })
}

impl GaussianState {
    pub fn new(mu: DVector<f64>, gamma: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerances(mu, gamma, &Tolerances::default())
    }

    pub fn with_tolerances(
        mu: DVector<f64>,
        gamma: DMatrix<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let diag = validate(&mu, &gamma, tol)?;
        if diag.symmetry_residual > tol.sym * (1.0 + frobenius(&gamma)) {
            return Err(GqbcError::NotSymmetric {
                residual: diag.symmetry_residual,
                tol: tol.sym * (1.0 + frobenius(&gamma)),
            });
        }
        if diag.heisenberg_min_eig < -tol.eig {
            return Err(GqbcError::Physicality {
                min_eig: diag.heisenberg_min_eig,
            });
        }
        let n = gamma.nrows() / 2;
        let gamma = (&gamma + gamma.transpose()) * 0.5;
        Ok(GaussianState { n, mu, gamma })
    }

    pub fn vacuum(n: usize) -> Self {
        GaussianState {
            n,
            mu: DVector::zeros(2 * n),
            gamma: DMatrix::identity(2 * n, 2 * n),
        }
    }

    /// Single-set thermal state ⊕ν_k I₂ with zero mean.
    pub fn thermal(nu: &[f64]) -> Result<Self> {
        if nu.iter().any(|&v| v < 1.0) {
            return Err(GqbcError::Physicality {
                min_eig: nu.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0,
            });
        }
        let n = nu.len();
        let gamma = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { nu[i / 2] } else { 0.0 });
        Ok(GaussianState {
            n,
            mu: DVector::zeros(2 * n),
            gamma,
        })
    }

    pub(crate) fn from_trusted(mu: DVector<f64>, gamma: DMatrix<f64>) -> Self {
        let n = gamma.nrows() / 2;
        GaussianState { n, mu, gamma }
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn diagnostics(&self) -> Diagnostics {
        validate(&self.mu, &self.gamma, &Tolerances::default()).expect("state already validated")
    }

    pub fn purity(&self) -> f64 {
        1.0 / self.gamma.determinant().sqrt()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        symplectic_spectrum(&self.gamma)
            .map(|nu| nu.iter().all(|v| (v - 1.0).abs() <= tol))
            .unwrap_or(false)
    }

    /// μ → Sμ + d, γ → SγSᵀ with `u` embedded on `modes` (identity elsewhere).
    pub fn apply_unitary(&self, u: &GaussianUnitary, modes: &[usize]) -> Result<GaussianState> {
        if modes.len() != u.n_modes() {
            return Err(GqbcError::DimensionMismatch {
                expected: u.n_modes(),
                got: modes.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &m in modes {
            if m >= self.n {
                return Err(GqbcError::InvalidArgument(format!(
                    "mode index {m} out of range for {} modes",
                    self.n
                )));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(GqbcError::InvalidArgument(format!(
                    "duplicate mode index {m}"
                )));
            }
        }
        let dim = 2 * self.n;
        let mut s_emb = DMatrix::identity(dim, dim);
        let mut d_emb = DVector::zeros(dim);
        for (a, &ma) in modes.iter().enumerate() {
            for r in 0..2 {
                d_emb[2 * ma + r] = u.d[2 * a + r];
                for (b, &mb) in modes.iter().enumerate() {
                    for c in 0..2 {
                        s_emb[(2 * ma + r, 2 * mb + c)] = u.s.matrix()[(2 * a + r, 2 * b + c)];
                    }
                }
            }
        }
        let mu = &s_emb * &self.mu + d_emb;
        let gamma = &s_emb * &self.gamma * s_emb.transpose();
        Ok(GaussianState::from_trusted(mu, gamma))
    }

    /// Block-direct-sum of moments.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let n = self.n + other.n;
        let mut mu = DVector::zeros(2 * n);
        mu.rows_mut(0, 2 * self.n).copy_from(&self.mu);
        mu.rows_mut(2 * self.n, 2 * other.n).copy_from(&other.mu);
        let mut gamma = DMatrix::zeros(2 * n, 2 * n);
        gamma
            .view_mut((0, 0), (2 * self.n, 2 * self.n))
            .copy_from(&self.gamma);
        gamma
            .view_mut((2 * self.n, 2 * self.n), (2 * other.n, 2 * other.n))
            .copy_from(&other.gamma);
        GaussianState::from_trusted(mu, gamma)
    }

    /// Restriction of μ and γ to the kept modes. The result may be mixed.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<GaussianState> {
        if keep.is_empty() {
            return Err(GqbcError::InvalidArgument(
                "partial trace must keep at least one mode".into(),
            ));
        }
        for &m in keep {
            if m >= self.n {
                return Err(GqbcError::InvalidArgument(format!(
                    "mode index {m} out of range for {} modes",
                    self.n
                )));
            }
        }
        let idx: Vec<usize> = keep.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mu = DVector::from_fn(idx.len(), |i, _| self.mu[idx[i]]);
        let gamma = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.gamma[(idx[i], idx[j])]);
        Ok(GaussianState::from_trusted(mu, gamma))
    }

    /// Williamson unitary V (normal form → state, displacement μ), the
    /// symplectic eigenvalues and the thermal parameters x_k = (ν_k−1)/(ν_k+1).
    pub fn thermal_form(&self) -> Result<ThermalForm> {
        self.thermal_form_with(&Tolerances::default())
    }

    pub fn thermal_form_with(&self, tol: &Tolerances) -> Result<ThermalForm> {
        let w = williamson_with(&self.gamma, tol)?;
        let x: Vec<f64> = w
            .nu
            .iter()
            .map(|&nu| ((nu - 1.0) / (nu + 1.0)).max(0.0))
            .collect();
        let v = GaussianUnitary::new(w.s.inverse(), self.mu.clone())?;
        Ok(ThermalForm { v, nu: w.nu, x })
    }

    /// Operator square root √ρ as a scaled Gaussian: same Williamson basis,
    /// thermal parameters x_k → √x_k, scalar prefactor carried in log space.
    pub fn sqrt_state(&self) -> Result<ScaledGaussian> {
        let tf = self.thermal_form()?;
        let n = self.n;
        let mut log_scale = 0.0;
        let mut nu_sqrt = Vec::with_capacity(n);
        for &x in &tf.x {
            let sx = x.sqrt();
            nu_sqrt.push((1.0 + sx) / (1.0 - sx));
            if x > 0.0 {
                log_scale += 0.5 * (1.0 - x).ln() - (1.0 - sx).ln();
            }
        }
        let sinv: &SymplecticMatrix = &tf.v.s; // normal form -> state
        let d = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { nu_sqrt[i / 2] } else { 0.0 });
        let gamma = sinv.matrix() * d * sinv.matrix().transpose();
        let gamma = (&gamma + gamma.transpose()) * 0.5;
        Ok(ScaledGaussian {
            state: GaussianState::from_trusted(self.mu.clone(), gamma),
            log_scale,
        })
    }
}

/// Williamson unitary plus thermal spectrum data of a state.
#[derive(Debug, Clone)]
pub struct ThermalForm {
    /// Maps the normal-form thermal state onto the original state.
    pub v: GaussianUnitary,
    pub nu: Vec<f64>,
    pub x: Vec<f64>,
}

/// exp(log_scale) · ρ — a positive scalar multiple of a Gaussian state.
/// Phase-space moments cannot carry a non-unit trace, so the scalar rides
/// separately in log space.
#[derive(Debug, Clone)]
pub struct ScaledGaussian {
    pub state: GaussianState,
    pub log_scale: f64,
}

impl From<GaussianState> for ScaledGaussian {
    fn from(state: GaussianState) -> Self {
        ScaledGaussian {
            state,
            log_scale: 0.0,
        }
    }
}
