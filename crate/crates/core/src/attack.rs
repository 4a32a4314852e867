//! The cheating pipeline for Gaussian bit commitment: concealment bounds,
//! synthesis of Alice's Gaussian cheating unitary, certification of the
//! √(2ε) bound, protocol families and parameter sweeps.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GqbcError;
use crate::metrics;
use crate::purification::{intrinsic_purify_with, relate_purifications_with, tmsv, BipartiteGaussianState};
use crate::state::GaussianState;
use crate::symplectic::{random_covariance_rng, random_symplectic_rng, GaussianUnitary};
use crate::tol::Tolerances;
use crate::Result;

/// A reduced bit-commitment protocol: Alice encodes bit b into the pure
/// 2n-mode state ψ_b and sends the B half to Bob.
#[derive(Debug, Clone)]
pub struct Protocol {
    pub psi0: BipartiteGaussianState,
    pub psi1: BipartiteGaussianState,
}

impl Protocol {
    pub fn new(psi0: BipartiteGaussianState, psi1: BipartiteGaussianState) -> Result<Self> {
        if psi0.n_side() != psi1.n_side() {
            return Err(GqbcError::DimensionMismatch {
                expected: psi0.n_side(),
                got: psi1.n_side(),
            });
        }
        Ok(Protocol { psi0, psi1 })
    }

    pub fn n_side(&self) -> usize {
        self.psi0.n_side()
    }
}

/// End product of the synthesis: concealment bounds, the cheating unitary,
/// and the certified cheating distance δ.
#[derive(Debug, Clone)]
pub struct AttackReport {
    /// Bounds on the concealment D(ρ₀,ρ₁).
    pub epsilon_lower: f64,
    pub epsilon_upper: f64,
    /// Acts on Alice's modes only.
    pub cheat_unitary: GaussianUnitary,
    /// D(ψ₁♯, ψ₁), exact for pure states.
    pub delta: f64,
    /// √(2·epsilon_upper); the certified bound.
    pub bound_rhs: f64,
    /// bound_rhs exceeds 1, so the certificate carries no information.
    pub vacuous: bool,
    pub certified: bool,
    /// Revealing 0 leaves ψ₀ untouched, so it is exact by construction.
    pub honest_zero_exact: bool,
}

/// Bounds on D(ρ₀,ρ₁) for the two reduced commitments.
pub fn concealment(protocol: &Protocol) -> Result<(f64, f64)> {
    let rho0 = protocol.psi0.reduced_b();
    let rho1 = protocol.psi1.reduced_b();
    metrics::trace_distance_bounds(&rho0, &rho1)
}

pub fn build_attack(protocol: &Protocol) -> Result<AttackReport> {
    build_attack_with(protocol, &Tolerances::default())
}

/// Synthesize Alice's cheating unitary: intrinsically purify both reduced
/// commitments, relate each honest state to its intrinsic purification on
/// Alice's side (U₀, U₁), and compose U₁⁻¹∘U₀. Certification checks both
/// δ ≤ √(2·ε_upper) and the proof-chain equality δ = √(1−B²); a failure is
/// an implementation bug, not a report outcome, and raises an error.
pub fn build_attack_with(protocol: &Protocol, tol: &Tolerances) -> Result<AttackReport> {
    let rho0 = protocol.psi0.reduced_b();
    let rho1 = protocol.psi1.reduced_b();
    let (epsilon_lower, epsilon_upper) = metrics::trace_distance_bounds(&rho0, &rho1)?;

    let psi0_hat = intrinsic_purify_with(&rho0, tol)?;
    let psi1_hat = intrinsic_purify_with(&rho1, tol)?;
    let u0 = relate_purifications_with(&protocol.psi0, &psi0_hat, tol)?;
    let u1 = relate_purifications_with(&protocol.psi1, &psi1_hat, tol)?;
    let cheat_unitary = u1.inverse().compose(&u0);

    let psi1_sharp = protocol.psi0.apply_on_a(&cheat_unitary)?;
    let delta = metrics::trace_distance_pure(psi1_sharp.state(), protocol.psi1.state())?;

    let bound_rhs = (2.0 * epsilon_upper).sqrt();
    let certified = delta <= bound_rhs + tol.eig;
    if !certified {
        return Err(GqbcError::CertificationFailure {
            delta,
            bound: bound_rhs,
        });
    }
    // sharper proof-chain identity: delta = sqrt(1 - B^2)
    let b = metrics::bhattacharyya(&rho0, &rho1)?;
    let delta_chain = (1.0 - b * b).max(0.0).sqrt();
    if (delta - delta_chain).abs() > 1e-6 {
        return Err(GqbcError::Numeric(format!(
            "proof-chain identity violated: delta {delta:.9e} vs sqrt(1-B^2) {delta_chain:.9e}"
        )));
    }
    Ok(AttackReport {
        epsilon_lower,
        epsilon_upper,
        cheat_unitary,
        delta,
        bound_rhs,
        vacuous: bound_rhs > 1.0,
        certified,
        honest_zero_exact: true,
    })
}

/// Perfectly concealing case: the cheating unitary converting ψ₀ into ψ₁
/// directly (ρ₀ = ρ₁ required).
pub fn perfect_cheat(protocol: &Protocol) -> Result<GaussianUnitary> {
    relate_purifications_with(&protocol.psi0, &protocol.psi1, &Tolerances::default())
}

/// Named protocol generators shared by the library and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// tmsv purifications of two thermal commitments with parameters x₀, x₁.
    ThermalPair,
    /// coherent commitments separated by a displacement.
    DisplacedPair,
    /// two random mixed commitments, intrinsically purified and scrambled on A.
    SqueezedRandom,
    /// one random commitment purified twice through independent gauges.
    PerfectlyConcealing,
}

impl std::str::FromStr for Family {
    type Err = GqbcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thermal-pair" => Ok(Family::ThermalPair),
            "displaced-pair" => Ok(Family::DisplacedPair),
            "squeezed-random" => Ok(Family::SqueezedRandom),
            "perfectly-concealing" => Ok(Family::PerfectlyConcealing),
            other => Err(GqbcError::InvalidArgument(format!(
                "unknown family '{other}' (expected thermal-pair | displaced-pair | squeezed-random | perfectly-concealing)"
            ))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::ThermalPair => "thermal-pair",
            Family::DisplacedPair => "displaced-pair",
            Family::SqueezedRandom => "squeezed-random",
            Family::PerfectlyConcealing => "perfectly-concealing",
        })
    }
}

/// Free parameters of the generators; unused fields are ignored per family.
#[derive(Debug, Clone)]
pub struct FamilyParams {
    pub n: usize,
    pub x0: f64,
    pub x1: f64,
    pub displacement: f64,
    pub squeeze_bound: f64,
    pub temp_bound: f64,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            n: 1,
            x0: 0.0,
            x1: 0.5,
            displacement: 1.0,
            squeeze_bound: 0.8,
            temp_bound: 4.0,
        }
    }
}

fn nu_of_x(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(GqbcError::InvalidArgument(format!(
            "thermal parameter must lie in [0,1), got {x}"
        )));
    }
    Ok((1.0 + x) / (1.0 - x))
}

/// Deterministic protocol generator for the named families.
pub fn generate(family: Family, params: &FamilyParams, seed: u64) -> Result<Protocol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        Family::ThermalPair => {
            let psi0 = tmsv(nu_of_x(params.x0)?)?;
            let psi1 = tmsv(nu_of_x(params.x1)?)?;
            Protocol::new(psi0, psi1)
        }
        Family::DisplacedPair => {
            let vac2 = GaussianState::vacuum(2);
            let psi0 = BipartiteGaussianState::new(vac2.clone())?;
            let shift = GaussianUnitary::new(
                crate::symplectic::SymplecticMatrix::identity(1),
                DVector::from_vec(vec![params.displacement, 0.0]),
            )?;
            let psi1 = BipartiteGaussianState::new(vac2.apply_unitary(&shift, &[1])?)?;
            Protocol::new(psi0, psi1)
        }
        Family::SqueezedRandom => {
            let n = params.n;
            let make = |rng: &mut ChaCha8Rng| -> Result<BipartiteGaussianState> {
                let g = random_covariance_rng(n, false, params.squeeze_bound, params.temp_bound, rng);
                let mu = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..1.0));
                let rho = GaussianState::new(mu, g)?;
                let hat = intrinsic_purify_with(&rho, &Tolerances::default())?;
                // scramble Alice's side so the honest state is not the
                // intrinsic purification itself
                let scramble = GaussianUnitary::new(
                    random_symplectic_rng(n, params.squeeze_bound, rng),
                    DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..1.0)),
                )?;
                hat.apply_on_a(&scramble)
            };
            let psi0 = make(&mut rng)?;
            let psi1 = make(&mut rng)?;
            Protocol::new(psi0, psi1)
        }
        Family::PerfectlyConcealing => {
            let n = params.n;
            let g = random_covariance_rng(n, false, params.squeeze_bound, params.temp_bound, &mut rng);
            let mu = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..1.0));
            let rho = GaussianState::new(mu, g)?;
            let hat = intrinsic_purify_with(&rho, &Tolerances::default())?;
            let mut scrambled = || -> Result<BipartiteGaussianState> {
                let u = GaussianUnitary::new(
                    random_symplectic_rng(n, params.squeeze_bound, &mut rng),
                    DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..1.0)),
                )?;
                hat.apply_on_a(&u)
            };
            let psi0 = scrambled()?;
            let psi1 = scrambled()?;
            Protocol::new(psi0, psi1)
        }
    }
}

/// One sweep row; failures are recorded instead of aborting the sweep.
#[derive(Debug)]
pub struct SweepRow {
    pub param: f64,
    pub outcome: Result<AttackReport>,
}

/// Attack synthesis over a parameter grid of the thermal family
/// (x₁ varies, x₀ fixed) or the displaced family (displacement varies).
pub fn sweep(family: Family, params: &FamilyParams, grid: &[f64], seed: u64) -> Vec<SweepRow> {
    grid.iter()
        .map(|&p| {
            let mut fp = params.clone();
            match family {
                Family::ThermalPair => fp.x1 = p,
                Family::DisplacedPair => fp.displacement = p,
                Family::SqueezedRandom | Family::PerfectlyConcealing => {
                    fp.temp_bound = p.max(1.0)
                }
            }
            let outcome = generate(family, &fp, seed).and_then(|pr| build_attack(&pr));
            SweepRow { param: p, outcome }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{frobenius, is_symplectic};
    use approx::assert_relative_eq;

    #[test]
    fn concealment_of_identical_protocol() {
        let psi = tmsv(2.0).unwrap();
        let p = Protocol::new(psi.clone(), psi).unwrap();
        let (lo, hi) = concealment(&p).unwrap();
        assert!(lo.abs() < 1e-7);
        assert!(hi.abs() < 1e-5);
    }

    #[test]
    fn concealment_vacuum_vs_thermal() {
        let p = generate(Family::ThermalPair, &FamilyParams::default(), 0).unwrap();
        let (lo, hi) = concealment(&p).unwrap();
        assert_relative_eq!(lo, 1.0 - 0.5_f64.sqrt(), epsilon = 1e-8);
        assert_relative_eq!(hi, 0.5_f64.sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn concealment_displaced_approaches_one() {
        let mut fp = FamilyParams::default();
        fp.displacement = 12.0;
        let p = generate(Family::DisplacedPair, &fp, 0).unwrap();
        let (_, hi) = concealment(&p).unwrap();
        assert!(hi > 0.999999);
    }

    #[test]
    fn attack_on_vacuum_vs_thermal() {
        let p = generate(Family::ThermalPair, &FamilyParams::default(), 0).unwrap();
        let r = build_attack(&p).unwrap();
        assert_relative_eq!(r.delta, 0.5_f64.sqrt(), epsilon = 1e-7);
        assert_relative_eq!(r.bound_rhs, (2.0 * 0.5_f64.sqrt()).sqrt(), epsilon = 1e-7);
        assert!(r.certified);
        assert!(r.vacuous); // sqrt(2*sqrt(0.5)) > 1
        assert!(r.honest_zero_exact);
        assert!(is_symplectic(r.cheat_unitary.s.matrix(), 1e-10).unwrap());
    }

    #[test]
    fn attack_on_perfectly_concealing_protocol() {
        let mut fp = FamilyParams::default();
        fp.n = 2;
        let p = generate(Family::PerfectlyConcealing, &fp, 5).unwrap();
        let r = build_attack(&p).unwrap();
        assert!(r.delta < 1e-7, "delta {}", r.delta);
        assert!(r.certified);
        // the cheat unitary converts psi0 into psi1 directly
        let moved = p.psi0.apply_on_a(&r.cheat_unitary).unwrap();
        let resid = frobenius(&(moved.state().covariance() - p.psi1.state().covariance()))
            / frobenius(p.psi1.state().covariance());
        assert!(resid < 1e-8, "residual {resid:.3e}");
    }

    #[test]
    fn perfect_cheat_contract() {
        let mut fp = FamilyParams::default();
        fp.n = 2;
        let p = generate(Family::PerfectlyConcealing, &fp, 11).unwrap();
        let u = perfect_cheat(&p).unwrap();
        let moved = p.psi0.apply_on_a(&u).unwrap();
        let resid = frobenius(&(moved.state().covariance() - p.psi1.state().covariance()))
            / frobenius(p.psi1.state().covariance());
        assert!(resid < 1e-8);
        assert!((moved.state().mean() - p.psi1.state().mean()).norm() < 1e-8);
    }

    #[test]
    fn perfect_cheat_rejects_non_concealing() {
        let p = generate(Family::ThermalPair, &FamilyParams::default(), 0).unwrap();
        assert!(matches!(
            perfect_cheat(&p),
            Err(GqbcError::ReducedMismatch { .. })
        ));
    }

    #[test]
    fn random_protocols_certify() {
        for seed in 0..25 {
            let mut fp = FamilyParams::default();
            fp.n = 2;
            let p = generate(Family::SqueezedRandom, &fp, seed).unwrap();
            let r = build_attack(&p).unwrap();
            assert!(r.certified, "seed {seed}");
            let rho0 = p.psi0.reduced_b();
            let rho1 = p.psi1.reduced_b();
            let b = metrics::bhattacharyya(&rho0, &rho1).unwrap();
            let expect = (1.0 - b * b).max(0.0).sqrt();
            assert!(
                (r.delta - expect).abs() < 1e-7,
                "seed {seed}: delta {} vs chain {}",
                r.delta,
                expect
            );
        }
    }

    #[test]
    fn bound_chain_on_dense_grid() {
        // sqrt(1-B^2) <= sqrt(2(1-B)) for B in [0,1], equality at B = 1
        for k in 0..=10_000 {
            let b = k as f64 / 10_000.0;
            let lhs = (1.0 - b * b).sqrt();
            let rhs = (2.0 * (1.0 - b)).sqrt();
            assert!(lhs <= rhs + 1e-12, "B = {b}");
        }
    }

    #[test]
    fn sweep_thermal_family() {
        let grid: Vec<f64> = (0..10).map(|k| 0.1 * k as f64).collect();
        let rows = sweep(Family::ThermalPair, &FamilyParams::default(), &grid, 0);
        assert_eq!(rows.len(), 10);
        for row in &rows {
            let r = row.outcome.as_ref().unwrap();
            let oracle = metrics::oracle_commuting(0.0, row.param, 1e-12).unwrap();
            let expect = (1.0 - oracle.b * oracle.b).max(0.0).sqrt();
            assert!(
                (r.delta - expect).abs() < 1e-7,
                "x1 {}: delta {} vs {}",
                row.param,
                r.delta,
                expect
            );
        }
        // single-point grid equals build_attack output
        let single = sweep(Family::ThermalPair, &FamilyParams::default(), &[0.5], 0);
        let direct = build_attack(
            &generate(Family::ThermalPair, &FamilyParams::default(), 0).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(
            single[0].outcome.as_ref().unwrap().delta,
            direct.delta,
            epsilon = 1e-12
        );
        assert!(sweep(Family::ThermalPair, &FamilyParams::default(), &[], 0).is_empty());
    }
}
