//! Stable file formats: state records, protocol files, attack reports and
//! sweep tables. JSON for structured records, CSV for tables; covariance
//! matrices are stored row-major as arrays of arrays in full double
//! precision. Writes are atomic (temp file + rename).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::attack::{AttackReport, Protocol, SweepRow};
use crate::error::GqbcError;
use crate::purification::BipartiteGaussianState;
use crate::state::GaussianState;
use crate::symplectic::{GaussianUnitary, SymplecticMatrix};
use crate::tol::Tolerances;
use crate::Result;

/// Convention marker embedded in every file to make stored data unambiguous.
pub const CONVENTION: &str = "vacuum-gamma=I, interleaved-xp";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateRecord {
    pub mu: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
}

impl StateRecord {
    pub fn from_state(state: &GaussianState) -> Self {
        StateRecord {
            mu: state.mean().iter().cloned().collect(),
            gamma: matrix_rows(state.covariance()),
        }
    }

    /// Parse back into a validated state; `field` names the record in error messages.
    pub fn to_state(&self, field: &str, tol: &Tolerances) -> Result<GaussianState> {
        let gamma = parse_matrix(&self.gamma, field)?;
        if self.mu.len() != gamma.nrows() {
            return Err(GqbcError::InvalidArgument(format!(
                "{field}.mu has length {} but {field}.gamma is {}x{}",
                self.mu.len(),
                gamma.nrows(),
                gamma.nrows()
            )));
        }
        let mu = DVector::from_vec(self.mu.clone());
        GaussianState::with_tolerances(mu, gamma, tol).map_err(|e| {
            // Point at the precise subfield: every moment-validation failure
            // except a mean-length mismatch is a property of the matrix.
            let sub = match &e {
                GqbcError::DimensionMismatch { .. } => "mu",
                _ => "gamma",
            };
            GqbcError::InvalidArgument(format!("{field}.{sub}: {e}"))
        })
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn parse_matrix(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(GqbcError::InvalidArgument(format!(
                "{field}.gamma row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// On-disk protocol: two pure 2n-mode states with the A|B split implied by
/// the stated mode count per side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub convention: String,
    pub n: usize,
    pub psi0: StateRecord,
    pub psi1: StateRecord,
    pub metadata: BTreeMap<String, String>,
}

impl ProtocolFile {
    pub fn from_protocol(protocol: &Protocol, metadata: BTreeMap<String, String>) -> Self {
        ProtocolFile {
            convention: CONVENTION.to_string(),
            n: protocol.n_side(),
            psi0: StateRecord::from_state(protocol.psi0.state()),
            psi1: StateRecord::from_state(protocol.psi1.state()),
            metadata,
        }
    }

    pub fn to_protocol(&self, tol: &Tolerances) -> Result<Protocol> {
        if self.convention != CONVENTION {
            return Err(GqbcError::InvalidArgument(format!(
                "convention: expected \"{CONVENTION}\", found \"{}\"",
                self.convention
            )));
        }
        let psi0 = self.psi0.to_state("psi0", tol)?;
        let psi1 = self.psi1.to_state("psi1", tol)?;
        for (field, st) in [("psi0", &psi0), ("psi1", &psi1)] {
            if st.n_modes() != 2 * self.n {
                return Err(GqbcError::InvalidArgument(format!(
                    "{field}: expected {} modes (2n with n = {}), found {}",
                    2 * self.n,
                    self.n,
                    st.n_modes()
                )));
            }
        }
        let b0 = BipartiteGaussianState::with_tolerances(psi0, tol)
            .map_err(|e| GqbcError::InvalidArgument(format!("psi0: {e}")))?;
        let b1 = BipartiteGaussianState::with_tolerances(psi1, tol)
            .map_err(|e| GqbcError::InvalidArgument(format!("psi1: {e}")))?;
        Protocol::new(b0, b1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitaryRecord {
    pub n: usize,
    pub s: Vec<Vec<f64>>,
    pub d: Vec<f64>,
}

impl UnitaryRecord {
    pub fn from_unitary(u: &GaussianUnitary) -> Self {
        UnitaryRecord {
            n: u.n_modes(),
            s: matrix_rows(u.s.matrix()),
            d: u.d.iter().cloned().collect(),
        }
    }

    pub fn to_unitary(&self, tol: &Tolerances) -> Result<GaussianUnitary> {
        let s = parse_matrix(&self.s, "cheat_unitary")?;
        GaussianUnitary::new(
            SymplecticMatrix::new(s, tol)?,
            DVector::from_vec(self.d.clone()),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackReportFile {
    pub convention: String,
    pub epsilon_lower: f64,
    pub epsilon_upper: f64,
    pub cheat_unitary: UnitaryRecord,
    pub delta: f64,
    pub bound_rhs: f64,
    pub vacuous: bool,
    pub certified: bool,
    pub honest_zero_exact: bool,
}

impl AttackReportFile {
    pub fn from_report(report: &AttackReport) -> Self {
        AttackReportFile {
            convention: CONVENTION.to_string(),
            epsilon_lower: report.epsilon_lower,
            epsilon_upper: report.epsilon_upper,
            cheat_unitary: UnitaryRecord::from_unitary(&report.cheat_unitary),
            delta: report.delta,
            bound_rhs: report.bound_rhs,
            vacuous: report.vacuous,
            certified: report.certified,
            honest_zero_exact: report.honest_zero_exact,
        }
    }
}

pub const SWEEP_CSV_HEADER: &str = "param,eps_lower,eps_upper,delta,bound_rhs,certified";

/// CSV table with the documented column order; row-level failures are
/// recorded in place of the numeric columns.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        match &row.outcome {
            Ok(r) => out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.param, r.epsilon_lower, r.epsilon_upper, r.delta, r.bound_rhs, r.certified
            )),
            Err(e) => out.push_str(&format!(
                "{},error,error,error,error,\"{}\"\n",
                row.param,
                e.to_string().replace('"', "'")
            )),
        }
    }
    out
}

/// Single-report CSV with the same column order (param left empty).
pub fn report_csv(report: &AttackReport) -> String {
    format!(
        "{SWEEP_CSV_HEADER}\n,{},{},{},{},{}\n",
        report.epsilon_lower, report.epsilon_upper, report.delta, report.bound_rhs, report.certified
    )
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp-write");
    fs::write(&tmp, contents)
        .map_err(|e| GqbcError::InvalidArgument(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        GqbcError::InvalidArgument(format!("cannot move into place {}: {e}", path.display()))
    })?;
    Ok(())
}

pub fn read_protocol(path: &Path, tol: &Tolerances) -> Result<(ProtocolFile, Protocol)> {
    let text = fs::read_to_string(path)
        .map_err(|e| GqbcError::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let file: ProtocolFile = serde_json::from_str(&text)
        .map_err(|e| GqbcError::InvalidArgument(format!("{}: {e}", path.display())))?;
    let protocol = file.to_protocol(tol)?;
    Ok((file, protocol))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    out.push('\n');
    out
}
