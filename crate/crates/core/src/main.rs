//! Command-line surface: protocol generation, validation, attack synthesis,
//! sweeps and oracle cross-checks.
//!
//! Exit codes: 0 success (and, for `attack`, certified), 2 invalid input,
//! 3 certification failure (a theorem-violating bug signal), 1 other errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gqbc::attack::{build_attack_with, concealment, generate, sweep, Family, FamilyParams};
use gqbc::io::{
    read_protocol, report_csv, sweep_csv, to_json_pretty, write_atomic, AttackReportFile,
    ProtocolFile,
};
use gqbc::metrics::oracle_commuting;
use gqbc::state::validate;
use gqbc::{GqbcError, Tolerances};

#[derive(Parser)]
#[command(
    name = "gqbc",
    about = "Gaussian bit-commitment toolkit: purifications, concealment bounds, cheating-unitary synthesis",
    long_about = "Generates Gaussian bit-commitment protocols, bounds their concealment, \
synthesizes Alice's Gaussian cheating unitary and certifies the sqrt(2*eps) cheating bound. \
Conventions: vacuum covariance = I, interleaved x,p quadrature ordering. \
The env var GBC_DEFAULT_TOL (a float) overrides the default eigenvalue/decomposition tolerances."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Eigenvalue slack for Heisenberg/purity checks.
    #[arg(long, global = true)]
    tol_eig: Option<f64>,
    /// Relative reconstruction residual for decompositions.
    #[arg(long, global = true)]
    tol_dec: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Ok(v) = std::env::var("GBC_DEFAULT_TOL") {
            if let Ok(x) = v.parse::<f64>() {
                tol.eig = x;
                tol.dec = x;
            }
        }
        if let Some(e) = self.tol_eig {
            tol.eig = e;
        }
        if let Some(d) = self.tol_dec {
            tol.dec = d;
        }
        tol
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a protocol file for a named family.
    Gen {
        /// thermal-pair | displaced-pair | squeezed-random | perfectly-concealing
        #[arg(long)]
        family: String,
        /// Modes per side (random families).
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Thermal parameter of the bit-0 commitment (thermal-pair).
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        /// Thermal parameter of the bit-1 commitment (thermal-pair).
        #[arg(long, default_value_t = 0.5)]
        x1: f64,
        /// Displacement between commitments (displaced-pair).
        #[arg(long, default_value_t = 1.0)]
        displacement: f64,
        /// Squeezing bound for random generators.
        #[arg(long, default_value_t = 0.8)]
        squeeze_bound: f64,
        /// Symplectic-eigenvalue bound for random generators.
        #[arg(long, default_value_t = 4.0)]
        temp_bound: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Synthesize and certify Alice's cheating unitary for a protocol file.
    Attack {
        #[arg(long, name = "in")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// json | csv
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run the attack over a parameter grid and write a CSV table.
    Sweep {
        #[arg(long)]
        family: String,
        /// Comma-separated grid values (x1 for thermal-pair, displacement for displaced-pair).
        #[arg(long)]
        grid: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, default_value_t = 0.8)]
        squeeze_bound: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Fock-series distinguishability oracle for two thermal parameters.
    Oracle {
        x0: f64,
        x1: f64,
        /// Geometric truncation tail bound.
        #[arg(long, default_value_t = 1e-12)]
        tail: f64,
    },
    /// Validate a protocol file and report diagnostics and concealment bounds.
    Validate {
        #[arg(long, name = "in")]
        r#in: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
}

fn exit_code_of(err: &GqbcError) -> u8 {
    match err {
        GqbcError::CertificationFailure { .. } => 3,
        GqbcError::InvalidArgument(_)
        | GqbcError::NotSquare { .. }
        | GqbcError::OddDimension(_)
        | GqbcError::DimensionMismatch { .. }
        | GqbcError::NotSymmetric { .. }
        | GqbcError::Physicality { .. }
        | GqbcError::NotPure { .. }
        | GqbcError::ReducedMismatch { .. } => 2,
        GqbcError::Gauge(_) | GqbcError::Numeric(_) => 1,
    }
}

fn run(cli: Cli) -> Result<(), GqbcError> {
    match cli.command {
        Command::Gen {
            family,
            n,
            x0,
            x1,
            displacement,
            squeeze_bound,
            temp_bound,
            seed,
            out,
            tol: _,
        } => {
            let family: Family = family.parse()?;
            let params = FamilyParams {
                n,
                x0,
                x1,
                displacement,
                squeeze_bound,
                temp_bound,
            };
            let protocol = generate(family, &params, seed)?;
            let mut metadata = BTreeMap::new();
            metadata.insert("family".to_string(), family.to_string());
            metadata.insert("seed".to_string(), seed.to_string());
            metadata.insert(
                "params".to_string(),
                format!(
                    "n={n} x0={x0} x1={x1} displacement={displacement} squeeze_bound={squeeze_bound} temp_bound={temp_bound}"
                ),
            );
            let file = ProtocolFile::from_protocol(&protocol, metadata);
            write_atomic(&out, &to_json_pretty(&file))?;
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Attack {
            r#in,
            out,
            format,
            tol,
        } => {
            let tol = tol.resolve();
            let (_, protocol) = read_protocol(&r#in, &tol)?;
            let report = build_attack_with(&protocol, &tol)?;
            let contents = match format.as_str() {
                "json" => to_json_pretty(&AttackReportFile::from_report(&report)),
                "csv" => report_csv(&report),
                other => {
                    return Err(GqbcError::InvalidArgument(format!(
                        "unknown format '{other}' (expected json | csv)"
                    )))
                }
            };
            write_atomic(&out, &contents)?;
            println!(
                "delta = {:.12} bound_rhs = {:.12}{} certified = {}",
                report.delta,
                report.bound_rhs,
                if report.vacuous { " (vacuous)" } else { "" },
                report.certified
            );
            Ok(())
        }
        Command::Sweep {
            family,
            grid,
            n,
            x0,
            squeeze_bound,
            seed,
            out,
            tol: _,
        } => {
            let family: Family = family.parse()?;
            let grid: Vec<f64> = grid
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|e| {
                        GqbcError::InvalidArgument(format!("bad grid value '{s}': {e}"))
                    })
                })
                .collect::<Result<_, _>>()?;
            let params = FamilyParams {
                n,
                x0,
                squeeze_bound,
                ..FamilyParams::default()
            };
            let rows = sweep(family, &params, &grid, seed);
            write_atomic(&out, &sweep_csv(&rows))?;
            let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
            eprintln!("wrote {} rows ({failures} failures)", rows.len());
            Ok(())
        }
        Command::Oracle { x0, x1, tail } => {
            let r = oracle_commuting(x0, x1, tail)?;
            println!("{}", to_json_pretty(&r).trim_end());
            Ok(())
        }
        Command::Validate { r#in, tol } => {
            let tol = tol.resolve();
            let (file, protocol) = read_protocol(&r#in, &tol)?;
            for (name, st) in [("psi0", protocol.psi0.state()), ("psi1", protocol.psi1.state())] {
                let d = validate(st.mean(), st.covariance(), &tol)?;
                println!(
                    "{name}: valid = {} pure = {} purity = {:.9} heisenberg_min_eig = {:.3e}",
                    d.valid, d.pure, d.purity, d.heisenberg_min_eig
                );
            }
            let (lo, hi) = concealment(&protocol)?;
            println!("concealment: eps_lower = {lo:.12} eps_upper = {hi:.12}");
            if let Some(fam) = file.metadata.get("family") {
                println!("family: {fam}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}
