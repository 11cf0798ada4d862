//! Command-line surface and its validation into typed configs.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qss_core::protocol::{CheatModel, Party, Secret};
use qss_core::statevec::SingleQubitBasis;
use qss_core::Complex64;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "qss",
    version,
    about = "Resilient quantum secret sharing simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Seeded protocol trials plus the exact branch distribution.
    Run(RunArgs),
    /// Circuit snapshots against the closed-form states.
    Oracle(OracleArgs),
    /// Sweep a cheater's real measurement basis a = cos t, b = sin t.
    Sweep(SweepArgs),
    /// Shor-code encode, inject, syndrome and recover.
    Shor(ShorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheatChoice {
    None,
    Bob,
    Charlie,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartyChoice {
    Bob,
    Charlie,
}

impl From<PartyChoice> for Party {
    fn from(p: PartyChoice) -> Self {
        match p {
            PartyChoice::Bob => Party::Bob,
            PartyChoice::Charlie => Party::Charlie,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SecretArgs {
    /// Cartesian secret: re(alpha),im(alpha),re(beta),im(beta).
    #[arg(
        long,
        value_name = "RE,IM,RE,IM",
        allow_hyphen_values = true,
        conflicts_with = "secret_polar"
    )]
    pub secret: Option<String>,
    /// Polar secret in radians: alpha = cos(theta/2), beta = e^{i phi} sin(theta/2).
    #[arg(long, value_name = "THETA,PHI", allow_hyphen_values = true)]
    pub secret_polar: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub secret: SecretArgs,
    #[arg(long, value_enum, default_value_t = CheatChoice::None)]
    pub cheat: CheatChoice,
    /// Basis angle in degrees for every cheating party.
    #[arg(long, allow_hyphen_values = true)]
    pub cheat_basis_angle: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub bob_angle: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub charlie_angle: Option<f64>,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub secret: SecretArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub secret: SecretArgs,
    #[arg(long, value_enum, default_value_t = PartyChoice::Bob)]
    pub who: PartyChoice,
    /// First angle in degrees.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub start: f64,
    /// Last angle in degrees (inclusive).
    #[arg(long, default_value_t = 90.0, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub step: f64,
    /// Seeded trials per grid point; 0 reports exact values only.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ShorArgs {
    #[command(flatten)]
    pub secret: SecretArgs,
    /// none | exhaustive | X:q | Y:q | Z:q | measure:q:t (t in degrees).
    #[arg(long, default_value = "exhaustive")]
    pub error: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parsed secret plus a warning when the input needed real rescaling.
#[derive(Debug, Clone)]
pub struct ParsedSecret {
    pub secret: Secret<f64>,
    pub warning: Option<String>,
}

fn floats(raw: &str, n: usize, flag: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::usage(format!("--{flag}: {e}")))?;
    if values.len() != n || values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::usage(format!(
            "--{flag} expects {n} finite comma-separated numbers"
        )));
    }
    Ok(values)
}

/// Default secret when neither flag is given: α = 0.6, β = 0.8.
impl SecretArgs {
    pub fn parse(&self) -> Result<ParsedSecret> {
        if let Some(raw) = &self.secret_polar {
            let v = floats(raw, 2, "secret-polar")?;
            return Ok(ParsedSecret {
                secret: Secret::from_polar(v[0], v[1]),
                warning: None,
            });
        }
        let v = match &self.secret {
            Some(raw) => floats(raw, 4, "secret")?,
            None => vec![0.6, 0.0, 0.8, 0.0],
        };
        let (alpha, beta) = (Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]));
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if norm <= 1e-300 {
            return Err(CliError::usage("--secret must not be the zero vector"));
        }
        let scale = norm.sqrt().recip();
        let secret = Secret::new(alpha * scale, beta * scale)?;
        let warning = ((norm.sqrt() - 1.0).abs() > 1e-6)
            .then(|| format!("secret had norm {:.9}; renormalized to 1", norm.sqrt()));
        Ok(ParsedSecret { secret, warning })
    }
}

/// Cheating parties and their basis angles in degrees.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CheatSpec {
    pub bob_angle_deg: Option<f64>,
    pub charlie_angle_deg: Option<f64>,
}

impl CheatSpec {
    pub fn model(&self) -> CheatModel<f64> {
        let basis = |deg: f64| SingleQubitBasis::from_degrees(deg);
        CheatModel {
            bob: self.bob_angle_deg.map(basis),
            charlie: self.charlie_angle_deg.map(basis),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub secret: Secret<f64>,
    pub cheat: CheatSpec,
    pub trials: u64,
    pub seed: u64,
    pub format: Format,
    pub output_path: Option<PathBuf>,
}

impl RunArgs {
    pub fn config(&self) -> Result<(RunConfig, Option<String>)> {
        let parsed = self.secret.parse()?;
        let (bob, charlie) = match self.cheat {
            CheatChoice::None => (false, false),
            CheatChoice::Bob => (true, false),
            CheatChoice::Charlie => (false, true),
            CheatChoice::Both => (true, true),
        };
        if self.bob_angle.is_some() && !bob {
            return Err(CliError::usage("--bob-angle requires --cheat bob or both"));
        }
        if self.charlie_angle.is_some() && !charlie {
            return Err(CliError::usage(
                "--charlie-angle requires --cheat charlie or both",
            ));
        }
        if self.cheat_basis_angle.is_some() && !(bob || charlie) {
            return Err(CliError::usage(
                "--cheat-basis-angle requires a cheating party",
            ));
        }
        let shared = self.cheat_basis_angle.unwrap_or(0.0);
        let pick = |cheats: bool, own: Option<f64>| cheats.then(|| own.unwrap_or(shared));
        for angle in [self.cheat_basis_angle, self.bob_angle, self.charlie_angle]
            .into_iter()
            .flatten()
        {
            if !angle.is_finite() {
                return Err(CliError::usage("basis angles must be finite"));
            }
        }
        let config = RunConfig {
            secret: parsed.secret,
            cheat: CheatSpec {
                bob_angle_deg: pick(bob, self.bob_angle),
                charlie_angle_deg: pick(charlie, self.charlie_angle),
            },
            trials: self.trials,
            seed: self.seed,
            format: self.output.format.unwrap_or(Format::Table),
            output_path: self.output.out.clone(),
        };
        Ok((config, parsed.warning))
    }
}
