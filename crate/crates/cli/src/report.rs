//! Serializable report shapes and their CSV / table renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qss_core::oracle::DiscrepancyReport;
use qss_core::protocol::Secret;
use qss_core::Complex64;
use serde::Serialize;

use crate::args::{CheatSpec, Format, RunConfig};
use crate::numfmt::{rational, sig12};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        ComplexOut {
            re: sig12(z.re),
            im: sig12(z.im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecretOut {
    pub alpha: ComplexOut,
    pub beta: ComplexOut,
}

impl From<&Secret<f64>> for SecretOut {
    fn from(s: &Secret<f64>) -> Self {
        SecretOut {
            alpha: s.alpha().into(),
            beta: s.beta().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub secret: SecretOut,
    pub cheat: CheatSpec,
    pub trials: u64,
    pub seed: u64,
    pub format: Format,
    pub output_path: Option<String>,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        ConfigEcho {
            secret: (&c.secret).into(),
            cheat: c.cheat,
            trials: c.trials,
            seed: c.seed,
            format: c.format,
            output_path: c.output_path.as_ref().map(|p| p.display().to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactEntry {
    pub probability: f64,
    /// Fraction annotation such as `"1/4"` when one fits within 1e-12.
    pub exact: Option<String>,
}

impl ExactEntry {
    pub fn new(p: f64) -> Self {
        ExactEntry {
            probability: sig12(p),
            exact: rational(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalEntry {
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub max_amp_delta: f64,
    pub fidelity_after_renorm: f64,
    pub verdict: String,
}

impl From<&DiscrepancyReport<f64>> for ComparisonRow {
    fn from(r: &DiscrepancyReport<f64>) -> Self {
        ComparisonRow {
            label: r.label.to_string(),
            max_amp_delta: sig12(r.max_amp_delta),
            fidelity_after_renorm: sig12(r.fidelity_after_renorm),
            verdict: r.verdict.to_string(),
        }
    }
}

/// Result of `qss run`. Maps are keyed by the 2-bit ancilla string or the
/// verdict name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub exact_distribution: BTreeMap<String, ExactEntry>,
    pub empirical_distribution: BTreeMap<String, EmpiricalEntry>,
    pub verdict_counts: BTreeMap<String, u64>,
    pub mean_fidelity_before_correction: f64,
    pub mean_fidelity_after_correction: f64,
    pub exact_mean_fidelity_before_correction: f64,
    pub exact_mean_fidelity_after_correction: f64,
    pub paper_comparison: Vec<ComparisonRow>,
    pub wall_time_ms: f64,
}

fn json(value: &impl Serialize) -> crate::error::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

impl Report {
    pub fn render(&self, format: Format) -> crate::error::Result<String> {
        match format {
            Format::Json => json(self),
            Format::Csv => Ok(self.csv()),
            Format::Table => Ok(self.table()),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::from("section,key,value\n");
        let mut row = |section: &str, key: &str, value: String| {
            let _ = writeln!(out, "{section},{key},{value}");
        };
        let c = &self.config;
        row("config", "secret.alpha.re", c.secret.alpha.re.to_string());
        row("config", "secret.alpha.im", c.secret.alpha.im.to_string());
        row("config", "secret.beta.re", c.secret.beta.re.to_string());
        row("config", "secret.beta.im", c.secret.beta.im.to_string());
        row("config", "cheat.bob_angle_deg", opt(c.cheat.bob_angle_deg));
        row(
            "config",
            "cheat.charlie_angle_deg",
            opt(c.cheat.charlie_angle_deg),
        );
        row("config", "trials", c.trials.to_string());
        row("config", "seed", c.seed.to_string());
        for (k, e) in &self.exact_distribution {
            row("exact_distribution", k, e.probability.to_string());
            row("exact_annotation", k, e.exact.clone().unwrap_or_default());
        }
        for (k, e) in &self.empirical_distribution {
            row("empirical_count", k, e.count.to_string());
            row("empirical_frequency", k, e.frequency.to_string());
        }
        for (k, n) in &self.verdict_counts {
            row("verdict_counts", k, n.to_string());
        }
        row(
            "mean_fidelity_before_correction",
            "",
            self.mean_fidelity_before_correction.to_string(),
        );
        row(
            "mean_fidelity_after_correction",
            "",
            self.mean_fidelity_after_correction.to_string(),
        );
        row(
            "exact_mean_fidelity_before_correction",
            "",
            self.exact_mean_fidelity_before_correction.to_string(),
        );
        row(
            "exact_mean_fidelity_after_correction",
            "",
            self.exact_mean_fidelity_after_correction.to_string(),
        );
        for p in &self.paper_comparison {
            row(
                "paper_comparison",
                &format!("{}.max_amp_delta", p.label),
                p.max_amp_delta.to_string(),
            );
            row(
                "paper_comparison",
                &format!("{}.fidelity_after_renorm", p.label),
                p.fidelity_after_renorm.to_string(),
            );
            row(
                "paper_comparison",
                &format!("{}.verdict", p.label),
                p.verdict.clone(),
            );
        }
        row("wall_time_ms", "", self.wall_time_ms.to_string());
        out
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "secret  alpha = {} {:+}i, beta = {} {:+}i",
            c.secret.alpha.re, c.secret.alpha.im, c.secret.beta.re, c.secret.beta.im
        );
        let _ = writeln!(
            out,
            "cheat   bob = {}, charlie = {}",
            angle(c.cheat.bob_angle_deg),
            angle(c.cheat.charlie_angle_deg)
        );
        let _ = writeln!(out, "trials  {} (seed {})\n", c.trials, c.seed);
        let _ = writeln!(
            out,
            "{:<8}{:>16}{:>8}{:>12}{:>16}",
            "ancilla", "exact", "", "count", "frequency"
        );
        for (k, e) in &self.exact_distribution {
            let emp = &self.empirical_distribution[k];
            let _ = writeln!(
                out,
                "{:<8}{:>16}{:>8}{:>12}{:>16}",
                k,
                e.probability,
                e.exact.as_deref().unwrap_or(""),
                emp.count,
                emp.frequency
            );
        }
        let _ = writeln!(out);
        for (k, n) in &self.verdict_counts {
            let _ = writeln!(out, "{k:<16}{n:>12}");
        }
        let _ = writeln!(
            out,
            "\nmean fidelity before correction {} (exact {})",
            self.mean_fidelity_before_correction, self.exact_mean_fidelity_before_correction
        );
        let _ = writeln!(
            out,
            "mean fidelity after correction  {} (exact {})",
            self.mean_fidelity_after_correction, self.exact_mean_fidelity_after_correction
        );
        if !self.paper_comparison.is_empty() {
            let _ = writeln!(
                out,
                "\n{:<20}{:>22}{:>22}  verdict",
                "closed form", "max_amp_delta", "fidelity_renorm"
            );
            for p in &self.paper_comparison {
                let _ = writeln!(
                    out,
                    "{:<20}{:>22}{:>22}  {}",
                    p.label, p.max_amp_delta, p.fidelity_after_renorm, p.verdict
                );
            }
        }
        let _ = writeln!(out, "\nwall time {:.1} ms", self.wall_time_ms);
        out
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn angle(x: Option<f64>) -> String {
    x.map(|v| format!("measures at {v} deg"))
        .unwrap_or_else(|| "honest".into())
}

/// One circuit-versus-closed-form line of `qss oracle`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub label: String,
    pub circuit: String,
    pub closed_form: String,
    pub max_amp_delta: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub secret: SecretOut,
    pub states: Vec<OracleRow>,
}

impl OracleReport {
    pub fn render(&self, format: Format) -> crate::error::Result<String> {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut out = String::from("label,circuit,closed_form,max_amp_delta,verdict\n");
                for r in &self.states {
                    let _ = writeln!(
                        out,
                        "{},\"{}\",\"{}\",{},{}",
                        r.label, r.circuit, r.closed_form, r.max_amp_delta, r.verdict
                    );
                }
                Ok(out)
            }
            Format::Table => {
                let mut out = String::new();
                for r in &self.states {
                    let _ = writeln!(
                        out,
                        "{}  [{}, max_amp_delta {}]",
                        r.label, r.verdict, r.max_amp_delta
                    );
                    let _ = writeln!(out, "  circuit      {}", r.circuit);
                    let _ = writeln!(out, "  closed form  {}", r.closed_form);
                }
                Ok(out)
            }
        }
    }
}

/// Sparse ket listing with 6-decimal amplitudes, e.g. `0.5|000> - 0.5|110>`.
pub fn ket(amps: &[Complex64]) -> String {
    let n = amps.len().trailing_zeros() as usize;
    let mut terms = Vec::new();
    for (idx, z) in amps.iter().enumerate() {
        if z.norm() < 1e-12 {
            continue;
        }
        let coeff = if z.im.abs() < 1e-12 {
            format!("{:.6}", z.re)
        } else if z.re.abs() < 1e-12 {
            format!("{:.6}i", z.im)
        } else {
            format!("({:.6}{:+.6}i)", z.re, z.im)
        };
        terms.push(format!("{coeff}|{idx:0n$b}>"));
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub angle_deg: f64,
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
    pub fidelity_after_correction: f64,
    pub half_claim_max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_fidelity_after_correction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub secret: SecretOut,
    pub who: String,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn render(&self, format: Format) -> crate::error::Result<String> {
        let empirical = self.trials > 0;
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut out = String::from(
                    "angle_deg,p00,p01,p10,p11,fidelity_after_correction,half_claim_max_deviation",
                );
                out.push_str(if empirical {
                    ",empirical_fidelity_after_correction\n"
                } else {
                    "\n"
                });
                for r in &self.rows {
                    let _ = write!(
                        out,
                        "{},{},{},{},{},{},{}",
                        r.angle_deg,
                        r.p00,
                        r.p01,
                        r.p10,
                        r.p11,
                        r.fidelity_after_correction,
                        r.half_claim_max_deviation
                    );
                    match r.empirical_fidelity_after_correction {
                        Some(f) => {
                            let _ = writeln!(out, ",{f}");
                        }
                        None => out.push('\n'),
                    }
                }
                Ok(out)
            }
            Format::Table => {
                let mut out = format!("{} measures in basis cos(t)|0> + sin(t)|1>\n", self.who);
                let _ = writeln!(
                    out,
                    "{:>8}{:>16}{:>16}{:>16}{:>16}{:>16}{:>16}",
                    "t", "p00", "p01", "p10", "p11", "fidelity", "half_dev"
                );
                for r in &self.rows {
                    let _ = write!(
                        out,
                        "{:>8}{:>16.10}{:>16.10}{:>16.10}{:>16.10}{:>16.10}{:>16.10}",
                        r.angle_deg,
                        r.p00,
                        r.p01,
                        r.p10,
                        r.p11,
                        r.fidelity_after_correction,
                        r.half_claim_max_deviation
                    );
                    match r.empirical_fidelity_after_correction {
                        Some(f) => {
                            let _ = writeln!(out, "  empirical {f:.6}");
                        }
                        None => out.push('\n'),
                    }
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyndromeOut {
    pub syndrome: String,
    pub probability: f64,
    pub fidelity: f64,
}

/// One injected error and every syndrome branch it can produce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShorCase {
    pub error: String,
    /// Forced or sampled outcome for measurement errors.
    pub outcome: Option<usize>,
    pub branches: Vec<SyndromeOut>,
    pub sampled_syndrome: String,
    pub sampled_fidelity: f64,
    pub min_fidelity: f64,
    pub recovered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShorReport {
    pub secret: SecretOut,
    pub seed: u64,
    pub tolerance: f64,
    pub cases: Vec<ShorCase>,
    pub recovered: usize,
    pub total: usize,
}

impl ShorReport {
    pub fn render(&self, format: Format) -> crate::error::Result<String> {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut out = String::from("error,outcome,syndrome,probability,fidelity\n");
                for c in &self.cases {
                    for b in &c.branches {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{}",
                            c.error,
                            c.outcome.map(|o| o.to_string()).unwrap_or_default(),
                            b.syndrome,
                            b.probability,
                            b.fidelity
                        );
                    }
                }
                Ok(out)
            }
            Format::Table => {
                let mut out = format!(
                    "{:<16}{:>8}{:>14}{:>18}  recovered\n",
                    "error", "outcome", "syndrome", "min fidelity"
                );
                for c in &self.cases {
                    let _ = writeln!(
                        out,
                        "{:<16}{:>8}{:>14}{:>18.12}  {}",
                        c.error,
                        c.outcome
                            .map(|o| o.to_string())
                            .unwrap_or_else(|| "-".into()),
                        if c.branches.len() == 1 {
                            c.branches[0].syndrome.clone()
                        } else {
                            format!("{} branches", c.branches.len())
                        },
                        c.min_fidelity,
                        if c.recovered { "yes" } else { "NO" }
                    );
                }
                let _ = writeln!(
                    out,
                    "\n{}/{} recovered within {:e}",
                    self.recovered, self.total, self.tolerance
                );
                Ok(out)
            }
        }
    }
}
