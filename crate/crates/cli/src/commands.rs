//! The four subcommands, each producing a serializable report.

use std::collections::BTreeMap;
use std::time::Instant;

use qss_core::oracle::{
    arbitrary_basis_final_state, both_cheat_final_state, cheat_final_state, collapsed_remainder,
    compare, exact_summary, honest_states, plus_basis_final_state, PaperState,
};
use qss_core::protocol::{
    encode_with_snapshots, forced_branch, party_hadamards, reconstruct, run_protocol_with_rng,
    trial_rng, AncillaOutcome, CheatModel, Party, Secret, Verdict,
};
use qss_core::shor::{
    inject_error_traced, logical_fidelity, measure_syndrome, recover, shor_encode,
    syndrome_branches, ErrorKind, ErrorSpec, ShorCodeword, CODE_QUBITS,
};
use qss_core::statevec::{PureState, SingleQubitBasis};
use qss_core::Error;
use rand::Rng;

use crate::args::{CheatSpec, RunConfig};
use crate::error::{CliError, Result};
use crate::numfmt::sig12;
use crate::report::{
    ket, ComparisonRow, EmpiricalEntry, ExactEntry, OracleReport, OracleRow, Report, ShorCase,
    ShorReport, SweepReport, SweepRow, SyndromeOut,
};

/// `ψ0..ψ8` from the honest circuit.
pub fn honest_circuit(secret: &Secret<f64>) -> Result<Vec<PureState<f64>>> {
    let mut states: Vec<PureState<f64>> = encode_with_snapshots(secret).into();
    let psi4 = party_hadamards(&states[3])?;
    let (_, tail) = reconstruct(&psi4)?;
    states.push(psi4);
    states.extend(tail.into_iter().map(|s| s.state));
    Ok(states)
}

/// Outcome index whose basis vector is |bit⟩, if `basis` is computational.
fn computational_outcome(basis: &SingleQubitBasis<f64>, bit: usize) -> Option<usize> {
    if basis.b().norm() < 1e-12 {
        Some(bit)
    } else if basis.a().norm() < 1e-12 {
        Some(1 - bit)
    } else {
        None
    }
}

fn push_comparison(
    rows: &mut Vec<ComparisonRow>,
    sim: &PureState<f64>,
    paper: &PaperState<f64>,
) -> Result<()> {
    rows.push((&compare(sim, paper)?).into());
    Ok(())
}

/// Forced branch, or `None` when it has zero Born weight.
fn branch(
    secret: &Secret<f64>,
    model: &CheatModel<f64>,
    outcomes: &[usize],
) -> Result<Option<(PureState<f64>, PureState<f64>)>> {
    match forced_branch(secret, model, outcomes) {
        Ok((_, collapsed, psi8)) => Ok(Some((collapsed, psi8))),
        Err(Error::ZeroProbabilityBranch) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Every closed form that applies to this cheat model, compared against the
/// simulated branch it describes.
pub fn paper_comparison(secret: &Secret<f64>, cheat: &CheatSpec) -> Result<Vec<ComparisonRow>> {
    let model = cheat.model();
    let mut rows = Vec::new();
    match (model.bob, model.charlie) {
        (None, None) => {
            for (sim, paper) in honest_circuit(secret)?.iter().zip(&honest_states(secret)) {
                push_comparison(&mut rows, sim, paper)?;
            }
        }
        (Some(basis), None) | (None, Some(basis)) => {
            let who = if model.bob.is_some() {
                Party::Bob
            } else {
                Party::Charlie
            };
            if let Some(zero) = computational_outcome(&basis, 0) {
                if let (Some((collapsed, _)), Some(paper)) = (
                    branch(secret, &model, &[zero])?,
                    collapsed_remainder(secret, &[who]),
                ) {
                    push_comparison(&mut rows, &collapsed, &paper)?;
                }
                for bit in 0..2 {
                    let outcome = computational_outcome(&basis, bit).expect("computational");
                    if let Some((_, psi8)) = branch(secret, &model, &[outcome])? {
                        push_comparison(&mut rows, &psi8, &cheat_final_state(secret, who, bit)?)?;
                    }
                }
            }
            if who == Party::Bob {
                if let Some((_, psi8)) = branch(secret, &model, &[0])? {
                    let closed = arbitrary_basis_final_state(secret, &basis);
                    push_comparison(&mut rows, &psi8, &closed.as_printed)?;
                    let deg = cheat.bob_angle_deg.unwrap_or(0.0);
                    if ((deg - 45.0).rem_euclid(360.0)).abs() < 1e-9 {
                        push_comparison(&mut rows, &psi8, &plus_basis_final_state(secret))?;
                    }
                }
            }
        }
        (Some(b), Some(c)) => {
            if let (Some(ob), Some(oc)) =
                (computational_outcome(&b, 0), computational_outcome(&c, 0))
            {
                if let Some((collapsed, psi8)) = branch(secret, &model, &[ob, oc])? {
                    if let Some(paper) = collapsed_remainder(secret, &[Party::Bob, Party::Charlie])
                    {
                        push_comparison(&mut rows, &collapsed, &paper)?;
                    }
                    push_comparison(&mut rows, &psi8, &both_cheat_final_state(secret))?;
                }
            }
        }
    }
    Ok(rows)
}

pub fn cmd_run(config: &RunConfig) -> Result<Report> {
    let started = Instant::now();
    let model = config.cheat.model();
    let summary = exact_summary(&config.secret, &model)?;

    let mut counts = [0u64; 4];
    let mut verdicts: BTreeMap<String, u64> =
        Verdict::ALL.iter().map(|v| (v.to_string(), 0)).collect();
    let (mut before, mut after) = (0.0, 0.0);
    for trial in 0..config.trials {
        let t = run_protocol_with_rng(&config.secret, &model, &mut trial_rng(config.seed, trial))?;
        counts[t.ancilla_outcome.index()] += 1;
        *verdicts.entry(t.verdict.to_string()).or_default() += 1;
        before += t.fidelity_before_correction;
        after += t.fidelity_recovered;
    }
    let n = config.trials as f64;

    let mut exact_distribution = BTreeMap::new();
    let mut empirical_distribution = BTreeMap::new();
    for outcome in AncillaOutcome::ALL {
        let key = outcome.to_string();
        let count = counts[outcome.index()];
        exact_distribution.insert(
            key.clone(),
            ExactEntry::new(summary.distribution.probability(outcome)),
        );
        empirical_distribution.insert(
            key,
            EmpiricalEntry {
                count,
                frequency: sig12(count as f64 / n),
            },
        );
    }

    let paper_comparison = paper_comparison(&config.secret, &config.cheat)?;
    Ok(Report {
        config: config.into(),
        exact_distribution,
        empirical_distribution,
        verdict_counts: verdicts,
        mean_fidelity_before_correction: sig12(before / n),
        mean_fidelity_after_correction: sig12(after / n),
        exact_mean_fidelity_before_correction: sig12(summary.mean_fidelity_before_correction),
        exact_mean_fidelity_after_correction: sig12(summary.mean_fidelity_after_correction),
        paper_comparison,
        wall_time_ms: sig12(started.elapsed().as_secs_f64() * 1e3),
    })
}

pub fn cmd_oracle(secret: &Secret<f64>) -> Result<OracleReport> {
    let circuit = honest_circuit(secret)?;
    let states = circuit
        .iter()
        .zip(honest_states(secret))
        .map(|(sim, paper)| {
            let rep = compare(sim, &paper)?;
            Ok(OracleRow {
                label: paper.label.to_string(),
                circuit: ket(sim.amplitudes()),
                closed_form: ket(&paper.amplitudes),
                max_amp_delta: sig12(rep.max_amp_delta),
                verdict: rep.verdict.to_string(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(OracleReport {
        secret: secret.into(),
        states,
    })
}

/// Angle grid in degrees, both ends inclusive.
pub fn angle_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(CliError::usage(
            "empty angle grid: need finite start <= stop and step > 0",
        ));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if n > 1_000_000 {
        return Err(CliError::usage("angle grid too large"));
    }
    Ok((0..n).map(|k| sig12(start + k as f64 * step)).collect())
}

pub struct SweepConfig {
    pub secret: Secret<f64>,
    pub who: Party,
    pub angles: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// Largest distance from ½ among the probabilities the ½ claim covers:
/// each adversary outcome, the all-clear reading 11 and the cheater's flag.
pub fn half_claim_deviation(
    who: Party,
    marginal: [f64; 2],
    dist: &qss_core::oracle::ExactDistribution<f64>,
) -> Result<f64> {
    let flag = match who {
        Party::Bob => "01",
        Party::Charlie => "10",
    };
    let candidates = [marginal[0], marginal[1], dist.get("11")?, dist.get(flag)?];
    Ok(candidates
        .iter()
        .map(|p| (p - 0.5).abs())
        .fold(0.0, f64::max))
}

pub fn cmd_sweep(config: &SweepConfig) -> Result<SweepReport> {
    let mut rows = Vec::with_capacity(config.angles.len());
    for &deg in &config.angles {
        let model = CheatModel::single(config.who, SingleQubitBasis::from_degrees(deg));
        let summary = exact_summary(&config.secret, &model)?;
        let d = &summary.distribution;
        let empirical = if config.trials > 0 {
            let mut total = 0.0;
            for trial in 0..config.trials {
                let t = run_protocol_with_rng(
                    &config.secret,
                    &model,
                    &mut trial_rng(config.seed, trial),
                )?;
                total += t.fidelity_recovered;
            }
            Some(sig12(total / config.trials as f64))
        } else {
            None
        };
        rows.push(SweepRow {
            angle_deg: deg,
            p00: sig12(d.get("00")?),
            p01: sig12(d.get("01")?),
            p10: sig12(d.get("10")?),
            p11: sig12(d.get("11")?),
            fidelity_after_correction: sig12(summary.mean_fidelity_after_correction),
            half_claim_max_deviation: sig12(half_claim_deviation(
                config.who,
                summary.adversary_marginals[0].1,
                d,
            )?),
            empirical_fidelity_after_correction: empirical,
        });
    }
    Ok(SweepReport {
        secret: (&config.secret).into(),
        who: config.who.to_string(),
        trials: config.trials,
        seed: config.seed,
        rows,
    })
}

/// What `qss shor --error` asks for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShorTarget {
    None,
    Exhaustive,
    Pauli(char, usize),
    Measure { qubit: usize, angle_deg: f64 },
}

impl std::str::FromStr for ShorTarget {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            CliError::usage(format!(
                "unknown --error {s:?}; expected none, exhaustive, X:q, Y:q, Z:q or measure:q:t"
            ))
        };
        let qubit = |q: &str| -> Result<usize> {
            let q: usize = q.parse().map_err(|_| bad())?;
            if q >= CODE_QUBITS {
                return Err(CliError::usage(format!(
                    "qubit {q} outside 0..{CODE_QUBITS}"
                )));
            }
            Ok(q)
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["none"] => Ok(ShorTarget::None),
            ["exhaustive"] => Ok(ShorTarget::Exhaustive),
            [p @ ("X" | "Y" | "Z" | "x" | "y" | "z"), q] => Ok(ShorTarget::Pauli(
                p.chars().next().unwrap().to_ascii_uppercase(),
                qubit(q)?,
            )),
            ["measure", q, t] => {
                let angle_deg: f64 = t.parse().map_err(|_| bad())?;
                if !angle_deg.is_finite() {
                    return Err(bad());
                }
                Ok(ShorTarget::Measure {
                    qubit: qubit(q)?,
                    angle_deg,
                })
            }
            _ => Err(bad()),
        }
    }
}

pub const SHOR_TOLERANCE: f64 = 1e-10;

fn pauli(p: char) -> ErrorKind<f64> {
    match p {
        'X' => ErrorKind::PauliX,
        'Y' => ErrorKind::PauliY,
        _ => ErrorKind::PauliZ,
    }
}

fn fidelity_or_zero(
    cw: &ShorCodeword<f64>,
    syn: &qss_core::shor::Syndrome,
    secret: &Secret<f64>,
) -> Result<f64> {
    match recover(cw, syn) {
        Ok(fixed) => Ok(logical_fidelity(&fixed, secret)?),
        Err(Error::UncorrectableSyndrome(_)) => Ok(0.0),
        Err(e) => Err(e.into()),
    }
}

fn shor_case<R: Rng>(
    secret: &Secret<f64>,
    error: String,
    outcome: Option<usize>,
    damaged: &ShorCodeword<f64>,
    rng: &mut R,
) -> Result<ShorCase> {
    let mut branches = Vec::new();
    let mut min_fidelity = 1.0f64;
    for b in syndrome_branches(damaged)? {
        let fidelity = fidelity_or_zero(&b.codeword, &b.syndrome, secret)?;
        min_fidelity = min_fidelity.min(fidelity);
        branches.push(SyndromeOut {
            syndrome: b.syndrome.to_string(),
            probability: sig12(b.probability),
            fidelity: sig12(fidelity),
        });
    }
    let draws: [f64; 8] = std::array::from_fn(|_| rng.gen());
    let (syndrome, collapsed) = measure_syndrome(damaged, &draws)?;
    let sampled_fidelity = fidelity_or_zero(&collapsed, &syndrome, secret)?;
    Ok(ShorCase {
        error,
        outcome,
        branches,
        sampled_syndrome: syndrome.to_string(),
        sampled_fidelity: sig12(sampled_fidelity),
        min_fidelity: sig12(min_fidelity),
        recovered: min_fidelity >= 1.0 - SHOR_TOLERANCE,
    })
}

pub fn cmd_shor(secret: &Secret<f64>, target: ShorTarget, seed: u64) -> Result<ShorReport> {
    let clean = shor_encode(secret);
    let mut rng = trial_rng(seed, 0);
    let mut cases = Vec::new();
    match target {
        ShorTarget::None => cases.push(shor_case(secret, "none".into(), None, &clean, &mut rng)?),
        ShorTarget::Pauli(p, q) => {
            let err = ErrorSpec::new(pauli(p), q)?;
            let damaged = inject_error_traced(&clean, &err)?.0;
            cases.push(shor_case(
                secret,
                err.to_string(),
                None,
                &damaged,
                &mut rng,
            )?);
        }
        ShorTarget::Measure { qubit, angle_deg } => {
            let basis = SingleQubitBasis::from_degrees(angle_deg);
            let err = ErrorSpec::new(
                ErrorKind::Measure {
                    basis,
                    draw: rng.gen(),
                },
                qubit,
            )?;
            let (damaged, outcome) = inject_error_traced(&clean, &err)?;
            let label = format!("measure:{qubit}:{angle_deg}");
            cases.push(shor_case(secret, label, outcome, &damaged, &mut rng)?);
        }
        ShorTarget::Exhaustive => {
            for p in ['X', 'Y', 'Z'] {
                for q in 0..CODE_QUBITS {
                    let err = ErrorSpec::new(pauli(p), q)?;
                    let damaged = inject_error_traced(&clean, &err)?.0;
                    cases.push(shor_case(
                        secret,
                        err.to_string(),
                        None,
                        &damaged,
                        &mut rng,
                    )?);
                }
            }
            for angle_deg in [0.0, 45.0] {
                let basis = SingleQubitBasis::from_degrees(angle_deg);
                for q in 0..CODE_QUBITS {
                    for outcome in 0..2 {
                        let projected = match clean.state.project(q, &basis, outcome) {
                            Ok(m) => m.post_state,
                            Err(Error::ZeroProbabilityBranch) => continue,
                            Err(e) => return Err(e.into()),
                        };
                        let damaged = ShorCodeword {
                            state: projected,
                            logical: clean.logical,
                        };
                        let label = format!("measure:{q}:{angle_deg}");
                        cases.push(shor_case(secret, label, Some(outcome), &damaged, &mut rng)?);
                    }
                }
            }
        }
    }
    let recovered = cases.iter().filter(|c| c.recovered).count();
    Ok(ShorReport {
        secret: secret.into(),
        seed,
        tolerance: SHOR_TOLERANCE,
        total: cases.len(),
        recovered,
        cases,
    })
}
