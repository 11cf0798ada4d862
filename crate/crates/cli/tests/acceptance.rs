//! Acceptance checks, one PASS/FAIL line per criterion. Runs as a plain
//! binary so the lines always reach the terminal.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qss_cli::args::{CheatSpec, Format, RunConfig};
use qss_cli::commands::{cmd_run, cmd_shor, cmd_sweep, ShorTarget, SweepConfig};
use qss_core::oracle::{
    arbitrary_basis_final_state, cheat_final_state, compare, exact_summary, honest_states,
    Agreement,
};
use qss_core::protocol::{
    encode_with_snapshots, forced_branch, party_hadamards, reconstruct, run_protocol_with_rng,
    trial_rng, AncillaOutcome, CheatModel, Party, Secret,
};
use qss_core::shor::{
    inject_error, logical_fidelity, recover, shor_encode, syndrome_branches, ErrorKind, ErrorSpec,
};
use qss_core::statevec::{is_unitary, Gate, Matrix2, PureState, SingleQubitBasis};
use qss_core::Complex64;
use rand::Rng;

const EXACT: f64 = 1e-10;
const FORMULA: f64 = 1e-9;
const UNITARY_RECOVERY: f64 = 1e-9;
const SECRETS: usize = 100;
const TRIALS: u64 = 100_000;
const SIGMAS: f64 = 4.0;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Haar-random secrets from a fixed stream.
fn secrets(n: usize, stream: u64) -> Vec<Secret<f64>> {
    let mut rng = trial_rng(0xACCE, stream);
    (0..n)
        .map(|_| {
            let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
            Secret::from_polar(theta, std::f64::consts::TAU * rng.gen::<f64>())
        })
        .collect()
}

fn comp() -> SingleQubitBasis<f64> {
    SingleQubitBasis::computational()
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{detail}; {:.0} ms", took.as_secs_f64() * 1e3))
}

fn criterion_1() -> Check {
    timed(Duration::from_secs(1), || {
        for (k, s) in secrets(SECRETS, 1).iter().enumerate() {
            let ex = exact_summary(s, &CheatModel::honest()).map_err(|e| e.to_string())?;
            let p11 = ex.distribution.get("11").unwrap();
            ensure((p11 - 1.0).abs() <= EXACT, || {
                format!("secret {k}: P(11) = {p11}")
            })?;
            let t = run_protocol_with_rng(s, &CheatModel::honest(), &mut trial_rng(1, k as u64))
                .map_err(|e| e.to_string())?;
            ensure((t.fidelity_recovered - 1.0).abs() <= EXACT, || {
                format!("secret {k}: fidelity {}", t.fidelity_recovered)
            })?;
        }
        Ok(format!(
            "{SECRETS} secrets, P(11) = 1 and fidelity 1 within {EXACT:e}"
        ))
    })
}

/// Exact support on `{flag, 11}` for many secrets plus a binomial check of
/// the seeded trial counts.
fn single_cheat(who: Party, flag: &str) -> Check {
    timed(Duration::from_secs(10), || {
        let model = CheatModel::single(who, comp());
        for (k, s) in secrets(SECRETS, 2).iter().enumerate() {
            let ex = exact_summary(s, &model).map_err(|e| e.to_string())?;
            for outcome in AncillaOutcome::ALL {
                let key = outcome.to_string();
                let want = if key == flag || key == "11" { 0.5 } else { 0.0 };
                let got = ex.distribution.probability(outcome);
                ensure((got - want).abs() <= EXACT, || {
                    format!("secret {k}: P({key}) = {got}")
                })?;
            }
            for br in &ex.branches {
                ensure((br.fidelity_recovered - 1.0).abs() <= EXACT, || {
                    format!(
                        "secret {k}: branch {} fidelity {}",
                        br.ancilla_outcome, br.fidelity_recovered
                    )
                })?;
            }
        }
        let spec = match who {
            Party::Bob => CheatSpec {
                bob_angle_deg: Some(0.0),
                charlie_angle_deg: None,
            },
            Party::Charlie => CheatSpec {
                bob_angle_deg: None,
                charlie_angle_deg: Some(0.0),
            },
        };
        let config = RunConfig {
            secret: Secret::real(0.6, 0.8).unwrap(),
            cheat: spec,
            trials: TRIALS,
            seed: 2024,
            format: Format::Json,
            output_path: None,
        };
        let report = cmd_run(&config).map_err(|e| e.to_string())?;
        let n = TRIALS as f64;
        let bound = SIGMAS * (n * 0.25).sqrt();
        let mut worst = 0.0f64;
        for (key, entry) in &report.empirical_distribution {
            let expected = if key == flag || key == "11" {
                n / 2.0
            } else {
                0.0
            };
            let dev = (entry.count as f64 - expected).abs();
            ensure(dev <= bound, || {
                format!("P({key}) count {} vs {expected}", entry.count)
            })?;
            worst = worst.max(dev / (n * 0.25).sqrt());
        }
        ensure(
            (report.mean_fidelity_after_correction - 1.0).abs() <= EXACT,
            || {
                format!(
                    "trial mean fidelity {}",
                    report.mean_fidelity_after_correction
                )
            },
        )?;
        Ok(format!(
            "{SECRETS} secrets exact {{{flag}, 11}} = 1/2; {TRIALS} trials worst {worst:.2} sigma"
        ))
    })
}

fn criterion_4() -> Check {
    let model = CheatModel::both(comp(), comp());
    for (k, s) in secrets(SECRETS, 4).iter().enumerate() {
        let ex = exact_summary(s, &model).map_err(|e| e.to_string())?;
        for outcome in AncillaOutcome::ALL {
            let got = ex.distribution.probability(outcome);
            ensure((got - 0.25).abs() <= EXACT, || {
                format!("secret {k}: P({outcome}) = {got}")
            })?;
        }
        let mut verdicts: Vec<_> = ex.branches.iter().map(|b| b.verdict).collect();
        verdicts.sort_by_key(|v| v.outcome().index());
        verdicts.dedup();
        ensure(verdicts.len() == 4, || {
            format!("secret {k}: only {} verdicts reached", verdicts.len())
        })?;
        for br in &ex.branches {
            ensure((br.fidelity_recovered - 1.0).abs() <= EXACT, || {
                format!(
                    "secret {k}: {:?} fidelity {}",
                    br.verdict, br.fidelity_recovered
                )
            })?;
        }
    }
    Ok(format!(
        "{SECRETS} secrets, 1/4 each, all four verdicts recover fidelity 1"
    ))
}

fn criterion_5() -> Check {
    let mut worst = 0.0f64;
    for (k, s) in secrets(SECRETS, 5).iter().enumerate() {
        for who in [Party::Bob, Party::Charlie] {
            for outcome in 0..2 {
                let (_, _, psi8) = forced_branch(s, &CheatModel::single(who, comp()), &[outcome])
                    .map_err(|e| e.to_string())?;
                let paper = cheat_final_state(s, who, outcome).map_err(|e| e.to_string())?;
                let rep = compare(&psi8, &paper).map_err(|e| e.to_string())?;
                worst = worst.max(rep.max_amp_delta);
                ensure(
                    rep.max_amp_delta <= FORMULA && rep.verdict == Agreement::Match,
                    || format!("secret {k}: {} delta {}", paper.label, rep.max_amp_delta),
                )?;
            }
        }
        for (a, b, outcome) in [(1.0, 0.0, 0), (0.0, 1.0, 1)] {
            let basis =
                SingleQubitBasis::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0)).unwrap();
            let eq6 = arbitrary_basis_final_state(s, &basis).as_printed;
            let target = cheat_final_state(s, Party::Bob, outcome).unwrap();
            let delta = eq6
                .amplitudes
                .iter()
                .zip(&target.amplitudes)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            ensure(delta <= FORMULA, || {
                format!("secret {k}: eq6 at ({a},{b}) off by {delta}")
            })?;
        }
    }
    Ok(format!(
        "eq2-eq5 max delta {worst:.2e}, eq6 endpoints reduce, {SECRETS} secrets"
    ))
}

fn criterion_6() -> Check {
    let mut all = vec![Secret::real(0.6, 0.8).unwrap()];
    all.extend(secrets(SECRETS, 6));
    let cfg = |secret| SweepConfig {
        secret,
        who: Party::Bob,
        angles: vec![45.0],
        trials: 0,
        seed: 0,
    };
    let mut worst_fid = 0.0f64;
    let mut min_dev = f64::INFINITY;
    let mut headline = String::new();
    for (k, s) in all.into_iter().enumerate() {
        let rep = cmd_sweep(&cfg(s)).map_err(|e| e.to_string())?;
        let r = &rep.rows[0];
        let total = r.p00 + r.p01 + r.p10 + r.p11;
        ensure((total - 1.0).abs() <= EXACT, || {
            format!("secret {k}: distribution sums to {total}")
        })?;
        ensure(r.fidelity_after_correction < 1.0 - 1e-6, || {
            format!(
                "secret {k}: fidelity {} not below 1",
                r.fidelity_after_correction
            )
        })?;
        worst_fid = worst_fid.max(r.fidelity_after_correction);
        min_dev = min_dev.min(r.half_claim_max_deviation);
        if k == 0 {
            headline = format!(
                "(0.6,0.8): P(11) = {}, fidelity {}, half-claim deviation {}",
                r.p11, r.fidelity_after_correction, r.half_claim_max_deviation
            );
        }
    }
    Ok(format!("{headline}; max fidelity over {SECRETS} secrets {worst_fid:.6}, min deviation {min_dev:.3}"))
}

/// `e^{iδ} Rz(a) Ry(b) Rz(c)`.
fn random_unitary<R: Rng>(rng: &mut R) -> Matrix2<f64> {
    let tau = std::f64::consts::TAU;
    let (d, a, b, c) = (
        rng.gen::<f64>() * tau,
        rng.gen::<f64>() * tau,
        rng.gen::<f64>() * tau,
        rng.gen::<f64>() * tau,
    );
    let e = |phase: f64| Complex64::from_polar(1.0, phase);
    let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
    [
        [
            e(d - a / 2.0 - c / 2.0) * cb,
            -e(d - a / 2.0 + c / 2.0) * sb,
        ],
        [e(d + a / 2.0 - c / 2.0) * sb, e(d + a / 2.0 + c / 2.0) * cb],
    ]
}

fn criterion_7() -> Check {
    timed(Duration::from_secs(30), || {
        let mut cases = 0;
        for (k, s) in secrets(5, 7).iter().enumerate() {
            let rep = cmd_shor(s, ShorTarget::Exhaustive, k as u64).map_err(|e| e.to_string())?;
            ensure(rep.total == 63 && rep.recovered == rep.total, || {
                format!("secret {k}: {}/{} recovered", rep.recovered, rep.total)
            })?;
            cases += rep.total;
        }
        let mut rng = trial_rng(0xACCE, 77);
        let s = secrets(1, 8)[0];
        let clean = shor_encode(&s);
        let mut worst = 0.0f64;
        for k in 0..50 {
            let u = random_unitary(&mut rng);
            let q = rng.gen_range(0..9);
            let err = ErrorSpec::new(ErrorKind::Unitary(u), q).map_err(|e| e.to_string())?;
            let damaged = inject_error(&clean, &err).map_err(|e| e.to_string())?;
            for b in syndrome_branches(&damaged).map_err(|e| e.to_string())? {
                let fixed = recover(&b.codeword, &b.syndrome).map_err(|e| e.to_string())?;
                let f = logical_fidelity(&fixed, &s).map_err(|e| e.to_string())?;
                worst = worst.max(1.0 - f);
                ensure(1.0 - f <= UNITARY_RECOVERY, || {
                    format!("unitary {k} on qubit {q}: fidelity {f}")
                })?;
            }
        }
        Ok(format!(
            "{cases} Pauli/measurement cases at 1e-10, 50 unitaries worst 1-F = {worst:.1e}"
        ))
    })
}

fn criterion_8() -> Check {
    let mut rng = trial_rng(0xACCE, 88);
    let gates = [
        Gate::H(0),
        Gate::X(1),
        Gate::Z(2),
        Gate::cnot(0, 2),
        Gate::cnot(2, 1),
        Gate::toffoli(0, 1, 2),
    ];
    for g in &gates {
        let m = g.matrix::<f64>();
        let d = m.len();
        for i in 0..d {
            for j in 0..d {
                let dot: Complex64 = (0..d).map(|k| m[k][i].conj() * m[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                ensure((dot - want).norm() <= EXACT, || {
                    format!("{g:?} not unitary")
                })?;
            }
        }
    }
    for _ in 0..20 {
        ensure(is_unitary(&random_unitary(&mut rng), EXACT), || {
            "random unitary check failed".into()
        })?;
    }
    for case in 0..50 {
        let n = 4;
        let amps: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut state = PureState::normalized(amps).unwrap();
        for _ in 0..50 {
            let (a, b, c) = (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
            let gate = match rng.gen_range(0..5) {
                0 => Gate::H(a),
                1 => Gate::X(a),
                2 => Gate::Z(a),
                3 if a != b => Gate::cnot(a, b),
                4 if a != b && b != c && a != c => Gate::toffoli(a, b, c),
                _ => Gate::H(a),
            };
            state = state.apply(&gate).unwrap();
        }
        let norm = state.norm_sqr();
        ensure((norm - 1.0).abs() <= EXACT, || {
            format!("circuit {case}: norm {norm}")
        })?;
        let basis = SingleQubitBasis::from_degrees(rng.gen::<f64>() * 360.0);
        let p = state
            .basis_probabilities(rng.gen_range(0..n), &basis)
            .unwrap();
        ensure((p[0] + p[1] - 1.0).abs() <= EXACT, || {
            format!("circuit {case}: Born total {}", p[0] + p[1])
        })?;
        let total = state.outcome_distribution(&[0, 2, 3]).unwrap().total();
        ensure((total - 1.0).abs() <= EXACT, || {
            format!("circuit {case}: joint total {total}")
        })?;
    }
    for (k, s) in secrets(SECRETS, 9).iter().enumerate() {
        let mut sim: Vec<PureState<f64>> = encode_with_snapshots(s).into();
        let psi4 = party_hadamards(&sim[3]).unwrap();
        let (_, tail) = reconstruct(&psi4).unwrap();
        sim.push(psi4);
        sim.extend(tail.into_iter().map(|t| t.state));
        for (state, paper) in sim.iter().zip(honest_states(s)) {
            let rep = compare(state, &paper).unwrap();
            ensure(
                rep.verdict == Agreement::Match && rep.max_amp_delta <= FORMULA,
                || format!("secret {k}: {} delta {}", paper.label, rep.max_amp_delta),
            )?;
        }
    }
    Ok("unitarity, 50 x 50-gate norm preservation, Born completeness, psi0-psi8 oracle (full proptest suites in qss-core)".into())
}

fn run_json() -> std::result::Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qss"))
        .args([
            "run",
            "--cheat",
            "both",
            "--cheat-basis-angle",
            "30",
            "--trials",
            "20000",
            "--seed",
            "77",
            "--format",
            "json",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    Ok(text
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"wall_time_ms\""))
        .collect::<Vec<_>>()
        .join("\n"))
}

fn criterion_9() -> Check {
    let (a, b) = (run_json()?, run_json()?);
    ensure(a == b, || "reports differ".into())?;
    Ok(format!(
        "two runs byte-identical ({} bytes without wall_time_ms)",
        a.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("honest protocol", criterion_1),
        ("Bob computational cheat", || single_cheat(Party::Bob, "01")),
        ("Charlie computational cheat", || {
            single_cheat(Party::Charlie, "10")
        }),
        ("both cheat", criterion_4),
        ("closed-form agreement", criterion_5),
        ("45 degree basis", criterion_6),
        ("Shor recovery", criterion_7),
        ("property checks", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
